import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import fft

from ..exceptions import SymbolError, ZeroModeError
from ..grid import Grid, RealField, apply_symbol, evaluate_symbol, l2_norm, mean

ZERO_MODE_TOL = 1e-10


class KernelSpec(ABC):
    """
    A convolution kernel beta described by its Fourier symbol.

    The class of admissible kernels is 0 <= beta_hat(xi) <= C (1 + xi^2)^(-r/2)
    with r >= 2. `r` and `C` are the claimed decay exponent and constant;
    `verify_decay` is the tool for checking a claim, nothing here enforces it.
    """
    family: ClassVar[str]

    def __init__(self, r: float, C: float):
        if not r >= 2:
            raise ValueError(f'Decay exponent must be >= 2, got {r}')
        if not C > 0:
            raise ValueError(f'Decay constant must be positive, got {C}')
        self.r = float(r)
        self.C = float(C)
        self._evolution_cache: dict[Grid, NDArray[np.float64]] = {}
        self._cache_lock = threading.Lock()

    @abstractmethod
    def symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        """beta_hat evaluated at the given frequencies."""

    @property
    def params(self) -> dict[str, Any]:
        return {}

    def describe(self) -> dict[str, Any]:
        return {'family': self.family, 'params': self.params, 'r': self.r, 'C': self.C}

    def _compute_evolution_symbol(self, grid: Grid) -> NDArray[np.float64]:
        xi = grid.rfrequencies
        beta_hat = evaluate_symbol(grid, self.symbol)
        return -xi ** 2 * beta_hat

    def evolution_symbol(self, grid: Grid) -> NDArray[np.float64]:
        """Symbol -xi^2 beta_hat(xi) of B w = (beta * w)_xx on the grid, computed once per grid."""
        cached = self._evolution_cache.get(grid)
        if cached is not None:
            return cached
        with self._cache_lock:
            if grid not in self._evolution_cache:
                values = np.array(self._compute_evolution_symbol(grid), dtype=np.float64)
                if not np.all(np.isfinite(values)):
                    raise SymbolError(f'{self.family} kernel symbol is not finite on grid {grid}')
                if np.any(values[1:] > 0):
                    raise SymbolError(f'{self.family} kernel symbol is negative on grid {grid}')
                values.setflags(write=False)
                self._evolution_cache[grid] = values
        return self._evolution_cache[grid]

    def dispersion(self, grid: Grid) -> NDArray[np.float64]:
        """omega(xi) = |xi| sqrt(beta_hat(xi)), the linear wave frequency."""
        return np.sqrt(np.maximum(-self.evolution_symbol(grid), 0.0))

    def p_symbol(self, grid: Grid) -> NDArray[np.float64]:
        omega = self.dispersion(grid)
        if np.any(omega[1:] <= 0):
            xi = grid.rfrequencies[1:][omega[1:] <= 0][0]
            raise SymbolError(f'{self.family} kernel symbol vanishes at grid frequency xi={xi:g}; '
                              f'P is undefined there')
        symbol = np.zeros_like(omega)
        symbol[1:] = 1.0 / omega[1:]
        return symbol

    def p_inv_symbol(self, grid: Grid) -> NDArray[np.float64]:
        omega = self.dispersion(grid).copy()
        omega[0] = 0.0
        return omega

    def apply_B(self, w: RealField) -> RealField:
        return apply_symbol(w, self.evolution_symbol(w.grid))

    def __repr__(self):
        params = ', '.join(f'{k}={v!r}' for k, v in self.params.items())
        return f'{type(self).__name__}({params})'


@dataclass(frozen=True)
class DecayReport:
    passed: bool
    r: float
    C: float
    worst_violation: float
    worst_frequency: float
    samples: int


def verify_decay(k: KernelSpec, r: float, C: float, frequencies: ArrayLike, rtol: float = 1e-12) -> DecayReport:
    """
    Check 0 <= beta_hat(xi) <= C (1 + xi^2)^(-r/2) at every finite sample.

    The violation at a sample is max(-beta_hat, beta_hat - bound); equality
    is accepted up to `rtol` relative to the bound.
    """
    xi = np.asarray(frequencies, dtype=np.float64).ravel()
    xi = xi[np.isfinite(xi)]
    if xi.size == 0:
        raise ValueError('verify_decay needs at least one finite sample frequency')
    beta_hat = np.asarray(k.symbol(xi), dtype=np.float64)
    bound = C * (1.0 + xi ** 2) ** (-r / 2)
    violation = np.maximum(-beta_hat, beta_hat - bound * (1.0 + rtol))
    violation = np.where(np.isfinite(violation), violation, np.inf)
    worst = int(np.argmax(violation))
    return DecayReport(passed=bool(violation[worst] <= 0),
                       r=float(r),
                       C=float(C),
                       worst_violation=float(violation[worst]),
                       worst_frequency=float(xi[worst]),
                       samples=int(xi.size))


def fit_decay_constant(k: KernelSpec, r: float, frequencies: ArrayLike) -> float:
    """Smallest C for which the decay bound with exponent r holds on the samples."""
    xi = np.asarray(frequencies, dtype=np.float64).ravel()
    return float(np.max(np.asarray(k.symbol(xi)) * (1.0 + xi ** 2) ** (r / 2)))


def _check_zero_mode(w: RealField, zero_mode_tol: float):
    norm = l2_norm(w)
    if norm == 0:
        return
    ratio = abs(mean(w)) * np.sqrt(w.grid.period) / norm
    if ratio > zero_mode_tol:
        raise ZeroModeError(ratio, zero_mode_tol)


def apply_B(k: KernelSpec, w: RealField) -> RealField:
    return k.apply_B(w)


def apply_P(k: KernelSpec, w: RealField, zero_mode_tol: float = ZERO_MODE_TOL) -> RealField:
    """P w with symbol |xi|^-1 beta_hat^-1/2; the zero mode of w must be negligible."""
    _check_zero_mode(w, zero_mode_tol)
    return apply_symbol(w, k.p_symbol(w.grid))


def apply_P_inv(k: KernelSpec, w: RealField) -> RealField:
    return apply_symbol(w, k.p_inv_symbol(w.grid))


def p_norm_squared(k: KernelSpec, w: RealField, zero_mode_tol: float = ZERO_MODE_TOL) -> float:
    """||P w||^2 computed on the frequency side."""
    _check_zero_mode(w, zero_mode_tol)
    coefficients = fft.rfft(w.values)
    return float(np.sum(w.grid.parseval_weights * (k.p_symbol(w.grid) * np.abs(coefficients)) ** 2))


def p_inner_product(k: KernelSpec, u: RealField, v: RealField,
                    zero_mode_tol: float = ZERO_MODE_TOL) -> float:
    """<P u, P v> computed on the frequency side."""
    _check_zero_mode(u, zero_mode_tol)
    _check_zero_mode(v, zero_mode_tol)
    p2 = k.p_symbol(u.grid) ** 2
    product = fft.rfft(u.values) * np.conj(fft.rfft(v.values))
    return float(np.sum(u.grid.parseval_weights * p2 * product.real))
