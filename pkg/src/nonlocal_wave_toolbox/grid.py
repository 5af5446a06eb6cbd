"""
Periodic grid, real-FFT transforms, Fourier multipliers and the norm suite.

The real line is replaced by the periodic domain [-L/2, L/2) sampled at n nodes.
Fourier coefficients are stored in the real-FFT layout (n/2 + 1 nonnegative
frequencies), so conjugate symmetry of a real field is structural. Every
multiplier symbol is evaluated at those nonnegative frequencies and is
therefore assumed even, except for odd derivative symbols (i*xi)^k which
are handled by `derivative`.

Norms use the continuum-consistent weighting: ||u||^2 = dx * sum(u_j^2), and
the Sobolev norm is normalized so that `sobolev_norm(u, 0) == l2_norm(u)`.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import fft

from .exceptions import GridError, GridMismatchError, SymbolError

Symbol = Union[Callable[[NDArray[np.float64]], ArrayLike], ArrayLike]


@dataclass(frozen=True)
class Grid:
    n: int
    period: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4 or (int(self.n) & (int(self.n) - 1)) != 0:
            raise GridError(f'Node count must be a power of two >= 4, got {self.n}')
        if not np.isfinite(self.period) or self.period <= 0:
            raise GridError(f'Period must be positive and finite, got {self.period}')
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'period', float(self.period))

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @cached_property
    def nodes(self) -> NDArray[np.float64]:
        x = -0.5 * self.period + self.spacing * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def frequencies(self) -> NDArray[np.float64]:
        """All n frequencies xi_j = 2*pi*j/L in the standard FFT ordering."""
        xi = 2.0 * np.pi * fft.fftfreq(self.n, d=self.spacing)
        xi.setflags(write=False)
        return xi

    @cached_property
    def rfrequencies(self) -> NDArray[np.float64]:
        """The n/2 + 1 nonnegative frequencies matching the real-FFT layout."""
        xi = 2.0 * np.pi * fft.rfftfreq(self.n, d=self.spacing)
        xi.setflags(write=False)
        return xi

    @cached_property
    def parseval_weights(self) -> NDArray[np.float64]:
        # interior modes stand for a +/- pair, zero and Nyquist modes for themselves
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = w[-1] = 1.0
        w *= self.period / self.n ** 2
        w.setflags(write=False)
        return w

    def field(self, values: ArrayLike) -> 'RealField':
        return RealField(self, values)

    def sample(self, func: Callable[[NDArray[np.float64]], ArrayLike]) -> 'RealField':
        return RealField(self, func(self.nodes))

    def zeros(self) -> 'RealField':
        return RealField(self, np.zeros(self.n))


@dataclass(frozen=True, eq=False)
class RealField:
    grid: Grid
    values: NDArray[np.float64]

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n,):
            raise GridError(f'Field has shape {values.shape}, grid expects ({self.grid.n},)')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def _check_same_grid(self, other: 'RealField'):
        if other.grid != self.grid:
            raise GridMismatchError(self.grid, other.grid)

    def __add__(self, other: 'RealField') -> 'RealField':
        self._check_same_grid(other)
        return RealField(self.grid, self.values + other.values)

    def __sub__(self, other: 'RealField') -> 'RealField':
        self._check_same_grid(other)
        return RealField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> 'RealField':
        return RealField(self.grid, float(scalar) * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> 'RealField':
        return RealField(self.grid, -self.values)

    def __repr__(self):
        return f'RealField(n={self.grid.n}, period={self.grid.period:g}, sup={np.max(np.abs(self.values)):.3e})'


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: Grid
    coefficients: NDArray[np.complex128]

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=np.complex128)
        if coefficients.shape != (self.grid.n // 2 + 1,):
            raise GridError(f'Spectrum has shape {coefficients.shape}, grid expects ({self.grid.n // 2 + 1},)')
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)


def forward(u: RealField) -> SpectralField:
    return SpectralField(u.grid, fft.rfft(u.values))


def inverse(s: SpectralField) -> RealField:
    return RealField(s.grid, fft.irfft(s.coefficients, n=s.grid.n))


def evaluate_symbol(grid: Grid, sigma: Symbol) -> NDArray:
    """Sample a multiplier on the nonnegative grid frequencies and reject non-finite values."""
    raw = sigma(grid.rfrequencies) if callable(sigma) else sigma
    values = np.asarray(raw)
    if not np.iscomplexobj(values):
        values = values.astype(np.float64)
    values = np.broadcast_to(values, grid.rfrequencies.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        xi = grid.rfrequencies[bad][0]
        raise SymbolError(f'Symbol is not finite at {int(bad.sum())} grid frequencies, first at xi={xi:g}')
    return values


def spectral_multiply(values: NDArray, symbol: NDArray, n: int) -> NDArray:
    """Multiply the last axis of `values` by a half-spectrum symbol; batched over leading axes."""
    return fft.irfft(fft.rfft(values, axis=-1) * symbol, n=n, axis=-1)


def apply_symbol(u: RealField, sigma: Symbol) -> RealField:
    symbol = evaluate_symbol(u.grid, sigma)
    return RealField(u.grid, spectral_multiply(u.values, symbol, u.grid.n))


def derivative(u: RealField, order: int = 1) -> RealField:
    if order < 0:
        raise ValueError(f'Derivative order must be nonnegative, got {order}')
    symbol = (1j * u.grid.rfrequencies) ** order
    if order % 2 == 1:
        symbol[-1] = 0.0
    return RealField(u.grid, spectral_multiply(u.values, symbol, u.grid.n))


def mean(u: RealField) -> float:
    return float(np.mean(u.values))


def l2_norm(u: RealField) -> float:
    return float(np.sqrt(u.grid.spacing * np.sum(u.values ** 2)))


def sup_norm(u: RealField) -> float:
    return float(np.max(np.abs(u.values)))


def sobolev_norm(u: RealField, s: float) -> float:
    if s < 0:
        raise ValueError(f'Sobolev index must be nonnegative, got {s}')
    grid = u.grid
    coefficients = fft.rfft(u.values)
    weights = grid.parseval_weights * (1.0 + grid.rfrequencies ** 2) ** s
    return float(np.sqrt(np.sum(weights * np.abs(coefficients) ** 2)))


def inner_product(u: RealField, v: RealField) -> float:
    if u.grid != v.grid:
        raise GridMismatchError(u.grid, v.grid)
    return float(u.grid.spacing * np.dot(u.values, v.values))


def vector_sobolev_norm(fields: Iterable[RealField], s: float) -> float:
    """||U||_s = ||u_1||_s + ||u_2||_s for a vector of fields."""
    return sum(sobolev_norm(u, s) for u in fields)


def vector_sup_norm(fields: Iterable[RealField]) -> float:
    return sum(sup_norm(u) for u in fields)
