"""
Mildly singular kernels beta(x) = gamma(|x|).

gamma is C^2 on [0, inf) with gamma(0) > 0 and gamma'(0) < 0, so beta has a
derivative jump at the origin and beta'' = gamma'' + 2 gamma'(0) delta. The
Dirac part is never discretized; it is carried exactly by

    (beta * w)_xx = gamma'' * w - lambda w,    lambda = -2 gamma'(0).

The cosine transform of gamma''(|x|) is computed by adaptive oscillatory
quadrature over the truncation window [-L/2, L/2] and cached per grid.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from ..exceptions import NonIntegrableKernelError
from ..grid import Grid, RealField, apply_symbol
from .utils import KernelSpec

logger = logging.getLogger(__name__)

QUAD_LIMIT = 400
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12


@dataclass(frozen=True)
class SingularKernelDescriptor:
    gamma_second: Callable[[float], float]
    gamma_prime_at_zero: float
    gamma_at_zero: float
    name: str = 'custom'
    params: tuple = field(default=())
    decay_constant: Optional[float] = None

    def __post_init__(self):
        if not self.gamma_prime_at_zero < 0:
            raise ValueError(f"gamma'(0) must be negative, got {self.gamma_prime_at_zero}")
        if not self.gamma_at_zero > 0:
            raise ValueError(f'gamma(0) must be positive, got {self.gamma_at_zero}')

    @property
    def lam(self) -> float:
        return -2.0 * self.gamma_prime_at_zero


def exponential_descriptor(scale: float = 1.0) -> SingularKernelDescriptor:
    """gamma(rho) = (a/2) exp(-a rho); scale a = 1 is the Green's function of 1 - D_x^2."""
    if not scale > 0:
        raise ValueError(f'scale must be positive, got {scale}')
    a = float(scale)
    return SingularKernelDescriptor(gamma_second=lambda rho: 0.5 * a ** 3 * np.exp(-a * rho),
                                    gamma_prime_at_zero=-0.5 * a ** 2,
                                    gamma_at_zero=0.5 * a,
                                    name='exponential',
                                    params=(('scale', a),),
                                    decay_constant=max(1.0, a ** 2))


def _cosine_integral(gamma_second: Callable[[float], float], xi: float, half_width: float) -> float:
    if xi == 0:
        value, _ = integrate.quad(gamma_second, 0.0, half_width, limit=QUAD_LIMIT,
                                  epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
    else:
        value, _ = integrate.quad(gamma_second, 0.0, half_width, weight='cos', wvar=xi, limit=QUAD_LIMIT,
                                  epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
    return 2.0 * value


def gamma_second_transform(d: SingularKernelDescriptor, xi: ArrayLike, half_width: float) -> NDArray[np.float64]:
    """Cosine transform of gamma''(|x|) over [-half_width, half_width] at each frequency."""
    xi = np.abs(np.asarray(xi, dtype=np.float64))
    nodes = np.linspace(0.0, half_width, 257)
    samples = np.array([d.gamma_second(rho) for rho in nodes], dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise NonIntegrableKernelError(f"gamma'' of the {d.name} descriptor is not finite on [0, {half_width:g}]")
    with np.errstate(over='raise', invalid='raise'):
        try:
            values = np.array([_cosine_integral(d.gamma_second, float(x), half_width) for x in xi.ravel()])
        except FloatingPointError as e:
            raise NonIntegrableKernelError(f"gamma'' quadrature overflowed: {e}")
    if not np.all(np.isfinite(values)):
        raise NonIntegrableKernelError(f"gamma'' of the {d.name} descriptor is not integrable on the window")
    return values.reshape(xi.shape)


def second_moment(d: SingularKernelDescriptor, half_width: float) -> float:
    """(1/2) integral of x^2 gamma''(|x|), the limit of beta_hat at xi = 0."""
    value, _ = integrate.quad(lambda rho: rho ** 2 * d.gamma_second(rho), 0.0, half_width, limit=QUAD_LIMIT)
    if not np.isfinite(value):
        raise NonIntegrableKernelError(f"second moment of gamma'' is not finite for {d.name}")
    return float(value)


@lru_cache(maxsize=64)
def gamma_second_symbol(d: SingularKernelDescriptor, grid: Grid) -> NDArray[np.float64]:
    """gamma''_hat at the nonnegative frequencies of `grid`, window matching the grid period."""
    logger.debug('Computing gamma\'\' transform for %s on n=%d, L=%g', d.name, grid.n, grid.period)
    values = gamma_second_transform(d, grid.rfrequencies, 0.5 * grid.period)
    values.setflags(write=False)
    return values


@lru_cache(maxsize=64)
def operator_symbol(d: SingularKernelDescriptor, grid: Grid) -> NDArray[np.float64]:
    """
    gamma''_hat - lambda on the grid, the symbol of (beta * w)_xx.

    The truncated window leaves gamma''_hat(0) - lambda = 2 gamma'(L/2) instead of 0,
    so the zero mode is pinned to 0 to keep means constant.
    """
    values = np.array(gamma_second_symbol(d, grid)) - d.lam
    values[0] = 0.0
    values.setflags(write=False)
    return values


def mildly_singular_B(d: SingularKernelDescriptor, w: RealField) -> RealField:
    return apply_symbol(w, operator_symbol(d, w.grid))


class MildlySingularKernel(KernelSpec):
    family = 'mildly_singular'

    def __init__(self, descriptor: SingularKernelDescriptor, C: Optional[float] = None,
                 window: float = 100.0):
        """
        `window` is the half-width used when the symbol is evaluated at arbitrary
        frequencies; on a grid the half-width is always L/2.
        """
        C = descriptor.decay_constant if C is None else C
        if C is None:
            raise ValueError(f'Claim a decay constant for the {descriptor.name} descriptor')
        super().__init__(r=2.0, C=C)
        self.descriptor = descriptor
        self.window = float(window)

    @property
    def lam(self) -> float:
        return self.descriptor.lam

    @property
    def params(self):
        return {'gamma': self.descriptor.name, **dict(self.descriptor.params)}

    def symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        xi = np.abs(np.asarray(xi, dtype=np.float64))
        transform = gamma_second_transform(self.descriptor, xi, self.window)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = (self.lam - transform) / xi ** 2
        return np.where(xi == 0, second_moment(self.descriptor, self.window), values)

    def _compute_evolution_symbol(self, grid: Grid) -> NDArray[np.float64]:
        return operator_symbol(self.descriptor, grid)

    def apply_B(self, w: RealField) -> RealField:
        return mildly_singular_B(self.descriptor, w)


def mildly_singular_kernel(descriptor: SingularKernelDescriptor, C: Optional[float] = None) -> MildlySingularKernel:
    return MildlySingularKernel(descriptor, C)
