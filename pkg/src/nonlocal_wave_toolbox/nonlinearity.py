"""
Nonlinear terms of the coupled system.

A nonlinearity is a potential G(u1, u2) with G(0, 0) = 0 together with its
gradient (g1, g2). The solver and the energy only ever use

    F = (u1^2 + u2^2)/2 + G,    f_i = u_i + g_i.

All functions act elementwise on numpy arrays.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, ClassVar, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import NonlinearityError

Pointwise = Callable[[NDArray[np.float64], NDArray[np.float64]], ArrayLike]


def _as_arrays(u1: ArrayLike, u2: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return np.broadcast_arrays(np.asarray(u1, dtype=np.float64), np.asarray(u2, dtype=np.float64))


class NonlinearitySpec(ABC):
    family: ClassVar[str]

    @abstractmethod
    def G(self, u1: ArrayLike, u2: ArrayLike) -> NDArray[np.float64]:
        pass

    @abstractmethod
    def g1(self, u1: ArrayLike, u2: ArrayLike) -> NDArray[np.float64]:
        pass

    @abstractmethod
    def g2(self, u1: ArrayLike, u2: ArrayLike) -> NDArray[np.float64]:
        pass

    @property
    def params(self) -> dict[str, Any]:
        return {}

    @property
    def is_linear(self) -> bool:
        """True when g vanishes identically, so the linear mode solution is exact."""
        return False

    def F(self, u1: ArrayLike, u2: ArrayLike) -> NDArray[np.float64]:
        u1, u2 = _as_arrays(u1, u2)
        return 0.5 * (u1 ** 2 + u2 ** 2) + self.G(u1, u2)

    def f1(self, u1: ArrayLike, u2: ArrayLike) -> NDArray[np.float64]:
        u1, u2 = _as_arrays(u1, u2)
        return u1 + self.g1(u1, u2)

    def f2(self, u1: ArrayLike, u2: ArrayLike) -> NDArray[np.float64]:
        u1, u2 = _as_arrays(u1, u2)
        return u2 + self.g2(u1, u2)

    def gradient(self, u1: ArrayLike, u2: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self.g1(u1, u2), self.g2(u1, u2)

    def describe(self) -> dict[str, Any]:
        return {'family': self.family, 'params': self.params}

    def _check_origin(self):
        values = np.array([self.G(0.0, 0.0), self.g1(0.0, 0.0), self.g2(0.0, 0.0)], dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise NonlinearityError(f'{self.family} nonlinearity is not finite at the origin')
        if values[1] != 0 or values[2] != 0:
            raise NonlinearityError(f'{self.family} nonlinearity must satisfy g(0, 0) = 0, '
                                    f'got g1={values[1]:g}, g2={values[2]:g}')
        if values[0] != 0:
            raise NonlinearityError(f'{self.family} potential must satisfy G(0, 0) = 0, got {values[0]:g}')

    def __repr__(self):
        params = ', '.join(f'{k}={v!r}' for k, v in self.params.items())
        return f'{type(self).__name__}({params})'


class QuarticNonlinearity(NonlinearitySpec):
    """G = kappa1 (u1^4 + u2^4)/4 + kappa2 u1^2 u2^2 / 2."""
    family = 'quartic'

    def __init__(self, kappa1: float, kappa2: float):
        self.kappa1 = float(kappa1)
        self.kappa2 = float(kappa2)
        self._check_origin()

    @property
    def params(self):
        return {'kappa1': self.kappa1, 'kappa2': self.kappa2}

    @property
    def is_linear(self) -> bool:
        return self.kappa1 == 0 and self.kappa2 == 0

    def G(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return 0.25 * self.kappa1 * (u1 ** 4 + u2 ** 4) + 0.5 * self.kappa2 * u1 ** 2 * u2 ** 2

    def g1(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return self.kappa1 * u1 ** 3 + self.kappa2 * u1 * u2 ** 2

    def g2(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return self.kappa1 * u2 ** 3 + self.kappa2 * u1 ** 2 * u2


class IsotropicNonlinearity(NonlinearitySpec):
    """
    Nonlinearities depending on u1^2 + u2^2 only: G = W(s)/2 and g_i = u_i W'(s).

    Parameters
    ----------
    W : callable
        Scalar profile with W(0) = 0, vectorized over s >= 0.
    dW : callable
        Derivative W'.
    """
    family = 'isotropic'

    def __init__(self, W: Callable[[NDArray[np.float64]], ArrayLike],
                 dW: Callable[[NDArray[np.float64]], ArrayLike]):
        self.W = W
        self.dW = dW
        self._check_origin()

    def G(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return 0.5 * np.asarray(self.W(u1 ** 2 + u2 ** 2), dtype=np.float64)

    def g1(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return u1 * np.asarray(self.dW(u1 ** 2 + u2 ** 2), dtype=np.float64)

    def g2(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return u2 * np.asarray(self.dW(u1 ** 2 + u2 ** 2), dtype=np.float64)


class IsotropicPowerNonlinearity(IsotropicNonlinearity):
    """W(s) = kappa s^p / p; p = 2 with kappa = 1 is W(s) = s^2/2."""
    family = 'isotropic_power'

    def __init__(self, kappa: float, p: float):
        if not p >= 1:
            raise NonlinearityError(f'isotropic_power needs p >= 1, got {p}')
        self.kappa = float(kappa)
        self.p = float(p)
        super().__init__(W=lambda s: self.kappa * s ** self.p / self.p,
                         dW=lambda s: self.kappa * s ** (self.p - 1.0))

    @property
    def params(self):
        return {'kappa': self.kappa, 'p': self.p}

    @property
    def is_linear(self) -> bool:
        return self.kappa == 0


class CustomNonlinearity(NonlinearitySpec):
    family = 'custom'

    def __init__(self, G: Pointwise, g1: Pointwise, g2: Pointwise, name: str = 'custom'):
        self._G = G
        self._g1 = g1
        self._g2 = g2
        self.name = name
        self._check_origin()

    @property
    def params(self):
        return {'name': self.name}

    def G(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return np.broadcast_to(np.asarray(self._G(u1, u2), dtype=np.float64), u1.shape)

    def g1(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return np.broadcast_to(np.asarray(self._g1(u1, u2), dtype=np.float64), u1.shape)

    def g2(self, u1, u2):
        u1, u2 = _as_arrays(u1, u2)
        return np.broadcast_to(np.asarray(self._g2(u1, u2), dtype=np.float64), u1.shape)


def quartic_family(kappa1: float, kappa2: float) -> QuarticNonlinearity:
    return QuarticNonlinearity(kappa1, kappa2)


def isotropic_family(W, dW) -> IsotropicNonlinearity:
    return IsotropicNonlinearity(W, dW)


def isotropic_power(kappa: float, p: float) -> IsotropicPowerNonlinearity:
    return IsotropicPowerNonlinearity(kappa, p)


def custom_nonlinearity(G: Pointwise, g1: Pointwise, g2: Pointwise, name: str = 'custom') -> CustomNonlinearity:
    return CustomNonlinearity(G, g1, g2, name)


# family name -> (factory, required params)
NONLINEARITY_FAMILIES: dict[str, tuple[Callable[..., NonlinearitySpec], frozenset]] = {
    'quartic': (quartic_family, frozenset({'kappa1', 'kappa2'})),
    'isotropic_power': (isotropic_power, frozenset({'kappa', 'p'})),
}


def make_nonlinearity(family: str, params: Mapping[str, Any] = None) -> NonlinearitySpec:
    try:
        factory, _ = NONLINEARITY_FAMILIES[family]
    except KeyError:
        raise ValueError(f'unknown nonlinearity family {family!r}, expected one of {sorted(NONLINEARITY_FAMILIES)}')
    return factory(**dict(params or {}))
