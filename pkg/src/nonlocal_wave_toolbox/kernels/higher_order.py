import numpy as np
from numpy.typing import ArrayLike, NDArray

from .utils import KernelSpec


def _decay_constant(a: float, b: float) -> float:
    # max over s = xi^2 >= 0 of (1 + s)^2 / (1 + a s + b s^2)
    candidates = [1.0, 1.0 / b]
    if a != 2 * b:
        s = (a - 2.0) / (a - 2.0 * b)
        if s > 0:
            candidates.append((1.0 + s) ** 2 / (1.0 + a * s + b * s ** 2))
    return max(candidates)


class HigherOrderKernel(KernelSpec):
    """Green's function of 1 - a D_x^2 + b D_x^4 (coupled higher-order Boussinesq)."""
    family = 'higher_order'

    def __init__(self, a: float, b: float):
        if not (a > 0 and b > 0):
            raise ValueError(f'higher_order kernel needs a > 0 and b > 0, got a={a}, b={b}')
        self.a = float(a)
        self.b = float(b)
        super().__init__(r=4.0, C=_decay_constant(self.a, self.b))

    @property
    def params(self):
        return {'a': self.a, 'b': self.b}

    def symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        xi = np.asarray(xi, dtype=np.float64)
        return 1.0 / self.reduction_operator_symbol(xi)

    def reduction_operator_symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        """Symbol of 1 - a D_x^2 + b D_x^4."""
        xi = np.asarray(xi, dtype=np.float64)
        return 1.0 + self.a * xi ** 2 + self.b * xi ** 4


def higher_order_kernel(a: float, b: float) -> HigherOrderKernel:
    return HigherOrderKernel(a, b)
