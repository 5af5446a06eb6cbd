import numpy as np
from numpy.typing import ArrayLike, NDArray

from .utils import KernelSpec


class ExponentialKernel(KernelSpec):
    """beta(x) = exp(-|x|)/2, the Green's function of 1 - D_x^2 (coupled improved Boussinesq)."""
    family = 'exponential'

    def __init__(self):
        super().__init__(r=2.0, C=1.0)

    def symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        xi = np.asarray(xi, dtype=np.float64)
        return 1.0 / (1.0 + xi ** 2)

    def reduction_operator_symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        """Symbol of 1 - D_x^2, the operator this kernel inverts."""
        xi = np.asarray(xi, dtype=np.float64)
        return 1.0 + xi ** 2


def exponential_kernel() -> ExponentialKernel:
    return ExponentialKernel()
