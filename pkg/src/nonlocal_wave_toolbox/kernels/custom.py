from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .utils import KernelSpec


class CustomKernel(KernelSpec):
    family = 'custom'

    def __init__(self, symbol: Callable[[NDArray[np.float64]], ArrayLike], r: float, C: float, name: str = 'custom'):
        super().__init__(r=r, C=C)
        self._symbol = symbol
        self.name = name

    @property
    def params(self):
        return {'name': self.name}

    def symbol(self, xi: ArrayLike) -> NDArray[np.float64]:
        xi = np.asarray(xi, dtype=np.float64)
        return np.broadcast_to(np.asarray(self._symbol(xi), dtype=np.float64), xi.shape)


def custom_kernel(symbol: Callable[[NDArray[np.float64]], ArrayLike], r: float, C: float,
                  name: str = 'custom') -> CustomKernel:
    return CustomKernel(symbol, r, C, name)
