"""
Convolution kernels as Fourier symbols.

One module per kernel family; `utils` holds the `KernelSpec` base class and
the operators B, P and P^-1 shared by every family.
"""

from typing import Any, Callable, Mapping

from .custom import CustomKernel, custom_kernel
from .exponential import ExponentialKernel, exponential_kernel
from .gaussian import GaussianKernel, gaussian_decay_constant, gaussian_kernel
from .higher_order import HigherOrderKernel, higher_order_kernel
from .mildly_singular import (MildlySingularKernel, SingularKernelDescriptor, exponential_descriptor,
                              gamma_second_symbol, gamma_second_transform, mildly_singular_B,
                              mildly_singular_kernel, operator_symbol)
from .utils import (ZERO_MODE_TOL, DecayReport, KernelSpec, apply_B, apply_P, apply_P_inv,
                    fit_decay_constant, p_inner_product, p_norm_squared, verify_decay)

SINGULAR_DESCRIPTORS: dict[str, Callable[..., SingularKernelDescriptor]] = {
    'exponential': exponential_descriptor,
}


def _mildly_singular_from_params(gamma: str = 'exponential', **params) -> MildlySingularKernel:
    if gamma not in SINGULAR_DESCRIPTORS:
        raise ValueError(f'unknown gamma descriptor {gamma!r}, expected one of {sorted(SINGULAR_DESCRIPTORS)}')
    return MildlySingularKernel(SINGULAR_DESCRIPTORS[gamma](**params))


# family name -> (factory, required params, optional params)
KERNEL_FAMILIES: dict[str, tuple[Callable[..., KernelSpec], frozenset, frozenset]] = {
    'exponential': (exponential_kernel, frozenset(), frozenset()),
    'higher_order': (higher_order_kernel, frozenset({'a', 'b'}), frozenset()),
    'gaussian': (gaussian_kernel, frozenset({'width'}), frozenset()),
    'mildly_singular': (_mildly_singular_from_params, frozenset(), frozenset({'gamma', 'scale'})),
}


def make_kernel(family: str, params: Mapping[str, Any] = None) -> KernelSpec:
    try:
        factory, _, _ = KERNEL_FAMILIES[family]
    except KeyError:
        raise ValueError(f'unknown kernel family {family!r}, expected one of {sorted(KERNEL_FAMILIES)}')
    return factory(**dict(params or {}))


__all__ = [
    'KernelSpec',
    'DecayReport',
    'ZERO_MODE_TOL',
    'ExponentialKernel',
    'HigherOrderKernel',
    'GaussianKernel',
    'MildlySingularKernel',
    'CustomKernel',
    'SingularKernelDescriptor',
    'exponential_kernel',
    'higher_order_kernel',
    'gaussian_kernel',
    'gaussian_decay_constant',
    'mildly_singular_kernel',
    'custom_kernel',
    'exponential_descriptor',
    'gamma_second_symbol',
    'gamma_second_transform',
    'mildly_singular_B',
    'operator_symbol',
    'verify_decay',
    'fit_decay_constant',
    'apply_B',
    'apply_P',
    'apply_P_inv',
    'p_norm_squared',
    'p_inner_product',
    'KERNEL_FAMILIES',
    'SINGULAR_DESCRIPTORS',
    'make_kernel',
]
