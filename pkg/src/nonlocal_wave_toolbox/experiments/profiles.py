"""
Initial-data profiles.

A profile is a shape name plus parameters. Mode numbers m refer to the
wave number xi = 2 pi m / L, so every cosine and sine profile is exactly
zero-mean on the grid; Gaussian bumps have their mean removed.
"""

from typing import Any, Callable, Mapping

import numpy as np

from ..grid import Grid, RealField


def zero_profile(grid: Grid) -> RealField:
    return grid.zeros()


def gaussian_profile(grid: Grid, amplitude: float, width: float, center: float = 0.0) -> RealField:
    """A exp(-(x - c)^2 / w^2) minus its grid mean."""
    values = amplitude * np.exp(-((grid.nodes - center) / width) ** 2)
    return grid.field(values - np.mean(values))


def _modes(mode=None, modes=None) -> list[int]:
    if modes is not None:
        return [int(m) for m in modes]
    return [int(mode)]


def cosine_profile(grid: Grid, amplitude: float, mode: int = None, modes=None) -> RealField:
    x = grid.nodes
    values = sum(np.cos(2.0 * np.pi * m * x / grid.period) for m in _modes(mode, modes))
    return grid.field(amplitude * values)


def sine_profile(grid: Grid, amplitude: float, mode: int = None, modes=None) -> RealField:
    x = grid.nodes
    values = sum(np.sin(2.0 * np.pi * m * x / grid.period) for m in _modes(mode, modes))
    return grid.field(amplitude * values)


def samples_profile(grid: Grid, values) -> RealField:
    return grid.field(np.asarray(values, dtype=np.float64))


# shape -> (builder, required params, optional params)
PROFILE_SHAPES: dict[str, tuple[Callable[..., RealField], frozenset, frozenset]] = {
    'zero': (zero_profile, frozenset(), frozenset()),
    'gaussian': (gaussian_profile, frozenset({'amplitude', 'width'}), frozenset({'center'})),
    'cosine': (cosine_profile, frozenset({'amplitude'}), frozenset({'mode', 'modes'})),
    'sine': (sine_profile, frozenset({'amplitude'}), frozenset({'mode', 'modes'})),
    'samples': (samples_profile, frozenset({'values'}), frozenset()),
}


def build_profile(grid: Grid, shape: str, params: Mapping[str, Any]) -> RealField:
    builder, _, _ = PROFILE_SHAPES[shape]
    return builder(grid, **dict(params))
