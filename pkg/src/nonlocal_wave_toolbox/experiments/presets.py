"""
Built-in experiment presets, one per regime of the system.

Amplitudes of the blow-up presets are fixed constants: the Gaussian bump of
amplitude 3 and width 2 on L = 40 has E(0) close to -27, and adding the
velocity 2 cos(2 pi 4 x / L) to the second component lifts E(0) to about
+255 while keeping A = 0.
"""

import math
from dataclasses import dataclass
from typing import Any, Iterable

from ..exceptions import ConfigError
from .config import ExperimentConfig, apply_overrides, config_from_dict


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    data: dict[str, Any]

    def config(self, overrides: Iterable[str] = ()) -> ExperimentConfig:
        return config_from_dict(apply_overrides(self.data, overrides), default_name=self.name)


_EXPONENTIAL = {'family': 'exponential', 'params': {}}

_BLOWUP_BUMP = {'shape': 'gaussian', 'amplitude': 3.0, 'width': 2.0, 'center': 0.0}

PRESETS: dict[str, Preset] = {p.name: p for p in [
    Preset('linear-dispersion',
           'Free linear waves (g = 0) checked against the exact mode solution',
           {'name': 'linear-dispersion',
            'grid': {'n': 512, 'period': 16 * math.pi},
            'kernel1': _EXPONENTIAL,
            'kernel2': _EXPONENTIAL,
            'nonlinearity': {'family': 'quartic', 'params': {'kappa1': 0.0, 'kappa2': 0.0}},
            'initial': {'phi1': {'shape': 'cosine', 'amplitude': 1.0, 'mode': 8}},
            'evolution': {'dt': 1e-3, 't_end': 1.0, 'stride': 100},
            'diagnostics': {'energy': True, 'oracle': True}}),
    Preset('energy-conservation',
           'Coupled quartic waves with the exponential kernel; the energy stays constant',
           {'name': 'energy-conservation',
            'grid': {'n': 256, 'period': 64.0},
            'kernel1': _EXPONENTIAL,
            'kernel2': _EXPONENTIAL,
            'nonlinearity': {'family': 'quartic', 'params': {'kappa1': 1.0, 'kappa2': 1.0}},
            'initial': {'phi1': {'shape': 'gaussian', 'amplitude': 1.0, 'width': 2.0, 'center': 0.0},
                        'phi2': {'shape': 'gaussian', 'amplitude': 0.5, 'width': 2.0, 'center': 5.0}},
            'evolution': {'dt': 1e-3, 't_end': 10.0, 'stride': 100},
            'diagnostics': {'energy': True,
                            'hypotheses': [{'predicate': 'exactness', 'box': 'auto'},
                                           {'predicate': 'gradient_consistency', 'box': 'auto'}]}}),
    Preset('blowup-negative-energy',
           'Focusing quartic nonlinearity with negative initial energy; blows up before the Levine bound',
           {'name': 'blowup-negative-energy',
            'grid': {'n': 256, 'period': 40.0},
            'kernel1': _EXPONENTIAL,
            'kernel2': _EXPONENTIAL,
            'nonlinearity': {'family': 'quartic', 'params': {'kappa1': -1.0, 'kappa2': 0.0}},
            'initial': {'phi1': _BLOWUP_BUMP},
            'evolution': {'dt': 1e-3, 't_end': 20.0, 'stride': 10},
            'diagnostics': {'energy': True,
                            'certificate': {'nu': 0.5, 't0_strategy': 'margin'},
                            'hypotheses': [{'predicate': 'blowup_growth', 'nu': 0.5, 'box': 'auto'}]}}),
    Preset('blowup-positive-energy',
           'Positive initial energy with A^2 < E(0) B; certified and blows up',
           {'name': 'blowup-positive-energy',
            'grid': {'n': 256, 'period': 40.0},
            'kernel1': _EXPONENTIAL,
            'kernel2': _EXPONENTIAL,
            'nonlinearity': {'family': 'quartic', 'params': {'kappa1': -1.0, 'kappa2': 0.0}},
            'initial': {'phi1': _BLOWUP_BUMP,
                        'psi2': {'shape': 'cosine', 'amplitude': 2.0, 'mode': 4}},
            'evolution': {'dt': 1e-3, 't_end': 20.0, 'stride': 10},
            'diagnostics': {'energy': True,
                            'certificate': {'nu': 0.5, 't0_strategy': 'margin'},
                            'hypotheses': [{'predicate': 'blowup_growth', 'nu': 0.5, 'box': 'auto'}]}}),
    Preset('global-smooth-kernel',
           'Defocusing quartic waves with a Gaussian kernel (r > 3); global in time',
           {'name': 'global-smooth-kernel',
            'grid': {'n': 256, 'period': 64.0},
            'kernel1': {'family': 'gaussian', 'params': {'width': 0.05}},
            'kernel2': {'family': 'gaussian', 'params': {'width': 0.05}},
            'nonlinearity': {'family': 'quartic', 'params': {'kappa1': 1.0, 'kappa2': 0.0}},
            'initial': {'phi1': {'shape': 'gaussian', 'amplitude': 1.0, 'width': 2.0, 'center': 0.0},
                        'phi2': {'shape': 'gaussian', 'amplitude': 0.5, 'width': 3.0, 'center': -5.0}},
            'evolution': {'dt': 2e-3, 't_end': 50.0, 'stride': 250},
            'diagnostics': {'energy': True,
                            'hypotheses': [{'predicate': 'global_G_bound', 'k': 0.0, 'box': 'auto'}]}}),
    Preset('global-singular-kernel',
           'Defocusing quartic waves with the mildly singular exponential kernel; global in time',
           {'name': 'global-singular-kernel',
            'grid': {'n': 256, 'period': 64.0},
            'kernel1': {'family': 'mildly_singular', 'params': {'gamma': 'exponential', 'scale': 1.0}},
            'kernel2': {'family': 'mildly_singular', 'params': {'gamma': 'exponential', 'scale': 1.0}},
            'nonlinearity': {'family': 'quartic', 'params': {'kappa1': 1.0, 'kappa2': 0.0}},
            'initial': {'phi1': {'shape': 'gaussian', 'amplitude': 1.0, 'width': 2.0, 'center': 0.0}},
            'evolution': {'dt': 2e-3, 't_end': 50.0, 'stride': 250},
            'diagnostics': {'energy': True,
                            'hypotheses': [{'predicate': 'global_g_power_bound', 'Cb': 4.0, 'k': 0.0,
                                            'q1': 4.0 / 3.0, 'box': 'auto'}]}}),
]}


def list_presets() -> list[Preset]:
    return list(PRESETS.values())


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError([f'preset: unknown preset {name!r}, expected one of {sorted(PRESETS)}'])
