"""
Experiment configs: YAML documents validated into frozen dataclasses.

Validation walks the whole document before anything is computed and collects
every problem as a "field.path: message" entry; a document with any problem
raises a single ConfigError. `echo` renders a config with every default
filled in, and parse_config(echo(cfg)) == cfg.
"""

import copy
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Union

import yaml

from ..exceptions import ConfigError, GridError, NonlinearityError
from ..grid import Grid
from ..hypotheses import DEFAULT_SAMPLES, HYPOTHESIS_CHECKS
from ..kernels import KERNEL_FAMILIES, make_kernel
from ..nonlinearity import NONLINEARITY_FAMILIES, make_nonlinearity
from ..solver import EvolutionConfig
from .profiles import PROFILE_SHAPES

logger = logging.getLogger(__name__)

Box = Union[str, tuple[tuple[float, float], tuple[float, float]]]

TOP_LEVEL_KEYS = {'name', 'grid', 'kernel1', 'kernel2', 'nonlinearity', 'initial', 'evolution', 'diagnostics',
                  'output'}
INITIAL_FIELDS = ('phi1', 'phi2', 'psi1', 'psi2')
T0_STRATEGIES = ('margin', 'optimal')
# string-valued family parameters
STRING_PARAMS = {'gamma'}
# hypothesis parameter -> (lower bound, exclusive)
HYPOTHESIS_PARAM_BOUNDS = {
    'nu': (0.0, True),
    'k': (0.0, False),
    'Cb': (0.0, True),
    'q1': (1.0, True),
    'q2': (1.0, True),
    'h': (0.0, True),
    'tol': (0.0, False),
    'atol': (0.0, False),
    'rtol': (0.0, False),
}


@dataclass(frozen=True)
class GridConfig:
    n: int
    period: float


@dataclass(frozen=True)
class FamilyConfig:
    family: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ProfileConfig:
    shape: str = 'zero'
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InitialConfig:
    phi1: ProfileConfig = ProfileConfig()
    phi2: ProfileConfig = ProfileConfig()
    psi1: ProfileConfig = ProfileConfig()
    psi2: ProfileConfig = ProfileConfig()


@dataclass(frozen=True)
class CertificateConfig:
    nu: float
    t0_strategy: str = 'margin'


@dataclass(frozen=True)
class HypothesisConfig:
    predicate: str
    box: Box = 'auto'
    samples: int = DEFAULT_SAMPLES
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DiagnosticsConfig:
    energy: bool = True
    certificate: Optional[CertificateConfig] = None
    oracle: bool = False
    hypotheses: tuple[HypothesisConfig, ...] = ()


@dataclass(frozen=True)
class OutputConfig:
    directory: Optional[str] = None
    csv: bool = True
    json: bool = True
    metrics: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    grid: GridConfig
    kernel1: FamilyConfig
    kernel2: FamilyConfig
    nonlinearity: FamilyConfig
    initial: InitialConfig
    evolution: EvolutionConfig
    diagnostics: DiagnosticsConfig = DiagnosticsConfig()
    output: OutputConfig = OutputConfig()

    def to_dict(self) -> dict[str, Any]:
        """Plain-data rendering with every default resolved."""
        d = self.diagnostics
        return {
            'name': self.name,
            'grid': {'n': self.grid.n, 'period': self.grid.period},
            'kernel1': _family_dict(self.kernel1),
            'kernel2': _family_dict(self.kernel2),
            'nonlinearity': _family_dict(self.nonlinearity),
            'initial': {name: _profile_dict(getattr(self.initial, name)) for name in INITIAL_FIELDS},
            'evolution': {'dt': self.evolution.dt,
                          't_end': self.evolution.t_end,
                          'threshold': self.evolution.blowup_threshold,
                          'stride': self.evolution.stride,
                          'dealias': self.evolution.dealias},
            'diagnostics': {
                'energy': d.energy,
                'certificate': None if d.certificate is None else {'nu': d.certificate.nu,
                                                                   't0_strategy': d.certificate.t0_strategy},
                'oracle': d.oracle,
                'hypotheses': [_hypothesis_dict(h) for h in d.hypotheses],
            },
            'output': {'directory': self.output.directory,
                       'csv': self.output.csv,
                       'json': self.output.json,
                       'metrics': self.output.metrics},
        }


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def _family_dict(f: FamilyConfig) -> dict[str, Any]:
    return {'family': f.family, 'params': _plain(f.params)}


def _profile_dict(p: ProfileConfig) -> dict[str, Any]:
    return {'shape': p.shape, **_plain(p.params)}


def _hypothesis_dict(h: HypothesisConfig) -> dict[str, Any]:
    return {'predicate': h.predicate, 'box': _plain(h.box), 'samples': h.samples, **_plain(h.params)}


class _Errors:
    def __init__(self):
        self.messages: list[str] = []

    def add(self, path: str, message: str):
        self.messages.append(f'{path}: {message}')

    def __bool__(self):
        return bool(self.messages)


def _mapping(value, path: str, errors: _Errors, allowed: Iterable[str], required: Iterable[str] = ()) -> Optional[dict]:
    if not isinstance(value, Mapping):
        errors.add(path, f'expected a mapping, got {type(value).__name__}')
        return None
    allowed = set(allowed)
    for key in value:
        if key not in allowed:
            errors.add(f'{path}.{key}', 'unknown key')
    for key in required:
        if key not in value:
            errors.add(f'{path}.{key}', 'required')
    return dict(value)


def _number(value, path: str, errors: _Errors, minimum: Optional[float] = None,
            exclusive: bool = False) -> Optional[float]:
    if isinstance(value, bool):
        errors.add(path, f'expected a number, got {value!r}')
        return None
    try:
        number = float(value)
    except (TypeError, ValueError):
        errors.add(path, f'expected a number, got {value!r}')
        return None
    if not math.isfinite(number):
        errors.add(path, f'must be finite, got {value!r}')
        return None
    if minimum is not None and (number <= minimum if exclusive else number < minimum):
        errors.add(path, f'must be {">" if exclusive else ">="} {minimum:g}, got {number:g}')
        return None
    return number


def _integer(value, path: str, errors: _Errors, minimum: Optional[int] = None) -> Optional[int]:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        errors.add(path, f'expected an integer, got {value!r}')
        return None
    try:
        number = float(value)
    except ValueError:
        errors.add(path, f'expected an integer, got {value!r}')
        return None
    if not number.is_integer():
        errors.add(path, f'expected an integer, got {value!r}')
        return None
    if minimum is not None and number < minimum:
        errors.add(path, f'must be >= {minimum}, got {int(number)}')
        return None
    return int(number)


def _boolean(value, path: str, errors: _Errors) -> Optional[bool]:
    if not isinstance(value, bool):
        errors.add(path, f'expected true or false, got {value!r}')
        return None
    return value


def _params(raw, path: str, errors: _Errors, required: Iterable[str], optional: Iterable[str]) -> Optional[dict]:
    raw = {} if raw is None else raw
    params = _mapping(raw, path, errors, allowed=set(required) | set(optional), required=required)
    if params is None:
        return None
    resolved = {}
    for key, value in params.items():
        if key in STRING_PARAMS:
            if not isinstance(value, str):
                errors.add(f'{path}.{key}', f'expected a string, got {value!r}')
            resolved[key] = value
        else:
            resolved[key] = _number(value, f'{path}.{key}', errors)
    return resolved


def _parse_grid(raw, errors: _Errors) -> Optional[GridConfig]:
    data = _mapping(raw, 'grid', errors, allowed={'n', 'period'}, required={'n', 'period'})
    if data is None or 'n' not in data or 'period' not in data:
        return None
    n = _integer(data['n'], 'grid.n', errors)
    period = _number(data['period'], 'grid.period', errors)
    if n is None or period is None:
        return None
    try:
        Grid(n, period)
    except GridError as e:
        errors.add('grid', e.message)
        return None
    return GridConfig(n, period)


def _parse_family(raw, path: str, registry: Mapping[str, tuple], factory, errors: _Errors) -> Optional[FamilyConfig]:
    data = _mapping(raw, path, errors, allowed={'family', 'params'}, required={'family'})
    if data is None or 'family' not in data:
        return None
    family = data['family']
    if family not in registry:
        errors.add(f'{path}.family', f'unknown family {family!r}, expected one of {sorted(registry)}')
        return None
    entry = registry[family]
    required = entry[1]
    optional = entry[2] if len(entry) > 2 else frozenset()
    count = len(errors.messages)
    params = _params(data.get('params'), f'{path}.params', errors, required, optional)
    if params is None or len(errors.messages) > count:
        return None
    try:
        factory(family, params)
    except (ValueError, NonlinearityError) as e:
        errors.add(f'{path}.params', str(e))
        return None
    return FamilyConfig(family, params)


def _parse_profile(raw, path: str, n: Optional[int], errors: _Errors) -> Optional[ProfileConfig]:
    if raw is None:
        return ProfileConfig()
    if not isinstance(raw, Mapping) or 'shape' not in raw:
        errors.add(path, 'expected a mapping with a shape')
        return None
    shape = raw['shape']
    if shape not in PROFILE_SHAPES:
        errors.add(f'{path}.shape', f'unknown shape {shape!r}, expected one of {sorted(PROFILE_SHAPES)}')
        return None
    _, required, optional = PROFILE_SHAPES[shape]
    data = _mapping(raw, path, errors, allowed={'shape'} | required | optional, required=required)
    if data is None:
        return None
    data.pop('shape')
    params: dict[str, Any] = {}
    for key, value in data.items():
        key_path = f'{path}.{key}'
        if key == 'mode':
            params[key] = _integer(value, key_path, errors, minimum=1)
        elif key == 'modes':
            if not isinstance(value, (list, tuple)) or not value:
                errors.add(key_path, 'expected a nonempty list of mode numbers')
                continue
            params[key] = tuple(_integer(m, f'{key_path}[{i}]', errors, minimum=1) for i, m in enumerate(value))
        elif key == 'values':
            if not isinstance(value, (list, tuple)):
                errors.add(key_path, 'expected a list of samples')
                continue
            if n is not None and len(value) != n:
                errors.add(key_path, f'expected {n} samples, got {len(value)}')
            params[key] = tuple(_number(v, f'{key_path}[{i}]', errors) for i, v in enumerate(value))
        elif key == 'width':
            params[key] = _number(value, key_path, errors, minimum=0, exclusive=True)
        else:
            params[key] = _number(value, key_path, errors)
    if shape in ('cosine', 'sine') and ('mode' in params) == ('modes' in params):
        errors.add(path, f'{shape} profile needs exactly one of mode or modes')
    return ProfileConfig(shape, params)


def _parse_initial(raw, n: Optional[int], errors: _Errors) -> InitialConfig:
    raw = {} if raw is None else raw
    data = _mapping(raw, 'initial', errors, allowed=INITIAL_FIELDS)
    if data is None:
        return InitialConfig()
    profiles = {name: _parse_profile(data.get(name), f'initial.{name}', n, errors) for name in INITIAL_FIELDS}
    return InitialConfig(**{k: v if v is not None else ProfileConfig() for k, v in profiles.items()})


def _parse_evolution(raw, errors: _Errors) -> Optional[EvolutionConfig]:
    data = _mapping(raw, 'evolution', errors, allowed={'dt', 't_end', 'threshold', 'stride', 'dealias'},
                    required={'dt', 't_end'})
    if data is None or 'dt' not in data or 't_end' not in data:
        return None
    dt = _number(data['dt'], 'evolution.dt', errors, minimum=0, exclusive=True)
    t_end = _number(data['t_end'], 'evolution.t_end', errors, minimum=0)
    threshold = _number(data.get('threshold', 1e6), 'evolution.threshold', errors, minimum=0, exclusive=True)
    stride = _integer(data.get('stride', 100), 'evolution.stride', errors, minimum=1)
    dealias = _boolean(data.get('dealias', False), 'evolution.dealias', errors)
    if None in (dt, t_end, threshold, stride, dealias):
        return None
    try:
        return EvolutionConfig(dt=dt, t_end=t_end, blowup_threshold=threshold, stride=stride, dealias=dealias)
    except ValueError as e:
        errors.add('evolution', str(e))
        return None


def _parse_box(value, path: str, errors: _Errors) -> Optional[Box]:
    if value == 'auto':
        return 'auto'
    try:
        (a0, a1), (b0, b1) = value
    except (TypeError, ValueError):
        errors.add(path, "expected 'auto' or [[a0, a1], [b0, b1]]")
        return None
    edges = [_number(v, f'{path}', errors) for v in (a0, a1, b0, b1)]
    if None in edges:
        return None
    if edges[0] > edges[1] or edges[2] > edges[3]:
        errors.add(path, 'box edges must be ordered')
        return None
    return (edges[0], edges[1]), (edges[2], edges[3])


def _parse_hypothesis(raw, path: str, errors: _Errors) -> Optional[HypothesisConfig]:
    if not isinstance(raw, Mapping) or 'predicate' not in raw:
        errors.add(path, 'expected a mapping with a predicate')
        return None
    predicate = raw['predicate']
    if predicate not in HYPOTHESIS_CHECKS:
        errors.add(f'{path}.predicate', f'unknown predicate {predicate!r}, expected one of {sorted(HYPOTHESIS_CHECKS)}')
        return None
    _, required, optional = HYPOTHESIS_CHECKS[predicate]
    data = _mapping(raw, path, errors, allowed={'predicate', 'box', 'samples'} | required | optional,
                    required=required)
    if data is None:
        return None
    box = _parse_box(data.pop('box', 'auto'), f'{path}.box', errors)
    samples = _integer(data.pop('samples', DEFAULT_SAMPLES), f'{path}.samples', errors, minimum=1)
    data.pop('predicate')
    params = {key: _number(value, f'{path}.{key}', errors, *HYPOTHESIS_PARAM_BOUNDS.get(key, (None, False)))
              for key, value in data.items()}
    if box is None or samples is None:
        return None
    return HypothesisConfig(predicate, box, samples, params)


def _parse_diagnostics(raw, errors: _Errors) -> DiagnosticsConfig:
    raw = {} if raw is None else raw
    data = _mapping(raw, 'diagnostics', errors, allowed={'energy', 'certificate', 'oracle', 'hypotheses'})
    if data is None:
        return DiagnosticsConfig()
    energy = _boolean(data.get('energy', True), 'diagnostics.energy', errors)
    oracle = _boolean(data.get('oracle', False), 'diagnostics.oracle', errors)
    certificate = None
    if data.get('certificate') is not None:
        cert = _mapping(data['certificate'], 'diagnostics.certificate', errors, allowed={'nu', 't0_strategy'},
                        required={'nu'})
        if cert is not None and 'nu' in cert:
            nu = _number(cert['nu'], 'diagnostics.certificate.nu', errors, minimum=0, exclusive=True)
            strategy = cert.get('t0_strategy', 'margin')
            if strategy not in T0_STRATEGIES:
                errors.add('diagnostics.certificate.t0_strategy', f'expected one of {list(T0_STRATEGIES)}')
            elif nu is not None:
                certificate = CertificateConfig(nu, strategy)
    hypotheses = []
    raw_hypotheses = data.get('hypotheses') or []
    if not isinstance(raw_hypotheses, list):
        errors.add('diagnostics.hypotheses', 'expected a list')
        raw_hypotheses = []
    for i, item in enumerate(raw_hypotheses):
        parsed = _parse_hypothesis(item, f'diagnostics.hypotheses[{i}]', errors)
        if parsed is not None:
            hypotheses.append(parsed)
    return DiagnosticsConfig(energy=bool(energy), certificate=certificate, oracle=bool(oracle),
                             hypotheses=tuple(hypotheses))


def _parse_output(raw, errors: _Errors) -> OutputConfig:
    raw = {} if raw is None else raw
    data = _mapping(raw, 'output', errors, allowed={'directory', 'csv', 'json', 'metrics'})
    if data is None:
        return OutputConfig()
    directory = data.get('directory')
    if directory is not None and not isinstance(directory, str):
        errors.add('output.directory', f'expected a path, got {directory!r}')
        directory = None
    flags = {key: _boolean(data.get(key, default), f'output.{key}', errors)
             for key, default in (('csv', True), ('json', True), ('metrics', False))}
    return OutputConfig(directory=directory, **{k: bool(v) for k, v in flags.items()})


def config_from_dict(data: Any, default_name: str = 'experiment') -> ExperimentConfig:
    """
    Raises
    ------
    ConfigError
        Listing every invalid field of the document.
    """
    errors = _Errors()
    if not isinstance(data, Mapping):
        raise ConfigError([f'document: expected a mapping, got {type(data).__name__}'])
    for key in data:
        if key not in TOP_LEVEL_KEYS:
            errors.add(str(key), 'unknown key')
    for key in ('grid', 'kernel1', 'nonlinearity', 'evolution'):
        if key not in data:
            errors.add(key, 'required')

    name = data.get('name', default_name)
    if not isinstance(name, str) or not name:
        errors.add('name', f'expected a nonempty string, got {name!r}')
    grid = _parse_grid(data['grid'], errors) if 'grid' in data else None
    kernel1 = (_parse_family(data['kernel1'], 'kernel1', KERNEL_FAMILIES, make_kernel, errors)
               if 'kernel1' in data else None)
    kernel2 = (_parse_family(data['kernel2'], 'kernel2', KERNEL_FAMILIES, make_kernel, errors)
               if data.get('kernel2') is not None else kernel1)
    nonlinearity = (_parse_family(data['nonlinearity'], 'nonlinearity', NONLINEARITY_FAMILIES, make_nonlinearity,
                                  errors) if 'nonlinearity' in data else None)
    initial = _parse_initial(data.get('initial'), grid.n if grid else None, errors)
    evolution = _parse_evolution(data['evolution'], errors) if 'evolution' in data else None
    diagnostics = _parse_diagnostics(data.get('diagnostics'), errors)
    output = _parse_output(data.get('output'), errors)

    if diagnostics.oracle and nonlinearity is not None:
        if not make_nonlinearity(nonlinearity.family, nonlinearity.params).is_linear:
            errors.add('diagnostics.oracle', 'the linear oracle needs a nonlinearity that vanishes identically')

    if errors:
        raise ConfigError(errors.messages)
    return ExperimentConfig(name=name, grid=grid, kernel1=kernel1, kernel2=kernel2, nonlinearity=nonlinearity,
                            initial=initial, evolution=evolution, diagnostics=diagnostics, output=output)


def parse_config(text: str, default_name: str = 'experiment') -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError([f'document: {e}'])
    return config_from_dict(data, default_name)


def echo(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def _parse_override(override: str) -> tuple[list[str], Any]:
    key, sep, raw = override.partition('=')
    if not sep or not key.strip():
        raise ConfigError([f'override {override!r}: expected key=value'])
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError:
        value = raw
    return key.strip().split('.'), value


def apply_overrides(data: Mapping[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    """Set dotted paths (list indices as integers) in a copy of a raw config document."""
    data = copy.deepcopy(dict(data))
    errors = []
    for override in overrides:
        path, value = _parse_override(override)
        node = data
        try:
            for segment in path[:-1]:
                if isinstance(node, list):
                    node = node[int(segment)]
                elif isinstance(node, dict):
                    if node.get(segment) is None:
                        node[segment] = {}
                    node = node[segment]
                else:
                    raise TypeError(segment)
            if isinstance(node, list):
                node[int(path[-1])] = value
            elif isinstance(node, dict):
                node[path[-1]] = value
            else:
                raise TypeError(path[-1])
        except (IndexError, ValueError, TypeError):
            errors.append(f'override {override!r}: cannot set {".".join(path)}')
            continue
        logger.debug('Override %s = %r', '.'.join(path), value)
    if errors:
        raise ConfigError(errors)
    return data


def load_config(path: Union[str, Path], overrides: Iterable[str] = ()) -> ExperimentConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError([f'{path}: {e}'])
    if not isinstance(data, Mapping):
        raise ConfigError([f'{path}: expected a mapping'])
    return config_from_dict(apply_overrides(data, overrides), default_name=path.stem)
