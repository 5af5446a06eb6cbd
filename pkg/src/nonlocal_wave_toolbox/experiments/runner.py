import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Union

import numpy as np

from .. import __version__
from ..diagnostics import BlowupCertificate, CertificateStatus, build_certificate, energy, phi_at
from ..exceptions import ConfigError, ZeroModeError
from ..grid import Grid, RealField
from ..hypotheses import HypothesisReport, covering_box, run_check
from ..kernels import KernelSpec, make_kernel
from ..metrics import SimulationMetrics, handle_exceptions
from ..nonlinearity import NonlinearitySpec, make_nonlinearity
from ..settings import get_settings
from ..solver import InitialData, Outcome, SimulationResult, Snapshot, integrate, linear_exact
from .config import ExperimentConfig, ProfileConfig, load_config
from .presets import PRESETS
from .profiles import build_profile

logger = logging.getLogger(__name__)

NaN = float('NaN')

EXIT_CODES = {Outcome.COMPLETED: 0, Outcome.BLOWUP_DETECTED: 2, Outcome.CORRUPTED: 3}
EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 4

# slack on t_detect <= levine_bound for the discretized detection bracket
LEVINE_SLACK = 1.05


@dataclass
class Problem:
    grid: Grid
    k1: KernelSpec
    k2: KernelSpec
    nl: NonlinearitySpec
    init: InitialData


def build_problem(cfg: ExperimentConfig) -> Problem:
    grid = Grid(cfg.grid.n, cfg.grid.period)

    def profile(p: ProfileConfig) -> RealField:
        return build_profile(grid, p.shape, p.params)

    init = InitialData(phi1=profile(cfg.initial.phi1), phi2=profile(cfg.initial.phi2),
                       psi1=profile(cfg.initial.psi1), psi2=profile(cfg.initial.psi2))
    return Problem(grid=grid,
                   k1=make_kernel(cfg.kernel1.family, cfg.kernel1.params),
                   k2=make_kernel(cfg.kernel2.family, cfg.kernel2.params),
                   nl=make_nonlinearity(cfg.nonlinearity.family, cfg.nonlinearity.params),
                   init=init)


class DiagnosticRecorder:
    """integrate() observer turning each snapshot into one row of the time-series CSV."""

    def __init__(self, problem: Problem, track_energy: bool, certificate: Optional[BlowupCertificate],
                 oracle: bool):
        self.problem = problem
        self.track_energy = track_energy
        self.certificate = certificate if certificate is not None and certificate.certified else None
        self.oracle = oracle
        self.rows: list[dict[str, float]] = []

    @property
    def columns(self) -> list[str]:
        columns = ['t']
        if self.track_energy:
            columns += ['E_total', 'kinetic1', 'kinetic2', 'potential']
        columns += ['sup_u1', 'sup_u2', 'hs_norm']
        if self.certificate is not None:
            columns.append('Phi')
        if self.oracle:
            columns.append('oracle_error')
        return columns

    @handle_exceptions(ZeroModeError)
    def get_energy(self, snapshot: Snapshot):
        p = self.problem
        return energy(snapshot.state, p.k1, p.k2, p.nl)

    @handle_exceptions(ZeroModeError)
    def get_phi(self, snapshot: Snapshot) -> float:
        p = self.problem
        return phi_at(snapshot.state, self.certificate, p.k1, p.k2)[0]

    def get_oracle_error(self, snapshot: Snapshot) -> float:
        p = self.problem
        exact = linear_exact(p.init, p.k1, snapshot.t, p.k2)
        return float(np.max(np.abs(snapshot.state.values[:2] - exact.values[:2])))

    def __call__(self, snapshot: Snapshot):
        with np.errstate(over='ignore', invalid='ignore'):
            self.rows.append(self.row(snapshot))

    def row(self, snapshot: Snapshot) -> dict[str, float]:
        row = {'t': snapshot.t}
        if self.track_energy:
            breakdown = self.get_energy(snapshot)
            if isinstance(breakdown, float):
                row.update(E_total=NaN, kinetic1=NaN, kinetic2=NaN, potential=NaN)
            else:
                row.update(E_total=breakdown.total, kinetic1=breakdown.kinetic1,
                           kinetic2=breakdown.kinetic2, potential=breakdown.potential)
        row.update(sup_u1=snapshot.sup_u1, sup_u2=snapshot.sup_u2, hs_norm=snapshot.hs_norm)
        if self.certificate is not None:
            row['Phi'] = self.get_phi(snapshot)
        if self.oracle:
            row['oracle_error'] = self.get_oracle_error(snapshot)
        return row


@dataclass
class RunReport:
    name: str
    config: dict[str, Any]
    outcome: Outcome
    t_detect: Optional[float]
    bracket: Optional[tuple[float, float]]
    certificate: Optional[BlowupCertificate]
    hypotheses: list[HypothesisReport]
    energy: dict[str, float]
    oracle_max_error: Optional[float]
    levine_respected: Optional[bool]
    wall_seconds: float
    version: str = __version__
    result: Optional[SimulationResult] = field(default=None, repr=False)
    rows: list[dict[str, float]] = field(default_factory=list, repr=False)
    columns: list[str] = field(default_factory=list, repr=False)
    files: dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def as_dict(self) -> dict[str, Any]:
        return _json_safe({
            'name': self.name,
            'version': self.version,
            'outcome': self.outcome.value,
            'exit_code': self.exit_code,
            't_detect': self.t_detect,
            'bracket': list(self.bracket) if self.bracket else None,
            'certificate': self.certificate.as_dict() if self.certificate else None,
            'levine_respected': self.levine_respected,
            'hypotheses': [h.as_dict() for h in self.hypotheses],
            'energy': self.energy,
            'oracle_max_error': self.oracle_max_error,
            'timing': {'wall_seconds': self.wall_seconds},
            'files': self.files,
            'config': self.config,
        })


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _certificate(cfg: ExperimentConfig, problem: Problem) -> Optional[BlowupCertificate]:
    if cfg.diagnostics.certificate is None:
        return None
    c = cfg.diagnostics.certificate
    try:
        return build_certificate(problem.init, c.nu, problem.k1, problem.k2, problem.nl, t0_strategy=c.t0_strategy)
    except ZeroModeError as e:
        logger.error('No certificate for %s: %s', cfg.name, e.message)
        return None


def _visited_box(result: SimulationResult, threshold: float):
    # only the range below the guard scale is trusted
    scale = math.sqrt(threshold)
    sups = [(s.sup_u1, s.sup_u2) for s in result.snapshots if s.sup_u1 + s.sup_u2 <= scale]
    if not sups:
        sups = [(result.snapshots[0].sup_u1, result.snapshots[0].sup_u2)]
    sup1, sup2 = np.max(np.array(sups), axis=0)
    return covering_box(sup1, sup2)


def _hypothesis_reports(cfg: ExperimentConfig, problem: Problem, result: SimulationResult) -> list[HypothesisReport]:
    reports = []
    for h in cfg.diagnostics.hypotheses:
        box = _visited_box(result, cfg.evolution.blowup_threshold) if h.box == 'auto' else h.box
        report = run_check(h.predicate, problem.nl, box, h.samples, **h.params)
        log = logger.info if report.passed else logger.warning
        log('Hypothesis %s on %s: passed=%s (worst margin %.3e)', h.predicate, box, report.passed,
            report.worst_margin)
        reports.append(report)
    return reports


def _energy_summary(rows: list[dict[str, float]]) -> dict[str, float]:
    totals = np.array([row.get('E_total', NaN) for row in rows], dtype=np.float64)
    if totals.size == 0 or not np.isfinite(totals[0]):
        return {}
    e0 = totals[0]
    drift = np.abs(totals - e0) / max(1.0, abs(e0))
    finite = drift[np.isfinite(drift)]
    return {'E0': float(e0), 'max_relative_drift': float(np.max(finite)) if finite.size else NaN}


def _format(value: float) -> str:
    return format(value, '.16e')


def write_csv(path: Path, columns: list[str], rows: list[dict[str, float]]):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row[c]) for c in columns])


def output_directory(cfg: ExperimentConfig, override: Optional[Union[str, Path]] = None) -> Path:
    if override is not None:
        return Path(override)
    if cfg.output.directory is not None:
        return Path(cfg.output.directory)
    return get_settings().output_dir / cfg.name


def run_scenario(cfg: ExperimentConfig, output_dir: Optional[Union[str, Path]] = None,
                 write_files: bool = True) -> RunReport:
    """
    Assemble and run one experiment, then write its CSV, JSON and metrics files.

    Numerical outcomes are values of the report; only I/O failures raise (OSError).
    """
    started = time.perf_counter()
    problem = build_problem(cfg)
    logger.info('Running %s', cfg.name)
    certificate = _certificate(cfg, problem)

    recorder = DiagnosticRecorder(problem, cfg.diagnostics.energy, certificate, cfg.diagnostics.oracle)
    observers = [recorder]
    metrics = None
    if cfg.output.metrics:
        metrics = SimulationMetrics(problem.k1, problem.k2, problem.nl, track_energy=cfg.diagnostics.energy)
        observers.append(metrics)

    result = integrate(problem.init, cfg.evolution, problem.k1, problem.k2, problem.nl, observers)

    hypotheses = _hypothesis_reports(cfg, problem, result)
    levine_respected = None
    if (certificate is not None and certificate.status == CertificateStatus.NEGATIVE_ENERGY
            and result.outcome == Outcome.BLOWUP_DETECTED):
        levine_respected = bool(result.t_detect <= certificate.levine_bound * LEVINE_SLACK)
    oracle_errors = [row['oracle_error'] for row in recorder.rows if 'oracle_error' in row]

    report = RunReport(name=cfg.name,
                       config=cfg.to_dict(),
                       outcome=result.outcome,
                       t_detect=result.t_detect,
                       bracket=result.bracket,
                       certificate=certificate,
                       hypotheses=hypotheses,
                       energy=_energy_summary(recorder.rows),
                       oracle_max_error=max(oracle_errors) if oracle_errors else None,
                       levine_respected=levine_respected,
                       wall_seconds=time.perf_counter() - started,
                       result=result,
                       rows=recorder.rows,
                       columns=recorder.columns)
    logger.info('%s finished: %s after %.2f s', cfg.name, result.outcome.value, report.wall_seconds)

    if write_files:
        directory = output_directory(cfg, output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        if cfg.output.csv:
            report.files['csv'] = str(directory / f'{cfg.name}.csv')
            write_csv(Path(report.files['csv']), report.columns, report.rows)
        if metrics is not None:
            metrics.set_outcome(result.outcome)
            report.files['metrics'] = str(directory / f'{cfg.name}.prom')
            metrics.write(report.files['metrics'])
        if cfg.output.json:
            report.files['json'] = str(directory / f'{cfg.name}.json')
            with open(report.files['json'], 'w', encoding='utf-8') as f:
                json.dump(report.as_dict(), f, indent=2)
        logger.info('Wrote %s', ', '.join(report.files.values()))
    return report


def resolve_source(source: str, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """A config file path, or the name of a built-in preset."""
    path = Path(source)
    if path.is_file():
        return load_config(path, overrides)
    if source in PRESETS:
        return PRESETS[source].config(overrides)
    raise ConfigError([f'{source}: neither a config file nor a preset name ({", ".join(sorted(PRESETS))})'])
