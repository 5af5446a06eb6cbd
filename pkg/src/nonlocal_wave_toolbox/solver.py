"""
Method-of-lines evolution of the first-order system

    u_i' = v_i,    v_i' = (beta_i * f_i(u1, u2))_xx,

with classical fixed-step RK4, a sup-norm blow-up guard, and the exact
mode-by-mode solution of the linear problem (g = 0) as an oracle.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional

import numpy as np
from numpy.typing import NDArray
from scipy import fft

from .exceptions import CorruptionError, GridError, GridMismatchError
from .grid import Grid, RealField, spectral_multiply, sup_norm, vector_sobolev_norm, vector_sup_norm
from .kernels import KernelSpec
from .nonlinearity import NonlinearitySpec

logger = logging.getLogger(__name__)

SNAPSHOT_SOBOLEV_INDEX = 1.0


@dataclass(frozen=True, eq=False)
class State:
    """Displacements and velocities (u1, u2, v1, v2) at time t, stored as one (4, n) array."""
    t: float
    grid: Grid
    values: NDArray[np.float64]

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (4, self.grid.n):
            raise GridError(f'State has shape {values.shape}, grid expects (4, {self.grid.n})')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 't', float(self.t))

    @classmethod
    def from_fields(cls, t: float, u1: RealField, u2: RealField, v1: RealField, v2: RealField) -> 'State':
        grid = u1.grid
        for other in (u2, v1, v2):
            if other.grid != grid:
                raise GridMismatchError(grid, other.grid)
        return cls(t, grid, np.stack([u1.values, u2.values, v1.values, v2.values]))

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> 'State':
        return cls(t, grid, np.zeros((4, grid.n)))

    @property
    def u1(self) -> RealField:
        return RealField(self.grid, self.values[0])

    @property
    def u2(self) -> RealField:
        return RealField(self.grid, self.values[1])

    @property
    def v1(self) -> RealField:
        return RealField(self.grid, self.values[2])

    @property
    def v2(self) -> RealField:
        return RealField(self.grid, self.values[3])

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    @property
    def sup_norm(self) -> float:
        """||u1||_inf + ||u2||_inf, the quantity watched by the blow-up guard."""
        return vector_sup_norm((self.u1, self.u2))


@dataclass(frozen=True)
class InitialData:
    phi1: RealField
    phi2: RealField
    psi1: RealField
    psi2: RealField

    def __post_init__(self):
        for other in (self.phi2, self.psi1, self.psi2):
            if other.grid != self.phi1.grid:
                raise GridMismatchError(self.phi1.grid, other.grid)

    @property
    def grid(self) -> Grid:
        return self.phi1.grid

    def to_state(self, t: float = 0.0) -> State:
        return State.from_fields(t, self.phi1, self.phi2, self.psi1, self.psi2)


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_end: float
    blowup_threshold: float = 1e6
    stride: int = 100
    dealias: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f'dt must be positive, got {self.dt}')
        if not self.t_end >= 0:
            raise ValueError(f't_end must be nonnegative, got {self.t_end}')
        if not self.blowup_threshold > 0:
            raise ValueError(f'blowup_threshold must be positive, got {self.blowup_threshold}')
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f'stride must be a positive integer, got {self.stride}')
        steps = self.t_end / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f't_end={self.t_end} is not a whole number of steps dt={self.dt}')

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


class Outcome(str, Enum):
    COMPLETED = 'completed'
    BLOWUP_DETECTED = 'blowup_detected'
    CORRUPTED = 'corrupted'


@dataclass(frozen=True)
class Snapshot:
    t: float
    state: State
    sup_u1: float
    sup_u2: float
    hs_norm: float

    @classmethod
    def of(cls, state: State) -> 'Snapshot':
        hs = (vector_sobolev_norm((state.u1, state.u2), SNAPSHOT_SOBOLEV_INDEX)
              + vector_sobolev_norm((state.v1, state.v2), SNAPSHOT_SOBOLEV_INDEX))
        return cls(state.t, state, sup_norm(state.u1), sup_norm(state.u2), hs)


@dataclass
class SimulationResult:
    outcome: Outcome
    snapshots: list[Snapshot]
    final_state: State
    t_detect: Optional[float] = None
    bracket: Optional[tuple[float, float]] = None
    steps_taken: int = 0
    message: str = ''

    @property
    def times(self) -> NDArray[np.float64]:
        return np.array([s.t for s in self.snapshots])


Observer = Callable[[Snapshot], None]


def _evolution_symbols(grid: Grid, k1: KernelSpec, k2: KernelSpec) -> NDArray[np.float64]:
    return np.stack([k1.evolution_symbol(grid), k2.evolution_symbol(grid)])


def _pad(values: NDArray[np.float64], n: int, m: int) -> NDArray[np.float64]:
    coefficients = fft.rfft(values, axis=-1)
    coefficients[..., -1] = 0.0
    padded = np.zeros(values.shape[:-1] + (m // 2 + 1,), dtype=np.complex128)
    padded[..., :n // 2 + 1] = coefficients
    return fft.irfft(padded, n=m, axis=-1) * (m / n)


def _truncate(values: NDArray[np.float64], n: int, m: int) -> NDArray[np.float64]:
    coefficients = fft.rfft(values, axis=-1)[..., :n // 2 + 1] * (n / m)
    coefficients[..., -1] = 0.0
    return fft.irfft(coefficients, n=n, axis=-1)


def _nonlinear_terms(u: NDArray[np.float64], nl: NonlinearitySpec, dealias: bool) -> NDArray[np.float64]:
    if not dealias:
        return np.stack([nl.f1(u[0], u[1]), nl.f2(u[0], u[1])])
    n = u.shape[-1]
    m = 3 * n // 2
    fine = _pad(u, n, m)
    f = np.stack([nl.f1(fine[0], fine[1]), nl.f2(fine[0], fine[1])])
    if not np.all(np.isfinite(f)):
        return f
    return _truncate(f, n, m)


def _time_derivative(t: float, values: NDArray[np.float64], symbols: NDArray[np.float64],
                     nl: NonlinearitySpec, dealias: bool) -> NDArray[np.float64]:
    with np.errstate(over='ignore', invalid='ignore'):
        f = _nonlinear_terms(values[:2], nl, dealias)
    if not np.all(np.isfinite(f)):
        raise CorruptionError(f'Nonlinearity is not finite at t={t:g}', t=t)
    acceleration = spectral_multiply(f, symbols, values.shape[-1])
    return np.concatenate([values[2:], acceleration])


def _rk4(t: float, values: NDArray[np.float64], dt: float, symbols: NDArray[np.float64],
         nl: NonlinearitySpec, dealias: bool) -> NDArray[np.float64]:
    with np.errstate(over='ignore', invalid='ignore'):
        k1 = _time_derivative(t, values, symbols, nl, dealias)
        k2 = _time_derivative(t + 0.5 * dt, values + 0.5 * dt * k1, symbols, nl, dealias)
        k3 = _time_derivative(t + 0.5 * dt, values + 0.5 * dt * k2, symbols, nl, dealias)
        k4 = _time_derivative(t + dt, values + dt * k3, symbols, nl, dealias)
        return values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rhs(s: State, k1: KernelSpec, k2: KernelSpec, nl: NonlinearitySpec, dealias: bool = False) -> State:
    """
    Time derivative (v1, v2, B1 f1(u), B2 f2(u)) of a state, returned as a State at the same t.

    Raises
    ------
    CorruptionError
        If the nonlinearity evaluates to NaN or Inf on the grid values.
    """
    symbols = _evolution_symbols(s.grid, k1, k2)
    return State(s.t, s.grid, _time_derivative(s.t, s.values, symbols, nl, dealias))


def step_rk4(s: State, dt: float, k1: KernelSpec, k2: KernelSpec, nl: NonlinearitySpec,
             dealias: bool = False) -> State:
    """One classical RK4 step; a negative dt steps backwards in time."""
    if dt == 0 or not np.isfinite(dt):
        raise ValueError(f'dt must be finite and nonzero, got {dt}')
    symbols = _evolution_symbols(s.grid, k1, k2)
    return State(s.t + dt, s.grid, _rk4(s.t, s.values, dt, symbols, nl, dealias))


def integrate(init: InitialData, cfg: EvolutionConfig, k1: KernelSpec, k2: KernelSpec,
              nl: NonlinearitySpec, observers: Iterable[Observer] = ()) -> SimulationResult:
    """
    Run RK4 from `init` until `cfg.t_end` or until the blow-up guard trips.

    A snapshot is recorded at t = 0, every `cfg.stride` steps, at the final step
    and at the step that trips the guard; every observer is called on each one.
    The guard trips at the first step where ||u1||_inf + ||u2||_inf exceeds the
    threshold, and the bracket is [t - dt, t]. A step that overflows is counted
    as blow-up when it started above sqrt(threshold) (bracket [t, t + dt]) and
    as corruption otherwise.
    """
    observers = list(observers)
    grid = init.grid
    symbols = _evolution_symbols(grid, k1, k2)
    dt = cfg.dt
    t0 = 0.0
    state = init.to_state(t0)
    snapshots: list[Snapshot] = []

    def record(s: State):
        snapshot = Snapshot.of(s)
        snapshots.append(snapshot)
        for observer in observers:
            observer(snapshot)

    logger.info('Integrating %d steps of dt=%g on n=%d, L=%g with %r, %r and %r',
                cfg.n_steps, dt, grid.n, grid.period, k1, k2, nl)
    record(state)
    if not state.is_finite:
        logger.error('Initial data is not finite')
        return SimulationResult(Outcome.CORRUPTED, snapshots, state, message='initial data is not finite')

    for step in range(1, cfg.n_steps + 1):
        t = t0 + step * dt
        try:
            values = _rk4(state.t, state.values, dt, symbols, nl, cfg.dealias)
        except CorruptionError:
            values = None
        if values is None or not np.all(np.isfinite(values)):
            if state.sup_norm > np.sqrt(cfg.blowup_threshold):
                logger.warning('Overflow after t=%g from sup norm %.3e; blow-up bracket [%g, %g]',
                               state.t, state.sup_norm, state.t, t)
                return SimulationResult(Outcome.BLOWUP_DETECTED, snapshots, state, t_detect=t,
                                        bracket=(state.t, t), steps_taken=step,
                                        message='solution overflowed above the guard scale')
            logger.error('Non-finite values at t=%g with sup norm %.3e', t, state.sup_norm)
            return SimulationResult(Outcome.CORRUPTED, snapshots, state, steps_taken=step - 1,
                                    message=f'non-finite values at t={t:g}')
        state = State(t, grid, values)
        if state.sup_norm > cfg.blowup_threshold:
            record(state)
            logger.warning('Blow-up guard tripped at t=%g: sup norm %.3e > %.1e, bracket [%g, %g]',
                           t, state.sup_norm, cfg.blowup_threshold, t - dt, t)
            return SimulationResult(Outcome.BLOWUP_DETECTED, snapshots, state, t_detect=t,
                                    bracket=(t - dt, t), steps_taken=step,
                                    message='sup norm exceeded the blow-up threshold')
        if step % cfg.stride == 0 or step == cfg.n_steps:
            record(state)

    logger.info('Completed at t=%g', state.t)
    return SimulationResult(Outcome.COMPLETED, snapshots, state, steps_taken=cfg.n_steps)


def _linear_mode_solution(phi: RealField, psi: RealField, omega: NDArray[np.float64],
                          t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    phi_hat = fft.rfft(phi.values)
    psi_hat = fft.rfft(psi.values)
    # sin(wt)/w = t sinc(wt/pi) covers the zero mode
    u_hat = phi_hat * np.cos(omega * t) + psi_hat * t * np.sinc(omega * t / np.pi)
    v_hat = -phi_hat * omega * np.sin(omega * t) + psi_hat * np.cos(omega * t)
    n = phi.grid.n
    return fft.irfft(u_hat, n=n), fft.irfft(v_hat, n=n)


def linear_exact(init: InitialData, k: KernelSpec, t: float, k2: Optional[KernelSpec] = None) -> State:
    """
    Exact solution of the linear problem (g = 0) at time t.

    Each mode solves u_tt = -xi^2 beta_hat u, so u_hat(t) = phi_hat cos(wt) + psi_hat sin(wt)/w
    with w = |xi| sqrt(beta_hat). `k` drives both components unless `k2` is given.
    """
    k2 = k if k2 is None else k2
    grid = init.grid
    u1, v1 = _linear_mode_solution(init.phi1, init.psi1, k.dispersion(grid), t)
    u2, v2 = _linear_mode_solution(init.phi2, init.psi2, k2.dispersion(grid), t)
    return State(t, grid, np.stack([u1, u2, v1, v2]))
