"""
Picard iteration on the integral form of the system,

    u_i(t) = phi_i + t psi_i + int_0^t (t - tau) (beta_i * f_i(u(tau)))_xx dtau,
    v_i(t) = psi_i + int_0^t (beta_i * f_i(u(tau)))_xx dtau,

with iterates stored densely on a uniform time grid and composite trapezoid
quadrature in tau. Used as an oracle for the RK4 solver on short horizons.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import fft
from scipy.integrate import cumulative_trapezoid

from .exceptions import CorruptionError, PicardDivergenceError
from .grid import Grid, spectral_multiply
from .kernels import KernelSpec
from .nonlinearity import NonlinearitySpec
from .solver import InitialData, State

logger = logging.getLogger(__name__)

DIVERGENCE_RUN = 3


@dataclass
class PicardResult:
    state: State
    history: list[float]
    times: NDArray[np.float64]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.history)


def _sobolev_distance(grid: Grid, difference: NDArray[np.float64], s: float) -> float:
    """max over time of ||d1||_s + ||d2||_s for a (time, 2, n) difference."""
    weights = grid.parseval_weights * (1.0 + grid.rfrequencies ** 2) ** s
    norms = np.sqrt(np.sum(weights * np.abs(fft.rfft(difference, axis=-1)) ** 2, axis=-1))
    return float(np.max(np.sum(norms, axis=-1)))


def _is_diverging(history: list[float]) -> bool:
    if len(history) < DIVERGENCE_RUN + 1:
        return False
    tail = history[-(DIVERGENCE_RUN + 1):]
    return all(later > earlier for earlier, later in zip(tail, tail[1:]))


def picard_iterate(init: InitialData, T: float, n_time_nodes: int, n_iters: int, k1: KernelSpec,
                   k2: KernelSpec, nl: NonlinearitySpec, s: float = 1.0, tol: float = 0.0) -> PicardResult:
    """
    Iterate the integral representation from the free solution phi + t psi.

    The distance between consecutive iterates is measured in sup over time of
    the vector H^s norm. Iteration stops after `n_iters` iterations or once the
    distance drops to `tol`.

    Raises
    ------
    PicardDivergenceError
        If the distance grows on three consecutive iterations.
    CorruptionError
        If an iterate becomes non-finite.
    """
    if not T > 0:
        raise ValueError(f'T must be positive, got {T}')
    if n_time_nodes < 2:
        raise ValueError(f'n_time_nodes must be >= 2, got {n_time_nodes}')
    if n_iters < 1:
        raise ValueError(f'n_iters must be >= 1, got {n_iters}')

    grid = init.grid
    n = grid.n
    symbols = np.stack([k1.evolution_symbol(grid), k2.evolution_symbol(grid)])
    times = np.linspace(0.0, T, n_time_nodes)
    tau = times[:, None, None]
    phi = np.stack([init.phi1.values, init.phi2.values])
    psi = np.stack([init.psi1.values, init.psi2.values])

    u = phi + tau * psi
    v = np.broadcast_to(psi, u.shape).copy()
    history: list[float] = []
    converged = False

    for iteration in range(1, n_iters + 1):
        with np.errstate(over='ignore', invalid='ignore'):
            f = np.stack([nl.f1(u[:, 0], u[:, 1]), nl.f2(u[:, 0], u[:, 1])], axis=1)
        if not np.all(np.isfinite(f)):
            raise CorruptionError(f'Picard iterate {iteration} is not finite', t=T)
        forcing = spectral_multiply(f, symbols, n)
        first_moment = cumulative_trapezoid(forcing, times, axis=0, initial=0.0)
        second_moment = cumulative_trapezoid(tau * forcing, times, axis=0, initial=0.0)
        u_next = phi + tau * psi + tau * first_moment - second_moment
        # d/dt of u_next, built from the same forcing
        v = psi + first_moment

        distance = _sobolev_distance(grid, u_next - u, s)
        history.append(distance)
        logger.debug('Picard iteration %d: distance %.3e', iteration, distance)
        u = u_next
        if distance <= tol:
            converged = True
            break
        if _is_diverging(history):
            raise PicardDivergenceError(history)

    state = State(T, grid, np.concatenate([u[-1], v[-1]]))
    return PicardResult(state=state, history=history, times=times, converged=converged)
