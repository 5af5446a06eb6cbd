"""
Conserved energy, blow-up certificates and the concavity functional.

The energy of a state is

    E = ||P1 v1||^2 + ||P2 v2||^2 + 2 int F(u1, u2) dx,

and the blow-up functional attached to a certificate (nu, b, t0) is

    Phi(t) = ||P1 u1(t)||^2 + ||P2 u2(t)||^2 + b (t + t0)^2.

If Phi Phi'' - (1 + nu) Phi'^2 >= 0 with Phi(0), Phi'(0) > 0, Phi blows up
no later than Phi(0) / (nu Phi'(0)).
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .grid import RealField, inner_product, l2_norm, sobolev_norm
from .kernels import ZERO_MODE_TOL, KernelSpec, apply_P, p_inner_product, p_norm_squared
from .nonlinearity import NonlinearitySpec
from .solver import InitialData, SimulationResult, State

logger = logging.getLogger(__name__)

NaN = float('NaN')

CONCAVITY_TOL = 1e-9


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic1: float
    kinetic2: float
    potential: float

    @property
    def total(self) -> float:
        return self.kinetic1 + self.kinetic2 + self.potential

    def as_dict(self) -> dict[str, float]:
        return {'kinetic1': self.kinetic1, 'kinetic2': self.kinetic2,
                'potential': self.potential, 'total': self.total}


def potential_energy(s: State, nl: NonlinearitySpec) -> float:
    """2 int F(u1, u2) dx as a dx-weighted nodal sum."""
    return float(2.0 * s.grid.spacing * np.sum(nl.F(s.values[0], s.values[1])))


def energy(s: State, k1: KernelSpec, k2: KernelSpec, nl: NonlinearitySpec,
           zero_mode_tol: float = ZERO_MODE_TOL) -> EnergyBreakdown:
    """
    Raises
    ------
    ZeroModeError
        If a velocity has a non-negligible mean, where P is undefined.
    """
    return EnergyBreakdown(kinetic1=l2_norm(apply_P(k1, s.v1, zero_mode_tol)) ** 2,
                           kinetic2=l2_norm(apply_P(k2, s.v2, zero_mode_tol)) ** 2,
                           potential=potential_energy(s, nl))


class CertificateStatus(str, Enum):
    NEGATIVE_ENERGY = 'negative_energy'
    POSITIVE_ENERGY = 'positive_energy'
    NOT_CERTIFIED = 'not_certified'


@dataclass(frozen=True)
class BlowupCertificate:
    nu: float
    b: float
    t0: float
    A: float
    B: float
    E0: float
    phi0: float
    dphi0: float
    levine_bound: float
    status: CertificateStatus
    t0_strategy: str = 'margin'

    @property
    def certified(self) -> bool:
        return self.status != CertificateStatus.NOT_CERTIFIED

    def phi_offset(self, t: ArrayLike) -> NDArray[np.float64]:
        """The b (t + t0)^2 part of Phi."""
        return self.b * (np.asarray(t, dtype=np.float64) + self.t0) ** 2

    def as_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d['status'] = self.status.value
        return d


def levine_bound(phi0: float, dphi0: float, nu: float) -> float:
    """Upper bound Phi(0) / (nu Phi'(0)) on the blow-up time of a concave-power functional."""
    if not (phi0 > 0 and dphi0 > 0 and nu > 0):
        raise ValueError(f'levine_bound needs positive inputs, got phi0={phi0}, dphi0={dphi0}, nu={nu}')
    return phi0 / (nu * dphi0)


def initial_functionals(init: InitialData, k1: KernelSpec, k2: KernelSpec,
                        zero_mode_tol: float = ZERO_MODE_TOL) -> tuple[float, float]:
    """A = <P1 phi1, P1 psi1> + <P2 phi2, P2 psi2> and B = ||P1 phi1||^2 + ||P2 phi2||^2."""
    A = (p_inner_product(k1, init.phi1, init.psi1, zero_mode_tol)
         + p_inner_product(k2, init.phi2, init.psi2, zero_mode_tol))
    B = p_norm_squared(k1, init.phi1, zero_mode_tol) + p_norm_squared(k2, init.phi2, zero_mode_tol)
    return A, B


def _negative_branch_t0(A: float, B: float, b: float, strategy: str, margin: float) -> float:
    if strategy == 'optimal':
        # minimizes (B + b t0^2) / (2A + 2b t0)
        return (-A + np.sqrt(A ** 2 + b * B)) / b
    return 0.0 if A > 0 else -A / b + margin


def build_certificate(init: InitialData, nu: float, k1: KernelSpec, k2: KernelSpec, nl: NonlinearitySpec,
                      t0_strategy: str = 'margin', margin: float = 1.0,
                      zero_mode_tol: float = ZERO_MODE_TOL) -> BlowupCertificate:
    """
    Choose (b, t0) for the blow-up functional and evaluate the Levine bound.

    With E0 < 0, b = -E0 and t0 is either `margin` past the root of Phi'(0)
    (`t0_strategy="margin"`) or the minimizer of the bound (`"optimal"`).
    With E0 > 0 and A^2 < E0 B, b = -E0 and t0 is the negative root of the
    midpoint of (A^2/E0^2, B/E0). Anything else is not certified; the growth
    hypothesis on the nonlinearity is the caller's to check.
    """
    if not nu > 0:
        raise ValueError(f'nu must be positive, got {nu}')
    if t0_strategy not in ('margin', 'optimal'):
        raise ValueError(f"t0_strategy must be 'margin' or 'optimal', got {t0_strategy!r}")
    A, B = initial_functionals(init, k1, k2, zero_mode_tol)
    E0 = energy(init.to_state(), k1, k2, nl, zero_mode_tol).total

    def certificate(b: float, t0: float, status: CertificateStatus) -> BlowupCertificate:
        phi0 = B + b * t0 ** 2
        dphi0 = 2.0 * A + 2.0 * b * t0
        if not (phi0 > 0 and dphi0 > 0):
            return not_certified()
        return BlowupCertificate(nu=nu, b=b, t0=t0, A=A, B=B, E0=E0, phi0=phi0, dphi0=dphi0,
                                 levine_bound=levine_bound(phi0, dphi0, nu), status=status,
                                 t0_strategy=t0_strategy)

    def not_certified() -> BlowupCertificate:
        return BlowupCertificate(nu=nu, b=NaN, t0=NaN, A=A, B=B, E0=E0, phi0=NaN, dphi0=NaN,
                                 levine_bound=NaN, status=CertificateStatus.NOT_CERTIFIED,
                                 t0_strategy=t0_strategy)

    if E0 < 0:
        b = -E0
        result = certificate(b, _negative_branch_t0(A, B, b, t0_strategy, margin),
                             CertificateStatus.NEGATIVE_ENERGY)
    elif E0 > 0 and A ** 2 < E0 * B:
        t0 = -np.sqrt(0.5 * ((A / E0) ** 2 + B / E0))
        result = certificate(-E0, float(t0), CertificateStatus.POSITIVE_ENERGY)
    else:
        result = not_certified()
    logger.info('Certificate %s: E0=%.6e, A=%.6e, B=%.6e, levine bound %.6g',
                result.status.value, E0, A, B, result.levine_bound)
    return result


@dataclass(frozen=True)
class PhiSeries:
    times: NDArray[np.float64]
    phi: NDArray[np.float64]
    dphi: NDArray[np.float64]
    d2phi: NDArray[np.float64]


def phi_at(s: State, cert: BlowupCertificate, k1: KernelSpec, k2: KernelSpec,
           nl: Optional[NonlinearitySpec] = None,
           zero_mode_tol: float = ZERO_MODE_TOL) -> tuple[float, float, float]:
    """
    Phi, Phi' and Phi'' at one state.

    Phi'  = 2 sum <P u_i, P v_i> + 2 b (t + t0)
    Phi'' = 2 sum ||P v_i||^2 - 2 sum <u_i, f_i(u)> + 2 b, NaN without `nl`.
    """
    phi = p_norm_squared(k1, s.u1, zero_mode_tol) + p_norm_squared(k2, s.u2, zero_mode_tol)
    phi += float(cert.phi_offset(s.t))
    dphi = 2.0 * (p_inner_product(k1, s.u1, s.v1, zero_mode_tol)
                  + p_inner_product(k2, s.u2, s.v2, zero_mode_tol)) + 2.0 * cert.b * (s.t + cert.t0)
    if nl is None:
        return phi, dphi, NaN
    kinetic = p_norm_squared(k1, s.v1, zero_mode_tol) + p_norm_squared(k2, s.v2, zero_mode_tol)
    f1 = RealField(s.grid, nl.f1(s.values[0], s.values[1]))
    f2 = RealField(s.grid, nl.f2(s.values[0], s.values[1]))
    work = inner_product(s.u1, f1) + inner_product(s.u2, f2)
    return phi, dphi, 2.0 * kinetic - 2.0 * work + 2.0 * cert.b


def phi_series(result: SimulationResult, cert: BlowupCertificate, k1: KernelSpec, k2: KernelSpec,
               nl: Optional[NonlinearitySpec] = None, zero_mode_tol: float = ZERO_MODE_TOL) -> PhiSeries:
    values = np.array([phi_at(snapshot.state, cert, k1, k2, nl, zero_mode_tol) for snapshot in result.snapshots])
    values = values.reshape(-1, 3)
    return PhiSeries(times=result.times, phi=values[:, 0], dphi=values[:, 1], d2phi=values[:, 2])


@dataclass(frozen=True)
class ConcavityReport:
    passed: bool
    worst_margin: float
    worst_scaled_margin: float
    worst_index: int
    points: int


def _concavity_report(phi: NDArray, dphi: NDArray, d2phi: NDArray, scale: NDArray, nu: float,
                      tol: float, offset: int) -> ConcavityReport:
    margin = phi * d2phi - (1.0 + nu) * dphi ** 2
    scaled = margin / scale
    worst = int(np.argmin(scaled))
    return ConcavityReport(passed=bool(np.all(scaled >= -tol)),
                           worst_margin=float(margin[worst]),
                           worst_scaled_margin=float(scaled[worst]),
                           worst_index=worst + offset,
                           points=int(margin.size))


def verify_concavity_inequality(phi: Sequence[float], nu: float, dt: float,
                                tol: float = CONCAVITY_TOL) -> ConcavityReport:
    """
    Check Phi Phi'' - (1 + nu) Phi'^2 >= 0 on a uniformly spaced series by central differences.

    An interior point passes when the margin is at least -tol * max(1, Phi^2 / dt^2).
    """
    phi = np.asarray(phi, dtype=np.float64)
    if phi.size < 5:
        raise ValueError(f'concavity check needs at least 5 points, got {phi.size}')
    if not dt > 0:
        raise ValueError(f'dt must be positive, got {dt}')
    centre = phi[1:-1]
    dphi = (phi[2:] - phi[:-2]) / (2.0 * dt)
    d2phi = (phi[2:] - 2.0 * centre + phi[:-2]) / dt ** 2
    scale = np.maximum(1.0, centre ** 2 / dt ** 2)
    return _concavity_report(centre, dphi, d2phi, scale, nu, tol, offset=1)


def verify_concavity_along_trajectory(series: PhiSeries, nu: float, tol: float = CONCAVITY_TOL) -> ConcavityReport:
    """Same inequality using the exact Phi' and Phi'' carried by the series."""
    if np.any(np.isnan(series.d2phi)):
        raise ValueError("series carries no Phi''; build it with a nonlinearity")
    scale = np.maximum.reduce([np.ones_like(series.phi), np.abs(series.phi * series.d2phi), series.dphi ** 2])
    return _concavity_report(series.phi, series.dphi, series.d2phi, scale, nu, tol, offset=0)


def kinetic_a_priori_bound(s: State, E0: float, k: float, k1: KernelSpec, k2: KernelSpec,
                           zero_mode_tol: float = ZERO_MODE_TOL) -> tuple[float, float]:
    """
    Kinetic energy of `s` and its bound E0 + (2k - 1)(||u1||^2 + ||u2||^2),
    valid whenever G >= -k (u1^2 + u2^2).
    """
    kinetic = p_norm_squared(k1, s.v1, zero_mode_tol) + p_norm_squared(k2, s.v2, zero_mode_tol)
    bound = E0 + (2.0 * k - 1.0) * (l2_norm(s.u1) ** 2 + l2_norm(s.u2) ** 2)
    return kinetic, bound


def coercivity_margin(k: KernelSpec, w: RealField, zero_mode_tol: float = ZERO_MODE_TOL) -> float:
    """||P w||^2 - ||w||^2_{r/2-1} / C, nonnegative whenever the decay claim (r, C) holds."""
    return p_norm_squared(k, w, zero_mode_tol) - sobolev_norm(w, k.r / 2.0 - 1.0) ** 2 / k.C


def local_energy_density(s: State, lam: float, nl: NonlinearitySpec) -> RealField:
    """(v1^2 + v2^2)/2 + (lam/2)(u1^2 + u2^2 + 2G), the pointwise density for mildly singular kernels."""
    u1, u2, v1, v2 = s.values
    density = 0.5 * (v1 ** 2 + v2 ** 2) + 0.5 * lam * (u1 ** 2 + u2 ** 2 + 2.0 * nl.G(u1, u2))
    return RealField(s.grid, density)
