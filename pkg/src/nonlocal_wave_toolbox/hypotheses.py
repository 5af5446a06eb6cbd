"""
Dense-sampling checks of the structural hypotheses on a nonlinearity.

Every check evaluates an inequality lhs <= rhs on a uniform samples x samples
grid covering a box in the (u1, u2) plane. The signed margin at a point is
rhs - lhs; a point violates the hypothesis when its margin is below
-(atol + rtol * max(|lhs|, |rhs|)). Failing is a report, never an exception.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .nonlinearity import NonlinearitySpec

logger = logging.getLogger(__name__)

Box = tuple[tuple[float, float], tuple[float, float]]

DEFAULT_SAMPLES = 201
DEFAULT_ATOL = 1e-9
DEFAULT_RTOL = 1e-9


@dataclass(frozen=True)
class HypothesisReport:
    predicate: str
    box: Box
    worst_margin: float
    passed: bool
    worst_point: tuple[float, float]
    samples: int

    def as_dict(self) -> dict[str, Any]:
        return {'predicate': self.predicate,
                'box': [list(self.box[0]), list(self.box[1])],
                'worst_margin': self.worst_margin,
                'passed': self.passed,
                'worst_point': list(self.worst_point),
                'samples': self.samples}


def _normalize_box(box: Sequence[Sequence[float]]) -> Box:
    (a0, a1), (b0, b1) = box
    if not (a0 <= a1 and b0 <= b1):
        raise ValueError(f'box edges must be ordered, got {box}')
    return (float(a0), float(a1)), (float(b0), float(b1))


def sample_box(box: Sequence[Sequence[float]], samples: int = DEFAULT_SAMPLES) -> tuple[NDArray, NDArray]:
    if samples < 1:
        raise ValueError(f'samples must be >= 1, got {samples}')
    (a0, a1), (b0, b1) = _normalize_box(box)
    return np.meshgrid(np.linspace(a0, a1, samples), np.linspace(b0, b1, samples), indexing='ij')


def covering_box(sup_u1: float, sup_u2: float, padding: float = 0.1) -> Box:
    """Symmetric box containing every visited value of (u1, u2), padded by a relative margin."""
    r1 = max(float(sup_u1), 1e-12) * (1.0 + padding)
    r2 = max(float(sup_u2), 1e-12) * (1.0 + padding)
    return (-r1, r1), (-r2, r2)


def _report(predicate: str, box: Box, u1: NDArray, u2: NDArray, lhs: NDArray, rhs: NDArray,
            atol: float, rtol: float, samples: int) -> HypothesisReport:
    margin = rhs - lhs
    allowance = atol + rtol * np.maximum(np.abs(lhs), np.abs(rhs))
    margin = np.where(np.isfinite(margin), margin, -np.inf)
    passed = bool(np.all(margin >= -allowance))
    worst = np.unravel_index(int(np.argmin(margin)), margin.shape)
    report = HypothesisReport(predicate=predicate,
                              box=box,
                              worst_margin=float(margin[worst]),
                              passed=passed,
                              worst_point=(float(u1[worst]), float(u2[worst])),
                              samples=samples)
    logger.debug('%s on %s: passed=%s, worst margin %.3e at %s',
                 predicate, box, passed, report.worst_margin, report.worst_point)
    return report


def check_exactness(spec: NonlinearitySpec, box: Sequence[Sequence[float]], samples: int = DEFAULT_SAMPLES,
                    h: float = 1e-4, tol: float = 1e-6) -> HypothesisReport:
    """Central-difference check of dg1/du2 = dg2/du1; the margin is minus the discrepancy."""
    if not h > 0:
        raise ValueError(f'finite difference step must be positive, got {h}')
    box = _normalize_box(box)
    u1, u2 = sample_box(box, samples)
    dg1_du2 = (spec.g1(u1, u2 + h) - spec.g1(u1, u2 - h)) / (2 * h)
    dg2_du1 = (spec.g2(u1 + h, u2) - spec.g2(u1 - h, u2)) / (2 * h)
    discrepancy = np.abs(dg1_du2 - dg2_du1)
    return _report('exactness', box, u1, u2, discrepancy, np.zeros_like(discrepancy),
                   atol=tol, rtol=0.0, samples=samples)


def check_gradient_consistency(spec: NonlinearitySpec, box: Sequence[Sequence[float]],
                               samples: int = DEFAULT_SAMPLES, h: float = 1e-4,
                               tol: float = 1e-6) -> HypothesisReport:
    """Central differences of G against (g1, g2); the margin is minus the larger component error."""
    box = _normalize_box(box)
    u1, u2 = sample_box(box, samples)
    dG_du1 = (spec.G(u1 + h, u2) - spec.G(u1 - h, u2)) / (2 * h)
    dG_du2 = (spec.G(u1, u2 + h) - spec.G(u1, u2 - h)) / (2 * h)
    error = np.maximum(np.abs(dG_du1 - spec.g1(u1, u2)), np.abs(dG_du2 - spec.g2(u1, u2)))
    return _report('gradient_consistency', box, u1, u2, error, np.zeros_like(error),
                   atol=tol, rtol=0.0, samples=samples)


def check_blowup_growth(spec: NonlinearitySpec, nu: float, box: Sequence[Sequence[float]],
                        samples: int = DEFAULT_SAMPLES, atol: float = DEFAULT_ATOL,
                        rtol: float = DEFAULT_RTOL) -> HypothesisReport:
    """u1 f1 + u2 f2 <= 2 (1 + 2 nu) F on the box."""
    if not nu > 0:
        raise ValueError(f'nu must be positive, got {nu}')
    box = _normalize_box(box)
    u1, u2 = sample_box(box, samples)
    lhs = u1 * spec.f1(u1, u2) + u2 * spec.f2(u1, u2)
    rhs = 2.0 * (1.0 + 2.0 * nu) * spec.F(u1, u2)
    return _report('blowup_growth', box, u1, u2, lhs, rhs, atol, rtol, samples)


def check_global_G_bound(spec: NonlinearitySpec, k: float, box: Sequence[Sequence[float]],
                         samples: int = DEFAULT_SAMPLES, atol: float = DEFAULT_ATOL,
                         rtol: float = DEFAULT_RTOL) -> HypothesisReport:
    """G(a, b) >= -k (a^2 + b^2) on the box."""
    if k < 0:
        raise ValueError(f'k must be nonnegative, got {k}')
    box = _normalize_box(box)
    u1, u2 = sample_box(box, samples)
    lhs = -k * (u1 ** 2 + u2 ** 2)
    rhs = spec.G(u1, u2)
    return _report('global_G_bound', box, u1, u2, lhs, rhs, atol, rtol, samples)


def check_global_g_power_bound(spec: NonlinearitySpec, Cb: float, k: float, q1: float,
                               q2: Optional[float] = None, box: Sequence[Sequence[float]] = ((-1, 1), (-1, 1)),
                               samples: int = DEFAULT_SAMPLES, atol: float = DEFAULT_ATOL,
                               rtol: float = DEFAULT_RTOL) -> HypothesisReport:
    """
    |g_i(a, b)|^q_i <= Cb [G(a, b) + k (a^2 + b^2)] for i = 1, 2.

    `q2` defaults to `q1`. The reported margin is the smaller of the two.
    """
    q2 = q1 if q2 is None else q2
    if not (Cb > 0 and k >= 0 and q1 > 1 and q2 > 1):
        raise ValueError(f'need Cb > 0, k >= 0, q1 > 1, q2 > 1, got Cb={Cb}, k={k}, q1={q1}, q2={q2}')
    box = _normalize_box(box)
    u1, u2 = sample_box(box, samples)
    rhs = Cb * (spec.G(u1, u2) + k * (u1 ** 2 + u2 ** 2))
    lhs1 = np.abs(spec.g1(u1, u2)) ** q1
    lhs2 = np.abs(spec.g2(u1, u2)) ** q2
    lhs = np.where(rhs - lhs1 < rhs - lhs2, lhs1, lhs2)
    return _report('global_g_power_bound', box, u1, u2, lhs, rhs, atol, rtol, samples)


# predicate name -> (check, required params, optional params)
HYPOTHESIS_CHECKS: dict[str, tuple[Callable[..., HypothesisReport], frozenset, frozenset]] = {
    'exactness': (check_exactness, frozenset(), frozenset({'h', 'tol'})),
    'gradient_consistency': (check_gradient_consistency, frozenset(), frozenset({'h', 'tol'})),
    'blowup_growth': (check_blowup_growth, frozenset({'nu'}), frozenset({'atol', 'rtol'})),
    'global_G_bound': (check_global_G_bound, frozenset({'k'}), frozenset({'atol', 'rtol'})),
    'global_g_power_bound': (check_global_g_power_bound, frozenset({'Cb', 'k', 'q1'}),
                             frozenset({'q2', 'atol', 'rtol'})),
}


def run_check(predicate: str, spec: NonlinearitySpec, box: Sequence[Sequence[float]],
              samples: int = DEFAULT_SAMPLES, **params) -> HypothesisReport:
    try:
        check, _, _ = HYPOTHESIS_CHECKS[predicate]
    except KeyError:
        raise ValueError(f'unknown hypothesis {predicate!r}, expected one of {sorted(HYPOTHESIS_CHECKS)}')
    return check(spec, box=box, samples=samples, **params)
