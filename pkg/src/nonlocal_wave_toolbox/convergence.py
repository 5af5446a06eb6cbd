import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit
from sklearn.metrics import r2_score

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceFit:
    order: float
    intercept: float
    r2: float


def _fit_linear(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """
    Fit a linear function y = k * x + b to the data (x, y) using curve_fit,
    and compute the coefficient of determination R² using sklearn's r2_score.

    Returns
    -------
    k : float
        Slope of the fitted line.
    b : float
        Intercept of the fitted line.
    r2 : float
        Coefficient of determination R² of the fit.
    """

    def linear_model(x, k, b):
        return k * x + b

    with warnings.catch_warnings():
        # two points determine the line but leave no covariance estimate
        warnings.simplefilter('ignore', OptimizeWarning)
        popt, _ = curve_fit(linear_model, x, y)
    k, b = popt
    y_pred = linear_model(x, k, b)
    r2 = r2_score(y, y_pred)
    return float(k), float(b), float(r2)


def estimate_convergence_order(dts: Sequence[float], errors: Sequence[float]) -> ConvergenceFit:
    """
    Empirical order p from log(error) = p log(dt) + c.

    Parameters
    ----------
    dts : sequence of float
        Time steps, at least two distinct positive values.
    errors : sequence of float
        Errors against an exact solution, one per time step.
    """
    dts = np.asarray(dts, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    if dts.shape != errors.shape or dts.size < 2:
        raise ValueError('need at least two (dt, error) pairs of matching length')
    if np.any(dts <= 0) or np.any(errors <= 0):
        raise ValueError('time steps and errors must be positive')
    order, intercept, r2 = _fit_linear(np.log(dts), np.log(errors))
    logger.debug('Convergence order %.3f (R^2 %.4f) from %d points', order, r2, dts.size)
    return ConvergenceFit(order=order, intercept=intercept, r2=r2)
