"""
Sup Contrast Module
theta_tilde = argmin s_n over Theta: coarse grid scan, then simplex polish
from the best grid points with reflection at the box walls
"""
import logging

import numpy as np
from scipy.optimize import minimize

from config import DELTA, S_GRID_POINTS, S_MAX_ITER, S_POLISH_STARTS, SOLVER_TOLERANCE
from data.contrast import TFields, s_n, s_n_many
from data.model_core import ThetaParam, VParam, h_coordinates
from modules.base_module import BaseModule, estimator_entry
from utils.numerics import reflect_into_box

logger = logging.getLogger(__name__)


def scan_grid(delta: float = DELTA, points: int = S_GRID_POINTS):
    """Flattened (alpha, beta) coordinates of the coarse scan over Theta"""
    axis = np.linspace(delta, 1.0 - delta, points)
    alpha, beta = np.meshgrid(axis, axis, indexing="ij")
    return alpha.ravel(), beta.ravel()


class SupContrastModule(BaseModule):
    """Minimum sup contrast estimator"""

    def __init__(self):
        super().__init__(**estimator_entry("s"))

    def run(self, fields: TFields, delta: float = DELTA) -> ThetaParam:
        lo, hi = delta, 1.0 - delta
        alpha, beta = scan_grid(delta)
        v1, v2 = h_coordinates(alpha, beta)
        values = s_n_many(v1, v2, fields)

        # sort by value, then alpha, then beta
        order = np.lexsort((beta, alpha, values))
        candidates = [(float(values[k]), float(alpha[k]), float(beta[k])) for k in order[:S_POLISH_STARTS]]

        def objective(x):
            a, b = reflect_into_box(x, lo, hi)
            w1, w2 = h_coordinates(a, b)
            return s_n(VParam(float(w1), float(w2)), fields)

        for _, a0, b0 in list(candidates):
            res = minimize(objective, x0=np.array([a0, b0]), method="Nelder-Mead",
                           options={"maxiter": S_MAX_ITER, "xatol": SOLVER_TOLERANCE,
                                    "fatol": SOLVER_TOLERANCE})
            a, b = reflect_into_box(res.x, lo, hi)
            candidates.append((objective(np.array([a, b])), float(a), float(b)))

        value, a_best, b_best = min(candidates)
        logger.debug(f"Sup contrast minimum {value:.6g} at ({a_best:.4f}, {b_best:.4f})")
        return self._record(ThetaParam(a_best, b_best, delta))


# Create module instance
sup_contrast_module = SupContrastModule()


def minimize_s(fields: TFields, delta: float = DELTA) -> ThetaParam:
    return sup_contrast_module.run(fields, delta)
