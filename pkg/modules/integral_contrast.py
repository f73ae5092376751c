"""
Integral Contrast Module
theta_hat = argmin d_n over Theta: closed-form quadratic solve in v-coordinates,
mapped back through g, with a bounded multistart simplex search as fallback
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from config import DELTA, FALLBACK_LATTICE, GRAM_DET_MIN, SOLVER_TOLERANCE
from data.contrast import TFields
from data.model_core import ThetaParam, VParam, g_map, h_coordinates, h_map
from modules.base_module import BaseModule, estimator_entry
from utils.errors import DegenerateDenominator, InvalidParameter, NegativeRadicand, SingularGram

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed-form"
FALLBACK_SEARCH = "fallback-search"


@dataclass(frozen=True)
class IntegralDiagnostics:
    solver_path: str
    contrast_at_min: float
    gram_det: float
    v_unconstrained: VParam
    reason: Optional[str] = None
    starts: int = 0


class IntegralContrastModule(BaseModule):
    """Minimum integral contrast estimator"""

    def __init__(self):
        super().__init__(**estimator_entry("d"))

    def run(self, fields: TFields, delta: float = DELTA) -> Tuple[ThetaParam, VParam, IntegralDiagnostics]:
        quad = fields.quadratic
        det = quad.det
        if det < GRAM_DET_MIN:
            raise SingularGram(f"Gram determinant {det:.3e} below {GRAM_DET_MIN:.0e}: "
                               f"T1 and T2hat are not linearly independent")

        v_hat = VParam(*np.linalg.solve(quad.gram, -quad.linear))
        reason = None
        try:
            theta = g_map(v_hat, delta)
            back = h_map(theta).as_array()
            if not np.allclose(back, v_hat.as_array(), rtol=1e-8, atol=1e-10):
                reason = f"h(g(v)) = {back} does not reproduce v = {v_hat.as_array()}"
        except (NegativeRadicand, DegenerateDenominator, InvalidParameter) as e:
            reason = str(e)

        if reason is None:
            value = max(0.0, float(quad.evaluate(v_hat.v1, v_hat.v2)))
            diagnostics = IntegralDiagnostics(CLOSED_FORM, value, det, v_hat)
            return self._record((theta, v_hat, diagnostics))

        logger.warning(f"Quadratic minimizer outside h(Theta), falling back to bounded search: {reason}")
        theta, value, starts = self._fallback(fields, delta)
        diagnostics = IntegralDiagnostics(FALLBACK_SEARCH, value, det, v_hat, reason, starts)
        return self._record((theta, h_map(theta), diagnostics))

    def _fallback(self, fields: TFields, delta: float) -> Tuple[ThetaParam, float, int]:
        """Multistart Nelder-Mead of d_n o h on a lattice of starts inside Theta"""
        quad = fields.quadratic
        lo, hi = delta, 1.0 - delta

        def objective(x):
            v1, v2 = h_coordinates(x[0], x[1])
            return float(quad.evaluate(v1, v2))

        axis = np.linspace(lo, hi, FALLBACK_LATTICE + 2)[1:-1]
        candidates = []
        for a0 in axis:
            for b0 in axis:
                res = minimize(objective, x0=np.array([a0, b0]), method="Nelder-Mead",
                               bounds=[(lo, hi), (lo, hi)],
                               options={"xatol": SOLVER_TOLERANCE, "fatol": SOLVER_TOLERANCE})
                x = np.clip(res.x, lo, hi)
                candidates.append((objective(x), float(x[0]), float(x[1])))

        # lowest contrast, ties to lowest alpha then beta
        value, alpha, beta = min(candidates)
        return ThetaParam(alpha, beta, delta), max(0.0, value), len(candidates)


# Create module instance
integral_contrast_module = IntegralContrastModule()


def minimize_d(fields: TFields, delta: float = DELTA) -> Tuple[ThetaParam, VParam, IntegralDiagnostics]:
    return integral_contrast_module.run(fields, delta)
