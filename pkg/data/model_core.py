"""
Parameter algebra of the latent two-state chain
Transition matrix, stationary law, pair-pattern weights, the theta <-> v
reparametrization with its Jacobians and the identifiability coefficients
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import DELTA, DENOMINATOR_MIN, RADICAND_CLAMP
from utils.errors import DegenerateDenominator, InvalidParameter, NegativeRadicand

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThetaParam:
    """Transition parameters (alpha, beta) constrained to [delta, 1 - delta]^2"""
    alpha: float
    beta: float
    delta: float = DELTA

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise InvalidParameter(f"delta must lie in (0, 1/2), got {self.delta}")
        lo, hi = self.delta, 1.0 - self.delta
        # small slack so values produced by g_map at the box edge are accepted
        slack = 1e-12
        for label, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not (lo - slack <= value <= hi + slack) or math.isnan(value):
                raise InvalidParameter(f"{label}={value} outside [{lo}, {hi}]")

    @property
    def b(self) -> float:
        return 1.0 - self.beta

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])

    def on_boundary(self, tol: float = 1e-6) -> bool:
        """True when either coordinate sits on the edge of the box"""
        lo, hi = self.delta, 1.0 - self.delta
        return any(abs(x - lo) <= tol or abs(x - hi) <= tol for x in (self.alpha, self.beta))

    @classmethod
    def clipped(cls, alpha: float, beta: float, delta: float = DELTA) -> "ThetaParam":
        lo, hi = delta, 1.0 - delta
        return cls(min(max(alpha, lo), hi), min(max(beta, lo), hi), delta)


@dataclass(frozen=True)
class MixWeights:
    """Stationary masses (p, r) and pair-pattern weights lambda1..lambda4"""
    p: float
    r: float
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float

    @property
    def lambdas(self) -> Tuple[float, float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4)


@dataclass(frozen=True)
class VParam:
    """Reparametrized coordinates under which the integral contrast is quadratic"""
    v1: float
    v2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2])


def transition_matrix(theta: ThetaParam) -> np.ndarray:
    """Row-stochastic matrix [[1 - alpha, alpha], [beta, 1 - beta]]"""
    return np.array([[1.0 - theta.alpha, theta.alpha],
                     [theta.beta, 1.0 - theta.beta]])


def mix_weights(theta: ThetaParam) -> MixWeights:
    a, b = theta.alpha, theta.beta
    s = a + b
    lambda2 = a * b / s
    lambda1 = b * (1.0 - a) / s
    lambda4 = a * (1.0 - b) / s
    return MixWeights(p=b / s, r=a / s, lambda1=lambda1, lambda2=lambda2,
                      lambda3=lambda2, lambda4=lambda4)


def h_coordinates(alpha, beta):
    """h on raw (broadcastable) arrays of alpha and beta, for grid scans"""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return -beta * (1.0 - alpha) / (alpha + beta), beta * (alpha + beta - 1.0) / alpha


def h_map(theta: ThetaParam) -> VParam:
    v1, v2 = h_coordinates(theta.alpha, theta.beta)
    return VParam(v1=float(v1), v2=float(v2))


def g_map(v: VParam, delta: float = DELTA) -> ThetaParam:
    """
    Inverse of h_map

    Raises NegativeRadicand / DegenerateDenominator when v is outside h(Theta);
    callers fall back to a constrained search in theta-space.
    """
    radicand = v.v1 * v.v2 + v.v2 - v.v1
    if radicand < 0.0:
        if radicand > -RADICAND_CLAMP:
            logger.debug(f"Clamping radicand {radicand:.3e} to 0")
            radicand = 0.0
        else:
            raise NegativeRadicand(f"v1*v2 + v2 - v1 = {radicand:.6g} < 0 for v={v}")
    beta = math.sqrt(radicand)
    denominator = beta - v.v2
    if abs(denominator) < DENOMINATOR_MIN:
        raise DegenerateDenominator(f"beta - v2 = {denominator:.3e} for v={v}")
    alpha = beta * (1.0 - beta) / denominator
    return ThetaParam(alpha, beta, delta)


def dh_jacobian(theta: ThetaParam) -> np.ndarray:
    a, b = theta.alpha, theta.beta
    s2 = (a + b) ** 2
    return np.array([[(b * b + b) / s2, (a * a - a) / s2],
                     [(b - b * b) / (a * a), (a + 2.0 * b - 1.0) / a]])


def dg_jacobian(theta: ThetaParam) -> np.ndarray:
    """Dg evaluated at h(theta), closed form"""
    a, b = theta.alpha, theta.beta
    s = a + b
    return np.array([[s * (a + 2.0 * b - 1.0) / (2.0 * b * b), a * a * (1.0 - a) / (2.0 * b * b * s)],
                     [s * (b - 1.0) / (2.0 * a * b), a * (b + 1.0) / (2.0 * b * s)]])


def c_coefficients(theta_star: ThetaParam, theta: ThetaParam) -> Tuple[float, float]:
    """Coefficients of Delta(theta) on (G0 - F0 x F0) and (F1 - F0) x (F1 - F0)"""
    r_star, b_star = mix_weights(theta_star).r, theta_star.b
    r, b = mix_weights(theta).r, theta.b
    c1 = -2.0 * r_star + r_star * b_star + 2.0 * r - r * b
    c2 = (r_star / r) * (b_star * r - r_star * b)
    return c1, c2


def lipschitz_constant(delta: float = DELTA) -> float:
    """Bound C with |d_n(theta) - d_n(theta')| <= C ||theta - theta'||_1"""
    return 16.0 * delta ** -4


def contrast_deviation_bound(g_error: float, f_error: float, delta: float = DELTA) -> float:
    """Uniform bound on |d_n - d| (and |s_n - s|) from the sup-errors of G_n and F_n"""
    return (6.0 + 2.0 / delta) * (g_error + (2.0 + 4.0 / delta) * f_error)
