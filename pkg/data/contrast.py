"""
Contrast functions
T-fields, the deviation Delta_n, the integral contrast d_n, the sup contrast s_n
and the exact quadratic form of d_n in v-coordinates
"""
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.stats import norm

from config import GRID_SIZE
from utils.errors import GridMismatch
from .empirical import CdfField, Grid, reference_cdfs
from .model_core import ThetaParam, VParam, mix_weights
from .simulate import Scenario, simulate_reference

logger = logging.getLogger(__name__)

# candidates per chunk when s_n is scanned over many v at once
_SUP_CHUNK = 256


@dataclass(frozen=True)
class ContrastQuadratic:
    """d_n(v) = a11 v1^2 + 2 a12 v1 v2 + a22 v2^2 + 2 b1 v1 + 2 b2 v2 + c0"""
    a11: float
    a12: float
    a22: float
    b1: float
    b2: float
    c0: float

    def evaluate(self, v1, v2):
        """Works on scalars or on broadcastable arrays of candidates"""
        return (self.a11 * v1 * v1 + 2.0 * self.a12 * v1 * v2 + self.a22 * v2 * v2
                + 2.0 * self.b1 * v1 + 2.0 * self.b2 * v2 + self.c0)

    @property
    def gram(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    @property
    def hessian(self) -> np.ndarray:
        return 2.0 * self.gram

    @property
    def linear(self) -> np.ndarray:
        return np.array([self.b1, self.b2])

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12


@dataclass(frozen=True, eq=False)
class TFields:
    """T1 = G0 - F0 x F0, T2hat = (Fn - F0) x (Fn - F0), T3hat = Gn - Fn x Fn on one grid"""
    t1: np.ndarray
    t2hat: np.ndarray
    t3hat: np.ndarray
    grid: Grid

    @cached_property
    def quadratic(self) -> ContrastQuadratic:
        return quadratic_form(self)


def _require_same_grid(*fields: CdfField):
    base = fields[0].grid
    for other in fields[1:]:
        if not base.same_as(other.grid):
            raise GridMismatch("all CDF fields must be sampled on the same grid")


def t_fields(fhat: CdfField, ghat: CdfField, f0: CdfField, g0: CdfField) -> TFields:
    _require_same_grid(fhat, ghat, f0, g0)
    fn, f0v = fhat.values, f0.values
    gap = fn - f0v
    return TFields(
        t1=g0.values - np.outer(f0v, f0v),
        t2hat=np.outer(gap, gap),
        t3hat=ghat.values - np.outer(fn, fn),
        grid=fhat.grid,
    )


def delta_n(v: VParam, fields: TFields) -> np.ndarray:
    return v.v1 * fields.t1 + v.v2 * fields.t2hat + fields.t3hat


def definitional_delta(theta: ThetaParam, fhat: CdfField, ghat: CdfField,
                       f0: CdfField, g0: CdfField) -> np.ndarray:
    """
    Delta_n built directly from the lambda weights and the inverted F1_{n,theta}

    Independent of the T-field route; used to cross-check the reparametrization.
    """
    w = mix_weights(theta)
    f1_theta = (fhat.values - w.p * f0.values) / w.r
    reconstruction = (w.lambda1 * g0.values
                      + w.lambda2 * np.outer(f0.values, f1_theta)
                      + w.lambda3 * np.outer(f1_theta, f0.values)
                      + w.lambda4 * np.outer(f1_theta, f1_theta))
    return ghat.values - reconstruction


def quadratic_form(fields: TFields) -> ContrastQuadratic:
    """The six H-quadrature inner products (uniform average over the grid)"""
    t1, t2, t3 = fields.t1, fields.t2hat, fields.t3hat
    return ContrastQuadratic(
        a11=float(np.mean(t1 * t1)),
        a12=float(np.mean(t1 * t2)),
        a22=float(np.mean(t2 * t2)),
        b1=float(np.mean(t1 * t3)),
        b2=float(np.mean(t2 * t3)),
        c0=float(np.mean(t3 * t3)),
    )


def d_n(v: VParam, fields: TFields) -> float:
    # clipped at 0: rounding can push the expanded quadratic a hair below zero
    return max(0.0, float(fields.quadratic.evaluate(v.v1, v.v2)))


def d_n_direct(v: VParam, fields: TFields) -> float:
    """Field-wise H-mean of Delta_n^2 (oracle for the quadratic route)"""
    return float(np.mean(delta_n(v, fields) ** 2))


def s_n(v: VParam, fields: TFields) -> float:
    return float(np.max(np.abs(delta_n(v, fields))))


def s_n_many(v1: np.ndarray, v2: np.ndarray, fields: TFields) -> np.ndarray:
    """s_n for a batch of candidates (flattened), evaluated chunk by chunk"""
    v1 = np.asarray(v1, dtype=float).ravel()
    v2 = np.asarray(v2, dtype=float).ravel()
    out = np.empty(v1.size)
    t1, t2, t3 = fields.t1.ravel(), fields.t2hat.ravel(), fields.t3hat.ravel()
    for start in range(0, v1.size, _SUP_CHUNK):
        stop = start + _SUP_CHUNK
        block = v1[start:stop, None] * t1 + v2[start:stop, None] * t2 + t3
        out[start:stop] = np.abs(block).max(axis=1)
    return out


def population_grid(scenario: Scenario, size: int = GRID_SIZE) -> Grid:
    """Grid covering both mixture components to +/- 4 standard deviations"""
    sd0 = math.sqrt(scenario.var0)
    lo = min(scenario.mu0 - 4.0 * sd0, scenario.m - 4.0 * scenario.v)
    hi = max(scenario.mu0 + 4.0 * sd0, scenario.m + 4.0 * scenario.v)
    return Grid.uniform(lo, hi, size)


def population_fields(scenario: Scenario, grid: Optional[Grid] = None,
                      ref_size: Optional[int] = None) -> Tuple[CdfField, CdfField, CdfField, CdfField]:
    """
    Mixture CDFs F and G from the exact mixture formulas

    F0 / G0 come from a large reference sample, F1 is the exact Gaussian poisoning
    CDF; F = p F0 + r F1 and G = l1 G0 + l2 F0 x F1 + l3 F1 x F0 + l4 F1 x F1.
    Returns (F, G, F0, G0).
    """
    grid = grid if grid is not None else population_grid(scenario)
    if ref_size is not None:
        scenario = replace(scenario, ref_size=ref_size)
    marginal, pairs = simulate_reference(scenario)
    f0, g0 = reference_cdfs(marginal, pairs, grid)
    f1 = norm.cdf(grid.nodes_x, loc=scenario.m, scale=scenario.v)
    w = mix_weights(scenario.theta)
    f_values = w.p * f0.values + w.r * f1
    g_values = (w.lambda1 * g0.values
                + w.lambda2 * np.outer(f0.values, f1)
                + w.lambda3 * np.outer(f1, f0.values)
                + w.lambda4 * np.outer(f1, f1))
    return CdfField(f_values, grid, 1), CdfField(g_values, grid, 2), f0, g0
