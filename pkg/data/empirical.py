"""
Empirical CDFs on a fixed grid
1st order ECDF of the observed process, 2nd order ECDF of consecutive pairs,
Monte Carlo reference CDFs F0 / G0 and the Gaussian densities used by decoding
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.stats import norm

from config import GRID_SIZE
from utils.errors import EmptySample, InvalidParameter, InvalidVariance, IoFailure, SeriesTooShort
from .simulate import GoldLaw

logger = logging.getLogger(__name__)

_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Grid:
    """Sorted evaluation nodes for each axis; the support [lo, hi] of the uniform weight H"""
    nodes_x: np.ndarray
    nodes_y: np.ndarray
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "nodes_x", np.array(self.nodes_x, dtype=float))
        object.__setattr__(self, "nodes_y", np.array(self.nodes_y, dtype=float))
        for nodes in (self.nodes_x, self.nodes_y):
            if nodes.ndim != 1 or nodes.size == 0:
                raise InvalidParameter("grid nodes must be a non-empty 1-D array")
            if np.any(np.diff(nodes) <= 0):
                raise InvalidParameter("grid nodes must be strictly increasing")
            nodes.setflags(write=False)

    @property
    def size(self) -> int:
        return self.nodes_x.size

    @classmethod
    def uniform(cls, lo: float, hi: float, size: int = GRID_SIZE) -> "Grid":
        """Cell-midpoint nodes over [lo, hi], so the H-quadrature is a plain average"""
        if not hi > lo:
            raise InvalidParameter(f"grid range must satisfy hi > lo, got [{lo}, {hi}]")
        step = (hi - lo) / size
        nodes = lo + step * (np.arange(size) + 0.5)
        return cls(nodes, nodes.copy(), float(lo), float(hi))

    @classmethod
    def from_sample(cls, z: np.ndarray, size: int = GRID_SIZE) -> "Grid":
        z = np.asarray(z, dtype=float)
        if z.size == 0:
            raise EmptySample("cannot build a grid from an empty sample")
        lo, hi = float(z.min()), float(z.max())
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        return cls.uniform(lo, hi, size)

    def same_as(self, other: "Grid") -> bool:
        return (self is other) or (np.array_equal(self.nodes_x, other.nodes_x)
                                   and np.array_equal(self.nodes_y, other.nodes_y))


@dataclass(frozen=True, eq=False)
class CdfField:
    """A 1-D or 2-D CDF sampled on a grid; validated and read-only once built"""
    values: np.ndarray
    grid: Grid
    arity: int = field(default=1)

    def __post_init__(self):
        object.__setattr__(self, "values", np.array(self.values, dtype=float))
        values = self.values
        if self.arity not in (1, 2) or values.ndim != self.arity:
            raise InvalidParameter(f"values of ndim {values.ndim} do not match arity {self.arity}")
        if values.size and (values.min() < -_TOL or values.max() > 1.0 + _TOL):
            raise InvalidParameter("CDF values must lie in [0, 1]")
        for axis in range(values.ndim):
            if np.any(np.diff(values, axis=axis) < -_TOL):
                raise InvalidParameter(f"CDF values must be non-decreasing along axis {axis}")
        if self.arity == 2 and np.any(np.diff(np.diff(values, axis=0), axis=1) < -_TOL):
            raise InvalidParameter("2-D CDF violates the rectangle inequality")
        values.setflags(write=False)


def _check_sample(sample: np.ndarray) -> np.ndarray:
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size == 0:
        raise EmptySample("empirical CDF of an empty sample")
    return sample


def _count_below(sample: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """#{i: sample_i <= node} for every node; one sort plus a merge"""
    return np.searchsorted(np.sort(sample), nodes, side="right")


def _dominance_counts(xs: np.ndarray, ys: np.ndarray, grid: Grid) -> np.ndarray:
    """
    #{i: xs_i <= nodes_x[j], ys_i <= nodes_y[k]} for all (j, k)

    Each point is binned to the first node dominating it, the bins are
    accumulated along both axes: O(n log G + G^2) instead of O(n G^2).
    """
    gx, gy = grid.nodes_x.size, grid.nodes_y.size
    ix = np.searchsorted(grid.nodes_x, xs, side="left")
    iy = np.searchsorted(grid.nodes_y, ys, side="left")
    hist = np.bincount(ix * (gy + 1) + iy, minlength=(gx + 1) * (gy + 1)).reshape(gx + 1, gy + 1)
    return hist.cumsum(axis=0).cumsum(axis=1)[:gx, :gy]


def ecdf1(sample: np.ndarray, grid: Grid) -> CdfField:
    sample = _check_sample(sample)
    values = _count_below(sample, grid.nodes_x) / sample.size
    return CdfField(values, grid, 1)


def ecdf2_pairs(series: np.ndarray, grid: Grid) -> CdfField:
    """2nd order ECDF of the consecutive pairs (z_i, z_{i+1}), normalized by n - 1"""
    series = np.asarray(series, dtype=float).ravel()
    if series.size < 2:
        raise SeriesTooShort(f"need at least 2 observations, got {series.size}")
    counts = _dominance_counts(series[:-1], series[1:], grid)
    return CdfField(counts / (series.size - 1), grid, 2)


def ecdf2_rows(pairs: np.ndarray, grid: Grid) -> CdfField:
    """2nd order ECDF of i.i.d. rows (x_i, y_i)"""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.size == 0:
        raise EmptySample("empirical CDF of an empty pair sample")
    counts = _dominance_counts(pairs[:, 0], pairs[:, 1], grid)
    return CdfField(counts / pairs.shape[0], grid, 2)


def reference_cdfs(marginal: np.ndarray, pairs: np.ndarray, grid: Grid) -> Tuple[CdfField, CdfField]:
    """Monte Carlo F0_N and G0_N from the reference samples"""
    return ecdf1(marginal, grid), ecdf2_rows(pairs, grid)


def analytic_f0(gold: GoldLaw, grid: Grid) -> CdfField:
    """Exact Gaussian marginal F0 (optional alternative to the Monte Carlo F0_N)"""
    return CdfField(norm.cdf(grid.nodes_x, loc=gold.mu0, scale=gold.sd0), grid, 1)


def gaussian_pdf1(mu: float, var: float, x):
    if not var > 0:
        raise InvalidVariance(f"variance must be positive, got {var}")
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * (x - mu) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


def gaussian_pdf2(mu: float, var: float, phi_corr: float, x, y):
    """Bivariate normal density with common mean/variance and correlation phi_corr"""
    if not var > 0:
        raise InvalidVariance(f"variance must be positive, got {var}")
    if not abs(phi_corr) < 1.0:
        raise InvalidVariance(f"|correlation| must be < 1, got {phi_corr}")
    u = (np.asarray(x, dtype=float) - mu) / math.sqrt(var)
    w = (np.asarray(y, dtype=float) - mu) / math.sqrt(var)
    one_minus = 1.0 - phi_corr ** 2
    quad = (u * u - 2.0 * phi_corr * u * w + w * w) / one_minus
    return np.exp(-0.5 * quad) / (2.0 * math.pi * var * math.sqrt(one_minus))


def export_field_csv(values: np.ndarray, grid: Grid, path: str):
    """Write a sampled field: header row of nodes, 2-D fields as G x G matrices"""
    values = np.asarray(values)
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        if values.ndim == 1:
            frame = pd.DataFrame([values], columns=grid.nodes_x)
            frame.to_csv(path, index=False, float_format="%.10g")
        else:
            frame = pd.DataFrame(values, index=grid.nodes_x, columns=grid.nodes_y)
            frame.to_csv(path, index=True, float_format="%.10g")
    except OSError as e:
        raise IoFailure(f"Could not write field to {path}: {e}") from e
