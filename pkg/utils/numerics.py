"""
Small numeric helpers shared by the estimators and the Monte Carlo harness
"""
import math
from typing import Iterable, Sequence

import numpy as np


def stable_mean(values: Iterable[float]) -> float:
    """Mean with compensated summation, independent of input order"""
    values = [float(v) for v in values]
    if not values:
        return float("nan")
    return math.fsum(values) / len(values)


def stable_std(values: Sequence[float]) -> float:
    """Sample standard deviation (ddof=1); 0.0 for a single value"""
    values = [float(v) for v in values]
    if len(values) < 2:
        return 0.0
    mean = stable_mean(values)
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1))


def stable_cov2(samples: np.ndarray) -> np.ndarray:
    """2x2 sample covariance (ddof=1) of an (m, 2) array using fsum"""
    samples = np.asarray(samples, dtype=float)
    cov = np.zeros((2, 2))
    if samples.shape[0] < 2:
        return cov
    centered = samples - np.array([stable_mean(samples[:, 0]), stable_mean(samples[:, 1])])
    for i in range(2):
        for j in range(i, 2):
            value = math.fsum(centered[:, i] * centered[:, j]) / (samples.shape[0] - 1)
            cov[i, j] = cov[j, i] = value
    return cov


def reflect_into_box(x: np.ndarray, lower: float, upper: float) -> np.ndarray:
    """Fold coordinates back into [lower, upper] by mirror reflection at the walls"""
    width = upper - lower
    shifted = np.mod(np.asarray(x, dtype=float) - lower, 2.0 * width)
    return lower + np.where(shifted > width, 2.0 * width - shifted, shifted)

