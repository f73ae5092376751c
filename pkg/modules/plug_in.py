"""
Plug-in Inversion Module
Recovers the poisoning CDF F1 = (F - p F0) / r from the observed ECDF and,
for densities, the same inversion applied to a Gaussian kernel estimate of f
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import gaussian_kde

from data.empirical import CdfField, gaussian_pdf1
from data.model_core import ThetaParam, mix_weights
from data.simulate import GoldLaw
from modules.base_module import BaseModule
from utils.errors import GridMismatch, InvalidBandwidth, InvalidVariance, SeriesTooShort

logger = logging.getLogger(__name__)

# evaluation nodes for densities when none are given
DENSITY_NODES = 512
DENSITY_PAD = 3.0


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """A real function sampled on sorted nodes; linear interpolation in between, 0 outside"""
    nodes: np.ndarray
    values: np.ndarray
    kind: str = "cdf"

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.array(self.nodes, dtype=float))
        object.__setattr__(self, "values", np.array(self.values, dtype=float))
        if self.nodes.shape != self.values.shape or self.nodes.ndim != 1:
            raise GridMismatch("curve nodes and values must be 1-D arrays of equal length")

    def at(self, x):
        return np.interp(np.asarray(x, dtype=float), self.nodes, self.values, left=0.0, right=0.0)

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "nodes": self.nodes.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, payload: Dict) -> "SampledCurve":
        return cls(np.asarray(payload["nodes"]), np.asarray(payload["values"]), payload.get("kind", "cdf"))


class PlugInModule(BaseModule):
    """Plug-in inversion of the marginal mixture identity"""

    def __init__(self):
        super().__init__(
            module_id="plug_in",
            name="Plug-in inversion",
            description="F1 and f1 recovered from the observed marginal and the gold standard"
        )

    def run(self, theta_hat: ThetaParam, fhat: CdfField, f0: CdfField, clamp: bool = False) -> SampledCurve:
        if not fhat.grid.same_as(f0.grid):
            raise GridMismatch("F_n and F0 must share one grid")
        w = mix_weights(theta_hat)
        values = (fhat.values - w.p * f0.values) / w.r
        if clamp:
            values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
        return self._record(SampledCurve(fhat.grid.nodes_x, values, "cdf"))


# Create module instance
plug_in_module = PlugInModule()


def plug_in_cdf(theta_hat: ThetaParam, fhat: CdfField, f0: CdfField, clamp: bool = False) -> SampledCurve:
    return plug_in_module.run(theta_hat, fhat, f0, clamp)


def mixture_kde(z: np.ndarray, bandwidth: Optional[float] = None) -> gaussian_kde:
    """
    Gaussian kernel density estimate of the observed marginal

    Args:
        z: observed series
        bandwidth: kernel standard deviation; Silverman's rule when None

    Returns:
        scipy gaussian_kde
    """
    z = np.asarray(z, dtype=float).ravel()
    if z.size < 2:
        raise SeriesTooShort(f"kernel density needs at least 2 observations, got {z.size}")
    spread = float(np.std(z, ddof=1))
    if not spread > 0:
        raise InvalidVariance("kernel density of a constant series")
    if bandwidth is None:
        return gaussian_kde(z, bw_method="silverman")
    if not bandwidth > 0:
        raise InvalidBandwidth(f"bandwidth must be positive, got {bandwidth}")
    # scipy scales the kernel by the sample std
    return gaussian_kde(z, bw_method=bandwidth / spread)


def kernel_density_f1(theta_hat: ThetaParam, z: np.ndarray, gold: GoldLaw,
                      bandwidth: Optional[float] = None, nodes: Optional[np.ndarray] = None) -> SampledCurve:
    """f1_n = (f_n - p f0) / r with f_n the kernel estimate and f0 the exact gold marginal"""
    kde = mixture_kde(z, bandwidth)
    if nodes is None:
        z = np.asarray(z, dtype=float)
        width = DENSITY_PAD * float(np.sqrt(kde.covariance[0, 0]))
        nodes = np.linspace(z.min() - width, z.max() + width, DENSITY_NODES)
    nodes = np.asarray(nodes, dtype=float)
    w = mix_weights(theta_hat)
    f0 = gaussian_pdf1(gold.mu0, gold.var0, nodes)
    values = (kde(nodes) - w.p * f0) / w.r
    return SampledCurve(nodes, values, "density")


def curve_mass(curve: SampledCurve) -> float:
    """Trapezoidal integral of a sampled density over its nodes"""
    return float(trapezoid(curve.values, curve.nodes))


def sup_error(curve: SampledCurve, true_values: np.ndarray) -> float:
    return float(np.max(np.abs(curve.values - np.asarray(true_values, dtype=float))))


def tail_errors(curve: SampledCurve, true_values: np.ndarray, split: float) -> Dict[str, float]:
    """Sup-error of an F1 estimate split at `split` into its left and right tails"""
    gap = np.abs(curve.values - np.asarray(true_values, dtype=float))
    left = curve.nodes < split
    return {
        "sup": float(gap.max()),
        "left": float(gap[left].max()) if left.any() else 0.0,
        "right": float(gap[~left].max()) if (~left).any() else 0.0,
    }
