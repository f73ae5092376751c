"""
Seeded generation of the poisoned observation process
Latent chain X, gold-standard AR(1) path Y0, i.i.d. Gaussian poisoning Y1,
the observed mixture Z and the reference samples used for F0 / G0
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
from scipy.signal import lfilter
from scipy.stats import norm

from config import REFERENCE_FACTOR
from utils.errors import InvalidParameter
from utils.rng import named_streams
from .model_core import ThetaParam, mix_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoldLaw:
    """Stationary law of the gold-standard AR(1): marginal N(mu0, var0), lag-1 correlation phi"""
    mu0: float
    var0: float
    phi: float

    @property
    def sd0(self) -> float:
        return math.sqrt(self.var0)


@dataclass(frozen=True)
class Scenario:
    """Full generative configuration"""
    theta: ThetaParam
    phi: float
    m0: float
    v0: float
    m: float
    v: float
    n: int
    ref_size: int
    seed: int
    name: str = "custom"

    def __post_init__(self):
        if not 0.0 < self.phi < 1.0:
            raise InvalidParameter(f"phi must lie in (0, 1), got {self.phi}")
        if self.v0 <= 0 or self.v <= 0:
            raise InvalidParameter(f"noise std v0={self.v0} and poisoning std v={self.v} must be positive")
        if self.n < 2 or self.ref_size < 2:
            raise InvalidParameter(f"n={self.n} and ref_size={self.ref_size} must be >= 2")

    @property
    def mu0(self) -> float:
        return self.m0 / (1.0 - self.phi)

    @property
    def var0(self) -> float:
        return self.v0 ** 2 / (1.0 - self.phi ** 2)

    @property
    def gold(self) -> GoldLaw:
        return GoldLaw(mu0=self.mu0, var0=self.var0, phi=self.phi)

    def with_size(self, n: int, seed: int = None) -> "Scenario":
        """Same scenario at trajectory length n, keeping the N = 2n reference convention"""
        return replace(self, n=n, ref_size=REFERENCE_FACTOR * n,
                       seed=self.seed if seed is None else seed)


@dataclass(frozen=True)
class Trajectory:
    """Observed series z with the hidden labels x kept for evaluation only"""
    z: np.ndarray
    x: np.ndarray
    scenario: Scenario


def simulate_chain(theta: ThetaParam, n: int, stream: np.random.Generator) -> np.ndarray:
    """
    Two-state chain started from its stationary law

    Built from alternating geometric sojourn times, which is exact for a
    two-state chain: the stay in state 0 lasts Geom(alpha), in state 1 Geom(beta).
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    weights = mix_weights(theta)
    start = int(stream.random() < weights.r)
    leave = (theta.alpha, theta.beta)

    labels = np.empty(n, dtype=np.int8)
    filled, state = 0, start
    while filled < n:
        # batch of sojourns, alternating states
        batch = max(16, int(2 * (n - filled) * min(leave)) + 16)
        first = stream.geometric(leave[state], size=batch)
        second = stream.geometric(leave[1 - state], size=batch)
        runs = np.empty(2 * batch, dtype=np.int64)
        runs[0::2], runs[1::2] = first, second
        states = np.tile(np.array([state, 1 - state], dtype=np.int8), batch)
        block = np.repeat(states, runs)
        take = min(n - filled, block.size)
        labels[filled:filled + take] = block[:take]
        filled += take
        # every batch ends on a (1 - state) run, so the next one starts in state again
    return labels


def simulate_ar1(phi: float, m0: float, v0: float, n: int, stream: np.random.Generator) -> np.ndarray:
    """Y_{k+1} = phi * Y_k + eps_k, eps ~ N(m0, v0^2), Y_1 ~ N(mu0, var0)"""
    mu0 = m0 / (1.0 - phi)
    sd0 = v0 / math.sqrt(1.0 - phi ** 2)
    drive = np.empty(n)
    drive[0] = stream.normal(mu0, sd0)
    drive[1:] = stream.normal(m0, v0, size=n - 1)
    return lfilter([1.0], [1.0, -phi], drive)


def simulate_observed(scenario: Scenario) -> Trajectory:
    streams = named_streams(scenario.seed)
    x = simulate_chain(scenario.theta, scenario.n, streams["chain"])
    gold = simulate_ar1(scenario.phi, scenario.m0, scenario.v0, scenario.n, streams["gold"])
    poison = streams["poison"].normal(scenario.m, scenario.v, size=scenario.n)
    z = np.where(x == 1, poison, gold)
    logger.debug(f"Simulated {scenario.name}: n={scenario.n}, poisoned fraction={x.mean():.3f}")
    return Trajectory(z=z, x=x, scenario=scenario)


def simulate_reference(scenario: Scenario) -> Tuple[np.ndarray, np.ndarray]:
    """
    Independent reference samples for the gold standard

    Returns the marginal sample Y0[i] ~ N(mu0, var0) of size N and an (N, 2)
    array of i.i.d. pairs (Y0_1[i], phi * Y0_1[i] + eps[i]).
    """
    stream = named_streams(scenario.seed)["reference"]
    size = scenario.ref_size
    mu0, sd0 = scenario.mu0, math.sqrt(scenario.var0)
    marginal = stream.normal(mu0, sd0, size=size)
    first = stream.normal(mu0, sd0, size=size)
    second = scenario.phi * first + stream.normal(scenario.m0, scenario.v0, size=size)
    return marginal, np.column_stack([first, second])


def true_f1_cdf(scenario: Scenario, x: np.ndarray) -> np.ndarray:
    return norm.cdf(np.asarray(x, dtype=float), loc=scenario.m, scale=scenario.v)


def true_f1_pdf(scenario: Scenario, x: np.ndarray) -> np.ndarray:
    return norm.pdf(np.asarray(x, dtype=float), loc=scenario.m, scale=scenario.v)


def true_mixture_cdf(scenario: Scenario, x: np.ndarray) -> np.ndarray:
    """F = p F0 + r F1 with exact Gaussian components"""
    weights = mix_weights(scenario.theta)
    x = np.asarray(x, dtype=float)
    f0 = norm.cdf(x, loc=scenario.mu0, scale=math.sqrt(scenario.var0))
    return weights.p * f0 + weights.r * true_f1_cdf(scenario, x)
