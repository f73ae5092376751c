"""
Pair Decoding Module
Posterior probabilities of the hidden label pattern (X_k, X_k+1) given an observed
pair (z, z'), from estimated transition parameters and an inverted poisoning density
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from data.empirical import gaussian_pdf1, gaussian_pdf2
from data.model_core import ThetaParam, mix_weights
from data.simulate import GoldLaw
from modules.base_module import BaseModule
from modules.plug_in import SampledCurve
from utils.errors import AllZeroMass, InvalidParameter, SeriesTooShort

logger = logging.getLogger(__name__)

PATTERNS = ("00", "01", "10", "11")
UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class PairPosterior:
    """probs ordered as (0,0), (0,1), (1,0), (1,1)"""
    probs: Tuple[float, float, float, float]
    map_label: Tuple[int, int]


def _pattern_masses(theta: ThetaParam, f1: SampledCurve, gold: GoldLaw, z, zprime) -> np.ndarray:
    """Unnormalized eta for every pattern; shape (..., 4)"""
    w = mix_weights(theta)
    z = np.asarray(z, dtype=float)
    zprime = np.asarray(zprime, dtype=float)
    f0_z = gaussian_pdf1(gold.mu0, gold.var0, z)
    f0_zp = gaussian_pdf1(gold.mu0, gold.var0, zprime)
    # raw kernel inversion can dip below zero
    f1_z = np.maximum(f1.at(z), 0.0)
    f1_zp = np.maximum(f1.at(zprime), 0.0)
    g0 = gaussian_pdf2(gold.mu0, gold.var0, gold.phi, z, zprime)
    return np.stack([
        w.lambda1 * g0,
        w.lambda2 * f0_z * f1_zp,
        w.lambda3 * f1_z * f0_zp,
        w.lambda4 * f1_z * f1_zp,
    ], axis=-1)


class DecodingModule(BaseModule):
    """Posterior decoding of non-overlapping observation pairs"""

    def __init__(self):
        super().__init__(
            module_id="decode",
            name="Pair decoding",
            description="Posterior label patterns of observed pairs"
        )

    def run(self, theta: ThetaParam, f1: SampledCurve, gold: GoldLaw,
            z: np.ndarray, offset: int = 0) -> pd.DataFrame:
        z = np.asarray(z, dtype=float).ravel()
        if offset not in (0, 1):
            raise InvalidParameter(f"pairing offset must be 0 or 1, got {offset}")
        starts = np.arange(offset, z.size - 1, 2)
        if starts.size == 0:
            raise SeriesTooShort(f"no complete pair in a series of length {z.size} at offset {offset}")

        masses = _pattern_masses(theta, f1, gold, z[starts], z[starts + 1])
        totals = masses.sum(axis=1)
        decidable = totals > 0
        probs = np.full_like(masses, np.nan)
        probs[decidable] = masses[decidable] / totals[decidable, None]
        labels = np.where(decidable, np.array(PATTERNS)[np.argmax(np.nan_to_num(probs, nan=-1.0), axis=1)],
                          UNDECIDABLE)

        undecidable = int((~decidable).sum())
        if undecidable:
            logger.warning(f"{undecidable} of {starts.size} pairs carry no mass under any pattern")

        frame = pd.DataFrame({
            "pair": np.arange(starts.size),
            "index": starts,
            "z": z[starts],
            "z_next": z[starts + 1],
            "p00": probs[:, 0],
            "p01": probs[:, 1],
            "p10": probs[:, 2],
            "p11": probs[:, 3],
            "map_label": labels,
        })
        return self._record(frame)


# Create module instance
decoding_module = DecodingModule()


def pair_posterior(theta: ThetaParam, f1: SampledCurve, gold: GoldLaw, z: float, zprime: float) -> PairPosterior:
    masses = _pattern_masses(theta, f1, gold, float(z), float(zprime))
    total = float(masses.sum())
    if not total > 0:
        raise AllZeroMass(f"pair ({z}, {zprime}) has zero density under every label pattern")
    probs = masses / total
    k = int(np.argmax(probs))
    return PairPosterior(probs=tuple(float(p) for p in probs), map_label=(k // 2, k % 2))


def decode_pairs(theta: ThetaParam, f1: SampledCurve, gold: GoldLaw,
                 z: np.ndarray, offset: int = 0) -> pd.DataFrame:
    return decoding_module.run(theta, f1, gold, z, offset)


def true_patterns(x: np.ndarray, frame: pd.DataFrame) -> np.ndarray:
    """Hidden label pattern of every decoded pair as '00' .. '11'"""
    x = np.asarray(x).astype(int)
    idx = frame["index"].to_numpy()
    return np.char.add(x[idx].astype(str), x[idx + 1].astype(str))


def map_accuracy(frame: pd.DataFrame, x: np.ndarray) -> float:
    """Share of decidable pairs whose MAP pattern matches the hidden labels"""
    decided = frame[frame["map_label"] != UNDECIDABLE]
    if decided.empty:
        return float("nan")
    return float(np.mean(decided["map_label"].to_numpy() == true_patterns(x, decided)))


def modal_pattern_accuracy(theta: ThetaParam, frame: pd.DataFrame, x: np.ndarray) -> float:
    """Accuracy of always guessing the most likely stationary pair pattern"""
    modal = PATTERNS[int(np.argmax(mix_weights(theta).lambdas))]
    return float(np.mean(true_patterns(x, frame) == modal))
