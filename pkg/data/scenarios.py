"""
Scenario presets and JSON storage
"""
import json
import logging
import math
import os
from typing import Any, Dict, Optional

from config import DEFAULT_SEED, DELTA, GOLD_NOISE, REFERENCE_FACTOR, SCENARIO_PRESETS
from utils.errors import InvalidParameter, IoFailure
from .model_core import ThetaParam
from .simulate import Scenario

logger = logging.getLogger(__name__)

PRESET_NAMES = [entry["name"] for entry in SCENARIO_PRESETS]


def preset(name: str, n: int = 5000, seed: int = DEFAULT_SEED, delta: float = DELTA) -> Scenario:
    """Build a named built-in scenario at trajectory length n (N = 2n)"""
    entry = next((p for p in SCENARIO_PRESETS if p["name"].lower() == name.lower()), None)
    if entry is None:
        raise InvalidParameter(f"Unknown scenario preset '{name}', expected one of {PRESET_NAMES}")

    phi = entry["phi"]
    m0, v0 = GOLD_NOISE["m0"], GOLD_NOISE["v0"]
    mu0 = m0 / (1.0 - phi)
    sd0 = v0 / math.sqrt(1.0 - phi ** 2)
    return Scenario(
        theta=ThetaParam(entry["alpha"], entry["beta"], delta),
        phi=phi,
        m0=m0,
        v0=v0,
        m=entry["m_factor"] * mu0,
        v=entry["v_factor"] * sd0,
        n=n,
        ref_size=REFERENCE_FACTOR * n,
        seed=seed,
        name=entry["name"],
    )


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    return {
        "name": scenario.name,
        "theta": {"alpha": scenario.theta.alpha, "beta": scenario.theta.beta, "delta": scenario.theta.delta},
        "phi": scenario.phi,
        "m0": scenario.m0,
        "v0": scenario.v0,
        "m": scenario.m,
        "v": scenario.v,
        "n": scenario.n,
        "ref_size": scenario.ref_size,
        "seed": scenario.seed,
    }


def scenario_from_dict(payload: Dict[str, Any]) -> Scenario:
    theta = payload["theta"]
    return Scenario(
        theta=ThetaParam(float(theta["alpha"]), float(theta["beta"]), float(theta.get("delta", DELTA))),
        phi=float(payload["phi"]),
        m0=float(payload["m0"]),
        v0=float(payload["v0"]),
        m=float(payload["m"]),
        v=float(payload["v"]),
        n=int(payload["n"]),
        ref_size=int(payload["ref_size"]),
        seed=int(payload["seed"]),
        name=str(payload.get("name", "custom")),
    )


def save_scenario(scenario: Scenario, path: str):
    """Save scenario to a JSON file"""
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            json.dump(scenario_to_dict(scenario), f, indent=2, sort_keys=True)
        logger.info(f"Saved scenario {scenario.name} to {path}")
    except OSError as e:
        raise IoFailure(f"Could not write scenario to {path}: {e}") from e


def load_scenario(name_or_path: str, n: Optional[int] = None, seed: Optional[int] = None) -> Scenario:
    """
    Resolve a `--scenario` argument

    Args:
        name_or_path: preset name (S0strong, ...) or path to a JSON scenario file
        n: optional trajectory length override (keeps N = 2n)
        seed: optional seed override

    Returns:
        Scenario
    """
    if os.path.exists(name_or_path):
        try:
            with open(name_or_path, "r") as f:
                scenario = scenario_from_dict(json.load(f))
        except (OSError, ValueError, KeyError) as e:
            raise IoFailure(f"Could not read scenario file {name_or_path}: {e}") from e
        if n is not None or seed is not None:
            scenario = scenario.with_size(n if n is not None else scenario.n, seed)
        return scenario

    return preset(name_or_path,
                  n=n if n is not None else 5000,
                  seed=seed if seed is not None else DEFAULT_SEED)
