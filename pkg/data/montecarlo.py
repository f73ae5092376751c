"""
Monte Carlo harness
Repeats simulate -> estimate over sub-seeded repetitions, in parallel through joblib,
and reduces the per-repetition records deterministically into bias / std /
covariance tables, rate summaries and curve panels
"""
import hashlib
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from config import (DEFAULT_REPETITIONS, DEFAULT_SEED, DELTA, GRID_SIZE, OUTPUT_DIR,
                    PANEL_CURVES, PANEL_NODES, WORKERS)
from modules.integral_contrast import minimize_d
from modules.plug_in import plug_in_cdf, sup_error
from modules.sup_contrast import minimize_s
from utils.errors import GoldPoisonError, InvalidParameter, IoFailure, NumericalFailure
from utils.numerics import stable_cov2, stable_mean, stable_std
from utils.rng import derive_seed
from .contrast import population_grid, t_fields
from .empirical import Grid, ecdf1, ecdf2_pairs, reference_cdfs
from .scenarios import load_scenario
from .simulate import Scenario, simulate_observed, simulate_reference, true_f1_cdf, true_mixture_cdf

logger = logging.getLogger(__name__)

VALID_METHODS = ("d", "s")
MIN_N = 100
# raised by numpy / scipy internals; recorded per repetition as NumericalFailure
NUMERIC_ERRORS = (np.linalg.LinAlgError, ValueError, FloatingPointError, ZeroDivisionError)


@dataclass
class ExperimentConfig:
    """Declarative description of one Monte Carlo study"""
    scenario: str
    n_values: List[int]
    repetitions: int = DEFAULT_REPETITIONS
    methods: List[str] = field(default_factory=lambda: ["d"])
    outputs: str = OUTPUT_DIR
    workers: int = WORKERS
    master_seed: int = DEFAULT_SEED
    grid_size: int = GRID_SIZE
    clamp_f1: bool = False
    delta: float = DELTA

    def __post_init__(self):
        self.n_values = [int(n) for n in self.n_values]
        self.methods = [str(m) for m in self.methods]
        if self.repetitions < 1:
            raise InvalidParameter(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.n_values:
            raise InvalidParameter("n_values must not be empty")
        if min(self.n_values) < MIN_N:
            raise InvalidParameter(f"every n must be >= {MIN_N}, got {self.n_values}")
        unknown = [m for m in self.methods if m not in VALID_METHODS]
        if not self.methods or unknown:
            raise InvalidParameter(f"methods must be a non-empty subset of {VALID_METHODS}, got {self.methods}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ExperimentConfig":
        known = {k: v for k, v in payload.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r") as f:
                payload = json.load(f)
        except (OSError, ValueError) as e:
            raise IoFailure(f"Could not read experiment config {path}: {e}") from e
        return cls.from_dict(payload)


def config_hash(config: ExperimentConfig) -> str:
    """sha256 of the canonical JSON form; outputs and workers do not change results and are left out"""
    payload = {k: v for k, v in config.to_dict().items() if k not in ("outputs", "workers")}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


@dataclass
class McCell:
    """Aggregates for one (method, n)"""
    method: str
    n: int
    estimates: np.ndarray                   # (repetitions, 2), NaN rows for failures
    bias: np.ndarray
    std: np.ndarray
    covariance: np.ndarray
    boundary_hits: int
    failures: int
    errors: List[str]
    rate_median: float
    rate_mean: float
    f1_error_median: float
    f1_error_mean: float
    f1_panel: np.ndarray                    # (<= PANEL_CURVES, PANEL_NODES)

    @property
    def successes(self) -> int:
        return self.estimates.shape[0] - self.failures


@dataclass
class McReport:
    scenario: Scenario
    config: ExperimentConfig
    cells: Dict[Tuple[str, int], McCell]
    panel_nodes: np.ndarray
    ecdf_panels: Dict[int, np.ndarray]
    seeds: Dict[int, List[int]]
    timings: Dict[int, float]
    elapsed: float

    def cell(self, method: str, n: int) -> McCell:
        return self.cells[(method, n)]

    @property
    def truth(self) -> np.ndarray:
        return self.scenario.theta.as_array()


def run_repetition(scenario: Scenario, n: int, index: int, master_seed: int, methods: List[str],
                   grid_size: int, delta: float, clamp_f1: bool, panel_nodes: np.ndarray) -> Dict[str, Any]:
    """
    One isolated repetition: own sub-seed, own trajectory and reference samples

    Never raises for library or numpy / scipy errors; failures are returned as records.
    """
    seed = derive_seed(master_seed, n, index)
    record: Dict[str, Any] = {"index": index, "seed": seed, "methods": {}}
    try:
        instance = scenario.with_size(n, seed)
        trajectory = simulate_observed(instance)
        marginal, pairs = simulate_reference(instance)

        grid = Grid.from_sample(trajectory.z, grid_size)
        f0, g0 = reference_cdfs(marginal, pairs, grid)
        fhat = ecdf1(trajectory.z, grid)
        fields = t_fields(fhat, ecdf2_pairs(trajectory.z, grid), f0, g0)

        panel_grid = Grid(panel_nodes, panel_nodes, float(panel_nodes[0]), float(panel_nodes[-1]))
        panel_fhat = ecdf1(trajectory.z, panel_grid)
        panel_f0 = ecdf1(marginal, panel_grid)
        record["ecdf_curve"] = panel_fhat.values.copy()
    except (GoldPoisonError, *NUMERIC_ERRORS) as e:
        failure = e if isinstance(e, GoldPoisonError) else NumericalFailure(f"{type(e).__name__}: {e}")
        logger.error(f"Repetition {index} (n={n}) failed before estimation: {failure}")
        for method in methods:
            record["methods"][method] = {"status": "failed", "error": str(failure)}
        return record

    f1_truth = true_f1_cdf(scenario, grid.nodes_x)
    for method in methods:
        try:
            if method == "d":
                theta, _, _ = minimize_d(fields, delta)
            else:
                theta = minimize_s(fields, delta)
            curve = plug_in_cdf(theta, fhat, f0, clamp_f1)
            record["methods"][method] = {
                "status": "success",
                "estimate": [theta.alpha, theta.beta],
                "boundary": theta.on_boundary(),
                "f1_error": sup_error(curve, f1_truth),
                "f1_panel": plug_in_cdf(theta, panel_fhat, panel_f0, clamp_f1).values,
            }
        except (GoldPoisonError, *NUMERIC_ERRORS) as e:
            failure = e if isinstance(e, GoldPoisonError) else NumericalFailure(f"{type(e).__name__}: {e}")
            logger.error(f"Repetition {index} (n={n}, method {method}) failed: {failure}")
            record["methods"][method] = {"status": "failed", "error": str(failure)}
    return record


def _aggregate(method: str, n: int, records: List[Dict[str, Any]], truth: np.ndarray) -> McCell:
    estimates = np.full((len(records), 2), np.nan)
    f1_errors, errors, panel = [], [], []
    boundary_hits = 0
    for row, record in enumerate(records):
        entry = record["methods"][method]
        if entry["status"] != "success":
            errors.append(entry["error"])
            continue
        estimates[row] = entry["estimate"]
        boundary_hits += int(entry["boundary"])
        f1_errors.append(entry["f1_error"])
        if len(panel) < PANEL_CURVES:
            panel.append(entry["f1_panel"])

    ok = estimates[~np.isnan(estimates[:, 0])]
    if ok.shape[0]:
        means = np.array([stable_mean(ok[:, 0]), stable_mean(ok[:, 1])])
        bias = means - truth
        std = np.array([stable_std(ok[:, 0]), stable_std(ok[:, 1])])
        covariance = stable_cov2(math.sqrt(n) * (ok - means))
        rates = math.sqrt(n) * np.linalg.norm(ok - truth, axis=1)
        rate_median, rate_mean = float(np.median(rates)), stable_mean(rates)
    else:
        bias = std = np.full(2, np.nan)
        covariance = np.full((2, 2), np.nan)
        rate_median = rate_mean = float("nan")

    return McCell(
        method=method,
        n=n,
        estimates=estimates,
        bias=bias,
        std=std,
        covariance=covariance,
        boundary_hits=boundary_hits,
        failures=len(errors),
        errors=errors,
        rate_median=rate_median,
        rate_mean=rate_mean,
        f1_error_median=float(np.median(f1_errors)) if f1_errors else float("nan"),
        f1_error_mean=stable_mean(f1_errors),
        f1_panel=np.array(panel) if panel else np.empty((0, 0)),
    )


def run_montecarlo(config: ExperimentConfig, scenario: Optional[Scenario] = None) -> McReport:
    """
    Run every (n, repetition) of the study and aggregate per (method, n)

    Args:
        config: validated experiment configuration
        scenario: explicit scenario; resolved from config.scenario when None

    Returns:
        McReport
    """
    if scenario is None:
        scenario = load_scenario(config.scenario, seed=config.master_seed)
    started = time.perf_counter()
    panel_nodes = population_grid(scenario, PANEL_NODES).nodes_x
    truth = scenario.theta.as_array()
    seeds = {n: [derive_seed(config.master_seed, n, i) for i in range(config.repetitions)]
             for n in config.n_values}

    cells: Dict[Tuple[str, int], McCell] = {}
    ecdf_panels: Dict[int, np.ndarray] = {}
    timings: Dict[int, float] = {}
    for n in config.n_values:
        logger.info(f"{scenario.name}: n={n}, {config.repetitions} repetitions, "
                    f"methods={config.methods}, workers={config.workers}")
        level_start = time.perf_counter()
        records = Parallel(n_jobs=config.workers)(
            delayed(run_repetition)(scenario, n, i, config.master_seed, config.methods,
                                    config.grid_size, config.delta, config.clamp_f1, panel_nodes)
            for i in range(config.repetitions)
        )
        timings[n] = time.perf_counter() - level_start

        for method in config.methods:
            cell = _aggregate(method, n, records, truth)
            cells[(method, n)] = cell
            logger.info(f"{scenario.name} n={n} [{method}]: bias={np.round(cell.bias, 4)}, "
                        f"std={np.round(cell.std, 4)}, failures={cell.failures}, "
                        f"boundary hits={cell.boundary_hits}")
        curves = [r["ecdf_curve"] for r in records if "ecdf_curve" in r][:PANEL_CURVES]
        ecdf_panels[n] = np.array(curves) if curves else np.empty((0, panel_nodes.size))

    return McReport(
        scenario=scenario,
        config=config,
        cells=cells,
        panel_nodes=panel_nodes,
        ecdf_panels=ecdf_panels,
        seeds=seeds,
        timings=timings,
        elapsed=time.perf_counter() - started,
    )


def panel_truth(report: McReport) -> Dict[str, np.ndarray]:
    """Exact F1 and mixture F on the panel nodes"""
    return {
        "f1": true_f1_cdf(report.scenario, report.panel_nodes),
        "mixture": true_mixture_cdf(report.scenario, report.panel_nodes),
    }
