"""
Exporters for Monte Carlo reports
Deterministic CSV tables, sqrt(n)-centered estimate samples, curve panels
and the JSON run manifest
"""
import json
import logging
import math
import os
import platform
from datetime import datetime
from typing import Dict, List

import joblib
import numpy as np
import pandas as pd
import scipy

from utils.errors import IoFailure
from utils.numerics import stable_mean
from .montecarlo import ExperimentConfig, McReport, config_hash, panel_truth
from .scenarios import scenario_to_dict

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def _write_csv(frame: pd.DataFrame, path: str) -> str:
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise IoFailure(f"Could not write {path}: {e}") from e
    return path


def export_tables(report: McReport, out_dir: str) -> List[str]:
    """One bias/std table per method with a row per n"""
    paths = []
    name = report.scenario.name
    for method in report.config.methods:
        rows = []
        for n in report.config.n_values:
            cell = report.cell(method, n)
            rows.append({
                "n": n,
                "bias_alpha": cell.bias[0],
                "std_alpha": cell.std[0],
                "bias_beta": cell.bias[1],
                "std_beta": cell.std[1],
                "cov_alpha_alpha": cell.covariance[0, 0],
                "cov_alpha_beta": cell.covariance[0, 1],
                "cov_beta_beta": cell.covariance[1, 1],
                "repetitions": cell.estimates.shape[0],
                "failures": cell.failures,
                "boundary_hits": cell.boundary_hits,
                "rate_median": cell.rate_median,
                "f1_error_median": cell.f1_error_median,
            })
        path = os.path.join(out_dir, f"table_{name}_{method}.csv")
        paths.append(_write_csv(pd.DataFrame(rows), path))
    logger.info(f"Wrote {len(paths)} tables to {out_dir}")
    return paths


def export_histogram_samples(report: McReport, out_dir: str) -> List[str]:
    """Raw and sqrt(n)-centered estimates, one row per repetition (NaN for failures)"""
    paths = []
    name = report.scenario.name
    for (method, n), cell in sorted(report.cells.items()):
        est = cell.estimates
        ok = est[~np.isnan(est[:, 0])]
        center = np.array([stable_mean(ok[:, 0]), stable_mean(ok[:, 1])])
        scaled = math.sqrt(n) * (est - center)
        frame = pd.DataFrame({
            "repetition": np.arange(est.shape[0]),
            "seed": [str(s) for s in report.seeds[n]],
            "alpha": est[:, 0],
            "beta": est[:, 1],
            "sqrt_n_alpha": scaled[:, 0],
            "sqrt_n_beta": scaled[:, 1],
        })
        path = os.path.join(out_dir, f"samples_{name}_{method}_n{n}.csv")
        paths.append(_write_csv(frame, path))
    return paths


def export_curves(report: McReport, out_dir: str) -> List[str]:
    """Plug-in F1 panels per (method, n) and observed ECDF panels per n, with the true curves"""
    paths = []
    name = report.scenario.name
    truth = panel_truth(report)

    def panel_frame(curves: np.ndarray, true_curve: np.ndarray) -> pd.DataFrame:
        columns: Dict[str, np.ndarray] = {"x": report.panel_nodes, "true": true_curve}
        for k, curve in enumerate(curves):
            columns[f"curve_{k}"] = curve
        return pd.DataFrame(columns)

    for (method, n), cell in sorted(report.cells.items()):
        path = os.path.join(out_dir, f"curves_f1_{name}_{method}_n{n}.csv")
        paths.append(_write_csv(panel_frame(cell.f1_panel, truth["f1"]), path))
    for n, curves in sorted(report.ecdf_panels.items()):
        path = os.path.join(out_dir, f"curves_ecdf_{name}_n{n}.csv")
        paths.append(_write_csv(panel_frame(curves, truth["mixture"]), path))
    return paths


def write_manifest(report: McReport, config: ExperimentConfig, path: str) -> str:
    """JSON provenance: config and its hash, scenario, seeds, package versions, timings"""
    manifest = {
        "config": config.to_dict(),
        "config_hash": config_hash(config),
        "scenario": scenario_to_dict(report.scenario),
        "seeds": {str(n): [str(s) for s in seeds] for n, seeds in sorted(report.seeds.items())},
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
            "joblib": joblib.__version__,
        },
        "timings": {str(n): t for n, t in report.timings.items()},
        "elapsed": report.elapsed,
        "failures": {f"{m}_n{n}": c.failures for (m, n), c in sorted(report.cells.items())},
        "created": datetime.now().isoformat(),
        "note": "repetition counts are desk-scale (100 for tables, 500 for covariance studies)",
    }
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
    except OSError as e:
        raise IoFailure(f"Could not write manifest to {path}: {e}") from e
    return path


def export_report(report: McReport, out_dir: str) -> Dict[str, List[str]]:
    """All CSV outputs plus the manifest"""
    return {
        "tables": export_tables(report, out_dir),
        "samples": export_histogram_samples(report, out_dir),
        "curves": export_curves(report, out_dir),
        "manifest": [write_manifest(report, report.config, os.path.join(out_dir, "manifest.json"))],
    }
