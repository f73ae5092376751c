#!/usr/bin/env python3
"""
Gold Standard Poisoning Command Line
estimate  - simulate one scenario and estimate (alpha, beta), F1 and f1
decode    - posterior label patterns of observed pairs from a saved estimate
montecarlo - repeated-simulation study with tables, samples, curves and manifest
"""
import argparse
import json
import logging
import os
import sys
from datetime import datetime

import numpy as np
import pandas as pd

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import DEFAULT_SEED, GRID_SIZE, LOG_DIR, LOG_LEVEL, OUTPUT_DIR, WORKERS
from data.empirical import Grid, ecdf2_pairs, export_field_csv
from data.exporters import export_report
from data.montecarlo import ExperimentConfig, run_montecarlo
from data.scenarios import load_scenario
from data.simulate import simulate_observed
from modules.decoding import decode_pairs
from modules.estimation import EstimationReport, estimate_trajectory
from utils.errors import GoldPoisonError, IoFailure

logger = logging.getLogger(__name__)


def setup_logging(command: str):
    """File handler under the log directory plus console output"""
    os.makedirs(LOG_DIR, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(LOG_DIR, f'goldpoison_{command}.log')),
            logging.StreamHandler()
        ]
    )


def run_estimate(args) -> dict:
    """Simulate one trajectory and write the JSON report, the F1 curve and the series"""
    results = {'command': 'estimate', 'start_time': datetime.now().isoformat()}
    try:
        scenario = load_scenario(args.scenario, n=args.n, seed=args.seed)
        trajectory = simulate_observed(scenario)
        report = estimate_trajectory(trajectory, method=args.method, clamp_f1=args.clamp_f1,
                                     grid_size=args.grid_size)

        os.makedirs(args.out, exist_ok=True)
        stem = f"estimate_{scenario.name}_n{scenario.n}"
        report_path = os.path.join(args.out, f"{stem}.json")
        report.save(report_path)
        curve = report.f1_curve
        pd.DataFrame({"x": curve.nodes, "f1_cdf": curve.values}).to_csv(
            os.path.join(args.out, f"{stem}_f1_cdf.csv"), index=False, float_format="%.10g")
        density = report.f1_density
        pd.DataFrame({"x": density.nodes, "f1_pdf": density.values}).to_csv(
            os.path.join(args.out, f"{stem}_f1_pdf.csv"), index=False, float_format="%.10g")
        pd.DataFrame({"z": trajectory.z, "x": trajectory.x}).to_csv(
            os.path.join(args.out, f"{stem}_trajectory.csv"), index=False, float_format="%.10g")
        if args.export_fields:
            grid = Grid.from_sample(trajectory.z, args.grid_size)
            export_field_csv(ecdf2_pairs(trajectory.z, grid).values, grid,
                             os.path.join(args.out, f"{stem}_ecdf2.csv"))

        results.update({
            'status': 'success',
            'report': report_path,
            'theta_hat': report.theta_hat and [report.theta_hat.alpha, report.theta_hat.beta],
            'theta_tilde': report.theta_tilde and [report.theta_tilde.alpha, report.theta_tilde.beta],
            'solver_path': report.solver_path,
            'truth': [scenario.theta.alpha, scenario.theta.beta],
        })
        logger.info(f"✅ Estimate written to {report_path}")
    except (GoldPoisonError, OSError) as e:
        results.update({'status': 'failed', 'error': str(e)})
        logger.error(f"❌ Estimation failed: {e}")
    return results


def run_decode(args) -> dict:
    """Decode the non-overlapping pairs of a trajectory CSV with a saved estimate"""
    results = {'command': 'decode', 'start_time': datetime.now().isoformat()}
    try:
        report = EstimationReport.load(args.report)
        try:
            series = pd.read_csv(args.trajectory)
        except (OSError, ValueError) as e:
            raise IoFailure(f"Could not read trajectory {args.trajectory}: {e}") from e
        z = series["z"].to_numpy(dtype=float) if "z" in series.columns else series.iloc[:, 0].to_numpy(dtype=float)

        frame = decode_pairs(report.primary, report.f1_density, report.gold, z, offset=args.offset)
        out_path = args.out or os.path.splitext(args.trajectory)[0] + "_decoded.csv"
        try:
            frame.to_csv(out_path, index=False, float_format="%.10g")
        except OSError as e:
            raise IoFailure(f"Could not write {out_path}: {e}") from e

        results.update({
            'status': 'success',
            'output': out_path,
            'pairs': len(frame),
            'undecidable': int((frame['map_label'] == 'undecidable').sum()),
            'label_counts': frame['map_label'].value_counts().to_dict(),
        })
        logger.info(f"✅ Decoded {len(frame)} pairs to {out_path}")
    except GoldPoisonError as e:
        results.update({'status': 'failed', 'error': str(e)})
        logger.error(f"❌ Decoding failed: {e}")
    return results


def run_study(args) -> dict:
    """Run a Monte Carlo config and export every artifact"""
    results = {'command': 'montecarlo', 'start_time': datetime.now().isoformat()}
    try:
        config = ExperimentConfig.from_file(args.config)
        if args.workers is not None:
            config.workers = args.workers
        out_dir = args.out or config.outputs
        config.outputs = out_dir

        report = run_montecarlo(config)
        paths = export_report(report, out_dir)

        results.update({
            'status': 'success',
            'scenario': report.scenario.name,
            'outputs': out_dir,
            'files': sum(len(v) for v in paths.values()),
            'cells': {
                f"{method}_n{n}": {
                    'bias': np.round(cell.bias, 4).tolist(),
                    'std': np.round(cell.std, 4).tolist(),
                    'failures': cell.failures,
                    'boundary_hits': cell.boundary_hits,
                }
                for (method, n), cell in sorted(report.cells.items())
            },
            'elapsed': report.elapsed,
        })
        logger.info(f"✅ Study complete in {report.elapsed:.1f}s, outputs in {out_dir}")
    except GoldPoisonError as e:
        results.update({'status': 'failed', 'error': str(e)})
        logger.error(f"❌ Study failed: {e}")
    return results


def print_summary(results: dict):
    """Human-readable summary of a command run"""
    print(f"\n📊 goldpoison {results['command']} - {results['start_time']}")
    print("=" * 50)
    if results['status'] != 'success':
        print(f"❌ Failed: {results['error']}")
        return

    if results['command'] == 'estimate':
        print(f"🎯 Truth:       {results['truth']}")
        if results['theta_hat']:
            print(f"📈 theta_hat:   {np.round(results['theta_hat'], 4).tolist()} ({results['solver_path']})")
        if results['theta_tilde']:
            print(f"📈 theta_tilde: {np.round(results['theta_tilde'], 4).tolist()}")
        print(f"💾 Report: {results['report']}")
    elif results['command'] == 'decode':
        print(f"🔎 Pairs: {results['pairs']} ({results['undecidable']} undecidable)")
        for label, count in sorted(results['label_counts'].items()):
            print(f"   {label}: {count}")
        print(f"💾 Output: {results['output']}")
    else:
        print(f"⏱️  Duration: {results['elapsed']:.1f} seconds")
        for key, cell in results['cells'].items():
            print(f"   {key}: bias={cell['bias']} std={cell['std']} "
                  f"failures={cell['failures']} boundary={cell['boundary_hits']}")
        print(f"💾 {results['files']} files in {results['outputs']}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Gold standard poisoning estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="simulate a scenario and estimate it")
    est.add_argument("--scenario", default="S0strong", help="preset name or scenario JSON file")
    est.add_argument("--n", type=int, default=None, help="trajectory length (preset default 5000, file keeps its own)")
    est.add_argument("--seed", type=int, default=None, help=f"scenario seed (preset default {DEFAULT_SEED})")
    est.add_argument("--method", choices=["d", "s", "both"], default="both")
    est.add_argument("--clamp-f1", action="store_true", help="clip F1 to [0, 1] and make it monotone")
    est.add_argument("--grid-size", type=int, default=GRID_SIZE)
    est.add_argument("--export-fields", action="store_true", help="also write the 2nd order ECDF field")
    est.add_argument("--out", default=OUTPUT_DIR)

    dec = sub.add_parser("decode", help="decode observed pairs with a saved estimate")
    dec.add_argument("--report", required=True, help="estimate JSON written by 'estimate'")
    dec.add_argument("--trajectory", required=True, help="CSV with a 'z' column")
    dec.add_argument("--offset", type=int, choices=[0, 1], default=0, help="pair (2i, 2i+1) or (2i+1, 2i+2)")
    dec.add_argument("--out", default=None)

    mc = sub.add_parser("montecarlo", help="run a Monte Carlo study from a JSON config")
    mc.add_argument("--config", required=True)
    mc.add_argument("--out", default=None)
    mc.add_argument("--workers", type=int, default=None, help=f"parallel workers (default {WORKERS})")
    return parser


def main(argv=None) -> int:
    """Main command line function"""
    args = build_parser().parse_args(argv)
    setup_logging(args.command)
    print("🚀 goldpoison")

    runners = {'estimate': run_estimate, 'decode': run_decode, 'montecarlo': run_study}
    results = runners[args.command](args)
    print_summary(results)

    os.makedirs(LOG_DIR, exist_ok=True)
    stamp = datetime.now().strftime('%Y%m%d_%H%M%S')
    with open(os.path.join(LOG_DIR, f"{args.command}_{stamp}.json"), 'w') as f:
        json.dump(results, f, indent=2, default=str)

    return 0 if results['status'] == 'success' else 1


if __name__ == "__main__":
    sys.exit(main())
