#!/usr/bin/env python3
"""
Test the contrast estimators, the plug-in inversion and the one-shot estimation report
"""
import json
import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
from scipy.integrate import trapezoid

from data.contrast import ContrastQuadratic, population_fields, population_grid, s_n, t_fields
from data.empirical import CdfField, Grid, ecdf1, ecdf2_pairs, reference_cdfs
from data.model_core import ThetaParam, VParam, h_coordinates, h_map
from data.scenarios import PRESET_NAMES, preset
from data.simulate import simulate_observed, simulate_reference, true_f1_cdf
from modules.estimation import EstimationReport, estimate_trajectory
from modules.integral_contrast import CLOSED_FORM, FALLBACK_SEARCH, integral_contrast_module, minimize_d
from modules.plug_in import (curve_mass, kernel_density_f1, mixture_kde, plug_in_cdf, sup_error,
                             tail_errors)
from modules.sup_contrast import minimize_s, scan_grid
from utils.errors import InvalidBandwidth, InvalidParameter, SeriesTooShort, SingularGram

GRID = 32


def simulated_fields(name: str, n: int, seed: int):
    scenario = preset(name, n=n, seed=seed)
    trajectory = simulate_observed(scenario)
    grid = Grid.from_sample(trajectory.z, GRID)
    marginal, pairs = simulate_reference(scenario)
    f0, g0 = reference_cdfs(marginal, pairs, grid)
    fhat = ecdf1(trajectory.z, grid)
    return scenario, trajectory, fhat, f0, t_fields(fhat, ecdf2_pairs(trajectory.z, grid), f0, g0)


def population(name: str):
    scenario = preset(name, n=20_000, seed=4)
    f, g, f0, g0 = population_fields(scenario, population_grid(scenario, GRID))
    return scenario, f, f0, t_fields(f, g, f0, g0)


def test_minimize_d_on_population_fields():
    print("🧪 Testing integral contrast estimator on exact mixtures...")
    for name in PRESET_NAMES:
        scenario, _, _, fields = population(name)
        theta, v, diagnostics = minimize_d(fields)
        assert diagnostics.solver_path == CLOSED_FORM
        assert np.abs(theta.as_array() - scenario.theta.as_array()).max() < 0.01, name
        assert diagnostics.contrast_at_min < 1e-10
    print("✅ theta_hat recovers theta* for every preset")


def test_minimize_s_on_population_fields():
    print("🧪 Testing sup contrast estimator on exact mixtures...")
    for name in ("S0strong", "S1", "S4"):
        scenario, _, _, fields = population(name)
        theta = minimize_s(fields)
        assert np.abs(theta.as_array() - scenario.theta.as_array()).max() < 0.02, name
    print("✅ theta_tilde recovers theta*")


def test_minimize_d_beats_grid_search():
    """theta_hat is never worse than a 0.005-step exhaustive search of d_n over Theta"""
    axis = np.arange(0.05, 0.95 + 1e-9, 0.005)
    alpha, beta = np.meshgrid(axis, axis, indexing="ij")
    v1, v2 = h_coordinates(alpha.ravel(), beta.ravel())
    for k, name in enumerate(PRESET_NAMES):
        _, _, _, _, fields = simulated_fields(name, 2000, 30 + k)
        theta, v, diagnostics = minimize_d(fields)
        best = float(fields.quadratic.evaluate(v1, v2).min())
        assert diagnostics.contrast_at_min <= best + 1e-7, name
        assert diagnostics.contrast_at_min >= 0.0


def test_minimize_s_beats_coarse_scan():
    _, _, _, _, fields = simulated_fields("S0weak", 3000, 8)
    theta = minimize_s(fields)
    best = s_n(h_map(theta), fields)
    alpha, beta = scan_grid()
    for a, b in zip(alpha, beta):
        assert best <= s_n(h_map(ThetaParam(a, b)), fields) + 1e-12


def test_singular_gram_refused():
    _, trajectory, fhat, f0, _ = simulated_fields("S1", 1000, 9)
    independent = CdfField(np.outer(f0.values, f0.values), f0.grid, 2)
    degenerate = t_fields(fhat, ecdf2_pairs(trajectory.z, fhat.grid), f0, independent)
    try:
        minimize_d(degenerate)
        assert False, "expected SingularGram"
    except SingularGram:
        pass


def test_fallback_when_minimizer_leaves_theta():
    """A quadratic whose unconstrained minimizer is outside h(Theta) goes through the bounded search"""
    _, _, _, _, fields = simulated_fields("S2", 2000, 12)
    quad = fields.quadratic
    # shift the linear part so that the unconstrained minimizer is v = (2, 2), where g is undefined
    target = np.array([2.0, 2.0])
    shifted = -quad.gram @ target
    moved = ContrastQuadratic(quad.a11, quad.a12, quad.a22, shifted[0], shifted[1],
                              float(target @ quad.gram @ target))
    object.__setattr__(fields, "quadratic", moved)
    theta, v, diagnostics = integral_contrast_module.run(fields)
    assert diagnostics.solver_path == FALLBACK_SEARCH
    assert diagnostics.reason
    assert 0.05 <= theta.alpha <= 0.95 and 0.05 <= theta.beta <= 0.95
    assert diagnostics.starts == 9
    assert v == h_map(theta)


def test_plug_in_inverts_exact_mixture():
    scenario, f, f0, _ = population("S0strong")
    curve = plug_in_cdf(scenario.theta, f, f0)
    assert np.allclose(curve.values, true_f1_cdf(scenario, f.grid.nodes_x), atol=1e-12)


def test_plug_in_clamp_gives_a_cdf():
    _, _, fhat, f0, fields = simulated_fields("S1", 1000, 13)
    theta, _, _ = minimize_d(fields)
    raw = plug_in_cdf(theta, fhat, f0)
    clamped = plug_in_cdf(theta, fhat, f0, clamp=True)
    assert np.all(np.isfinite(raw.values))
    assert clamped.values.min() >= 0.0 and clamped.values.max() <= 1.0
    assert np.all(np.diff(clamped.values) >= 0.0)


def test_kernel_density():
    print("🧪 Testing inverted kernel density...")
    scenario, trajectory, _, _, _ = simulated_fields("S0strong", 5000, 14)
    z = trajectory.z
    kde = mixture_kde(z)
    h = float(np.sqrt(kde.covariance[0, 0]))
    nodes = np.linspace(z.min() - 6 * h, z.max() + 6 * h, 4000)
    assert abs(trapezoid(kde(nodes), nodes) - 1.0) < 1e-3

    curve = kernel_density_f1(scenario.theta, z, scenario.gold)
    assert curve.kind == "density"
    assert abs(curve_mass(curve) - 1.0) < 0.05

    explicit = mixture_kde(z, bandwidth=0.3)
    assert abs(np.sqrt(explicit.covariance[0, 0]) - 0.3) < 1e-12
    print("✅ Kernel mass and inverted mass close to 1")


def test_kernel_density_errors():
    gold = preset("S1").gold
    theta = ThetaParam(0.2, 0.4)
    for call, error in ((lambda: kernel_density_f1(theta, np.array([1.0]), gold), SeriesTooShort),
                        (lambda: kernel_density_f1(theta, np.arange(10.0), gold, bandwidth=0.0), InvalidBandwidth),
                        (lambda: kernel_density_f1(theta, np.arange(10.0), gold, bandwidth=-1.0), InvalidBandwidth)):
        try:
            call()
            assert False, f"expected {error.__name__}"
        except error:
            pass


def test_tail_errors():
    scenario, _, fhat, f0, fields = simulated_fields("S0strong", 5000, 15)
    theta, _, _ = minimize_d(fields)
    curve = plug_in_cdf(theta, fhat, f0)
    truth = true_f1_cdf(scenario, curve.nodes)
    split = 0.5 * (scenario.mu0 + scenario.m)
    errors = tail_errors(curve, truth, split)
    assert errors["sup"] == max(errors["left"], errors["right"])
    assert errors["sup"] == sup_error(curve, truth)


def test_estimate_trajectory_report():
    print("🧪 Testing the estimation pipeline...")
    scenario = preset("S0strong", n=5000, seed=21)
    report = estimate_trajectory(simulate_observed(scenario), method="both")
    assert report.theta_hat is not None and report.theta_tilde is not None
    assert abs(report.theta_hat.beta - 0.8) < 0.1
    assert abs(report.theta_hat.alpha - 0.7) < 0.25
    assert report.contrast_at_min >= 0.0
    assert np.all(np.isfinite(report.f1_curve.values))
    assert report.v_hat == h_map(report.theta_hat)

    restored = EstimationReport.from_dict(json.loads(json.dumps(report.to_dict())))
    assert restored.theta_hat == report.theta_hat
    assert np.array_equal(restored.f1_density.values, report.f1_density.values)
    print(f"✅ theta_hat=({report.theta_hat.alpha:.3f}, {report.theta_hat.beta:.3f})")


def test_estimate_sup_only_and_bad_method():
    scenario = preset("S3", n=1500, seed=22)
    trajectory = simulate_observed(scenario)
    report = estimate_trajectory(trajectory, method="s")
    assert report.theta_hat is None and report.primary == report.theta_tilde
    try:
        estimate_trajectory(trajectory, method="x")
        assert False, "expected InvalidParameter"
    except InvalidParameter:
        pass


def test_module_status():
    _, _, _, _, fields = simulated_fields("S4", 1000, 23)
    minimize_d(fields)
    status = integral_contrast_module.get_status()
    assert status["module_id"] == "d" and status["has_data"]
    assert status["runs"] >= 1 and status["last_updated"] is not None
    assert integral_contrast_module.name == "Integral contrast"


def main():
    """Run all tests"""
    print("🚀 Starting estimation tests")
    print("=" * 50)
    tests = [(name, func) for name, func in globals().items() if name.startswith("test_") and callable(func)]
    results = {}
    for test_name, test_func in tests:
        try:
            test_func()
            results[test_name] = True
        except Exception as e:
            print(f"❌ {test_name} failed with exception: {str(e)}")
            results[test_name] = False

    print(f"\n{'='*50}")
    print("🎯 TEST SUMMARY")
    for test_name, success in results.items():
        print(f"{'✅ PASS' if success else '❌ FAIL'} {test_name}")
    return all(results.values())


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
