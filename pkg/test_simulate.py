#!/usr/bin/env python3
"""
Test the simulators and the scenario presets
"""
import os
import sys
import tempfile
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np

from data.model_core import ThetaParam, mix_weights
from data.scenarios import PRESET_NAMES, load_scenario, preset, save_scenario
from data.simulate import (Scenario, simulate_ar1, simulate_chain, simulate_observed, simulate_reference,
                           true_f1_cdf, true_mixture_cdf)
from utils.errors import InvalidParameter
from utils.rng import derive_seed, named_streams


def test_same_seed_same_trajectory():
    print("🧪 Testing seeded determinism...")
    scenario = preset("S1", n=2000, seed=7)
    first, second = simulate_observed(scenario), simulate_observed(scenario)
    assert np.array_equal(first.z, second.z)
    assert np.array_equal(first.x, second.x)
    other = simulate_observed(scenario.with_size(2000, seed=8))
    assert not np.array_equal(first.z, other.z)
    print("✅ Same seed, same trajectory")


def test_streams_are_independent_of_each_other():
    streams = named_streams(11)
    draws = {name: gen.random(4) for name, gen in streams.items()}
    values = list(draws.values())
    assert all(not np.array_equal(values[0], v) for v in values[1:])
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(1, 3)


def test_chain_stationary_law_and_transitions():
    print("🧪 Testing latent chain...")
    theta = ThetaParam(0.7, 0.8)
    x = simulate_chain(theta, 200_000, np.random.default_rng(3))
    assert x.dtype == np.int8 and set(np.unique(x)) <= {0, 1}
    assert abs(x.mean() - mix_weights(theta).r) < 0.01
    prev, nxt = x[:-1], x[1:]
    assert abs(nxt[prev == 0].mean() - theta.alpha) < 0.01
    assert abs(1 - nxt[prev == 1].mean() - theta.beta) < 0.01
    print("✅ Chain frequencies match (p, r) and (alpha, beta)")


def test_slow_chain_transitions():
    theta = ThetaParam(0.05, 0.1)
    x = simulate_chain(theta, 300_000, np.random.default_rng(5))
    prev, nxt = x[:-1], x[1:]
    assert abs(nxt[prev == 0].mean() - 0.05) < 0.005
    assert abs(x.mean() - mix_weights(theta).r) < 0.03


def test_ar1_moments():
    print("🧪 Testing AR(1) gold standard...")
    phi = 0.7
    y = simulate_ar1(phi, 1.0, 1.0, 200_000, np.random.default_rng(9))
    assert abs(y.mean() - 1.0 / (1 - phi)) < 0.05
    assert abs(y.var() - 1.0 / (1 - phi ** 2)) < 0.05
    assert abs(np.corrcoef(y[:-1], y[1:])[0, 1] - phi) < 0.01
    print("✅ AR(1) mean, variance and lag-1 correlation")


def test_observed_mixture():
    scenario = preset("S0strong", n=50_000, seed=1)
    trajectory = simulate_observed(scenario)
    poisoned = trajectory.z[trajectory.x == 1]
    assert abs(poisoned.mean() - scenario.m) < 0.05
    assert abs(poisoned.std() - scenario.v) < 0.05
    clean = trajectory.z[trajectory.x == 0]
    assert abs(clean.mean() - scenario.mu0) < 0.1


def test_reference_samples():
    scenario = preset("S4", n=20_000, seed=2)
    marginal, pairs = simulate_reference(scenario)
    assert marginal.shape == (scenario.ref_size,)
    assert pairs.shape == (scenario.ref_size, 2)
    assert scenario.ref_size == 2 * scenario.n
    assert abs(marginal.mean() - scenario.mu0) < 0.05
    assert abs(np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1] - scenario.phi) < 0.02
    assert abs(pairs[:, 1].mean() - scenario.mu0) < 0.05


def test_presets():
    print("🧪 Testing scenario presets...")
    assert PRESET_NAMES == ["S0strong", "S0weak", "S1", "S2", "S3", "S4"]
    s = preset("s0strong")
    assert s.theta.alpha == 0.7 and s.theta.beta == 0.8
    assert abs(s.mu0 - 1.0 / 0.3) < 1e-12
    assert abs(s.m - 2.5 / 0.3) < 1e-12
    assert abs(s.v - 0.8 * np.sqrt(1.0 / 0.51)) < 1e-12
    assert preset("S4").phi == 0.5
    try:
        preset("S9")
        assert False, "expected InvalidParameter"
    except InvalidParameter:
        pass
    print("✅ Presets resolve")


def test_scenario_validation():
    theta = ThetaParam(0.5, 0.5)
    for kwargs in ({"phi": 1.0}, {"v": 0.0}, {"n": 1}):
        base = dict(theta=theta, phi=0.5, m0=1.0, v0=1.0, m=3.0, v=1.0, n=100, ref_size=200, seed=0)
        base.update(kwargs)
        try:
            Scenario(**base)
            assert False, f"expected InvalidParameter for {kwargs}"
        except InvalidParameter:
            pass


def test_scenario_file():
    scenario = preset("S2", n=1234, seed=99)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "s2.json")
        save_scenario(scenario, path)
        loaded = load_scenario(path)
        assert loaded == scenario
        resized = load_scenario(path, n=500)
        assert resized.n == 500 and resized.ref_size == 1000 and resized.seed == 99


def test_true_curves():
    scenario = preset("S0strong")
    x = np.array([-500.0, scenario.m, 80.0])
    f1 = true_f1_cdf(scenario, x)
    assert f1[0] == 0.0 and abs(f1[1] - 0.5) < 1e-15 and f1[2] == 1.0
    mixture = true_mixture_cdf(scenario, x)
    assert mixture[0] == 0.0 and abs(mixture[2] - 1.0) < 1e-15


def main():
    """Run all tests"""
    print("🚀 Starting simulation tests")
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
