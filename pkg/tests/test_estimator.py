import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavemed import dwt
from wavemed.binning import DegenerateDataError, make_plan
from wavemed.estimator import EstimatorConfig, FitResult, default_j0, fit, pointwise_at
from wavemed.harness.signals import SignalSpec, evaluate
from wavemed.shrinkage import ShrinkageConfig


def heavisine_data(n, rng, noise="cauchy"):
    t = np.arange(1, n + 1) / n
    f = evaluate(SignalSpec("heavisine"), t)
    eps = rng.standard_cauchy(n) if noise == "cauchy" else rng.standard_normal(n)
    return f + eps


def corrupt_bin(y, plan, j, positions, rng):
    z = y.copy()
    start = j * plan.base_m
    z[start + positions] = rng.choice([-1.0, 1.0], positions.size) * 1e8
    return z


class TestConfig:
    def test_default_j0(self):
        assert default_j0("S8", 9) == 4
        assert default_j0("Haar", 9) == 4
        assert default_j0("S8", 4) == 3
        assert EstimatorConfig().filter == "S8"

    def test_resolve_j0(self):
        cfg = EstimatorConfig(j0=5)
        assert cfg.resolve_j0(9) == 5
        with pytest.raises(ValueError):
            cfg.resolve_j0(5)

    def test_unknown_filter(self):
        with pytest.raises(ValueError):
            EstimatorConfig(filter="bior2.2")


class TestFitExamples:
    def test_constant(self):
        result = fit(np.full(4096, 2.75))
        assert isinstance(result, FitResult)
        np.testing.assert_allclose(result.estimate, 2.75, atol=1e-12)
        assert result.bias_hat == 0
        assert result.T == 512 and result.grid[0] == 1 / 512 and result.grid[-1] == 1.0

    def test_shift_equivariance(self, rng):
        y = heavisine_data(2**12, rng)
        a, b = fit(y), fit(y + 5.0)
        assert np.max(np.abs(b.estimate - (a.estimate + 5.0))) < 1e-9
        assert b.bias_hat == pytest.approx(a.bias_hat, abs=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3))
    def test_shift_equivariance_property(self, seed, c):
        y = heavisine_data(2**12, np.random.default_rng(seed))
        a, b = fit(y), fit(y + c)
        assert np.max(np.abs(b.estimate - (a.estimate + c))) < 1e-9 * max(1.0, abs(c))

    def test_risk_decreasing_cauchy(self):
        risks = []
        for n in (2**12, 2**14, 2**16):
            t = np.arange(1, n + 1) / n
            f = evaluate(SignalSpec("heavisine"), t)
            errs = []
            for rep in range(50):
                rng = np.random.default_rng([17, n, rep])
                res = fit(f + rng.standard_cauchy(n))
                errs.append(np.mean((res.estimate - evaluate(SignalSpec("heavisine"), res.grid)) ** 2))
            risks.append(np.mean(errs))
        assert all(np.isfinite(risks))
        assert risks[0] > risks[1] > risks[2]

    def test_bias_correction_flag(self, rng):
        y = heavisine_data(2**12, rng) + rng.exponential(size=2**12)
        on, off = fit(y), fit(y, EstimatorConfig(bias_correction=False))
        assert on.bias_hat == off.bias_hat
        np.testing.assert_allclose(off.estimate - on.estimate, on.bias_hat, atol=1e-12)

    def test_noise_variance_fed_to_shrinkage(self, rng):
        y = heavisine_data(2**12, rng, "gaussian")
        res = fit(y)
        assert res.h_inv_sq_hat > 0
        # details above the block threshold survive, zeroed blocks are exactly zero
        after = res.pyramid_after.all_details()
        before = res.pyramid_before.all_details()
        assert np.all(np.abs(after) <= np.abs(before) + 1e-15)
        assert np.count_nonzero(after == 0) > 0
        np.testing.assert_array_equal(res.pyramid_after.gross, res.pyramid_before.gross)

    def test_visushrink_rule(self, rng):
        y = heavisine_data(2**12, rng, "gaussian")
        res = fit(y, EstimatorConfig(shrinkage=ShrinkageConfig(rule="VisuShrink")))
        lam = math.sqrt(res.h_inv_sq_hat / (4 * 2**12)) * math.sqrt(2 * math.log(2**12))
        before, after = res.pyramid_before.all_details(), res.pyramid_after.all_details()
        np.testing.assert_allclose(after, np.sign(before) * np.maximum(np.abs(before) - lam, 0), atol=1e-15)

    def test_rejects_infinite(self):
        y = np.zeros(1024)
        y[3] = np.inf
        with pytest.raises(ValueError, match="finite"):
            fit(y)
        with pytest.raises(ValueError):
            fit(np.zeros((32, 32)))

    def test_degenerate_noise_with_detail(self):
        # medians alternate in pairs so adjacent differences vanish but details do not
        plan = make_plan(4096)
        medians = np.repeat(np.tile([0.0, 1.0], plan.T // 4), 2)
        with pytest.raises(DegenerateDataError):
            fit(np.repeat(medians, plan.base_m))

    def test_j0_too_large(self):
        with pytest.raises(ValueError):
            fit(np.zeros(1024), EstimatorConfig(j0=7))


class TestPointwise:
    def test_constant(self):
        res = fit(np.full(1024, -1.5))
        for t0 in (0.01, 0.5, 0.99):
            assert pointwise_at(res, t0) == pytest.approx(-1.5)

    def test_grid_point_and_ties(self, rng):
        res = fit(heavisine_data(1024, rng))
        T = res.T
        assert pointwise_at(res, 5 / T) == res.estimate[4]
        assert pointwise_at(res, 5.5 / T) == res.estimate[4]  # tie goes down
        assert pointwise_at(res, 5.6 / T) == res.estimate[5]
        assert pointwise_at(res, 0.1 / T) == res.estimate[0]

    @pytest.mark.parametrize("t0", [0.0, 1.0, -0.3, 1.2])
    def test_domain(self, t0):
        with pytest.raises(ValueError):
            pointwise_at(fit(np.full(1024, 1.0)), t0)


class TestRobustness:
    def test_corrupted_bin_changes_smoothed_medians_boundedly(self, rng):
        cfg = EstimatorConfig(bias_correction=False)
        plan = make_plan(2**14)
        bad = math.ceil(plan.base_m / 2) - 1
        for _ in range(25):
            y = heavisine_data(plan.n, rng)
            j = int(rng.integers(plan.T))
            z = corrupt_bin(y, plan, j, rng.choice(plan.base_m, bad, replace=False), rng)
            a, b = fit(y, cfg), fit(z, cfg)
            dmed = b.medians - a.medians
            assert np.count_nonzero(dmed) <= 1
            assert np.linalg.norm(b.estimate - a.estimate) <= np.linalg.norm(dmed) + 1e-12

    def test_corruption_outside_sub_bin(self, rng):
        plan = make_plan(2**14)
        m = plan.base_m
        bad = math.ceil(m / 2) - 1
        for _ in range(25):
            y = heavisine_data(plan.n, rng)
            j = int(rng.integers(plan.T))
            z = corrupt_bin(y, plan, j, m // 2 + rng.choice(m - m // 2, bad, replace=False), rng)
            a, b = fit(y), fit(z)
            assert np.linalg.norm(b.estimate - a.estimate) <= np.linalg.norm(b.medians - a.medians) + 1e-12


class TestFidelity:
    @pytest.mark.parametrize("name", ["Haar", "D4", "D8", "S8"])
    def test_scaling_span_reproduced(self, name, rng):
        plan = make_plan(2**14)
        cfg = EstimatorConfig(filter=name)
        j0 = cfg.resolve_j0(plan.J)
        gross = rng.standard_normal(2**j0)
        zero = {j: np.zeros(2**j) for j in range(j0, plan.J)}
        medians = dwt.inverse(dwt.CoefficientPyramid(j0, plan.J, gross, zero), name)
        y = np.repeat(medians, plan.base_m)
        res = fit(y, cfg)
        np.testing.assert_array_equal(res.medians, medians)
        assert res.bias_hat == 0
        np.testing.assert_allclose(res.estimate, medians, atol=1e-9)

    def test_deterministic(self, rng):
        y = heavisine_data(2**12, rng)
        a, b = fit(y), fit(y.copy())
        np.testing.assert_array_equal(a.estimate, b.estimate)
        assert a.bias_hat == b.bias_hat and a.h_inv_sq_hat == b.h_inv_sq_hat
