import math

import numpy as np
import pytest
from scipy import integrate, stats

from wavemed.noise import (
    Cauchy,
    Gaussian,
    ShiftedExponential,
    StudentT,
    Uniform,
    make_model,
    parse_model,
    sample_iid,
)

MODELS = [Gaussian(1.0), Cauchy(1.0), StudentT(3.0, 1.0), ShiftedExponential(1.0), Uniform(0.5), Gaussian(2.5), Cauchy(0.3)]


def ids(model):
    return repr(model)


@pytest.mark.parametrize("model", MODELS, ids=ids)
class TestInvariants:
    def test_median_zero(self, model):
        assert abs(float(model.cdf(0.0)) - 0.5) < 1e-12

    def test_density_positive_at_zero(self, model):
        assert model.h0 > 0
        assert float(model.density(0.0)) == pytest.approx(model.h0, rel=1e-12)

    def test_h0_prime_by_central_difference(self, model):
        step = 1e-5
        fd = (float(model.density(step)) - float(model.density(-step))) / (2 * step)
        assert fd == pytest.approx(model.h0_prime, abs=1e-6)

    def test_density_is_cdf_derivative(self, model):
        x = np.linspace(-0.4, 0.4, 9) * (getattr(model, "half_width", 1.0))
        step = 1e-6
        fd = (model.cdf(x + step) - model.cdf(x - step)) / (2 * step)
        np.testing.assert_allclose(fd, model.density(x), rtol=1e-5)

    def test_quantile_inverts_cdf(self, model):
        u = np.linspace(0.001, 0.999, 101)
        x = model.quantile(u)
        assert np.all(model.density(x) > 0)
        np.testing.assert_allclose(model.quantile(model.cdf(x)), x, atol=1e-9)

    def test_fractional_moment_finite(self, model):
        value, err = integrate.quad(lambda x: abs(x) ** 0.5 * float(model.density(x)), -np.inf, np.inf, limit=200)
        assert math.isfinite(value) and value > 0

    def test_sampler_matches_cdf(self, model):
        draws = sample_iid(model, 100_000, np.random.default_rng(7))
        assert stats.kstest(draws, model.cdf).statistic < 0.01

    def test_sf_complements_cdf(self, model):
        x = np.linspace(-0.3, 3, 12)
        np.testing.assert_allclose(model.sf(x) + model.cdf(x), 1.0, atol=1e-12)


class TestExamples:
    def test_cauchy_h0(self):
        assert make_model("cauchy", 1).h0 == pytest.approx(1 / math.pi)

    def test_shifted_exponential(self):
        m = make_model("shiftedexp", 1)
        assert m.h0 == pytest.approx(0.5)
        assert m.h0_prime == pytest.approx(-0.5)
        assert not m.symmetric

    def test_gaussian(self):
        m = make_model("gaussian", 1)
        assert m.h0 == pytest.approx(1 / math.sqrt(2 * math.pi))
        assert m.h0_prime == 0

    def test_student_t_h0_matches_scipy(self):
        assert StudentT(3, 2).h0 == pytest.approx(stats.t(3, scale=2).pdf(0), rel=1e-12)

    def test_shifted_exponential_is_recentered_exponential(self):
        u = np.linspace(0.01, 0.99, 7)
        np.testing.assert_allclose(ShiftedExponential(1).quantile(u), stats.expon.ppf(u) - math.log(2))

    @pytest.mark.parametrize("model", MODELS, ids=ids)
    def test_symmetric_models_have_flat_density_at_zero(self, model):
        if model.symmetric:
            assert model.h0_prime == 0.0


class TestSampling:
    def test_empty(self, rng):
        assert sample_iid(Cauchy(1), 0, rng).shape == (0,)

    def test_cauchy_empirical_cdf_at_zero(self):
        draws = sample_iid(Cauchy(1), 100_000, np.random.default_rng(11))
        assert 0.494 <= np.mean(draws <= 0) <= 0.506

    def test_gaussian_mean(self):
        draws = sample_iid(Gaussian(1), 100_000, np.random.default_rng(12))
        assert abs(draws.mean()) < 0.01

    def test_deterministic(self):
        a = sample_iid(StudentT(2, 1), 50, np.random.default_rng(3))
        b = sample_iid(StudentT(2, 1), 50, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)

    def test_negative_count(self, rng):
        with pytest.raises(ValueError):
            sample_iid(Gaussian(), -1, rng)


class TestConstruction:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("cauchy:1.0", Cauchy(1.0)),
            ("gaussian:2", Gaussian(2.0)),
            ("studentt:3,0.5", StudentT(3.0, 0.5)),
            ("ShiftedExp:2", ShiftedExponential(2.0)),
            ("uniform:1e-12", Uniform(1e-12)),
            ("normal", Gaussian(1.0)),
        ],
    )
    def test_parse(self, text, expected):
        assert parse_model(text) == expected

    def test_round_trip_spec_string(self):
        for model in MODELS:
            assert parse_model(model.spec_string()) == model

    @pytest.mark.parametrize("text", ["cauchy:-1", "gaussian:0", "studentt:0,1", "laplace:1", "cauchy:abc"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_model(text)
