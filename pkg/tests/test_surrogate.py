import time

import numpy as np
import pytest

from electrify.errors import EmptyGradeSource, ModelMissing, NonConvergence
from electrify.physics import BusSpec, HvacModel
from electrify.surrogate import (
    CoordinateDescentElasticNet,
    ElasticNetConfig,
    MonomialFeatures,
    ScenarioDistributions,
    SurrogateModel,
    monomial_exponents,
    monthly_mixture,
    sample_scenarios,
    scenarios_to_array,
    simulate_targets,
    train_surrogate,
)

from conftest import BOSTON_MONTHLY

FIXTURE_GRADES = (0.0041667, -0.00375, 0.0053333, -0.0041667, 0.00375,
                  -0.0053333, 0.005, -0.0027273, 0.0066667, 0.0015)


def boston_distributions(**kwargs):
    defaults = dict(
        passenger_max=40,
        temp_mixture=monthly_mixture(BOSTON_MONTHLY),
        grade_source=FIXTURE_GRADES,
    )
    defaults.update(kwargs)
    return ScenarioDistributions(**defaults)


class TestSampling:
    def test_twenty_thousand_reproducible(self):
        dists = boston_distributions()
        a = sample_scenarios(dists, 20_000, seed=42)
        b = sample_scenarios(dists, 20_000, seed=42)
        assert len(a) == 20_000
        assert a == b

    def test_different_seed_differs(self):
        dists = boston_distributions()
        assert sample_scenarios(dists, 100, seed=1) != sample_scenarios(dists, 100, seed=2)

    def test_empty_bus_degenerate(self):
        samples = sample_scenarios(boston_distributions(passenger_max=0), 50, seed=0)
        assert all(s.passengers == 0 for s in samples)

    def test_single_component_mixture_mean(self):
        dists = boston_distributions(temp_mixture=((11.0, 5.0, 1.0),))
        samples = sample_scenarios(dists, 20_000, seed=5)
        temps = np.array([s.ambient_temp_c for s in samples])
        assert abs(temps.mean() - 11.0) < 3 * 5.0 / np.sqrt(20_000)

    def test_passengers_within_range(self):
        samples = sample_scenarios(boston_distributions(), 2_000, seed=9)
        assert all(0 <= s.passengers <= 40 for s in samples)
        assert {s.grade_rad for s in samples} <= set(FIXTURE_GRADES)

    def test_empty_grade_source(self):
        with pytest.raises(EmptyGradeSource):
            sample_scenarios(boston_distributions(grade_source=()), 10, seed=0)

    def test_bad_mixture_configs_rejected(self):
        with pytest.raises(ValueError, match="weights"):
            boston_distributions(temp_mixture=((10.0, 3.0, 0.4), (20.0, 3.0, 0.4)))
        with pytest.raises(ValueError, match="stddev"):
            boston_distributions(temp_mixture=((10.0, 0.0, 1.0),))

    def test_zero_samples_rejected(self):
        from electrify.errors import ConfigError

        with pytest.raises(ConfigError):
            sample_scenarios(boston_distributions(), 0, seed=0)


class TestMonomialFeatures:
    def test_degree_six_column_count(self):
        # monomials of total degree <= 6 in 3 variables, constant excluded:
        # C(6+3,3) - 1 = 83
        assert len(monomial_exponents(6)) == 83
        assert len({e for e in monomial_exponents(6)}) == 83
        assert all(1 <= sum(e) <= 6 for e in monomial_exponents(6))

    def test_degree_one_is_raw_variables(self):
        X = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]])
        feats = MonomialFeatures(degree=1).fit(X)
        assert feats.exponents_ == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        transformed = feats.transform(X)
        assert transformed.shape == (3, 3)
        np.testing.assert_allclose(transformed.mean(axis=0), 0.0, atol=1e-12)

    def test_zero_variance_column_scale_one(self):
        X = np.array([[2.0, 1.0, 0.0], [2.0, 2.0, 0.0], [2.0, 3.0, 0.0]])
        feats = MonomialFeatures(degree=2).fit(X)
        idx = feats.exponents_.index((0, 0, 1))  # the all-zero grade column
        assert feats.scale_[idx] == 1.0
        transformed = feats.transform(X)
        np.testing.assert_allclose(transformed[:, idx], 0.0)

    def test_standardization_round_trip(self):
        rng = np.random.default_rng(0)
        X = np.column_stack([rng.integers(0, 41, 200), rng.normal(11, 8, 200), rng.uniform(-0.01, 0.01, 200)])
        feats = MonomialFeatures(degree=4).fit(X)
        recovered = feats.transform(X) * feats.scale_ + feats.mean_
        raw = feats._raw_monomials(X)
        # 1e-12 relative to each column's own magnitude
        column_scale = np.abs(feats.mean_) + feats.scale_
        assert np.all(np.abs(recovered - raw) <= 1e-12 * column_scale)

    def test_get_params_protocol(self):
        feats = MonomialFeatures(degree=3)
        assert feats.get_params() == {"degree": 3}
        feats.set_params(degree=5)
        assert feats.degree == 5


class TestCoordinateDescent:
    def test_ols_recovers_noiseless_linear(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(300, 2))
        y = 1.5 * X[:, 0] - 2.25 * X[:, 1] + 0.75
        reg = CoordinateDescentElasticNet(l1=0.0, l2=0.0, tol=1e-12).fit(X, y)
        np.testing.assert_allclose(reg.coef_, [1.5, -2.25], atol=1e-8)
        assert reg.intercept_ == pytest.approx(0.75, abs=1e-8)
        rmse = np.sqrt(np.mean((reg.predict(X) - y) ** 2))
        assert rmse < 1e-10

    def test_full_shrinkage_predicts_mean(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(100, 5))
        y = rng.normal(size=100)
        reg = CoordinateDescentElasticNet(l1=1e6, l2=0.0).fit(X, y)
        np.testing.assert_allclose(reg.coef_, 0.0)
        np.testing.assert_allclose(reg.predict(X), np.full(100, y.mean()), atol=1e-12)

    def test_objective_non_increasing(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(200, 20))
        X[:, 1] = X[:, 0] * 0.99 + rng.normal(scale=0.01, size=200)  # correlated pair
        y = X @ rng.normal(size=20) + rng.normal(scale=0.1, size=200)
        reg = CoordinateDescentElasticNet(l1=1e-3, l2=1e-3).fit(X, y)
        diffs = np.diff(reg.objective_path_)
        assert np.all(diffs <= 1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_matches_normal_equations(self, seed):
        rng = np.random.default_rng(seed)
        n_features = rng.integers(2, 11)
        X = rng.normal(size=(150, n_features))
        y = X @ rng.normal(size=n_features) + rng.normal(scale=0.3, size=150) + 1.2
        reg = CoordinateDescentElasticNet(l1=0.0, l2=0.0, tol=1e-13, max_iter=50_000).fit(X, y)
        ones = np.ones((150, 1))
        theta, *_ = np.linalg.lstsq(np.hstack([X, ones]), y, rcond=None)
        np.testing.assert_allclose(reg.coef_, theta[:-1], atol=1e-6)
        assert reg.intercept_ == pytest.approx(theta[-1], abs=1e-6)

    @pytest.mark.parametrize("seed", [10, 11, 12])
    def test_kkt_optimality_with_penalties(self, seed):
        # independent optimality oracle for the regularized case: at the
        # solution, each coordinate satisfies the subgradient conditions
        rng = np.random.default_rng(seed)
        n, p = 300, 12
        X = rng.normal(size=(n, p))
        y = X @ rng.normal(size=p) + rng.normal(scale=0.5, size=n)
        l1, l2 = 0.01, 0.005
        reg = CoordinateDescentElasticNet(l1=l1, l2=l2, tol=1e-12, max_iter=100_000).fit(X, y)
        Xc = X - X.mean(axis=0)
        yc = y - y.mean()
        r = yc - Xc @ reg.coef_
        grad = -(Xc.T @ r) / n + l2 * reg.coef_
        for j in range(p):
            if reg.coef_[j] != 0.0:
                assert abs(grad[j] + l1 * np.sign(reg.coef_[j])) < 1e-8
            else:
                assert abs(grad[j]) <= l1 + 1e-8

    def test_all_identical_samples_degenerate(self):
        from electrify.surrogate import ScenarioSample

        samples = [ScenarioSample(12, 11.0, 0.002)] * 40
        y = np.full(40, 0.9)
        model = train_surrogate(samples, y, ElasticNetConfig(seed=0))
        np.testing.assert_allclose(model.coefficients, 0.0)
        assert np.all(model.feature_scales == 1.0)
        assert model.predict(ScenarioSample(12, 11.0, 0.002)) == pytest.approx(0.9)

    def test_nonconvergence_reports_state(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(100, 10))
        y = rng.normal(size=100)
        with pytest.raises(NonConvergence) as exc:
            CoordinateDescentElasticNet(l1=0.0, l2=0.0, tol=1e-16, max_iter=2).fit(X, y)
        assert exc.value.iterations == 2
        assert np.isfinite(exc.value.last_delta)

    def test_sklearn_clone_compatible(self):
        from sklearn.base import clone

        reg = CoordinateDescentElasticNet(l1=0.5, l2=0.25, max_iter=123)
        cloned = clone(reg)
        assert cloned.get_params() == reg.get_params()


class TestTrainedSurrogate:
    def test_determinism(self, drive_cycle):
        dists = boston_distributions()
        samples = sample_scenarios(dists, 400, seed=21)
        targets = simulate_targets(drive_cycle, samples, BusSpec(), HvacModel())
        m1 = train_surrogate(samples, targets, ElasticNetConfig(seed=21))
        m2 = train_surrogate(samples, targets, ElasticNetConfig(seed=21))
        assert m1.content_hash == m2.content_hash
        np.testing.assert_array_equal(m1.coefficients, m2.coefficients)

    def test_physics_fidelity_desk_scale(self, drive_cycle):
        samples = sample_scenarios(boston_distributions(), 800, seed=13)
        targets = simulate_targets(drive_cycle, samples, BusSpec(), HvacModel())
        model = train_surrogate(samples, targets, ElasticNetConfig(seed=13))
        assert model.test_rmse <= 0.05 * np.abs(targets).mean()

    def test_constant_model_predicts_intercept(self, surrogate_model):
        model = SurrogateModel(
            degree=surrogate_model.degree,
            exponents=surrogate_model.exponents,
            coefficients=np.zeros_like(surrogate_model.coefficients),
            intercept=0.875,
            feature_means=surrogate_model.feature_means,
            feature_scales=surrogate_model.feature_scales,
            train_rmse=0.0,
            test_rmse=0.0,
            seed=0,
            n_samples=0,
        )
        preds = model.predict_batch([0, 20, 40], [-5.0, 11.0, 30.0], [0.0, 0.004, -0.004])
        np.testing.assert_allclose(preds, 0.875)

    def test_noiseless_linear_prediction_matches_target(self):
        rng = np.random.default_rng(8)
        raw = np.column_stack([
            rng.integers(0, 41, 500), rng.normal(11, 6, 500), rng.uniform(-0.01, 0.01, 500)
        ])
        from electrify.surrogate import ScenarioSample

        samples = [ScenarioSample(int(p), float(t), float(g)) for p, t, g in raw]
        y = 0.02 * raw[:, 0] - 0.015 * raw[:, 1] + 0.6
        model = train_surrogate(
            samples, y, ElasticNetConfig(l1_weight=0.0, l2_weight=0.0, tolerance=1e-13, seed=8),
            degree=1,
        )
        preds = model.predict_batch(raw[:, 0], raw[:, 1], raw[:, 2])
        np.testing.assert_allclose(preds, y, atol=1e-8)

    def test_batch_predict_under_one_second(self, surrogate_model):
        rng = np.random.default_rng(17)
        p = rng.integers(0, 41, 10_000)
        t = rng.normal(11, 8, 10_000)
        g = rng.uniform(-0.006, 0.006, 10_000)
        start = time.perf_counter()
        preds = surrogate_model.predict_batch(p, t, g)
        elapsed = time.perf_counter() - start
        assert preds.shape == (10_000,)
        assert elapsed < 1.0

    def test_serialization_round_trip(self, surrogate_model, tmp_path):
        path = tmp_path / "model.json"
        surrogate_model.save(path)
        again = SurrogateModel.load(path)
        assert again.content_hash == surrogate_model.content_hash
        preds_a = surrogate_model.predict_batch([10], [5.0], [0.002])
        preds_b = again.predict_batch([10], [5.0], [0.002])
        np.testing.assert_array_equal(preds_a, preds_b)

    def test_missing_model_file(self, tmp_path):
        with pytest.raises(ModelMissing):
            SurrogateModel.load(tmp_path / "nope.json")

    def test_scenarios_to_array_shape(self):
        samples = sample_scenarios(boston_distributions(), 7, seed=0)
        arr = scenarios_to_array(samples)
        assert arr.shape == (7, 3)
