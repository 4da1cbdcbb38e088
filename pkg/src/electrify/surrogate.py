"""Monte-Carlo scenario sampling and the polynomial elastic-net surrogate.

The physics model is expensive to evaluate per stop pair, so a degree-6
polynomial in (passengers, temperature, grade) is fitted to Monte-Carlo
evaluations of the drive-cycle model and used for all route predictions.
Both stages follow the scikit-learn estimator protocol (fit/transform/
predict, get_params) so they compose with the wider ecosystem.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import EmptyGradeSource, ModelMissing, NonConvergence
from .physics import BusSpec, DriveCycle, HvacModel, energy_efficiency_batch
from .validation import require_int_at_least, require_positive

DEFAULT_DEGREE = 6
DEFAULT_PASSENGER_MAX = 40


@dataclass(frozen=True)
class ScenarioSample:
    passengers: int
    ambient_temp_c: float
    grade_rad: float


@dataclass(frozen=True)
class ScenarioDistributions:
    """Sampling distributions for the Monte-Carlo scenarios.

    Passengers are uniform integers on [0, passenger_max]; temperature is a
    Gaussian mixture (typically one component per month); grade is drawn
    uniformly from the empirical per-stop-pair grade list of the feed.
    """

    passenger_max: int = DEFAULT_PASSENGER_MAX
    temp_mixture: tuple[tuple[float, float, float], ...] = ((20.0, 3.0, 1.0),)
    grade_source: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.passenger_max < 0:
            raise ValueError("passenger_max must be >= 0")
        weights = [w for _, _, w in self.temp_mixture]
        if not self.temp_mixture or abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError("temperature mixture weights must sum to 1")
        if any(sd <= 0 for _, sd, _ in self.temp_mixture):
            raise ValueError("temperature mixture stddevs must be positive")


def monthly_mixture(monthly_means_c: list[float], sigma_c: float = 3.0) -> tuple:
    """Equal-weight Gaussian mixture centered on the monthly mean temperatures."""
    n = len(monthly_means_c)
    return tuple((m, sigma_c, 1.0 / n) for m in monthly_means_c)


def sample_scenarios(dists: ScenarioDistributions, n: int, seed: int) -> list[ScenarioSample]:
    """Draw n reproducible scenarios; identical (dists, n, seed) give identical draws."""
    require_int_at_least(n, 1, "n")
    if not dists.grade_source:
        raise EmptyGradeSource("scenario grade source is empty; enrich the feed first")
    rng = np.random.default_rng(seed)
    passengers = rng.integers(0, dists.passenger_max + 1, size=n)
    means = np.array([m for m, _, _ in dists.temp_mixture])
    sds = np.array([sd for _, sd, _ in dists.temp_mixture])
    weights = np.array([w for _, _, w in dists.temp_mixture])
    comp = rng.choice(len(means), size=n, p=weights / weights.sum())
    temps = rng.normal(means[comp], sds[comp])
    grades = rng.choice(np.asarray(dists.grade_source, dtype=float), size=n)
    return [
        ScenarioSample(int(p), float(t), float(g))
        for p, t, g in zip(passengers, temps, grades)
    ]


def scenarios_to_array(samples: list[ScenarioSample]) -> np.ndarray:
    return np.array([[s.passengers, s.ambient_temp_c, s.grade_rad] for s in samples], dtype=float)


def simulate_targets(
    cycle: DriveCycle, samples: list[ScenarioSample], spec: BusSpec, hvac: HvacModel
) -> np.ndarray:
    """Physics-model energy efficiencies (kWh/km) for each scenario."""
    raw = scenarios_to_array(samples)
    return energy_efficiency_batch(cycle, raw[:, 0], raw[:, 1], raw[:, 2], spec, hvac)


# ---------------------------------------------------------------------------
# Feature expansion


def monomial_exponents(degree: int, n_vars: int = 3) -> list[tuple[int, ...]]:
    """All non-constant exponent tuples with total degree <= degree, in a fixed order."""
    if n_vars != 3:
        raise ValueError("only 3 scenario variables are supported")
    out = []
    for total in range(1, degree + 1):
        for a in range(total, -1, -1):
            for b in range(total - a, -1, -1):
                out.append((a, b, total - a - b))
    return out


class MonomialFeatures(TransformerMixin, BaseEstimator):
    """Expand (p, T, g) rows into standardized monomial columns.

    fit() records per-column mean and scale on the training data;
    zero-variance columns get scale 1 so they standardize to all zeros and
    draw a zero coefficient downstream.
    """

    def __init__(self, degree: int = DEFAULT_DEGREE):
        self.degree = degree

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns (passengers, temp, grade), got {X.shape[1]}")
        self.exponents_ = monomial_exponents(self.degree)
        raw = self._raw_monomials(X)
        # constant columns are detected exactly (max == min); the rounded
        # mean of identical values would otherwise leave a ~1e-18 std
        constant = raw.max(axis=0) == raw.min(axis=0)
        self.mean_ = np.where(constant, raw[0], raw.mean(axis=0))
        scale = raw.std(axis=0)
        self.scale_ = np.where(constant | (scale == 0), 1.0, scale)
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = check_array(X)
        return (self._raw_monomials(X) - self.mean_) / self.scale_

    def _raw_monomials(self, X: np.ndarray) -> np.ndarray:
        cols = [
            X[:, 0] ** a * X[:, 1] ** b * X[:, 2] ** c
            for a, b, c in self.exponents_
        ]
        return np.column_stack(cols)

    @property
    def n_features_(self) -> int:
        return len(self.exponents_)


# ---------------------------------------------------------------------------
# Elastic net via cyclic coordinate descent


@dataclass(frozen=True)
class ElasticNetConfig:
    l1_weight: float = 1e-4
    l2_weight: float = 1e-4
    max_iterations: int = 10_000
    tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.l1_weight < 0 or self.l2_weight < 0:
            raise ValueError("penalty weights must be >= 0")
        require_positive(self.tolerance, "tolerance")
        require_int_at_least(self.max_iterations, 1, "max_iterations")


class CoordinateDescentElasticNet(RegressorMixin, BaseEstimator):
    """Elastic net solved by cyclic coordinate descent with soft thresholding.

    Objective: (1/2n)*||y - Xw - b||^2 + l1*||w||_1 + (l2/2)*||w||_2^2.
    Each coordinate update minimizes the one-dimensional subproblem exactly,
    so the objective is non-increasing across sweeps (tracked in
    objective_path_). Stops when the largest coefficient change in a sweep
    drops below tol; raises NonConvergence at the sweep budget.
    """

    def __init__(
        self,
        l1: float = 1e-4,
        l2: float = 1e-4,
        max_iter: int = 10_000,
        tol: float = 1e-8,
        fit_intercept: bool = True,
    ):
        self.l1 = l1
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.fit_intercept = fit_intercept

    def fit(self, X, y):
        X = check_array(X)
        y = np.asarray(y, dtype=float).ravel()
        n, p = X.shape
        if n != y.size or n < 2:
            raise ValueError(f"need matching X rows and y length >= 2, got {n} x {p} vs {y.size}")

        if self.fit_intercept:
            x_mean = X.mean(axis=0)
            y_mean = y.mean()
        else:
            x_mean = np.zeros(p)
            y_mean = 0.0
        Xc = X - x_mean
        yc = y - y_mean

        cols = [np.ascontiguousarray(Xc[:, j]) for j in range(p)]
        col_sq = np.array([c @ c for c in cols]) / n

        w = np.zeros(p)
        r = yc.copy()
        objective: list[float] = []
        last_delta = np.inf
        converged = False
        sweeps = 0
        for sweeps in range(1, self.max_iter + 1):
            delta = 0.0
            for j in range(p):
                if col_sq[j] == 0.0:
                    continue
                cj = cols[j]
                rho = (cj @ r) / n + col_sq[j] * w[j]
                w_new = _soft_threshold(rho, self.l1) / (col_sq[j] + self.l2)
                if w_new != w[j]:
                    r += cj * (w[j] - w_new)
                    delta = max(delta, abs(w_new - w[j]))
                    w[j] = w_new
            objective.append(
                float((r @ r) / (2 * n) + self.l1 * np.abs(w).sum() + 0.5 * self.l2 * (w @ w))
            )
            last_delta = delta
            if delta < self.tol:
                converged = True
                break

        if not converged:
            raise NonConvergence(
                f"coordinate descent did not converge in {sweeps} sweeps "
                f"(last max coefficient change {last_delta:.3e}, tol {self.tol:.3e})",
                iterations=sweeps,
                last_delta=last_delta,
            )

        self.coef_ = w
        self.intercept_ = float(y_mean - x_mean @ w)
        self.n_sweeps_ = sweeps
        self.objective_path_ = np.array(objective)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_ + self.intercept_


def _soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


# ---------------------------------------------------------------------------
# Fitted surrogate artifact

MODEL_FORMAT = "electrify-surrogate/1"


@dataclass
class SurrogateModel:
    """Portable fitted surrogate: exponents, coefficients, standardization."""

    degree: int
    exponents: list[tuple[int, int, int]]
    coefficients: np.ndarray
    intercept: float
    feature_means: np.ndarray
    feature_scales: np.ndarray
    train_rmse: float
    test_rmse: float
    seed: int
    n_samples: int
    metadata: dict = field(default_factory=dict)

    def predict_batch(self, passengers, temps_c, grades_rad) -> np.ndarray:
        p = np.asarray(passengers, dtype=float)
        t = np.asarray(temps_c, dtype=float)
        g = np.asarray(grades_rad, dtype=float)
        cols = [p**a * t**b * g**c for a, b, c in self.exponents]
        raw = np.column_stack(cols)
        std = (raw - self.feature_means) / self.feature_scales
        return std @ self.coefficients + self.intercept

    def predict(self, scenario: ScenarioSample) -> float:
        return float(
            self.predict_batch(
                [scenario.passengers], [scenario.ambient_temp_c], [scenario.grade_rad]
            )[0]
        )

    def to_payload(self) -> dict:
        payload = {
            "format": MODEL_FORMAT,
            "degree": self.degree,
            "exponents": [list(e) for e in self.exponents],
            "coefficients": [float(c) for c in self.coefficients],
            "intercept": self.intercept,
            "feature_means": [float(v) for v in self.feature_means],
            "feature_scales": [float(v) for v in self.feature_scales],
            "train_rmse": self.train_rmse,
            "test_rmse": self.test_rmse,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "metadata": self.metadata,
        }
        payload["content_hash"] = payload_hash(payload)
        return payload

    @property
    def content_hash(self) -> str:
        return self.to_payload()["content_hash"]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_payload(), indent=1, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SurrogateModel":
        p = Path(path)
        if not p.exists():
            raise ModelMissing(f"surrogate model file not found: {p}")
        payload = json.loads(p.read_text(encoding="utf-8"))
        if payload.get("format") != MODEL_FORMAT:
            raise ModelMissing(f"{p}: not a surrogate model file")
        return cls(
            degree=payload["degree"],
            exponents=[tuple(e) for e in payload["exponents"]],
            coefficients=np.array(payload["coefficients"]),
            intercept=payload["intercept"],
            feature_means=np.array(payload["feature_means"]),
            feature_scales=np.array(payload["feature_scales"]),
            train_rmse=payload["train_rmse"],
            test_rmse=payload["test_rmse"],
            seed=payload["seed"],
            n_samples=payload["n_samples"],
            metadata=payload.get("metadata", {}),
        )


def payload_hash(payload: dict) -> str:
    body = {k: v for k, v in payload.items() if k != "content_hash"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode("utf-8")).hexdigest()


def train_surrogate(
    samples: list[ScenarioSample],
    targets: np.ndarray,
    cfg: ElasticNetConfig = ElasticNetConfig(),
    degree: int = DEFAULT_DEGREE,
    metadata: dict | None = None,
) -> SurrogateModel:
    """Fit the standardized monomial elastic net on an 80/20 seeded split."""
    raw = scenarios_to_array(samples)
    y = np.asarray(targets, dtype=float).ravel()
    if raw.shape[0] != y.size or y.size < 2:
        raise ValueError("need one target per sample and at least 2 samples")

    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(y.size)
    n_train = max(1, int(0.8 * y.size))
    train_idx, test_idx = perm[:n_train], perm[n_train:]

    features = MonomialFeatures(degree=degree).fit(raw[train_idx])
    X_train = features.transform(raw[train_idx])
    regressor = CoordinateDescentElasticNet(
        l1=cfg.l1_weight, l2=cfg.l2_weight, max_iter=cfg.max_iterations, tol=cfg.tolerance
    ).fit(X_train, y[train_idx])

    train_rmse = _rmse(regressor.predict(X_train), y[train_idx])
    if test_idx.size:
        X_test = features.transform(raw[test_idx])
        test_rmse = _rmse(regressor.predict(X_test), y[test_idx])
    else:
        test_rmse = float("nan")

    return SurrogateModel(
        degree=degree,
        exponents=list(features.exponents_),
        coefficients=regressor.coef_.copy(),
        intercept=regressor.intercept_,
        feature_means=features.mean_.copy(),
        feature_scales=features.scale_.copy(),
        train_rmse=train_rmse,
        test_rmse=test_rmse,
        seed=cfg.seed,
        n_samples=y.size,
        metadata=dict(metadata or {}),
    )


def _rmse(pred: np.ndarray, truth: np.ndarray) -> float:
    return float(np.sqrt(np.mean((pred - truth) ** 2)))
