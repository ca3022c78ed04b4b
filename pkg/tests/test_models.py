import numpy as np
import pytest

from ordbounds import (
    fit_cumulative_logit,
    fit_logit,
    fit_multinomial_logit,
    predict_marginal,
)
from ordbounds.exceptions import (
    RankDeficient,
    SeparationDetected,
    TooFewCategories,
)
from ordbounds.models import (
    _cumlogit_loglik_grad,
    _logit_loglik_grad,
    _mnlogit_loglik_grad,
    _sigmoid,
)


def numeric_grad(f, theta, h=1e-6):
    g = np.empty_like(theta)
    for j in range(len(theta)):
        tp = theta.copy(); tp[j] += h
        tm = theta.copy(); tm[j] -= h
        g[j] = (f(tp)[0] - f(tm)[0]) / (2 * h)
    return g


class TestGradients:
    def test_cumlogit_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        J, d, n = 4, 2, 60
        y = rng.integers(0, J, size=n)
        y[:J] = np.arange(J)  # all categories present
        X = rng.normal(size=(n, d))
        w = rng.uniform(0.2, 2.0, size=n)
        f = lambda t: _cumlogit_loglik_grad(t, y, X, w, J)
        for _ in range(40):
            theta = np.concatenate([
                rng.normal(scale=1.0, size=1),
                rng.normal(scale=0.5, size=J - 2),
                rng.normal(scale=1.0, size=d),
            ])
            _, g = f(theta)
            assert np.allclose(g, numeric_grad(f, theta), atol=1e-4)

    def test_logit_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(12)
        n = 80
        dlab = rng.integers(0, 2, size=n).astype(float)
        M = np.hstack([np.ones((n, 1)), rng.normal(size=(n, 2))])
        w = rng.uniform(0.2, 2.0, size=n)
        f = lambda t: _logit_loglik_grad(t, dlab, M, w)
        for _ in range(30):
            theta = rng.normal(size=3)
            _, g = f(theta)
            assert np.allclose(g, numeric_grad(f, theta), atol=1e-4)

    def test_mnlogit_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(13)
        n, q, G = 70, 3, 3
        gidx = rng.integers(0, G, size=n)
        M = np.hstack([np.ones((n, 1)), rng.normal(size=(n, q - 1))])
        w = rng.uniform(0.2, 2.0, size=n)
        f = lambda t: _mnlogit_loglik_grad(t, gidx, M, w, G)
        for _ in range(30):
            theta = rng.normal(size=(G - 1) * q)
            _, g = f(theta)
            assert np.allclose(g, numeric_grad(f, theta), atol=1e-4)


class TestCumulativeLogit:
    def test_intercept_only_closed_form(self):
        y = np.array([0] * 3 + [1] * 5 + [2] * 2)
        m = fit_cumulative_logit(y)
        F1, F2 = _sigmoid(np.array(m.cutpoints))
        assert F1 == pytest.approx(0.3, abs=1e-9)
        assert F2 == pytest.approx(0.8, abs=1e-9)
        assert m.slope == ()

    def test_weighted_equals_replicated(self):
        rng = np.random.default_rng(6)
        y = rng.integers(0, 3, size=30)
        X = rng.normal(size=(30, 1))
        reps = rng.integers(1, 4, size=30)
        w = reps.astype(float)
        yr = np.repeat(y, reps)
        Xr = np.repeat(X, reps, axis=0)
        m1 = fit_cumulative_logit(y, X, weights=w)
        m2 = fit_cumulative_logit(yr, Xr)
        assert np.allclose(m1.cutpoints, m2.cutpoints, atol=1e-6)
        assert np.allclose(m1.slope, m2.slope, atol=1e-6)

    def test_recovers_known_coefficients(self):
        rng = np.random.default_rng(20)
        n = 20000
        X = rng.normal(size=(n, 1))
        cuts = np.array([-0.5, 1.0])
        u = -1.5 * X[:, 0]
        F = _sigmoid(np.add.outer(u, cuts))
        p = np.diff(np.hstack([np.zeros((n, 1)), F, np.ones((n, 1))]), axis=1)
        y = (rng.uniform(size=n)[:, None] > p.cumsum(axis=1)).sum(axis=1)
        m = fit_cumulative_logit(y, X)
        assert np.allclose(m.cutpoints, cuts, atol=0.07)
        assert np.allclose(m.slope, [-1.5], atol=0.07)

    def test_predict_marginal_sums_to_one(self):
        rng = np.random.default_rng(9)
        y = rng.integers(0, 3, size=50)
        X = rng.normal(size=(50, 1))
        m = fit_cumulative_logit(y, X)
        marg = predict_marginal(m, [0.5])
        assert sum(marg.probs) == pytest.approx(1.0, abs=1e-12)
        assert all(v >= 0 for v in marg.probs)

    def test_too_few_categories(self):
        with pytest.raises(TooFewCategories):
            fit_cumulative_logit(np.zeros(10, dtype=int))

    def test_rank_deficient(self):
        y = np.array([0, 1, 2, 1, 0, 2])
        X = np.array([[1.0, 2.0]] * 6)  # constant columns are collinear
        with pytest.raises(RankDeficient):
            fit_cumulative_logit(y, X)


class TestLogit:
    def test_intercept_only(self):
        d = np.array([1, 1, 1, 0])
        m = fit_logit(d)
        assert m.coef[0] == pytest.approx(np.log(3), abs=1e-9)

    def test_separation_detected(self):
        # perfectly separated labels push coefficients to infinity
        X = np.linspace(-1, 1, 40).reshape(-1, 1)
        d = (X[:, 0] > 0).astype(float)
        with pytest.raises(SeparationDetected):
            fit_logit(d, X)

    def test_degenerate_labels(self):
        with pytest.raises(SeparationDetected):
            fit_logit(np.ones(5))

    def test_recovers_known_coefficients(self):
        rng = np.random.default_rng(30)
        n = 20000
        X = rng.normal(size=(n, 2))
        p = _sigmoid(0.5 + X @ np.array([1.0, -0.7]))
        d = (rng.uniform(size=n) < p).astype(float)
        m = fit_logit(d, X)
        assert np.allclose(m.coef, [0.5, 1.0, -0.7], atol=0.08)


class TestMultinomialLogit:
    def test_reference_class_fixed_at_zero(self):
        rng = np.random.default_rng(41)
        g = list(rng.choice(["c", "a", "n"], size=200))
        m = fit_multinomial_logit(g, classes=("c", "a", "n"))
        assert m.classes == ("c", "a", "n")
        P = m.predict_proba(np.zeros((1, 0)))
        counts = np.array([g.count(c) for c in m.classes], dtype=float)
        assert np.allclose(P[0], counts / counts.sum(), atol=1e-6)

    def test_recovers_known_coefficients(self):
        rng = np.random.default_rng(42)
        n = 30000
        X = rng.normal(size=(n, 1))
        eta = np.hstack([np.zeros((n, 1)), 0.5 + X, -0.5 + X])
        P = np.exp(eta)
        P /= P.sum(axis=1, keepdims=True)
        draws = (rng.uniform(size=n)[:, None] > P.cumsum(axis=1)).sum(axis=1)
        g = [("c", "a", "n")[k] for k in draws]
        m = fit_multinomial_logit(g, X, classes=("c", "a", "n"))
        B = np.array(m.coef)
        assert np.allclose(B, [[0.5, 1.0], [-0.5, 1.0]], atol=0.08)

    def test_too_few_classes(self):
        with pytest.raises(TooFewCategories):
            fit_multinomial_logit(["c"] * 10)
