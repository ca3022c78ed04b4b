"""Maximum-likelihood fitters: cumulative-logit (proportional odds), binary
logit, and multinomial logit.

Conventions
-----------
* Design matrices hold covariates only; intercepts are implicit (the
  cumulative-logit cutpoints play that role, the other two models prepend a
  constant column).  Covariates are used as supplied; standardize upstream if
  scales differ wildly.
* Cumulative logit uses logit pr(Y <= j | x) = alpha_j + x' beta, with
  strictly increasing cutpoints alpha_0 < ... < alpha_{J-2} enforced by the
  (alpha_0, log-gap) reparameterization.
* Optimization is Newton-Raphson with step-halving; convergence requires
  gradient sup-norm < 1e-8 within 200 iterations.  Intercept-only fits use
  the closed forms directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import MarginalDistribution
from .exceptions import (
    DimensionMismatch,
    NonConvergence,
    RankDeficient,
    SeparationDetected,
    TooFewCategories,
)

GRAD_TOL = 1e-8
MAX_ITER = 200
COEF_CAP = 30.0


def _sigmoid(t):
    return 0.5 * (1.0 + np.tanh(0.5 * t))


def _logit(p):
    return np.log(p) - np.log1p(-p)


def _as_design(X, n):
    if X is None:
        return np.empty((n, 0))
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != n:
        raise DimensionMismatch(f"{X.shape[0]} covariate rows for {n} outcomes")
    return X


def _check_rank(M):
    if M.shape[1] and np.linalg.matrix_rank(M) < M.shape[1]:
        raise RankDeficient("design matrix is rank deficient")


@dataclass(frozen=True)
class CumulativeLogitModel:
    cutpoints: tuple  # length J-1, strictly increasing
    slope: tuple      # one coefficient per covariate

    def __post_init__(self):
        cp = tuple(float(a) for a in self.cutpoints)
        if any(b <= a for a, b in zip(cp, cp[1:])):
            raise ValueError("cutpoints must be strictly increasing")
        object.__setattr__(self, "cutpoints", cp)
        object.__setattr__(self, "slope", tuple(float(b) for b in self.slope))

    @property
    def J(self) -> int:
        return len(self.cutpoints) + 1

    def predict_proba(self, X) -> np.ndarray:
        """Category probabilities, shape (n, J)."""
        X = _as_design(X, np.shape(X)[0] if np.ndim(X) else 1)
        if X.shape[1] != len(self.slope):
            raise DimensionMismatch(
                f"model has {len(self.slope)} covariates, got {X.shape[1]}"
            )
        u = X @ np.array(self.slope) if self.slope else np.zeros(X.shape[0])
        cum = _sigmoid(np.add.outer(u, np.array(self.cutpoints)))
        cum = np.hstack([np.zeros((len(u), 1)), cum, np.ones((len(u), 1))])
        return np.diff(cum, axis=1)


def predict_marginal(model: CumulativeLogitModel, x) -> MarginalDistribution:
    """Predicted outcome distribution at one covariate row."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = model.predict_proba(x[None, :])[0]
    p = np.clip(p, 0.0, None)
    return MarginalDistribution(tuple(p / p.sum()))


@dataclass(frozen=True)
class LogitModel:
    coef: tuple  # intercept followed by slopes

    def predict_proba(self, X) -> np.ndarray:
        X = _as_design(X, np.shape(X)[0])
        if X.shape[1] != len(self.coef) - 1:
            raise DimensionMismatch("covariate dimension mismatch")
        b = np.array(self.coef)
        return _sigmoid(b[0] + X @ b[1:])


@dataclass(frozen=True)
class MultinomialLogitModel:
    classes: tuple           # class labels, reference first
    coef: tuple              # per non-reference class: (intercept, slopes...)

    def predict_proba(self, X) -> np.ndarray:
        """Class probabilities, columns ordered as self.classes."""
        X = _as_design(X, np.shape(X)[0])
        B = np.array(self.coef)  # (G-1, d+1)
        if B.size and X.shape[1] != B.shape[1] - 1:
            raise DimensionMismatch("covariate dimension mismatch")
        scores = np.zeros((X.shape[0], len(self.classes)))
        for g in range(1, len(self.classes)):
            scores[:, g] = B[g - 1, 0] + X @ B[g - 1, 1:]
        scores -= scores.max(axis=1, keepdims=True)
        e = np.exp(scores)
        return e / e.sum(axis=1, keepdims=True)


# -- cumulative logit --------------------------------------------------------

def _cumlogit_unpack(theta, J, d):
    a0 = theta[0]
    gaps = np.exp(theta[1 : J - 1])
    cut = a0 + np.concatenate([[0.0], np.cumsum(gaps)])
    beta = theta[J - 1 :]
    return cut, gaps, beta


def _cumlogit_loglik_grad(theta, y, X, w, J):
    n, d = X.shape
    cut, gaps, beta = _cumlogit_unpack(theta, J, d)
    u = X @ beta if d else np.zeros(n)
    F = _sigmoid(np.add.outer(u, cut))                    # (n, J-1)
    Ffull = np.hstack([np.zeros((n, 1)), F, np.ones((n, 1))])
    p = np.clip(np.diff(Ffull, axis=1), 1e-300, None)     # (n, J)
    wtot = w.sum()
    py = p[np.arange(n), y]
    ll = float(w @ np.log(py)) / wtot

    f = F * (1.0 - F)                                     # logistic density terms
    # d log p_y / d alpha_m: +f_m at m == y, -f_m at m == y-1
    galpha = np.zeros((n, J - 1))
    mask_hi = y <= J - 2
    idx = np.arange(n)
    galpha[idx[mask_hi], y[mask_hi]] = f[idx[mask_hi], y[mask_hi]]
    mask_lo = y >= 1
    galpha[idx[mask_lo], y[mask_lo] - 1] -= f[idx[mask_lo], y[mask_lo] - 1]
    galpha = galpha / py[:, None] * (w / wtot)[:, None]
    gu = galpha.sum(axis=1)                               # d log p / du == sum over alphas
    grad_cut = galpha.sum(axis=0)                         # (J-1,)
    # chain rule to (a0, log-gaps)
    grad = np.empty_like(theta)
    grad[0] = grad_cut.sum()
    for r in range(1, J - 1):
        grad[r] = grad_cut[r:].sum() * gaps[r - 1]
    if d:
        grad[J - 1 :] = X.T @ gu
    return ll, grad


def fit_cumulative_logit(y, X=None, weights=None) -> CumulativeLogitModel:
    """Weighted proportional-odds MLE.

    y holds categories 0..J-1 (J inferred as max(y)+1); X holds covariate
    rows without an intercept column.
    """
    y = np.asarray(y, dtype=int)
    n = len(y)
    X = _as_design(X, n)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    J = int(y.max()) + 1
    observed = np.unique(y[w > 0])
    if len(observed) < 2:
        raise TooFewCategories("need at least 2 observed outcome categories")
    _check_rank(X)

    # closed-form start (and exact solution when there are no covariates)
    cum = np.array([w[y <= j].sum() for j in range(J - 1)]) / w.sum()
    cum = np.clip(cum, 1e-9, 1 - 1e-9)
    if np.any(np.diff(cum) <= 0):  # ties from empty categories
        cum = np.maximum.accumulate(cum + 1e-10 * np.arange(J - 1))
    cuts = _logit(cum)
    if X.shape[1] == 0:
        return CumulativeLogitModel(tuple(cuts), ())

    d = X.shape[1]
    theta = np.concatenate([[cuts[0]], np.log(np.maximum(np.diff(cuts), 1e-6)), np.zeros(d)])
    theta = _newton(
        lambda t: _cumlogit_loglik_grad(t, y, X, w, J),
        theta,
        cap_slice=slice(J - 1, None),
    )
    cut, _, beta = _cumlogit_unpack(theta, J, d)
    return CumulativeLogitModel(tuple(cut), tuple(beta))


def _newton(f, theta, cap_slice=slice(None), grad_tol=GRAD_TOL, max_iter=MAX_ITER):
    """Newton-Raphson with step-halving; Hessian from central differences of
    the analytic gradient."""
    ll, grad = f(theta)
    p = len(theta)
    for _ in range(max_iter):
        if np.abs(grad).max() < grad_tol:
            return theta
        H = np.empty((p, p))
        h = 1e-5
        for j in range(p):
            tp = theta.copy(); tp[j] += h
            tm = theta.copy(); tm[j] -= h
            H[:, j] = (f(tp)[1] - f(tm)[1]) / (2 * h)
        H = 0.5 * (H + H.T)
        try:
            step = np.linalg.solve(H - 1e-10 * np.eye(p), grad)
        except np.linalg.LinAlgError:
            step = grad / max(np.abs(grad).max(), 1.0)
        direction = -step
        if grad @ direction <= 0:       # not an ascent direction; fall back
            direction = grad / max(np.abs(grad).max(), 1.0)
        scale = 1.0
        for _ in range(40):
            cand = theta + scale * direction
            ll_new, grad_new = f(cand)
            if np.isfinite(ll_new) and ll_new >= ll - 1e-12:
                break
            scale *= 0.5
        else:
            raise NonConvergence("line search failed to improve log-likelihood")
        theta, ll, grad = cand, ll_new, grad_new
        if np.abs(theta[cap_slice]).max(initial=0.0) > COEF_CAP:
            raise SeparationDetected(f"coefficient norm exceeded {COEF_CAP}")
    if np.abs(grad).max() < grad_tol:
        return theta
    raise NonConvergence(f"gradient norm {np.abs(grad).max():.2e} after {max_iter} iterations")


# -- binary logit ------------------------------------------------------------

def _logit_loglik_grad(theta, d, M, w):
    eta = M @ theta
    p = _sigmoid(eta)
    wtot = w.sum()
    ll = float(w @ (d * np.log(np.clip(p, 1e-300, None))
                    + (1 - d) * np.log(np.clip(1 - p, 1e-300, None)))) / wtot
    grad = M.T @ (w * (d - p)) / wtot
    return ll, grad


def fit_logit(d, X=None, weights=None) -> LogitModel:
    """Binary logistic MLE; intercept included automatically."""
    d = np.asarray(d, dtype=float)
    n = len(d)
    X = _as_design(X, n)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if X.shape[1] == 0:
        pbar = float(w @ d) / w.sum()
        if pbar <= 0 or pbar >= 1:
            raise SeparationDetected("all labels identical")
        return LogitModel((float(_logit(pbar)),))
    M = np.hstack([np.ones((n, 1)), X])
    _check_rank(M)
    theta = np.zeros(M.shape[1])
    theta = _newton(lambda t: _logit_loglik_grad(t, d, M, w), theta)
    return LogitModel(tuple(theta))


# -- multinomial logit -------------------------------------------------------

def _mnlogit_loglik_grad(theta, gidx, M, w, G):
    n, q = M.shape
    B = theta.reshape(G - 1, q)
    scores = np.hstack([np.zeros((n, 1)), M @ B.T])
    scores -= scores.max(axis=1, keepdims=True)
    e = np.exp(scores)
    P = e / e.sum(axis=1, keepdims=True)
    py = np.clip(P[np.arange(n), gidx], 1e-300, None)
    wtot = w.sum()
    ll = float(w @ np.log(py)) / wtot
    grad = np.empty((G - 1, q))
    for g in range(1, G):
        resid = w * ((gidx == g).astype(float) - P[:, g])
        grad[g - 1] = M.T @ resid / wtot
    return ll, grad.ravel()


def fit_multinomial_logit(g, X=None, weights=None, classes=None) -> MultinomialLogitModel:
    """Multinomial-logit MLE; the first entry of ``classes`` is the reference
    class whose coefficients are fixed at zero."""
    g = list(g)
    n = len(g)
    X = _as_design(X, n)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if classes is None:
        classes = sorted(set(g))
    classes = tuple(classes)
    G = len(classes)
    if G < 2:
        raise TooFewCategories("need at least 2 classes")
    lookup = {c: i for i, c in enumerate(classes)}
    gidx = np.array([lookup[v] for v in g])

    if X.shape[1] == 0:
        shares = np.array([w[gidx == i].sum() for i in range(G)]) / w.sum()
        shares = np.clip(shares, 1e-12, None)
        coef = tuple((float(np.log(shares[i] / shares[0])),) for i in range(1, G))
        return MultinomialLogitModel(classes, coef)

    M = np.hstack([np.ones((n, 1)), X])
    _check_rank(M)
    theta = np.zeros((G - 1) * M.shape[1])
    theta = _newton(lambda t: _mnlogit_loglik_grad(t, gidx, M, w, G), theta)
    B = theta.reshape(G - 1, M.shape[1])
    return MultinomialLogitModel(classes, tuple(tuple(row) for row in B))
