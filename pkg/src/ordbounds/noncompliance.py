"""Principal-strata analysis for randomized experiments with noncompliance.

Assumptions throughout: complete randomization, exclusion restriction, and
either monotonicity (no defiers) or strong monotonicity (no defiers and no
always-takers).  Under these, always-takers and never-takers have equal
potential outcomes across arms, so the causal question reduces to the
compliers, whose treated/control marginals are identified as mixtures.

Estimation is by moments (direct mixture subtraction) or maximum likelihood
via EM, optionally with covariate models (multinomial logit for the stratum,
proportional odds for the outcomes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundsReport, eta_bounds, full_report, tau_bounds
from .distributions import MarginalDistribution, MarginalPair
from .estimation import UnitRecord, conditional_report_from_models
from .exceptions import (
    DefiersObserved,
    DegenerateInit,
    InconsistentInputs,
    NoCompliers,
    NonConvergence,
)
from .models import (
    CumulativeLogitModel,
    MultinomialLogitModel,
    fit_cumulative_logit,
    fit_multinomial_logit,
)


@dataclass(frozen=True)
class StrataModel:
    """Stratum proportions and per-stratum outcome marginals.

    a_marginal / n_marginal are shared across arms (exclusion restriction);
    pi_a is identically 0 under strong monotonicity.
    """

    pi_a: float
    pi_c: float
    pi_n: float
    a_marginal: MarginalDistribution
    n_marginal: MarginalDistribution
    c_treated: MarginalDistribution
    c_control: MarginalDistribution
    negative_cells_clipped: bool = False

    def __post_init__(self):
        if min(self.pi_a, self.pi_c, self.pi_n) < -1e-9:
            raise ValueError("stratum probabilities must be nonnegative")
        if abs(self.pi_a + self.pi_c + self.pi_n - 1) > 1e-9:
            raise ValueError("stratum probabilities must sum to 1")

    @property
    def J(self) -> int:
        return self.c_treated.J

    def complier_pair(self) -> MarginalPair:
        return MarginalPair(self.c_treated, self.c_control)

    def mixture_pair(self) -> MarginalPair:
        """Whole-population marginals implied by the mixture."""
        a = self.a_marginal.probs
        n = self.n_marginal.probs
        c1 = self.c_treated.probs
        c0 = self.c_control.probs
        p1 = tuple(self.pi_a * a[j] + self.pi_c * c1[j] + self.pi_n * n[j] for j in range(self.J))
        p0 = tuple(self.pi_a * a[j] + self.pi_c * c0[j] + self.pi_n * n[j] for j in range(self.J))
        return MarginalPair(MarginalDistribution(p1), MarginalDistribution(p0))


@dataclass(frozen=True)
class ComplierBoundsReport:
    complier: BoundsReport
    pi_c: float
    tau_sharpened: tuple  # (tau_L'', tau_U'')
    eta_sharpened: tuple  # (eta_L'', eta_U'')


def complier_bounds(s: StrataModel) -> ComplierBoundsReport:
    """Sharp bounds for the complier estimands plus the sharpened population
    bounds they imply."""
    if s.pi_c <= 0:
        raise NoCompliers("pi_c must be positive")
    rep = full_report(s.complier_pair())
    pc = s.pi_c
    return ComplierBoundsReport(
        complier=rep,
        pi_c=pc,
        tau_sharpened=(pc * rep.tau_L + 1 - pc, pc * rep.tau_U + 1 - pc),
        eta_sharpened=(pc * rep.eta_L, pc * rep.eta_U),
    )


def estimands_relation(population_value, pi_c, estimand: str = "tau"):
    """Map a population estimand to its complier counterpart.

    tau_c = tau/pi_c - (1 - pi_c)/pi_c; eta_c = eta/pi_c.
    """
    if pi_c <= 0:
        raise NoCompliers("pi_c must be positive")
    if estimand == "tau":
        value = population_value / pi_c - (1 - pi_c) / pi_c
    elif estimand == "eta":
        value = population_value / pi_c
    else:
        raise ValueError(f"unknown estimand {estimand!r}")
    if value < -1e-9 or value > 1 + 1e-9:
        raise InconsistentInputs(
            f"{estimand}_c = {value} outside [0, 1]; inputs are incompatible"
        )
    return min(max(value, 0 * value), 1)


def _cells(records, J):
    """Counts n[z][d][y]."""
    counts = np.zeros((2, 2, J))
    for r in records:
        if r.d is None:
            raise ValueError("records must carry the treatment-received field d")
        counts[int(r.z), int(r.d), int(r.y)] += 1
    return counts


def _freq(v):
    t = v.sum()
    return v / t if t > 0 else np.full(len(v), 1.0 / len(v))


def moment_identify(records, monotonicity: str = "standard", J: int | None = None) -> StrataModel:
    """Method-of-moments strata identification.

    Complier marginals obtained by mixture subtraction can be negative in
    finite samples; they are then clipped, renormalized, and flagged via
    negative_cells_clipped.
    """
    if monotonicity not in ("standard", "strong"):
        raise ValueError(f"unknown monotonicity mode {monotonicity!r}")
    if J is None:
        J = max(r.y for r in records) + 1
    counts = _cells(records, J)
    n1 = counts[1].sum()
    n0 = counts[0].sum()
    if monotonicity == "strong" and counts[0, 1].sum() > 0:
        raise DefiersObserved("z=0, d=1 units are impossible under strong monotonicity")
    pi_a = counts[0, 1].sum() / n0
    pi_n = counts[1, 0].sum() / n1
    pi_c = 1 - pi_a - pi_n
    if pi_c <= 0:
        raise NoCompliers(f"moment estimate pi_c = {pi_c} <= 0")
    a_m = _freq(counts[0, 1])
    n_m = _freq(counts[1, 0])
    # mixture subtraction in the two mixed cells
    c1 = counts[1, 1] / n1 - pi_a * a_m
    c0 = counts[0, 0] / n0 - pi_n * n_m
    clipped = bool((c1 < -1e-12).any() or (c0 < -1e-12).any())
    c1 = np.clip(c1, 0.0, None)
    c0 = np.clip(c0, 0.0, None)
    return StrataModel(
        pi_a=float(pi_a), pi_c=float(pi_c), pi_n=float(pi_n),
        a_marginal=MarginalDistribution(tuple(a_m)),
        n_marginal=MarginalDistribution(tuple(n_m)),
        c_treated=MarginalDistribution(tuple(_freq(c1))),
        c_control=MarginalDistribution(tuple(_freq(c0))),
        negative_cells_clipped=clipped,
    )


def em_loglik(counts: np.ndarray, pi, a, n, c1, c0) -> float:
    """Observed-data log-likelihood of the cell parameters (up to the
    assignment-probability constant)."""
    pi_a, pi_c, pi_n = pi
    eps = 1e-300
    ll = 0.0
    ll += counts[1, 0] @ np.log(np.maximum(pi_n * n, eps))
    ll += counts[0, 1] @ np.log(np.maximum(pi_a * a, eps))
    ll += counts[1, 1] @ np.log(np.maximum(pi_a * a + pi_c * c1, eps))
    ll += counts[0, 0] @ np.log(np.maximum(pi_n * n + pi_c * c0, eps))
    return float(ll)


def em_fit(records, monotonicity: str = "standard", init: StrataModel | None = None,
           max_iter: int = 1000, tol: float = 1e-8, J: int | None = None,
           track_loglik: bool = False):
    """Maximum-likelihood strata fit by EM on the four (z, d) cells.

    Returns the fitted StrataModel (and the per-iteration log-likelihood
    trace when track_loglik is True).
    """
    if J is None:
        J = max(r.y for r in records) + 1
    counts = _cells(records, J)
    if monotonicity == "strong" and counts[0, 1].sum() > 0:
        raise DefiersObserved("z=0, d=1 units are impossible under strong monotonicity")
    N = counts.sum()

    if init is None:
        mom = moment_identify(records, monotonicity=monotonicity, J=J)
        pi = np.array([mom.pi_a, mom.pi_c, mom.pi_n])
        # clip interior zeros away, but keep structurally absent strata at 0
        for g, cell in ((0, counts[0, 1]), (2, counts[1, 0])):
            if pi[g] < 0.01 and cell.sum() > 0:
                pi[g] = 0.01
        pi = pi / pi.sum()
        a = np.full(J, 1.0 / J)
        n = np.full(J, 1.0 / J)
        c1 = np.full(J, 1.0 / J)
        c0 = np.full(J, 1.0 / J)
    else:
        pi = np.array([init.pi_a, init.pi_c, init.pi_n])
        if pi[1] <= 0 or abs(pi.sum() - 1) > 1e-6:
            raise DegenerateInit("init must have pi_c > 0 and proportions summing to 1")
        a = init.a_marginal.as_array()
        n = init.n_marginal.as_array()
        c1 = init.c_treated.as_array()
        c0 = init.c_control.as_array()

    pi, a, n, c1, c0, trace = _em_from_counts(counts, pi, a, n, c1, c0, max_iter, tol)

    model = StrataModel(
        pi_a=float(pi[0]), pi_c=float(pi[1]), pi_n=float(pi[2]),
        a_marginal=MarginalDistribution(tuple(a)),
        n_marginal=MarginalDistribution(tuple(n)),
        c_treated=MarginalDistribution(tuple(c1)),
        c_control=MarginalDistribution(tuple(c0)),
    )
    return (model, trace) if track_loglik else model


def _em_from_counts(counts, pi, a, n, c1, c0, max_iter, tol):
    """Core EM loop on the (z, d, y) count tensor; returns the final
    parameter arrays and the log-likelihood trace."""
    N = counts.sum()
    trace = []
    ll_old = em_loglik(counts, pi, a, n, c1, c0)
    for _ in range(max_iter):
        # E-step: posterior stratum weights in the two mixed cells
        num_a = pi[0] * a
        num_c1 = pi[1] * c1
        den1 = np.maximum(num_a + num_c1, 1e-300)
        w_a = num_a / den1
        num_n = pi[2] * n
        num_c0 = pi[1] * c0
        den0 = np.maximum(num_n + num_c0, 1e-300)
        w_n = num_n / den0

        ea = counts[0, 1] + counts[1, 1] * w_a
        en = counts[1, 0] + counts[0, 0] * w_n
        ec1 = counts[1, 1] * (1 - w_a)
        ec0 = counts[0, 0] * (1 - w_n)

        # M-step: weighted-frequency updates
        pi = np.array([ea.sum(), ec1.sum() + ec0.sum(), en.sum()]) / N
        a = _freq(ea)
        n = _freq(en)
        c1 = _freq(ec1)
        c0 = _freq(ec0)

        ll = em_loglik(counts, pi, a, n, c1, c0)
        trace.append(ll)
        if abs(ll - ll_old) < tol:
            return pi, a, n, c1, c0, trace
        ll_old = ll
    raise NonConvergence(f"EM did not converge in {max_iter} iterations")


# -- EM with covariates ------------------------------------------------------

@dataclass
class CovariateStrataFit:
    """Fitted covariate models for the strata and per-stratum outcomes."""

    g_model: MultinomialLogitModel           # classes ('c', 'a', 'n') or ('c', 'n')
    a_model: CumulativeLogitModel | None
    n_model: CumulativeLogitModel
    c_treated_model: CumulativeLogitModel
    c_control_model: CumulativeLogitModel
    loglik: float
    n_iter: int
    loglik_trace: list = field(default_factory=list)

    def pi(self, X) -> np.ndarray:
        """Stratum probabilities per row of X, columns ordered as g_model.classes."""
        return self.g_model.predict_proba(np.asarray(X, dtype=float))

    def pi_c(self, X) -> np.ndarray:
        return self.pi(X)[:, 0]

    def complier_report(self, X) -> BoundsReport:
        """Covariate-adjusted complier bounds: conditional bounds averaged
        with pi_c(x) weights."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        return conditional_report_from_models(
            self.c_treated_model, self.c_control_model, X, weights=self.pi_c(X)
        )


def _expand_records(records, J):
    z = np.array([r.z for r in records], dtype=int)
    d = np.array([r.d for r in records], dtype=int)
    y = np.array([r.y for r in records], dtype=int)
    if any(r.x is None for r in records):
        X = np.empty((len(records), 0))
    else:
        X = np.array([np.atleast_1d(r.x) for r in records], dtype=float)
    return z, d, y, X


def em_fit_with_covariates(records, monotonicity: str = "standard",
                           max_iter: int = 500, tol: float = 1e-7,
                           init: CovariateStrataFit | None = None,
                           J: int | None = None) -> CovariateStrataFit:
    """EM alternating posterior stratum weights with weighted multinomial-logit
    and proportional-odds fits.

    The observed-data log-likelihood is non-decreasing across iterations
    (each M-step maximizes the weighted fits to convergence).
    """
    if J is None:
        J = max(r.y for r in records) + 1
    z, d, y, X = _expand_records(records, J)
    has_a = monotonicity == "standard"
    if not has_a and np.any((z == 0) & (d == 1)):
        raise DefiersObserved("z=0, d=1 units are impossible under strong monotonicity")
    classes = ("c", "a", "n") if has_a else ("c", "n")

    cell_at = (z == 0) & (d == 1)    # always-takers for sure
    cell_nt = (z == 1) & (d == 0)    # never-takers for sure
    cell_t = (z == 1) & (d == 1)     # a or c, treated outcome
    cell_c = (z == 0) & (d == 0)     # n or c, control outcome
    if has_a and not cell_at.any() and not cell_t.any():
        raise DegenerateInit("no units with d=1")

    n_units = len(records)
    ia = np.nonzero(cell_at)[0]
    it = np.nonzero(cell_t)[0]
    inn = np.nonzero(cell_nt)[0]
    ic = np.nonzero(cell_c)[0]

    if init is not None:
        fit = init
    else:
        # warm start from the covariate-free EM
        flat = em_fit(records, monotonicity=monotonicity, J=J)
        fit = None

    def outcome_probs(model, idx):
        return model.predict_proba(X[idx])[np.arange(len(idx)), y[idx]]

    prev_ll = -np.inf
    trace = []
    w_a_t = None
    for it_num in range(1, max_iter + 1):
        if fit is None:
            # initial E-step from the covariate-free fit
            pa = flat.a_marginal.as_array()[y]
            pn = flat.n_marginal.as_array()[y]
            pc1 = flat.c_treated.as_array()[y]
            pc0 = flat.c_control.as_array()[y]
            pia = np.full(n_units, flat.pi_a)
            pic = np.full(n_units, flat.pi_c)
            pin = np.full(n_units, flat.pi_n)
        else:
            P = fit.pi(X)
            pic = P[:, 0]
            if has_a:
                pia = P[:, 1]
                pin = P[:, 2]
            else:
                pia = np.zeros(n_units)
                pin = P[:, 1]
            pa = np.zeros(n_units)
            if has_a and fit.a_model is not None:
                probs_a = fit.a_model.predict_proba(X)
                pa = probs_a[np.arange(n_units), y]
            pn = fit.n_model.predict_proba(X)[np.arange(n_units), y]
            pc1 = fit.c_treated_model.predict_proba(X)[np.arange(n_units), y]
            pc0 = fit.c_control_model.predict_proba(X)[np.arange(n_units), y]

        # E-step posteriors in the mixed cells
        w_a_t = np.zeros(len(it))
        if has_a and len(it):
            num = pia[it] * pa[it]
            den = np.maximum(num + pic[it] * pc1[it], 1e-300)
            w_a_t = num / den
        num = pin[ic] * pn[ic]
        den = np.maximum(num + pic[ic] * pc0[ic], 1e-300)
        w_n_c = num / den

        # M-step: weighted multinomial logit for G
        rows, labels, weights = [], [], []
        if has_a:
            rows.append(ia); labels.append(np.full(len(ia), "a")); weights.append(np.ones(len(ia)))
            rows.append(it); labels.append(np.full(len(it), "a")); weights.append(w_a_t)
        rows.append(it); labels.append(np.full(len(it), "c")); weights.append(1 - w_a_t)
        rows.append(inn); labels.append(np.full(len(inn), "n")); weights.append(np.ones(len(inn)))
        rows.append(ic); labels.append(np.full(len(ic), "n")); weights.append(w_n_c)
        rows.append(ic); labels.append(np.full(len(ic), "c")); weights.append(1 - w_n_c)
        ridx = np.concatenate(rows)
        lab = np.concatenate(labels)
        wts = np.concatenate(weights)
        keep = wts > 1e-12
        g_model = fit_multinomial_logit(lab[keep], X[ridx[keep]], weights=wts[keep],
                                        classes=classes)

        a_model = None
        if has_a:
            a_idx = np.concatenate([ia, it])
            a_w = np.concatenate([np.ones(len(ia)), w_a_t])
            a_model = _safe_cumlogit(y[a_idx], X[a_idx], a_w, J)
        n_idx = np.concatenate([inn, ic])
        n_w = np.concatenate([np.ones(len(inn)), w_n_c])
        n_model = _safe_cumlogit(y[n_idx], X[n_idx], n_w, J)
        c1_model = _safe_cumlogit(y[it], X[it], 1 - w_a_t, J)
        c0_model = _safe_cumlogit(y[ic], X[ic], 1 - w_n_c, J)

        # observed-data log-likelihood
        P = g_model.predict_proba(X)
        pic = P[:, 0]
        pia = P[:, 1] if has_a else np.zeros(n_units)
        pin = P[:, -1]
        eps = 1e-300
        ll = 0.0
        if has_a:
            probs_a = a_model.predict_proba(X)
            pa_all = probs_a[np.arange(n_units), y]
            ll += np.log(np.maximum(pia[ia] * pa_all[ia], eps)).sum()
            mix_t = pia[it] * pa_all[it]
        else:
            mix_t = 0.0
        pn_all = n_model.predict_proba(X)[np.arange(n_units), y]
        pc1_all = c1_model.predict_proba(X)[np.arange(n_units), y]
        pc0_all = c0_model.predict_proba(X)[np.arange(n_units), y]
        ll += np.log(np.maximum(pin[inn] * pn_all[inn], eps)).sum()
        ll += np.log(np.maximum(mix_t + pic[it] * pc1_all[it], eps)).sum()
        ll += np.log(np.maximum(pin[ic] * pn_all[ic] + pic[ic] * pc0_all[ic], eps)).sum()
        ll = float(ll)
        trace.append(ll)

        fit = CovariateStrataFit(
            g_model=g_model, a_model=a_model, n_model=n_model,
            c_treated_model=c1_model, c_control_model=c0_model,
            loglik=ll, n_iter=it_num, loglik_trace=trace,
        )
        if abs(ll - prev_ll) < tol:
            return fit
        prev_ll = ll
    raise NonConvergence(f"covariate EM did not converge in {max_iter} iterations")


def _safe_cumlogit(y, X, w, J):
    """Weighted proportional-odds fit tolerant of degenerate weights."""
    from .exceptions import FitError

    wsum = w.sum()
    if wsum <= 1e-10 or len(np.unique(y[w > 1e-12])) < 2:
        # effectively unidentified: fall back to a near-degenerate intercept fit
        counts = np.bincount(y, weights=np.maximum(w, 1e-12), minlength=J)
        cum = np.clip(np.cumsum(counts)[:-1] / counts.sum(), 1e-9, 1 - 1e-9)
        cum = np.maximum.accumulate(cum + 1e-9 * np.arange(J - 1))
        cuts = np.log(cum) - np.log1p(-cum)
        return CumulativeLogitModel(tuple(cuts), tuple(0.0 for _ in range(X.shape[1])))
    try:
        fit = fit_cumulative_logit(_pad_y(y, w, J), _pad_X(X, J), weights=_pad_w(w, J))
        if len(fit.cutpoints) < J - 1:
            raise FitError("category dropped")
        return fit
    except FitError:
        counts = np.bincount(y, weights=w, minlength=J) + 1e-9
        cum = np.clip(np.cumsum(counts)[:-1] / counts.sum(), 1e-9, 1 - 1e-9)
        cum = np.maximum.accumulate(cum + 1e-9 * np.arange(J - 1))
        cuts = np.log(cum) - np.log1p(-cum)
        return CumulativeLogitModel(tuple(cuts), tuple(0.0 for _ in range(X.shape[1])))


def _pad_y(y, w, J):
    """Append zero-weight pseudo-observations so every category 0..J-1 is
    present and the fitted model has J categories."""
    return np.concatenate([y, np.arange(J)])


def _pad_X(X, J):
    return np.vstack([X, np.zeros((J, X.shape[1]))])


def _pad_w(w, J):
    return np.concatenate([w, np.zeros(J)])
