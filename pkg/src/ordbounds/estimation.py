"""Point estimation of the sharp bounds from unit-level data.

Three designs:

* randomized -- within-arm relative frequencies plugged into the closed
  forms;
* ipw -- unconfounded observational studies; marginals estimated by
  normalized (Hajek) inverse-propensity weighting so they are always valid
  distributions;
* adjusted -- covariate-adjusted bounds: conditional bounds computed per
  covariate level (discrete strata or per-arm proportional-odds fits) and
  averaged over the empirical covariate distribution of all units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import BoundsReport, full_report
from .distributions import (
    MarginalDistribution,
    MarginalPair,
    delta_effects,
    empirical_marginals,
    stochastically_dominates,
)
from .exceptions import EmptyArm, ExtremePropensity, StratumMissingArm
from .models import CumulativeLogitModel, fit_cumulative_logit, fit_logit


@dataclass(frozen=True)
class UnitRecord:
    """One experimental unit.

    z: treatment assignment (0/1); y: ordinal outcome in 0..J-1;
    d: treatment received (0/1), present for all units or none;
    x: covariate vector (tuple), optional.
    """

    z: int
    y: int
    d: int | None = None
    x: tuple | None = None


@dataclass(frozen=True)
class EstimatedBounds:
    report: BoundsReport
    design: str
    n_treated: int
    n_control: int


def _report_from_conditional(weights, pairs) -> BoundsReport:
    """Average conditional bounds over a covariate distribution.

    weights must sum to 1; pairs are the conditional MarginalPairs.  The
    deltas/dominance fields describe the implied population marginals.
    """
    from .bounds import eta_bounds, independent_estimands, point_identified, tau_bounds

    tau_l = tau_u = eta_l = eta_u = tau_i = eta_i = 0
    J = pairs[0].J
    p1 = [0] * J
    p0 = [0] * J
    for w, pair in zip(weights, pairs):
        tl, tu = tau_bounds(pair)
        el, eu = eta_bounds(pair)
        ti, ei = independent_estimands(pair)
        tau_l += w * tl
        tau_u += w * tu
        eta_l += w * el
        eta_u += w * eu
        tau_i += w * ti
        eta_i += w * ei
        for j in range(J):
            p1[j] += w * pair.treated.probs[j]
            p0[j] += w * pair.control.probs[j]
    pooled = MarginalPair(MarginalDistribution(tuple(p1)), MarginalDistribution(tuple(p0)))
    dv = delta_effects(pooled)
    d = dv.deltas
    lower_terms = [p + dj for p, dj in zip(pooled.control.probs, d)]
    exact = pooled.exact
    tol = 0 if exact else 1e-12
    return BoundsReport(
        deltas=dv,
        tau_L=tau_l, tau_I=tau_i, tau_U=tau_u,
        eta_L=eta_l, eta_I=eta_i, eta_U=eta_u,
        dominance=stochastically_dominates(pooled),
        tau_point_identified=bool(tau_u - tau_l <= tol),
        eta_point_identified=bool(eta_u - eta_l <= tol),
        argmin_delta_index=min(j for j, dj in enumerate(d) if dj == min(d)),
        argmax_lower_index=min(j for j, t in enumerate(lower_terms) if t == max(lower_terms)),
    )


def adjusted_bounds_from_strata(strata) -> BoundsReport:
    """Population-level adjusted bounds from (weight, MarginalPair) strata.

    Exact when weights and marginals are Fractions.
    """
    weights = [w for w, _ in strata]
    pairs = [p for _, p in strata]
    total = sum(weights)
    if not (abs(total - 1) <= 1e-9):
        raise ValueError(f"stratum weights sum to {total}")
    return _report_from_conditional(weights, pairs)


def _arm_counts(records):
    n1 = sum(1 for r in records if r.z == 1)
    n0 = len(records) - n1
    return n1, n0


def estimate_randomized(records: Sequence[UnitRecord], J: int | None = None) -> EstimatedBounds:
    """Sample-analogue bounds for a completely randomized experiment."""
    m = empirical_marginals(records, J=J)
    n1, n0 = _arm_counts(records)
    return EstimatedBounds(full_report(m), "randomized", n1, n0)


def ipw_marginals(records, propensity=None, J: int | None = None, trim: float = 0.01) -> MarginalPair:
    """Hajek-weighted marginal estimates under unconfoundedness.

    propensity: a float (known constant), a per-unit array, or None to fit a
    logistic model of z on x.
    """
    z = np.array([r.z for r in records], dtype=float)
    y = np.array([r.y for r in records], dtype=int)
    if J is None:
        J = int(y.max()) + 1
    if z.sum() == 0 or z.sum() == len(z):
        raise EmptyArm("both arms required")
    if propensity is None:
        X = np.array([r.x for r in records], dtype=float)
        e = fit_logit(z, X).predict_proba(X)
    elif np.isscalar(propensity):
        e = np.full(len(z), float(propensity))
    else:
        e = np.asarray(propensity, dtype=float)
    bad = np.nonzero((e < trim) | (e > 1 - trim))[0]
    if bad.size:
        raise ExtremePropensity(bad.tolist())
    w1 = z / e
    w0 = (1 - z) / (1 - e)
    p1 = np.array([w1[y == k].sum() for k in range(J)])
    p0 = np.array([w0[y == l].sum() for l in range(J)])
    return MarginalPair(
        MarginalDistribution(tuple(p1 / p1.sum())),
        MarginalDistribution(tuple(p0 / p0.sum())),
    )


def estimate_ipw(records: Sequence[UnitRecord], propensity=None, J: int | None = None,
                 trim: float = 0.01) -> EstimatedBounds:
    m = ipw_marginals(records, propensity=propensity, J=J, trim=trim)
    n1, n0 = _arm_counts(records)
    return EstimatedBounds(full_report(m), "ipw", n1, n0)


def estimate_adjusted(records: Sequence[UnitRecord], strata: str = "discrete",
                      J: int | None = None) -> EstimatedBounds:
    """Covariate-adjusted bounds.

    strata="discrete": x values are stratum labels; every stratum must
    contain both arms; conditional bounds are weighted by stratum size.

    strata="model": per-arm proportional-odds fits on x; conditional bounds
    are averaged over all N units' covariates.
    """
    n1, n0 = _arm_counts(records)
    if n1 == 0 or n0 == 0:
        raise EmptyArm("both arms required")
    if J is None:
        J = max(r.y for r in records) + 1

    if strata == "discrete":
        groups: dict = {}
        for r in records:
            groups.setdefault(r.x, []).append(r)
        weights, pairs = [], []
        N = len(records)
        for key, members in sorted(groups.items(), key=lambda kv: str(kv[0])):
            m1, m0 = _arm_counts(members)
            if m1 == 0 or m0 == 0:
                raise StratumMissingArm(f"stratum {key!r} lacks one arm")
            weights.append(len(members) / N)
            pairs.append(empirical_marginals(members, J=J))
        report = _report_from_conditional(weights, pairs)
    elif strata == "model":
        X = np.array([r.x for r in records], dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.array([r.y for r in records], dtype=int)
        z = np.array([r.z for r in records], dtype=int)
        fit1 = fit_cumulative_logit(y[z == 1], X[z == 1])
        fit0 = fit_cumulative_logit(y[z == 0], X[z == 0])
        report = conditional_report_from_models(fit1, fit0, X, J=J)
    else:
        raise ValueError(f"unknown strata mode {strata!r}")
    return EstimatedBounds(report, "adjusted", n1, n0)


def conditional_report_from_models(fit1: CumulativeLogitModel, fit0: CumulativeLogitModel,
                                   X: np.ndarray, J: int | None = None,
                                   weights=None) -> BoundsReport:
    """Adjusted bounds from per-arm outcome models evaluated at rows of X."""
    from .bounds import (
        eta_bounds_array,
        independent_eta_array,
        independent_tau_array,
        tau_bounds_array,
    )

    p1 = fit1.predict_proba(X)
    p0 = fit0.predict_proba(X)
    Jm = max(p1.shape[1], p0.shape[1], J or 0)
    p1 = _pad(p1, Jm)
    p0 = _pad(p0, Jm)
    if weights is None:
        w = np.full(len(p1), 1.0 / len(p1))
    else:
        w = np.asarray(weights, dtype=float)
        w = w / w.sum()
    tl, tu = tau_bounds_array(p1, p0)
    el, eu = eta_bounds_array(p1, p0)
    ti = independent_tau_array(p1, p0)
    ei = independent_eta_array(p1, p0)
    pool1 = MarginalDistribution(tuple(w @ p1))
    pool0 = MarginalDistribution(tuple(w @ p0))
    pooled = MarginalPair(pool1, pool0)
    dv = delta_effects(pooled)
    d = dv.deltas
    lower_terms = [p + dj for p, dj in zip(pooled.control.probs, d)]
    tau_l, tau_u = float(w @ tl), float(w @ tu)
    eta_l, eta_u = float(w @ el), float(w @ eu)
    return BoundsReport(
        deltas=dv,
        tau_L=tau_l, tau_I=float(w @ ti), tau_U=tau_u,
        eta_L=eta_l, eta_I=float(w @ ei), eta_U=eta_u,
        dominance=stochastically_dominates(pooled),
        tau_point_identified=bool(tau_u - tau_l <= 1e-12),
        eta_point_identified=bool(eta_u - eta_l <= 1e-12),
        argmin_delta_index=min(j for j, dj in enumerate(d) if dj == min(d)),
        argmax_lower_index=min(j for j, t in enumerate(lower_terms) if t == max(lower_terms)),
    )


def _pad(p: np.ndarray, J: int) -> np.ndarray:
    if p.shape[1] == J:
        return p
    out = np.zeros((p.shape[0], J))
    out[:, : p.shape[1]] = p
    return out
