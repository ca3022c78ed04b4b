"""Closed-form sharp bounds on tau = pr{Y(1) >= Y(0)} and eta = pr{Y(1) > Y(0)}.

The bounds are functions of the marginal distributions only:

    tau_L = max_j (p0[j] + delta_j)        tau_U = 1 + min_j delta_j
    eta_L = max_j delta_j                  eta_U = 1 + min_j (delta_j - p1[j])

together with the independent-potential-outcome values tau_I, eta_I and the
support-set point-identification predicate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import (
    DeltaVector,
    MarginalPair,
    delta_effects,
    stochastically_dominates,
)


@dataclass(frozen=True)
class BoundsReport:
    deltas: DeltaVector
    tau_L: object
    tau_I: object
    tau_U: object
    eta_L: object
    eta_I: object
    eta_U: object
    dominance: bool
    tau_point_identified: bool
    eta_point_identified: bool
    argmin_delta_index: int   # j1 of the upper-bound construction
    argmax_lower_index: int   # j2 of the lower-bound construction


def tau_bounds(m: MarginalPair):
    d = delta_effects(m).deltas
    lower = max(p + dj for p, dj in zip(m.control.probs, d))
    upper = 1 + min(d)
    return lower, upper


def eta_bounds(m: MarginalPair):
    d = delta_effects(m).deltas
    lower = max(d)
    upper = 1 + min(dj - p for p, dj in zip(m.treated.probs, d))
    return lower, upper


def independent_estimands(m: MarginalPair):
    """(tau, eta) under independent potential outcomes."""
    p1, p0 = m.treated.probs, m.control.probs
    tau = sum(p1[k] * p0[l] for k in range(m.J) for l in range(k + 1))
    eta = sum(p1[k] * p0[l] for k in range(m.J) for l in range(k))
    return tau, eta


def _support(probs, tol):
    return [j for j, p in enumerate(probs) if p > tol]


def point_identified(m: MarginalPair, estimand: str = "tau") -> bool:
    """Support-set criterion for the lower and upper bounds to coincide.

    For tau the bounds differ iff some k1,k2 in supp(p1) and l1,l2 in supp(p0)
    satisfy k2 >= l2 > k1 >= l1 or l2 > k2 >= l1 > k1; for eta the two
    patterns have the roles of the k's and l's swapped.
    """
    if estimand not in ("tau", "eta"):
        raise ValueError(f"unknown estimand {estimand!r}")
    tol = 0 if m.exact else 1e-12
    K = _support(m.treated.probs, tol)
    L = _support(m.control.probs, tol)
    for k1 in K:
        for k2 in K:
            for l1 in L:
                for l2 in L:
                    if estimand == "tau":
                        if k2 >= l2 > k1 >= l1 or l2 > k2 >= l1 > k1:
                            return False
                    else:
                        if l2 >= k2 > l1 >= k1 or k2 > l2 >= k1 > l1:
                            return False
    return True


def full_report(m: MarginalPair) -> BoundsReport:
    dv = delta_effects(m)
    d = dv.deltas
    tau_l, tau_u = tau_bounds(m)
    eta_l, eta_u = eta_bounds(m)
    tau_i, eta_i = independent_estimands(m)
    lower_terms = [p + dj for p, dj in zip(m.control.probs, d)]
    j1 = min(j for j, dj in enumerate(d) if dj == min(d))
    j2 = min(j for j, t in enumerate(lower_terms) if t == max(lower_terms))
    return BoundsReport(
        deltas=dv,
        tau_L=tau_l, tau_I=tau_i, tau_U=tau_u,
        eta_L=eta_l, eta_I=eta_i, eta_U=eta_u,
        dominance=stochastically_dominates(m),
        tau_point_identified=point_identified(m, "tau"),
        eta_point_identified=point_identified(m, "eta"),
        argmin_delta_index=j1,
        argmax_lower_index=j2,
    )


# -- vectorized float helpers (bootstrap and simulation hot paths) ----------

def delta_array(p1: np.ndarray, p0: np.ndarray) -> np.ndarray:
    """Delta vectors for stacked marginals of shape (..., J)."""
    t1 = np.cumsum(p1[..., ::-1], axis=-1)[..., ::-1]
    t0 = np.cumsum(p0[..., ::-1], axis=-1)[..., ::-1]
    d = t1 - t0
    d[..., 0] = 0.0
    return d


def tau_bounds_array(p1: np.ndarray, p0: np.ndarray):
    d = delta_array(p1, p0)
    return (p0 + d).max(axis=-1), 1.0 + d.min(axis=-1)


def eta_bounds_array(p1: np.ndarray, p0: np.ndarray):
    d = delta_array(p1, p0)
    return d.max(axis=-1), 1.0 + (d - p1).min(axis=-1)


def independent_tau_array(p1: np.ndarray, p0: np.ndarray):
    """tau_I for stacked marginals; pairs (k, l) with k >= l."""
    J = p1.shape[-1]
    mask = np.tril(np.ones((J, J)))
    return np.einsum("...k,kl,...l->...", p1, mask, p0)


def independent_eta_array(p1: np.ndarray, p0: np.ndarray):
    J = p1.shape[-1]
    mask = np.tril(np.ones((J, J)), k=-1)
    return np.einsum("...k,kl,...l->...", p1, mask, p0)
