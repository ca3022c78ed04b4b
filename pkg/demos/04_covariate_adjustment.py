"""Covariate adjustment tightens the identified interval.

Conditioning on covariates and averaging the conditional sharp bounds gives
an interval nested inside the unadjusted one: the bounds functional is
convex in the marginals, so mixing loses information.  This demo shows the
phenomenon twice -- first with exact arithmetic on a two-stratum population,
then with estimated proportional-odds outcome models on simulated data from
an observational design, where inverse-propensity weighting is also needed
to deconfound the marginals.

Run:  python3 demos/04_covariate_adjustment.py
"""

from fractions import Fraction as F

import numpy as np

from ordbounds import (
    MarginalDistribution,
    MarginalPair,
    UnitRecord,
    adjusted_bounds_from_strata,
    estimate_adjusted,
    estimate_ipw,
    estimate_randomized,
    full_report,
)


def exact_example():
    stratum_a = MarginalPair(
        MarginalDistribution((F(1, 5), F(3, 5), F(1, 5))),
        MarginalDistribution((F(2, 5), F(1, 5), F(2, 5))),
    )
    stratum_b = MarginalPair(
        MarginalDistribution((F(1, 5), F(1, 5), F(3, 5))),
        MarginalDistribution((F(3, 5), F(1, 5), F(1, 5))),
    )
    adj = adjusted_bounds_from_strata([(F(1, 2), stratum_a), (F(1, 2), stratum_b)])
    pooled = MarginalPair(
        MarginalDistribution((F(1, 5), F(2, 5), F(2, 5))),
        MarginalDistribution((F(1, 2), F(1, 5), F(3, 10))),
    )
    unadj = full_report(pooled)
    print("== exact two-stratum population ==")
    print(f"  unadjusted tau bounds: [{unadj.tau_L}, {unadj.tau_U}]")
    print(f"  adjusted   tau bounds: [{adj.tau_L}, {adj.tau_U}]  (strictly tighter)")
    print()


def simulated_example():
    rng = np.random.default_rng(3)
    recs = []
    for _ in range(5000):
        s = int(rng.integers(0, 2))
        e = 0.7 if s else 0.3            # confounded assignment
        z = int(rng.uniform() < e)
        u = rng.logistic() + 0.9 * s - 0.8 * z
        y = int(u > -0.5) + int(u > 1.0)
        recs.append(UnitRecord(z=z, y=y, x=(float(s),)))
    naive = estimate_randomized(recs)
    ipw = estimate_ipw(recs)             # fits a propensity model on x
    disc = estimate_adjusted(recs, strata="discrete")
    model = estimate_adjusted(recs, strata="model")
    print("== simulated confounded design (n=5000) ==")
    for name, est in (("naive", naive), ("ipw", ipw),
                      ("stratified", disc), ("model-adjusted", model)):
        r = est.report
        print(f"  {name:15s} tau bounds: [{r.tau_L:.3f}, {r.tau_U:.3f}]")
    print("  (ipw deconfounds the marginals; stratified/model adjustment also")
    print("   tightens the interval by averaging conditional bounds)")


def main():
    exact_example()
    simulated_example()


if __name__ == "__main__":
    main()
