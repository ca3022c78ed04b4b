"""Reanalysis of a classic taste-testing experiment.

The bundled dataset records 126 tasters who scored one of three product
formulations (arms C, D, E) on a five-point ordinal scale.  Treating each
pairwise comparison as a two-arm randomized experiment, we estimate the
sharp bounds on tau and eta and attach bootstrap confidence intervals for
the identified interval.

Arm E stochastically dominates arm C (every upper-tail probability is at
least as large), so the upper bound for tau is exactly 1.  E versus D shows
no dominance, yet the lower confidence limit for (tau_I, tau_U) still
exceeds 1/2 -- evidence that E is the better formulation even though the
sign of the effect is not point-identified.

Run:  python3 demos/03_taste_test_analysis.py
"""

from ordbounds import (
    bootstrap_bounds_ci,
    bootstrap_pair_ci_with_independent,
    bradley_counts,
    bradley_records,
    estimate_randomized,
)


def analyze(treated, control):
    recs = bradley_records(treated=treated, control=control)
    rep = estimate_randomized(recs).report
    print(f"== {treated} vs {control} ==")
    print(f"  tau: L={rep.tau_L:.3f}  I={rep.tau_I:.3f}  U={rep.tau_U:.3f}"
          f"   dominance={rep.dominance}")
    print(f"  eta: L={rep.eta_L:.3f}  I={rep.eta_I:.3f}  U={rep.eta_U:.3f}")
    for estimand in ("tau", "eta"):
        ci = bootstrap_bounds_ci(recs, estimand=estimand, n_boot=2000,
                                 seed=7, method="normal")
        ci_i = bootstrap_pair_ci_with_independent(recs, estimand=estimand,
                                                  n_boot=2000, seed=7,
                                                  method="normal")
        print(f"  95% CI for ({estimand}_L, {estimand}_U): "
              f"({ci.ci_low:.3f}, {ci.ci_high:.3f})")
        print(f"  95% CI for ({estimand}_I, {estimand}_U): "
              f"({ci_i.ci_low:.3f}, {ci_i.ci_high:.3f})")
    print()


def main():
    counts = bradley_counts()
    print("arm counts by outcome category (0=terrible .. 4=excellent):")
    for arm, row in counts.items():
        print(f"  {arm}: {row}")
    print()
    analyze("E", "C")
    analyze("E", "D")


if __name__ == "__main__":
    main()
