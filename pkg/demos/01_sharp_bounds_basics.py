"""Sharp bounds on tau = pr{Y(1) >= Y(0)} and eta = pr{Y(1) > Y(0)}.

Two arms of an ordinal experiment only reveal the marginal distributions of
the potential outcomes, so tau and eta are interval-identified.  This demo
computes the closed-form sharp bounds for two three-category distributions:
one where neither arm stochastically dominates (the identified interval for
tau straddles 1/2, so the data cannot even settle the sign of the effect),
and one with dominance (where the upper bound reaches 1).

Run:  python3 demos/01_sharp_bounds_basics.py
"""

from fractions import Fraction as F

from ordbounds import MarginalDistribution, MarginalPair, full_report


def show(name, pair):
    rep = full_report(pair)
    print(f"== {name} ==")
    print(f"  treated marginal: {[str(v) for v in pair.treated.probs]}")
    print(f"  control marginal: {[str(v) for v in pair.control.probs]}")
    print(f"  tau in [{rep.tau_L}, {rep.tau_U}]  (independent coupling: {rep.tau_I})")
    print(f"  eta in [{rep.eta_L}, {rep.eta_U}]  (independent coupling: {rep.eta_I})")
    print(f"  treated arm stochastically dominates: {rep.dominance}")
    print()


def main():
    # exact arithmetic: pass Fractions and every bound comes back as a Fraction
    no_dominance = MarginalPair(
        MarginalDistribution((F(1, 5), F(3, 5), F(1, 5))),
        MarginalDistribution((F(2, 5), F(1, 5), F(2, 5))),
    )
    show("no dominance", no_dominance)

    dominance = MarginalPair(
        MarginalDistribution((F(1, 5), F(1, 5), F(3, 5))),
        MarginalDistribution((F(3, 5), F(1, 5), F(1, 5))),
    )
    show("treated dominates control", dominance)

    # float inputs work identically (bounds come back as floats)
    floats = MarginalPair(
        MarginalDistribution((0.1, 0.2, 0.3, 0.4)),
        MarginalDistribution((0.4, 0.3, 0.2, 0.1)),
    )
    show("four categories, float mode", floats)


if __name__ == "__main__":
    main()
