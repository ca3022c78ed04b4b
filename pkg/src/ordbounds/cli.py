"""Command-line interface.

Subcommands:

* bounds      closed-form sharp bounds from a pair of marginal vectors
* construct   extremal coupling matrices attaining the bounds
* analyze     estimation and bootstrap CIs from unit-level CSV data
* analyze-iv  complier analysis for encouragement designs with noncompliance
* simulate    Monte Carlo study summary rows
* oracle      linear programming over couplings with fixed margins

Unit-data CSV format: header row with columns ``z`` (0/1 assignment),
optional ``d`` (0/1 receipt), ``y`` (integer category), and any remaining
columns treated as numeric covariates.

Exit codes: 0 success, 2 input or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .bounds import full_report
from .distributions import MarginalDistribution, MarginalPair
from .estimation import UnitRecord
from .exceptions import (
    FitError,
    NonConvergence,
    OrdBoundsError,
    ReplicateFailure,
)

_NUMERICAL_ERRORS = (NonConvergence, FitError, ReplicateFailure)


def _jsonify(obj):
    """JSON-safe copy with floats at 17 significant digits."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return float(f"{float(obj):.17g}")
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.17g}")
    return obj


def _emit(payload, args):
    text = json.dumps(_jsonify(payload), indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _parse_vector(text: str) -> tuple:
    toks = [t.strip() for t in text.split(",") if t.strip()]
    if not toks:
        raise OrdBoundsError(f"empty probability vector: {text!r}")
    exact = all("/" in t for t in toks)
    try:
        return tuple(Fraction(t) if exact else float(t) for t in toks)
    except (ValueError, ZeroDivisionError) as e:
        raise OrdBoundsError(f"cannot parse probability vector {text!r}: {e}") from None


def _marginal_pair(args) -> MarginalPair:
    return MarginalPair(
        MarginalDistribution(_parse_vector(args.p1)),
        MarginalDistribution(_parse_vector(args.p0)),
    )


def _report_payload(report) -> dict:
    return {
        "j": len(report.deltas.deltas),
        "delta": list(report.deltas.deltas),
        "tau": {"lower": report.tau_L, "independent": report.tau_I, "upper": report.tau_U},
        "eta": {"lower": report.eta_L, "independent": report.eta_I, "upper": report.eta_U},
        "dominance": report.dominance,
        "point_identified": {
            "tau": report.tau_point_identified,
            "eta": report.eta_point_identified,
        },
    }


def _read_unit_csv(path: str, J: int | None):
    try:
        f = open(path, newline="")
    except OSError as e:
        raise OrdBoundsError(f"cannot open {path}: {e}") from None
    with f:
        reader = csv.DictReader(f)
        cols = reader.fieldnames or []
        if "z" not in cols or "y" not in cols:
            raise OrdBoundsError(f"{path}: CSV must have 'z' and 'y' columns, found {cols}")
        has_d = "d" in cols
        covs = [c for c in cols if c not in ("z", "d", "y")]
        records = []
        for i, row in enumerate(reader, start=2):
            try:
                records.append(UnitRecord(
                    z=int(row["z"]),
                    y=int(row["y"]),
                    d=int(row["d"]) if has_d else None,
                    x=tuple(float(row[c]) for c in covs) if covs else None,
                ))
            except (TypeError, ValueError) as e:
                raise OrdBoundsError(f"{path}:{i}: bad row: {e}") from None
    if not records:
        raise OrdBoundsError(f"{path}: no data rows")
    if J is not None and any(r.y >= J for r in records):
        raise OrdBoundsError(f"{path}: outcome exceeds --categories {J}")
    return records, covs


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ORDBOUNDS_SEED")
    return int(env) if env else 0


# -- subcommands -------------------------------------------------------------

def cmd_bounds(args):
    report = full_report(_marginal_pair(args))
    _emit(_report_payload(report), args)


def cmd_construct(args):
    from .coupling import extremal_coupling
    from .distributions import estimands_of_joint

    joint = extremal_coupling(_marginal_pair(args), args.target)
    tau, eta, alpha = estimands_of_joint(joint)
    if args.format == "csv":
        J = joint.J
        lines = ["," + ",".join(f"y0={l}" for l in range(J))]
        for k, row in enumerate(joint.matrix):
            lines.append(f"y1={k}," + ",".join(f"{float(v):.17g}" for v in row))
        text = "\n".join(lines)
        if args.out:
            with open(args.out, "w") as f:
                f.write(text + "\n")
        else:
            print(text)
        return
    _emit({
        "target": args.target,
        "matrix": [list(r) for r in joint.matrix],
        "row_margin": list(joint.row_margin().probs),
        "col_margin": list(joint.col_margin().probs),
        "tau": tau, "eta": eta, "alpha": alpha,
    }, args)


def cmd_analyze(args):
    from .estimation import estimate_adjusted, estimate_ipw, estimate_randomized
    from .inference import bootstrap_bounds_ci

    records, covs = _read_unit_csv(args.data, args.categories)
    if args.design == "randomized":
        est = estimate_randomized(records, J=args.categories)
    elif args.design == "ipw":
        if not covs:
            raise OrdBoundsError("--design ipw needs covariate columns")
        est = estimate_ipw(records, J=args.categories)
    else:
        est = estimate_adjusted(records, strata=args.strata, J=args.categories)

    payload = {
        "design": est.design,
        "n_treated": est.n_treated,
        "n_control": est.n_control,
        **_report_payload(est.report),
    }
    if args.bootstrap:
        seed = _seed(args)
        ci = {}
        for estimand in ("tau", "eta"):
            for lower, label in (("bound", estimand), ("independent", estimand + "_independent")):
                ir = bootstrap_bounds_ci(
                    records, estimator=args.design, estimand=estimand,
                    n_boot=args.bootstrap, level=args.alpha_level, seed=seed,
                    J=args.categories, lower=lower, method=args.ci_method,
                    **({"strata": args.strata} if args.design == "adjusted" else {}),
                )
                ci[label] = {"low": ir.ci_low, "high": ir.ci_high}
        payload["ci"] = ci
        payload["n_boot"] = args.bootstrap
        payload["level"] = args.alpha_level
        payload["seed"] = seed
    _emit(payload, args)


def cmd_analyze_iv(args):
    from .inference import bootstrap_bounds_ci
    from .noncompliance import (
        complier_bounds,
        em_fit,
        em_fit_with_covariates,
        moment_identify,
    )

    records, covs = _read_unit_csv(args.data, args.categories)
    if any(r.d is None for r in records):
        raise OrdBoundsError("analyze-iv needs a 'd' column")

    if args.moment:
        strata = moment_identify(records, monotonicity=args.monotonicity, J=args.categories)
    else:
        strata = em_fit(records, monotonicity=args.monotonicity, J=args.categories)
    cb = complier_bounds(strata)
    payload = {
        "monotonicity": args.monotonicity,
        "method": "moment" if args.moment else "em",
        "pi": {"always_taker": strata.pi_a, "complier": strata.pi_c,
               "never_taker": strata.pi_n},
        "complier": _report_payload(cb.complier),
        "population_sharpened": {
            "tau": {"lower": cb.tau_sharpened[0], "upper": cb.tau_sharpened[1]},
            "eta": {"lower": cb.eta_sharpened[0], "upper": cb.eta_sharpened[1]},
        },
    }
    if args.covariates:
        if not covs:
            raise OrdBoundsError("--covariates requires covariate columns in the CSV")
        fit = em_fit_with_covariates(records, monotonicity=args.monotonicity,
                                     J=args.categories)
        X = np.array([r.x for r in records], dtype=float)
        rep = fit.complier_report(X)
        payload["complier_adjusted"] = _report_payload(rep)
    if args.bootstrap:
        seed = _seed(args)
        ci = {}
        for estimand in ("tau", "eta"):
            ir = bootstrap_bounds_ci(records, estimator="complier", estimand=estimand,
                                     n_boot=args.bootstrap, level=args.alpha_level,
                                     seed=seed, J=args.categories,
                                     method=args.ci_method,
                                     monotonicity=args.monotonicity)
            ci[estimand] = {"low": ir.ci_low, "high": ir.ci_high}
        payload["ci"] = ci
        payload["n_boot"] = args.bootstrap
        payload["level"] = args.alpha_level
        payload["seed"] = seed
    _emit(payload, args)


def cmd_simulate(args):
    from .simulation import StudySpec, run_study

    try:
        spec = StudySpec(study=args.study, case_id=args.case, n_units=args.n,
                         n_reps=args.reps, n_boot=args.boot, seed=_seed(args))
    except ValueError as e:
        raise OrdBoundsError(str(e)) from None
    res = run_study(spec, adjusted=args.adjusted)
    _emit({
        "study": spec.study, "case": spec.case_id, "n_units": spec.n_units,
        "n_reps": spec.n_reps, "n_boot": spec.n_boot, "seed": spec.seed,
        "adjusted": args.adjusted,
        "truth": res.truth,
        "bias_lower": res.bias_L, "bias_upper": res.bias_U,
        "se_lower": res.se_L, "se_upper": res.se_U,
        "ci_length": res.ci_length,
        "coverage_bounds": res.coverage_bounds,
        "coverage_estimand": res.coverage_estimand,
        "n_failed": res.n_failed,
    }, args)


def _load_objective(spec: str, J: int):
    from .lp_oracle import LinearObjective, indicator_objective, sign_objective

    if spec == "tau":
        return indicator_objective(J, strict=False)
    if spec == "eta":
        return indicator_objective(J, strict=True)
    if spec == "sign":
        return sign_objective(J)
    if spec == "ones":
        return LinearObjective(tuple(tuple(1 for _ in range(J)) for _ in range(J)))
    try:
        with open(spec) as f:
            rows = [[float(v) for v in line.split(",")] for line in f if line.strip()]
    except OSError as e:
        raise OrdBoundsError(f"cannot read objective {spec!r}: {e}") from None
    return LinearObjective(tuple(tuple(r) for r in rows))


def cmd_oracle(args):
    from .lp_oracle import optimize

    m = _marginal_pair(args)
    obj = _load_objective(args.objective, m.J)
    value, mat = optimize(m, obj, sense=args.sense)
    _emit({
        "objective": args.objective,
        "sense": args.sense,
        "value": value,
        "matrix": [list(r) for r in mat.matrix],
    }, args)


# -- wiring ------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", help="write JSON to this file instead of stdout")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: ORDBOUNDS_SEED env var, then 0)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for replicate-level parallelism")


def _add_margins(p):
    p.add_argument("--p1", required=True, help="treated marginal, e.g. 0.2,0.6,0.2 or 1/5,3/5,1/5")
    p.add_argument("--p0", required=True, help="control marginal")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ordbounds", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("bounds", help="sharp bounds from marginal vectors")
    _add_margins(p)
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("construct", help="extremal coupling attaining a bound")
    _add_margins(p)
    p.add_argument("--target", required=True,
                   choices=["tau_min", "tau_max", "eta_min", "eta_max", "independent"])
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="estimate bounds from unit-level CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--design", choices=["randomized", "ipw", "adjusted"],
                   default="randomized")
    p.add_argument("--strata", choices=["discrete", "model"], default="model",
                   help="covariate handling for --design adjusted")
    p.add_argument("--categories", type=int, default=None,
                   help="number of outcome categories (default max(y)+1)")
    p.add_argument("--bootstrap", type=int, default=0, metavar="N_BOOT",
                   help="bootstrap replicates for CIs (0 disables)")
    p.add_argument("--alpha-level", type=float, default=0.95,
                   help="nominal CI coverage")
    p.add_argument("--ci-method", choices=["percentile", "normal"], default="percentile")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("analyze-iv", help="complier bounds under noncompliance")
    p.add_argument("--data", required=True)
    p.add_argument("--monotonicity", choices=["standard", "strong"], default="standard")
    p.add_argument("--moment", action="store_true",
                   help="method-of-moments strata instead of EM")
    p.add_argument("--covariates", action="store_true",
                   help="also fit the covariate EM and report adjusted bounds")
    p.add_argument("--categories", type=int, default=None)
    p.add_argument("--bootstrap", type=int, default=0, metavar="N_BOOT")
    p.add_argument("--alpha-level", type=float, default=0.95)
    p.add_argument("--ci-method", choices=["percentile", "normal"], default="percentile")
    _add_common(p)
    p.set_defaults(func=cmd_analyze_iv)

    p = sub.add_parser("simulate", help="Monte Carlo study summary row")
    p.add_argument("--study", type=int, required=True)
    p.add_argument("--case", type=int, required=True)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--boot", type=int, default=500)
    p.add_argument("--adjusted", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="LP optimum over couplings")
    _add_margins(p)
    p.add_argument("--objective", required=True,
                   help="tau | eta | sign | ones | path to a CSV coefficient matrix")
    p.add_argument("--sense", choices=["min", "max"], default="max")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except _NUMERICAL_ERRORS as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except (OrdBoundsError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
