"""Monte Carlo study generators and runners.

Study 1: completely randomized experiments drawn from four known joint
distributions of the potential outcomes (independent and positively
associated couplings of two marginal pairs).

Study 2: randomized encouragement designs with one-sided noncompliance
structure generated from a multinomial-logit stratum model and
proportional-odds outcome models; inference deliberately omits the binary
covariate, exercising robustness to mild misspecification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import full_report
from .distributions import JointDistribution, MarginalDistribution, MarginalPair
from .estimation import UnitRecord
from .exceptions import OddN, OrdBoundsError
from .inference import bootstrap_bounds_ci


@dataclass(frozen=True)
class StudySpec:
    study: int
    case_id: int
    n_units: int = 200
    n_reps: int = 1000
    n_boot: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.study not in (1, 2):
            raise ValueError(f"study must be 1 or 2, got {self.study}")
        limit = 4 if self.study == 1 else 6
        if not 1 <= self.case_id <= limit:
            raise ValueError(f"case_id must be 1..{limit} for study {self.study}")
        if self.n_reps < 1:
            raise ValueError("n_reps must be positive")


# -- study 1 -----------------------------------------------------------------

_F = Fraction
_PAIR_A = MarginalPair(
    MarginalDistribution((_F(1, 5), _F(3, 5), _F(1, 5))),
    MarginalDistribution((_F(2, 5), _F(1, 5), _F(2, 5))),
)
_PAIR_B = MarginalPair(
    MarginalDistribution((_F(1, 5), _F(1, 5), _F(3, 5))),
    MarginalDistribution((_F(3, 5), _F(1, 5), _F(1, 5))),
)


def study1_joint(case: int) -> JointDistribution:
    """The case's true joint distribution of (Y(1), Y(0))."""
    from .coupling import extremal_coupling

    pair = _PAIR_A if case in (1, 2) else _PAIR_B
    target = "independent" if case in (1, 3) else "tau_max"
    return extremal_coupling(pair, target)


def study1_truth(case: int) -> dict:
    """True tau and its sharp bounds for the case."""
    from .distributions import estimands_of_joint

    joint = study1_joint(case)
    tau, eta, alpha = estimands_of_joint(joint)
    rep = full_report(joint.margins())
    return {
        "tau": float(tau), "eta": float(eta),
        "tau_L": float(rep.tau_L), "tau_U": float(rep.tau_U),
        "eta_L": float(rep.eta_L), "eta_U": float(rep.eta_U),
    }


def _balanced_assignment(n, rng):
    if n % 2:
        raise OddN(f"balanced assignment needs an even sample size, got {n}")
    z = np.zeros(n, dtype=int)
    z[: n // 2] = 1
    rng.shuffle(z)
    return z


def _proportional_counts(flat, n):
    """Integer cell counts summing to n, proportional to flat (largest
    remainder rounding)."""
    exact = flat * n
    base = np.floor(exact).astype(int)
    short = n - base.sum()
    order = np.argsort(-(exact - base))
    base[order[:short]] += 1
    return base


def generate_study1(case: int, n: int, seed: int = 0) -> list:
    """n units with potential outcomes forming a finite population
    proportional to the case's joint distribution, with a balanced completely
    randomized assignment.

    The fixed-population design (only the assignment is random) is what makes
    the per-case standard errors differ between couplings that share
    marginals.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    joint = study1_joint(case)
    J = joint.J
    flat = np.array([[float(v) for v in row] for row in joint.matrix]).ravel()
    counts = _proportional_counts(flat / flat.sum(), n)
    cells = np.repeat(np.arange(J * J), counts)
    y1, y0 = cells // J, cells % J
    z = _balanced_assignment(n, rng)
    y = np.where(z == 1, y1, y0)
    return [UnitRecord(z=int(zi), y=int(yi)) for zi, yi in zip(z, y)]


# -- study 2 -----------------------------------------------------------------

# stratum model: scores for (complier, always-taker, never-taker) on (1, x1, x2)
_ETA_A = (0.5, 1.0, 0.0)
_ETA_N = (-0.5, 1.0, 0.0)
# shared outcome models (cutpoints; slope coefficients on (x1, x2))
_ALPHA_A = (-0.5, 1.0)
_SLOPE_A = (-2.0, 0.0)
_ALPHA_N = (-1.5, 0.0)
_SLOPE_N = (0.0, 0.0)
_ALPHA_C1 = (-1.0, 0.5)
_ALPHA_C0 = (0.5, 2.0)


def _study2_slopes(case: int):
    """Complier treated/control slope vectors on (x1, x2)."""
    if case <= 3:
        beta = {1: 1.0, 2: 0.5, 3: 0.0}[case]
        return (-2 * beta, 0.0), (beta, 0.0)
    xi = {4: 1.0, 5: 0.5, 6: 0.0}[case]
    return (-2.0, -xi), (1.0, xi)


def _cumlogit_probs(cuts, slopes, X):
    """Category probabilities of an ordered-logit model at rows of X."""
    u = X @ np.asarray(slopes)
    cum = 1.0 / (1.0 + np.exp(-(u[:, None] + np.asarray(cuts)[None, :])))
    cum = np.hstack([np.zeros((len(u), 1)), cum, np.ones((len(u), 1))])
    return np.diff(cum, axis=1)


def _stratum_probs(X):
    """(n, 3) probabilities of (c, a, n) at rows of X = (x1, x2)."""
    ones = np.ones((len(X), 1))
    M = np.hstack([ones, X])
    sc = np.zeros(len(X))
    sa = M @ np.asarray(_ETA_A)
    sn = M @ np.asarray(_ETA_N)
    s = np.stack([sc, sa, sn], axis=1)
    s -= s.max(axis=1, keepdims=True)
    e = np.exp(s)
    return e / e.sum(axis=1, keepdims=True)


def _draw_categorical(rng, probs):
    """One draw per row of the (n, J) probability matrix."""
    cum = np.cumsum(probs, axis=1)
    u = rng.random(len(probs))
    return (u[:, None] > cum).sum(axis=1)


def generate_study2(case: int, n: int, seed: int = 0) -> list:
    """Noncompliance study records with x = (x1, x2)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x1 = rng.standard_normal(n)
    x2 = rng.integers(0, 2, size=n).astype(float)
    X = np.stack([x1, x2], axis=1)
    g = _draw_categorical(rng, _stratum_probs(X))  # 0=c, 1=a, 2=n
    z = _balanced_assignment(n, rng)
    d = np.where(g == 1, 1, np.where(g == 2, 0, z))

    s1, s0 = _study2_slopes(case)
    y = np.empty(n, dtype=int)
    for mask, cuts, slopes in (
        (g == 1, _ALPHA_A, _SLOPE_A),
        (g == 2, _ALPHA_N, _SLOPE_N),
        ((g == 0) & (z == 1), _ALPHA_C1, s1),
        ((g == 0) & (z == 0), _ALPHA_C0, s0),
    ):
        if mask.any():
            y[mask] = _draw_categorical(rng, _cumlogit_probs(cuts, slopes, X[mask]))
    return [
        UnitRecord(z=int(zi), y=int(yi), d=int(di), x=(float(a), float(b)))
        for zi, yi, di, a, b in zip(z, y, d, x1, x2)
    ]


def study2_truth(case: int, n_draws: int = 10_000_000, seed: int = 0) -> dict:
    """Monte Carlo oracle for the complier estimands and bounds.

    Unadjusted bounds apply the closed forms to the marginal complier
    distributions, and tau_c/eta_c are the independent couplings of those
    marginals (the convention behind the published true values; integrating
    conditional independence over the covariates instead gives a smaller
    tau_c).  Adjusted bounds average the conditional bounds given the full
    covariate vector with pi_c(x) weights; the estimators that omit x2
    target a slightly wider interval in the cases where x2 matters.
    """
    from .bounds import eta_bounds_array, independent_estimands, tau_bounds_array

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    s1, s0 = _study2_slopes(case)
    out = {}
    chunk = 1_000_000
    acc = {k: 0.0 for k in ("w", "wL", "wU", "weL", "weU")}
    p1_sum = np.zeros(3)
    p0_sum = np.zeros(3)
    for start in range(0, n_draws, chunk):
        m = min(chunk, n_draws - start)
        x1 = rng.standard_normal(m)
        x2 = rng.integers(0, 2, size=m).astype(float)
        X = np.stack([x1, x2], axis=1)
        pic = _stratum_probs(X)[:, 0]
        w = pic
        p1 = _cumlogit_probs(_ALPHA_C1, s1, X)
        p0 = _cumlogit_probs(_ALPHA_C0, s0, X)
        p1_sum += w @ p1
        p0_sum += w @ p0

        tl, tu = tau_bounds_array(p1, p0)
        el, eu = eta_bounds_array(p1, p0)
        acc["w"] += float(w.sum())
        acc["wL"] += float(w @ tl)
        acc["wU"] += float(w @ tu)
        acc["weL"] += float(w @ el)
        acc["weU"] += float(w @ eu)

    W = acc["w"]
    out["pi_c"] = W / n_draws
    marg = MarginalPair(
        MarginalDistribution(tuple(p1_sum / p1_sum.sum())),
        MarginalDistribution(tuple(p0_sum / p0_sum.sum())),
    )
    out["tau_c"], out["eta_c"] = (float(v) for v in independent_estimands(marg))
    rep = full_report(marg)
    out["tau_c_L"], out["tau_c_U"] = float(rep.tau_L), float(rep.tau_U)
    out["eta_c_L"], out["eta_c_U"] = float(rep.eta_L), float(rep.eta_U)
    out["tau_c_L_adj"] = acc["wL"] / W
    out["tau_c_U_adj"] = acc["wU"] / W
    out["eta_c_L_adj"] = acc["weL"] / W
    out["eta_c_U_adj"] = acc["weU"] / W
    return out


# -- study runner ------------------------------------------------------------

@dataclass(frozen=True)
class StudyResult:
    spec: StudySpec
    truth: dict
    bias_L: float
    bias_U: float
    se_L: float
    se_U: float
    ci_length: float
    coverage_bounds: float
    coverage_estimand: float
    n_failed: int


def run_study(spec: StudySpec, adjusted: bool = False,
              truth: dict | None = None, ci_method: str = "normal") -> StudyResult:
    """Replicated estimation with bootstrap CIs, aggregated into the usual
    summary row.

    coverage_bounds is the fraction of CIs containing both true bounds;
    coverage_estimand the fraction containing the true estimand.  For study 2
    the estimand is tau_c; adjusted=True switches to the covariate-adjusted
    complier estimator (slow: one covariate EM per bootstrap replicate).
    """
    if truth is None:
        if spec.study == 1:
            truth = study1_truth(spec.case_id)
        else:
            truth = study2_truth(spec.case_id, n_draws=2_000_000, seed=spec.seed + 991)

    if spec.study == 1:
        true_L, true_U, true_val = truth["tau_L"], truth["tau_U"], truth["tau"]
    elif adjusted:
        true_L, true_U, true_val = truth["tau_c_L_adj"], truth["tau_c_U_adj"], truth["tau_c"]
    else:
        true_L, true_U, true_val = truth["tau_c_L"], truth["tau_c_U"], truth["tau_c"]

    seeds = np.random.SeedSequence(spec.seed).spawn(spec.n_reps)
    Ls, Us, ci_los, ci_his = [], [], [], []
    n_failed = 0
    for r, ss in enumerate(seeds):
        rep_seed = int(ss.generate_state(1)[0] % (2**31))
        try:
            if spec.study == 1:
                records = generate_study1(spec.case_id, spec.n_units, seed=rep_seed)
                ir = bootstrap_bounds_ci(records, estimator="randomized", estimand="tau",
                                         n_boot=spec.n_boot, seed=rep_seed,
                                         method=ci_method)
            else:
                records = generate_study2(spec.case_id, spec.n_units, seed=rep_seed)
                # inference without the binary covariate
                records = [UnitRecord(z=u.z, y=u.y, d=u.d, x=(u.x[0],)) for u in records]
                est = "complier_adjusted" if adjusted else "complier"
                ir = bootstrap_bounds_ci(records, estimator=est, estimand="tau",
                                         n_boot=spec.n_boot, seed=rep_seed,
                                         method=ci_method)
        except OrdBoundsError:
            n_failed += 1
            continue
        Ls.append(ir.point_lower)
        Us.append(ir.point_upper)
        ci_los.append(ir.ci_low)
        ci_his.append(ir.ci_high)

    Ls = np.array(Ls)
    Us = np.array(Us)
    ci_los = np.array(ci_los)
    ci_his = np.array(ci_his)
    cover_b = (ci_los <= true_L) & (true_U <= ci_his)
    cover_v = (ci_los <= true_val) & (true_val <= ci_his)
    return StudyResult(
        spec=spec, truth=truth,
        bias_L=float(Ls.mean() - true_L), bias_U=float(Us.mean() - true_U),
        se_L=float(Ls.std(ddof=1)), se_U=float(Us.std(ddof=1)),
        ci_length=float((ci_his - ci_los).mean()),
        coverage_bounds=float(cover_b.mean()),
        coverage_estimand=float(cover_v.mean()),
        n_failed=n_failed,
    )
