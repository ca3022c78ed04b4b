"""Exact linear programming over the transportation polytope.

Optimizes any linear objective sum_kl c_kl p_kl subject to fixed row sums
(treated marginal), fixed column sums (control marginal) and nonnegativity.
Used as an independent cross-check of the closed-form bounds and to compute
sharp bounds on the relative effect alpha = tau + eta - 1.

The solver is a dense primal simplex started from the northwest-corner basic
feasible solution, with Bland's rule for both the entering and leaving
variable so the highly degenerate polytope cannot cause cycling.  It runs in
exact rational arithmetic when the marginals are Fractions, in double
precision (pivot tolerance 1e-12) otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distributions import JointDistribution, MarginalPair, _is_exact
from .exceptions import DimensionMismatch

_PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class LinearObjective:
    """J x J grid of objective coefficients c_kl."""

    coeffs: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.coeffs)
        object.__setattr__(self, "coeffs", rows)
        J = len(rows)
        for r in rows:
            if len(r) != J:
                raise DimensionMismatch("objective matrix must be square")

    @property
    def J(self) -> int:
        return len(self.coeffs)


def indicator_objective(J: int, strict: bool = False) -> LinearObjective:
    """1(k > l) if strict else 1(k >= l); the tau/eta objectives."""
    return LinearObjective(
        tuple(tuple(1 if (k > l if strict else k >= l) else 0 for l in range(J)) for k in range(J))
    )


def sign_objective(J: int) -> LinearObjective:
    """sign(k - l); the alpha objective."""
    return LinearObjective(
        tuple(tuple((k > l) - (k < l) for l in range(J)) for k in range(J))
    )


def _northwest_basis(p1, p0, J, zero):
    """Northwest-corner rule; returns exactly 2J-1 basic cells spanning the
    transportation constraints (degenerate zero allocations included)."""
    a = list(p1)
    b = list(p0)
    cells = []
    i = j = 0
    while True:
        x = min(a[i], b[j])
        cells.append((i, j))
        a[i] -= x
        b[j] -= x
        if i == J - 1 and j == J - 1:
            break
        if j == J - 1 or (a[i] <= zero and i < J - 1):
            i += 1
        else:
            j += 1
    return cells


def optimize(m: MarginalPair, obj: LinearObjective, sense: str = "max"):
    """Optimum of sum c_kl p_kl over couplings of the given margins.

    Returns (value, argmatrix) where argmatrix is an optimal vertex as a
    JointDistribution.
    """
    if obj.J != m.J:
        raise DimensionMismatch(f"objective is {obj.J}x{obj.J} but marginals have J={m.J}")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    J = m.J
    exact = m.exact and _is_exact([v for r in obj.coeffs for v in r])
    if exact:
        p1 = [Fraction(v) for v in m.treated.probs]
        p0 = [Fraction(v) for v in m.control.probs]
        cvals = [Fraction(v) for r in obj.coeffs for v in r]
        zero, tol = Fraction(0), Fraction(0)
    else:
        p1 = [float(v) for v in m.treated.probs]
        p0 = [float(v) for v in m.control.probs]
        cvals = [float(v) for r in obj.coeffs for v in r]
        zero, tol = 0.0, _PIVOT_TOL

    flip = -1 if sense == "max" else 1
    c = [flip * v for v in cvals]

    # equality constraints: J row sums, J-1 column sums (last one redundant)
    nvar = J * J
    nrow = 2 * J - 1
    dtype = object if exact else float
    A = np.zeros((nrow, nvar + 1), dtype=dtype)
    if exact:
        A[:, :] = Fraction(0)
    for k in range(J):
        for l in range(J):
            A[k, k * J + l] = 1 if not exact else Fraction(1)
    for l in range(J - 1):
        for k in range(J):
            A[J + l, k * J + l] = 1 if not exact else Fraction(1)
    for k in range(J):
        A[k, nvar] = p1[k]
    for l in range(J - 1):
        A[J + l, nvar] = p0[l]

    basis = [i * J + j for (i, j) in _northwest_basis(p1, p0, J, zero)]
    assert len(basis) == nrow

    # reduce A so that basis columns form an identity
    for r, col in enumerate(basis):
        piv_row = None
        for rr in range(r, nrow):
            if abs(A[rr, col]) > tol:
                piv_row = rr
                break
        if piv_row is None:  # defensive; NW basis is always independent
            raise RuntimeError("degenerate starting basis")
        if piv_row != r:
            A[[r, piv_row]] = A[[piv_row, r]]
        A[r] = A[r] / A[r, col]
        for rr in range(nrow):
            if rr != r and A[rr, col] != 0:
                A[rr] = A[rr] - A[rr, col] * A[r]

    # cost row: reduced costs c_j - c_B^T B^-1 a_j
    cb = np.array([c[j] for j in basis], dtype=dtype)
    red = np.array(c + [zero], dtype=dtype) - cb @ A

    while True:
        entering = None
        for j in range(nvar):  # Bland: smallest eligible index
            if red[j] < -tol:
                entering = j
                break
        if entering is None:
            break
        ratios = []
        for r in range(nrow):
            if A[r, entering] > tol:
                ratios.append((A[r, nvar] / A[r, entering], basis[r], r))
        if not ratios:  # transportation polytope is bounded; defensive
            raise RuntimeError("unbounded LP")
        best = min(ratios, key=lambda t: (t[0], t[1]))
        r = best[2]
        piv = A[r, entering]
        A[r] = A[r] / piv
        coef = red[entering]
        red = red - coef * A[r]
        for rr in range(nrow):
            if rr != r and A[rr, entering] != 0:
                A[rr] = A[rr] - A[rr, entering] * A[r]
        basis[r] = entering

    x = [zero] * nvar
    for r, col in enumerate(basis):
        x[col] = A[r, nvar]
    value = sum(ci * xi for ci, xi in zip(cvals, x))
    if not exact:
        x = [0.0 if -1e-10 < v < 0 else v for v in x]
    mat = tuple(tuple(x[k * J + l] for l in range(J)) for k in range(J))
    return value, JointDistribution(mat)


def alpha_bounds(m: MarginalPair):
    """Sharp bounds of alpha = pr{Y(1) > Y(0)} - pr{Y(1) < Y(0)}."""
    obj = sign_objective(m.J)
    lo, _ = optimize(m, obj, "min")
    hi, _ = optimize(m, obj, "max")
    return lo, hi
