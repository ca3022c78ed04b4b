from fractions import Fraction

import numpy as np
import pytest

from ordbounds import (
    LinearObjective,
    alpha_bounds,
    eta_bounds,
    extremal_coupling,
    indicator_objective,
    optimize,
    sign_objective,
    tau_bounds,
)
from ordbounds.exceptions import DimensionMismatch

from conftest import random_pair

F = Fraction


class TestObjectives:
    def test_indicator_weak(self):
        obj = indicator_objective(3)
        assert obj.coeffs == ((1, 0, 0), (1, 1, 0), (1, 1, 1))

    def test_indicator_strict(self):
        obj = indicator_objective(3, strict=True)
        assert obj.coeffs == ((0, 0, 0), (1, 0, 0), (1, 1, 0))

    def test_sign(self):
        obj = sign_objective(3)
        assert obj.coeffs == ((0, -1, -1), (1, 0, -1), (1, 1, 0))

    def test_nonsquare_rejected(self):
        with pytest.raises(DimensionMismatch):
            LinearObjective(((1, 2), (3,)))


class TestOptimize:
    def test_exact_tau_range(self, taste_pair):
        obj = indicator_objective(3)
        lo, _ = optimize(taste_pair, obj, "min")
        hi, _ = optimize(taste_pair, obj, "max")
        assert (lo, hi) == (F(2, 5), F(4, 5))

    def test_exact_eta_range(self, taste_pair):
        obj = indicator_objective(3, strict=True)
        lo, _ = optimize(taste_pair, obj, "min")
        hi, _ = optimize(taste_pair, obj, "max")
        assert (lo, hi) == (F(1, 5), F(3, 5))

    def test_argmatrix_is_feasible(self, taste_pair):
        _, P = optimize(taste_pair, indicator_objective(3), "max")
        assert P.margins().treated.probs == taste_pair.treated.probs
        assert P.margins().control.probs == taste_pair.control.probs

    def test_all_ones_objective(self, taste_pair):
        obj = LinearObjective(tuple(tuple(1 for _ in range(3)) for _ in range(3)))
        v, _ = optimize(taste_pair, obj, "max")
        assert v == 1

    def test_dimension_mismatch(self, taste_pair):
        with pytest.raises(DimensionMismatch):
            optimize(taste_pair, indicator_objective(4), "max")

    def test_bad_sense(self, taste_pair):
        with pytest.raises(ValueError):
            optimize(taste_pair, indicator_objective(3), "maximize")

    def test_construct_output_evaluates_to_bound(self, taste_pair):
        # round-trip: extremal coupling scored by the LP objective gives the
        # same value the LP reports as the optimum
        P = extremal_coupling(taste_pair, "tau_max")
        obj = indicator_objective(3)
        score = sum(
            obj.coeffs[k][l] * P.matrix[k][l] for k in range(3) for l in range(3)
        )
        hi, _ = optimize(taste_pair, obj, "max")
        assert score == hi


class TestAlphaBounds:
    def test_known_range(self, taste_pair):
        assert alpha_bounds(taste_pair) == (F(-1, 5), F(1, 5))

    def test_dominated_range(self, dominated_pair):
        assert alpha_bounds(dominated_pair) == (F(1, 5), F(3, 5))

    def test_within_tau_eta_implied_range(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            m = random_pair(rng, int(rng.integers(2, 6)))
            lo, hi = alpha_bounds(m)
            tl, tu = tau_bounds(m)
            el, eu = eta_bounds(m)
            assert tl + el - 1 - 1e-9 <= lo <= hi <= tu + eu - 1 + 1e-9


class TestOracleAgreement:
    def test_matches_closed_forms(self):
        rng = np.random.default_rng(21)
        for i in range(300):
            J = int(rng.integers(2, 9))
            m = random_pair(rng, J, sparse=(i % 5 == 0))
            tl, tu = tau_bounds(m)
            el, eu = eta_bounds(m)
            w = indicator_objective(J)
            s = indicator_objective(J, strict=True)
            assert optimize(m, w, "min")[0] == pytest.approx(tl, abs=1e-9)
            assert optimize(m, w, "max")[0] == pytest.approx(tu, abs=1e-9)
            assert optimize(m, s, "min")[0] == pytest.approx(el, abs=1e-9)
            assert optimize(m, s, "max")[0] == pytest.approx(eu, abs=1e-9)
