from fractions import Fraction

import numpy as np
import pytest

from ordbounds import MarginalDistribution, MarginalPair


def frac_pair(p1, p0) -> MarginalPair:
    return MarginalPair(
        MarginalDistribution(tuple(Fraction(*t) for t in p1)),
        MarginalDistribution(tuple(Fraction(*t) for t in p0)),
    )


@pytest.fixture
def taste_pair():
    """Marginals with tau bounds (2/5, 4/5) and eta bounds (1/5, 3/5)."""
    return frac_pair([(1, 5), (3, 5), (1, 5)], [(2, 5), (1, 5), (2, 5)])


@pytest.fixture
def dominated_pair():
    """Marginals where the treated arm stochastically dominates the control;
    tau bounds (3/5, 1)."""
    return frac_pair([(1, 5), (1, 5), (3, 5)], [(3, 5), (1, 5), (1, 5)])


def random_pair(rng, J, exact=False, sparse=False) -> MarginalPair:
    """Dirichlet-random marginal pair, optionally with zeroed support cells
    and optionally converted to exact rationals."""
    def draw():
        p = rng.dirichlet(np.ones(J))
        if sparse:
            kill = rng.random(J) < 0.35
            if kill.all():
                kill[rng.integers(J)] = False
            p = np.where(kill, 0.0, p)
            p = p / p.sum()
        if exact:
            q = [Fraction(round(v * 720), 720) for v in p]
            short = 1 - sum(q)
            q[int(np.argmax(p))] += short
            if min(q) < 0:
                return draw()
            return MarginalDistribution(tuple(q))
        return MarginalDistribution(tuple(p))

    return MarginalPair(draw(), draw())
