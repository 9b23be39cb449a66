import numpy as np
import pytest

from structpred import MulticutInstance, MrfInstance


def triangle(costs=(-1.0, -1.0, 2.0)) -> MulticutInstance:
    """Edges (0,1), (1,2), (0,2) with the given costs."""
    return MulticutInstance.from_edges([(0, 1, costs[0]), (1, 2, costs[1]), (0, 2, costs[2])])


def chain() -> MrfInstance:
    """Two nodes, theta_v = (0, 5), Potts coupling of weight 1."""
    return MrfInstance([2, 2], [[0, 5], [0, 5]], [(0, 1)], [[[0, 1], [1, 0]]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def enumerate_ilp(ilp, tol=1e-9):
    """Plain 2^n enumeration; returns (optimum, argmin dict) or (inf, None)."""
    import itertools
    import math

    names = ilp.variables
    best, arg = math.inf, None
    for bits in itertools.product((0, 1), repeat=len(names)):
        x = dict(zip(names, bits))
        ok = True
        for con in ilp.constraints:
            lhs = sum(a * x[v] for v, a in con.terms.items())
            if (con.relation == "<=" and lhs > con.rhs + tol
                    or con.relation == ">=" and lhs < con.rhs - tol
                    or con.relation == "=" and abs(lhs - con.rhs) > tol):
                ok = False
                break
        if ok:
            obj = math.fsum(c * x[v] for v, c in ilp.objective.items())
            if obj < best:
                best, arg = obj, x
    return best, arg
