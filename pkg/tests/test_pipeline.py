from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsat.core import NAND3, R4, RMIX, UNARY0, UNARY1, Constraint, Formula, Status, assignment_cost, within_budget, dual_relation
from minsat.hardness import MulticoloredGraph, gen_gaifman_hard, gen_paired_cut
from minsat.oracle import oracle_minsat, oracle_wminsat
from minsat.pipeline import RefusedError, dual_formula, solve_formula

import generators as gen

POOL = gen.sigma_pool(random.Random(11))


def test_refuses_hard_formula():
    g = MulticoloredGraph.build([1, 1, 1], [((0, 0), (1, 0)), ((0, 0), (2, 0)), ((1, 0), (2, 0))])
    hard = gen_gaifman_hard(gen_paired_cut(g), R4)
    with pytest.raises(RefusedError):
        solve_formula(hard.formula)
    forced = solve_formula(hard.formula, force_oracle=True)
    assert forced.yes and forced.route == "oracle"


def test_weighted_rmix_is_refused_but_unweighted_is_solved():
    cons = (Constraint(UNARY0, (0,), 1), Constraint(UNARY1, (1,), 1), Constraint(RMIX, (0, 1, 2, 3), 1))
    out = solve_formula(Formula(4, cons, 1))
    assert out.route == "clausecut"
    with pytest.raises(RefusedError):
        solve_formula(Formula(4, cons, 1, 3))


@pytest.mark.parametrize(
    "rel, route",
    [(NAND3, "negative"), (dual_relation(NAND3), "negative-dual"), (dual_relation(RMIX), "clausecut-dual")],
)
def test_routes(rel, route):
    cons = (Constraint(UNARY0, (0,), 1), Constraint(UNARY1, (1,), 1), Constraint(rel, tuple(range(rel.arity)), 1))
    f = Formula(max(rel.arity, 2), cons, 1)
    out = solve_formula(f)
    assert out.route == route
    assert out.yes == (oracle_minsat(f) is not None)


def test_dual_formula_is_an_involution():
    f = gen.delta_formula(random.Random(5))
    assert dual_formula(dual_formula(f)) == f


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_delta_route_matches_oracle(seed):
    f = gen.delta_formula(random.Random(seed))
    out = solve_formula(f)
    assert out.status is not Status.RESOURCE
    assert out.yes == (oracle_wminsat(f) is not None)
    if out.yes:
        assert within_budget(f, assignment_cost(f, out.values))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_sigma_routes_match_oracle(seed, dual):
    f = gen.sigma_formula(random.Random(seed), POOL)
    if dual:
        f = dual_formula(f)
    out = solve_formula(f)
    assert out.yes == (oracle_minsat(f) is not None)
