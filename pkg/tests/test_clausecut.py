from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsat.clausecut import (
    ClauseCutInstance,
    ClauseCutTrace,
    depth_bound,
    reduce_minsat_to_clausecut,
    solve_clause_cut,
    solve_minsat_sigma,
)
from minsat.core import REX, BooleanRelation, UNARY0, Constraint, Formula, NEQ, RelationError, SearchBudget, Status, assignment_cost, within_budget
from minsat.flowaug import Arc, CutError, evaluate_cut
from minsat.oracle import oracle_clausecut, oracle_minsat

import generators as gen

POOL = gen.sigma_pool(random.Random(7))


def test_rex_becomes_one_bundle():
    f = Formula(3, (Constraint(REX, (0, 1, 2), 1),), 1)
    inst = reduce_minsat_to_clausecut(f).instance
    assert inst.bundle_ids() == [0]
    assert sorted((a.tail, a.head) for a in inst.arcs) == [(0, 2), (3, 4), (4, 3)]
    assert inst.clauses == ()


def test_unsatisfiable_constraint_is_charged():
    f = Formula(2, (Constraint(UNARY0, (0,), 1), Constraint(BooleanRelation(1, 0), (1,), 1)), 0)
    assert reduce_minsat_to_clausecut(f) is None
    red = reduce_minsat_to_clausecut(Formula(2, f.constraints, 1))
    assert red.never_satisfied == (1,) and red.instance.k == 0


def test_rejects_non_sigma_and_weighted():
    with pytest.raises(RelationError):
        reduce_minsat_to_clausecut(Formula(2, (Constraint(NEQ, (0, 1), 1),), 1))
    with pytest.raises(RelationError):
        solve_minsat_sigma(Formula(3, (Constraint(REX, (0, 1, 2), 1),), 1, 5))
    with pytest.raises(CutError):
        ClauseCutInstance(2, 0, 1, (Arc(0, 1, True, 0),), (), ((0, 1),), 1, 1)


def test_crisp_clause_blocks_cut():
    inst = ClauseCutInstance(4, 0, 1, (Arc(0, 2, False), Arc(0, 3, True, 0), Arc(3, 1, True, 1)), (((2, 3), None),), (), 1)
    out = solve_clause_cut(inst)
    assert out.yes and out.bundles == {0}
    assert evaluate_cut(inst, out.cut).feasible()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_solve_clause_cut_matches_oracle(seed):
    f = gen.sigma_formula(random.Random(seed), POOL)
    red = reduce_minsat_to_clausecut(f)
    if red is None:
        return
    trace = ClauseCutTrace()
    out = solve_clause_cut(red.instance, SearchBudget(max_branches=200_000), trace)
    assert out.status is not Status.RESOURCE
    assert out.yes == (oracle_clausecut(red.instance) is not None)
    if out.yes:
        assert evaluate_cut(red.instance, out.cut).feasible()
    assert trace.measures_decrease()
    assert trace.max_depth <= depth_bound(red.instance)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_solve_minsat_sigma_matches_oracle(seed):
    f = gen.sigma_formula(random.Random(seed), POOL)
    out = solve_minsat_sigma(f)
    assert out.yes == (oracle_minsat(f) is not None)
    if out.yes:
        assert within_budget(f, assignment_cost(f, out.values))
