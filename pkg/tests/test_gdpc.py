from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsat.core import EQ2, IMPL, NAND2, UNARY0, UNARY1, Constraint, Formula, SearchBudget, Status, assignment_cost, within_budget
from minsat.flowaug import Arc, CutError, evaluate_cut
from minsat.gdpc import (
    GdpcInstance,
    find_deletion_set,
    lift_trace,
    reduce_minsat_to_gdpc,
    satisfying_assignment,
    solve_gdpc,
    solve_minsat_delta,
    verify_bundles,
)
from minsat.oracle import oracle_gdpc, oracle_wminsat

import generators as gen


def test_gdpc_rejects_non_pair_clause():
    with pytest.raises(CutError):
        GdpcInstance(4, 0, 1, (), (((2, 3, 2), None),))


def test_clause_forces_a_bundle():
    # s -> a -> t with a free, s -> b crisp, clause (a, b) in bundle 1
    inst = GdpcInstance(
        4, 0, 1,
        (Arc(0, 2, True, 0), Arc(2, 1, True, 0), Arc(0, 3, False)),
        (((2, 3), 1),),
        ((0, 1), (1, 1)), 1,
    )
    assert verify_bundles(inst, {0}) is not None
    assert verify_bundles(inst, {1}) is None
    out = solve_gdpc(inst)
    assert out.status is Status.YES and out.bundles == {0}


def test_verify_bundles_checks_weight():
    inst = GdpcInstance(2, 0, 1, (Arc(0, 1, True, 0),), (), ((0, 7),), 1, 6)
    assert verify_bundles(inst, {0}) is None
    assert solve_gdpc(inst).status is Status.NO


def test_deletion_set_examples():
    f = Formula(1, (Constraint(UNARY0, (0,), 1), Constraint(UNARY1, (0,), 1)), 1)
    assert len(find_deletion_set(f)) == 1
    assert find_deletion_set(Formula(f.num_vars, f.constraints, 0)) is None
    sat = Formula(2, (Constraint(IMPL, (0, 1), 1), Constraint(NAND2, (0, 1), 1)), 0)
    assert find_deletion_set(sat) == frozenset()
    assert satisfying_assignment(sat) == [0, 0] or within_budget(sat, assignment_cost(sat, satisfying_assignment(sat)))


def test_reduction_shape():
    f = Formula(2, (Constraint(EQ2, (0, 1), 2), Constraint(UNARY1, (0,), 3)), 1)
    red = reduce_minsat_to_gdpc(f, {1}, {0: 1}, alpha=(0, 0))
    inst = red.instance
    assert inst.k == 1 and 1 in red.always_satisfied
    # x0 is pinned to the source side, and the equality becomes two soft arcs of bundle 0
    assert Arc(0, 2, False) in inst.arcs
    assert sorted((a.tail, a.head) for a in inst.arcs if a.bundle == 0) == [(2, 3), (3, 2)]


def test_reduction_rejects_bad_beta():
    f = Formula(1, (Constraint(UNARY0, (0,), 1), Constraint(UNARY1, (0,), 1)), 1)
    with pytest.raises(ValueError):
        reduce_minsat_to_gdpc(f, {0}, {})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_solve_gdpc_matches_oracle(seed):
    inst = gen.path_gdpc_instance(random.Random(seed), 2, 2, 4)
    out = solve_gdpc(inst, SearchBudget(max_branches=200_000))
    assert out.status is not Status.RESOURCE
    want = oracle_gdpc(inst)
    assert out.yes == (want is not None)
    if out.yes:
        assert verify_bundles(inst, out.bundles) is not None
        assert evaluate_cut(inst, out.cut).feasible()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_reduction_preserves_answers(seed):
    f = gen.delta_formula(random.Random(seed))
    deletion = find_deletion_set(f)
    want = oracle_wminsat(f)
    if deletion is None:
        assert want is None
        return
    pinned = sorted({v for i in deletion for v in f.constraints[i].scope})
    found = False
    for bits in itertools.product((0, 1), repeat=len(pinned)):
        red = reduce_minsat_to_gdpc(f, deletion, dict(zip(pinned, bits)))
        if red is None:
            continue
        cut = oracle_gdpc(red.instance)
        if cut is not None:
            values = red.assignment(evaluate_cut(red.instance, cut).side)
            assert within_budget(f, assignment_cost(f, values))
            found = True
    assert found == (want is not None)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_solve_minsat_delta_matches_oracle(seed):
    f = gen.delta_formula(random.Random(seed))
    out = solve_minsat_delta(f)
    assert out.yes == (oracle_wminsat(f) is not None)
    if out.yes:
        assert within_budget(f, assignment_cost(f, out.values))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_lift_gap_strictly_decreases(seed):
    inst = gen.path_gdpc_instance(random.Random(seed), 2, 2, 4)
    cut = oracle_gdpc(inst)
    if cut is None:
        return
    trace = lift_trace(inst, evaluate_cut(inst, cut).violated)
    assert trace.strictly_decreasing()
