from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsat.bundledcut import (
    BundledCutInstance,
    deletable_arcs,
    is_pairwise_linked,
    solve_bundled_cut,
    subset_is_cut,
)
from minsat.core import ResourceLimit, Status
from minsat.flowaug import Arc, CutError, CutInstance, evaluate_cut
from minsat.oracle import oracle_cut_arcs


def test_single_arc_bundle():
    inst = CutInstance(2, 0, 1, (Arc(0, 1, True, 0),), (), ((0, 1),), 1)
    out = solve_bundled_cut(BundledCutInstance(inst))
    assert out.status is Status.YES and out.bundles == {0}


def test_budget_zero_is_no():
    inst = CutInstance(3, 0, 1, (Arc(0, 2, True, 0), Arc(2, 1, True, 1)), (), (), 0)
    assert solve_bundled_cut(inst).status is Status.NO


def test_rejects_clauses():
    inst = CutInstance(3, 0, 1, (Arc(0, 2, True, 0),), (((2,), None),), (), 1)
    with pytest.raises(CutError):
        BundledCutInstance(inst)


def test_pairwise_linked():
    linked = CutInstance(4, 0, 1, (Arc(0, 2, True, 0), Arc(2, 3, False), Arc(3, 1, True, 0)))
    assert is_pairwise_linked(linked, 0)
    apart = CutInstance(5, 0, 1, (Arc(0, 2, True, 0), Arc(2, 1, True, 1), Arc(0, 3, True, 1), Arc(3, 4, True, 0)))
    assert not is_pairwise_linked(apart, 0)
    with pytest.raises(CutError):
        BundledCutInstance(apart, strict=True)


def test_parallel_crisp_arc_is_not_deletable():
    inst = CutInstance(2, 0, 1, (Arc(0, 1, True, 0), Arc(0, 1, False)))
    assert deletable_arcs(inst) == []


def test_subset_cap():
    arcs = tuple(Arc(0, 1, True, b) for b in range(30))
    inst = CutInstance(2, 0, 1, arcs, (), (), 15)
    with pytest.raises(ResourceLimit):
        solve_bundled_cut(inst, subset_cap=1000)


@st.composite
def clause_free_instances(draw):
    n = draw(st.integers(2, 6))
    nb = draw(st.integers(1, 4))
    arcs = []
    used = set()
    for _ in range(draw(st.integers(1, 9))):
        u, v = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if u == v:
            continue
        b = draw(st.one_of(st.none(), st.integers(0, nb - 1)))
        if b is None or (b, u, v) in used:
            arcs.append(Arc(u, v, False))
        else:
            used.add((b, u, v))
            arcs.append(Arc(u, v, True, b))
    bundles = sorted({a.bundle for a in arcs if a.bundle is not None})
    weights = tuple((b, draw(st.integers(1, 4))) for b in bundles)
    W = draw(st.one_of(st.none(), st.integers(0, 8)))
    return CutInstance(n, 0, 1, tuple(arcs), (), weights, draw(st.integers(0, 3)), W)


@settings(max_examples=150, deadline=None)
@given(clause_free_instances())
def test_matches_arc_subset_brute_force(inst):
    out = solve_bundled_cut(inst)
    want = oracle_cut_arcs(inst)
    assert out.yes == (want is not None)
    if out.yes:
        ev = evaluate_cut(inst, out.cut)
        assert ev.feasible() and ev.violated <= out.bundles
        assert ev.weight == evaluate_cut(inst, want).weight


@given(clause_free_instances())
def test_deleting_whole_bundles_is_optimal_for_the_subset(inst):
    for size in range(len(inst.bundle_ids()) + 1):
        for subset in itertools.combinations(inst.bundle_ids(), size):
            cut = subset_is_cut(inst, frozenset(subset))
            own = [i for i, a in enumerate(inst.arcs) if a.bundle in subset]
            # any arc subset of these bundles that cuts t off implies the full deletion does
            partial = any(
                evaluate_cut(inst, z).is_cut
                for r in range(len(own) + 1)
                for z in itertools.combinations(own, r)
            )
            assert (cut is not None) == partial
