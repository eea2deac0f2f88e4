from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsat.core import R4, RCMC, RMIX, RPRIME, NEQ, assignment_cost
from minsat.hardness import (
    MulticoloredGraph,
    assignment_from_cut,
    find_multicolored_clique,
    find_paired_cut,
    gadget_negpath,
    gadget_weighted_path,
    gen_arrow_hard,
    gen_gaifman_hard,
    gen_paired_cut,
    gen_weighted_hard,
    implement_rstar_arrow,
    implement_rstar_gaifman,
    negpath_assignment,
    paired_cut_from_pairs,
)
from minsat.core import RelationError
from minsat.flowaug import CutError
from minsat.oracle import oracle_minsat, oracle_wminsat
from minsat.pipeline import within_budget

import generators as gen

TRIANGLE = MulticoloredGraph.build([1, 1, 1], [((0, 0), (1, 0)), ((0, 0), (2, 0)), ((1, 0), (2, 0))])
PATH = MulticoloredGraph.build([1, 1, 1], [((0, 0), (1, 0)), ((1, 0), (2, 0))])


def test_multicolored_graph_validation():
    with pytest.raises(CutError):
        MulticoloredGraph.build([2], [((0, 0), (0, 1))])
    assert TRIANGLE.adjacent((2, 0), (0, 0))


def test_triangle_is_yes_everywhere():
    assert find_multicolored_clique(TRIANGLE) == (0, 0, 0)
    inst = gen_paired_cut(TRIANGLE)
    assert inst.ell == 3 and len(inst.paths) == 6
    chosen = find_paired_cut(inst)
    assert chosen is not None
    cut = paired_cut_from_pairs(inst, chosen)
    for hard in (gen_gaifman_hard(inst, R4), gen_arrow_hard(inst, RCMC), gen_weighted_hard(inst)):
        values = assignment_from_cut(inst, hard, cut)
        assert within_budget(hard.formula, assignment_cost(hard.formula, values))


def test_path_is_no():
    assert find_multicolored_clique(PATH) is None
    inst = gen_paired_cut(PATH)
    assert find_paired_cut(inst) is None
    assert oracle_minsat(gen_gaifman_hard(inst, R4).formula) is None


@pytest.mark.parametrize("rel", [R4, RMIX])
def test_gaifman_template_exists(rel):
    assert implement_rstar_gaifman(rel) is not None


@pytest.mark.parametrize("rel", [R4, RCMC, RPRIME])
def test_arrow_template_exists(rel):
    assert implement_rstar_arrow(rel) is not None


def test_templates_need_a_2k2():
    with pytest.raises(RelationError):
        implement_rstar_gaifman(NEQ)
    with pytest.raises(RelationError):
        implement_rstar_arrow(NEQ)


def test_negpath_r4_example():
    f = gadget_negpath(R4, 2)
    best = oracle_minsat(f)
    assert best.violations == 1
    for i in range(3):
        assert assignment_cost(f, negpath_assignment(2, i)).violations == 1


def test_weighted_path_example():
    for via in (False, True):
        f = gadget_weighted_path(2, 5, via)
        assert oracle_wminsat(f).weight == 5
        assert oracle_wminsat(f, W=4) is None
        for i in range(3):
            cost = assignment_cost(f, negpath_assignment(2, i))
            assert (cost.violations, cost.weight) == (2, 5)


def test_weighted_path_needs_large_target():
    with pytest.raises(ValueError):
        gadget_weighted_path(3, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_paired_cut_matches_clique(seed):
    rng = random.Random(seed)
    g = gen.random_multicolored_graph(rng, [rng.randint(1, 3) for _ in range(3)], rng.uniform(0.3, 0.9))
    inst = gen_paired_cut(g)
    for path in inst.paths:
        assert len(path) >= 1
    assert (find_paired_cut(inst) is None) == (find_multicolored_clique(g) is None)
    assert sorted(itertools.chain.from_iterable(inst.pairing)) == list(range(len(inst.dag.arcs)))
