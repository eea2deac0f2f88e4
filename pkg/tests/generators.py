"""Seeded random instance families shared by the test modules."""

from __future__ import annotations

import itertools
import random
from typing import List, Optional, Sequence, Tuple

from minsat.classifier import in_delta, in_sigma
from minsat.core import (
    IMPL,
    REX,
    RMIX,
    RPRIME,
    UNARY0,
    UNARY1,
    BooleanRelation,
    Constraint,
    Formula,
    canonical_definition,
    relation_from_tuples,
)
from minsat.flowaug import Arc, CutDigraph
from minsat.gdpc import GdpcInstance
from minsat.hardness import MulticoloredGraph
from minsat.oracle import oracle_formula_ilp, oracle_minsat, oracle_wminsat


def random_relation(rng: random.Random, arity: int) -> BooleanRelation:
    return BooleanRelation(arity, rng.getrandbits(1 << arity))


def random_nonempty_relation(rng: random.Random, max_arity: int = 4) -> BooleanRelation:
    while True:
        rel = random_relation(rng, rng.randint(1, max_arity))
        if not rel.is_empty:
            return rel


def random_bijunctive(rng: random.Random, arity: int) -> BooleanRelation:
    while True:
        rel = random_relation(rng, arity)
        if not rel.is_empty and in_delta(rel):
            return rel


def random_sigma(rng: random.Random, max_arity: int = 4) -> BooleanRelation:
    while True:
        rel = random_nonempty_relation(rng, max_arity)
        if in_sigma(rel):
            return rel


def _units(rng: random.Random, n: int, max_weight: int) -> List[Constraint]:
    return [Constraint(u, (rng.randrange(n),), rng.randint(1, max_weight)) for u in (UNARY0, UNARY1)]


def delta_formula(rng: random.Random) -> Formula:
    """Weighted formula over a 1b language: bijunctive relations plus both unit relations.

    The unit constraints make the language neither 0-valid nor 1-valid.
    """
    n = rng.randint(2, 8)
    cons = _units(rng, n, 5)
    for _ in range(rng.randint(0, 6)):
        arity = rng.randint(1, min(3, n))
        cons.append(
            Constraint(
                random_bijunctive(rng, arity),
                tuple(rng.sample(range(n), arity)),
                None if rng.random() < 0.15 else rng.randint(1, 5),
            )
        )
    return Formula(n, tuple(cons), rng.randint(0, 3), rng.randint(0, 12))


def sigma_pool(rng: random.Random, size: int = 40) -> List[BooleanRelation]:
    """Sigma relations with no forced coordinates, seeded with the named examples."""
    pool = [IMPL, REX, RPRIME, RMIX, relation_from_tuples(2, ["00", "01", "10"])]
    while len(pool) < size:
        rel = random_relation(rng, rng.randint(2, 3))
        if rel.is_empty or rel.is_full or not in_sigma(rel):
            continue
        cd = canonical_definition(rel)
        if cd.ones or cd.zeroes:
            continue
        pool.append(rel)
    return pool


def sigma_formula(rng: random.Random, pool: Sequence[BooleanRelation]) -> Formula:
    """Unweighted formula over Sigma relations plus both unit relations.

    The budget is the optimum or one below it, so both answers are common.
    """
    n = rng.randint(3, 8)
    cons = _units(rng, n, 1)
    for _ in range(rng.randint(2, 6)):
        if rng.random() < 0.25:
            rel = rng.choice([UNARY0, UNARY1])
        else:
            rel = rng.choice(pool)
        scope = tuple(rng.randrange(n) for _ in range(rel.arity))
        cons.append(Constraint(rel, scope, None if rng.random() < 0.15 else 1))
    probe = Formula(n, tuple(cons), 0)
    best = oracle_minsat(probe, k=len(cons))
    opt = best.violations if best is not None else 0
    return Formula(n, tuple(cons), max(0, min(3, opt - rng.randint(0, 1))))


def path_gdpc_instance(rng: random.Random, lam_max: int = 3, extra_max: int = 3, bundles_max: int = 5) -> GdpcInstance:
    """Disjoint s-t paths with attached vertices, cross arcs and pair clauses."""
    s, t = 0, 1
    n = 2
    paths = []
    for _ in range(rng.randint(1, lam_max)):
        length = rng.randint(1, 3)
        verts = list(range(n, n + length))
        n += length
        paths.append([s] + verts + [t])
    extra = list(range(n, n + rng.randint(0, extra_max)))
    n += len(extra)
    nb = rng.randint(1, bundles_max)
    arcs: List[Arc] = []
    used = set()

    def soft(u: int, v: int) -> Arc:
        b = rng.randrange(nb)
        if (b, u, v) in used:
            return Arc(u, v, False)
        used.add((b, u, v))
        return Arc(u, v, True, b)

    for p in paths:
        for u, v in zip(p, p[1:]):
            arcs.append(soft(u, v) if rng.random() < 0.8 else Arc(u, v, False))
    on_paths = sorted({v for p in paths for v in p[1:-1]})
    inner = list(range(2, n))
    for x in extra:
        src = rng.choice([s] + on_paths)
        arcs.append(Arc(src, x, False) if rng.random() < 0.7 else soft(src, x))
    for _ in range(rng.randint(0, 3)):
        u, v = rng.choice(inner), rng.choice(inner + [t])
        if u != v:
            arcs.append(Arc(u, v, False) if rng.random() < 0.5 else soft(u, v))
    clauses = []
    seen = set()
    for _ in range(rng.randint(1, 5)):
        key = tuple(sorted((rng.choice(inner), rng.choice(inner))))
        if rng.random() < 0.2:
            clauses.append((key, None))
            continue
        b = rng.randrange(nb)
        if (b, key) not in seen:
            seen.add((b, key))
            clauses.append((key, b))
    weights = tuple((b, rng.randint(1, 4)) for b in range(nb))
    W = rng.choice([None, rng.randint(2, 12)])
    return GdpcInstance(n, s, t, tuple(arcs), tuple(clauses), weights, rng.randint(1, 4), W)


def random_digraph(rng: random.Random, max_vertices: int = 7, max_arcs: int = 11) -> CutDigraph:
    n = rng.randint(2, max_vertices)
    arcs = []
    for _ in range(rng.randint(1, max_arcs)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and v != 0 and u != 1:
            arcs.append(Arc(u, v, rng.random() < 0.8))
    return CutDigraph(n, 0, 1, tuple(arcs))


def random_multicolored_graph(rng: random.Random, sizes: Sequence[int], density: float) -> MulticoloredGraph:
    vertices = [(i, r) for i, n in enumerate(sizes) for r in range(n)]
    edges = [(u, v) for u, v in itertools.combinations(vertices, 2) if u[0] != v[0] and rng.random() < density]
    return MulticoloredGraph.build(list(sizes), edges)


def bipartite_layers_graph(rng: random.Random, sizes: Sequence[int], density: float) -> MulticoloredGraph:
    """Edges only between parts 0-1 and 1-2 plus a sparse 0-2 layer avoiding triangles."""
    g = random_multicolored_graph(rng, sizes, density)
    edges = []
    for u, v in sorted(g.edges):
        if {u[0], v[0]} == {0, 2}:
            mid = [(1, r) for r in range(sizes[1])]
            if any(g.adjacent(u, m) and g.adjacent(v, m) for m in mid):
                continue
        edges.append((u, v))
    return MulticoloredGraph.build(list(sizes), edges)


def formula_oracle(formula: Formula, max_vars: int = 22) -> Optional[Tuple[int, ...]]:
    """Enumeration up to ``max_vars`` variables, the ILP oracle beyond."""
    if formula.num_vars <= max_vars:
        ans = oracle_wminsat(formula) if formula.weighted else oracle_minsat(formula)
    else:
        ans = oracle_formula_ilp(formula)
    return None if ans is None else ans.values
