"""Generalized Digraph Pair Cut: reduction from bijunctive MinSAT and a branching solver.

The solver runs every random choice of the underlying algorithm as deterministic
branching. Answers are only accepted after an independent re-check on the original
instance, so every YES is sound whatever branch produced it.

Pipeline: ``lift_to_mincut`` turns the instance into ones where some solution is an
st-mincut, ``eliminate_clauses`` removes all clauses, and ``solve_bundled_cut``
finishes the clause-free instances.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .bundledcut import solve_bundled_cut
from .core import (
    BIJUNCTIVE_KINDS,
    Formula,
    Outcome,
    ResourceLimit,
    SearchBudget,
    Status,
    UndirectedGraph,
    assignment_cost,
    implied_clauses,
    is_2k2_free,
    negate_coordinate,
    within_budget,
)
from .flowaug import (
    INF,
    Arc,
    CutDigraph,
    CutError,
    CutInstance,
    StFlow,
    augment_from_side,
    augment_oracle_core,
    max_flow,
    reachable,
)

S_VERTEX = 0
T_VERTEX = 1


# ---------------------------------------------------------------- instance types


@dataclass(frozen=True)
class GdpcInstance(CutInstance):
    """A cut instance whose clauses are vertex pairs (a repeated vertex is allowed)."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for members, _ in self.clauses:
            if len(members) != 2:
                raise CutError(f"GDPC clauses are pairs, got {members}")

    @staticmethod
    def of(inst: CutInstance) -> "GdpcInstance":
        return GdpcInstance(inst.n, inst.s, inst.t, inst.arcs, inst.clauses, inst.weights, inst.k, inst.W)

    def bundle_graph(self, bundle: int) -> UndirectedGraph:
        """Arcs and clauses of a bundle among non-terminal vertices, as undirected edges."""
        edges = [(self.arcs[i].tail, self.arcs[i].head) for i in self.bundle_arcs(bundle)]
        edges += [tuple(self.clauses[i][0]) for i in self.bundle_clauses(bundle)]
        keep = [(u, v) for u, v in edges if {u, v}.isdisjoint({self.s, self.t})]
        return UndirectedGraph.build(self.n, keep)

    def is_2k2_free(self) -> bool:
        return all(is_2k2_free(self.bundle_graph(b)) for b in self.bundle_ids())

    def is_bounded(self, b: int) -> bool:
        return all(len(self.bundle_vertices(x)) <= b for x in self.bundle_ids())


@dataclass(frozen=True)
class GdpcSolution:
    cut: FrozenSet[int]
    bundles: FrozenSet[int]


@dataclass(frozen=True)
class SolveBudgets:
    kappa: int
    kappa_c: int
    lam: int

    @property
    def kappa_out(self) -> int:
        return self.kappa - self.lam


def cut_of_bundles(inst: CutInstance, bundles: Iterable[int]) -> Optional[FrozenSet[int]]:
    """Delete every arc of the given bundles and return the induced cut if it is feasible.

    Feasible means t is unreachable and every clause outside the bundles is satisfied.
    Budgets are not checked here.
    """
    chosen = set(bundles)
    removed = [i for i, a in enumerate(inst.arcs) if a.bundle in chosen]
    side = reachable(inst.graph, removed)
    if inst.t in side:
        return None
    for members, b in inst.clauses:
        if b not in chosen and all(v in side for v in members):
            return None
    return frozenset(i for i in removed if inst.arcs[i].tail in side and inst.arcs[i].head not in side)


def verify_bundles(inst: CutInstance, bundles: Iterable[int]) -> Optional[GdpcSolution]:
    """Independent acceptance check: the bundle set is feasible and within both budgets."""
    chosen = frozenset(b for b in bundles if b in set(inst.bundle_ids()))
    if len(chosen) > inst.k:
        return None
    if inst.W is not None and sum(inst.weight(b) for b in chosen) > inst.W:
        return None
    cut = cut_of_bundles(inst, chosen)
    if cut is None:
        return None
    return GdpcSolution(cut, chosen)


# ---------------------------------------------------------------- 2-SAT and deletion sets


def _constraint_clauses(formula: Formula, index: int) -> Optional[List[Tuple[Tuple[int, bool], ...]]]:
    """Clauses over formula variables equivalent to one bijunctive constraint; None if it is unsatisfiable."""
    c = formula.constraints[index]
    if c.relation.is_empty:
        return None
    out = []
    for clause in implied_clauses(c.relation, BIJUNCTIVE_KINDS):
        out.append(tuple((c.scope[p], pol) for p, pol in clause.literals))
    return out


def solve_2sat(num_vars: int, clauses: Iterable[Sequence[Tuple[int, bool]]]) -> Optional[List[int]]:
    """A satisfying assignment of a set of 1- and 2-literal clauses, or None."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(2 * num_vars))

    def node(v: int, positive: bool) -> int:
        return 2 * v + (1 if positive else 0)

    for lits in clauses:
        if len(lits) == 1:
            (v, p), = lits
            graph.add_edge(node(v, not p), node(v, p))
        elif len(lits) == 2:
            (a, p), (b, q) = lits
            graph.add_edge(node(a, not p), node(b, q))
            graph.add_edge(node(b, not q), node(a, p))
        else:
            raise ValueError("2-SAT clauses have one or two literals")
    comps = list(nx.strongly_connected_components(graph))
    comp_of = {}
    for ci, comp in enumerate(comps):
        for x in comp:
            comp_of[x] = ci
    for v in range(num_vars):
        if comp_of[node(v, True)] == comp_of[node(v, False)]:
            return None
    dag = nx.condensation(graph, comps)
    order = {c: i for i, c in enumerate(nx.topological_sort(dag))}
    return [1 if order[comp_of[node(v, True)]] > order[comp_of[node(v, False)]] else 0 for v in range(num_vars)]


def satisfying_assignment(formula: Formula, dropped: Iterable[int] = ()) -> Optional[List[int]]:
    """Satisfy every constraint not listed in ``dropped`` (bijunctive constraints only)."""
    skip = set(dropped)
    clauses = []
    for i in range(len(formula.constraints)):
        if i in skip:
            continue
        cl = _constraint_clauses(formula, i)
        if cl is None:
            return None
        clauses.extend(cl)
    return solve_2sat(formula.num_vars, clauses)


def find_deletion_set(formula: Formula, limit: Optional[int] = None) -> Optional[FrozenSet[int]]:
    """A smallest set of soft constraint indices whose removal leaves a satisfiable formula.

    Searches sizes up to ``limit`` (default: the budget k) and returns None (a NO
    verdict) when no such set exists; every solution violates a deletion set, so this
    is exact for the decision problem.
    """
    limit = formula.budget_k if limit is None else limit
    soft = [i for i, c in enumerate(formula.constraints) if not c.crisp]
    for size in range(0, min(limit, len(soft)) + 1):
        for combo in itertools.combinations(soft, size):
            if satisfying_assignment(formula, combo) is not None:
                return frozenset(combo)
    return None


# ---------------------------------------------------------------- reduction from MinSAT


def variable_vertex(x: int) -> int:
    return x + 2


@dataclass(frozen=True)
class GdpcReduction:
    """A reduced instance plus what is needed to pull a cut back to an assignment."""

    instance: GdpcInstance
    alpha: Tuple[int, ...]
    always_violated: FrozenSet[int]
    always_satisfied: FrozenSet[int]

    def assignment(self, side: Iterable[int]) -> Tuple[int, ...]:
        side = set(side)
        return tuple((1 if variable_vertex(x) in side else 0) ^ a for x, a in enumerate(self.alpha))

    def assignment_from_bundles(self, bundles: Iterable[int]) -> Tuple[int, ...]:
        chosen = set(bundles)
        removed = [i for i, a in enumerate(self.instance.arcs) if a.bundle in chosen]
        return self.assignment(reachable(self.instance.graph, removed))


def _renamed(formula: Formula, alpha: Sequence[int]):
    out = []
    for c in formula.constraints:
        rel = c.relation
        for p, v in enumerate(c.scope):
            if alpha[v]:
                rel = negate_coordinate(rel, p)
        out.append(rel)
    return out


def _status_under(rel, scope, fixed: Dict[int, int]) -> Optional[bool]:
    """True if every extension of ``fixed`` satisfies the constraint, False if none does, else None."""
    free = sorted({v for v in scope if v not in fixed})
    seen = set()
    for bits in itertools.product((0, 1), repeat=len(free)):
        vals = dict(fixed)
        vals.update(zip(free, bits))
        seen.add(rel.contains_values([vals[v] for v in scope]))
        if len(seen) == 2:
            return None
    return seen.pop()


def reduce_minsat_to_gdpc(
    formula: Formula,
    deletion_set: Iterable[int],
    beta: Dict[int, int],
    alpha: Optional[Sequence[int]] = None,
) -> Optional[GdpcReduction]:
    """Build the GDPC instance for one assignment ``beta`` of the deletion-set variables.

    ``beta`` is given in the original variable space. Returns None when the choice is
    already a NO (a crisp constraint is always violated or a budget goes negative).
    """
    deletion = set(deletion_set)
    if alpha is None:
        alpha = satisfying_assignment(formula, deletion)
        if alpha is None:
            raise ValueError("the given constraints do not form a deletion set")
    alpha = tuple(alpha)
    pinned = sorted({v for i in deletion for v in formula.constraints[i].scope})
    if set(beta) != set(pinned):
        raise ValueError("beta must assign exactly the variables of the deletion set")
    fixed = {v: beta[v] ^ alpha[v] for v in pinned}
    relations = _renamed(formula, alpha)

    violated: Set[int] = set()
    satisfied: Set[int] = set()
    for i, c in enumerate(formula.constraints):
        status = _status_under(relations[i], c.scope, fixed)
        if status is False:
            if c.crisp:
                return None
            violated.add(i)
        elif status is True:
            satisfied.add(i)
    k = formula.budget_k - len(violated)
    W = formula.budget_W
    if W is not None:
        W -= sum(formula.constraints[i].weight for i in violated)
    if k < 0 or (W is not None and W < 0):
        return None

    s, t = S_VERTEX, T_VERTEX
    arcs: List[Arc] = []
    clauses: List[Tuple[Tuple[int, int], Optional[int]]] = []
    for v in pinned:
        x = variable_vertex(v)
        arcs.append(Arc(s, x, False) if fixed[v] else Arc(x, t, False))
    weights = []
    for i, c in enumerate(formula.constraints):
        if i in violated or i in satisfied:
            continue
        bundle = None if c.crisp else i
        if bundle is not None:
            weights.append((i, c.weight))
        seen = set()
        for clause in implied_clauses(relations[i], BIJUNCTIVE_KINDS):
            lits = [(variable_vertex(c.scope[p]), pol) for p, pol in clause.literals]
            if len(lits) == 1:
                (x, pol), = lits
                if pol:
                    raise AssertionError("renamed constraints are 0-valid")
                item = ("arc", x, t)
            else:
                (x, p), (y, q) = lits
                if p and q:
                    raise AssertionError("renamed constraints are 0-valid")
                if not p and not q:
                    item = ("arc", x, t) if x == y else ("clause",) + tuple(sorted((x, y)))
                elif x == y:
                    continue
                else:
                    tail, head = (x, y) if not p else (y, x)
                    item = ("arc", tail, head)
            if item in seen:
                continue
            seen.add(item)
            if item[0] == "arc":
                arcs.append(Arc(item[1], item[2], bundle is not None, bundle))
            else:
                clauses.append(((item[1], item[2]), bundle))
    inst = GdpcInstance(
        formula.num_vars + 2, s, t, tuple(arcs), tuple(clauses), tuple(weights), k, W
    )
    return GdpcReduction(inst, alpha, frozenset(violated), frozenset(satisfied))


# ---------------------------------------------------------------- projections onto flow paths


class _FlowView:
    """Flow-path orders, attachment reachability and projections for one graph snapshot."""

    def __init__(self, s: int, t: int, arcs: Iterable[Tuple[int, int]], paths: Sequence[Sequence[int]]) -> None:
        self.s, self.t = s, t
        self.paths = [list(p) for p in paths]
        self.flow_vertices: Set[int] = set()
        for p in self.paths:
            self.flow_vertices.update(p)
        self.pos = [{v: j for j, v in enumerate(p)} for p in self.paths]
        self.out: Dict[int, List[int]] = {}
        for u, v in arcs:
            self.out.setdefault(u, []).append(v)
        self._attach: Dict[int, Set[int]] = {}
        self._proj: Dict[Tuple[int, int], int] = {}

    def attach(self, x: int) -> Set[int]:
        """``x`` plus every vertex reachable from it through vertices off the flow."""
        got = self._attach.get(x)
        if got is None:
            got = {x}
            queue = deque([x])
            while queue:
                u = queue.popleft()
                for v in self.out.get(u, ()):
                    if v not in got and v not in self.flow_vertices:
                        got.add(v)
                        queue.append(v)
            self._attach[x] = got
        return got

    def proj(self, i: int, v: int) -> int:
        key = (i, v)
        got = self._proj.get(key)
        if got is None:
            if v in self.flow_vertices:
                got = v if v in self.pos[i] and v != self.t else self.t
            else:
                got = self.t
                for x in self.paths[i][:-1]:
                    if v in self.attach(x):
                        got = x
                        break
            self._proj[key] = got
        return got

    def rank(self, i: int, v: int) -> int:
        return self.pos[i][v]


def path_vertices(g: CutDigraph, path: Sequence[int]) -> List[int]:
    return [g.s] + [g.arcs[a].head for a in path]


def _view_of(g: CutDigraph, flow: StFlow) -> _FlowView:
    return _FlowView(g.s, g.t, [(a.tail, a.head) for a in g.arcs], [path_vertices(g, p) for p in flow.paths])


def project_onto_path(g: CutDigraph, flow: StFlow, i: int, v: int) -> int:
    """The earliest vertex of flow path ``i`` with an attachment path to ``v``; t if none."""
    return _view_of(g, flow).proj(i, v)


# ---------------------------------------------------------------- lifting a solution to a mincut


def detect_active_sequence(inst: CutInstance, flow: StFlow, budgets: SolveBudgets) -> Iterator[Tuple[int, Tuple[int, ...]]]:
    """Every candidate (path index, vertex sequence) over all branches of the detection step.

    Branches over the set of at most ``kappa_c`` violated clauses, the ordered pair of
    flow paths, and the set of at most ``2 * kappa_out`` excluded antichain indices.
    Sequences are emitted once each.
    """
    lam = len(flow)
    if lam == 0:
        return
    view = _view_of(inst.graph, flow)
    emitted: Set[Tuple[int, Tuple[int, ...]]] = set()
    soft = [ci for ci, (_, b) in enumerate(inst.clauses) if b is not None]
    for size in range(0, min(budgets.kappa_c, len(soft)) + 1):
        for dropped in itertools.combinations(soft, size):
            gone = set(dropped)
            kept = [(ci, inst.clauses[ci][0]) for ci in range(len(inst.clauses)) if ci not in gone]
            for i, j in itertools.product(range(lam), repeat=2):
                if i == j:
                    seqs = _case_same_path(view, i, kept)
                else:
                    seqs = _case_two_paths(view, i, j, kept, budgets.kappa_out, inst.s)
                for seq in seqs:
                    key = (i, seq)
                    if key not in emitted:
                        emitted.add(key)
                        yield key


def _case_same_path(view: _FlowView, i: int, kept) -> List[Tuple[int, ...]]:
    t = view.t
    pairs = []
    for ci, (u, v) in kept:
        for a, b in ((u, v), (v, u)):
            pa, pb = view.proj(i, a), view.proj(i, b)
            if pa != t and pb != t and view.rank(i, pa) <= view.rank(i, pb):
                pairs.append((view.rank(i, pb), ci, a, b))
    if not pairs:
        return []
    _, _, u1, v1 = min(pairs)
    out = []
    for x in dict.fromkeys((u1, v1)):
        if x not in view.flow_vertices:
            out.append((x,))
    return out


def _case_two_paths(view: _FlowView, i: int, j: int, kept, kappa_out: int, s: int) -> List[Tuple[int, ...]]:
    t = view.t
    pairs = []
    for ci, (u, v) in kept:
        for a, b in ((u, v), (v, u)):
            x, y = view.proj(i, a), view.proj(j, b)
            if x in (s, t) or y in (s, t):
                continue
            pairs.append((view.rank(i, x), view.rank(j, y), ci, a, b))
    undominated = [
        p for p in pairs
        if not any(q[0] <= p[0] and q[1] <= p[1] and (q[0], q[1]) != (p[0], p[1]) for q in pairs)
    ]
    chosen: Dict[Tuple[int, int], Tuple] = {}
    for p in sorted(undominated, key=lambda p: (p[0], p[1], p[2])):
        chosen.setdefault((p[0], p[1]), p)
    chain = sorted(chosen.values())
    width = len(chain)
    out = []
    for bad_size in range(0, min(2 * kappa_out, width - 1) + 1):
        for bad in itertools.combinations(range(width), bad_size):
            keep = [chain[b][3] for b in range(width) if b not in bad]
            out.append(tuple(keep))
    return out


@dataclass(frozen=True)
class AbsorbResult:
    instance: GdpcInstance
    flow: StFlow
    kappa: int
    new_arcs: Tuple[int, ...]  # ids of the arcs s->u1, u1->u2, ..., u_l->t in path order


def absorb_step(
    inst: CutInstance,
    flow: StFlow,
    kappa: int,
    sequence: Sequence[int],
    augment: Optional[Callable[[CutDigraph], Tuple[List[Tuple[int, int]], StFlow]]] = None,
) -> AbsorbResult:
    """Add the path s, u1, ..., ul, t and re-augment.

    Every arc except the last is a fresh singleton bundle of weight W + 1 (weight 1 when
    unweighted); the arc into t is crisp. k grows by one and W becomes 2W + 1. With no
    ``augment`` callback the flow is a plain maximum flow of the new graph.
    """
    if kappa - len(flow) <= 0 or len(flow) == 0:
        raise CutError("absorb needs kappa > lambda > 0")
    if not sequence:
        raise CutError("absorb needs a non-empty vertex sequence")
    next_bundle = max(inst.bundle_ids(), default=-1) + 1
    weight = 1 if inst.W is None else inst.W + 1
    arcs = list(inst.arcs)
    weights = list(inst.weights)
    new_ids = []
    prev = inst.s
    for u in sequence:
        new_ids.append(len(arcs))
        arcs.append(Arc(prev, u, True, next_bundle))
        weights.append((next_bundle, weight))
        next_bundle += 1
        prev = u
    new_ids.append(len(arcs))
    arcs.append(Arc(prev, inst.t, False))
    W = None if inst.W is None else 2 * inst.W + 1
    grown = GdpcInstance(inst.n, inst.s, inst.t, tuple(arcs), inst.clauses, tuple(weights), inst.k + 1, W)
    if augment is None:
        _, new_flow = max_flow(grown.graph)
        return AbsorbResult(grown, new_flow, kappa + 1, tuple(new_ids))
    pairs, new_flow = augment(grown.graph)
    grown = _with_crisp(grown, pairs)
    return AbsorbResult(grown, new_flow, kappa + 1, tuple(new_ids))


def _with_crisp(inst: CutInstance, pairs: Iterable[Tuple[int, int]]) -> GdpcInstance:
    arcs = inst.arcs + tuple(Arc(u, v, False) for u, v in pairs)
    return GdpcInstance(inst.n, inst.s, inst.t, arcs, inst.clauses, inst.weights, inst.k, inst.W)


def _kappa_bound(inst: CutInstance) -> int:
    """Largest size of an inclusion-minimal solution: the k biggest bundles' arc counts."""
    counts = sorted((len(inst.bundle_arcs(b)) for b in inst.bundle_ids()), reverse=True)
    b = max(inst.arity(), 1)
    return min(sum(counts[: max(inst.k, 0)]), 2 * max(inst.k, 0) * b * b)


def _star_sides_by_size(g: CutDigraph) -> Dict[int, List[FrozenSet[int]]]:
    others = [v for v in range(g.n) if v not in (g.s, g.t)]
    out: Dict[int, List[FrozenSet[int]]] = {}
    for r in range(len(others) + 1):
        for chosen in itertools.combinations(others, r):
            side = frozenset((g.s, *chosen))
            z = [i for i, a in enumerate(g.arcs) if a.tail in side and a.head not in side]
            if any(not g.arcs[i].soft for i in z):
                continue
            if reachable(g, z) == side:
                out.setdefault(len(z), []).append(side)
    return out


def lift_to_mincut(inst: CutInstance, budget: Optional[SearchBudget] = None) -> Iterator[Tuple[GdpcInstance, StFlow, SolveBudgets]]:
    """Branches (instance, flow) on which some solution of size kappa = lambda is an st-mincut.

    For each guessed solution size kappa the instance is emitted unchanged when its own
    flow value already equals kappa, followed by one augmentation per reach-closed source
    side whose out-boundary is a soft star cut of size kappa. The augmentation of the side
    of an optimal solution makes that solution an st-mincut, so no absorb round is needed
    on these branches.
    """
    g = inst.graph
    lam, flow0 = max_flow(g)
    if lam == INF:
        return
    gd = GdpcInstance.of(inst) if not isinstance(inst, GdpcInstance) else inst
    sides = _star_sides_by_size(g)
    for kappa in range(int(lam), _kappa_bound(inst) + 1):
        if budget is not None:
            budget.log(0, f"lift kappa={kappa}")
        if kappa == lam:
            yield gd, flow0, SolveBudgets(kappa, 0, int(lam))
        for side in sides.get(kappa, ()):
            pairs, flow = augment_from_side(g, side)
            yield _with_crisp(gd, pairs), flow, SolveBudgets(kappa, 0, len(flow))


@dataclass(frozen=True)
class LiftStep:
    kappa: int  # size of the tracked solution cut
    lam: int  # max-flow value after augmentation
    candidates: int  # detected sequences examined before one made progress


@dataclass(frozen=True)
class LiftTrace:
    """The absorb loop run along the branch of one known optimal solution.

    ``steps[0]`` is the state after the initial augmentation; every later entry follows
    one ``absorb_step``. ``stuck`` is set when no detected sequence made progress.
    """

    steps: Tuple[LiftStep, ...]
    stuck: bool
    instance: Optional[GdpcInstance] = None

    def gaps(self) -> List[int]:
        return [st.kappa - st.lam for st in self.steps]

    def strictly_decreasing(self) -> bool:
        gaps = self.gaps()
        return not self.stuck and all(b < a for a, b in zip(gaps, gaps[1:])) and (not gaps or gaps[-1] == 0)


def _side_pattern_ok(seq: Sequence[int], side: Set[int]) -> bool:
    """A non-empty prefix-closed split: some u_a leaves the side and all later ones stay out."""
    inside = [u in side for u in seq]
    a = inside.index(False) if False in inside else None
    return a is not None and not any(inside[a:])


def _fewest_arc_cut(inst: CutInstance, chosen: Set[int]) -> Tuple[Set[int], FrozenSet[int]]:
    """Source side and arcs of a feasible star cut inside ``chosen`` with the fewest arcs."""
    removable = [i for i, a in enumerate(inst.arcs) if a.bundle in chosen]
    for size in range(len(removable) + 1):
        for removed in itertools.combinations(removable, size):
            side = reachable(inst.graph, removed)
            if inst.t in side:
                continue
            if any(b not in chosen and all(v in side for v in members) for members, b in inst.clauses):
                continue
            return side, frozenset(i for i in removed if inst.arcs[i].tail in side and inst.arcs[i].head not in side)
    raise CutError("the given bundles are not a feasible solution")


def lift_trace(inst: CutInstance, bundles: Iterable[int], max_rounds: Optional[int] = None) -> LiftTrace:
    """Drive ``absorb_step`` with augmentations that know the solution violating ``bundles``.

    The tracked solution is the star cut with the fewest arcs among those violating only
    ``bundles``, so every arc outside its core is forced by some clause. When no
    flow exists, a crisp arc to t is added from an endpoint outside the source side of a
    clause whose endpoints are all reachable. Each round scans ``detect_active_sequence``
    for a sequence that splits into a source-side prefix and a sink-side rest, absorbs it,
    extends the solution by the one new cut arc and augments for it.
    """
    gd = GdpcInstance.of(inst) if not isinstance(inst, GdpcInstance) else inst
    chosen = set(bundles)
    if cut_of_bundles(gd, chosen) is None:
        raise CutError("the given bundles are not a feasible solution")
    side, z = _fewest_arc_cut(gd, chosen)
    kappa_c = sum(1 for members, b in gd.clauses if b in chosen and all(v in side for v in members))
    lam, _ = max_flow(gd.graph)
    if lam == 0 and z:
        reach = reachable(gd.graph)
        for members, _b in gd.clauses:
            if all(v in reach for v in members) and not all(v in side for v in members):
                x = next(v for v in members if v not in side)
                gd = _with_crisp(gd, [(x, gd.t)])
                break
    pairs, flow = augment_oracle_core(gd.graph, z)
    gd = _with_crisp(gd, pairs)
    steps = [LiftStep(len(z), int(max_flow(gd.graph)[0]), 0)]
    rounds = 0
    while steps[-1].kappa > steps[-1].lam:
        if max_rounds is not None and rounds >= max_rounds:
            return LiftTrace(tuple(steps), True, gd)
        rounds += 1
        budgets = SolveBudgets(len(z), kappa_c, len(flow))
        gap = steps[-1].kappa - steps[-1].lam
        tried = 0
        advanced = False
        for i, seq in detect_active_sequence(gd, flow, budgets):
            tried += 1
            if not _side_pattern_ok(seq, side):
                continue
            a = [u in side for u in seq].index(False)
            base = len(gd.arcs)
            # absorb_step lays out the new arcs s->u1, ..., u_l->t from ``base`` on
            z_next = z | {base + a}
            res = absorb_step(gd, flow, len(z), seq, augment=lambda g: augment_oracle_core(g, z_next))
            lam_next = int(max_flow(res.instance.graph)[0])
            if len(z_next) - lam_next >= gap or lam_next != len(res.flow):
                continue
            gd, flow, z = res.instance, res.flow, z_next
            chosen.add(gd.arcs[base + a].bundle)
            steps.append(LiftStep(len(z), lam_next, tried))
            advanced = True
            break
        if not advanced:
            return LiftTrace(tuple(steps), True, gd)
    return LiftTrace(tuple(steps), False, gd)


# ---------------------------------------------------------------- clause elimination: state


_NO = "NO"


@dataclass(frozen=True)
class EliminationResult:
    """A leaf of clause elimination.

    ``instance`` is a clause-free cut instance still to be solved, or None when the leaf
    was decided directly with the violated bundles in ``bundles``. ``deleted`` lists the
    bundles the branch already committed to violating.
    """

    instance: Optional[CutInstance]
    bundles: FrozenSet[int]
    deleted: FrozenSet[int]


@dataclass
class _State:
    s: int
    t: int
    vertices: Set[int]
    arcs: Dict[int, Tuple[int, int, Optional[int]]]
    clauses: Dict[int, Tuple[int, int, Optional[int]]]
    weights: Dict[int, int]
    k: int
    W: Optional[int]
    paths: List[List[int]]
    deleted: Set[int]
    next_id: int
    guessed: bool = False

    @staticmethod
    def of(inst: CutInstance, flow: StFlow) -> "_State":
        arcs = {i: (a.tail, a.head, a.bundle) for i, a in enumerate(inst.arcs)}
        clauses = {i: (m[0], m[1], b) for i, (m, b) in enumerate(inst.clauses)}
        weights = {b: inst.weight(b) for b in inst.bundle_ids()}
        return _State(
            inst.s, inst.t, set(range(inst.n)), arcs, clauses, weights, inst.k, inst.W,
            [list(p) for p in flow.paths], set(), len(inst.arcs),
        )

    def copy(self) -> "_State":
        return _State(
            self.s, self.t, set(self.vertices), dict(self.arcs), dict(self.clauses), dict(self.weights),
            self.k, self.W, [list(p) for p in self.paths], set(self.deleted), self.next_id, self.guessed,
        )

    def fingerprint(self):
        return (
            frozenset(self.arcs.items()), frozenset(self.clauses.items()), self.k,
            tuple(tuple(p) for p in self.paths),
        )

    # -- queries

    def crisp_pairs(self) -> Set[Tuple[int, int]]:
        return {(u, v) for u, v, b in self.arcs.values() if b is None}

    def deletable(self, aid: int, crisp: Set[Tuple[int, int]]) -> bool:
        u, v, b = self.arcs[aid]
        return b is not None and (u, v) not in crisp

    def path_vertices(self, i: int) -> List[int]:
        return [self.s] + [self.arcs[a][1] for a in self.paths[i]]

    def flow_value(self) -> float:
        crisp = self.crisp_pairs()
        n = max(self.vertices | {self.s, self.t}) + 1
        arcs = tuple(Arc(u, v, self.deletable(a, crisp)) for a, (u, v, _) in self.arcs.items())
        return max_flow(CutDigraph(n, self.s, self.t, arcs))[0]

    def weight(self, b: int) -> int:
        return self.weights.get(b, 1)

    # -- primitive operations

    def add_crisp(self, u: int, v: int) -> None:
        self.arcs[self.next_id] = (u, v, None)
        self.next_id += 1

    def break_bundle(self, b: int) -> None:
        for aid, (u, v, bb) in list(self.arcs.items()):
            if bb == b:
                self.arcs[aid] = (u, v, None)
        for cid, (u, v, bb) in list(self.clauses.items()):
            if bb == b:
                self.clauses[cid] = (u, v, None)
        self.weights.pop(b, None)

    def break_segment(self, i: int, start: int, stop: int, crisp: Set[Tuple[int, int]]) -> Set[int]:
        return {self.arcs[a][2] for a in self.paths[i][start:stop] if self.deletable(a, crisp)}

    def identify(self, v: int, into: int) -> None:
        """Contract ``v`` into s or t, making the flow-path segment it cuts off undeletable."""
        crisp = self.crisp_pairs()
        doomed: Set[int] = set()
        for i in range(len(self.paths)):
            verts = self.path_vertices(i)
            if v not in verts:
                continue
            j = verts.index(v)
            segment = (0, j) if into == self.s else (j, len(self.paths[i]))
            if self.guessed:
                doomed |= self.break_segment(i, *segment, crisp)
            else:
                # before guessing, only the cut-off arcs themselves become undeletable
                for a in self.paths[i][segment[0]:segment[1]]:
                    if self.deletable(a, crisp):
                        x, y, _ = self.arcs[a]
                        self.add_crisp(x, y)
                        crisp.add((x, y))
            self.paths[i] = self.paths[i][j:] if into == self.s else self.paths[i][:j]
        for b in sorted(doomed):
            self.break_bundle(b)
        for aid, (x, y, b) in list(self.arcs.items()):
            if v in (x, y):
                self.arcs[aid] = (into if x == v else x, into if y == v else y, b)
        for cid, (x, y, b) in list(self.clauses.items()):
            if v in (x, y):
                self.clauses[cid] = (into if x == v else x, into if y == v else y, b)
        self.vertices.discard(v)

    def remove_vertices(self, dead: Iterable[int]) -> None:
        dead = set(dead)
        self.arcs = {a: e for a, e in self.arcs.items() if e[0] not in dead and e[1] not in dead}
        self.clauses = {c: e for c, e in self.clauses.items() if e[0] not in dead and e[1] not in dead}
        self.vertices -= dead

    def delete_bundle(self, b: int) -> None:
        """Commit to violating bundle ``b``: its flow arcs are the cut edges of their paths."""
        crisp = self.crisp_pairs()
        doomed: Set[int] = set()
        kept = []
        for i, path in enumerate(self.paths):
            hit = [j for j, a in enumerate(path) if self.arcs[a][2] == b and self.deletable(a, crisp)]
            if not hit:
                kept.append(path)
                continue
            j = hit[0]
            doomed |= self.break_segment(i, 0, j, crisp) | self.break_segment(i, j + 1, len(path), crisp)
        self.paths = kept
        for other in sorted(doomed - {b}):
            self.break_bundle(other)
        still_on_flow = {a for p in kept for a in p}
        for a, (u, v, bb) in list(self.arcs.items()):
            if bb != b:
                continue
            if a in still_on_flow:
                # an undeletable copy on another path: it has a crisp twin already
                self.arcs[a] = (u, v, None)
            else:
                del self.arcs[a]
        self.clauses = {c: e for c, e in self.clauses.items() if e[2] != b}
        self.k -= 1
        if self.W is not None:
            self.W -= self.weight(b)
        self.weights.pop(b, None)
        self.deleted.add(b)

    def contract_up_to(self, i: int, v: int, crisp: Set[Tuple[int, int]]) -> Set[int]:
        """Bundles to break so that P_i up to ``v`` lands on the s-side."""
        if v == self.s:
            return set()
        return self.break_segment(i, 0, self.path_vertices(i).index(v), crisp)

    def contract_from(self, i: int, v: int, crisp: Set[Tuple[int, int]]) -> Set[int]:
        """Bundles to break so that P_i from ``v`` on lands on the t-side."""
        if v == self.t:
            return set()
        return self.break_segment(i, self.path_vertices(i).index(v), len(self.paths[i]), crisp)

    def apply(self, ops: Sequence[Tuple[str, int, int]]) -> None:
        crisp = self.crisp_pairs()
        doomed: Set[int] = set()
        for kind, i, v in ops:
            if kind == "up":
                doomed |= self.contract_up_to(i, v, crisp)
            else:
                doomed |= self.contract_from(i, v, crisp)
        for b in sorted(doomed):
            self.break_bundle(b)

    # -- cleanup

    def _reach(self, start: Iterable[int], forward: bool, blocked: int) -> Set[int]:
        adj: Dict[int, List[int]] = {}
        for u, v, _ in self.arcs.values():
            if forward:
                adj.setdefault(u, []).append(v)
            else:
                adj.setdefault(v, []).append(u)
        seen = set(start)
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            if u == blocked:
                continue
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    def _empty_flow_answer(self):
        side = self._reach([self.s], True, -1)
        if self.t in side:
            return _NO
        hit: Set[int] = set()
        for u, v, b in self.clauses.values():
            if u in side and v in side:
                if b is None:
                    return _NO
                hit.add(b)
        if len(hit) > self.k:
            return _NO
        if self.W is not None and sum(self.weight(b) for b in hit) > self.W:
            return _NO
        return frozenset(hit | self.deleted)

    def cleanup(self, proper: bool):
        """Apply the reduction rules exhaustively.

        Returns None to continue, ``_NO`` for a dead branch, or the frozenset of violated
        bundles when the flow became empty and the empty cut decides the branch. Deleting
        bundles of soft {s,s} clauses and soft (s,t) arcs is only valid once the
        per-path deletable arcs have been guessed, hence ``proper``.
        """
        s, t = self.s, self.t
        while True:
            crisp = self.crisp_pairs()
            on_flow = {a for p in self.paths for a in p}
            for aid, (u, v, b) in list(self.arcs.items()):
                if b is not None and aid not in on_flow and (u, v) not in crisp:
                    self.add_crisp(u, v)
                    crisp.add((u, v))
            hit = None
            for aid in sorted(self.arcs):
                u, v, b = self.arcs[aid]
                if b is not None:
                    continue
                if u == s and v == t:
                    return _NO
                if u == s and v != s:
                    hit = (v, s)
                    break
                if v == t and u != t:
                    hit = (u, t)
                    break
            if hit is not None:
                self.identify(*hit)
                continue
            forward = self._reach([s], True, t)
            targets = {t} | {x for u, v, _ in self.clauses.values() for x in (u, v)}
            backward = self._reach(targets, False, s)
            dead = [v for v in self.vertices if v not in (s, t) and (v not in forward or v not in backward)]
            if dead:
                self.remove_vertices(dead)
                continue
            changed = False
            for aid, (u, v, _) in list(self.arcs.items()):
                if u == t or v == s or u == v:
                    if aid in on_flow:
                        raise AssertionError("flow arc removed during cleanup")
                    del self.arcs[aid]
                    changed = True
            for cid, (u, v, _) in list(self.clauses.items()):
                if t in (u, v):
                    del self.clauses[cid]
                    changed = True
            if changed:
                continue
            if self.k < 0 or (self.W is not None and self.W < 0):
                return _NO
            if any(b is None and u == s and v == s for u, v, b in self.clauses.values()):
                return _NO
            if self.flow_value() != len(self.paths):
                return _NO
            if not self.paths:
                return self._empty_flow_answer()
            if proper:
                doomed = sorted(
                    {b for u, v, b in self.clauses.values() if b is not None and u == s and v == s}
                    | {b for u, v, b in self.arcs.values() if b is not None and u == s and v == t}
                )
                if doomed:
                    self.delete_bundle(doomed[0])
                    continue
            return None


def _guesses(st: _State) -> Iterator[_State]:
    """Per bundle and flow path, keep one deletable arc or none; the rest get crisp copies.

    Combinations leaving a path without any deletable arc are skipped, since such a path
    could not carry a cut edge.
    """
    crisp = st.crisp_pairs()
    per_path = []
    for path in st.paths:
        groups: Dict[int, List[int]] = {}
        for a in path:
            if st.deletable(a, crisp):
                groups.setdefault(st.arcs[a][2], []).append(a)
        options = []
        keys = sorted(groups)
        for combo in itertools.product(*[[None] + groups[b] for b in keys]):
            if all(c is None for c in combo):
                continue
            drop = [a for b, c in zip(keys, combo) for a in groups[b] if a != c]
            options.append(drop)
        per_path.append(options)
    for choice in itertools.product(*per_path):
        child = st.copy()
        child.guessed = True
        for drop in choice:
            for a in drop:
                u, v, _ = child.arcs[a]
                child.add_crisp(u, v)
        yield child


# ---------------------------------------------------------------- clause elimination: structure


Pair = Tuple[int, int]
Edge = Tuple[str, int, int]  # ("E", tail path, head path) labelled 0 or ("C", i, j) labelled 1


class _Structure:
    """Projected clause pairs, arc pairs and the labelled path graph H of a cleaned state."""

    def __init__(self, st: _State) -> None:
        self.st = st
        s, t = st.s, st.t
        self.lam = len(st.paths)
        self.view = _FlowView(s, t, [(u, v) for u, v, _ in st.arcs.values()], [st.path_vertices(i) for i in range(self.lam)])
        view = self.view
        self.c_pairs: Dict[Tuple[int, int], Dict[Pair, List[int]]] = {}
        self.loops: Dict[int, Dict[Pair, List[int]]] = {}
        for cid in sorted(st.clauses):
            u, v, _ = st.clauses[cid]
            for i in range(self.lam):
                pu, pv = view.proj(i, u), view.proj(i, v)
                if t not in (pu, pv):
                    key = tuple(sorted((pu, pv), key=lambda x: view.rank(i, x)))
                    self.loops.setdefault(i, {}).setdefault(key, []).append(cid)
                for j in range(self.lam):
                    if j == i:
                        continue
                    for a, b in ((u, v), (v, u)):
                        x, y = view.proj(i, a), view.proj(j, b)
                        if x in (s, t) or y in (s, t):
                            continue
                        bucket = self.c_pairs.setdefault((i, j), {}).setdefault((x, y), [])
                        if cid not in bucket:
                            bucket.append(cid)
        self.e_pairs: Dict[Tuple[int, int], Set[Pair]] = {}
        interiors = [set(p[1:-1]) for p in view.paths]
        for i in range(self.lam):
            for x in view.paths[i][1:-1]:
                for j in range(self.lam):
                    if j != i and x in interiors[j]:
                        self.e_pairs.setdefault((i, j), set()).add((x, x))
                for a in view.attach(x):
                    for y in view.out.get(a, ()):
                        for j in range(self.lam):
                            if j == i or y not in interiors[j]:
                                continue
                            if y in view.pos[i] and y != x:
                                continue
                            if x in view.pos[j] and x != y:
                                continue
                            self.e_pairs.setdefault((i, j), set()).add((x, y))
        self.edges: List[Tuple[int, int, int, Edge]] = []
        for (i, j) in sorted(self.e_pairs):
            self.edges.append((i, j, 0, ("E", i, j)))
        for (i, j) in sorted(self.c_pairs):
            if i < j:
                self.edges.append((i, j, 1, ("C", i, j)))

    def measure(self) -> Tuple[int, int, int]:
        return (self.st.k, len(self.edges), len(self.loops))

    # -- minimal pair sets

    def c_minimal(self, i: int, j: int) -> List[Pair]:
        """Pairwise non-dominated clause projections, sorted along P_i."""
        r = self.view.rank
        pairs = list(self.c_pairs.get((i, j), {}))
        out = [
            p for p in pairs
            if not any(q != p and r(i, q[0]) <= r(i, p[0]) and r(j, q[1]) <= r(j, p[1]) for q in pairs)
        ]
        return sorted(out, key=lambda p: r(i, p[0]))

    def e_minimal(self, i: int, j: int) -> List[Pair]:
        r = self.view.rank
        pairs = list(self.e_pairs.get((i, j), ()))
        out = [
            p for p in pairs
            if not any(q != p and r(i, q[0]) <= r(i, p[0]) and r(j, q[1]) >= r(j, p[1]) for q in pairs)
        ]
        return sorted(out, key=lambda p: r(i, p[0]))

    def oriented(self, edge: Edge, frm: int, to: int) -> List[Pair]:
        """Minimal pairs of an H edge written as (vertex on P_frm, vertex on P_to)."""
        kind, a, b = edge
        if kind == "C":
            return self.c_minimal(frm, to)
        if (a, b) == (frm, to):
            return self.e_minimal(a, b)
        return sorted(((y, x) for x, y in self.e_minimal(a, b)), key=lambda p: self.view.rank(frm, p[0]))

    # -- cycles

    def labelling(self) -> Dict[int, int]:
        label: Dict[int, int] = {}
        adj: Dict[int, List[Tuple[int, int]]] = {}
        for i, j, lab, _ in self.edges:
            adj.setdefault(i, []).append((j, lab))
            adj.setdefault(j, []).append((i, lab))
        for root in range(self.lam):
            if root in label:
                continue
            label[root] = 0
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for v, lab in adj.get(u, ()):
                    if v not in label:
                        label[v] = label[u] ^ lab
                        queue.append(v)
        return label

    def nonzero_cycle(self) -> Optional[Tuple[List[int], List[Tuple[int, Edge]]]]:
        """A cycle of length at least two with odd label sum, rotated to end in a label-1 edge.

        Returns (vertices j_1..j_d, edges) where edge k joins j_k and j_{k+1} cyclically.
        """
        adj: Dict[int, List[Tuple[int, int, int]]] = {}
        for eid, (i, j, lab, _) in enumerate(self.edges):
            adj.setdefault(i, []).append((j, lab, eid))
            adj.setdefault(j, []).append((i, lab, eid))
        label: Dict[int, int] = {}
        parent: Dict[int, Optional[Tuple[int, int]]] = {}
        for root in range(self.lam):
            if root in label:
                continue
            label[root] = 0
            parent[root] = None
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for v, lab, eid in adj.get(u, ()):
                    if v not in label:
                        label[v] = label[u] ^ lab
                        parent[v] = (u, eid)
                        queue.append(v)
                    elif label[v] != label[u] ^ lab:
                        return self._rotate(*self._close(u, v, eid, parent))
        return None

    def _close(self, u: int, v: int, eid: int, parent):
        def up(x):
            chain = [x]
            ids = []
            while parent[x] is not None:
                x, e = parent[x][0], parent[x][1]
                ids.append(e)
                chain.append(x)
            return chain, ids

        cu, eu = up(u)
        cv, ev = up(v)
        common = next(x for x in cu if x in set(cv))
        iu, iv = cu.index(common), cv.index(common)
        verts = cu[: iu + 1] + list(reversed(cv[:iv]))
        eids = eu[:iu] + list(reversed(ev[:iv])) + [eid]
        return verts, eids

    def _rotate(self, verts: List[int], eids: List[int]):
        d = len(verts)
        r = next(k for k in range(d) if self.edges[eids[k]][2] == 1)
        shift = (r + 1) % d
        verts = verts[shift:] + verts[:shift]
        eids = eids[shift:] + eids[:shift]
        return verts, [(self.edges[e][2], self.edges[e][3]) for e in eids]


Op = Tuple[str, int, int]


def _up(i: int, v: int) -> Op:
    return ("up", i, v)


def _from(i: int, v: int) -> Op:
    return ("from", i, v)


def _connections(sx: _Structure, verts: List[int], edges) -> List[List[Pair]]:
    """One connection per minimal pair of the first cycle edge, sorted along P_{j_1}."""
    d = len(verts)
    rank = sx.view.rank
    out = []
    for first in sx.oriented(edges[0][1], verts[0], verts[1 % d]):
        conn = [first]
        for k in range(1, d - 1):
            jk, jn = verts[k], verts[k + 1]
            y = conn[-1][1]
            options = sx.oriented(edges[k][1], jk, jn)
            after = [p for p in options if rank(jk, p[0]) >= rank(jk, y)]
            conn.append(after[0] if after else options[-1])
        out.append(conn)
    out.sort(key=lambda c: rank(verts[0], c[0][0]))
    return out


def _connection_cases(sx: _Structure, verts: List[int], edges, conn: List[Pair]) -> List[List[Op]]:
    """Branches for every way the connection can fail to be canonical."""
    rank = sx.view.rank
    out: List[List[Op]] = []
    for k, (x, y) in enumerate(conn):
        jk, jn = verts[k], verts[k + 1]
        label, edge = edges[k]
        if label == 1:
            out.append([_up(jk, x), _up(jn, y)])
            out.append([_from(jk, x), _from(jn, y)])
        elif edge[1] == jk:
            out.append([_from(jk, x), _up(jn, y)])
        else:
            out.append([_from(jn, y), _up(jk, x)])
    for k in range(1, len(conn)):
        jk, jn = verts[k], verts[k + 1]
        y_in = conn[k - 1][1]
        x_out, y_next = conn[k]
        if x_out == y_in:
            continue
        label = edges[k][0]
        forward = rank(jk, x_out) < rank(jk, y_in)
        if label == 1 and forward:
            out.append([_up(jk, x_out), _from(jk, y_in), _from(jn, y_next)])
        elif label == 1:
            base = [_up(jk, y_in), _from(jk, x_out), _up(jn, y_next)]
            earlier = [p for p in sx.c_minimal(jk, jn) if rank(jk, p[0]) < rank(jk, x_out)]
            if earlier:
                yp = earlier[-1][1]
                out.append(base + [_up(jn, yp)])
                out.append(base + [_from(jn, yp)])
            else:
                out.append(base)
        elif forward:
            out.append([_up(jk, x_out), _from(jk, y_in), _up(jn, y_next)])
        else:
            out.append([_up(jk, y_in), _from(jk, x_out), _from(jn, y_next)])
    return out


def _cycle_branches(sx: _Structure, verts: List[int], edges) -> List[List[Op]]:
    rank = sx.view.rank
    d = len(verts)
    j1, j2, jd = verts[0], verts[1], verts[d - 1]
    conns = _connections(sx, verts, edges)
    closing = sx.c_minimal(j1, jd)

    def v1(c):
        return c[0][0]

    def vd(c):
        return c[-1][1]

    def witness(c):
        for u, v in closing:
            if rank(j1, u) <= rank(j1, v1(c)) and rank(jd, v) <= rank(jd, vd(c)):
                return (u, v)
        return None

    pos = next((n for n, c in enumerate(conns) if witness(c) is not None), None)
    f_next = conns[pos] if pos is not None else None
    f_prev = conns[pos - 1] if pos is not None and pos > 0 else (conns[-1] if pos is None else None)

    branches: List[List[Op]] = []
    for c in (f_prev, f_next):
        if c is not None:
            branches.extend(_connection_cases(sx, verts, edges, c))
    first_label = edges[0][0]
    if f_next is not None:
        u, v = witness(f_next)
        branches.append([_up(j1, u), _up(jd, v)])
    case_a: List[Op] = []
    if f_prev is not None:
        case_a.append(_up(j1, v1(f_prev)))
        y2 = f_prev[0][1]
        case_a.append(_up(j2, y2) if first_label == 0 else _from(j2, y2))
    if f_next is not None:
        case_a.append(_from(j1, v1(f_next)))
        y2 = f_next[0][1]
        case_a.append(_from(j2, y2) if first_label == 0 else _up(j2, y2))
    branches.append(case_a)
    if f_prev is not None:
        later = [
            (u, v) for u, v in closing
            if rank(j1, u) >= rank(j1, v1(f_prev)) and rank(jd, v) >= rank(jd, vd(f_prev))
        ]
        if later:
            u, v = later[0]
            branches.append([_from(j1, u), _from(jd, v)])
        else:
            lr = [(u, v) for u, v in closing if rank(j1, u) < rank(j1, v1(f_prev)) and rank(jd, v) > rank(jd, vd(f_prev))]
            rl = [(u, v) for u, v in closing if rank(j1, u) > rank(j1, v1(f_prev)) and rank(jd, v) < rank(jd, vd(f_prev))]
            if lr and rl:
                u1, v1_ = max(lr, key=lambda p: rank(j1, p[0]))
                u2, v2 = min(rl, key=lambda p: rank(j1, p[0]))
                branches.append([_from(j1, u2), _from(jd, v1_)])
            elif lr:
                branches.append([_from(j1, v1(f_prev))])
            elif rl:
                branches.append([_from(jd, vd(f_prev))])
    return branches


def _loop_branches(sx: _Structure) -> List[List[Op]]:
    rank = sx.view.rank
    later = {}
    for i, pairs in sorted(sx.loops.items()):
        x, y = min(pairs, key=lambda p: rank(i, p[1]))
        later[i] = y
    out = [[_up(i, y)] for i, y in later.items()]
    out.append([_from(i, y) for i, y in later.items() if y != sx.st.s])
    return out


# ---------------------------------------------------------------- clause elimination: split and driver


def bipartite_split_and_reverse(st: _State, sx: Optional[_Structure] = None) -> CutInstance:
    """Translate a cleaned state whose path graph has a consistent labelling into a clause-free instance.

    Vertices hanging off label-1 paths form the part that is reversed with s and t
    swapped; each clause joining the two parts becomes an arc from its label-0 end to
    its label-1 end.
    """
    sx = sx or _Structure(st)
    s, t = st.s, st.t
    label = sx.labelling()
    side: Dict[int, int] = {}
    for i, verts in enumerate(sx.view.paths):
        for x in verts[1:-1]:
            for v in sx.view.attach(x):
                if v in (s, t):
                    continue
                if side.setdefault(v, label[i]) != label[i]:
                    raise AssertionError(f"vertex {v} classifies into both parts")
    for v in st.vertices:
        if v not in (s, t) and v not in side:
            raise AssertionError(f"vertex {v} classifies into neither part")
    names = {s: 0, t: 1}
    for v in sorted(side):
        names[v] = len(names)
    flip = {s: t, t: s}
    path_of = {a: i for i, p in enumerate(st.paths) for a in p}

    def placed(x: int, part: int) -> int:
        return names[flip[x]] if part and x in flip else names[x]

    arcs: List[Arc] = []
    for aid in sorted(st.arcs):
        u, v, b = st.arcs[aid]
        parts = {side[x] for x in (u, v) if x not in (s, t)}
        if len(parts) > 1:
            raise AssertionError(f"arc ({u},{v}) joins the two parts")
        if parts:
            part = parts.pop()
        elif aid in path_of:
            part = label[path_of[aid]]
        else:
            raise AssertionError(f"terminal arc ({u},{v}) outside the flow")
        tail, head = (u, v) if not part else (v, u)
        arcs.append(Arc(placed(tail, part), placed(head, part), b is not None, b))
    for cid in sorted(st.clauses):
        u, v, b = st.clauses[cid]
        if u in (s, t) or v in (s, t) or side[u] == side[v]:
            raise AssertionError(f"clause {{{u},{v}}} does not cross the two parts")
        if side[u]:
            u, v = v, u
        arcs.append(Arc(names[u], names[v], b is not None, b))
    live = sorted({a.bundle for a in arcs if a.bundle is not None})
    weights = tuple((b, st.weight(b)) for b in live)
    seen = set()
    unique = []
    for a in arcs:
        key = (a.tail, a.head, a.bundle)
        if a.bundle is not None and key in seen:
            continue
        seen.add(key)
        unique.append(a)
    return CutInstance(len(names), 0, 1, tuple(unique), (), weights, st.k, st.W)


def _depth_bound(k: int, lam: int) -> int:
    return 3 * max(k, 1) * max(lam, 1) ** 2


def eliminate_clauses(inst: CutInstance, flow: StFlow, budget: Optional[SearchBudget] = None) -> Iterator[EliminationResult]:
    """Branch until every leaf is clause-free or decided.

    Assumes the branch of interest has a solution that is an st-mincut for which
    ``flow`` is a maximum flow. Leaves only ever come from sound reductions, so any
    solution of a leaf lifts to a solution of ``inst``.
    """
    budget = budget if budget is not None else SearchBudget()
    lam = len(flow)
    b = max(inst.arity(), 2)
    if lam > max(inst.k, 0) * b * b:
        return
    st = _State.of(inst, flow)
    status = st.cleanup(proper=False)
    if status is _NO:
        return
    if status is not None:
        yield EliminationResult(None, status, frozenset(st.deleted))
        return
    bound = _depth_bound(inst.k, lam)
    budget.counters["gdpc_depth_bound"] = max(budget.counters.get("gdpc_depth_bound", 0), bound)
    for guessed in _guesses(st):
        status = guessed.cleanup(proper=True)
        if status is _NO:
            continue
        if status is not None:
            yield EliminationResult(None, status, frozenset(guessed.deleted))
            continue
        yield from _eliminate(guessed, budget, 0, bound)


def _eliminate(st: _State, budget: SearchBudget, depth: int, bound: int) -> Iterator[EliminationResult]:
    budget.enter(depth)
    budget.counters["gdpc_depth"] = max(budget.counters.get("gdpc_depth", 0), depth)
    if depth > bound:
        budget.bump("gdpc_depth_exceeded")
    sx = _Structure(st)
    cycle = sx.nonzero_cycle()
    if cycle is not None:
        branches = _cycle_branches(sx, *cycle)
        budget.log(depth, f"cycle {cycle[0]} with {len(branches)} branches")
    elif sx.loops:
        branches = _loop_branches(sx)
        budget.log(depth, f"loops on {sorted(sx.loops)}")
    else:
        budget.log(depth, f"split with {len(st.paths)} paths")
        yield EliminationResult(bipartite_split_and_reverse(st, sx), frozenset(), frozenset(st.deleted))
        return
    before = sx.measure()
    stamp = st.fingerprint()
    for ops in branches:
        child = st.copy()
        child.apply(ops)
        if child.fingerprint() == stamp:
            budget.bump("gdpc_idle_branch")
            continue
        status = child.cleanup(proper=True)
        if status is _NO:
            continue
        if status is not None:
            yield EliminationResult(None, status, frozenset(child.deleted))
            continue
        if _Structure(child).measure() >= before:
            budget.bump("gdpc_no_progress")
        yield from _eliminate(child, budget, depth + 1, bound)


# ---------------------------------------------------------------- solving


def _finish(inst: CutInstance, leaf: EliminationResult, budget: SearchBudget) -> Optional[GdpcSolution]:
    if leaf.instance is None:
        chosen = leaf.bundles
    else:
        out = solve_bundled_cut(leaf.instance)
        if not out.yes:
            return None
        chosen = out.bundles | leaf.deleted
    sol = verify_bundles(inst, chosen)
    if sol is None:
        budget.bump("gdpc_rejected_leaf")
    return sol


def solve_gdpc(inst: CutInstance, budget: Optional[SearchBudget] = None) -> Outcome:
    """Decide a GDPC instance; a YES carries a cut verified against ``inst`` itself."""
    budget = budget if budget is not None else SearchBudget()
    try:
        for lifted, flow, _ in lift_to_mincut(inst, budget):
            for leaf in eliminate_clauses(lifted, flow, budget):
                sol = _finish(inst, leaf, budget)
                if sol is not None:
                    return Outcome(Status.YES, cut=sol.cut, bundles=sol.bundles)
    except ResourceLimit as exc:
        return Outcome(Status.RESOURCE, message=str(exc))
    return Outcome(Status.NO)


def solve_minsat_delta(formula: Formula, budget: Optional[SearchBudget] = None) -> Outcome:
    """(Weighted) MinSAT over bijunctive constraints through the GDPC pipeline.

    Finds a smallest deletion set, then branches over every assignment of its
    variables. A YES carries an assignment re-checked with ``assignment_cost``.
    """
    budget = budget if budget is not None else SearchBudget()
    deletion = find_deletion_set(formula)
    if deletion is None:
        return Outcome(Status.NO)
    pinned = sorted({v for i in deletion for v in formula.constraints[i].scope})
    alpha = satisfying_assignment(formula, deletion)
    try:
        for bits in itertools.product((0, 1), repeat=len(pinned)):
            red = reduce_minsat_to_gdpc(formula, deletion, dict(zip(pinned, bits)), alpha)
            if red is None:
                continue
            budget.log(0, f"beta={''.join(map(str, bits))}")
            out = solve_gdpc(red.instance, budget)
            if out.status is Status.RESOURCE:
                return out
            if out.yes:
                values = red.assignment_from_bundles(out.bundles)
                if within_budget(formula, assignment_cost(formula, values)):
                    return Outcome(Status.YES, values=values)
                budget.bump("gdpc_rejected_assignment")
    except ResourceLimit as exc:
        return Outcome(Status.RESOURCE, message=str(exc))
    return Outcome(Status.NO)
