"""Clause Cut: reduction from MinSAT over implications and negative clauses, and a solver.

Each constraint becomes one bundle holding the arcs and clauses of its canonical
definition, with s standing for 1 and t for 0. The solver runs every random choice of
the underlying algorithm as deterministic branching: flow augmentation, the
bundle-sharing pattern of the per-path cut arcs, the pairwise relations, the red arcs,
candidate filtering, the mincut closest to s and branching on a violated clause.
Answers are re-checked on the input instance, so every YES is sound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from .core import (
    Formula,
    Outcome,
    RelationError,
    ResourceLimit,
    SearchBudget,
    Status,
    UndirectedGraph,
    assignment_cost,
    canonical_definition,
    is_2k2_free,
    within_budget,
)
from .flowaug import (
    INF,
    Arc,
    CutDigraph,
    CutError,
    CutInstance,
    StFlow,
    augment_oracle_core,
    closest_mincut,
    evaluate_cut,
    max_flow,
    reachable,
)
from .gdpc import GdpcSolution, verify_bundles

S_VERTEX = 0
T_VERTEX = 1


# ---------------------------------------------------------------- instances


@dataclass(frozen=True)
class ClauseCutInstance(CutInstance):
    """A cut instance with clauses of any size and no weight budget."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.W is not None or self.weights:
            raise CutError("clause cut instances are unweighted")

    @staticmethod
    def of(inst: CutInstance) -> "ClauseCutInstance":
        return ClauseCutInstance(inst.n, inst.s, inst.t, inst.arcs, inst.clauses, (), inst.k, None)

    def bundle_arc_graph(self, bundle: int) -> UndirectedGraph:
        """Non-loop arcs of a bundle that avoid s and t, as undirected edges."""
        edges = []
        for i in self.bundle_arcs(bundle):
            a = self.arcs[i]
            if a.tail != a.head and {a.tail, a.head}.isdisjoint({self.s, self.t}):
                edges.append((a.tail, a.head))
        return UndirectedGraph.build(self.n, edges)

    def is_2k2_free(self) -> bool:
        return all(is_2k2_free(self.bundle_arc_graph(b)) for b in self.bundle_ids())


def _replace(inst: CutInstance, arcs=None, clauses=None, k=None) -> ClauseCutInstance:
    return ClauseCutInstance(
        inst.n, inst.s, inst.t,
        inst.arcs if arcs is None else tuple(arcs),
        inst.clauses if clauses is None else tuple(clauses),
        (), inst.k if k is None else k, None,
    )


def add_crisp_arcs(inst: CutInstance, pairs: Iterable[Tuple[int, int]]) -> ClauseCutInstance:
    return _replace(inst, arcs=inst.arcs + tuple(Arc(u, v, False) for u, v in pairs))


def break_bundles(inst: CutInstance, bundles: Iterable[int]) -> ClauseCutInstance:
    """Make every arc and clause of the bundles crisp; arc ids are preserved."""
    gone = set(bundles)
    arcs = [Arc(a.tail, a.head, False) if a.bundle in gone else a for a in inst.arcs]
    clauses = [(m, None) if b in gone else (m, b) for m, b in inst.clauses]
    return _replace(inst, arcs=arcs, clauses=clauses)


def delete_bundle(inst: CutInstance, bundle: int) -> ClauseCutInstance:
    """Drop the arcs and clauses of a bundle and spend one unit of budget."""
    arcs = [a for a in inst.arcs if a.bundle != bundle]
    clauses = [(m, b) for m, b in inst.clauses if b != bundle]
    return _replace(inst, arcs=arcs, clauses=clauses, k=inst.k - 1)


# ---------------------------------------------------------------- reduction


def variable_vertex(x: int) -> int:
    return x + 2


@dataclass(frozen=True)
class ClauseCutReduction:
    instance: ClauseCutInstance
    never_satisfied: Tuple[int, ...]
    num_vars: int

    def assignment(self, side: Iterable[int]) -> Tuple[int, ...]:
        side = set(side)
        return tuple(int(variable_vertex(x) in side) for x in range(self.num_vars))

    def assignment_from_bundles(self, bundles: Iterable[int]) -> Tuple[int, ...]:
        chosen = set(bundles)
        removed = [i for i, a in enumerate(self.instance.arcs) if a.bundle in chosen]
        return self.assignment(reachable(self.instance.graph, removed))


def _scope_satisfiable(formula: Formula, index: int) -> bool:
    c = formula.constraints[index]
    distinct = sorted(set(c.scope))
    for bits in itertools.product((0, 1), repeat=len(distinct)):
        values = dict(zip(distinct, bits))
        if c.relation.contains_values([values[v] for v in c.scope]):
            return True
    return False


def reduce_minsat_to_clausecut(formula: Formula, k: Optional[int] = None) -> Optional[ClauseCutReduction]:
    """The clause cut instance of an unweighted formula whose relations are all Sigma-definable.

    Constraints without a satisfying assignment are dropped and charged to the budget;
    returns None when that exhausts the budget or hits a crisp constraint. Raises
    ``RelationError`` for a relation outside Sigma.
    """
    k = formula.budget_k if k is None else k
    s, t = S_VERTEX, T_VERTEX
    arcs: List[Arc] = []
    clauses: List[Tuple[Tuple[int, ...], Optional[int]]] = []
    dropped = []
    for ci, c in enumerate(formula.constraints):
        if c.relation.is_empty or not _scope_satisfiable(formula, ci):
            if c.crisp:
                return None
            dropped.append(ci)
            k -= 1
            continue
        canon = canonical_definition(c.relation)
        bundle = None if c.crisp else ci
        soft = bundle is not None
        vx = [variable_vertex(x) for x in c.scope]
        pairs: List[Tuple[int, int]] = [(s, vx[i]) for i in sorted(canon.ones)]
        pairs += [(vx[i], t) for i in sorted(canon.zeroes)]
        pairs += [(vx[i], vx[j]) for i, j in canon.implications]
        seen: Set[Tuple[int, int]] = set()
        for u, v in pairs:
            if u == v or (u, v) in seen:
                continue
            seen.add((u, v))
            arcs.append(Arc(u, v, soft, bundle))
        members_seen: Set[Tuple[int, ...]] = set()
        for neg in canon.negative_clauses:
            members = tuple(sorted({vx[i] for i in neg}))
            if members not in members_seen:
                members_seen.add(members)
                clauses.append((members, bundle))
    if k < 0:
        return None
    inst = ClauseCutInstance(formula.num_vars + 2, s, t, tuple(arcs), tuple(clauses), (), k, None)
    return ClauseCutReduction(inst, tuple(dropped), formula.num_vars)


# ---------------------------------------------------------------- mincut helpers


def deletable_arcs(g: CutDigraph) -> FrozenSet[int]:
    """Soft arcs without a crisp arc parallel to them."""
    crisp = {(a.tail, a.head) for a in g.arcs if not a.soft}
    return frozenset(i for i, a in enumerate(g.arcs) if a.soft and (a.tail, a.head) not in crisp)


def closest_deletable_mincut(g: CutDigraph, deletable: Iterable[int]) -> FrozenSet[int]:
    """The st-mincut closest to s when only ``deletable`` arcs may be cut."""
    keep = set(deletable)
    arcs = tuple(a if i in keep else Arc(a.tail, a.head, False) for i, a in enumerate(g.arcs))
    _, cut = closest_mincut(CutDigraph(g.n, g.s, g.t, arcs))
    return cut


def _residual_closure(g: CutDigraph, flow: StFlow, start: Iterable[int]) -> Set[int]:
    use: Dict[int, int] = {}
    for p in flow.paths:
        for a in p:
            use[a] = use.get(a, 0) + 1
    adj: Dict[int, List[int]] = {}
    for i, a in enumerate(g.arcs):
        if not a.soft or use.get(i, 0) < 1:
            adj.setdefault(a.tail, []).append(a.head)
        if use.get(i, 0) > 0:
            adj.setdefault(a.head, []).append(a.tail)
    seen = set(start)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def extends_to_mincut(g: CutDigraph, flow: StFlow, arcs: Iterable[int]) -> bool:
    """Whether some st-mincut of deletable arcs contains all given arcs of a maximum flow."""
    arcs = list(arcs)
    closure = _residual_closure(g, flow, [g.s] + [g.arcs[a].tail for a in arcs])
    if g.t in closure:
        return False
    return all(g.arcs[a].head not in closure for a in arcs)


def _flow_bound(inst: CutInstance) -> int:
    """No cut of cost at most k has more arcs: the k largest bundles' arc counts, at most k*b^2."""
    counts = sorted((len(inst.bundle_arcs(b)) for b in inst.bundle_ids()), reverse=True)
    b = max(inst.arity(), 1)
    return min(sum(counts[: max(inst.k, 0)]), max(inst.k, 0) * b * b)


def _star_sides(g: CutDigraph) -> Iterator[FrozenSet[int]]:
    """Source sides of star cuts, restricted to vertices not forced by crisp reachability."""
    crisp_only = CutDigraph(g.n, g.s, g.t, tuple(a for a in g.arcs if not a.soft))
    forced_in = reachable(crisp_only)
    forced_out = reachable(crisp_only, source=g.t, reverse=True)
    if forced_in & forced_out:
        return
    free = [v for v in range(g.n) if v not in forced_in and v not in forced_out]
    for r in range(len(free) + 1):
        for chosen in itertools.combinations(free, r):
            side = frozenset(forced_in | set(chosen))
            z = [i for i, a in enumerate(g.arcs) if a.tail in side and a.head not in side]
            if any(not g.arcs[i].soft for i in z):
                continue
            if reachable(g, z) == side:
                yield side


# ---------------------------------------------------------------- relations between cut arcs


def arc_relations(inst: CutInstance, e: int, f: int, bundle: Optional[int] = None) -> Tuple[str, ...]:
    """Every applicable option for how two cut arcs of one bundle relate, in a fixed order.

    Options: an endpoint at s or t (four variants), a shared tail, a shared head, or a
    further arc of the bundle joining the two arcs in either direction.
    """
    a, b = inst.arcs[e], inst.arcs[f]
    out = []
    if a.tail == inst.s:
        out.append("first_at_s")
    if a.head == inst.t:
        out.append("first_at_t")
    if b.tail == inst.s:
        out.append("second_at_s")
    if b.head == inst.t:
        out.append("second_at_t")
    if a.tail == b.tail:
        out.append("tail")
    if a.head == b.head:
        out.append("head")
    bundle = a.bundle if bundle is None else bundle
    ends_a, ends_b = {a.tail, a.head}, {b.tail, b.head}
    forward = backward = False
    for i, c in enumerate(inst.arcs):
        if i in (e, f) or c.bundle != bundle or bundle is None:
            continue
        if c.tail in ends_a and c.head in ends_b:
            forward = True
        if c.tail in ends_b and c.head in ends_a:
            backward = True
    if forward:
        out.append("arc_forward")
    if backward:
        out.append("arc_backward")
    return tuple(out)


# ---------------------------------------------------------------- instrumentation


@dataclass
class ClauseCutTrace:
    """Progress bookkeeping of one solver run.

    ``steps`` holds (parent measure, child measure) for every recursive call, a measure
    being (k, lambda) on entry.
    """

    steps: List[Tuple[Tuple[int, int], Tuple[int, int]]] = field(default_factory=list)
    max_depth: int = 0
    order_checks: int = 0
    order_violations: int = 0
    closest_checks: int = 0
    closest_mismatches: int = 0
    fixpoint_checks: int = 0
    fixpoint_mismatches: int = 0

    def measures_decrease(self) -> bool:
        return all(c[0] < p[0] or (c[0] == p[0] and c[1] > p[1]) for p, c in self.steps)


# ---------------------------------------------------------------- solver


@dataclass(frozen=True)
class _Guess:
    """Bundle-sharing pattern and chosen cut arc per flow path."""

    blocks: Tuple[Tuple[int, ...], ...]
    bundles: Tuple[int, ...]
    arcs: Tuple[int, ...]  # arcs[i] is the guessed cut arc on path i

    def slot_of(self, path: int) -> int:
        for a, block in enumerate(self.blocks):
            if path in block:
                return a
        raise KeyError(path)


def _path_arcs(inst: CutInstance, flow: StFlow, deletable: FrozenSet[int]) -> List[Dict[int, List[int]]]:
    """Per path, the deletable arcs grouped by bundle."""
    out = []
    for p in flow.paths:
        groups: Dict[int, List[int]] = {}
        for a in p:
            if a in deletable:
                groups.setdefault(inst.arcs[a].bundle, []).append(a)
        out.append(groups)
    return out


def _guesses(inst: CutInstance, flow: StFlow, deletable: FrozenSet[int]) -> Iterator[_Guess]:
    """Label every path with a bundle (at most k labels), then pick that bundle's arc per path."""
    groups = _path_arcs(inst, flow, deletable)
    lam = len(flow.paths)
    for labels in itertools.product(*[sorted(g) for g in groups]):
        distinct = list(dict.fromkeys(labels))
        if len(distinct) > inst.k:
            continue
        blocks = tuple(tuple(i for i in range(lam) if labels[i] == b) for b in distinct)
        for arcs in itertools.product(*[groups[i][labels[i]] for i in range(lam)]):
            yield _Guess(blocks, tuple(distinct), tuple(arcs))


def _relation_guesses(inst: CutInstance, guess: _Guess) -> Iterator[Dict[Tuple[int, int], str]]:
    pairs = [(i, j) for block in guess.blocks for i, j in itertools.combinations(block, 2)]
    options = [arc_relations(inst, guess.arcs[i], guess.arcs[j]) for i, j in pairs]
    if any(not o for o in options):
        return
    for combo in itertools.product(*options):
        yield dict(zip(pairs, combo))


class _Solver:
    def __init__(self, root: ClauseCutInstance, budget: SearchBudget, trace: ClauseCutTrace) -> None:
        self.root = root
        self.budget = budget
        self.trace = trace

    # -- recursion

    def search(self, inst: ClauseCutInstance, deleted: FrozenSet[int], depth: int, parent: Optional[Tuple[int, int]]) -> Optional[GdpcSolution]:
        self.budget.enter(depth)
        self.trace.max_depth = max(self.trace.max_depth, depth)
        if inst.k < 0:
            return None
        lam, _ = max_flow(inst.graph)
        if lam == INF:
            return None
        measure = (inst.k, int(lam))
        if parent is not None:
            self.trace.steps.append((parent, measure))
        if lam > _flow_bound(inst):
            self.budget.bump("clausecut_flow_too_large")
            return None
        self.budget.log(depth, f"enter k={inst.k} lambda={lam}")
        g = inst.graph
        sides = sorted(_star_sides(g), key=lambda side: (len(side), sorted(side)))
        for side in sides:
            z = [i for i, a in enumerate(g.arcs) if a.tail in side and a.head not in side]
            pairs, flow = augment_oracle_core(g, z)
            if len(flow) > _flow_bound(inst):
                continue
            grown = add_crisp_arcs(inst, pairs)
            found = self.after_augment(grown, flow, deleted, depth, measure)
            if found is not None:
                return found
        return None

    def recurse(self, inst: ClauseCutInstance, deleted: FrozenSet[int], depth: int, measure: Tuple[int, int]) -> Optional[GdpcSolution]:
        return self.search(inst, deleted, depth + 1, measure)

    def after_augment(self, inst, flow, deleted, depth, measure):
        deletable = deletable_arcs(inst.graph)
        if not flow.paths:
            return self.closest_and_branch(inst, flow, None, deleted, depth, measure)
        for guess in _guesses(inst, flow, deletable):
            # a cut arc leaving s or entering t identifies its bundle outright
            for i, a in enumerate(guess.arcs):
                arc = inst.arcs[a]
                path = flow.paths[i]
                if (arc.tail == inst.s and a == path[0]) or (arc.head == inst.t and a == path[-1]):
                    self.budget.log(depth, f"terminal cut arc on path {i}: delete bundle {arc.bundle}")
                    found = self.recurse(delete_bundle(inst, arc.bundle), deleted | {arc.bundle}, depth, measure)
                    if found is not None:
                        return found
                    break
            else:
                for relation in _relation_guesses(inst, guess):
                    found = self.colour_and_filter(inst, flow, guess, relation, deleted, depth, measure)
                    if found is not None:
                        return found
        return None

    # -- red arcs and candidates

    def red_arcs(self, inst: ClauseCutInstance, flow: StFlow, guess: _Guess, deletable: FrozenSet[int]) -> Set[int]:
        """The guessed cut arcs, plus every bundle that cannot be violated except through flow arcs."""
        red = set(guess.arcs)
        chosen = set(guess.bundles)
        on_path = {a: i for i, p in enumerate(flow.paths) for a in p}
        clause_bundles = {b for _, b in inst.clauses if b is not None}
        for b in inst.bundle_ids():
            if b in chosen or b in clause_bundles:
                continue
            own = inst.bundle_arcs(b)
            if not all(a in deletable and a in on_path for a in own):
                continue
            paths = sorted(on_path[a] for a in own)
            if len(set(paths)) != len(paths):
                continue
            if any(tuple(paths) == tuple(sorted(block)) for block in guess.blocks):
                red |= set(own)
        return red

    def candidate(self, inst, flow, guess, relation, red, bundle) -> bool:
        on_path = {a: i for i, p in enumerate(flow.paths) for a in p}
        deletable = deletable_arcs(inst.graph)
        mine = [a for a in inst.bundle_arcs(bundle) if a in red and a in on_path and a in deletable]
        paths = [on_path[a] for a in mine]
        if not mine or len(set(paths)) != len(paths):
            return False
        slot = guess.slot_of(paths[0])
        if sorted(paths) != sorted(guess.blocks[slot]):
            return False
        at = dict(zip(paths, mine))
        for (i, j), rel in relation.items():
            if i in at and j in at and rel not in arc_relations(inst, at[i], at[j]):
                return False
        return extends_to_mincut(inst.graph, flow, mine)

    def _filter(self, inst, flow, guess, relation, red, one_at_a_time: bool) -> ClauseCutInstance:
        while True:
            marked = sorted({inst.arcs[a].bundle for a in red if inst.arcs[a].bundle is not None})
            bad = [b for b in marked if not self.candidate(inst, flow, guess, relation, red, b)]
            if not bad:
                return inst
            inst = break_bundles(inst, bad[:1] if one_at_a_time else bad)
            if max_flow(inst.graph)[0] > len(flow.paths):
                return inst

    def colour_and_filter(self, inst, flow, guess, relation, deleted, depth, measure):
        deletable = deletable_arcs(inst.graph)
        red = self.red_arcs(inst, flow, guess, deletable)
        on_flow = flow.arc_set()
        twins = [(inst.arcs[a].tail, inst.arcs[a].head) for a in sorted(on_flow) if a in deletable and a not in red]
        coloured = add_crisp_arcs(inst, dict.fromkeys(twins))
        if max_flow(coloured.graph)[0] > len(flow.paths):
            return self.recurse(coloured, deleted, depth, measure)
        filtered = self._filter(coloured, flow, guess, relation, red, one_at_a_time=False)
        self.trace.fixpoint_checks += 1
        serial = self._filter(coloured, flow, guess, relation, red, one_at_a_time=True)
        if serial.arcs != filtered.arcs:
            self.trace.fixpoint_mismatches += 1
        if max_flow(filtered.graph)[0] > len(flow.paths):
            return self.recurse(filtered, deleted, depth, measure)
        return self.closest_and_branch(filtered, flow, (guess, relation, red), deleted, depth, measure)

    def check_structure(self, inst, flow, guess, relation, red, x: FrozenSet[int]) -> None:
        """Candidate ordering along paths and the closest mincut formula, counted in the trace."""
        pos = {a: (i, j) for i, p in enumerate(flow.paths) for j, a in enumerate(p)}
        marked = sorted({inst.arcs[a].bundle for a in red if inst.arcs[a].bundle is not None})
        cands = [b for b in marked if self.candidate(inst, flow, guess, relation, red, b)]
        firsts: Dict[int, int] = {}
        for a, block in enumerate(guess.blocks):
            mine = []
            for b in cands:
                arcs = {pos[e][0]: pos[e][1] for e in inst.bundle_arcs(b) if e in red and e in pos}
                if sorted(arcs) == sorted(block):
                    mine.append((b, arcs))
            for (b1, p1), (b2, p2) in itertools.combinations(mine, 2):
                self.trace.order_checks += 1
                signs = {p1[i] < p2[i] for i in block}
                if len(signs) > 1:
                    self.trace.order_violations += 1
            if not mine:
                return
            first = min(mine, key=lambda item: item[1][block[0]])
            for i in block:
                firsts[i] = flow.paths[i][first[1][i]]
        self.trace.closest_checks += 1
        if frozenset(firsts.values()) != x:
            self.trace.closest_mismatches += 1

    def closest_and_branch(self, inst, flow, context, deleted, depth, measure):
        x = closest_deletable_mincut(inst.graph, deletable_arcs(inst.graph))
        if context is not None:
            self.check_structure(inst, flow, *context, x)
        ev = evaluate_cut(inst, x)
        if ev.feasible() and len(ev.violated) <= inst.k:
            sol = verify_bundles(self.root, deleted | ev.violated)
            if sol is not None:
                return sol
            self.budget.bump("clausecut_rejected_leaf")
        violated = [ci for ci, (m, _) in enumerate(inst.clauses) if all(v in ev.side for v in m)]
        if not violated:
            return None
        members, bundle = inst.clauses[violated[0]]
        self.budget.log(depth, f"branch on clause {members}")
        if bundle is not None:
            found = self.recurse(delete_bundle(inst, bundle), deleted | {bundle}, depth, measure)
            if found is not None:
                return found
        for v in sorted(set(members)):
            if v == inst.t:
                continue
            found = self.recurse(add_crisp_arcs(inst, [(v, inst.t)]), deleted, depth, measure)
            if found is not None:
                return found
        return None


def solve_clause_cut(
    inst: CutInstance,
    budget: Optional[SearchBudget] = None,
    trace: Optional[ClauseCutTrace] = None,
) -> Outcome:
    """Decide a clause cut instance; a YES carries a cut verified against ``inst`` itself."""
    budget = budget if budget is not None else SearchBudget()
    trace = trace if trace is not None else ClauseCutTrace()
    root = inst if isinstance(inst, ClauseCutInstance) else ClauseCutInstance.of(inst)
    solver = _Solver(root, budget, trace)
    try:
        sol = solver.search(root, frozenset(), 0, None)
    except ResourceLimit as exc:
        return Outcome(Status.RESOURCE, message=str(exc))
    if sol is None:
        return Outcome(Status.NO)
    return Outcome(Status.YES, cut=sol.cut, bundles=sol.bundles)


def depth_bound(inst: CutInstance) -> int:
    b = max(inst.arity(), 1)
    return max(inst.k, 1) * b * b * max(inst.k, 1)


def solve_minsat_sigma(
    formula: Formula,
    budget: Optional[SearchBudget] = None,
    trace: Optional[ClauseCutTrace] = None,
) -> Outcome:
    """Unweighted MinSAT over Sigma relations through the clause cut pipeline."""
    if formula.weighted:
        raise RelationError("the clause cut pipeline solves unweighted MinSAT only")
    red = reduce_minsat_to_clausecut(formula)
    if red is None:
        return Outcome(Status.NO)
    out = solve_clause_cut(red.instance, budget, trace)
    if not out.yes:
        return out
    values = red.assignment_from_bundles(out.bundles)
    if not within_budget(formula, assignment_cost(formula, values)):
        raise AssertionError("verified clause cut solution pulled back to an over-budget assignment")
    return Outcome(Status.YES, values=values, bundles=out.bundles, cut=out.cut)
