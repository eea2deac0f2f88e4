"""Hard-instance generators: Multicolored Clique to Paired Minimum s,t-Cut, and the
MinSAT / Weighted MinSAT encodings of paired cut built on R*-gadgets.

Formulas produced here use crisp pins ``(s=1)``, ``(t=0)`` and complementary variable
pairs ``x``/``x'`` in place of variable negation. Paired-cut digraphs number the source 0
and the sink 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .core import (
    EQ2,
    IMPL,
    NAND2,
    NAND3,
    NEQ,
    UNARY0,
    UNARY1,
    BooleanRelation,
    Constraint,
    Formula,
    RelationError,
    arrow_graph,
    find_induced_2k2,
    gaifman_graph,
    negate_coordinate,
    project,
)
from .flowaug import Arc, CutDigraph, CutError, reachable

SOURCE, SINK = 0, 1
DEFAULT_PAIR_SUBSETS = 2_000_000

Vertex = Tuple[int, int]  # (part, index within the part)


# ---------------------------------------------------------------- multicolored clique


@dataclass(frozen=True)
class MulticoloredGraph:
    """A graph whose vertices are split into parts; edges only join different parts."""

    part_sizes: Tuple[int, ...]
    edges: FrozenSet[Tuple[Vertex, Vertex]]  # stored with the smaller endpoint first

    def __post_init__(self) -> None:
        if any(n < 1 for n in self.part_sizes):
            raise CutError("every part needs at least one vertex")
        for u, v in self.edges:
            for part, idx in (u, v):
                if not (0 <= part < len(self.part_sizes) and 0 <= idx < self.part_sizes[part]):
                    raise CutError(f"vertex {(part, idx)} lies outside the partition")
            if u[0] == v[0]:
                raise CutError(f"edge {u}-{v} lies inside part {u[0]}")
            if u >= v:
                raise CutError("edges must be stored with the smaller endpoint first")

    @staticmethod
    def build(part_sizes: Sequence[int], edges: Iterable[Tuple[Vertex, Vertex]]) -> "MulticoloredGraph":
        return MulticoloredGraph(
            tuple(part_sizes),
            frozenset((min(tuple(u), tuple(v)), max(tuple(u), tuple(v))) for u, v in edges),
        )

    @property
    def num_parts(self) -> int:
        return len(self.part_sizes)

    def adjacent(self, u: Vertex, v: Vertex) -> bool:
        return (min(u, v), max(u, v)) in self.edges


def find_multicolored_clique(g: MulticoloredGraph) -> Optional[Tuple[int, ...]]:
    """One vertex index per part forming a clique, by exhaustive search."""
    for choice in itertools.product(*(range(n) for n in g.part_sizes)):
        if all(
            g.adjacent((i, choice[i]), (j, choice[j]))
            for i, j in itertools.combinations(range(g.num_parts), 2)
        ):
            return choice
    return None


def _prune(g: MulticoloredGraph) -> List[List[int]]:
    """Vertices that keep a neighbour in every other part, pruned to a fixpoint.

    A vertex without a neighbour in some part is in no multicolored clique.
    """
    alive = [set(range(n)) for n in g.part_sizes]
    changed = True
    while changed:
        changed = False
        for i, part in enumerate(alive):
            for r in sorted(part):
                if any(
                    not any(g.adjacent((i, r), (j, q)) for q in alive[j])
                    for j in range(g.num_parts)
                    if j != i
                ):
                    part.discard(r)
                    changed = True
    return [sorted(p) for p in alive]


# ---------------------------------------------------------------- paired cut


@dataclass(frozen=True)
class PairedCutInstance:
    """Paired Minimum s,t-Cut: can the arcs of at most ``ell`` pairs cut t off from s?

    ``pairing`` is a perfect matching on arc ids and ``paths`` partitions the arcs into
    ``2 * ell`` arc-disjoint s-t paths, each listed as arc ids in path order.
    """

    dag: CutDigraph
    ell: int
    pairing: Tuple[Tuple[int, int], ...]
    paths: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        m = len(self.dag.arcs)
        matched = [a for pair in self.pairing for a in pair]
        if sorted(matched) != list(range(m)) or any(a == b for a, b in self.pairing):
            raise CutError("the pairing is not a perfect matching on the arcs")
        on_paths = [a for path in self.paths for a in path]
        if sorted(on_paths) != list(range(m)):
            raise CutError("the paths do not partition the arcs")
        if len(self.paths) != 2 * self.ell:
            raise CutError(f"expected {2 * self.ell} paths, found {len(self.paths)}")
        for path in self.paths:
            at = self.dag.s
            for a in path:
                if self.dag.arcs[a].tail != at:
                    raise CutError(f"path {path} is not a walk from s")
                at = self.dag.arcs[a].head
            if at != self.dag.t:
                raise CutError(f"path {path} does not end in t")
        if not _acyclic(self.dag):
            raise CutError("the digraph has a cycle")

    def path_vertices(self, i: int) -> Tuple[int, ...]:
        path = self.paths[i]
        return (self.dag.s,) + tuple(self.dag.arcs[a].head for a in path)


def _acyclic(g: CutDigraph) -> bool:
    indegree = [0] * g.n
    out: List[List[int]] = [[] for _ in range(g.n)]
    for a in g.arcs:
        out[a.tail].append(a.head)
        indegree[a.head] += 1
    stack = [v for v in range(g.n) if indegree[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in out[v]:
            indegree[w] -= 1
            if indegree[w] == 0:
                stack.append(w)
    return seen == g.n


def _no_instance(ell: int) -> PairedCutInstance:
    """2*ell two-arc paths whose arcs are paired within the path, so every cut needs 2*ell pairs."""
    arcs: List[Arc] = []
    paths = []
    for p in range(2 * ell):
        mid = 2 + p
        arcs += [Arc(SOURCE, mid), Arc(mid, SINK)]
        paths.append((2 * p, 2 * p + 1))
    dag = CutDigraph(2 + 2 * ell, SOURCE, SINK, tuple(arcs))
    return PairedCutInstance(dag, ell, tuple(paths), tuple(paths))


def gen_paired_cut(g: MulticoloredGraph) -> PairedCutInstance:
    """Encode multicolored clique on ``g`` as a paired cut instance with ell = C(k, 2).

    Every ordered pair of parts (i, j) contributes a path through the arcs a(p, q) for the
    edges pq with p in part i and q in part j, sorted by p and then q. The arcs a(p, q) and
    a(q, p) form a pair. On every path leaving part i, the tail of the first arc with
    p = v(i, r) is the shared vertex u(i, r); u(i, first) is s. Vertices that cannot be in
    any clique are dropped first, and an empty part yields a fixed NO instance.
    """
    k = g.num_parts
    ell = k * (k - 1) // 2
    alive = _prune(g)
    if any(not part for part in alive):
        return _no_instance(ell)
    n = 2
    shared: Dict[Vertex, int] = {}
    for i, part in enumerate(alive):
        for pos, r in enumerate(part):
            if pos == 0:
                shared[(i, r)] = SOURCE
            else:
                shared[(i, r)] = n
                n += 1
    arcs: List[Arc] = []
    arc_of: Dict[Tuple[Vertex, Vertex], int] = {}
    paths = []
    for i, j in itertools.permutations(range(k), 2):
        members = [
            ((i, p), (j, q))
            for p in alive[i]
            for q in alive[j]
            if g.adjacent((i, p), (j, q))
        ]
        path = []
        tail = SOURCE
        for idx, (p, q) in enumerate(members):
            if idx + 1 == len(members):
                head = SINK
            elif members[idx + 1][0] != p:
                head = shared[members[idx + 1][0]]
            else:
                head = n
                n += 1
            arc_of[(p, q)] = len(arcs)
            path.append(len(arcs))
            arcs.append(Arc(tail, head))
            tail = head
        paths.append(tuple(path))
    pairing = tuple(
        (arc_of[(p, q)], arc_of[(q, p)]) for (p, q) in arc_of if p < q
    )
    dag = CutDigraph(n, SOURCE, SINK, tuple(arcs))
    return PairedCutInstance(dag, ell, pairing, tuple(paths))


def find_paired_cut(inst: PairedCutInstance, cap: int = DEFAULT_PAIR_SUBSETS) -> Optional[Tuple[int, ...]]:
    """Indices into ``inst.pairing`` of at most ``ell`` pairs whose arcs form an s-t cut.

    Raises OracleCapError when more than ``cap`` pair subsets would be examined. A cut of
    at most ``2 * ell`` arcs meets each of the ``2 * ell`` disjoint paths exactly once,
    which is checked on every cut found.
    """
    from .oracle import OracleCapError

    m = len(inst.pairing)
    total = sum(math.comb(m, size) for size in range(min(inst.ell, m) + 1))
    if total > cap:
        raise OracleCapError(f"{total} pair subsets exceed the cap of {cap}")
    for size in range(min(inst.ell, m) + 1):
        for chosen in itertools.combinations(range(m), size):
            removed = {a for i in chosen for a in inst.pairing[i]}
            if inst.dag.t in reachable(inst.dag, removed):
                continue
            for path in inst.paths:
                if sum(a in removed for a in path) != 1:
                    raise RuntimeError(f"cut {sorted(removed)} does not meet path {path} exactly once")
            return chosen
    return None


def solve_paired_cut_oracle(inst: PairedCutInstance, cap: int = DEFAULT_PAIR_SUBSETS) -> bool:
    return find_paired_cut(inst, cap) is not None


def paired_cut_from_pairs(inst: PairedCutInstance, chosen: Iterable[int]) -> FrozenSet[int]:
    return frozenset(a for i in chosen for a in inst.pairing[i])


# ---------------------------------------------------------------- R* templates


@dataclass(frozen=True)
class RStarTemplate:
    """A 4-ary relation R* realized as one application of ``relation``.

    Slot m of R* sits at coordinate ``coords[m]`` of ``relation``, fed with the complement
    of its variable when ``negated[m]`` holds; the remaining coordinates get fresh
    variables local to each application.
    """

    relation: BooleanRelation
    coords: Tuple[int, int, int, int]
    negated: Tuple[bool, bool, bool, bool]
    rstar: BooleanRelation

    def scope(
        self,
        slots: Sequence[int],
        complement: Callable[[int], int],
        fresh: Callable[[], int],
    ) -> Tuple[int, ...]:
        scope: List[Optional[int]] = [None] * self.relation.arity
        for m, c in enumerate(self.coords):
            scope[c] = complement(slots[m]) if self.negated[m] else slots[m]
        return tuple(fresh() if v is None else v for v in scope)


def _rstar_relation(rel: BooleanRelation, coords: Sequence[int], negated: Sequence[bool]) -> BooleanRelation:
    out = project(rel, coords)
    for m, flag in enumerate(negated):
        if flag:
            out = negate_coordinate(out, m)
    return out


def _implies_both_arrows(rstar: BooleanRelation) -> bool:
    return not any(
        (rstar.value(t, 0), rstar.value(t, 1)) == (1, 0) or (rstar.value(t, 2), rstar.value(t, 3)) == (1, 0)
        for t in rstar.tuples()
    )


def _orient(rel: BooleanRelation, i: int, j: int) -> Tuple[int, int, bool, bool]:
    """Orient edge {i, j} and pick negations so that (1, 0) becomes the excluded pair.

    Among all excluded value pairs in both orientations the one needing the fewest
    negations wins; ties go to the first orientation and the smallest pair.
    """
    proj = project(rel, (i, j))
    options = []
    for first, second in ((i, j), (j, i)):
        for a, b in ((1, 0), (0, 1), (1, 1), (0, 0)):
            pair = (a, b) if first == i else (b, a)
            if proj.contains_values(pair):
                continue
            # excluded (a, b) maps to (1, 0) by negating the first slot when a == 0 and the second when b == 1
            options.append(((a == 0) + (b == 1), first, second, a == 0, b == 1))
    if not options:
        raise RelationError(f"coordinates {i} and {j} are not adjacent in the Gaifman graph")
    _, first, second, neg_first, neg_second = min(options, key=lambda o: o[0])
    return first, second, neg_first, neg_second


def implement_rstar_gaifman(rel: BooleanRelation) -> RStarTemplate:
    """R* with (a=b)&(c=d) => R*(a,b,c,d) => (a->b)&(c->d), from a 2K2 in the Gaifman graph.

    Each of the two edges of the 2K2 is normalized on its own, so all four excluded-pair
    patterns per edge are covered. The result is checked by brute force.
    """
    found = find_induced_2k2(gaifman_graph(rel))
    if found is None:
        raise RelationError("the Gaifman graph of the relation is 2K2-free")
    (i1, i2), (i3, i4) = found
    a, b, na, nb = _orient(rel, i1, i2)
    c, d, nc, nd = _orient(rel, i3, i4)
    coords, negated = (a, b, c, d), (na, nb, nc, nd)
    rstar = _rstar_relation(rel, coords, negated)
    required = ((0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1))
    if not all(rstar.contains_values(t) for t in required) or not _implies_both_arrows(rstar):
        raise RelationError(f"normalization of coordinates {coords} failed verification")
    return RStarTemplate(rel, coords, negated, rstar)


def implement_rstar_arrow(rel: BooleanRelation) -> RStarTemplate:
    """R* with (a=b!=c=d) => R*(a,b,c,d) => (a->b)&(c->d), from a 2K2 in the arrow graph.

    R* is the projection onto the four coordinates; no negation is needed.
    """
    arrows = arrow_graph(rel)
    found = find_induced_2k2(arrows.underlying())
    if found is None:
        raise RelationError("the arrow graph of the relation is 2K2-free")
    coords: List[int] = []
    for u, v in found:
        coords += [u, v] if (u, v) in arrows.arcs else [v, u]
    rstar = _rstar_relation(rel, coords, (False,) * 4)
    if not (rstar.contains_values((0, 0, 1, 1)) and rstar.contains_values((1, 1, 0, 0))) or not _implies_both_arrows(rstar):
        raise RelationError(f"projection onto {coords} failed verification")
    return RStarTemplate(rel, tuple(coords), (False,) * 4, rstar)


# ---------------------------------------------------------------- formula assembly


class _Builder:
    """Accumulates constraints over a growing variable set."""

    def __init__(self, num_vars: int) -> None:
        self.num_vars = num_vars
        self.constraints: List[Constraint] = []
        self._complements: Dict[int, int] = {}

    def fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars - 1

    def add(self, rel: BooleanRelation, scope: Sequence[int], weight: Optional[int] = 1, name: str = "") -> None:
        self.constraints.append(Constraint(rel, tuple(scope), weight, name))

    def crisp(self, rel: BooleanRelation, scope: Sequence[int], name: str = "") -> None:
        self.add(rel, scope, None, name)

    def complement(self, v: int) -> int:
        """A variable tied to the negation of ``v`` by a crisp disequality, shared per ``v``."""
        if v not in self._complements:
            w = self.fresh()
            self.crisp(NEQ, (v, w), "neq")
            self._complements[v] = w
        return self._complements[v]

    def rstar(self, template: RStarTemplate, slots: Sequence[int], weight: Optional[int] = 1) -> None:
        self.add(template.relation, template.scope(slots, self.complement, self.fresh), weight, "rstar")

    def formula(self, k: int, W: Optional[int] = None) -> Formula:
        return Formula(self.num_vars, tuple(self.constraints), k, W)


def _negpath_chain(b: _Builder, template: RStarTemplate, xs: Sequence[int], xps: Sequence[int]) -> None:
    """R*(x_i, x_{i+1}, x'_{i+1}, x'_i) along the chains ``xs`` and ``xps``."""
    for i in range(len(xs) - 1):
        b.rstar(template, (xs[i], xs[i + 1], xps[i + 1], xps[i]))


def _weighted_chain(
    b: _Builder, xs: Sequence[int], xps: Sequence[int], W_target: int, via_implications: bool
) -> None:
    for i in range(len(xs) - 1):
        for pair, weight in (((xs[i], xs[i + 1]), W_target - i), ((xps[i], xps[i + 1]), i)):
            if via_implications:
                b.add(IMPL, pair, weight, "impl")
                b.add(IMPL, pair[::-1], weight, "impl")
            else:
                b.add(EQ2, pair, weight, "eq")
    for i in range(1, len(xs) - 1):
        b.crisp(NAND2, (xs[i], xps[i]), "nand")


def gadget_negpath(rel: BooleanRelation, n: int) -> Formula:
    """Negation path on variables s=0, x_1..x_n = 1..n, x'_1..x'_n = n+1..2n, t = 2n+1.

    Every assignment violates a constraint; the assignments that set a prefix of the x
    chain to 1 and every x' to the complement of its x violate exactly one, and all
    others violate at least two. The budget is set to 1.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    template = implement_rstar_arrow(rel)
    s, t = 0, 2 * n + 1
    b = _Builder(2 * n + 2)
    b.crisp(UNARY1, (s,), "pin")
    b.crisp(UNARY0, (t,), "pin")
    xs = [s] + list(range(1, n + 1)) + [t]
    xps = [t] + list(range(n + 1, 2 * n + 1)) + [s]
    _negpath_chain(b, template, xs, xps)
    return b.formula(1)


def gadget_weighted_path(n: int, W_target: int, via_implications: bool = False) -> Formula:
    """Weighted negation path on s=0, x_1..x_n, x'_1..x'_n, t = 2n+1.

    Two equality chains with weights W_target - i and i, crisp pins and (-x_i | -x'_i).
    The complementary prefix assignments violate exactly two constraints of total weight
    W_target; every other assignment violates more or weighs at least W_target + 1.
    ``via_implications`` writes each equality as two implications of the same weight.
    The budgets are k = 2 and W = W_target.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if W_target <= n:
        raise ValueError(f"target weight {W_target} must exceed the path length {n}")
    s, t = 0, 2 * n + 1
    b = _Builder(2 * n + 2)
    b.crisp(UNARY1, (s,), "pin")
    b.crisp(UNARY0, (t,), "pin")
    xs = [s] + list(range(1, n + 1)) + [t]
    xps = [t] + list(range(n + 1, 2 * n + 1)) + [s]
    _weighted_chain(b, xs, xps, W_target, via_implications)
    return b.formula(2, W_target)


def negpath_assignment(n: int, i: int) -> Tuple[int, ...]:
    """The canonical assignment cutting both chains of a length-n gadget after x_i."""
    xs = [1 if j <= i else 0 for j in range(1, n + 1)]
    return tuple([1] + xs + [1 - x for x in xs] + [0])


@dataclass(frozen=True)
class HardInstance:
    """A generated formula together with the variable of every digraph vertex."""

    formula: Formula
    vertex_var: Tuple[int, ...]
    complement_var: Tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return self.formula.budget_k

    @property
    def W(self) -> Optional[int]:
        return self.formula.budget_W


def _pinned_builder(inst: PairedCutInstance) -> _Builder:
    b = _Builder(inst.dag.n)
    b.crisp(UNARY1, (inst.dag.s,), "pin")
    b.crisp(UNARY0, (inst.dag.t,), "pin")
    return b


def _complement_layout(inst: PairedCutInstance, b: _Builder) -> List[int]:
    """x'_v for every vertex: s and t complement each other, the rest are fresh."""
    comp = [0] * inst.dag.n
    for v in range(inst.dag.n):
        comp[v] = b.fresh() if v not in (inst.dag.s, inst.dag.t) else 0
    comp[inst.dag.s] = inst.dag.t
    comp[inst.dag.t] = inst.dag.s
    return comp


def _pairing_clauses(inst: PairedCutInstance, b: _Builder, comp: Sequence[int]) -> None:
    """Four crisp negative 3-clauses per pair: cutting one arc of a pair forces the other."""
    arcs = inst.dag.arcs
    for x, y in inst.pairing:
        u, v = arcs[x].tail, arcs[x].head
        p, q = arcs[y].tail, arcs[y].head
        for scope in (
            (u, comp[v], q),
            (u, comp[v], comp[p]),
            (p, comp[q], v),
            (p, comp[q], comp[u]),
        ):
            b.crisp(NAND3, scope, "pair")


def gen_gaifman_hard(inst: PairedCutInstance, rel: BooleanRelation) -> HardInstance:
    """One variable per vertex, crisp pins and one soft R*(u, v, p, q) per pair; k = ell.

    R* comes from a 2K2 in the Gaifman graph of ``rel``; negated slots use complement
    variables held by crisp disequalities.
    """
    template = implement_rstar_gaifman(rel)
    b = _pinned_builder(inst)
    arcs = inst.dag.arcs
    for x, y in inst.pairing:
        b.rstar(template, (arcs[x].tail, arcs[x].head, arcs[y].tail, arcs[y].head))
    return HardInstance(b.formula(inst.ell), tuple(range(inst.dag.n)))


def gen_arrow_hard(inst: PairedCutInstance, rel: BooleanRelation) -> HardInstance:
    """A negation path per s-t path on shared x/x' variables plus crisp pairing clauses; k = 2 ell.

    R* comes from a 2K2 in the arrow graph of ``rel``. The complement of s is t and
    vice versa, so the pins cover both.
    """
    template = implement_rstar_arrow(rel)
    b = _pinned_builder(inst)
    comp = _complement_layout(inst, b)
    for i in range(len(inst.paths)):
        xs = inst.path_vertices(i)
        _negpath_chain(b, template, xs, [comp[v] for v in xs])
    _pairing_clauses(inst, b, comp)
    return HardInstance(b.formula(2 * inst.ell), tuple(range(inst.dag.n)), tuple(comp))


def gen_weighted_hard(inst: PairedCutInstance, via_implications: bool = False) -> HardInstance:
    """A weighted negation path per s-t path with target weight |V| plus crisp pairing clauses.

    Budgets k = 4 ell and W = 2 ell |V|.
    """
    n = inst.dag.n
    b = _pinned_builder(inst)
    comp = _complement_layout(inst, b)
    for i in range(len(inst.paths)):
        xs = inst.path_vertices(i)
        _weighted_chain(b, xs, [comp[v] for v in xs], n, via_implications)
    _pairing_clauses(inst, b, comp)
    return HardInstance(b.formula(4 * inst.ell, 2 * inst.ell * n), tuple(range(n)), tuple(comp))


def assignment_from_cut(inst: PairedCutInstance, hard: HardInstance, cut: Iterable[int]) -> Tuple[int, ...]:
    """Vertex variables set by reachability from s after removing ``cut``, complements
    opposite; any other variable is 0."""
    side = reachable(inst.dag, set(cut))
    values = [0] * hard.formula.num_vars
    for v, var in enumerate(hard.vertex_var):
        values[var] = 1 if v in side else 0
    for v, var in enumerate(hard.complement_var):
        if var not in hard.vertex_var:
            values[var] = 0 if v in side else 1
    return tuple(values)
