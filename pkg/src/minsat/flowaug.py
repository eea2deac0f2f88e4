"""Directed cut/flow predicates and flow-augmentation substitutes.

Soft arcs have capacity one, crisp arcs are unbounded. An arc id is the arc's
position in ``CutDigraph.arcs``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

INF = float("inf")
DEFAULT_ENUMERATION_CAP = 14


class CutError(ValueError):
    """A cut-level precondition does not hold."""


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    soft: bool = True
    bundle: Optional[int] = None


@dataclass(frozen=True)
class CutDigraph:
    n: int
    s: int
    t: int
    arcs: Tuple[Arc, ...]

    def __post_init__(self) -> None:
        if self.s == self.t:
            raise CutError("s and t must differ")
        for a in self.arcs:
            if not (0 <= a.tail < self.n and 0 <= a.head < self.n):
                raise CutError(f"arc {a} leaves the vertex range")
            if not a.soft and a.bundle is not None:
                raise CutError("crisp arcs carry no bundle")

    @staticmethod
    def build(n: int, s: int, t: int, arcs: Iterable[Tuple[int, int]], crisp: Iterable[Tuple[int, int]] = ()) -> "CutDigraph":
        out = [Arc(u, v, True) for u, v in arcs] + [Arc(u, v, False) for u, v in crisp]
        return CutDigraph(n, s, t, tuple(out))

    def soft_ids(self) -> List[int]:
        return [i for i, a in enumerate(self.arcs) if a.soft]

    def plus(self, pairs: Iterable[Tuple[int, int]]) -> "CutDigraph":
        """G + A: every pair becomes a fresh crisp arc appended after the existing ones."""
        return CutDigraph(self.n, self.s, self.t, self.arcs + tuple(Arc(u, v, False) for u, v in pairs))


@dataclass(frozen=True)
class StFlow:
    paths: Tuple[Tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.paths)

    def arc_set(self) -> FrozenSet[int]:
        return frozenset(a for p in self.paths for a in p)


def reachable(g: CutDigraph, removed: Iterable[int] = (), source: Optional[int] = None, reverse: bool = False) -> Set[int]:
    """Vertices reachable from ``source`` (default s) avoiding the removed arc ids."""
    gone = set(removed)
    adj: List[List[int]] = [[] for _ in range(g.n)]
    for i, a in enumerate(g.arcs):
        if i in gone:
            continue
        if reverse:
            adj[a.head].append(a.tail)
        else:
            adj[a.tail].append(a.head)
    start = g.s if source is None else source
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _crisp_path_exists(g: CutDigraph) -> bool:
    return g.t in reachable(g, [i for i, a in enumerate(g.arcs) if a.soft])


class _Residual:
    """Augmenting-path max flow on a multigraph keeping per-arc flow values."""

    def __init__(self, g: CutDigraph) -> None:
        self.g = g
        self.big = g.n * max(1, len(g.arcs)) + 1
        self.cap = [1 if a.soft else self.big for a in g.arcs]
        self.flow = [0] * len(g.arcs)
        self.out: List[List[int]] = [[] for _ in range(g.n)]
        self.inc: List[List[int]] = [[] for _ in range(g.n)]
        for i, a in enumerate(g.arcs):
            self.out[a.tail].append(i)
            self.inc[a.head].append(i)

    def augment_once(self) -> bool:
        g = self.g
        parent: dict = {g.s: None}
        queue = deque([g.s])
        while queue and g.t not in parent:
            u = queue.popleft()
            for i in self.out[u]:
                v = g.arcs[i].head
                if v not in parent and self.flow[i] < self.cap[i]:
                    parent[v] = (i, +1, u)
                    queue.append(v)
            for i in self.inc[u]:
                v = g.arcs[i].tail
                if v not in parent and self.flow[i] > 0:
                    parent[v] = (i, -1, u)
                    queue.append(v)
        if g.t not in parent:
            return False
        v = g.t
        while parent[v] is not None:
            i, d, u = parent[v]
            self.flow[i] += d
            v = u
        return True

    def residual_reach(self) -> Set[int]:
        g = self.g
        seen = {g.s}
        queue = deque([g.s])
        while queue:
            u = queue.popleft()
            for i in self.out[u]:
                v = g.arcs[i].head
                if v not in seen and self.flow[i] < self.cap[i]:
                    seen.add(v)
                    queue.append(v)
            for i in self.inc[u]:
                v = g.arcs[i].tail
                if v not in seen and self.flow[i] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen

    def decompose(self) -> List[Tuple[int, ...]]:
        g = self.g
        flow = list(self.flow)
        paths: List[Tuple[int, ...]] = []
        while True:
            start = [i for i in self.out[g.s] if flow[i] > 0]
            if not start:
                break
            walk: List[int] = []
            position = {g.s: 0}
            v = g.s
            while v != g.t:
                i = next(i for i in self.out[v] if flow[i] > 0)
                walk.append(i)
                v = g.arcs[i].head
                if v in position:
                    # cancel the cycle just closed and resume from its start
                    cut = position[v]
                    for j in walk[cut:]:
                        flow[j] -= 1
                    for j in walk[cut:]:
                        position.pop(g.arcs[j].head, None)
                    position[v] = cut
                    del walk[cut:]
                else:
                    position[v] = len(walk)
            for i in walk:
                flow[i] -= 1
            paths.append(tuple(walk))
        return paths


def max_flow(g: CutDigraph) -> Tuple[float, StFlow]:
    """Return (lambda, flow); lambda is ``INF`` when an all-crisp st-path exists."""
    if _crisp_path_exists(g):
        path = _crisp_path(g)
        return INF, StFlow((path,))
    res = _Residual(g)
    while res.augment_once():
        pass
    paths = res.decompose()
    return len(paths), StFlow(tuple(paths))


def _crisp_path(g: CutDigraph) -> Tuple[int, ...]:
    parent: dict = {g.s: None}
    queue = deque([g.s])
    while queue:
        u = queue.popleft()
        for i, a in enumerate(g.arcs):
            if a.tail == u and not a.soft and a.head not in parent:
                parent[a.head] = i
                queue.append(a.head)
    path = []
    v = g.t
    while parent[v] is not None:
        i = parent[v]
        path.append(i)
        v = g.arcs[i].tail
    return tuple(reversed(path))


def closest_mincut(g: CutDigraph) -> Tuple[int, FrozenSet[int]]:
    """The st-mincut closest to s and the s-side that defines it."""
    if _crisp_path_exists(g):
        raise CutError("no st-cut exists: an all-crisp st-path is present")
    res = _Residual(g)
    while res.augment_once():
        pass
    side = res.residual_reach()
    cut = frozenset(i for i, a in enumerate(g.arcs) if a.tail in side and a.head not in side)
    return len(cut), cut


def flow_value(g: CutDigraph) -> float:
    return max_flow(g)[0]


# ---------------------------------------------------------------- predicates


def is_st_cut(g: CutDigraph, z: Iterable[int]) -> bool:
    z = set(z)
    if any(not g.arcs[i].soft for i in z):
        return False
    return g.t not in reachable(g, z)


def s_side(g: CutDigraph, z: Iterable[int]) -> Set[int]:
    return reachable(g, z)


def is_star_st_cut(g: CutDigraph, z: Iterable[int]) -> bool:
    z = set(z)
    if not is_st_cut(g, z):
        return False
    side = reachable(g, z)
    return all(g.arcs[i].tail in side and g.arcs[i].head not in side for i in z)


def core_of(g: CutDigraph, z: Iterable[int]) -> FrozenSet[int]:
    z = set(z)
    if not is_star_st_cut(g, z):
        raise CutError("core is only defined for star st-cuts")
    to_t = reachable(g, z, source=g.t, reverse=True)
    return frozenset(i for i in z if g.arcs[i].head in to_t)


def is_flow(g: CutDigraph, flow: StFlow) -> bool:
    used: Set[int] = set()
    for path in flow.paths:
        v = g.s
        for i in path:
            a = g.arcs[i]
            if a.tail != v:
                return False
            v = a.head
            if a.soft:
                if i in used:
                    return False
                used.add(i)
        if v != g.t:
            return False
    return True


def is_witnessing_flow(g: CutDigraph, flow: StFlow, z: Iterable[int]) -> bool:
    z = frozenset(z)
    if not is_star_st_cut(g, z) or not is_flow(g, flow):
        return False
    if flow_value(g) != len(flow):
        return False
    if core_of(g, z) != flow.arc_set() & z:
        return False
    return all(len(z.intersection(p)) == 1 for p in flow.paths)


def is_compatible(g: CutDigraph, pairs: Iterable[Tuple[int, int]], z: Iterable[int]) -> bool:
    side = reachable(g, z)
    return not any(u in side and v not in side for u, v in pairs)


def core_is_mincut(g: CutDigraph, z: Iterable[int]) -> bool:
    return len(core_of(g, z)) == flow_value(g)


def check_augmentation(g: CutDigraph, pairs: Sequence[Tuple[int, int]], flow: StFlow, z: Iterable[int]) -> bool:
    """All three output guarantees of flow augmentation for one star cut."""
    z = frozenset(z)
    if not is_compatible(g, pairs, z):
        return False
    ga = g.plus(pairs)
    return is_star_st_cut(ga, z) and core_is_mincut(ga, z) and is_witnessing_flow(ga, flow, z)


# ---------------------------------------------------------------- augmenters


def _path_through(g: CutDigraph, first: int, pairs_index: dict, arc_id: int) -> Tuple[int, ...]:
    a = g.arcs[arc_id]
    path: List[int] = []
    if a.tail != g.s:
        path.append(first + pairs_index[(g.s, a.tail)])
    path.append(arc_id)
    if a.head != g.t:
        path.append(first + pairs_index[(a.head, g.t)])
    return tuple(path)


def _augment(g: CutDigraph, z: Iterable[int], full: bool) -> Tuple[List[Tuple[int, int]], StFlow]:
    z = frozenset(z)
    if not is_star_st_cut(g, z):
        raise CutError("augmentation requires a star st-cut")
    side = reachable(g, z)
    if full:
        sinks = [v for v in range(g.n) if v not in side and v != g.t]
        through = sorted(z)
    else:
        to_t = reachable(g, z, source=g.t, reverse=True)
        sinks = [v for v in range(g.n) if v in to_t and v != g.t]
        through = sorted(core_of(g, z))
    pairs = [(g.s, u) for u in sorted(side) if u != g.s] + [(v, g.t) for v in sinks]
    index = {p: i for i, p in enumerate(pairs)}
    first = len(g.arcs)
    flow = StFlow(tuple(_path_through(g, first, index, i) for i in through))
    return pairs, flow


def augment_oracle_core(g: CutDigraph, z: Iterable[int]) -> Tuple[List[Tuple[int, int]], StFlow]:
    """Augment using knowledge of Z so that core(Z) becomes a mincut with a witnessing flow."""
    return _augment(g, z, full=False)


def augment_oracle_full(g: CutDigraph, z: Iterable[int]) -> Tuple[List[Tuple[int, int]], StFlow]:
    """Augment using knowledge of Z so that Z itself becomes a mincut."""
    return _augment(g, z, full=True)


def augment_from_side(g: CutDigraph, side: Iterable[int]) -> Tuple[List[Tuple[int, int]], StFlow]:
    side = set(side)
    pairs = [(g.s, u) for u in sorted(side) if u != g.s]
    pairs += [(v, g.t) for v in range(g.n) if v not in side and v != g.t]
    _, flow = max_flow(g.plus(pairs))
    return pairs, flow


def augment_enumerate(g: CutDigraph, k: Optional[int] = None, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Tuple[List[Tuple[int, int]], StFlow]]:
    """One candidate per bipartition with s on the source side and t on the sink side.

    The candidate built from the s-side of a star cut Z satisfies the augmentation
    contract for Z. Candidates whose value is infinite or exceeds ``k`` cannot serve
    any star cut of size at most ``k`` and are skipped.
    """
    if g.n > cap:
        raise CutError(f"enumeration limited to {cap} vertices, got {g.n}")
    others = [v for v in range(g.n) if v not in (g.s, g.t)]
    for r in range(len(others) + 1):
        for chosen in itertools.combinations(others, r):
            pairs, flow = augment_from_side(g, (g.s, *chosen))
            value = flow_value(g.plus(pairs)) if flow.paths else 0
            if value == INF or (k is not None and value > k):
                continue
            yield pairs, flow


@dataclass(frozen=True)
class CutInstance:
    """Digraph with clauses and disjoint bundles; an arc or clause is soft iff it has a bundle.

    Clauses are vertex tuples, violated when every member is reachable from s.
    ``W`` is None for unweighted problems.
    """

    n: int
    s: int
    t: int
    arcs: Tuple[Arc, ...]
    clauses: Tuple[Tuple[Tuple[int, ...], Optional[int]], ...] = ()
    weights: Tuple[Tuple[int, int], ...] = ()
    k: int = 0
    W: Optional[int] = None

    def __post_init__(self) -> None:
        if self.s == self.t:
            raise CutError("s and t must differ")
        for a in self.arcs:
            if not (0 <= a.tail < self.n and 0 <= a.head < self.n):
                raise CutError(f"arc {a} leaves the vertex range")
            if a.soft != (a.bundle is not None):
                raise CutError("an arc is soft exactly when it belongs to a bundle")
        for members, _ in self.clauses:
            if not members or any(not 0 <= v < self.n for v in members):
                raise CutError(f"clause {members} leaves the vertex range")
        seen = set()
        for a in self.arcs:
            if a.bundle is not None:
                key = (a.bundle, "arc", a.tail, a.head)
                if key in seen:
                    raise CutError("a bundle holds two copies of the same arc")
                seen.add(key)
        for members, b in self.clauses:
            if b is not None:
                key = (b, "clause", tuple(sorted(members)))
                if key in seen:
                    raise CutError("a bundle holds two copies of the same clause")
                seen.add(key)
        if any(w < 0 for _, w in self.weights):
            raise CutError("bundle weights must be non-negative")

    @property
    def graph(self) -> CutDigraph:
        return CutDigraph(self.n, self.s, self.t, self.arcs)

    def bundle_ids(self) -> List[int]:
        ids = {a.bundle for a in self.arcs if a.bundle is not None}
        ids |= {b for _, b in self.clauses if b is not None}
        return sorted(ids)

    def weight(self, bundle: int) -> int:
        return dict(self.weights).get(bundle, 1)

    def bundle_arcs(self, bundle: int) -> List[int]:
        return [i for i, a in enumerate(self.arcs) if a.bundle == bundle]

    def bundle_clauses(self, bundle: int) -> List[int]:
        return [i for i, (_, b) in enumerate(self.clauses) if b == bundle]

    def bundle_vertices(self, bundle: int) -> Set[int]:
        out: Set[int] = set()
        for i in self.bundle_arcs(bundle):
            out |= {self.arcs[i].tail, self.arcs[i].head}
        for i in self.bundle_clauses(bundle):
            out |= set(self.clauses[i][0])
        return out

    def arity(self) -> int:
        sizes = [len(set(m)) for m, _ in self.clauses]
        sizes += [len(self.bundle_vertices(b)) for b in self.bundle_ids()]
        return max(sizes, default=0)


@dataclass(frozen=True)
class CutEvaluation:
    is_cut: bool
    crisp_ok: bool
    violated: FrozenSet[int]
    weight: int
    side: FrozenSet[int]

    def feasible(self) -> bool:
        return self.is_cut and self.crisp_ok


def evaluate_cut(inst: CutInstance, z: Iterable[int]) -> CutEvaluation:
    """Check a cut against every arc and clause of the instance, independently of any solver."""
    z = frozenset(z)
    side = frozenset(reachable(inst.graph, z))
    crisp_ok = all(inst.arcs[i].soft for i in z)
    violated = {inst.arcs[i].bundle for i in z if inst.arcs[i].bundle is not None}
    for members, b in inst.clauses:
        if all(v in side for v in members):
            if b is None:
                crisp_ok = False
            else:
                violated.add(b)
    weight = sum(inst.weight(b) for b in violated)
    return CutEvaluation(inst.t not in side, crisp_ok, frozenset(violated), weight, side)


def accepts(inst: CutInstance, z: Iterable[int]) -> bool:
    """Whether ``z`` is a feasible cut within both budgets of ``inst``."""
    ev = evaluate_cut(inst, z)
    if not ev.feasible() or len(ev.violated) > inst.k:
        return False
    return inst.W is None or ev.weight <= inst.W


def star_cuts(g: CutDigraph) -> Iterator[FrozenSet[int]]:
    """Every star st-cut of ``g``, via the reach-closed source sides that define them."""
    others = [v for v in range(g.n) if v not in (g.s, g.t)]
    for r in range(len(others) + 1):
        for chosen in itertools.combinations(others, r):
            side = {g.s, *chosen}
            z = frozenset(i for i, a in enumerate(g.arcs) if a.tail in side and a.head not in side)
            if any(not g.arcs[i].soft for i in z):
                continue
            if reachable(g, z) == side:
                yield z
