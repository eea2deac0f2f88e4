"""Endgame solver for clause-free bundled cut instances.

The solver enumerates bundle subsets. For a fixed subset, deleting every deletable arc
of the chosen bundles leaves the smallest possible s-side, so it decides the subset.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .core import Outcome, ResourceLimit, Status
from .flowaug import CutError, CutInstance, reachable

DEFAULT_SUBSET_CAP = 2_000_000


@dataclass(frozen=True)
class BundledCutInstance:
    """A cut instance without clauses.

    With ``strict`` set, every bundle must have pairwise linked deletable arcs.
    """

    inst: CutInstance
    strict: bool = False

    def __post_init__(self) -> None:
        if self.inst.clauses:
            raise CutError("bundled cut instances carry no clauses")
        if self.strict:
            for b in self.inst.bundle_ids():
                if not is_pairwise_linked(self.inst, b):
                    raise CutError(f"bundle {b} is not pairwise linked")


def deletable_arcs(inst: CutInstance) -> List[int]:
    """Soft arcs without a crisp arc parallel to them."""
    crisp = {(a.tail, a.head) for a in inst.arcs if not a.soft}
    return [i for i, a in enumerate(inst.arcs) if a.soft and (a.tail, a.head) not in crisp]


def is_pairwise_linked(inst: CutInstance, bundle: int) -> bool:
    """Every two deletable arcs of the bundle are joined by an undirected path that uses
    only crisp arcs and arcs of this bundle."""
    own = [i for i in deletable_arcs(inst) if inst.arcs[i].bundle == bundle]
    if len(own) < 2:
        return True
    adj: Dict[int, Set[int]] = {}
    for a in inst.arcs:
        if a.bundle is None or a.bundle == bundle:
            adj.setdefault(a.tail, set()).add(a.head)
            adj.setdefault(a.head, set()).add(a.tail)
    for i, j in itertools.combinations(own, 2):
        start = {inst.arcs[i].tail, inst.arcs[i].head}
        goal = {inst.arcs[j].tail, inst.arcs[j].head}
        seen = set(start)
        queue = deque(start)
        while queue:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if not seen & goal:
            return False
    return True


def _subset_count(bundles: int, k: int) -> int:
    return sum(math.comb(bundles, r) for r in range(min(k, bundles) + 1))


def subset_is_cut(inst: CutInstance, subset: FrozenSet[int]) -> Optional[FrozenSet[int]]:
    """The induced cut after deleting every arc of the chosen bundles, or None if t stays reachable."""
    removed = [i for i, a in enumerate(inst.arcs) if a.bundle in subset]
    side = reachable(inst.graph, removed)
    if inst.t in side:
        return None
    return frozenset(i for i in removed if inst.arcs[i].tail in side and inst.arcs[i].head not in side)


def solve_bundled_cut(problem, subset_cap: int = DEFAULT_SUBSET_CAP) -> Outcome:
    """Minimum-weight bundle set of size at most k and weight at most W whose deletion cuts t off.

    Accepts a ``BundledCutInstance`` or a clause-free ``CutInstance``. Raises
    ``ResourceLimit`` when the number of subsets exceeds ``subset_cap``.
    """
    inst = problem.inst if isinstance(problem, BundledCutInstance) else problem
    if inst.clauses:
        raise CutError("bundled cut instances carry no clauses")
    if inst.k < 0 or (inst.W is not None and inst.W < 0):
        return Outcome(Status.NO)
    bundles = inst.bundle_ids()
    if _subset_count(len(bundles), inst.k) > subset_cap:
        raise ResourceLimit(f"more than {subset_cap} bundle subsets to enumerate")
    best: Optional[Tuple[Tuple[int, int], FrozenSet[int], FrozenSet[int]]] = None
    for size in range(min(inst.k, len(bundles)) + 1):
        for subset in itertools.combinations(bundles, size):
            weight = sum(inst.weight(b) for b in subset)
            if inst.W is not None and weight > inst.W:
                continue
            key = (weight, size)
            if best is not None and key >= best[0]:
                continue
            chosen = frozenset(subset)
            cut = subset_is_cut(inst, chosen)
            if cut is not None:
                best = (key, chosen, cut)
    if best is None:
        return Outcome(Status.NO)
    return Outcome(Status.YES, cut=best[2], bundles=best[1])
