"""Boolean relations, languages, formulas and their structural analyses.

Tuples of an arity-r relation are encoded as integers in ``range(2**r)``;
coordinate 0 is the most significant bit. Coordinates are 0-indexed
throughout the library.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

MAX_ARITY = 16


class RelationError(ValueError):
    """Malformed relation or misuse of a relation-level operation."""


def _bit(t: int, i: int, arity: int) -> int:
    return (t >> (arity - 1 - i)) & 1


@dataclass(frozen=True)
class BooleanRelation:
    arity: int
    bits: int  # membership table: bit t is set iff tuple t is in the relation

    def __post_init__(self) -> None:
        if not 0 <= self.arity <= MAX_ARITY:
            raise RelationError(f"arity {self.arity} outside [0, {MAX_ARITY}]")
        if self.bits < 0 or self.bits >> (1 << self.arity):
            raise RelationError("membership table longer than 2**arity")

    @property
    def size(self) -> int:
        return 1 << self.arity

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_full(self) -> bool:
        return self.bits == (1 << self.size) - 1

    def __contains__(self, t: int) -> bool:
        return bool((self.bits >> t) & 1)

    def tuples(self) -> List[int]:
        return [t for t in range(self.size) if (self.bits >> t) & 1]

    def value(self, t: int, i: int) -> int:
        return _bit(t, i, self.arity)

    def tuple_string(self, t: int) -> str:
        return format(t, f"0{self.arity}b") if self.arity else ""

    def tuple_strings(self) -> List[str]:
        return [self.tuple_string(t) for t in self.tuples()]

    def contains_values(self, values: Sequence[int]) -> bool:
        t = 0
        for v in values:
            t = (t << 1) | (1 if v else 0)
        return t in self

    def coordinate_mask(self, i: int) -> int:
        """Bitmask over tuple indices whose coordinate ``i`` equals 1."""
        return _coordinate_masks(self.arity)[i]

    def __repr__(self) -> str:
        return f"BooleanRelation({self.arity}, {{{','.join(self.tuple_strings())}}})"


_MASK_CACHE: Dict[int, Tuple[int, ...]] = {}


def _coordinate_masks(arity: int) -> Tuple[int, ...]:
    masks = _MASK_CACHE.get(arity)
    if masks is None:
        out = []
        for i in range(arity):
            m = 0
            for t in range(1 << arity):
                if _bit(t, i, arity):
                    m |= 1 << t
            out.append(m)
        masks = tuple(out)
        _MASK_CACHE[arity] = masks
    return masks


def _full_mask(arity: int) -> int:
    return (1 << (1 << arity)) - 1


def relation_from_tuples(arity: int, tuples: Iterable[str]) -> BooleanRelation:
    if not 0 <= arity <= MAX_ARITY:
        raise RelationError(f"arity {arity} outside [0, {MAX_ARITY}]")
    bits = 0
    for s in tuples:
        if len(s) != arity or any(c not in "01" for c in s):
            raise RelationError(f"tuple {s!r} is not a bit-string of length {arity}")
        bits |= 1 << (int(s, 2) if arity else 0)
    return BooleanRelation(arity, bits)


def relation_from_predicate(arity: int, pred) -> BooleanRelation:
    bits = 0
    for t in range(1 << arity):
        if pred(*[_bit(t, i, arity) for i in range(arity)]):
            bits |= 1 << t
    return BooleanRelation(arity, bits)


def project(rel: BooleanRelation, coords: Sequence[int]) -> BooleanRelation:
    if len(set(coords)) != len(coords):
        raise RelationError("projection coordinates must be distinct")
    for c in coords:
        if not 0 <= c < rel.arity:
            raise RelationError(f"coordinate {c} out of range for arity {rel.arity}")
    m = len(coords)
    bits = 0
    for t in rel.tuples():
        u = 0
        for c in coords:
            u = (u << 1) | _bit(t, c, rel.arity)
        bits |= 1 << u
    return BooleanRelation(m, bits)


def dual_relation(rel: BooleanRelation) -> BooleanRelation:
    top = rel.size - 1
    bits = 0
    for t in rel.tuples():
        bits |= 1 << (top ^ t)
    return BooleanRelation(rel.arity, bits)


def negate_coordinate(rel: BooleanRelation, i: int) -> BooleanRelation:
    if not 0 <= i < rel.arity:
        raise RelationError(f"coordinate {i} out of range for arity {rel.arity}")
    flip = 1 << (rel.arity - 1 - i)
    bits = 0
    for t in rel.tuples():
        bits |= 1 << (t ^ flip)
    return BooleanRelation(rel.arity, bits)


def substitute(rel: BooleanRelation, scope: Sequence[int], num_vars: int) -> BooleanRelation:
    """Relation on ``num_vars`` coordinates expressing ``rel(scope)``; repeats allowed."""
    bits = 0
    for t in range(1 << num_vars):
        vals = [_bit(t, v, num_vars) for v in scope]
        if rel.contains_values(vals):
            bits |= 1 << t
    return BooleanRelation(num_vars, bits)


# Named relations used across the library and its tests.
EQ2 = relation_from_tuples(2, ["00", "11"])
NEQ = relation_from_tuples(2, ["01", "10"])
IMPL = relation_from_tuples(2, ["00", "01", "11"])
NAND2 = relation_from_tuples(2, ["00", "01", "10"])
OR2 = relation_from_tuples(2, ["01", "10", "11"])
UNARY0 = relation_from_tuples(1, ["0"])
UNARY1 = relation_from_tuples(1, ["1"])
R4 = relation_from_predicate(4, lambda a, b, c, d: a == b and c == d)
REX = relation_from_predicate(3, lambda x, y, z: x == 1 and y == z)
RPRIME = relation_from_predicate(4, lambda a, b, c, d: (not a or b) and (not c or d) and not (a and c))
RCMC = relation_from_predicate(4, lambda a, b, c, d: a == b and c == d and not (a and c))
RMIX = relation_from_predicate(4, lambda a, b, c, d: not (a and b) and (not c or d))
NAND3 = relation_from_predicate(3, lambda x, y, z: not (x and y and z))


def chain_relation(length: int) -> BooleanRelation:
    """x_1 -> x_2 -> ... -> x_length."""
    return relation_from_predicate(length, lambda *xs: all(xs[i] <= xs[i + 1] for i in range(len(xs) - 1)))


# ---------------------------------------------------------------- graphs


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: FrozenSet[Tuple[int, int]]  # stored with u < v

    @staticmethod
    def build(n: int, edges: Iterable[Tuple[int, int]]) -> "UndirectedGraph":
        es = set()
        for u, v in edges:
            if u != v:
                es.add((min(u, v), max(u, v)))
        return UndirectedGraph(n, frozenset(es))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def induced(self, vertices: Sequence[int]) -> "UndirectedGraph":
        index = {v: i for i, v in enumerate(vertices)}
        return UndirectedGraph.build(
            len(vertices),
            [(index[u], index[v]) for u, v in self.edges if u in index and v in index],
        )

    def identify(self, u: int, v: int) -> "UndirectedGraph":
        """Merge ``v`` into ``u``; vertices above ``v`` shift down by one."""
        if u == v:
            return self

        def rename(x: int) -> int:
            x = u if x == v else x
            return x - 1 if x > v else x

        return UndirectedGraph.build(self.n - 1, [(rename(a), rename(b)) for a, b in self.edges])


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    arcs: FrozenSet[Tuple[int, int]]

    def underlying(self) -> UndirectedGraph:
        return UndirectedGraph.build(self.n, self.arcs)

    def induced(self, vertices: Sequence[int]) -> "DirectedGraph":
        index = {v: i for i, v in enumerate(vertices)}
        return DirectedGraph(
            len(vertices),
            frozenset((index[u], index[v]) for u, v in self.arcs if u in index and v in index),
        )

    def reversed(self) -> "DirectedGraph":
        return DirectedGraph(self.n, frozenset((v, u) for u, v in self.arcs))


def _pair_patterns(rel: BooleanRelation, i: int, j: int) -> int:
    """Bitmask over the four value pairs (a_i a_j as a 2-bit number) attained by ``rel``."""
    seen = 0
    for t in rel.tuples():
        seen |= 1 << (2 * _bit(t, i, rel.arity) + _bit(t, j, rel.arity))
        if seen == 0b1111:
            break
    return seen


def gaifman_graph(rel: BooleanRelation) -> UndirectedGraph:
    if rel.is_empty:
        raise RelationError("the Gaifman graph of an empty relation is undefined")
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(rel.arity), 2)
        if _pair_patterns(rel, i, j) != 0b1111
    ]
    return UndirectedGraph.build(rel.arity, edges)


def arrow_graph(rel: BooleanRelation) -> DirectedGraph:
    if rel.is_empty:
        raise RelationError("the arrow graph of an empty relation is undefined")
    arcs = set()
    for i, j in itertools.permutations(range(rel.arity), 2):
        seen = _pair_patterns(rel, i, j)
        # pattern index 2*a_i + a_j: 00 -> 0, 11 -> 3, 10 -> 2
        if not seen & (1 << 2) and seen & 1 and seen & (1 << 3):
            arcs.add((i, j))
    return DirectedGraph(rel.arity, frozenset(arcs))


def find_induced_2k2(graph: UndirectedGraph) -> Optional[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Return two edges inducing a 2K2, or None if the graph is 2K2-free."""
    edges = sorted(graph.edges)
    for (a, b), (c, d) in itertools.combinations(edges, 2):
        if len({a, b, c, d}) < 4:
            continue
        if any(graph.has_edge(x, y) for x in (a, b) for y in (c, d)):
            continue
        return (a, b), (c, d)
    return None


def is_2k2_free(graph) -> bool:
    """Decide 2K2-freeness by scanning every 4-vertex subset."""
    if isinstance(graph, DirectedGraph):
        graph = graph.underlying()
    for quad in itertools.combinations(range(graph.n), 4):
        present = [(x, y) for x, y in itertools.combinations(quad, 2) if graph.has_edge(x, y)]
        if len(present) == 2 and len({*present[0], *present[1]}) == 4:
            return False
    return True


# ---------------------------------------------------------------- clauses


class ClauseKind(enum.Enum):
    ASSIGN0 = "Assign0"
    ASSIGN1 = "Assign1"
    IMPLICATION = "Implication"
    NEGATIVE = "NegativeClause"
    POSITIVE = "PositiveClause"
    TWO_CLAUSE = "TwoClause"


Literal = Tuple[int, bool]  # (variable index, polarity); True means the positive literal


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals tagged with its syntactic kind.

    An implication ``x -> y`` is stored as the literals ``(x, False), (y, True)``.
    """

    kind: ClauseKind
    literals: Tuple[Literal, ...]

    def __post_init__(self) -> None:
        k, lits = self.kind, self.literals
        if k in (ClauseKind.ASSIGN0, ClauseKind.ASSIGN1):
            ok = len(lits) == 1 and lits[0][1] == (k is ClauseKind.ASSIGN1)
        elif k is ClauseKind.IMPLICATION:
            ok = len(lits) == 2 and not lits[0][1] and lits[1][1]
        elif k is ClauseKind.TWO_CLAUSE:
            ok = len(lits) == 2
        elif k is ClauseKind.NEGATIVE:
            ok = len(lits) >= 1 and all(not p for _, p in lits)
        else:
            ok = len(lits) >= 1 and all(p for _, p in lits)
        if not ok:
            raise RelationError(f"malformed {k.value} clause {lits}")

    @property
    def variables(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.literals)

    def satisfied_by(self, values: Sequence[int]) -> bool:
        return any(bool(values[v]) == p for v, p in self.literals)

    def mask(self, arity: int) -> int:
        """Bitmask over tuple indices of an arity-``arity`` relation that satisfy the clause."""
        masks = _coordinate_masks(arity)
        full = _full_mask(arity)
        m = 0
        for v, p in self.literals:
            m |= masks[v] if p else full & ~masks[v]
        return m

    def __str__(self) -> str:
        if self.kind is ClauseKind.IMPLICATION:
            return f"({self.literals[0][0]}->{self.literals[1][0]})"
        return "(" + " v ".join(("" if p else "~") + str(v) for v, p in self.literals) + ")"


ALL_KINDS = frozenset(ClauseKind)
BIJUNCTIVE_KINDS = frozenset(
    {ClauseKind.ASSIGN0, ClauseKind.ASSIGN1, ClauseKind.TWO_CLAUSE, ClauseKind.IMPLICATION}
)
NEGATIVE_KINDS = frozenset({ClauseKind.NEGATIVE, ClauseKind.ASSIGN0, ClauseKind.ASSIGN1})
POSITIVE_KINDS = frozenset({ClauseKind.POSITIVE, ClauseKind.ASSIGN0, ClauseKind.ASSIGN1})
SIGMA_KINDS = frozenset(
    {ClauseKind.IMPLICATION, ClauseKind.NEGATIVE, ClauseKind.ASSIGN0, ClauseKind.ASSIGN1}
)
SIGMA_DUAL_KINDS = frozenset(
    {ClauseKind.IMPLICATION, ClauseKind.POSITIVE, ClauseKind.ASSIGN0, ClauseKind.ASSIGN1}
)


def _candidate_clauses(arity: int, kind: ClauseKind) -> Iterator[Clause]:
    coords = range(arity)
    if kind is ClauseKind.ASSIGN0:
        for i in coords:
            yield Clause(kind, ((i, False),))
    elif kind is ClauseKind.ASSIGN1:
        for i in coords:
            yield Clause(kind, ((i, True),))
    elif kind is ClauseKind.IMPLICATION:
        for i, j in itertools.permutations(coords, 2):
            yield Clause(kind, ((i, False), (j, True)))
    elif kind is ClauseKind.TWO_CLAUSE:
        for i, j in itertools.combinations(coords, 2):
            for p, q in itertools.product((False, True), repeat=2):
                yield Clause(kind, ((i, p), (j, q)))
    else:
        polarity = kind is ClauseKind.POSITIVE
        for size in range(1, arity + 1):
            for subset in itertools.combinations(coords, size):
                yield Clause(kind, tuple((i, polarity) for i in subset))


def implied_clauses(rel: BooleanRelation, family: Iterable[ClauseKind]) -> List[Clause]:
    """All clauses of the given kinds over the coordinates of ``rel`` that every tuple satisfies."""
    out: List[Clause] = []
    for kind in sorted(set(family), key=lambda k: k.value):
        for clause in _candidate_clauses(rel.arity, kind):
            if rel.bits & ~clause.mask(rel.arity) == 0:
                out.append(clause)
    return out


def clauses_relation(arity: int, clauses: Iterable[Clause]) -> BooleanRelation:
    bits = _full_mask(arity)
    for c in clauses:
        bits &= c.mask(arity)
    return BooleanRelation(arity, bits)


def qfpp_definable(rel: BooleanRelation, family: Iterable[ClauseKind]) -> bool:
    """Whether ``rel`` equals the conjunction of its implied clauses of the given kinds."""
    return clauses_relation(rel.arity, implied_clauses(rel, family)).bits == rel.bits


def is_sigma_relation(rel: BooleanRelation) -> bool:
    return not rel.is_empty and qfpp_definable(rel, SIGMA_KINDS)


@dataclass(frozen=True)
class CanonicalDefinition:
    ones: FrozenSet[int]
    zeroes: FrozenSet[int]
    rest: FrozenSet[int]
    clauses: Tuple[Clause, ...]

    @property
    def implications(self) -> List[Tuple[int, int]]:
        return [
            (c.literals[0][0], c.literals[1][0])
            for c in self.clauses
            if c.kind is ClauseKind.IMPLICATION
        ]

    @property
    def negative_clauses(self) -> List[Tuple[int, ...]]:
        return [c.variables for c in self.clauses if c.kind is ClauseKind.NEGATIVE]


def canonical_definition(rel: BooleanRelation) -> CanonicalDefinition:
    """Ones/Zeroes/Rest split plus the canonical implication and negative-clause set.

    Forcings are returned as ``Assign1``/``Assign0`` clauses standing for ``1 -> x`` and
    ``x -> 0``.
    """
    if rel.is_empty:
        raise RelationError("canonical definition requires a non-empty relation")
    if not qfpp_definable(rel, SIGMA_KINDS):
        raise RelationError("relation is not definable by implications, negative clauses and assignments")
    masks = _coordinate_masks(rel.arity)
    ones = frozenset(i for i in range(rel.arity) if rel.bits & ~masks[i] == 0)
    zeroes = frozenset(i for i in range(rel.arity) if rel.bits & masks[i] == 0)
    rest = frozenset(range(rel.arity)) - ones - zeroes
    clauses: List[Clause] = [Clause(ClauseKind.ASSIGN1, ((i, True),)) for i in sorted(ones)]
    clauses += [Clause(ClauseKind.ASSIGN0, ((i, False),)) for i in sorted(zeroes)]
    arrows = arrow_graph(rel).arcs
    for i, j in sorted(arrows):
        if i in rest and j in rest:
            clauses.append(Clause(ClauseKind.IMPLICATION, ((i, False), (j, True))))
    rest_sorted = sorted(rest)
    for size in range(1, len(rest_sorted) + 1):
        for subset in itertools.combinations(rest_sorted, size):
            clause = Clause(ClauseKind.NEGATIVE, tuple((i, False) for i in subset))
            if rel.bits & ~clause.mask(rel.arity) == 0:
                clauses.append(clause)
    return CanonicalDefinition(ones, zeroes, rest, tuple(clauses))


# ---------------------------------------------------------------- languages and formulas


@dataclass(frozen=True)
class Language:
    names: Tuple[str, ...]
    relations: Tuple[BooleanRelation, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise RelationError("relation names must be unique")
        if len(self.names) != len(self.relations):
            raise RelationError("names and relations differ in length")

    @staticmethod
    def of(items: Dict[str, BooleanRelation]) -> "Language":
        return Language(tuple(items), tuple(items.values()))

    def __getitem__(self, name: str) -> BooleanRelation:
        try:
            return self.relations[self.names.index(name)]
        except ValueError:
            raise KeyError(f"unknown relation {name!r}") from None

    def __iter__(self) -> Iterator[BooleanRelation]:
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    def items(self) -> List[Tuple[str, BooleanRelation]]:
        return list(zip(self.names, self.relations))


def dual_language(lang: Language) -> Language:
    return Language(lang.names, tuple(dual_relation(r) for r in lang.relations))


CRISP = None  # weight marker for constraints that may not be violated


@dataclass(frozen=True)
class Constraint:
    relation: BooleanRelation
    scope: Tuple[int, ...]
    weight: Optional[int] = 1  # None marks a crisp constraint
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.scope) != self.relation.arity:
            raise RelationError(f"scope {self.scope} does not match arity {self.relation.arity}")
        if self.weight is not None and self.weight < 0:
            raise RelationError("soft constraint weights must be non-negative")

    @property
    def crisp(self) -> bool:
        return self.weight is None

    def satisfied_by(self, values: Sequence[int]) -> bool:
        return self.relation.contains_values([values[v] for v in self.scope])


@dataclass(frozen=True)
class Formula:
    num_vars: int
    constraints: Tuple[Constraint, ...]
    budget_k: int = 0
    budget_W: Optional[int] = None

    def __post_init__(self) -> None:
        for c in self.constraints:
            for v in c.scope:
                if not 0 <= v < self.num_vars:
                    raise RelationError(f"variable {v} outside formula with {self.num_vars} variables")

    @property
    def weighted(self) -> bool:
        return self.budget_W is not None

    def soft(self) -> List[Constraint]:
        return [c for c in self.constraints if not c.crisp]

    def crisp_constraints(self) -> List[Constraint]:
        return [c for c in self.constraints if c.crisp]


@dataclass(frozen=True)
class Cost:
    violations: int
    weight: int
    crisp_ok: bool


def assignment_cost(formula: Formula, values: Sequence[int]) -> Cost:
    if len(values) != formula.num_vars:
        raise RelationError("assignment length does not match the formula")
    violations = weight = 0
    crisp_ok = True
    for c in formula.constraints:
        if c.satisfied_by(values):
            continue
        if c.crisp:
            crisp_ok = False
        else:
            violations += 1
            weight += c.weight
    return Cost(violations, weight, crisp_ok)


def within_budget(formula: Formula, cost: Cost) -> bool:
    if not cost.crisp_ok or cost.violations > formula.budget_k:
        return False
    return formula.budget_W is None or cost.weight <= formula.budget_W


def bits_to_values(bits: str) -> List[int]:
    return [int(c) for c in bits]


def values_to_bits(values: Sequence[int]) -> str:
    return "".join("1" if v else "0" for v in values)


# ---------------------------------------------------------------- search bookkeeping


class ResourceLimit(RuntimeError):
    """A branch-count or depth cap was hit; the search result is unknown, not NO."""


@dataclass
class SearchBudget:
    """Caps and counters shared by the branching solvers.

    ``max_branches`` bounds the number of branch nodes visited and ``max_depth`` the
    recursion depth; None disables a cap. ``trace`` collects one line per branch event
    when enabled.
    """

    max_branches: Optional[int] = 200_000
    max_depth: Optional[int] = None
    record_trace: bool = False
    branches: int = 0
    deepest: int = 0
    counters: Dict[str, int] = field(default_factory=dict)
    trace: List[str] = field(default_factory=list)

    def enter(self, depth: int) -> None:
        self.branches += 1
        self.deepest = max(self.deepest, depth)
        if self.max_branches is not None and self.branches > self.max_branches:
            raise ResourceLimit(f"branch cap of {self.max_branches} exceeded")
        if self.max_depth is not None and depth > self.max_depth:
            raise ResourceLimit(f"depth cap of {self.max_depth} exceeded")

    def bump(self, name: str, amount: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + amount

    def log(self, depth: int, message: str) -> None:
        if self.record_trace:
            self.trace.append("  " * depth + message)


class Status(enum.Enum):
    YES = "YES"
    NO = "NO"
    RESOURCE = "RESOURCE"


@dataclass(frozen=True)
class Outcome:
    """Verdict of a solver run. ``bundles`` lists the violated bundles of a YES answer."""

    status: Status
    cut: Optional[FrozenSet[int]] = None
    bundles: Optional[FrozenSet[int]] = None
    values: Optional[Tuple[int, ...]] = None
    message: str = ""

    @property
    def yes(self) -> bool:
        return self.status is Status.YES
