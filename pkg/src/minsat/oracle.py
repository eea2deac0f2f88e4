"""Exact reference solvers used as ground truth by the tests.

``oracle_minsat``/``oracle_wminsat`` enumerate every assignment. The ILP variants
solve the same question through an integer program and exist for formulas too large
to enumerate; they are cross-checked against enumeration on small inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import Formula, assignment_cost
from .flowaug import CutInstance, evaluate_cut, reachable

DEFAULT_MAX_VARS = 24
DEFAULT_MAX_BUNDLES = 64
_CHUNK = 1 << 18


class OracleCapError(RuntimeError):
    """The input exceeds the configured enumeration cap."""


@dataclass(frozen=True)
class OracleAnswer:
    values: Tuple[int, ...]
    violations: int
    weight: int


def _scan(formula: Formula, max_vars: int):
    """Yield (offsets, violations, weights, crisp_ok) numpy blocks over all assignments.

    Assignment index bits read left to right give the variable values.
    """
    n = formula.num_vars
    if n > max_vars:
        raise OracleCapError(f"{n} variables exceed the enumeration cap of {max_vars}")
    total = 1 << n
    tables = [
        np.array([(c.relation.bits >> t) & 1 for t in range(c.relation.size)], dtype=bool)
        for c in formula.constraints
    ]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        viol = np.zeros(idx.shape, dtype=np.int64)
        weight = np.zeros(idx.shape, dtype=object if _needs_bigint(formula) else np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for c, table in zip(formula.constraints, tables):
            t = np.zeros(idx.shape, dtype=np.int64)
            for v in c.scope:
                t = (t << 1) | ((idx >> (n - 1 - v)) & 1)
            sat = table[t] if c.relation.arity else np.full(idx.shape, bool(table[0]))
            if c.crisp:
                ok &= sat
            else:
                bad = ~sat
                viol += bad
                weight = weight + bad.astype(np.int64) * c.weight
        yield idx, viol, weight, ok


def _needs_bigint(formula: Formula) -> bool:
    return sum(c.weight for c in formula.soft()) >= 1 << 62


def _values(index: int, n: int) -> Tuple[int, ...]:
    return tuple((index >> (n - 1 - v)) & 1 for v in range(n))


def oracle_minsat(formula: Formula, k: Optional[int] = None, max_vars: int = DEFAULT_MAX_VARS) -> Optional[OracleAnswer]:
    """A minimum-violation assignment if it violates at most ``k`` soft constraints, else None."""
    k = formula.budget_k if k is None else k
    best = None
    for idx, viol, weight, ok in _scan(formula, max_vars):
        if not ok.any():
            continue
        cand = np.where(ok, viol, np.iinfo(np.int64).max)
        pos = int(np.argmin(cand))
        if best is None or cand[pos] < best[1]:
            best = (int(idx[pos]), int(cand[pos]), int(weight[pos]))
    if best is None or best[1] > k:
        return None
    return OracleAnswer(_values(best[0], formula.num_vars), best[1], best[2])


def oracle_wminsat(formula: Formula, k: Optional[int] = None, W: Optional[int] = None, max_vars: int = DEFAULT_MAX_VARS) -> Optional[OracleAnswer]:
    """A minimum-weight assignment among those violating at most ``k`` constraints, if its weight is at most ``W``."""
    k = formula.budget_k if k is None else k
    W = formula.budget_W if W is None else W
    best = None
    for idx, viol, weight, ok in _scan(formula, max_vars):
        mask = ok & (viol <= k)
        if not mask.any():
            continue
        positions = np.nonzero(mask)[0]
        ws = weight[positions]
        j = int(np.argmin(ws)) if ws.dtype != object else min(range(len(ws)), key=lambda q: ws[q])
        pos = int(positions[j])
        if best is None or weight[pos] < best[2]:
            best = (int(idx[pos]), int(viol[pos]), int(weight[pos]))
    if best is None or (W is not None and best[2] > W):
        return None
    return OracleAnswer(_values(best[0], formula.num_vars), best[1], best[2])


def solve_formula_oracle(formula: Formula, max_vars: int = DEFAULT_MAX_VARS) -> Optional[OracleAnswer]:
    """Dispatch on whether the formula carries a weight budget."""
    if formula.weighted:
        return oracle_wminsat(formula, max_vars=max_vars)
    return oracle_minsat(formula, max_vars=max_vars)


# ---------------------------------------------------------------- integer-programming route


def oracle_formula_ilp(formula: Formula) -> Optional[OracleAnswer]:
    """Exact answer through a 0/1 program: one column per variable and per soft constraint.

    Every forbidden tuple of a constraint yields a covering row; the violation column of
    a soft constraint relaxes all of its rows. Minimizes weight for weighted formulas and
    the violation count otherwise, subject to both budgets.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    n = formula.num_vars
    soft = [i for i, c in enumerate(formula.constraints) if not c.crisp]
    col = {ci: n + j for j, ci in enumerate(soft)}
    width = n + len(soft)
    rows: List[np.ndarray] = []
    lower: List[float] = []
    for ci, c in enumerate(formula.constraints):
        arity = c.relation.arity
        for t in range(c.relation.size):
            if t in c.relation:
                continue
            row = np.zeros(width)
            rhs = 1.0
            for pos, v in enumerate(c.scope):
                bit = (t >> (arity - 1 - pos)) & 1
                # literal "x_v differs from bit": x_v if bit == 0 else 1 - x_v
                if bit:
                    row[v] -= 1.0
                    rhs -= 1.0
                else:
                    row[v] += 1.0
            if ci in col:
                row[col[ci]] += 1.0
            if not row.any() and rhs > 0:
                return None  # a crisp constraint with an empty satisfying set
            rows.append(row)
            lower.append(rhs)
    constraints = []
    if rows:
        constraints.append(LinearConstraint(np.array(rows), np.array(lower), np.inf))
    budget = np.zeros(width)
    budget[n:] = 1.0
    constraints.append(LinearConstraint(budget.reshape(1, -1), -np.inf, formula.budget_k))
    weights = np.zeros(width)
    for ci in soft:
        weights[col[ci]] = formula.constraints[ci].weight
    if formula.budget_W is not None:
        constraints.append(LinearConstraint(weights.reshape(1, -1), -np.inf, formula.budget_W))
        objective = weights
    else:
        objective = budget
    res = milp(
        objective,
        constraints=constraints,
        integrality=np.ones(width),
        bounds=Bounds(0, 1),
    )
    if res.status != 0 or res.x is None:
        if res.status == 2:  # infeasible
            return None
        raise RuntimeError(f"integer program failed: {res.message}")
    values = tuple(int(round(x)) for x in res.x[:n])
    cost = assignment_cost(formula, values)
    return OracleAnswer(values, cost.violations, cost.weight)


# ---------------------------------------------------------------- cut problems


def _bundle_subsets(inst: CutInstance, max_bundles: int) -> Iterable[Tuple[int, ...]]:
    bundles = inst.bundle_ids()
    if len(bundles) > max_bundles:
        raise OracleCapError(f"{len(bundles)} bundles exceed the enumeration cap of {max_bundles}")
    for size in range(0, min(inst.k, len(bundles)) + 1):
        for subset in itertools.combinations(bundles, size):
            if inst.W is not None and sum(inst.weight(b) for b in subset) > inst.W:
                continue
            yield subset


def _subset_cut(inst: CutInstance, subset: Sequence[int]) -> Optional[frozenset]:
    """Delete every arc of the chosen bundles; return the induced cut if it is feasible.

    Deleting every arc of a chosen bundle minimizes the set reachable from s, so no other
    cut violating only these bundles satisfies more clauses.
    """
    chosen = set(subset)
    removed = [i for i, a in enumerate(inst.arcs) if a.bundle in chosen]
    side = reachable(inst.graph, removed)
    if inst.t in side:
        return None
    for members, b in inst.clauses:
        if b in chosen:
            continue
        if all(v in side for v in members):
            return None
    return frozenset(i for i in removed if inst.arcs[i].tail in side and inst.arcs[i].head not in side)


def oracle_cut(inst: CutInstance, max_bundles: int = DEFAULT_MAX_BUNDLES) -> Optional[frozenset]:
    """A feasible cut violating at most k bundles (and weight at most W), or None."""
    best = None
    for subset in _bundle_subsets(inst, max_bundles):
        z = _subset_cut(inst, subset)
        if z is None:
            continue
        ev = evaluate_cut(inst, z)
        key = (ev.weight, len(ev.violated))
        if best is None or key < best[0]:
            best = (key, z)
    return None if best is None else best[1]


def oracle_gdpc(inst: CutInstance, max_bundles: int = DEFAULT_MAX_BUNDLES) -> Optional[frozenset]:
    return oracle_cut(inst, max_bundles)


def oracle_clausecut(inst: CutInstance, max_bundles: int = DEFAULT_MAX_BUNDLES) -> Optional[frozenset]:
    return oracle_cut(inst, max_bundles)


def oracle_cut_arcs(inst: CutInstance, max_arcs: int = 16) -> Optional[frozenset]:
    """Enumerate raw soft-arc subsets; the slow reference for the bundle-subset oracle."""
    soft = [i for i, a in enumerate(inst.arcs) if a.soft]
    if len(soft) > max_arcs:
        raise OracleCapError(f"{len(soft)} soft arcs exceed the cap of {max_arcs}")
    best = None
    for size in range(len(soft) + 1):
        for z in itertools.combinations(soft, size):
            ev = evaluate_cut(inst, z)
            if not ev.feasible() or len(ev.violated) > inst.k:
                continue
            if inst.W is not None and ev.weight > inst.W:
                continue
            key = (ev.weight, len(ev.violated))
            if best is None or key < best[0]:
                best = (key, frozenset(z))
    return None if best is None else best[1]
