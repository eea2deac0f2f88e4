"""Pick a solver from the classifier verdict and certify its answer.

Case 1a is solved by a constant assignment, 1b by the GDPC pipeline, 1c and 1d by a
bounded search over deletions of unit-positive (resp. unit-negative) parts, 2a and 2b by
the clause cut pipeline on the formula or its dual. Everything else is refused unless
the oracle is forced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .classifier import Complexity, Verdict, classify_relations, is_zero_valid
from .clausecut import solve_minsat_sigma
from .core import (
    Constraint,
    Formula,
    Outcome,
    RelationError,
    ResourceLimit,
    SearchBudget,
    Status,
    assignment_cost,
    dual_relation,
    within_budget,
)
from .gdpc import solve_minsat_delta
from .oracle import DEFAULT_MAX_VARS, oracle_formula_ilp, oracle_minsat, oracle_wminsat


class RefusedError(RuntimeError):
    """The language is W[1]-hard for this problem variant and the oracle was not forced."""


@dataclass(frozen=True)
class Certified:
    """A solver verdict; a YES carries an assignment re-checked against the formula."""

    status: Status
    values: Optional[Tuple[int, ...]] = None
    violations: int = 0
    weight: int = 0
    route: str = ""
    message: str = ""

    @property
    def yes(self) -> bool:
        return self.status is Status.YES


def formula_verdict(formula: Formula) -> Verdict:
    return classify_relations(c.relation for c in formula.constraints)


def certify(formula: Formula, values: Sequence[int], route: str) -> Certified:
    cost = assignment_cost(formula, values)
    if not within_budget(formula, cost):
        raise AssertionError(f"{route} produced an assignment outside the budget")
    return Certified(Status.YES, tuple(values), cost.violations, cost.weight, route)


def dual_formula(formula: Formula) -> Formula:
    """Every relation replaced by its dual; assignments correspond by complement."""
    return Formula(
        formula.num_vars,
        tuple(Constraint(dual_relation(c.relation), c.scope, c.weight, c.name) for c in formula.constraints),
        formula.budget_k,
        formula.budget_W,
    )


# ---------------------------------------------------------------- cases 1c and 1d


def _forced_ones(c: Constraint) -> List[int]:
    """Variables set to 1 by every tuple of the constraint."""
    rel = c.relation
    out = []
    for i, v in enumerate(c.scope):
        if all(rel.value(t, i) for t in rel.tuples()):
            out.append(v)
    return out


def solve_minsat_negative(formula: Formula, budget: Optional[SearchBudget] = None) -> Outcome:
    """(Weighted) MinSAT over negative clauses and unit assignments.

    With the deletion set fixed, the kept constraints are satisfiable iff setting exactly
    the variables forced to 1 satisfies them. A kept constraint that fails there must be
    deleted itself or lose every forcer of one of its variables; branching on these
    options to depth k reaches a subset of every feasible deletion set, so the lightest
    leaf is optimal.
    """
    budget = budget if budget is not None else SearchBudget()
    forcers: Dict[int, List[int]] = {}
    for i, c in enumerate(formula.constraints):
        if c.relation.is_empty:
            continue
        for v in _forced_ones(c):
            forcers.setdefault(v, []).append(i)
    best: List[Optional[Tuple[int, FrozenSet[int]]]] = [None]

    def model(deleted: Set[int]) -> List[int]:
        values = [0] * formula.num_vars
        for v, cs in forcers.items():
            if any(i not in deleted for i in cs):
                values[v] = 1
        return values

    def search(deleted: Set[int], weight: int, depth: int) -> None:
        budget.enter(depth)
        if formula.budget_W is not None and weight > formula.budget_W:
            return
        if best[0] is not None and (formula.budget_W is None or weight >= best[0][0]):
            return
        values = model(deleted)
        bad = next(
            (i for i, c in enumerate(formula.constraints) if i not in deleted and not c.satisfied_by(values)),
            None,
        )
        if bad is None:
            best[0] = (weight, frozenset(deleted))
            return
        options: List[List[int]] = [[bad]]
        for v in sorted({v for v in formula.constraints[bad].scope if values[v]}):
            options.append(forcers[v])
        for extra in options:
            extra = [i for i in extra if i not in deleted]
            if any(formula.constraints[i].crisp for i in extra):
                continue
            if len(deleted) + len(extra) > formula.budget_k or not extra:
                continue
            added = sum(formula.constraints[i].weight for i in extra)
            search(deleted | set(extra), weight + added, depth + 1)

    try:
        search(set(), 0, 0)
    except ResourceLimit as exc:
        return Outcome(Status.RESOURCE, message=str(exc))
    if best[0] is None:
        return Outcome(Status.NO)
    return Outcome(Status.YES, values=tuple(model(set(best[0][1]))))


# ---------------------------------------------------------------- dispatch


def _constant_assignment(formula: Formula) -> Tuple[int, ...]:
    rels = [c.relation for c in formula.constraints if not c.relation.is_empty]
    bit = 0 if all(is_zero_valid(r) for r in rels) else 1
    return (bit,) * formula.num_vars


def _run_oracle(formula: Formula, max_vars: int) -> Optional[Tuple[int, ...]]:
    if formula.num_vars <= max_vars:
        ans = oracle_wminsat(formula, max_vars=max_vars) if formula.weighted else oracle_minsat(formula, max_vars=max_vars)
    else:
        ans = oracle_formula_ilp(formula)
    return None if ans is None else ans.values


def solve_formula(
    formula: Formula,
    budget: Optional[SearchBudget] = None,
    force_oracle: bool = False,
    max_vars: int = DEFAULT_MAX_VARS,
) -> Certified:
    """Classify the formula's relations, run the matching pipeline and certify a YES.

    Raises RefusedError when the verdict is W[1]-hard for this variant and
    ``force_oracle`` is off.
    """
    budget = budget if budget is not None else SearchBudget()
    if any(c.relation.is_empty and c.crisp for c in formula.constraints):
        return Certified(Status.NO, route="empty crisp relation")
    verdict = formula_verdict(formula)
    hard = (verdict.weighted if formula.weighted else verdict.unweighted) is Complexity.W1_HARD
    tag = verdict.case_tag
    if hard:
        if not force_oracle:
            raise RefusedError(
                f"case {tag}: {'Weighted ' if formula.weighted else ''}MinSAT over this language is W[1]-hard;"
                " rerun with --force-oracle for an exact exponential-time answer"
            )
        values = _run_oracle(formula, max_vars)
        route = "oracle"
    elif tag == "1a":
        values, route = _constant_assignment(formula), "constant"
        if not within_budget(formula, assignment_cost(formula, values)):
            values = None
    else:
        if tag == "1b":
            out, route = solve_minsat_delta(formula, budget), "gdpc"
        elif tag == "1c":
            out, route = solve_minsat_negative(formula, budget), "negative"
        elif tag == "1d":
            out, route = solve_minsat_negative(dual_formula(formula), budget), "negative-dual"
        elif tag == "2a":
            out, route = solve_minsat_sigma(formula, budget), "clausecut"
        elif tag == "2b":
            out, route = solve_minsat_sigma(dual_formula(formula), budget), "clausecut-dual"
        else:
            raise RelationError(f"no pipeline for case {tag}")
        if out.status is Status.RESOURCE:
            return Certified(Status.RESOURCE, route=route, message=out.message)
        values = out.values if out.yes else None
        if values is not None and route.endswith("-dual"):
            values = tuple(1 - v for v in values)
    if values is None:
        return Certified(Status.NO, route=route)
    return certify(formula, values, route)
