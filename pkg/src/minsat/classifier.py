"""Dichotomy verdicts for finite Boolean constraint languages."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from .core import (
    BIJUNCTIVE_KINDS,
    NEGATIVE_KINDS,
    POSITIVE_KINDS,
    SIGMA_DUAL_KINDS,
    SIGMA_KINDS,
    BooleanRelation,
    Language,
    arrow_graph,
    gaifman_graph,
    is_2k2_free,
    qfpp_definable,
)


class Complexity(enum.Enum):
    FPT = "FPT"
    W1_HARD = "W1Hard"


CASE_TAGS = ("1a", "1b", "1c", "1d", "2a", "2b", "HARD")


@dataclass(frozen=True)
class Verdict:
    case_tag: str
    weighted: Complexity
    unweighted: Complexity

    @staticmethod
    def for_tag(tag: str) -> "Verdict":
        if tag in ("1a", "1b", "1c", "1d"):
            return Verdict(tag, Complexity.FPT, Complexity.FPT)
        if tag in ("2a", "2b"):
            return Verdict(tag, Complexity.W1_HARD, Complexity.FPT)
        if tag == "HARD":
            return Verdict(tag, Complexity.W1_HARD, Complexity.W1_HARD)
        raise ValueError(f"unknown case tag {tag!r}")

    def line(self) -> str:
        return f"case={self.case_tag} weighted={self.weighted.value} unweighted={self.unweighted.value}"


def _relations(lang) -> List[BooleanRelation]:
    rels = list(lang) if not isinstance(lang, Language) else list(lang.relations)
    return [r for r in rels if not r.is_empty]


def is_zero_valid(rel: BooleanRelation) -> bool:
    return 0 in rel


def is_one_valid(rel: BooleanRelation) -> bool:
    return (rel.size - 1) in rel


def is_trivial_language(lang) -> Tuple[bool, str]:
    """Return (trivial, side) with side one of "both", "0-valid", "1-valid", "none"."""
    rels = _relations(lang)
    zero = all(is_zero_valid(r) for r in rels)
    one = all(is_one_valid(r) for r in rels)
    if zero and one:
        return True, "both"
    if zero:
        return True, "0-valid"
    if one:
        return True, "1-valid"
    return False, "none"


def in_delta(rel: BooleanRelation) -> bool:
    """Bijunctive with a 2K2-free Gaifman graph."""
    return qfpp_definable(rel, BIJUNCTIVE_KINDS) and is_2k2_free(gaifman_graph(rel))


def in_sigma(rel: BooleanRelation) -> bool:
    """Implications, negative clauses and assignments with a 2K2-free arrow graph."""
    return qfpp_definable(rel, SIGMA_KINDS) and is_2k2_free(arrow_graph(rel))


def in_sigma_dual(rel: BooleanRelation) -> bool:
    return qfpp_definable(rel, SIGMA_DUAL_KINDS) and is_2k2_free(arrow_graph(rel))


def classify_relations(rels: Iterable[BooleanRelation]) -> Verdict:
    rels = _relations(list(rels))
    if not rels or is_trivial_language(rels)[0]:
        return Verdict.for_tag("1a")
    if all(in_delta(r) for r in rels):
        return Verdict.for_tag("1b")
    if all(qfpp_definable(r, NEGATIVE_KINDS) for r in rels):
        return Verdict.for_tag("1c")
    if all(qfpp_definable(r, POSITIVE_KINDS) for r in rels):
        return Verdict.for_tag("1d")
    if all(in_sigma(r) for r in rels):
        return Verdict.for_tag("2a")
    if all(in_sigma_dual(r) for r in rels):
        return Verdict.for_tag("2b")
    return Verdict.for_tag("HARD")


def classify_language(lang) -> Verdict:
    """Evaluate the tractable cases in precedence order and return the first match.

    The empty language (after dropping empty relations) is tagged 1a.
    """
    return classify_relations(_relations(lang))
