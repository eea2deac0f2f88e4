"""Text formats and the ``minsat`` command line.

Formats (``#`` starts a comment everywhere):

* ``.lang``: ``relation <NAME> <ARITY> <tuple,tuple,...>`` with bit-string tuples, first
  argument leftmost, arity at least 1; ``-`` stands for the empty relation.
* ``.msat``: ``lang <path>`` (relative to the formula file), ``vars <n>``, ``k <int>``,
  optional ``W <int>``, and ``c <weight|*> <REL> <v1> ... <vr>`` with 1-indexed variables.
* ``.gdpc`` / ``.ccut`` / ``.pcut``: ``v <n>``, ``s <id>``, ``t <id>``,
  ``arc <u> <v> [bundle <id>]``, ``clause [bundle <id>] <v1> ...``, ``bundle <id> weight <w>``,
  ``k <int>``, ``W <int>``; ``.pcut`` adds ``ell <int>``, ``pair <arc> <arc>`` and
  ``path <arc> ...``. Vertex and arc ids are 0-indexed, arcs numbered in file order.

Exit status: 0 on YES (or success), 1 on NO, 2 on errors and exhausted resources.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import hardness
from .classifier import classify_language
from .clausecut import ClauseCutInstance, reduce_minsat_to_clausecut, solve_clause_cut
from .core import (
    EQ2,
    IMPL,
    NAND2,
    NAND3,
    NEQ,
    OR2,
    R4,
    RCMC,
    REX,
    RMIX,
    RPRIME,
    UNARY0,
    UNARY1,
    BooleanRelation,
    Constraint,
    Formula,
    Language,
    RelationError,
    ResourceLimit,
    SearchBudget,
    Status,
    assignment_cost,
    bits_to_values,
    relation_from_tuples,
    values_to_bits,
    within_budget,
)
from .flowaug import Arc, CutDigraph, CutError, CutInstance, evaluate_cut
from .gdpc import (
    GdpcInstance,
    find_deletion_set,
    reduce_minsat_to_gdpc,
    satisfying_assignment,
    solve_gdpc,
    verify_bundles,
)
from .oracle import DEFAULT_MAX_VARS, OracleCapError, oracle_cut
from .pipeline import RefusedError, _run_oracle, certify, solve_formula

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2

NAMED_RELATIONS: Dict[str, BooleanRelation] = {
    "EQ2": EQ2,
    "NEQ": NEQ,
    "IMPL": IMPL,
    "NAND2": NAND2,
    "OR2": OR2,
    "UNARY0": UNARY0,
    "UNARY1": UNARY1,
    "R4": R4,
    "REX": REX,
    "RPRIME": RPRIME,
    "RCMC": RCMC,
    "RMIX": RMIX,
    "NAND3": NAND3,
}


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _lines(text: str):
    """Yield (line number, [(column, token), ...]) for every non-blank line."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            tokens.append((col + 1, part))
            col += len(part)
        if tokens:
            yield no, tokens


def _int(no: int, tok: Tuple[int, str], what: str) -> int:
    try:
        return int(tok[1])
    except ValueError:
        raise ParseError(no, tok[0], f"expected an integer {what}, found {tok[1]!r}") from None


def _need(no: int, tokens, count: int, usage: str) -> None:
    if len(tokens) < count:
        col = tokens[-1][0] + len(tokens[-1][1]) if tokens else 1
        raise ParseError(no, col, f"expected {usage}")


# ---------------------------------------------------------------- languages


def parse_language(text: str) -> Language:
    names: List[str] = []
    rels: List[BooleanRelation] = []
    for no, tokens in _lines(text):
        if tokens[0][1] != "relation":
            raise ParseError(no, tokens[0][0], f"unknown directive {tokens[0][1]!r}")
        _need(no, tokens, 4, "relation <NAME> <ARITY> <tuples>")
        if len(tokens) > 4:
            raise ParseError(no, tokens[4][0], "tuples must be one comma-separated field")
        name = tokens[1][1]
        arity = _int(no, tokens[2], "arity")
        if arity < 1:
            raise ParseError(no, tokens[2][0], "arity must be at least 1")
        field = tokens[3][1]
        tuples = [] if field == "-" else field.split(",")
        for tup in tuples:
            if len(tup) != arity or set(tup) - {"0", "1"}:
                raise ParseError(no, tokens[3][0], f"tuple {tup!r} is not a {arity}-bit string")
        if name in names:
            raise ParseError(no, tokens[1][0], f"relation {name!r} defined twice")
        try:
            rels.append(relation_from_tuples(arity, tuples))
        except RelationError as exc:
            raise ParseError(no, tokens[2][0], str(exc)) from None
        names.append(name)
    return Language(tuple(names), tuple(rels))


def format_language(lang: Language) -> str:
    out = []
    for name, rel in lang.items():
        if rel.arity < 1:
            raise RelationError(f"relation {name} has arity 0, which the file format cannot express")
        tuples = ",".join(rel.tuple_strings()) or "-"
        out.append(f"relation {name} {rel.arity} {tuples}")
    return "\n".join(out) + "\n"


def load_language(path: str) -> Language:
    with open(path) as fh:
        return parse_language(fh.read())


# ---------------------------------------------------------------- formulas


def formula_language_path(text: str) -> Optional[str]:
    for no, tokens in _lines(text):
        if tokens[0][1] == "lang":
            _need(no, tokens, 2, "lang <path>")
            return tokens[1][1]
    return None


def parse_formula(text: str, lang: Language) -> Formula:
    num_vars: Optional[int] = None
    k = 0
    W: Optional[int] = None
    constraints: List[Constraint] = []
    for no, tokens in _lines(text):
        key = tokens[0][1]
        if key == "lang":
            continue
        if key in ("vars", "k", "W"):
            _need(no, tokens, 2, f"{key} <int>")
            value = _int(no, tokens[1], key)
            if key == "vars":
                num_vars = value
            elif key == "k":
                k = value
            else:
                W = value
            continue
        if key != "c":
            raise ParseError(no, tokens[0][0], f"unknown directive {key!r}")
        _need(no, tokens, 3, "c <weight|*> <REL> <v1> ...")
        weight = None if tokens[1][1] == "*" else _int(no, tokens[1], "weight")
        try:
            rel = lang[tokens[2][1]]
        except KeyError:
            raise ParseError(no, tokens[2][0], f"unknown relation {tokens[2][1]!r}") from None
        scope = tuple(_int(no, tok, "variable") - 1 for tok in tokens[3:])
        if len(scope) != rel.arity:
            raise ParseError(no, tokens[2][0], f"{tokens[2][1]} has arity {rel.arity}, got {len(scope)} variables")
        for tok, v in zip(tokens[3:], scope):
            if v < 0 or (num_vars is not None and v >= num_vars):
                raise ParseError(no, tok[0], f"variable {v + 1} outside 1..{num_vars}")
        try:
            constraints.append(Constraint(rel, scope, weight, tokens[2][1]))
        except RelationError as exc:
            raise ParseError(no, tokens[1][0], str(exc)) from None
    if num_vars is None:
        raise ParseError(1, 1, "missing 'vars' line")
    return Formula(num_vars, tuple(constraints), k, W)


def _relation_name(lang: Language, rel: BooleanRelation) -> str:
    for name, r in lang.items():
        if r == rel:
            return name
    raise RelationError(f"relation {rel} is not in the language")


def format_formula(formula: Formula, lang: Language, lang_path: str) -> str:
    out = [f"lang {lang_path}", f"vars {formula.num_vars}", f"k {formula.budget_k}"]
    if formula.budget_W is not None:
        out.append(f"W {formula.budget_W}")
    for c in formula.constraints:
        weight = "*" if c.crisp else str(c.weight)
        vs = " ".join(str(v + 1) for v in c.scope)
        out.append(f"c {weight} {_relation_name(lang, c.relation)} {vs}".rstrip())
    return "\n".join(out) + "\n"


def load_formula(path: str) -> Tuple[Formula, Language]:
    with open(path) as fh:
        text = fh.read()
    lang_path = formula_language_path(text)
    if lang_path is None:
        raise ParseError(1, 1, "missing 'lang' line")
    lang = load_language(os.path.join(os.path.dirname(os.path.abspath(path)), lang_path))
    return parse_formula(text, lang), lang


def language_of(formula: Formula) -> Language:
    """Name every relation of the formula, preferring the built-in names."""
    names: Dict[str, BooleanRelation] = {}
    for c in formula.constraints:
        if c.relation in names.values():
            continue
        name = next((n for n, r in NAMED_RELATIONS.items() if r == c.relation), None)
        if name is None or name in names:
            name = f"REL{len(names)}"
        names[name] = c.relation
    return Language.of(names)


# ---------------------------------------------------------------- cut instances


@dataclass(frozen=True)
class CutFile:
    instance: CutInstance
    pairing: Tuple[Tuple[int, int], ...] = ()
    paths: Tuple[Tuple[int, ...], ...] = ()
    ell: Optional[int] = None


def parse_cut(text: str) -> CutFile:
    n = s = t = None
    k = 0
    W: Optional[int] = None
    ell: Optional[int] = None
    arcs: List[Arc] = []
    clauses: List[Tuple[Tuple[int, ...], Optional[int]]] = []
    weights: List[Tuple[int, int]] = []
    pairs: List[Tuple[int, int]] = []
    paths: List[Tuple[int, ...]] = []
    for no, tokens in _lines(text):
        key = tokens[0][1]
        vals = tokens[1:]
        if key in ("v", "s", "t", "k", "W", "ell"):
            _need(no, tokens, 2, f"{key} <int>")
            value = _int(no, tokens[1], key)
            if key == "v":
                n = value
            elif key == "s":
                s = value
            elif key == "t":
                t = value
            elif key == "k":
                k = value
            elif key == "W":
                W = value
            else:
                ell = value
        elif key == "arc":
            _need(no, tokens, 3, "arc <u> <v> [bundle <id>]")
            u, v = _int(no, tokens[1], "tail"), _int(no, tokens[2], "head")
            if len(tokens) == 3:
                arcs.append(Arc(u, v, False))
            elif len(tokens) == 5 and tokens[3][1] == "bundle":
                arcs.append(Arc(u, v, True, _int(no, tokens[4], "bundle")))
            elif len(tokens) == 4 and tokens[3][1] == "soft":
                arcs.append(Arc(u, v, True))
            else:
                raise ParseError(no, tokens[3][0], "expected 'bundle <id>'")
        elif key == "clause":
            bundle = None
            if len(vals) >= 2 and vals[0][1] == "bundle":
                bundle = _int(no, vals[1], "bundle")
                vals = vals[2:]
            if not vals:
                raise ParseError(no, tokens[-1][0], "a clause needs at least one vertex")
            clauses.append((tuple(_int(no, tok, "vertex") for tok in vals), bundle))
        elif key == "bundle":
            _need(no, tokens, 4, "bundle <id> weight <w>")
            if tokens[2][1] != "weight":
                raise ParseError(no, tokens[2][0], "expected 'weight'")
            weights.append((_int(no, tokens[1], "bundle"), _int(no, tokens[3], "weight")))
        elif key == "pair":
            _need(no, tokens, 3, "pair <arc> <arc>")
            pairs.append((_int(no, tokens[1], "arc"), _int(no, tokens[2], "arc")))
        elif key == "path":
            paths.append(tuple(_int(no, tok, "arc") for tok in vals))
        else:
            raise ParseError(no, tokens[0][0], f"unknown directive {key!r}")
    if n is None or s is None or t is None:
        raise ParseError(1, 1, "missing one of the 'v', 's', 't' lines")
    try:
        if ell is not None or pairs or paths:
            dag = CutDigraph(n, s, t, tuple(arcs))
            ell = len(paths) // 2 if ell is None else ell
            pc = hardness.PairedCutInstance(dag, ell, tuple(pairs), tuple(paths))
            inst = CutInstance(n, s, t, tuple(Arc(a.tail, a.head, True, i) for i, a in enumerate(arcs)), (), (), 2 * ell)
            return CutFile(inst, pc.pairing, pc.paths, ell)
        return CutFile(CutInstance(n, s, t, tuple(arcs), tuple(clauses), tuple(weights), k, W))
    except CutError as exc:
        raise ParseError(1, 1, str(exc)) from None


def format_cut(inst: CutInstance) -> str:
    out = [f"v {inst.n}", f"s {inst.s}", f"t {inst.t}"]
    for a in inst.arcs:
        out.append(f"arc {a.tail} {a.head}" + (f" bundle {a.bundle}" if a.bundle is not None else ""))
    for members, b in inst.clauses:
        out.append("clause" + (f" bundle {b}" if b is not None else "") + " " + " ".join(map(str, members)))
    for b, w in inst.weights:
        out.append(f"bundle {b} weight {w}")
    out.append(f"k {inst.k}")
    if inst.W is not None:
        out.append(f"W {inst.W}")
    return "\n".join(out) + "\n"


def format_paired_cut(pc: hardness.PairedCutInstance) -> str:
    g = pc.dag
    out = [f"v {g.n}", f"s {g.s}", f"t {g.t}", f"ell {pc.ell}"]
    out += [f"arc {a.tail} {a.head} soft" for a in g.arcs]
    out += [f"pair {x} {y}" for x, y in pc.pairing]
    out += ["path " + " ".join(map(str, p)) for p in pc.paths]
    return "\n".join(out) + "\n"


def load_paired_cut(path: str) -> hardness.PairedCutInstance:
    with open(path) as fh:
        cf = parse_cut(fh.read())
    if cf.ell is None:
        raise ParseError(1, 1, "not a paired cut instance")
    inst = cf.instance
    dag = CutDigraph(inst.n, inst.s, inst.t, tuple(Arc(a.tail, a.head) for a in inst.arcs))
    return hardness.PairedCutInstance(dag, cf.ell, cf.pairing, cf.paths)


# ---------------------------------------------------------------- commands


def _yes_line(values: Sequence[int], violations: int, weight: int) -> str:
    return f"YES cost={violations} weight={weight} assignment={values_to_bits(values)}"


def _budget(args) -> SearchBudget:
    return SearchBudget(max_branches=args.max_branches, record_trace=args.trace)


def _dump_trace(args, budget: SearchBudget) -> None:
    if args.trace:
        for line in budget.trace:
            print(line, file=sys.stderr)


def _kind(path: str) -> str:
    return os.path.splitext(path)[1].lstrip(".")


def cmd_classify(args) -> int:
    print(classify_language(load_language(args.lang)).line())
    return EXIT_YES


def _report_cut(inst: CutInstance, bundles) -> int:
    ev = evaluate_cut(inst, verify_bundles(inst, bundles).cut)
    ids = " ".join(map(str, sorted(ev.violated)))
    print(f"YES cost={len(ev.violated)} weight={ev.weight} bundles={ids}".rstrip())
    return EXIT_YES


def cmd_solve(args) -> int:
    kind = _kind(args.instance)
    budget = _budget(args)
    if kind in ("gdpc", "ccut"):
        with open(args.instance) as fh:
            inst = parse_cut(fh.read()).instance
        if kind == "gdpc":
            out = solve_gdpc(GdpcInstance.of(inst), budget)
        else:
            out = solve_clause_cut(ClauseCutInstance.of(inst), budget)
        _dump_trace(args, budget)
        if out.status is Status.RESOURCE:
            print(f"error: {out.message}", file=sys.stderr)
            return EXIT_ERROR
        if not out.yes or verify_bundles(inst, out.bundles) is None:
            print("NO")
            return EXIT_NO
        return _report_cut(inst, out.bundles)
    if kind == "pcut":
        return _solve_paired(args)
    formula, _ = load_formula(args.instance)
    try:
        res = solve_formula(formula, budget, force_oracle=args.force_oracle, max_vars=args.max_vars)
    except RefusedError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _dump_trace(args, budget)
    if args.trace:
        print(f"route={res.route}", file=sys.stderr)
    if res.status is Status.RESOURCE:
        print(f"error: resource limit: {res.message}", file=sys.stderr)
        return EXIT_ERROR
    if not res.yes:
        print("NO")
        return EXIT_NO
    print(_yes_line(res.values, res.violations, res.weight))
    return EXIT_YES


def _solve_paired(args) -> int:
    pc = load_paired_cut(args.instance)
    chosen = hardness.find_paired_cut(pc)
    if chosen is None:
        print("NO")
        return EXIT_NO
    print("YES pairs=" + " ".join(map(str, chosen)))
    return EXIT_YES


def cmd_oracle(args) -> int:
    kind = _kind(args.instance)
    if kind in ("gdpc", "ccut"):
        with open(args.instance) as fh:
            inst = parse_cut(fh.read()).instance
        z = oracle_cut(inst)
        if z is None:
            print("NO")
            return EXIT_NO
        return _report_cut(inst, evaluate_cut(inst, z).violated)
    if kind == "pcut":
        return _solve_paired(args)
    formula, _ = load_formula(args.instance)
    values = _run_oracle(formula, args.max_vars)
    if values is None:
        print("NO")
        return EXIT_NO
    res = certify(formula, values, "oracle")
    print(_yes_line(res.values, res.violations, res.weight))
    return EXIT_YES


def cmd_reduce(args) -> int:
    formula, _ = load_formula(args.instance)
    if args.target == "clausecut":
        red = reduce_minsat_to_clausecut(formula)
        if red is None:
            print("NO")
            return EXIT_NO
        sys.stdout.write(format_cut(red.instance))
        return EXIT_YES
    deletion = find_deletion_set(formula)
    if deletion is None:
        print("NO")
        return EXIT_NO
    pinned = sorted({v for i in deletion for v in formula.constraints[i].scope})
    alpha = satisfying_assignment(formula, deletion)
    branches = []
    for index in range(1 << len(pinned)):
        bits = [(index >> (len(pinned) - 1 - j)) & 1 for j in range(len(pinned))]
        red = reduce_minsat_to_gdpc(formula, deletion, dict(zip(pinned, bits)), alpha)
        if red is not None:
            branches.append((bits, red))
    if not branches:
        print("NO")
        return EXIT_NO
    if not 0 <= args.branch < len(branches):
        print(f"error: branch {args.branch} outside 0..{len(branches) - 1}", file=sys.stderr)
        return EXIT_ERROR
    bits, red = branches[args.branch]
    print(f"# branch {args.branch} of {len(branches)}; pinned variables {[v + 1 for v in pinned]} = {values_to_bits(bits)}")
    sys.stdout.write(format_cut(red.instance))
    return EXIT_YES


def _random_graph(args) -> hardness.MulticoloredGraph:
    rng = random.Random(args.seed)
    sizes = [int(x) for x in args.parts.split(",")]
    vertices = [(i, r) for i, n in enumerate(sizes) for r in range(n)]
    edges = [
        (u, v)
        for idx, u in enumerate(vertices)
        for v in vertices[idx + 1:]
        if u[0] != v[0] and rng.random() < args.density
    ]
    return hardness.MulticoloredGraph.build(sizes, edges)


def cmd_generate(args) -> int:
    if args.pcut:
        pc = load_paired_cut(args.pcut)
    else:
        pc = hardness.gen_paired_cut(_random_graph(args))
    if args.kind == "paired-cut":
        text = format_paired_cut(pc)
        if args.out:
            with open(args.out + ".pcut", "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_YES
    if args.kind == "gaifman-hard":
        hard = hardness.gen_gaifman_hard(pc, NAMED_RELATIONS[args.relation])
    elif args.kind == "arrow-hard":
        hard = hardness.gen_arrow_hard(pc, NAMED_RELATIONS[args.relation])
    else:
        hard = hardness.gen_weighted_hard(pc)
    prefix = args.out or "hard"
    lang = language_of(hard.formula)
    with open(prefix + ".lang", "w") as fh:
        fh.write(format_language(lang))
    with open(prefix + ".msat", "w") as fh:
        fh.write(format_formula(hard.formula, lang, os.path.basename(prefix) + ".lang"))
    print(f"wrote {prefix}.lang and {prefix}.msat (vars={hard.formula.num_vars} k={hard.k} W={hard.W})")
    return EXIT_YES


def _certificate_tokens(path: str) -> List[str]:
    with open(path) as fh:
        tokens = fh.read().split("#", 1)[0].split()
    out = []
    for tok in tokens:
        if "=" in tok:
            key, value = tok.split("=", 1)
            if key in ("assignment", "bundles", "pairs") and value:
                out.append(value)
        elif tok not in ("YES", "bundles", "pairs", "assignment"):
            out.append(tok)
    return out


def cmd_verify(args) -> int:
    kind = _kind(args.instance)
    tokens = _certificate_tokens(args.certificate)
    if kind in ("gdpc", "ccut"):
        with open(args.instance) as fh:
            inst = parse_cut(fh.read()).instance
        sol = verify_bundles(inst, [int(x) for x in tokens])
        if sol is None or set(int(x) for x in tokens) - set(inst.bundle_ids()):
            print("INVALID")
            return EXIT_NO
        ev = evaluate_cut(inst, sol.cut)
        print(f"VALID cost={len(ev.violated)} weight={ev.weight}")
        return EXIT_YES
    if kind == "pcut":
        pc = load_paired_cut(args.instance)
        chosen = [int(x) for x in tokens]
        ok = len(set(chosen)) <= pc.ell and all(0 <= i < len(pc.pairing) for i in chosen)
        if ok:
            from .flowaug import reachable

            ok = pc.dag.t not in reachable(pc.dag, hardness.paired_cut_from_pairs(pc, chosen))
        print("VALID" if ok else "INVALID")
        return EXIT_YES if ok else EXIT_NO
    formula, _ = load_formula(args.instance)
    if len(tokens) != 1 or set(tokens[0]) - {"0", "1"} or len(tokens[0]) != formula.num_vars:
        print("INVALID")
        return EXIT_NO
    cost = assignment_cost(formula, bits_to_values(tokens[0]))
    if not within_budget(formula, cost):
        print(f"INVALID cost={cost.violations} weight={cost.weight} crisp_ok={cost.crisp_ok}")
        return EXIT_NO
    print(f"VALID cost={cost.violations} weight={cost.weight}")
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for random generators")
    common.add_argument("--max-branches", type=int, default=200_000, help="branch cap for the solvers")
    common.add_argument("--max-vars", type=int, default=DEFAULT_MAX_VARS, help="enumeration cap for the oracle")
    common.add_argument("--jobs", type=int, default=1, help="worker count; only 1 is supported")
    common.add_argument("--trace", action="store_true", help="print branch events to stderr")
    common.add_argument("--force-oracle", action="store_true", help="answer W[1]-hard inputs by exhaustive search")

    parser = argparse.ArgumentParser(prog="minsat", description="Boolean MinSAT classifier, FPT solvers and oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="print the verdict for a .lang file")
    p.add_argument("lang")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", parents=[common], help="solve a .msat, .gdpc, .ccut or .pcut instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", parents=[common], help="answer an instance by exhaustive search")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("reduce", parents=[common], help="print the cut instance a formula reduces to")
    p.add_argument("target", choices=["gdpc", "clausecut"])
    p.add_argument("instance")
    p.add_argument("--branch", type=int, default=0, help="which pinned-variable branch to print (gdpc)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("generate", parents=[common], help="write a hard instance")
    p.add_argument("kind", choices=["paired-cut", "gaifman-hard", "arrow-hard", "weighted-hard"])
    p.add_argument("--parts", default="2,2,2", help="comma-separated part sizes of the random graph")
    p.add_argument("--density", type=float, default=0.6, help="edge probability between parts")
    p.add_argument("--pcut", help="encode this .pcut file instead of a random graph")
    p.add_argument("--relation", default="R4", choices=sorted(NAMED_RELATIONS), help="relation carrying the 2K2")
    p.add_argument("--out", help="output path prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate against an instance")
    p.add_argument("instance")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs != 1:
        print("error: parallel execution is not supported; use --jobs 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (ParseError, RelationError, CutError, OracleCapError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ResourceLimit as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(dispatch())
