from __future__ import annotations

import os
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsat.cli import (
    ParseError,
    dispatch,
    format_cut,
    format_formula,
    format_language,
    language_of,
    parse_cut,
    parse_formula,
    parse_language,
)
from minsat.core import EQ2, BooleanRelation, Language
from minsat.oracle import oracle_wminsat

import generators as gen

DATA = os.path.join(os.path.dirname(__file__), "data")


def test_parse_language_example():
    lang = parse_language("relation EQ2 2 00,11\n")
    assert lang["EQ2"] == EQ2


def test_parse_formula_example():
    lang = parse_language("relation EQ2 2 00,11\n")
    f = parse_formula("vars 3\nk 1\nc 3 EQ2 1 2\n", lang)
    c = f.constraints[0]
    assert (c.relation, c.scope, c.weight) == (EQ2, (0, 1), 3)
    assert f.budget_W is None


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("vars 2\nk 1\nc 1 FOO 1 2\n", 3, 5),
        ("vars 2\nc 1 EQ2 1 3\n", 2, 11),
        ("vars 2\nc 1 EQ2 1\n", 2, 5),
        ("k 1\n", 1, 1),
        ("vars two\n", 1, 6),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    lang = parse_language("relation EQ2 2 00,11\n")
    with pytest.raises(ParseError) as info:
        parse_formula(text, lang)
    assert (info.value.line, info.value.column) == (line, column)


def test_language_errors():
    with pytest.raises(ParseError):
        parse_language("relation A 2 0\n")
    with pytest.raises(ParseError):
        parse_language("relation A 1 0\nrelation A 1 1\n")
    assert parse_language("relation E 2 -\n")["E"].is_empty
    with pytest.raises(ParseError):
        parse_language("relation Z 0 -\n")


@st.composite
def languages(draw):
    count = draw(st.integers(1, 4))
    rels = {}
    for i in range(count):
        arity = draw(st.integers(1, 3))
        rels[f"R{i}"] = BooleanRelation(arity, draw(st.integers(0, (1 << (1 << arity)) - 1)))
    return Language.of(rels)


@given(languages())
def test_language_round_trip(lang):
    assert parse_language(format_language(lang)) == lang


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_formula_round_trip(seed):
    f = gen.delta_formula(random.Random(seed))
    lang = language_of(f)
    again = parse_formula(format_formula(f, lang, "x.lang"), lang)
    assert (again.num_vars, again.budget_k, again.budget_W) == (f.num_vars, f.budget_k, f.budget_W)
    assert [(c.relation, c.scope, c.weight) for c in again.constraints] == [(c.relation, c.scope, c.weight) for c in f.constraints]


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_cut_round_trip(seed):
    inst = gen.path_gdpc_instance(random.Random(seed))
    again = parse_cut(format_cut(inst)).instance
    assert (again.n, again.arcs, again.clauses, again.k, again.W) == (inst.n, inst.arcs, inst.clauses, inst.k, inst.W)
    assert dict(again.weights) == dict(inst.weights)


def test_classify_chain3(capsys):
    assert dispatch(["classify", os.path.join(DATA, "chain3.lang")]) == 0
    assert capsys.readouterr().out.strip() == "case=1b weighted=FPT unweighted=FPT"


def _write_formula(tmp_path, f):
    lang = language_of(f)
    (tmp_path / "f.lang").write_text(format_language(lang))
    path = tmp_path / "f.msat"
    path.write_text(format_formula(f, lang, "f.lang"))
    return str(path)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_solve_verify_and_exit_codes(tmp_path_factory, seed):
    tmp_path = tmp_path_factory.mktemp("cli")
    f = gen.delta_formula(random.Random(seed))
    path = _write_formula(tmp_path, f)
    want = oracle_wminsat(f) is not None
    for command in ("solve", "oracle"):
        code = dispatch([command, path])
        assert code == (0 if want else 1)
    if want:
        values = oracle_wminsat(f).values
        cert = tmp_path / "cert.txt"
        cert.write_text("YES " + "".join(map(str, values)) + "\n")
        assert dispatch(["verify", path, str(cert)]) == 0


def test_verify_rejects_wrong_length(tmp_path, capsys):
    f = gen.delta_formula(random.Random(1))
    path = _write_formula(tmp_path, f)
    cert = tmp_path / "cert.txt"
    cert.write_text("0\n")
    assert dispatch(["verify", path, str(cert)]) == 1
    assert "INVALID" in capsys.readouterr().out


def test_error_exits(tmp_path, capsys):
    assert dispatch(["classify", str(tmp_path / "missing.lang")]) == 2
    (tmp_path / "bad.lang").write_text("relation A 2 0\n")
    assert dispatch(["classify", str(tmp_path / "bad.lang")]) == 2
    assert dispatch(["classify", "--jobs", "2", os.path.join(DATA, "chain3.lang")]) == 2
    assert "error" in capsys.readouterr().err


def test_generate_and_refuse(tmp_path, capsys):
    prefix = str(tmp_path / "hard")
    assert dispatch(["generate", "gaifman-hard", "--parts", "1,1,1", "--density", "1", "--out", prefix]) == 0
    assert dispatch(["solve", prefix + ".msat"]) == 2
    assert "refused" in capsys.readouterr().err
    assert dispatch(["solve", "--force-oracle", prefix + ".msat"]) == 0


def test_reduce_then_solve(tmp_path, capsys):
    f = gen.delta_formula(random.Random(3))
    path = _write_formula(tmp_path, f)
    code = dispatch(["reduce", "gdpc", path])
    out = capsys.readouterr().out
    if code != 0:
        return
    red = tmp_path / "r.gdpc"
    red.write_text(out)
    assert dispatch(["solve", str(red)]) == dispatch(["oracle", str(red)])
