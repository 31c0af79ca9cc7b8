import random

import pytest
from hypothesis import given, settings, strategies as st

from toposlang.context import Context
from toposlang.generate import FormulaGen
from toposlang.lemmas import LIBRARY_SIGNATURE, lemma_library
from toposlang.surface import (
    ParseError, parse_diagram, parse_formula, parse_lemmas, parse_proof, parse_term,
    parse_type, pretty, read, show_context, show_diagram, show_lemma, show_proof, show_signature,
)
from toposlang.syntax import (
    Base, Bot, CountableOr, Eq, Exists, Implies, Power, Product, Rel, Signature,
    TypingError, Var, alpha_eq,
)

A = Base("A")
SIG = Signature({"A", "B"}, {"g": (A, A), "f": (A, Base("B"))}, {"R": A, "S": Product(A, A)})


def test_reader_nests_and_skips_comments():
    forms = read("(a (b c)) ; note\n(d)")
    assert len(forms) == 2
    assert [str(x) for x in forms[0][1]] == ["b", "c"]


def test_unclosed_paren_reports_position():
    with pytest.raises(ParseError) as err:
        read("(eq x\n  (app g x)")
    assert (err.value.line, err.value.col) == (1, 1)


def test_stray_close_paren():
    with pytest.raises(ParseError) as err:
        read("top)")
    assert err.value.col == 4


def test_unbound_variable_position():
    with pytest.raises(ParseError) as err:
        parse_formula("(and top\n  (eq x y))", SIG, {"x": A})
    assert err.value.line == 2


def test_undeclared_relation():
    with pytest.raises((ParseError, TypingError)):
        parse_formula("(rel Nope x)", SIG, {"x": A})


def test_types():
    assert parse_type("(prod A (pow B))", SIG) == Product(A, Power(Base("B")))
    with pytest.raises((ParseError, TypingError)):
        parse_type("(pow C)", SIG)


def test_macros_expand():
    p = parse_formula("(not (rel R x))", SIG, {"x": A})
    assert p == Implies(Rel("R", Var("x", A)), Bot())
    t = parse_term("(sing x)", SIG, {"x": A})
    assert t.type == Power(A)


def test_binders_and_scope():
    p = parse_formula("(exists y A (eq x y))", SIG, {"x": A})
    assert p == Exists("y", A, Eq(Var("x", A), Var("y", A)))


def test_countable_disjunction_forms():
    p = parse_formula("(cor cycle (rel R x) bot)", SIG, {"x": A})
    assert isinstance(p, CountableOr) and p.period == 2
    q = parse_formula("(cor chain ((a A)) (app g a) a x y)", SIG, {"x": A, "y": A})
    assert q.bound == (("a", A),)
    assert alpha_eq(parse_formula(pretty(q), SIG, {"x": A, "y": A}), q)


def test_lemma_scripts_round_trip():
    lib = lemma_library()
    text = show_signature(LIBRARY_SIGNATURE) + "\n"
    for lemma in lib.values():
        text += show_lemma(lemma.name, lemma.statement, lemma.tree, lemma.hypotheses) + "\n"
    sig, scripts = parse_lemmas(text)
    assert [s.name for s in scripts] == list(lib)
    for script in scripts:
        lemma = lib[script.name]
        assert script.statement.matches(lemma.statement)
        again = parse_proof(read(show_proof(script.proof))[0], sig)
        assert again.conclusion.matches(script.proof.conclusion)
        assert again.size() == lemma.tree.size()


def test_diagram_round_trip():
    text = """(diagram (object A 0 1) (object B x y z)
                (morphism f A B (0 x) (1 z)))"""
    spec, env = parse_diagram(text)
    assert spec.objects == ("A", "B")
    spec2, env2 = parse_diagram(show_diagram(spec, env))
    assert spec2 == spec and env2.funs["f"] == env.funs["f"]


def test_bad_diagram_table():
    with pytest.raises((ParseError, ValueError)):
        parse_diagram("(diagram (object A 0) (object B x) (morphism f A B (0 q)))")


SCOPE = {"x": A, "w": Product(A, A)}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_formula_round_trip(seed):
    p = FormulaGen(SIG, random.Random(seed)).formula(SCOPE, 3)
    assert parse_formula(pretty(p), SIG, SCOPE) == p


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_term_round_trip(seed):
    t = FormulaGen(SIG, random.Random(seed)).term(SCOPE, Power(A), 3)
    assert parse_term(pretty(t), SIG, SCOPE) == t


def test_context_printing():
    assert show_context(Context([("x", A), ("w", Product(A, A))])) == "((x A) (w (prod A A)))"
