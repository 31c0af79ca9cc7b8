import random

import pytest
from hypothesis import given, settings, strategies as st

from toposlang.generate import FormulaGen
from toposlang.syntax import (
    App, Base, Bot, Comprehension, Eq, Exists, Forall, Implies, Member,
    Not, Pair, Power, Product, Rel, Signature, Star, Top, TypingError, Unit,
    Var, alpha_eq, app, fresh_name, fv, substitute, type_of,
)

from .helpers import rename_bound

A, B = Base("A"), Base("B")
SIG = Signature({"A", "B"}, {"f": (A, B), "g": (A, A)}, {"P": A, "Q": A, "S": Product(A, A)})
x, y, z = Var("x", A), Var("y", A), Var("z", A)


def test_star_has_unit_type():
    assert type_of(Star(), SIG) == Unit()


def test_comprehension_binds_its_variable():
    t = Comprehension("x", A, Eq(x, y))
    assert fv(t) == {("y", A)}
    assert t.type == Power(A)


def test_alpha_eq_renamed_binder():
    assert alpha_eq(Exists("x", A, Eq(x, y)), Exists("z", A, Eq(z, y)))
    assert not alpha_eq(Exists("x", A, Eq(x, y)), Exists("y", A, Eq(y, y)))


def test_substitution_avoids_capture():
    p = Exists("y", A, Eq(x, y))
    out = substitute(p, [(x, y)])
    assert isinstance(out, Exists)
    assert out.var != "y"
    assert fv(out) == {("y", A)}
    assert out.body == Eq(y, Var(out.var, A))


def test_fresh_name_is_minimal_suffix():
    assert fresh_name("y", {"y", "y1"}) == "y2"
    assert fresh_name("v3", set()) == "v1"


def test_substitution_is_simultaneous():
    p = Eq(x, y)
    assert substitute(p, [(x, y), (y, x)]) == Eq(y, x)


def test_substitution_type_mismatch():
    with pytest.raises(TypingError):
        substitute(Eq(x, y), [(x, Var("b", B))])


def test_repeated_binding_rejected():
    with pytest.raises(ValueError):
        substitute(Eq(x, y), [(x, y), (x, z)])


def test_ill_typed_construction():
    with pytest.raises(TypingError):
        Eq(x, Var("b", B))
    with pytest.raises(TypingError):
        Member(x, Var("s", Power(B)))
    with pytest.raises(TypingError):
        app(SIG, "f", Var("b", B))


def test_type_of_checks_signature():
    t = App("h", x, B)
    with pytest.raises(TypingError):
        type_of(t, SIG)
    assert type_of(Pair(app(SIG, "f", x), x), SIG) == Product(B, A)


def test_negation_shorthand():
    p = Rel("P", x)
    assert Not(p) == Implies(p, Bot())
    assert Not(Not(p)) == Implies(Implies(p, Bot()), Bot())


def test_substitution_under_unrelated_binder_untouched():
    p = Forall("y", A, Rel("S", Pair(x, y)))
    assert substitute(p, [(z, x)]) is p


# ---------------------------------------------------------------- properties

SCOPE = {"x": A, "y": A, "w": Product(A, A), "s": Power(A)}


def _formula(seed, depth=3):
    return FormulaGen(SIG, random.Random(seed)).formula(SCOPE, depth)


def _term(seed, tau=A, depth=2):
    return FormulaGen(SIG, random.Random(seed)).term(SCOPE, tau, depth)


seeds = st.integers(0, 10**6)


@settings(max_examples=150, deadline=None)
@given(seeds, seeds)
def test_substitution_preserves_types(s1, s2):
    t = _term(s1, Power(A), 3)
    u = _term(s2, A, 2)
    assert type_of(substitute(t, [(x, u)]), SIG) == type_of(t, SIG)


@settings(max_examples=150, deadline=None)
@given(seeds, seeds)
def test_free_variables_after_substitution(s1, s2):
    p = _formula(s1)
    u = _term(s2)
    q = substitute(p, [(x, u)])
    if ("x", A) in fv(p):
        assert fv(q) == (fv(p) - {("x", A)}) | fv(u)
    else:
        assert q == p




@settings(max_examples=150, deadline=None)
@given(seeds, seeds, seeds)
def test_alpha_eq_is_an_equivalence(s1, s2, s3):
    p, q, r = _formula(s1), _formula(s2), _formula(s3)
    assert alpha_eq(p, p)
    assert alpha_eq(p, q) == alpha_eq(q, p)
    if alpha_eq(p, q) and alpha_eq(q, r):
        assert alpha_eq(p, r)
    p2 = rename_bound(p, 0)
    assert alpha_eq(p, p2) and alpha_eq(p2, p)


@settings(max_examples=150, deadline=None)
@given(seeds, seeds)
def test_substitution_respects_alpha(s1, s2):
    p = _formula(s1)
    p2 = rename_bound(p, 0)
    u = _term(s2)
    assert alpha_eq(substitute(p, [(x, u)]), substitute(p2, [(x, u)]))


def test_top_is_closed():
    assert fv(Top()) == frozenset()
