import random
from itertools import product as cartesian

import pytest
from hypothesis import given, settings, strategies as st

from toposlang import finset as fs
from toposlang.colimits import pushforward_term, union_term
from toposlang.context import Context
from toposlang.derived import ensure_validated, environments
from toposlang.generate import FormulaGen, random_environment
from toposlang.interpret import (
    Environment, interp_formula, interp_term, interp_type, semantic_entails,
    validate_substitution_lemma,
)
from toposlang.syntax import (
    Base, Comprehension, CountableOr, Eq, Member, Omega, Or, Pair, Power,
    Product, Rel, Signature, Top, Unit, Var, app, singleton,
)

from .helpers import rename_bound

A, B = Base("A"), Base("B")
x, y = Var("x", A), Var("y", A)
SIG = Signature({"A"}, {}, {"R": A, "S": A})


def env3(r=(0,), s=(1, 2)):
    return Environment(SIG, {"A": range(3)}, rels={"R": r, "S": s})


def test_types():
    env = env3()
    assert len(interp_type(Unit(), env)) == 1
    assert interp_type(Omega(), env) == fs.omega()
    assert len(interp_type(Product(A, Power(A)), env)) == 3 * 8


def test_top_is_full():
    env = env3()
    ctx = Context([("x", A)])
    assert interp_formula(ctx, Top(), env) == fs.top(env.base["A"])


def test_equality_is_diagonal():
    env = env3()
    ctx = Context([("x", A), ("y", A)])
    sub = interp_formula(ctx, Eq(x, y), env)
    assert sub.subset == {(i, i) for i in range(3)}


def test_variable_is_identity():
    env = env3()
    m = interp_term(Context([("x", A)]), x, env)
    assert m == fs.identity(env.base["A"])


def test_comprehension_of_top_is_constantly_full():
    env = env3()
    m = interp_term(Context([("y", A)]), Comprehension("x", A, Top()), env)
    assert set(m.table.values()) == {frozenset(range(3))}


def test_singleton_map():
    env = env3()
    m = interp_term(Context([("x", A)]), singleton(x), env)
    assert m.table == {e: frozenset([e]) for e in range(3)}


def test_closed_formulas_live_over_a_point():
    env = env3()
    from toposlang.syntax import Exists
    sub = interp_formula(Context(), Exists("x", A, Rel("R", x)), env)
    assert len(sub.ambient) == 1 and len(sub) == 1


def test_membership_in_arbitrary_power_term():
    env = env3()
    s = Var("s", Power(A))
    ctx = Context([("x", A), ("s", Power(A))])
    sub = interp_formula(ctx, Member(x, s), env)
    assert sub.subset == {(e, t) for e in range(3) for t in fs.power(env.base["A"]) if e in t}


def test_identity_substitution_lemma():
    env = env3()
    ctx = Context([("x", A)])
    q = Or(Rel("R", x), Rel("S", x))
    assert validate_substitution_lemma(ctx, [(x, x)], q, env) == interp_formula(ctx, q, env)


def test_reflexive_equation_full_under_substitution():
    env = env3()
    b = Var("b", A)
    ctx = Context([("x", A), ("y", A)])
    sub = validate_substitution_lemma(ctx, [(b, y)], Eq(b, b), env)
    assert sub == fs.top(sub.ambient)


def test_entailment_into_disjunction_exhaustive():
    ctx = Context([("x", A)])
    for n in range(4):
        for env in environments(SIG, {"A": n}):
            assert semantic_entails(ctx, Rel("R", x), Or(Rel("R", x), Rel("S", x)), env)


def test_countable_disjunction_of_constant_family():
    env = env3()
    ctx = Context([("x", A)])
    cor = CountableOr("cycle", (), (Rel("R", x), Rel("S", x)))
    assert interp_formula(ctx, cor, env).subset == {0, 1, 2}


def test_union_and_pushforward_terms_are_set_operations():
    sig = Signature({"A", "B"}, {"f": (A, B)})
    z1, z2 = Var("z1", Power(A)), Var("z2", Power(A))
    ctx = Context([("z1", Power(A)), ("z2", Power(A))])
    for n, m in cartesian(range(4), range(1, 4)):
        for values in cartesian(range(m), repeat=n):
            env = Environment(sig, {"A": range(n), "B": range(m)}, {"f": dict(enumerate(values))})
            u = interp_term(ctx, union_term(z1, z2), env)
            assert all(u.table[(s, t)] == s | t for s, t in u.dom)
            push = interp_term(Context([("z1", Power(A))]), pushforward_term(sig, "f", z1), env)
            assert all(push.table[s] == frozenset(values[i] for i in s) for s in push.dom)
            if n == m == 1:
                break


def test_weakening_coherence():
    env = env3()
    p = Or(Rel("R", x), Rel("S", x))
    small, big = Context([("x", A)]), Context([("x", A), ("w", A)])
    narrow, wide = interp_formula(small, p, env), interp_formula(big, p, env)
    _, p1, _ = fs.product(env.base["A"], env.base["A"])
    assert fs.inv_image(p1, narrow) == wide


@pytest.mark.parametrize("rule", ["Mem1", "Mem2", "SetI", "SetE", "BigOrI", "BigOrE", "surjective_pairing"])
def test_derived_rules_validate(rule):
    assert ensure_validated(rule) > 0


# ---------------------------------------------------------------- properties

GEN_SIG = Signature({"A"}, {"g": (A, A)}, {"R": A, "S": Product(A, A)})
SCOPE = {"x": A, "w": Product(A, A)}
CTX = Context(SCOPE.items())


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_both_interpreters_agree(seed, n):
    rng = random.Random(seed)
    p = FormulaGen(GEN_SIG, rng).formula(SCOPE, 3)
    env = random_environment(GEN_SIG, {"A": n}, rng)
    assert interp_formula(CTX, p, env, "categorical") == interp_formula(CTX, p, env, "pointwise")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_substitution_lemma_random(seed):
    rng = random.Random(seed)
    gen = FormulaGen(GEN_SIG, rng)
    q = gen.formula({"x": A, "y": A}, 2)
    env = random_environment(GEN_SIG, {"A": 3}, rng)
    ctx = Context([("u", A), ("v", Product(A, A))])
    scope = dict(ctx)
    t1, t2 = gen.term(scope, A, 2), gen.term(scope, A, 2)
    bindings = [(x, t1), (y, t2)]
    for method in ("categorical", "pointwise"):
        validate_substitution_lemma(ctx, bindings, q, env, method)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_alpha_invariance(seed):
    rng = random.Random(seed)
    p = FormulaGen(GEN_SIG, rng).formula(SCOPE, 3)
    env = random_environment(GEN_SIG, {"A": 2}, rng)
    assert interp_formula(CTX, p, env) == interp_formula(CTX, rename_bound(p, 0), env)


def test_application_uses_tables():
    sig = Signature({"A", "B"}, {"f": (A, B)})
    env = Environment(sig, {"A": range(3), "B": "pq"}, {"f": {0: "p", 1: "q", 2: "p"}})
    m = interp_term(Context([("x", A)]), app(sig, "f", x), env)
    assert m.table == {0: "p", 1: "q", 2: "p"}
    pair = interp_term(Context([("x", A)]), Pair(x, app(sig, "f", x)), env)
    assert pair.table[1] == (1, "q")
