import pytest

from toposlang.context import Context
from toposlang.lemmas import LIBRARY_SIGNATURE as SIG, and_el, ax, cut, forall_e, hyp, lemma_library, subst
from toposlang.sequents import ProofError, ProofTree, Rule, Sequent, check_node, check_tree, is_valid_tree
from toposlang.syntax import (
    And, Base, Comprehension, CountableOr, Eq, Exists, Forall, Member, Or, Pair,
    Product, Rel, Top, Var, app, substitute,
)

A = Base("A")
y, x = Var("y", A), Var("x", A)
D = Context([("y", A)])
P, Q, R = Rel("P", y), Rel("Q", y), Rel("R", y)


def test_axiom_accepts_identical_sides():
    assert check_tree(ax(D, P), SIG)


def test_axiom_rejects_different_sides():
    bad = ProofTree(Sequent(D, P, Q), Rule.Ax)
    with pytest.raises(ProofError):
        check_node(bad, SIG)


def test_cut_through_matching_formula():
    h1, h2 = Sequent(D, P, Q), Sequent(D, Q, R)
    tree = cut(hyp(h1), hyp(h2))
    assert check_tree(tree, SIG, [h1, h2])
    wrong = ProofTree(Sequent(D, P, R), Rule.Cut, {}, (hyp(h1), hyp(Sequent(D, R, R))))
    assert not is_valid_tree(wrong, SIG, [h1, Sequent(D, R, R)])


def test_and_intro_needs_two_premises():
    h = Sequent(D, P, Q)
    bad = ProofTree(Sequent(D, P, And(Q, Q)), Rule.AndI, {}, (hyp(h),))
    with pytest.raises(ProofError, match="premise"):
        check_node(bad, SIG, [h])


def test_and_elimination():
    h = Sequent(D, P, And(Q, R))
    assert check_tree(and_el(hyp(h)), SIG, [h])


def test_forall_elim_with_wrong_body_rejected():
    S = Rel("S", Pair(x, y))
    good = forall_e(ax(D, Forall("x", A, S)))
    assert check_tree(good, SIG)
    c = good.conclusion
    bad = ProofTree(Sequent(c.context, c.lhs, Rel("T", Pair(x, y))), Rule.ForallE, {}, good.premises)
    assert not is_valid_tree(bad, SIG)


def test_context_must_cover_free_variables():
    bad = ax(Context(), P)
    with pytest.raises(ProofError, match="context"):
        check_tree(bad, SIG)


def test_context_permutation_allowed():
    D2 = Context([("x", A), ("y", A)])
    S = Rel("S", Pair(x, y))
    h = Sequent(Context([("y", A), ("x", A)]), S, S)
    tree = ProofTree(Sequent(D2, S, S), Rule.Cut, {}, (hyp(h), ax(D2, S)))
    assert check_tree(tree, SIG, [h])


def test_hypothesis_leaf_must_be_declared():
    assert not is_valid_tree(hyp(Sequent(D, P, Q)), SIG)


def test_identity_substitution_is_alpha_identity():
    tree = ax(D, Exists("x", A, Rel("S", Pair(x, y))))
    assert check_tree(subst(tree, [], D), SIG)
    renamed = Exists("w", A, Rel("S", Pair(Var("w", A), y)))
    same = ProofTree(Sequent(D, renamed, renamed), Rule.Subst, {"bindings": []}, (tree,))
    assert check_tree(same, SIG)
    other = ProofTree(Sequent(D, P, P), Rule.Subst, {"bindings": []}, (tree,))
    assert not is_valid_tree(other, SIG)


def test_substitution_rule_moves_into_new_context():
    z = Var("z", A)
    Dz = Context([("z", A)])
    fz = app(SIG, "f", z)
    tree = subst(ax(D, P), [(y, fz)], Dz)
    assert check_tree(tree, SIG)
    assert tree.conclusion.lhs == substitute(P, [(y, fz)])


def test_bigor_round_trip_on_constant_family():
    cor = CountableOr("const", (), (P,))
    h = Sequent(D, cor, Q)
    elim = ProofTree(Sequent(D, P, Q), Rule.BigOrE, {"index": 3}, (hyp(h),))
    assert check_tree(elim, SIG, [h])
    intro = ProofTree(Sequent(D, cor, Q), Rule.BigOrI, {"certificate": 0}, (elim,))
    assert check_tree(intro, SIG, [h])
    assert intro.conclusion.matches(h)


def test_bigor_intro_covers_whole_period():
    cor = CountableOr("cycle", (), (P, Q))
    leaf = Sequent(D, P, Or(P, Q))
    short = ProofTree(Sequent(D, cor, Or(P, Q)), Rule.BigOrI, {"certificate": 0}, (hyp(leaf),))
    assert not is_valid_tree(short, SIG, [leaf])


def test_membership_rule():
    comp = Comprehension("x", A, Rel("S", Pair(x, y)))
    plain = Sequent(D, P, Rel("S", Pair(y, y)))
    tree = ProofTree(Sequent(D, P, Member(y, comp)), Rule.Mem2, {}, (hyp(plain),))
    assert check_tree(tree, SIG, [plain])


def test_surjective_pairing_leaf():
    B = Base("B")
    sig = SIG.merged(type(SIG)({"B"}))
    z = Var("z", Product(A, B))
    a, b = Var("a", A), Var("b", B)
    good = Sequent(Context([("z", z.type)]), Top(), Exists("a", A, Exists("b", B, Eq(z, Pair(a, b)))))
    assert check_tree(ProofTree(good, Rule.Derived, {"name": "surjective_pairing"}), sig)
    bad = Sequent(good.context, Top(), Exists("b", B, Exists("a", A, Eq(z, Pair(a, b)))))
    assert not is_valid_tree(ProofTree(bad, Rule.Derived, {"name": "surjective_pairing"}), sig)
    unknown = ProofTree(good, Rule.Derived, {"name": "no_such_rule"})
    assert not is_valid_tree(unknown, sig)


def test_checking_is_deterministic():
    for lemma in lemma_library().values():
        first = is_valid_tree(lemma.tree, SIG, lemma.hypotheses)
        assert first == is_valid_tree(lemma.tree, SIG, lemma.hypotheses) is True
