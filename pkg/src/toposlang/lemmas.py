"""Helper lemmas of the sequent calculus as explicit proof trees.

Metavariables are instantiated with relation atoms over a base type A:
p, q, r are P(y), Q(y), R(y) in the context y:A, and formulas that must
mention a bound variable x use the binary relations S, T on A x A.
Lemmas of the form "if sequent H then sequent C" carry H as a hypothesis
and use Hyp leaves for it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .context import Context
from .sequents import ProofTree, Rule, Sequent, check_tree
from .syntax import (
    And, Base, Bot, Eq, Exists, Forall, Implies, Not, Or, Pair, Product, Rel,
    Signature, Top, Var, all_names, app, conj, fresh_name, substitute,
)

# ---------------------------------------------------------------- tree builders


def ax(ctx: Context, p) -> ProofTree:
    return ProofTree(Sequent(ctx, p, p), Rule.Ax)


def hyp(seq: Sequent) -> ProofTree:
    return ProofTree(seq, Rule.Hyp)


def top_r(ctx: Context, p) -> ProofTree:
    return ProofTree(Sequent(ctx, p, Top()), Rule.TopR)


def bot_l(ctx: Context, q) -> ProofTree:
    return ProofTree(Sequent(ctx, Bot(), q), Rule.BotL)


def eq_i(ctx: Context, t) -> ProofTree:
    return ProofTree(Sequent(ctx, Top(), Eq(t, t)), Rule.EqI)


def eq_e(ctx: Context, equations, p, reverse: bool = False) -> ProofTree:
    """x1=y1 & ... & p |- p[x:=y], or p[y:=x] when reverse."""
    lhs = conj(*(Eq(a, b) for a, b in equations), p)
    bindings = [(b, a) if reverse else (a, b) for a, b in equations]
    return ProofTree(Sequent(ctx, lhs, substitute(p, bindings)), Rule.EqE)


def cut(first: ProofTree, second: ProofTree) -> ProofTree:
    a, b = first.conclusion, second.conclusion
    return ProofTree(Sequent(a.context, a.lhs, b.rhs), Rule.Cut, {"cut": a.rhs}, (first, second))


def subst(tree: ProofTree, bindings, ctx: Context) -> ProofTree:
    c = tree.conclusion
    bindings = list(bindings)
    seq = Sequent(ctx, substitute(c.lhs, bindings), substitute(c.rhs, bindings))
    return ProofTree(seq, Rule.Subst, {"bindings": bindings}, (tree,))


def and_i(left: ProofTree, right: ProofTree) -> ProofTree:
    a, b = left.conclusion, right.conclusion
    return ProofTree(Sequent(a.context, a.lhs, And(a.rhs, b.rhs)), Rule.AndI, {}, (left, right))


def and_el(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    return ProofTree(Sequent(c.context, c.lhs, c.rhs.left), Rule.AndEL, {}, (tree,))


def and_er(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    return ProofTree(Sequent(c.context, c.lhs, c.rhs.right), Rule.AndER, {}, (tree,))


def or_i(left: ProofTree, right: ProofTree) -> ProofTree:
    a, b = left.conclusion, right.conclusion
    return ProofTree(Sequent(a.context, Or(a.lhs, b.lhs), a.rhs), Rule.OrI, {}, (left, right))


def or_el(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    return ProofTree(Sequent(c.context, c.lhs.left, c.rhs), Rule.OrEL, {}, (tree,))


def or_er(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    return ProofTree(Sequent(c.context, c.lhs.right, c.rhs), Rule.OrER, {}, (tree,))


def imp_i(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    seq = Sequent(c.context, c.lhs.left, Implies(c.lhs.right, c.rhs))
    return ProofTree(seq, Rule.ImpI, {}, (tree,))


def imp_e(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    seq = Sequent(c.context, And(c.lhs, c.rhs.left), c.rhs.right)
    return ProofTree(seq, Rule.ImpE, {}, (tree,))


def forall_i(tree: ProofTree, x: str) -> ProofTree:
    c = tree.conclusion
    tau = c.context.type_of(x)
    seq = Sequent(c.context.drop(x), c.lhs, Forall(x, tau, c.rhs))
    return ProofTree(seq, Rule.ForallI, {}, (tree,))


def forall_e(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    q = c.rhs
    seq = Sequent(c.context.append(q.var, q.var_type), c.lhs, q.body)
    return ProofTree(seq, Rule.ForallE, {}, (tree,))


def exists_i(tree: ProofTree, x: str) -> ProofTree:
    c = tree.conclusion
    tau = c.context.type_of(x)
    seq = Sequent(c.context.drop(x), Exists(x, tau, c.lhs), c.rhs)
    return ProofTree(seq, Rule.ExistsI, {}, (tree,))


def exists_e(tree: ProofTree) -> ProofTree:
    c = tree.conclusion
    p = c.lhs
    seq = Sequent(c.context.prepend(p.var, p.var_type), p.body, c.rhs)
    return ProofTree(seq, Rule.ExistsE, {}, (tree,))


# ---------------------------------------------------------------- reusable derivations


def swap_conj(tree: ProofTree) -> ProofTree:
    """From a & b |- r derive b & a |- r."""
    c = tree.conclusion
    a, b = c.lhs.left, c.lhs.right
    flipped = ax(c.context, And(b, a))
    return cut(and_i(and_er(flipped), and_el(flipped)), tree)


def weaken_right(tree: ProofTree, r) -> ProofTree:
    """From p |- q derive p & r |- q."""
    c = tree.conclusion
    step = imp_i(ax(c.context, And(c.rhs, r)))
    return and_el(imp_e(cut(tree, step)))


def double_negation(ctx: Context, p) -> ProofTree:
    """p |- not not p."""
    both = ax(ctx, And(p, Not(p)))
    flipped = and_i(and_er(both), and_el(both))
    contradiction = imp_e(ax(ctx, Not(p)))
    return imp_i(cut(flipped, contradiction))


def not_and(ctx: Context, q, p) -> ProofTree:
    """not q |- not (q & p)."""
    lhs = And(Not(q), And(q, p))
    a = ax(ctx, lhs)
    both = and_i(and_el(a), and_el(and_er(a)))
    return imp_i(cut(both, imp_e(ax(ctx, Not(q)))))


def distribute(ctx: Context, p, q, r) -> ProofTree:
    """p & (q | r) |- (p & q) | (p & r)."""
    d = Or(And(p, q), And(p, r))
    from_q = imp_i(swap_conj(or_el(ax(ctx, d))))
    from_r = imp_i(swap_conj(or_er(ax(ctx, d))))
    return swap_conj(imp_e(or_i(from_q, from_r)))


def disjunctive_syllogism(ctx: Context, p, q) -> ProofTree:
    """(p | q) & not q |- p."""
    nq = Not(q)
    start = ax(ctx, And(Or(p, q), nq))
    reorder = and_i(and_er(start), and_el(start))
    kept = and_er(ax(ctx, And(nq, p)))
    absurd = cut(imp_e(ax(ctx, nq)), bot_l(ctx, p))
    return cut(cut(reorder, distribute(ctx, nq, p, q)), or_i(kept, absurd))


def exists_and_out(ctx: Context, x: str, tau, p, q) -> ProofTree:
    """(exists x p) & q |- exists x (p & q), x not free in q."""
    goal = Exists(x, tau, And(p, q))
    inner = imp_i(exists_e(ax(ctx, goal)))
    return imp_e(exists_i(inner, x))


def exists_and_in(ctx: Context, x: str, tau, p, q) -> ProofTree:
    """exists x (p & q) |- (exists x p) & q, x not free in q."""
    goal = And(Exists(x, tau, p), q)
    inner = exists_e(imp_i(ax(ctx, goal)))
    return exists_i(imp_e(inner), x)


def variable_sub_forward(premise: ProofTree, x: str, t) -> ProofTree:
    """From x = t |-[D, x] s derive top |-[D] s[x := t]."""
    c = premise.conclusion
    ctx = c.context.drop(x)
    xv = Var(x, c.context.type_of(x))
    instantiated = subst(premise, [(xv, t)], ctx)
    return cut(eq_i(ctx, t), instantiated)


def variable_sub_backward(premise: ProofTree, x: str, tau, t, s) -> ProofTree:
    """From top |-[D] s[x := t] derive x = t |-[D, x] s."""
    ctx = premise.conclusion.context
    wide = ctx.append(x, tau)
    xv = Var(x, tau)
    avoid = set(wide.names()) | all_names(s) | all_names(t)
    x2 = Var(fresh_name(x, avoid), tau)
    widest = wide.append(x2.name, tau)
    s_x2 = substitute(s, [(xv, x2)])
    elim = eq_e(widest, [(xv, x2)], s_x2, reverse=True)
    placed = subst(elim, [(x2, t)], wide)
    moved = imp_i(swap_conj(placed))
    weakened = subst(premise, [], wide)
    impl = imp_e(cut(weakened, moved))
    eq = Eq(xv, t)
    add_top = and_i(top_r(wide, eq), ax(wide, eq))
    return cut(add_top, impl)


def witness_tree(ctx: Context, x: str, tau, p, t) -> ProofTree:
    """p[x := t] |-[D] exists x p."""
    e = exists_e(ax(ctx, Exists(x, tau, p)))
    return subst(e, [(Var(x, tau), t)], ctx)


# ---------------------------------------------------------------- the library

A = Base("A")
AA = Product(A, A)
LIBRARY_SIGNATURE = Signature(
    {"A"},
    {"f": (A, A)},
    {"P": A, "Q": A, "R": A, "S": AA, "T": AA},
)


@dataclass(frozen=True)
class Lemma:
    name: str
    statement: Sequent
    tree: ProofTree
    hypotheses: tuple = ()

    def check(self, sig: Signature = LIBRARY_SIGNATURE) -> bool:
        check_tree(self.tree, sig, self.hypotheses)
        if not self.tree.conclusion.matches(self.statement):
            raise ValueError(f"{self.name}: tree proves {self.tree.conclusion}, not {self.statement}")
        return True


def lemma_library() -> dict:
    y, x = Var("y", A), Var("x", A)
    D = Context([("y", A)])
    Dx = D.append("x", A)
    p, q, r = Rel("P", y), Rel("Q", y), Rel("R", y)
    s_xy, t_xy = Rel("S", Pair(x, y)), Rel("T", Pair(x, y))
    fy = app(LIBRARY_SIGNATURE, "f", y)
    lib = {}

    def add(name, statement, tree, hypotheses=()):
        lib[name] = Lemma(name, statement, tree, tuple(hypotheses))

    h = Sequent(D, And(p, q), r)
    add("and_commute_hypothesis", Sequent(D, And(q, p), r), swap_conj(hyp(h)), [h])
    h = Sequent(D, And(q, p), r)
    add("and_commute_hypothesis_converse", Sequent(D, And(p, q), r), swap_conj(hyp(h)), [h])

    add("double_negation_intro", Sequent(D, p, Not(Not(p))), double_negation(D, p))

    h = Sequent(D, p, q)
    add("strengthen_antecedent", Sequent(D, And(p, r), q), weaken_right(hyp(h), r), [h])

    add("negated_conjunction", Sequent(D, Not(q), Not(And(q, p))), not_and(D, q, p))

    add(
        "distribute_and_over_or",
        Sequent(D, And(p, Or(q, r)), Or(And(p, q), And(p, r))),
        distribute(D, p, q, r),
    )

    add("disjunctive_syllogism", Sequent(D, And(Or(p, q), Not(q)), p), disjunctive_syllogism(D, p, q))

    ex = Exists("x", A, s_xy)
    add(
        "exists_and_out",
        Sequent(D, And(ex, q), Exists("x", A, And(s_xy, q))),
        exists_and_out(D, "x", A, s_xy, q),
    )
    add(
        "exists_and_in",
        Sequent(D, Exists("x", A, And(s_xy, q)), And(ex, q)),
        exists_and_in(D, "x", A, s_xy, q),
    )

    s_ft = substitute(s_xy, [(x, fy)])
    h = Sequent(Dx, Eq(x, fy), s_xy)
    add("defined_variable", Sequent(D, Top(), s_ft), variable_sub_forward(hyp(h), "x", fy), [h])
    h = Sequent(D, Top(), s_ft)
    add(
        "defined_variable_converse",
        Sequent(Dx, Eq(x, fy), s_xy),
        variable_sub_backward(hyp(h), "x", A, fy, s_xy),
        [h],
    )

    # exists x p |- exists x q from p |-[D, x] q
    h = Sequent(Dx, s_xy, t_xy)
    tree = exists_i(cut(hyp(h), exists_e(ax(D, Exists("x", A, t_xy)))), "x")
    add("exists_monotone", Sequent(D, Exists("x", A, s_xy), Exists("x", A, t_xy)), tree, [h])

    # the route through forall x q, valid when x is not free in p
    h = Sequent(Dx, p, t_xy)
    via_forall = cut(forall_e(ax(D, Forall("x", A, t_xy))), exists_e(ax(D, Exists("x", A, t_xy))))
    tree = exists_i(cut(subst(forall_i(hyp(h), "x"), [], Dx), via_forall), "x")
    add("exists_monotone_closed", Sequent(D, Exists("x", A, p), Exists("x", A, t_xy)), tree, [h])

    add("witness", Sequent(D, s_ft, ex), witness_tree(D, "x", A, s_xy, fy))

    h = Sequent(D, p, q)
    tree = cut(hyp(h), or_el(ax(D, Or(q, r))))
    add("disjunction_right", Sequent(D, p, Or(q, r)), tree, [h])
    return lib
