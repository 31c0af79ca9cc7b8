"""Instance suites that semantically validate the derived rules.

A derived rule is admitted by the checker only after every generated
instance passes in every environment of its suite.
"""
from __future__ import annotations

from itertools import product as cartesian

from .context import Context
from .finset import FinMor, FinObj
from .interpret import Environment, validate_derived_rule
from .sequents import Sequent
from .syntax import (
    Base, Comprehension, CountableOr, Eq, Exists, Iff, Member, Pair, Product,
    Rel, Signature, Top, Var, app, substitute,
)


def all_subsets(obj: FinObj):
    for mask in range(1 << len(obj)):
        yield [e for k, e in enumerate(obj.elements) if mask >> k & 1]


def all_maps(dom: FinObj, cod: FinObj):
    for values in cartesian(cod.elements, repeat=len(dom)):
        yield FinMor(dom, cod, dict(zip(dom.elements, values)), check=False)


def environments(sig: Signature, sizes: dict):
    """Every environment of sig with base type `name` of size sizes[name]."""
    base = {name: FinObj(range(n)) for name, n in sizes.items()}
    probe = Environment(Signature(sig.base_types), base)
    fun_names = sorted(sig.functions)
    rel_names = sorted(sig.relations)
    fun_choices = [
        list(all_maps(probe.type_obj(sig.functions[f][0]), probe.type_obj(sig.functions[f][1])))
        for f in fun_names
    ]
    rel_choices = [list(all_subsets(probe.type_obj(sig.relations[r]))) for r in rel_names]
    for funs in cartesian(*fun_choices):
        for rels in cartesian(*rel_choices):
            yield Environment(sig, base, dict(zip(fun_names, funs)), dict(zip(rel_names, rels)))


def _size_grid(names, top):
    for sizes in cartesian(range(top + 1), repeat=len(names)):
        yield dict(zip(names, sizes))


A, B = Base("A"), Base("B")


def membership_cases(conclude_plain: bool):
    sig = Signature(
        {"A", "B"}, {"f": (A, B)}, {"P": A, "Q": B, "T": Product(B, A)}
    )
    a, b = Var("a", A), Var("b", B)
    ctx = Context([("a", A)])
    t = app(sig, "f", a)
    p = Rel("P", a)
    bodies = [Rel("Q", b), Rel("T", Pair(b, a))]
    for sizes in _size_grid(["A", "B"], 2):
        for env in environments(sig, sizes):
            for q in bodies:
                member = Sequent(ctx, p, Member(t, Comprehension("b", B, q)))
                plain = Sequent(ctx, p, substitute(q, [(b, t)]))
                if conclude_plain:
                    yield [member], plain, env
                else:
                    yield [plain], member, env


def set_cases(introduce: bool):
    sig = Signature({"A"}, {}, {"S": Product(A, A), "T": Product(A, A)})
    a, y = Var("a", A), Var("y", A)
    ctx = Context([("y", A)])
    wide = ctx.append("a", A)
    p, q = Rel("S", Pair(a, y)), Rel("T", Pair(a, y))
    iff = Sequent(wide, Top(), Iff(p, q))
    eq = Sequent(ctx, Top(), Eq(Comprehension("a", A, p), Comprehension("a", A, q)))
    for sizes in _size_grid(["A"], 2):
        for env in environments(sig, sizes):
            yield ([iff], eq, env) if introduce else ([eq], iff, env)


def countable_or_cases(introduce: bool):
    sig = Signature({"A"}, {}, {"P": A, "Q": A, "R": A, "U": A})
    y = Var("y", A)
    ctx = Context([("y", A)])
    atoms = [Rel(n, y) for n in "PQR"]
    goal = Rel("U", y)
    families = [
        CountableOr("const", (), (atoms[0],)),
        CountableOr("cycle", (), tuple(atoms[:2])),
        CountableOr("cycle", (), tuple(atoms)),
    ]
    for sizes in _size_grid(["A"], 2):
        for env in environments(sig, sizes):
            for cor in families:
                big = Sequent(ctx, cor, goal)
                parts = [Sequent(ctx, cor.member(i), goal) for i in range(cor.period)]
                if introduce:
                    yield parts, big, env
                else:
                    for i in range(cor.period + 2):
                        yield [big], Sequent(ctx, cor.member(i), goal), env


def surjective_pairing_cases():
    sig = Signature({"A", "B"})
    z = Var("z", Product(A, B))
    ctx = Context([("z", Product(A, B))])
    body = Exists("a", A, Exists("b", B, Eq(z, Pair(Var("a", A), Var("b", B)))))
    for sizes in _size_grid(["A", "B"], 3):
        env = Environment(sig, {k: FinObj(range(n)) for k, n in sizes.items()})
        yield [], Sequent(ctx, Top(), body), env


SUITES = {
    "Mem1": lambda: membership_cases(True),
    "Mem2": lambda: membership_cases(False),
    "SetI": lambda: set_cases(True),
    "SetE": lambda: set_cases(False),
    "BigOrI": lambda: countable_or_cases(True),
    "BigOrE": lambda: countable_or_cases(False),
    "surjective_pairing": surjective_pairing_cases,
}


def ensure_validated(name: str) -> int:
    """Run the suite for `name`, registering the rule if it passes."""
    if name not in SUITES:
        raise KeyError(f"no instance suite for derived rule {name!r}")
    return validate_derived_rule(name, SUITES[name]())


def validate_all() -> dict:
    return {name: ensure_validated(name) for name in SUITES}

