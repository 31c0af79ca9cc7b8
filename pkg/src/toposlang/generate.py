"""Random and exhaustive instances: environments, terms, formulas, diagrams."""
from __future__ import annotations

import dataclasses
import random
from itertools import product as cartesian

from .finset import FinMor, FinObj
from .interpret import Environment
from .syntax import (
    And, App, Base, Bot, Comprehension, Eq, Exists, Forall, Fst, Implies, Member,
    Node, Or, Pair, Power, Product, Rel, Signature, Snd, Top, Var, fresh_name,
)


def symbols(x) -> tuple[set, set]:
    """Function and relation symbols occurring in a term, formula or sequent."""
    funs, rels = set(), set()

    def walk(y):
        if isinstance(y, App):
            funs.add(y.fun)
        elif isinstance(y, Rel):
            rels.add(y.sym)
        if isinstance(y, Node) or dataclasses.is_dataclass(y):
            for f in dataclasses.fields(y):
                walk(getattr(y, f.name))
        elif isinstance(y, (tuple, list)):
            for z in y:
                walk(z)

    walk(x)
    return funs, rels


def restrict(sig: Signature, funs, rels) -> Signature:
    return Signature(
        sig.base_types,
        {f: sig.functions[f] for f in funs},
        {r: sig.relations[r] for r in rels},
    )


def _probe(sig: Signature, sizes: dict) -> Environment:
    return Environment(Signature(sig.base_types), {k: FinObj(range(n)) for k, n in sizes.items()})


def count_environments(sig: Signature, sizes: dict) -> int:
    probe = _probe(sig, sizes)
    n = 1
    for dom, cod in sig.functions.values():
        n *= probe.type_size(cod) ** probe.type_size(dom)
    for carrier in sig.relations.values():
        n *= 2 ** probe.type_size(carrier)
    return n


def random_environment(sig: Signature, sizes: dict, rng: random.Random) -> Environment:
    probe = _probe(sig, sizes)
    funs, rels = {}, {}
    for name, (dom, cod) in sorted(sig.functions.items()):
        d, c = probe.type_obj(dom), probe.type_obj(cod)
        if len(d) and not len(c):
            raise ValueError(f"no map for {name} into an empty set")
        funs[name] = FinMor(d, c, {x: rng.choice(c.elements) for x in d}, check=False)
    for name, carrier in sorted(sig.relations.items()):
        rels[name] = [x for x in probe.type_obj(carrier) if rng.random() < 0.5]
    base = {k: FinObj(range(n)) for k, n in sizes.items()}
    return Environment(sig, base, funs, rels)


def environments_upto(sig: Signature, top: int, limit: int, samples: int, rng: random.Random):
    """Environments with every base type of size <= top.

    All of them when there are at most `limit`, otherwise `samples` random
    ones.  Returns (list, exhaustive flag).
    """
    from .derived import environments

    names = sorted(sig.base_types)
    grids = [dict(zip(names, s)) for s in cartesian(range(top + 1), repeat=len(names))]
    grids = [g for g in grids if _inhabitable(sig, g)]
    total = sum(count_environments(sig, g) for g in grids)
    if total <= limit:
        return [env for g in grids for env in environments(sig, g)], True
    return [random_environment(sig, rng.choice(grids), rng) for _ in range(samples)], False


def _inhabitable(sig, sizes):
    probe = _probe(sig, sizes)
    return all(
        probe.type_size(cod) or not probe.type_size(dom) for dom, cod in sig.functions.values()
    )


# ---------------------------------------------------------------- terms and formulas


class FormulaGen:
    """Random well-typed terms and formulas over a signature with base type A."""

    def __init__(self, sig: Signature, rng: random.Random, base: str = "A"):
        self.sig = sig
        self.rng = rng
        self.A = Base(base)

    def _fresh(self, scope):
        return fresh_name("v", set(scope))

    def term(self, scope: dict, tau, depth: int):
        rng = self.rng
        vars_ = [Var(n, t) for n, t in scope.items() if t == tau]
        options = []
        if vars_:
            options.append(lambda: rng.choice(vars_))
        if depth > 0:
            funs = [f for f, (d, c) in self.sig.functions.items() if c == tau]
            if funs:
                def use_fun():
                    f = rng.choice(funs)
                    dom, cod = self.sig.functions[f]
                    return App(f, self.term(scope, dom, depth - 1), cod)
                options.append(use_fun)
            if isinstance(tau, Product):
                options.append(lambda: Pair(self.term(scope, tau.left, depth - 1),
                                            self.term(scope, tau.right, depth - 1)))
            if isinstance(tau, Power):
                def comp():
                    v = self._fresh(scope)
                    return Comprehension(v, tau.inner, self.formula({**scope, v: tau.inner}, depth - 1))
                options.append(comp)
            pairs = [Var(n, t) for n, t in scope.items() if isinstance(t, Product)]
            for p in pairs:
                if p.type.left == tau:
                    options.append(lambda p=p: Fst(p))
                if p.type.right == tau:
                    options.append(lambda p=p: Snd(p))
        if not options:
            raise ValueError(f"cannot build a term of type {tau}")
        return rng.choice(options)()

    def formula(self, scope: dict, depth: int):
        rng = self.rng
        A = self.A
        have_a = any(t == A for t in scope.values())
        atoms = [lambda: Top(), lambda: Bot()]
        if have_a:
            for r, carrier in self.sig.relations.items():
                if self._buildable(scope, carrier):
                    atoms.append(lambda r=r, c=carrier: Rel(r, self.term(scope, c, 1)))
            atoms.append(lambda: Eq(self.term(scope, A, 1), self.term(scope, A, 1)))
        if depth <= 0:
            return rng.choice(atoms)()
        kind = rng.randrange(9)
        if kind < 3:
            return rng.choice(atoms)()
        if kind == 3:
            return And(self.formula(scope, depth - 1), self.formula(scope, depth - 1))
        if kind == 4:
            return Or(self.formula(scope, depth - 1), self.formula(scope, depth - 1))
        if kind == 5:
            return Implies(self.formula(scope, depth - 1), self.formula(scope, depth - 1))
        if kind in (6, 7):
            v = self._fresh(scope)
            body = self.formula({**scope, v: A}, depth - 1)
            return (Exists if kind == 6 else Forall)(v, A, body)
        if have_a:
            return Member(self.term(scope, A, 0), self.term(scope, Power(A), depth))
        return rng.choice(atoms)()

    def _buildable(self, scope, tau):
        if any(t == tau for t in scope.values()):
            return True
        if isinstance(tau, Product):
            return self._buildable(scope, tau.left) and self._buildable(scope, tau.right)
        return False


# ---------------------------------------------------------------- maps and diagrams


def random_map(dom: FinObj, cod: FinObj, rng: random.Random) -> FinMor:
    return FinMor(dom, cod, {x: rng.choice(cod.elements) for x in dom}, check=False)


def random_diagram(rng: random.Random, max_objects: int = 3, max_size: int = 3, max_morphisms: int = 3):
    """A random finite diagram in FinSet as (DiagramSpec, Environment)."""
    from .colimits import DiagramSpec

    names = ["A", "B", "C", "D", "E"][: rng.randint(1, max_objects)]
    sizes = {n: rng.randint(0, max_size) for n in names}
    morphisms, tables = [], {}
    for k in range(rng.randint(0, max_morphisms)):
        dom = rng.choice(names)
        targets = [n for n in names if sizes[n] or not sizes[dom]]
        cod = rng.choice(targets)
        name = f"m{k + 1}"
        morphisms.append((name, dom, cod))
        tables[name] = {x: rng.randrange(sizes[cod]) for x in range(sizes[dom])}
    spec = DiagramSpec(tuple(names), tuple(morphisms))
    return spec, spec.environment({n: range(s) for n, s in sizes.items()}, tables)
