"""Types, terms and formulas of the internal language.

Every term carries its type.  Variables are named; alpha-equivalence is
decided by renaming bound variables canonically and comparing structure.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union


class TypingError(TypeError):
    """Raised for ill-typed terms, formulas or bindings."""


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Unit:
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Omega:
    def __str__(self):
        return "Omega"


@dataclass(frozen=True)
class Product:
    left: "TypeExpr"
    right: "TypeExpr"

    def __str__(self):
        return f"({self.left} x {self.right})"


@dataclass(frozen=True)
class Power:
    inner: "TypeExpr"

    def __str__(self):
        return f"P{self.inner}"


TypeExpr = Union[Base, Unit, Omega, Product, Power]


def base_names(tau: TypeExpr) -> set:
    if isinstance(tau, Base):
        return {tau.name}
    if isinstance(tau, Product):
        return base_names(tau.left) | base_names(tau.right)
    if isinstance(tau, Power):
        return base_names(tau.inner)
    return set()


@dataclass
class Signature:
    base_types: set = field(default_factory=set)
    functions: dict = field(default_factory=dict)  # name -> (dom, cod)
    relations: dict = field(default_factory=dict)  # name -> carrier

    def __post_init__(self):
        self.base_types = set(self.base_types)
        for name, (dom, cod) in self.functions.items():
            self.check_type(dom)
            self.check_type(cod)
        for name, carrier in self.relations.items():
            self.check_type(carrier)

    def check_type(self, tau: TypeExpr):
        missing = base_names(tau) - self.base_types
        if missing:
            raise TypingError(f"undeclared base type(s) {sorted(missing)} in {tau}")

    def merged(self, other: "Signature") -> "Signature":
        return Signature(
            self.base_types | other.base_types,
            {**self.functions, **other.functions},
            {**self.relations, **other.relations},
        )


# ---------------------------------------------------------------- nodes


class Node:
    """Shared behaviour of terms and formulas: cached free variables."""

    __slots__ = ()

    def free(self) -> frozenset:
        cached = self.__dict__.get("_fv")
        if cached is None:
            cached = frozenset(_fv(self))
            object.__setattr__(self, "_fv", cached)
        return cached

    def free_names(self) -> tuple:
        cached = self.__dict__.get("_fvn")
        if cached is None:
            cached = tuple(sorted({n for n, _ in self.free()}))
            object.__setattr__(self, "_fvn", cached)
        return cached

    def __str__(self):
        from .surface import pretty

        return pretty(self)


def _set_type(node, tau):
    object.__setattr__(node, "type", tau)


@dataclass(frozen=True, eq=True, repr=False)
class Var(Node):
    name: str
    type: TypeExpr

    def __repr__(self):
        return f"Var({self.name!r}, {self.type})"


@dataclass(frozen=True, repr=False)
class Star(Node):
    type: TypeExpr = field(default=Unit(), init=False, compare=False)

    def __repr__(self):
        return "Star()"


@dataclass(frozen=True, repr=False)
class Pair(Node):
    left: "Term"
    right: "Term"
    type: TypeExpr = field(init=False, compare=False)

    def __post_init__(self):
        _set_type(self, Product(self.left.type, self.right.type))


@dataclass(frozen=True, repr=False)
class Fst(Node):
    arg: "Term"
    type: TypeExpr = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.arg.type, Product):
            raise TypingError(f"fst of non-product term of type {self.arg.type}")
        _set_type(self, self.arg.type.left)


@dataclass(frozen=True, repr=False)
class Snd(Node):
    arg: "Term"
    type: TypeExpr = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.arg.type, Product):
            raise TypingError(f"snd of non-product term of type {self.arg.type}")
        _set_type(self, self.arg.type.right)


@dataclass(frozen=True, repr=False)
class App(Node):
    """Function symbol applied to a term; `type` is the symbol's codomain."""

    fun: str
    arg: "Term"
    type: TypeExpr


@dataclass(frozen=True, repr=False)
class Comprehension(Node):
    var: str
    var_type: TypeExpr
    body: "Formula"
    type: TypeExpr = field(init=False, compare=False)

    def __post_init__(self):
        _set_type(self, Power(self.var_type))


Term = Union[Var, Star, Pair, Fst, Snd, App, Comprehension]
TERM_KINDS = (Var, Star, Pair, Fst, Snd, App, Comprehension)


@dataclass(frozen=True, repr=False)
class Top(Node):
    pass


@dataclass(frozen=True, repr=False)
class Bot(Node):
    pass


@dataclass(frozen=True, repr=False)
class Rel(Node):
    sym: str
    arg: Term


@dataclass(frozen=True, repr=False)
class Eq(Node):
    left: Term
    right: Term

    def __post_init__(self):
        if self.left.type != self.right.type:
            raise TypingError(
                f"equation between types {self.left.type} and {self.right.type}"
            )


@dataclass(frozen=True, repr=False)
class And(Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, repr=False)
class Or(Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, repr=False)
class Implies(Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, repr=False)
class Forall(Node):
    var: str
    var_type: TypeExpr
    body: "Formula"


@dataclass(frozen=True, repr=False)
class Exists(Node):
    var: str
    var_type: TypeExpr
    body: "Formula"


@dataclass(frozen=True, repr=False)
class Member(Node):
    elem: Term
    coll: Term

    def __post_init__(self):
        if self.coll.type != Power(self.elem.type):
            raise TypingError(
                f"membership of {self.elem.type} in term of type {self.coll.type}"
            )


@dataclass(frozen=True, repr=False)
class CountableOr(Node):
    """A countable disjunction given by a registered family constructor.

    `bound` lists variables the family binds inside `params`; `params` are
    terms/formulas the constructor uses.  Members are produced lazily by
    `member(i)`; all of them have free variables inside `free()`.
    """

    family_id: str
    bound: tuple  # ((name, type), ...)
    params: tuple

    def __post_init__(self):
        if self.family_id not in FAMILIES:
            raise TypingError(f"unknown formula family {self.family_id!r}")
        FAMILIES[self.family_id].check(self)

    def member(self, i: int) -> "Formula":
        cache = self.__dict__.get("_members")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_members", cache)
        if i not in cache:
            cache[i] = FAMILIES[self.family_id].member(self, i)
        return cache[i]

    @property
    def period(self) -> int:
        return FAMILIES[self.family_id].period(self)

    @property
    def recurrent(self) -> bool:
        return FAMILIES[self.family_id].recurrent


Formula = Union[Top, Bot, Rel, Eq, And, Or, Implies, CountableOr, Forall, Exists, Member]
FORMULA_KINDS = (Top, Bot, Rel, Eq, And, Or, Implies, CountableOr, Forall, Exists, Member)
BINDERS = (Comprehension, Forall, Exists)


def is_term(x) -> bool:
    return isinstance(x, TERM_KINDS)


def is_formula(x) -> bool:
    return isinstance(x, FORMULA_KINDS)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class Family:
    check: Callable
    member: Callable
    period: Callable = lambda cor: 1
    # member(i + 1) is determined by the subobject of member(i)
    recurrent: bool = False


FAMILIES: dict = {}


def register_family(name: str, family: Family):
    FAMILIES[name] = family


def _check_const(cor):
    if cor.bound or len(cor.params) != 1 or not is_formula(cor.params[0]):
        raise TypingError("const family takes exactly one formula")


def _check_cycle(cor):
    if cor.bound or not cor.params or not all(is_formula(p) for p in cor.params):
        raise TypingError("cycle family takes one or more formulas")


register_family("const", Family(_check_const, lambda cor, i: cor.params[0]))
register_family(
    "cycle",
    Family(
        _check_cycle,
        lambda cor, i: cor.params[i % len(cor.params)],
        lambda cor: len(cor.params),
    ),
)


# ---------------------------------------------------------------- free variables


def _fv(x) -> set:
    if isinstance(x, Var):
        return {(x.name, x.type)}
    if isinstance(x, (Star, Top, Bot)):
        return set()
    if isinstance(x, (Pair, Eq, And, Or, Implies)):
        return set(x.left.free()) | set(x.right.free())
    if isinstance(x, (Fst, Snd, App, Rel)):
        return set(x.arg.free())
    if isinstance(x, BINDERS):
        return {v for v in x.body.free() if v[0] != x.var}
    if isinstance(x, Member):
        return set(x.elem.free()) | set(x.coll.free())
    if isinstance(x, CountableOr):
        bound = {n for n, _ in x.bound}
        out = set()
        for p in x.params:
            out |= {v for v in p.free() if v[0] not in bound}
        return out
    raise TypeError(f"not a term or formula: {x!r}")


def fv(x) -> frozenset:
    """Free variables as a set of (name, type) pairs."""
    return x.free()


def all_names(x) -> set:
    """Every variable name occurring in x, free or bound."""
    out = set()
    stack = [x]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, (Pair, Eq, And, Or, Implies)):
            stack += [n.left, n.right]
        elif isinstance(n, (Fst, Snd, App, Rel)):
            stack.append(n.arg)
        elif isinstance(n, BINDERS):
            out.add(n.var)
            stack.append(n.body)
        elif isinstance(n, Member):
            stack += [n.elem, n.coll]
        elif isinstance(n, CountableOr):
            out |= {name for name, _ in n.bound}
            stack += list(n.params)
    return out


_SUFFIX = re.compile(r"^(.*?)(\d*)$")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """`base` followed by the least positive integer giving an unused name."""
    avoid = set(avoid)
    stem = _SUFFIX.match(base).group(1) or base
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


# ---------------------------------------------------------------- typing


def type_of(t: Term, sig: Signature) -> TypeExpr:
    """Re-derive the type of t from the formation rules, checking against sig."""
    if isinstance(t, Var):
        sig.check_type(t.type)
        return t.type
    if isinstance(t, Star):
        return Unit()
    if isinstance(t, Pair):
        return Product(type_of(t.left, sig), type_of(t.right, sig))
    if isinstance(t, (Fst, Snd)):
        inner = type_of(t.arg, sig)
        if not isinstance(inner, Product):
            raise TypingError(f"projection of non-product type {inner}")
        return inner.left if isinstance(t, Fst) else inner.right
    if isinstance(t, App):
        if t.fun not in sig.functions:
            raise TypingError(f"undeclared function symbol {t.fun!r}")
        dom, cod = sig.functions[t.fun]
        if type_of(t.arg, sig) != dom:
            raise TypingError(f"{t.fun} expects {dom}, got {t.arg.type}")
        if t.type != cod:
            raise TypingError(f"{t.fun} returns {cod}, node says {t.type}")
        return cod
    if isinstance(t, Comprehension):
        sig.check_type(t.var_type)
        check_formula(t.body, sig)
        return Power(t.var_type)
    raise TypingError(f"not a term: {t!r}")


def check_formula(p: Formula, sig: Signature) -> None:
    """Raise TypingError unless p is well formed over sig."""
    if isinstance(p, (Top, Bot)):
        return
    if isinstance(p, Rel):
        if p.sym not in sig.relations:
            raise TypingError(f"undeclared relation symbol {p.sym!r}")
        if type_of(p.arg, sig) != sig.relations[p.sym]:
            raise TypingError(f"{p.sym} is on {sig.relations[p.sym]}, got {p.arg.type}")
        return
    if isinstance(p, Eq):
        if type_of(p.left, sig) != type_of(p.right, sig):
            raise TypingError("equation between different types")
        return
    if isinstance(p, (And, Or, Implies)):
        check_formula(p.left, sig)
        check_formula(p.right, sig)
        return
    if isinstance(p, (Forall, Exists)):
        sig.check_type(p.var_type)
        check_formula(p.body, sig)
        return
    if isinstance(p, Member):
        if type_of(p.coll, sig) != Power(type_of(p.elem, sig)):
            raise TypingError("membership against non-matching power type")
        return
    if isinstance(p, CountableOr):
        for param in p.params:
            if is_term(param):
                type_of(param, sig)
            else:
                check_formula(param, sig)
        return
    raise TypingError(f"not a formula: {p!r}")


def app(sig: Signature, fun: str, arg: Term) -> App:
    if fun not in sig.functions:
        raise TypingError(f"undeclared function symbol {fun!r}")
    dom, cod = sig.functions[fun]
    if arg.type != dom:
        raise TypingError(f"{fun} expects {dom}, got {arg.type}")
    return App(fun, arg, cod)


# ---------------------------------------------------------------- shorthands


def Not(p: Formula) -> Formula:
    return Implies(p, Bot())


def Iff(p: Formula, q: Formula) -> Formula:
    return And(Implies(p, q), Implies(q, p))


def conj(*ps: Formula) -> Formula:
    """Right-nested conjunction; the empty conjunction is Top."""
    if not ps:
        return Top()
    out = ps[-1]
    for p in reversed(ps[:-1]):
        out = And(p, out)
    return out


def disj(*ps: Formula) -> Formula:
    if not ps:
        return Bot()
    out = ps[-1]
    for p in reversed(ps[:-1]):
        out = Or(p, out)
    return out


def singleton(t: Term, var: str = "x") -> Comprehension:
    """{t} as the comprehension {v | t = v}, v fresh for t."""
    names = all_names(t)
    v = var if var not in names else fresh_name(var, names)
    return Comprehension(v, t.type, Eq(t, Var(v, t.type)))


def empty(tau: TypeExpr, var: str = "x") -> Comprehension:
    return Comprehension(var, tau, Bot())


def tuple_term(terms) -> Term:
    """Left-associated tuple <<t1, t2>, t3>...; a single term is itself."""
    terms = list(terms)
    if not terms:
        return Star()
    out = terms[0]
    for t in terms[1:]:
        out = Pair(out, t)
    return out


def product_type(types) -> TypeExpr:
    types = list(types)
    if not types:
        return Unit()
    out = types[0]
    for t in types[1:]:
        out = Product(out, t)
    return out


# ---------------------------------------------------------------- substitution


def _rebuild_binder(x, var, body):
    if isinstance(x, Comprehension):
        return Comprehension(var, x.var_type, body)
    return type(x)(var, x.var_type, body)


def _subst(x, sigma: dict):
    if not sigma:
        return x
    if isinstance(x, Var):
        return sigma.get(x.name, x)
    if isinstance(x, (Star, Top, Bot)):
        return x
    if isinstance(x, Pair):
        return Pair(_subst(x.left, sigma), _subst(x.right, sigma))
    if isinstance(x, Fst):
        return Fst(_subst(x.arg, sigma))
    if isinstance(x, Snd):
        return Snd(_subst(x.arg, sigma))
    if isinstance(x, App):
        return App(x.fun, _subst(x.arg, sigma), x.type)
    if isinstance(x, Rel):
        return Rel(x.sym, _subst(x.arg, sigma))
    if isinstance(x, Eq):
        return Eq(_subst(x.left, sigma), _subst(x.right, sigma))
    if isinstance(x, (And, Or, Implies)):
        return type(x)(_subst(x.left, sigma), _subst(x.right, sigma))
    if isinstance(x, Member):
        return Member(_subst(x.elem, sigma), _subst(x.coll, sigma))
    if isinstance(x, BINDERS):
        inner = _relevant(sigma, x.body, exclude={x.var})
        if not inner:
            return x
        var = x.var
        captured = any(var in t.free_names() for t in inner.values())
        if captured:
            avoid = all_names(x) | set(inner)
            for t in inner.values():
                avoid |= set(t.free_names())
            var = fresh_name(x.var, avoid)
            inner = {**inner, x.var: Var(var, x.var_type)}
        return _rebuild_binder(x, var, _subst(x.body, inner))
    if isinstance(x, CountableOr):
        bound_names = {n for n, _ in x.bound}
        inner = {k: v for k, v in sigma.items() if k not in bound_names}
        inner = {k: v for k, v in inner.items() if k in {n for n, _ in x.free()}}
        if not inner:
            return x
        avoid = all_names(x) | set(inner)
        for t in inner.values():
            avoid |= set(t.free_names())
        renamed = {}
        new_bound = []
        for name, tau in x.bound:
            if any(name in t.free_names() for t in inner.values()):
                new = fresh_name(name, avoid)
                avoid.add(new)
                renamed[name] = Var(new, tau)
                new_bound.append((new, tau))
            else:
                new_bound.append((name, tau))
        full = {**inner, **renamed}
        return CountableOr(x.family_id, tuple(new_bound), tuple(_subst(p, full) for p in x.params))
    raise TypeError(f"cannot substitute into {x!r}")


def _relevant(sigma, body, exclude=()):
    names = set(body.free_names())
    return {k: v for k, v in sigma.items() if k in names and k not in exclude}


def substitute(x, bindings):
    """Simultaneous capture-avoiding substitution.

    `bindings` is a sequence of (variable, term) pairs, the variable given
    either as a Var or as a name.  Bound variables that would capture a free
    variable of a substituted term are renamed to fresh names.
    """
    sigma = {}
    for v, t in bindings:
        if isinstance(v, Var):
            if v.type != t.type:
                raise TypingError(f"binding {v.name}:{v.type} to term of type {t.type}")
            name = v.name
        else:
            name = v
            for n, tau in x.free():
                if n == name and tau != t.type:
                    raise TypingError(f"binding {n}:{tau} to term of type {t.type}")
        if name in sigma:
            raise ValueError(f"variable {name} bound twice in one substitution")
        sigma[name] = t
    return _subst(x, _relevant(sigma, x))


# ---------------------------------------------------------------- alpha equivalence


def canonical(x, _env=None, _depth=0):
    """Rename every bound variable to `%k`, k being its binder depth."""
    env = _env or {}
    if isinstance(x, Var):
        return Var(env.get(x.name, x.name), x.type)
    if isinstance(x, (Star, Top, Bot)):
        return x
    if isinstance(x, Pair):
        return Pair(canonical(x.left, env, _depth), canonical(x.right, env, _depth))
    if isinstance(x, Fst):
        return Fst(canonical(x.arg, env, _depth))
    if isinstance(x, Snd):
        return Snd(canonical(x.arg, env, _depth))
    if isinstance(x, App):
        return App(x.fun, canonical(x.arg, env, _depth), x.type)
    if isinstance(x, Rel):
        return Rel(x.sym, canonical(x.arg, env, _depth))
    if isinstance(x, Eq):
        return Eq(canonical(x.left, env, _depth), canonical(x.right, env, _depth))
    if isinstance(x, (And, Or, Implies)):
        return type(x)(canonical(x.left, env, _depth), canonical(x.right, env, _depth))
    if isinstance(x, Member):
        return Member(canonical(x.elem, env, _depth), canonical(x.coll, env, _depth))
    if isinstance(x, BINDERS):
        name = f"%{_depth}"
        body = canonical(x.body, {**env, x.var: name}, _depth + 1)
        return _rebuild_binder(x, name, body)
    if isinstance(x, CountableOr):
        inner = dict(env)
        bound = []
        for k, (name, tau) in enumerate(x.bound):
            new = f"%{_depth}.{k}"
            inner[name] = new
            bound.append((new, tau))
        params = tuple(canonical(p, inner, _depth + 1) for p in x.params)
        return CountableOr(x.family_id, tuple(bound), params)
    raise TypeError(f"not a term or formula: {x!r}")


def alpha_eq(a, b) -> bool:
    if is_term(a) != is_term(b):
        return False
    return canonical(a) == canonical(b)
