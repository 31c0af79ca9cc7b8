"""The topos of finite sets, computed on explicit tables.

Objects are canonically ordered tuples of labels, morphisms are total
tables and subobjects are subsets of an ambient object.  Labels are
ints, strings, booleans (the two points of Omega), 2-tuples (elements of
products) and frozensets (elements of power objects).
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable

from .unionfind import DisjointSet


class ShapeError(ValueError):
    """Raised when morphisms or subobjects do not fit together."""


def label_key(x):
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (1, x)
    if isinstance(x, str):
        return (2, x)
    if isinstance(x, tuple):
        return (3, len(x), tuple(label_key(y) for y in x))
    if isinstance(x, frozenset):
        return (4, len(x), tuple(sorted(label_key(y) for y in x)))
    raise TypeError(f"unsupported label {x!r}")


def label_str(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, tuple):
        return "(" + ", ".join(label_str(y) for y in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ", ".join(label_str(y) for y in sorted(x, key=label_key)) + "}"
    return str(x)


class FinObj:
    __slots__ = ("elements", "_index", "_hash")

    def __init__(self, elements: Iterable):
        elems = sorted(set(elements), key=label_key)
        self.elements = tuple(elems)
        self._index = None
        self._hash = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        if self._index is None:
            self._index = frozenset(self.elements)
        return x in self._index

    def __eq__(self, other):
        return isinstance(other, FinObj) and self.elements == other.elements

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.elements)
        return self._hash

    def __repr__(self):
        return "FinObj([" + ", ".join(label_str(e) for e in self.elements) + "])"

    def to_json(self):
        return [label_str(e) for e in self.elements]


class FinMor:
    __slots__ = ("dom", "cod", "table")

    def __init__(self, dom: FinObj, cod: FinObj, table: dict, check: bool = True):
        self.dom = dom
        self.cod = cod
        self.table = dict(table)
        if check:
            if len(self.table) != len(dom) or any(x not in self.table for x in dom):
                raise ShapeError("table is not total on the domain")
            for v in self.table.values():
                if v not in cod:
                    raise ShapeError(f"value {label_str(v)} outside codomain")

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        return (
            isinstance(other, FinMor)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.dom, self.cod, tuple(self.table[x] for x in self.dom)))

    def __repr__(self):
        body = ", ".join(f"{label_str(x)}->{label_str(self.table[x])}" for x in self.dom)
        return f"FinMor({body})"

    def to_json(self):
        return {label_str(x): label_str(self.table[x]) for x in self.dom}


class Subobj:
    __slots__ = ("ambient", "subset")

    def __init__(self, ambient: FinObj, subset: Iterable, check: bool = True):
        self.ambient = ambient
        self.subset = frozenset(subset)
        if check:
            for x in self.subset:
                if x not in ambient:
                    raise ShapeError(f"{label_str(x)} not in ambient object")

    def __contains__(self, x):
        return x in self.subset

    def __len__(self):
        return len(self.subset)

    def __eq__(self, other):
        return (
            isinstance(other, Subobj)
            and self.ambient == other.ambient
            and self.subset == other.subset
        )

    def __hash__(self):
        return hash((self.ambient, self.subset))

    def __repr__(self):
        body = ", ".join(label_str(e) for e in self.elements())
        return f"Subobj({{{body}}} of {len(self.ambient)})"

    def elements(self) -> tuple:
        return tuple(e for e in self.ambient.elements if e in self.subset)

    def as_object(self) -> FinObj:
        return FinObj(self.subset)

    def inclusion(self) -> FinMor:
        dom = self.as_object()
        return FinMor(dom, self.ambient, {x: x for x in dom}, check=False)

    def to_json(self):
        return [label_str(e) for e in self.elements()]


# ---------------------------------------------------------------- category structure


def identity(a: FinObj) -> FinMor:
    return FinMor(a, a, {x: x for x in a}, check=False)


def compose(g: FinMor, f: FinMor) -> FinMor:
    """g after f."""
    if f.cod != g.dom:
        raise ShapeError("cannot compose: codomain and domain differ")
    return FinMor(f.dom, g.cod, {x: g.table[f.table[x]] for x in f.dom}, check=False)


def terminal() -> FinObj:
    return FinObj(["*"])


def to_terminal(a: FinObj) -> FinMor:
    return FinMor(a, terminal(), {x: "*" for x in a}, check=False)


def initial() -> FinObj:
    return FinObj([])


def constant(a: FinObj, b: FinObj, value) -> FinMor:
    return FinMor(a, b, {x: value for x in a})


@lru_cache(maxsize=4096)
def product(a: FinObj, b: FinObj):
    """Returns (a x b, first projection, second projection); memoised, so
    callers must not mutate the tables."""
    p = FinObj((x, y) for x in a for y in b)
    p1 = FinMor(p, a, {e: e[0] for e in p}, check=False)
    p2 = FinMor(p, b, {e: e[1] for e in p}, check=False)
    return p, p1, p2


def pairing(f: FinMor, g: FinMor) -> FinMor:
    if f.dom != g.dom:
        raise ShapeError("pairing needs a common domain")
    cod, _, _ = product(f.cod, g.cod)
    return FinMor(f.dom, cod, {x: (f.table[x], g.table[x]) for x in f.dom}, check=False)


def product_map(f: FinMor, g: FinMor) -> FinMor:
    """f x g between products."""
    dom, _, _ = product(f.dom, g.dom)
    cod, _, _ = product(f.cod, g.cod)
    return FinMor(dom, cod, {(x, y): (f.table[x], g.table[y]) for x, y in dom}, check=False)


def swap(a: FinObj, b: FinObj) -> FinMor:
    ab, _, _ = product(a, b)
    ba, _, _ = product(b, a)
    return FinMor(ab, ba, {(x, y): (y, x) for x, y in ab}, check=False)


def _parallel(f: FinMor, g: FinMor):
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeError("morphisms are not parallel")


def equalizer(f: FinMor, g: FinMor) -> Subobj:
    _parallel(f, g)
    return Subobj(f.dom, (x for x in f.dom if f.table[x] == g.table[x]), check=False)


def pullback(f: FinMor, g: FinMor):
    """Returns (P, p1, p2) with P = {(x, y) | f x = g y}."""
    if f.cod != g.cod:
        raise ShapeError("pullback needs a common codomain")
    by_value = {}
    for y in g.dom:
        by_value.setdefault(g.table[y], []).append(y)
    p = FinObj((x, y) for x in f.dom for y in by_value.get(f.table[x], ()))
    p1 = FinMor(p, f.dom, {e: e[0] for e in p}, check=False)
    p2 = FinMor(p, g.dom, {e: e[1] for e in p}, check=False)
    return p, p1, p2


def coproduct(objs):
    """Disjoint union tagging elements of the i-th object with i."""
    objs = list(objs)
    c = FinObj((i, x) for i, a in enumerate(objs) for x in a)
    injections = [FinMor(a, c, {x: (i, x) for x in a}, check=False) for i, a in enumerate(objs)]
    return c, injections


def quotient(a: FinObj, pairs) -> tuple:
    """Quotient a by the equivalence closure of pairs.

    Returns (Q, q) where each class is labelled by its least member.
    """
    ds = DisjointSet(a.elements)
    for x, y in pairs:
        ds.union(x, y)
    least = {}
    for x in a.elements:  # canonical order, so the first seen is least
        least.setdefault(ds.find(x), x)
    q = {x: least[ds.find(x)] for x in a}
    obj = FinObj(q.values())
    return obj, FinMor(a, obj, q, check=False)


def pushout(f: FinMor, g: FinMor):
    """Pushout of f: A -> B and g: A -> C.

    Returns (Q, i1: B -> Q, i2: C -> Q); Q is the disjoint union of B and C
    modulo f(x) ~ g(x), each class labelled by its least tagged member.
    """
    if f.dom != g.dom:
        raise ShapeError("pushout needs a common domain")
    disjoint, (j1, j2) = coproduct([f.cod, g.cod])
    q_obj, q = quotient(disjoint, ((j1(f(x)), j2(g(x))) for x in f.dom))
    return q_obj, compose(q, j1), compose(q, j2)


def image(f: FinMor) -> Subobj:
    """Image of f as the equalizer of its self-pushout injections."""
    _, i1, i2 = pushout(f, f)
    return equalizer(i1, i2)


def restrict(f: FinMor, s: Subobj) -> FinMor:
    if s.ambient != f.dom:
        raise ShapeError("restriction to a subobject of another object")
    return compose(f, s.inclusion())


# ---------------------------------------------------------------- Heyting algebra of subobjects


def _same(x: Subobj, y: Subobj):
    if x.ambient != y.ambient:
        raise ShapeError("subobjects of different objects")


def top(a: FinObj) -> Subobj:
    return Subobj(a, a.elements, check=False)


def bottom(a: FinObj) -> Subobj:
    return Subobj(a, (), check=False)


def sub_meet(x: Subobj, y: Subobj) -> Subobj:
    _same(x, y)
    return Subobj(x.ambient, x.subset & y.subset, check=False)


def sub_join(x: Subobj, y: Subobj) -> Subobj:
    _same(x, y)
    return Subobj(x.ambient, x.subset | y.subset, check=False)


def sub_implies(x: Subobj, y: Subobj) -> Subobj:
    _same(x, y)
    return Subobj(x.ambient, (e for e in x.ambient if e not in x.subset or e in y.subset), check=False)


def sub_leq(x: Subobj, y: Subobj) -> bool:
    _same(x, y)
    return x.subset <= y.subset


def sub_not(x: Subobj) -> Subobj:
    return sub_implies(x, bottom(x.ambient))


class HeytingOpsWitness:
    """Top and bottom of Sub(E), with the operations bound to E."""

    def __init__(self, ambient: FinObj):
        self.ambient = ambient
        self.top = top(ambient)
        self.bottom = bottom(ambient)

    def all_subobjects(self):
        elems = self.ambient.elements
        for k in range(len(elems) + 1):
            for c in combinations(elems, k):
                yield Subobj(self.ambient, c, check=False)

    meet = staticmethod(sub_meet)
    join = staticmethod(sub_join)
    implies = staticmethod(sub_implies)
    leq = staticmethod(sub_leq)


class JoinDiverged(RuntimeError):
    pass


def countable_join_fixpoint(family: Callable[[int], Subobj], ambient: FinObj, period: int = 1,
                            recurrent: bool = False):
    """Join family(0), family(1), ... until it stops growing.

    The partial join is accepted once it has been unchanged for
    max(|ambient|, period) consecutive indices (at least one), so a
    periodic family is always swept through a whole period.  A period of
    None means the family is not periodic.  When each member is a function
    of the previous one (`recurrent`), the sweep also stops as soon as a
    member repeats an earlier one, since everything after is a repeat.
    Returns (join, N), N being the first index after which the join never
    changed.
    """
    period = period or 0
    window = max(len(ambient), period, 1)
    guard = len(ambient) ** 2 + period + window
    acc = frozenset()
    seen = set()
    last_change = 0
    i = 0
    while True:
        member = family(i)
        if member.ambient != ambient:
            raise ShapeError("family member over the wrong ambient object")
        grown = acc | member.subset
        if grown != acc:
            acc = grown
            last_change = i
        if i - last_change >= window or (recurrent and member.subset in seen):
            return Subobj(ambient, acc, check=False), last_change
        seen.add(member.subset)
        i += 1
        if i > guard:
            raise JoinDiverged(f"no stable join after {guard} indices")


# ---------------------------------------------------------------- quantifiers along a map


def inv_image(f: FinMor, y: Subobj) -> Subobj:
    if y.ambient != f.cod:
        raise ShapeError("preimage of a subobject of another object")
    return Subobj(f.dom, (x for x in f.dom if f.table[x] in y.subset), check=False)


def exists_f(f: FinMor, x: Subobj) -> Subobj:
    """{b | some a in x has f a = b}."""
    if x.ambient != f.dom:
        raise ShapeError("direct image of a subobject of another object")
    return Subobj(f.cod, {f.table[a] for a in x.subset}, check=False)


def forall_f(f: FinMor, x: Subobj) -> Subobj:
    """{b | every a with f a = b lies in x}."""
    if x.ambient != f.dom:
        raise ShapeError("universal image of a subobject of another object")
    bad = {f.table[a] for a in f.dom if a not in x.subset}
    return Subobj(f.cod, (b for b in f.cod if b not in bad), check=False)


# ---------------------------------------------------------------- classifier and exponentials


def omega() -> FinObj:
    return FinObj([False, True])


def power(a: FinObj) -> FinObj:
    elems = a.elements
    return FinObj(frozenset(c) for k in range(len(elems) + 1) for c in combinations(elems, k))


def char_of(s: Subobj) -> FinMor:
    return FinMor(s.ambient, omega(), {x: x in s.subset for x in s.ambient}, check=False)


def subobj_of_char(chi: FinMor) -> Subobj:
    if chi.cod != omega():
        raise ShapeError("characteristic map must land in Omega")
    return Subobj(chi.dom, (x for x in chi.dom if chi.table[x]), check=False)


def _factors(p: FinObj):
    left = FinObj(e[0] for e in p)
    right = FinObj(e[1] for e in p)
    return left, right


def transpose(f: FinMor, a: FinObj, b: FinObj) -> FinMor:
    """f: a x b -> Omega  to  b -> Omega^a."""
    ab, _, _ = product(a, b)
    if f.dom != ab or f.cod != omega():
        raise ShapeError("transpose expects a map a x b -> Omega")
    pa = power(a)
    table = {y: frozenset(x for x in a if f.table[(x, y)]) for y in b}
    return FinMor(b, pa, table, check=False)


def evaluation(a: FinObj) -> FinMor:
    dom, _, _ = product(a, power(a))
    return FinMor(dom, omega(), {(x, s): x in s for x, s in dom}, check=False)


def untranspose(g: FinMor, a: FinObj) -> FinMor:
    """b -> Omega^a  back to  a x b -> Omega, as Eval after (id x g)."""
    return compose(evaluation(a), product_map(identity(a), g))


def membership_subobject(a: FinObj) -> Subobj:
    return subobj_of_char(evaluation(a))
