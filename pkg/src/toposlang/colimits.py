"""Initial object, coproducts, coequalisers and finite colimits built from
formulas of the internal language, interpreted in finite sets and checked
against direct set-theoretic constructions.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from itertools import product as cartesian

from . import finset as fs
from .context import Context
from .finset import FinMor, FinObj, Subobj
from .interpret import Environment, Evaluator, interp_formula, interp_term, semantic_entails
from .syntax import (
    And, App, Base, Bot, Comprehension, CountableOr, Eq, Exists, Family, Fst,
    Member, Or, Pair, Power, Product, Signature, Snd, Top, TypingError, Unit,
    Var, all_names, disj, empty, fresh_name, is_term, product_type,
    register_family, singleton, substitute, tuple_term, conj,
)


class VerificationError(AssertionError):
    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


# ---------------------------------------------------------------- the chain family
#
# CountableOr("chain", ((a, A),), (t0, t1, b1, b2)): member i says that b1 and
# b2 are joined by a zig-zag of i + 1 links, each link an a with its two ends
# t0[a], t1[a] in either orientation.  Intermediate points are quantified one
# link at a time so that shared tails are evaluated once.


def _check_chain(cor):
    if len(cor.bound) != 1 or len(cor.params) != 4 or not all(is_term(t) for t in cor.params):
        raise TypingError("chain family binds one variable and takes four terms")
    t0, t1, b1, b2 = cor.params
    if not t0.type == t1.type == b1.type == b2.type:
        raise TypingError("chain terms must share one type")
    (a, _), = cor.bound
    if a in b1.free_names() or a in b2.free_names():
        raise TypingError("chain endpoints may not mention the link variable")


def _stem(avoid, base):
    stem = base
    pattern = lambda s: re.compile(re.escape(s) + r"\d+$")
    while any(pattern(stem).match(n) for n in avoid):
        stem += "_"
    return stem


def _chain_state(cor):
    state = cor.__dict__.get("_chain")
    if state is None:
        (a, tau), = cor.bound
        t0, t1, b1, b2 = cor.params
        avoid = set()
        for t in cor.params:
            avoid |= all_names(t)
        avoid.add(a)
        state = {
            "a": _stem(avoid, "a"),
            "c": _stem(avoid, "c"),
            "levels": [],
        }
        object.__setattr__(cor, "_chain", state)
    return state


def _ends(cor, av):
    (a, tau), = cor.bound
    t0, t1 = cor.params[:2]
    v = Var(a, tau)
    return substitute(t0, [(v, av)]), substitute(t1, [(v, av)])


def chain_link(cor, left, av, right):
    """left and right are the two ends of the link named by av, either way round."""
    e0, e1 = _ends(cor, av)
    return Or(And(Eq(left, e0), Eq(right, e1)), And(Eq(left, e1), Eq(right, e0)))


def _chain_level(cor, j):
    """Formula in the free variable c_j: a chain of j links from c_j to b2."""
    state = _chain_state(cor)
    levels = state["levels"]
    (a, tau), = cor.bound
    b2 = cor.params[3]
    btype = b2.type
    while len(levels) <= j:
        k = len(levels)
        here = Var(f"{state['c']}{k}", btype)
        if k == 0:
            levels.append(Eq(here, b2))
        else:
            av = Var(f"{state['a']}{k}", tau)
            prev = Var(f"{state['c']}{k - 1}", btype)
            body = And(chain_link(cor, here, av, prev), levels[k - 1])
            levels.append(Exists(av.name, tau, Exists(prev.name, btype, body)))
    return levels[j]


def _chain_member(cor, i):
    state = _chain_state(cor)
    (a, tau), = cor.bound
    b1 = cor.params[2]
    n = i + 1
    av = Var(f"{state['a']}{n}", tau)
    prev = Var(f"{state['c']}{n - 1}", b1.type)
    body = And(chain_link(cor, b1, av, prev), _chain_level(cor, n - 1))
    return Exists(av.name, tau, Exists(prev.name, b1.type, body))


# member i + 1 is one link composed with member i, so the family is recurrent
register_family("chain", Family(_check_chain, _chain_member, lambda cor: None, recurrent=True))


def chain_family(t0, t1, a: Var, b1, b2) -> CountableOr:
    return CountableOr("chain", ((a.name, a.type),), (t0, t1, b1, b2))


def chain_literal(t0, t1, a: Var, b1, b2, n: int):
    """The length-n disjunct written out over all orientation vectors."""
    avoid = all_names(t0) | all_names(t1) | all_names(b1) | all_names(b2) | {a.name}
    stem = _stem(avoid, "a")
    links = [Var(f"{stem}{k}", a.type) for k in range(1, n + 1)]
    ends = [(substitute(t0, [(a, v)]), substitute(t1, [(a, v)])) for v in links]
    disjuncts = []
    for alpha in cartesian((0, 1), repeat=n):
        eqs = [Eq(b1, ends[0][alpha[0]])]
        for k in range(n - 1):
            eqs.append(Eq(ends[k][1 - alpha[k]], ends[k + 1][alpha[k + 1]]))
        eqs.append(Eq(ends[-1][1 - alpha[-1]], b2))
        body = conj(*eqs)
        for v in reversed(links):
            body = Exists(v.name, v.type, body)
        disjuncts.append(body)
    return disj(*disjuncts)


# ---------------------------------------------------------------- crucial terms


def union_term(z1, z2, var: str = "u") -> Comprehension:
    """{u | u in z1 or u in z2}."""
    if z1.type != z2.type or not isinstance(z1.type, Power):
        raise TypingError("union of terms of different power types")
    tau = z1.type.inner
    names = all_names(z1) | all_names(z2)
    u = var if var not in names else fresh_name(var, names)
    uv = Var(u, tau)
    return Comprehension(u, tau, Or(Member(uv, z1), Member(uv, z2)))


def union_all(terms, tau):
    terms = list(terms)
    if not terms:
        return empty(tau)
    out = terms[0]
    for t in terms[1:]:
        out = union_term(out, t)
    return out


def pushforward_term(sig: Signature, fun: str, z, var_a: str = "a", var_b: str = "b") -> Comprehension:
    """{b | exists a. a in z and b = f a}."""
    dom, cod = sig.functions[fun]
    if z.type != Power(dom):
        raise TypingError(f"pushforward along {fun} of a term of type {z.type}")
    names = all_names(z)
    a = var_a if var_a not in names else fresh_name(var_a, names)
    b = var_b if var_b not in names | {a} else fresh_name(var_b, names | {a})
    av, bv = Var(a, dom), Var(b, cod)
    return Comprehension(b, cod, Exists(a, dom, And(Member(av, z), Eq(bv, App(fun, av, cod)))))


def tuple_projections(v, count: int):
    """Components of a left-associated tuple variable of `count` factors."""
    if count == 0:
        return []
    if count == 1:
        return [v]
    parts = []
    cur = v
    for _ in range(count - 1):
        parts.append(Snd(cur))
        cur = Fst(cur)
    parts.append(cur)
    return list(reversed(parts))


def unpack_tuple(label, count: int) -> tuple:
    if count == 0:
        return ()
    out = []
    for _ in range(count - 1):
        label, last = label
        out.append(last)
    out.append(label)
    return tuple(reversed(out))


# ---------------------------------------------------------------- diagrams and cocones


@dataclass(frozen=True)
class DiagramSpec:
    objects: tuple  # base type names
    morphisms: tuple = ()  # (name, dom, cod)

    def __post_init__(self):
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("repeated object name")
        for name, dom, cod in self.morphisms:
            if dom not in self.objects or cod not in self.objects:
                raise ValueError(f"morphism {name} between unknown objects")

    def signature(self) -> Signature:
        return Signature(
            set(self.objects),
            {name: (Base(dom), Base(cod)) for name, dom, cod in self.morphisms},
        )

    def environment(self, sets: dict, tables: dict) -> Environment:
        return Environment(self.signature(), sets, tables)

    def to_json(self):
        return {"objects": list(self.objects), "morphisms": [list(m) for m in self.morphisms]}


class CoconeSpec:
    """Legs from every object of a diagram into an apex, commuting with its morphisms."""

    def __init__(self, apex: FinObj, legs: dict, diagram: DiagramSpec, env: Environment):
        self.apex = apex
        self.legs = dict(legs)
        for name in diagram.objects:
            leg = self.legs.get(name)
            if leg is None:
                raise VerificationError(f"cocone has no leg for {name}")
            if leg.dom != env.base[name] or leg.cod != apex:
                raise VerificationError(f"leg for {name} has the wrong shape")
        for name, dom, cod in diagram.morphisms:
            f = env.funs[name]
            if fs.compose(self.legs[cod], f) != self.legs[dom]:
                raise VerificationError(f"cocone legs do not commute with {name}")

    def to_json(self):
        return {"apex": self.apex.to_json(), "legs": {k: v.to_json() for k, v in self.legs.items()}}


@dataclass
class ColimitResult:
    object: FinObj
    cocone: CoconeSpec
    construction_trace: dict
    verification: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "object": self.object.to_json(),
            "size": len(self.object),
            "cocone": self.cocone.to_json(),
            "trace": self.construction_trace,
            "verification": self.verification,
        }


def _all_maps(dom: FinObj, cod: FinObj):
    for values in cartesian(cod.elements, repeat=len(dom)):
        yield FinMor(dom, cod, dict(zip(dom.elements, values)), check=False)


def _leg_plan(diagram: DiagramSpec):
    """Objects whose legs are chosen freely, and (object, morphism, target) for
    legs forced as leg(target) after the morphism, in a usable order."""
    fixed, derived = set(), []
    free = [o for o in diagram.objects if not any(d == o for _, d, _ in diagram.morphisms)]
    fixed.update(free)
    while len(fixed) < len(diagram.objects):
        step = next(((d, f, c) for f, d, c in diagram.morphisms if d not in fixed and c in fixed), None)
        if step is None:
            # a cycle with nothing fixed yet: choose one of its legs freely
            o = next(o for o in diagram.objects if o not in fixed)
            free.append(o)
            fixed.add(o)
        else:
            derived.append(step)
            fixed.add(step[0])
    return free, derived


def cocones(diagram: DiagramSpec, env: Environment, cap: int, limit: int = 10**5, samples: int = 500, seed: int = 0):
    """Cocones with apex sizes 0..cap: all of them if at most `limit`, else a sample.

    Returns (list of CoconeSpec, exhaustive flag).  Samples are drawn as
    composites of the set-theoretic colimit cocone with random maps.
    """
    free, derived = _leg_plan(diagram)
    sizes = [len(env.base[o]) for o in free]
    total = 0
    for k in range(cap + 1):
        n = 1
        for s in sizes:
            n *= k**s
        total += n
    out = []
    if total <= limit:
        for k in range(cap + 1):
            apex = FinObj(range(k))
            choices = [list(_all_maps(env.base[o], apex)) for o in free]
            for legs in cartesian(*choices):
                named = dict(zip(free, legs))
                for o, f, c in derived:
                    named[o] = fs.compose(named[c], env.funs[f])
                if all(fs.compose(named[c], env.funs[f]) == named[d] for f, d, c in diagram.morphisms):
                    out.append(CoconeSpec(apex, named, diagram, env))
        return out, True
    rng = random.Random(seed)
    obj, oracle = oracle_colimit(diagram, env)
    for _ in range(samples):
        k = rng.randint(0, cap)
        apex = FinObj(range(k))
        if k == 0 and len(obj):
            continue
        h = FinMor(obj, apex, {e: rng.randrange(k) for e in obj}, check=False)
        out.append(CoconeSpec(apex, {o: fs.compose(h, leg) for o, leg in oracle.legs.items()}, diagram, env))
    return out, False


def mediating_maps(obj: FinObj, legs: dict, cocone: CoconeSpec):
    """(forced map or None, number of mediating maps) for one cocone."""
    forced = {e: set() for e in obj}
    for name, leg in legs.items():
        g = cocone.legs[name]
        for x in leg.dom:
            forced[leg.table[x]].add(g.table[x])
    if any(len(v) > 1 for v in forced.values()):
        return None, 0
    free = sum(1 for v in forced.values() if not v)
    count = len(cocone.apex) ** free
    if count != 1:
        return None, count
    return FinMor(obj, cocone.apex, {e: next(iter(v)) for e, v in forced.items()}, check=False), 1


def verify_universal_property(result: ColimitResult, diagram: DiagramSpec, env: Environment, cap: int = 3,
                              seed: int = 0, explicit=None, limit: int = 10**5, samples: int = 500) -> dict:
    """Every cocone must factor through result's cocone in exactly one way."""
    found, exhaustive = cocones(diagram, env, cap, limit, samples, seed)
    failures = []
    for cocone in found:
        m, count = mediating_maps(result.object, result.cocone.legs, cocone)
        if count != 1:
            failures.append({"cocone": cocone.to_json(), "mediating_maps": count})
            continue
        if explicit is not None:
            built = explicit(cocone)
            if built != m:
                failures.append({"cocone": cocone.to_json(), "explicit_construction": "disagrees"})
    report = {"cocones": len(found), "exhaustive": exhaustive, "failures": failures, "cap": cap}
    if failures:
        raise VerificationError(f"{len(failures)} cocone(s) without a unique mediating map", failures[0])
    return report


# ---------------------------------------------------------------- the set-theoretic oracle


def oracle_colimit(diagram: DiagramSpec, env: Environment):
    """Disjoint union of the objects modulo the equivalence generated by the morphisms."""
    objs = [env.base[o] for o in diagram.objects]
    disjoint, inj = fs.coproduct(objs)
    index = {o: i for i, o in enumerate(diagram.objects)}
    pairs = []
    for name, dom, cod in diagram.morphisms:
        f = env.funs[name]
        pairs += [((index[dom], x), (index[cod], f.table[x])) for x in f.dom]
    obj, q = fs.quotient(disjoint, pairs)
    legs = {o: fs.compose(q, inj[index[o]]) for o in diagram.objects}
    return obj, CoconeSpec(obj, legs, diagram, env)


def isomorphic_over_cocones(ours: CoconeSpec, theirs: CoconeSpec) -> bool:
    """A bijection between the apexes commuting with every leg."""
    h = {}
    for name, leg in ours.legs.items():
        other = theirs.legs[name]
        for x in leg.dom:
            e, f = leg.table[x], other.table[x]
            if h.setdefault(e, f) != f:
                return False
    return set(h) == set(ours.apex) and len(set(h.values())) == len(h) == len(theirs.apex)


# ---------------------------------------------------------------- helpers


def _subobject(var: Var, p, env: Environment, method: str) -> Subobj:
    return interp_formula(Context([(var.name, var.type)]), p, env, method)


def _term_map(var: Var, t, env: Environment, method: str) -> FinMor:
    return interp_term(Context([(var.name, var.type)]), t, env, method)


def singleton_formula(z: Var, u_name: str = "u"):
    """exists u. z = {u}, for z of type PU."""
    tau = z.type.inner
    u = Var(u_name if u_name != z.name else fresh_name(u_name, {z.name}), tau)
    return Exists(u.name, tau, Eq(z, singleton(u)))


def singleton_embedding(env: Environment, tau, method: str = "pointwise"):
    """The object of singletons in PU and the map u -> {u}; checks it is a bijection."""
    z = Var("z", Power(tau))
    sub = _subobject(z, singleton_formula(z), env, method)
    u = Var("u", tau)
    emb = _term_map(u, singleton(u), env, method)
    values = list(emb.table.values())
    if set(values) != set(sub.subset) or len(set(values)) != len(values):
        raise VerificationError("singleton embedding is not a bijection")
    expected = {frozenset([x]) for x in env.type_obj(tau)}
    if set(sub.subset) != expected:
        raise VerificationError("singleton subobject differs from the singleton labels")
    return sub, emb


def initial_object(env: Environment, targets=(), method: str = "categorical") -> dict:
    """Interpret bottom over the one-variable context on the unit type.

    For each target U (a base type name) the unique map is obtained through
    the empty subset of U and the object of singletons.
    """
    star = Var("s", Unit())
    sub = _subobject(star, Bot(), env, method)
    obj = sub.as_object()
    maps = {}
    for name in targets:
        tau = Base(name)
        z = Var("z", Power(tau))
        # the empty set lies in the object of singletons, read through the
        # membership rule so that P(PU) is never built
        claim = substitute(singleton_formula(z), [(z, empty(tau))])
        ctx = Context([(star.name, star.type)])
        if not semantic_entails(ctx, Bot(), claim, env, method):
            raise VerificationError("bottom does not entail that the empty set is a singleton")
        u = env.base[name]
        count = sum(1 for _ in _all_maps(obj, u))
        if count != 1:
            raise VerificationError(f"{count} maps from the initial object to {name}")
        maps[name] = FinMor(obj, u, {}, check=False)
    return {"object": obj, "maps": maps, "trace": {"formula": "bot", "context": "s : 1"}}


# ---------------------------------------------------------------- coproducts


def coproduct_formula(types, var: str = "z"):
    """The coproduct formula over z of type (..(PA1 x PA2) x ..) x PAn.

    Returns (z, formula, injections) where injections[i] = (a_i, iota_i).
    """
    types = list(types)
    z = Var(var, product_type([Power(t) for t in types]))
    injections = []
    disjuncts = []
    for i, tau in enumerate(types):
        a = Var(f"a{i + 1}", tau)
        parts = [singleton(a) if j == i else empty(t, f"x{j + 1}") for j, t in enumerate(types)]
        iota = tuple_term(parts)
        injections.append((a, iota))
        disjuncts.append(Exists(a.name, tau, Eq(z, iota)))
    return z, disj(*disjuncts), injections


def _check_object_has(ctx_var: Var, term, z: Var, formula, env, method):
    """The sequent |-[a] term in {z | formula}, semantically."""
    ctx = Context([(ctx_var.name, ctx_var.type)])
    claim = Member(term, Comprehension(z.name, z.type, formula))
    if not semantic_entails(ctx, Top(), claim, env, method):
        raise VerificationError(f"inclusion sequent fails for {ctx_var.name}")


def nary_coproduct(names, env: Environment, cap: int = 3, method: str = "pointwise", seed: int = 0,
                   verify: bool = True) -> ColimitResult:
    names = list(names)
    if not names:
        raise ValueError("coproduct of no objects: use initial_object")
    types = [Base(n) for n in names]
    z, formula, injections = coproduct_formula(types)
    sub = _subobject(z, formula, env, method)
    obj = sub.as_object()
    legs = {}
    for name, (a, iota) in zip(names, injections):
        _check_object_has(a, iota, z, formula, env, method)
        m = _term_map(a, iota, env, method)
        legs[name] = FinMor(m.dom, obj, m.table)
    diagram = DiagramSpec(tuple(names))
    cocone = CoconeSpec(obj, legs, diagram, env)
    trace = {"formula": str(formula), "variable": f"{z.name} : {z.type}"}
    trace.update({f"injection {n}": str(iota) for n, (_, iota) in zip(names, injections)})
    result = ColimitResult(obj, cocone, trace)
    if verify:
        result.verification = _verify_coproduct(result, names, env, cap, seed)
    return result


def binary_coproduct(left: str, right: str, env: Environment, **kwargs) -> ColimitResult:
    return nary_coproduct([left, right], env, **kwargs)


def _verify_coproduct(result, names, env, cap, seed):
    legs = result.cocone.legs
    total = sum(len(env.base[n]) for n in names)
    if len(result.object) != total:
        raise VerificationError(f"coproduct has {len(result.object)} elements, expected {total}")
    seen = set()
    for n in names:
        values = list(legs[n].table.values())
        if len(set(values)) != len(values):
            raise VerificationError(f"injection of {n} is not injective")
        if seen & set(values):
            raise VerificationError("injections overlap")
        seen |= set(values)
    if seen != set(result.object):
        raise VerificationError("injections are not jointly surjective")

    def explicit(cocone):
        # union of the pushforwards of the components, then read off the point
        table = {}
        for e in result.object:
            parts = unpack_tuple(e, len(names))
            image = set()
            for n, part in zip(names, parts):
                image |= {cocone.legs[n].table[x] for x in part}
            if len(image) != 1:
                return None
            table[e] = next(iter(image))
        return FinMor(result.object, cocone.apex, table, check=False)

    report = verify_universal_property(result, DiagramSpec(tuple(names)), env, cap, seed, explicit)
    report.update({"size": len(result.object), "expected_size": total})
    return report


# ---------------------------------------------------------------- coequalisers


def relation_term(t0, t1, a: Var, var: str = "w"):
    """{w : B x B | exists b1 b2. w = <b1, b2> and (b1 = b2 or some chain joins them)}."""
    if t0.type != t1.type:
        raise TypingError("relation between terms of different types")
    for t in (t0, t1):
        extra = {n for n in t.free_names() if n != a.name}
        if extra:
            raise TypingError(f"terms may only mention {a.name}, found {sorted(extra)}")
    btype = t0.type
    avoid = all_names(t0) | all_names(t1) | {a.name}
    b1 = Var(fresh_name("b", avoid), btype)
    b2 = Var(fresh_name("b", avoid | {b1.name}), btype)
    w = Var(var if var not in avoid | {b1.name, b2.name} else fresh_name(var, avoid), Product(btype, btype))
    chains = chain_family(t0, t1, a, b1, b2)
    body = Exists(b1.name, btype, Exists(b2.name, btype, And(Eq(w, Pair(b1, b2)), Or(Eq(b1, b2), chains))))
    return Comprehension(w.name, w.type, body), chains


def class_term(b: Var, relation):
    """{b' | <b, b'> in R}."""
    names = all_names(relation) | {b.name}
    b2 = Var(fresh_name(b.name, names), b.type)
    return Comprehension(b2.name, b.type, Member(Pair(b, b2), relation))


def coequalizer_formula(t0, t1, a: Var, var: str = "z"):
    """exists b. z = [b], for z of type PB."""
    btype = t0.type
    relation, chains = relation_term(t0, t1, a)
    avoid = all_names(relation) | {var}
    b = Var(fresh_name("b", avoid), btype)
    cls = class_term(b, relation)
    z = Var(var, Power(btype))
    return z, Exists(b.name, btype, Eq(z, cls)), b, cls, relation, chains


def _stabilization(env, relation, btype):
    """Evaluate the relation once, reading the chain join's stabilization index."""
    ev = Evaluator(env)
    w = Var(relation.var, relation.var_type)
    dom = env.type_obj(btype)
    related = {(x, y) for x in dom for y in dom if ev.holds(relation.body, {w.name: (x, y)})}
    return related, max(ev.join_indices.values(), default=0)


def coequalizer(t0, t1, a: Var, env: Environment, cap: int = 3, method: str = "pointwise",
                seed: int = 0, verify: bool = True, diagram=None) -> ColimitResult:
    """Coequaliser of a:A . t0 and a:A . t1 as the object of classes in PB."""
    z, formula, b, cls, relation, chains = coequalizer_formula(t0, t1, a)
    btype = t0.type
    sub = _subobject(z, formula, env, method)
    obj = sub.as_object()
    _check_object_has(b, cls, z, formula, env, method)
    cmap = _term_map(b, cls, env, method)
    c = FinMor(cmap.dom, obj, cmap.table)
    f0 = _term_map(a, t0, env, method)
    f1 = _term_map(a, t1, env, method)
    if fs.compose(c, f0) != fs.compose(c, f1):
        raise VerificationError("c does not coequalise the two maps")
    if set(c.table.values()) != set(obj):
        raise VerificationError("c is not surjective")
    related, index = _stabilization(env, relation, btype)
    trace = {
        "relation": str(relation),
        "class": str(cls),
        "formula": str(formula),
        "variable": f"{z.name} : {z.type}",
    }
    extras = {"c": c, "f0": f0, "f1": f1, "stabilization_index": index, "relation_pairs": related}
    sig_env = None
    if diagram is None:
        # the parallel pair as a diagram of two fresh symbols named by their tables
        diagram, names = _pair_diagram(env, a.type, btype)
        pair_sig = Signature(set(names), {"f0": (a.type, btype), "f1": (a.type, btype)})
        sig_env = env.extended(pair_sig, funs={"f0": f0, "f1": f1})
    else:
        names = diagram.objects
    src, tgt = names
    legs = {src: fs.compose(c, f0), tgt: c}
    if sig_env is None:
        sig_env = env
    cocone = CoconeSpec(obj, legs, diagram, sig_env)
    result = ColimitResult(obj, cocone, trace, extras=extras)
    if verify:
        result.verification = _verify_coequalizer(result, diagram, sig_env, cap, seed, c)
    return result


def _pair_diagram(env, atype, btype):
    if not isinstance(atype, Base) or not isinstance(btype, Base):
        raise TypingError("coequalisers are taken between base types")
    if atype == btype:
        raise ValueError("parallel pair with equal domain and codomain objects is not supported")
    return DiagramSpec((atype.name, btype.name), (("f0", atype.name, btype.name), ("f1", atype.name, btype.name))), (atype.name, btype.name)


def _verify_coequalizer(result, diagram, env, cap, seed, c):
    oracle_obj, oracle = oracle_colimit(diagram, env)
    if len(result.object) != len(oracle_obj):
        raise VerificationError(f"coequaliser has {len(result.object)} elements, oracle {len(oracle_obj)}")
    if not isomorphic_over_cocones(result.cocone, oracle):
        raise VerificationError("coequaliser is not isomorphic to the oracle over the cocones")
    tgt = diagram.objects[1]

    def explicit(cocone):
        phi = cocone.legs[tgt]
        table = {}
        for e in result.object:
            image = {phi.table[x] for x in e}
            if len(image) != 1:
                return None
            table[e] = next(iter(image))
        return FinMor(result.object, cocone.apex, table, check=False)

    report = verify_universal_property(result, diagram, env, cap, seed, explicit)
    report.update({"size": len(result.object), "oracle_size": len(oracle_obj),
                   "stabilization_index": result.extras["stabilization_index"]})
    return report


def coequalizer_of_maps(f: FinMor, g: FinMor, **kwargs) -> ColimitResult:
    """Coequaliser of two tables f, g: A -> B given as finite maps."""
    sig = Signature({"A", "B"}, {"f0": (Base("A"), Base("B")), "f1": (Base("A"), Base("B"))})
    env = Environment(sig, {"A": f.dom, "B": f.cod}, {"f0": f, "f1": g})
    a = Var("a", Base("A"))
    return coequalizer(App("f0", a, Base("B")), App("f1", a, Base("B")), a, env, **kwargs)


# ---------------------------------------------------------------- finite colimits


def colimit_terms(diagram: DiagramSpec):
    """The terms t0, t1 over variables Z_i : P(dom f_i), grouped by target object.

    A group with no members (no morphism into, or out of, an object) is the
    empty subset of that object.
    """
    sig = diagram.signature()
    zs = [Var(f"Z{i + 1}", Power(Base(dom))) for i, (_, dom, _) in enumerate(diagram.morphisms)]
    w_parts, y_parts = [], []
    for obj in diagram.objects:
        tau = Base(obj)
        w_parts.append(union_all([z for z, (_, d, _) in zip(zs, diagram.morphisms) if d == obj], tau))
        y_parts.append(union_all(
            [pushforward_term(sig, name, z) for z, (name, _, c) in zip(zs, diagram.morphisms) if c == obj], tau
        ))
    return zs, tuple_term(w_parts), tuple_term(y_parts)


def finite_colimit(diagram: DiagramSpec, env: Environment, cap: int = 3, method: str = "pointwise",
                   seed: int = 0, verify: bool = True, limit: int = 10**5, samples: int = 500) -> ColimitResult:
    if not diagram.objects:
        raise ValueError("empty diagram: use initial_object")
    doms = [Base(d) for _, d, _ in diagram.morphisms]
    cods = [Base(o) for o in diagram.objects]
    # the coproduct of the domains and of the objects, inside products of power types
    if doms:
        zd, dom_formula, _ = coproduct_formula(doms, "y")
        dom_obj = _subobject(zd, dom_formula, env, method).as_object()
    else:
        dom_formula, dom_obj = Bot(), fs.initial()
    zc, cod_formula, cod_inj = coproduct_formula(cods, "z")
    cod_obj = _subobject(zc, cod_formula, env, method).as_object()
    zs, t0, t1 = colimit_terms(diagram)
    ev = Evaluator(env)
    d0, d1 = {}, {}
    for p in dom_obj:
        asg = dict(zip([z.name for z in zs], unpack_tuple(p, len(zs))))
        v0, v1 = ev.value(t0, asg), ev.value(t1, asg)
        if v0 not in cod_obj or v1 not in cod_obj:
            raise VerificationError("t0 or t1 leaves the coproduct of the objects")
        d0[p], d1[p] = v0, v1
    # descend: the two coproducts become types and the descended maps symbols
    dom_t, cod_t = Base("Dom"), Base("Cod")
    while dom_t.name in diagram.objects or cod_t.name in diagram.objects:
        dom_t, cod_t = Base(dom_t.name + "_"), Base(cod_t.name + "_")
    desc_sig = Signature({dom_t.name, cod_t.name}, {"d0": (dom_t, cod_t), "d1": (dom_t, cod_t)})
    desc_env = Environment(
        desc_sig,
        {dom_t.name: dom_obj, cod_t.name: cod_obj},
        {"d0": FinMor(dom_obj, cod_obj, d0), "d1": FinMor(dom_obj, cod_obj, d1)},
    )
    x = Var("p", dom_t)
    coeq = coequalizer(App("d0", x, cod_t), App("d1", x, cod_t), x, desc_env, method=method, verify=False,
                       diagram=DiagramSpec((dom_t.name, cod_t.name), (("d0", dom_t.name, cod_t.name),
                                                                     ("d1", dom_t.name, cod_t.name))))
    obj = coeq.object
    c = coeq.extras["c"]
    legs = {}
    for name, (a, iota) in zip(diagram.objects, cod_inj):
        inj = _term_map(a, iota, env, method)
        inj = FinMor(inj.dom, cod_obj, inj.table)
        legs[name] = fs.compose(c, inj)
    cocone = CoconeSpec(obj, legs, diagram, env)
    trace = {
        "domain coproduct": str(dom_formula),
        "object coproduct": str(cod_formula),
        "t0": str(t0),
        "t1": str(t1),
        "context": ", ".join(f"{z.name} : {z.type}" for z in zs),
        "coequaliser": coeq.construction_trace["formula"],
    }
    extras = {"d0": desc_env.funs["d0"], "d1": desc_env.funs["d1"], "c": c,
              "stabilization_index": coeq.extras["stabilization_index"], "cod_object": cod_obj}
    result = ColimitResult(obj, cocone, trace, extras=extras)
    if verify:
        result.verification = _verify_colimit(result, diagram, env, cap, seed, limit, samples)
    return result


def _verify_colimit(result, diagram, env, cap, seed, limit, samples):
    oracle_obj, oracle = oracle_colimit(diagram, env)
    if len(result.object) != len(oracle_obj):
        raise VerificationError(f"colimit has {len(result.object)} elements, oracle {len(oracle_obj)}")
    if not isomorphic_over_cocones(result.cocone, oracle):
        raise VerificationError("colimit is not isomorphic to the oracle over the cocones")
    n = len(diagram.objects)

    def explicit(cocone):
        table = {}
        for e in result.object:
            image = set()
            for point in e:
                for name, part in zip(diagram.objects, unpack_tuple(point, n)):
                    image |= {cocone.legs[name].table[x] for x in part}
            if len(image) != 1:
                return None
            table[e] = next(iter(image))
        return FinMor(result.object, cocone.apex, table, check=False)

    report = verify_universal_property(result, diagram, env, cap, seed, explicit, limit, samples)
    report.update({"size": len(result.object), "oracle_size": len(oracle_obj)})
    return report


def full_product_classes(diagram: DiagramSpec, env: Environment):
    """Classes of the object-coproduct points under the chain relation of t0, t1
    taken over the whole product of power types (feasible only for tiny diagrams).

    Returns a dict point -> frozenset of related coproduct points.
    """
    zs, t0, t1 = colimit_terms(diagram)
    types = [z.type for z in zs]
    big = Var("Zs", product_type(types))
    comps = tuple_projections(big, len(zs))
    bind = list(zip(zs, comps))
    s0, s1 = substitute(t0, bind), substitute(t1, bind)
    relation, _ = relation_term(s0, s1, big)
    cods = [Base(o) for o in diagram.objects]
    zc, cod_formula, _ = coproduct_formula(cods, "z")
    points = _subobject(zc, cod_formula, env, "pointwise").elements()
    ev = Evaluator(env)
    w = relation.var
    return {
        p: frozenset(q for q in points if ev.holds(relation.body, {w: (p, q)}))
        for p in points
    }
