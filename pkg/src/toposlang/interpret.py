"""Interpretation of the internal language in finite sets.

Two interchangeable strategies compute the same canonical subobjects:

* ``categorical`` follows the clauses literally: projections, pairings,
  equalizers, Heyting operations, images and universal images along the
  projection dropping a variable, transposes of characteristic maps, and
  preimages of the membership subobject.
* ``pointwise`` decides membership of each point of the context carrier by
  evaluating the formula there.  Subformula results are memoised on the
  values of their own free variables, and existential witnesses are read
  off equations when possible, which keeps big power types tractable.
"""
from __future__ import annotations

from typing import Iterable

from . import finset as fs
from .context import Context
from .finset import FinMor, FinObj, Subobj
from .syntax import (
    And, App, Base, Bot, Comprehension, CountableOr, Eq, Exists, Forall, Fst,
    Implies, Member, Omega, Or, Pair, Product, Rel, Signature, Snd, Star,
    Top, TypeExpr, Unit, Var, all_names, fresh_name, substitute,
)

MAX_ELEMENTS = 1 << 20


class CarrierTooLarge(RuntimeError):
    pass


class SemanticMismatch(AssertionError):
    """Two computations that must agree did not."""


class Environment:
    """Finite sets, tables and subsets for the symbols of a signature."""

    def __init__(self, sig: Signature, base: dict, funs: dict | None = None, rels: dict | None = None):
        self.sig = sig
        self.base = {k: v if isinstance(v, FinObj) else FinObj(v) for k, v in base.items()}
        self._types: dict = {}
        missing = set(sig.base_types) - set(self.base)
        if missing:
            raise KeyError(f"unassigned base types {sorted(missing)}")
        self.funs = {}
        for name, (dom, cod) in sig.functions.items():
            f = (funs or {}).get(name)
            if f is None:
                raise KeyError(f"unassigned function symbol {name}")
            if not isinstance(f, FinMor):
                f = FinMor(self.type_obj(dom), self.type_obj(cod), f)
            if f.dom != self.type_obj(dom) or f.cod != self.type_obj(cod):
                raise fs.ShapeError(f"table for {name} has the wrong shape")
            self.funs[name] = f
        self.rels = {}
        for name, carrier in sig.relations.items():
            r = (rels or {}).get(name)
            if r is None:
                raise KeyError(f"unassigned relation symbol {name}")
            if not isinstance(r, Subobj):
                r = Subobj(self.type_obj(carrier), r)
            if r.ambient != self.type_obj(carrier):
                raise fs.ShapeError(f"subset for {name} has the wrong ambient object")
            self.rels[name] = r

    def type_size(self, tau: TypeExpr) -> int:
        if isinstance(tau, Base):
            return len(self.base[tau.name])
        if isinstance(tau, Unit):
            return 1
        if isinstance(tau, Omega):
            return 2
        if isinstance(tau, Product):
            return self.type_size(tau.left) * self.type_size(tau.right)
        n = self.type_size(tau.inner)
        return 2**n if n < 64 else MAX_ELEMENTS * 2

    def type_obj(self, tau: TypeExpr) -> FinObj:
        obj = self._types.get(tau)
        if obj is not None:
            return obj
        if self.type_size(tau) > MAX_ELEMENTS:
            raise CarrierTooLarge(f"type {tau} has {self.type_size(tau)} elements")
        if isinstance(tau, Base):
            if tau.name not in self.base:
                raise KeyError(f"unassigned base type {tau.name}")
            obj = self.base[tau.name]
        elif isinstance(tau, Unit):
            obj = fs.terminal()
        elif isinstance(tau, Omega):
            obj = fs.omega()
        elif isinstance(tau, Product):
            obj, _, _ = fs.product(self.type_obj(tau.left), self.type_obj(tau.right))
        else:
            obj = fs.power(self.type_obj(tau.inner))
        self._types[tau] = obj
        return obj

    def extended(self, sig: Signature, base=None, funs=None, rels=None) -> "Environment":
        return Environment(
            self.sig.merged(sig),
            {**self.base, **(base or {})},
            {**self.funs, **(funs or {})},
            {**self.rels, **(rels or {})},
        )


def interp_type(tau: TypeExpr, env: Environment) -> FinObj:
    return env.type_obj(tau)


class ContextObject:
    """The carrier of a context: a left-associated product, one point if empty."""

    def __init__(self, ctx: Context, env: Environment):
        self.context = ctx
        self.env = env
        self.names = ctx.names()
        self._projections: dict = {}
        self.factors = [env.type_obj(t) for _, t in ctx]
        size = 1
        for f in self.factors:
            size *= len(f)
        if size > MAX_ELEMENTS:
            raise CarrierTooLarge(f"context carrier has {size} elements")
        if not self.factors:
            self.carrier = fs.terminal()
        else:
            obj = self.factors[0]
            for f in self.factors[1:]:
                obj, _, _ = fs.product(obj, f)
            self.carrier = obj

    def pack(self, values) -> object:
        values = tuple(values)
        if not values:
            return "*"
        point = values[0]
        for v in values[1:]:
            point = (point, v)
        return point

    def unpack(self, point) -> tuple:
        n = len(self.names)
        if n == 0:
            return ()
        out = []
        for _ in range(n - 1):
            point, v = point
            out.append(v)
        out.append(point)
        return tuple(reversed(out))

    def assignment(self, point) -> dict:
        return dict(zip(self.names, self.unpack(point)))

    def projection(self, name: str) -> FinMor:
        cached = self._projections.get(name)
        if cached is None:
            i = self.names.index(name)
            table = {p: self.unpack(p)[i] for p in self.carrier}
            cached = self._projections[name] = FinMor(self.carrier, self.factors[i], table, check=False)
        return cached

    def drop_last(self, shorter: "ContextObject") -> FinMor:
        return FinMor(
            self.carrier,
            shorter.carrier,
            {p: shorter.pack(self.unpack(p)[:-1]) for p in self.carrier},
            check=False,
        )


def _check_context(ctx: Context, x):
    if not ctx.covers(x.free()):
        missing = sorted(n for n, _ in set(x.free()) - ctx.as_set())
        raise ValueError(f"context {ctx} does not cover free variables {missing}")


def _bind_fresh(ctx: Context, binder):
    """Name under which binder's variable is appended to ctx, renaming on clash."""
    if binder.var not in ctx:
        return binder.var, binder.body
    new = fresh_name(binder.var, set(ctx.names()) | all_names(binder))
    body = substitute(binder.body, [(Var(binder.var, binder.var_type), Var(new, binder.var_type))])
    return new, body


# ---------------------------------------------------------------- categorical clauses


class _Categorical:
    def __init__(self, env: Environment):
        self.env = env
        self._ctx: dict = {}
        self._formulas: dict = {}
        self.join_indices: dict = {}

    def co(self, ctx: Context) -> ContextObject:
        co = self._ctx.get(ctx)
        if co is None:
            co = self._ctx[ctx] = ContextObject(ctx, self.env)
        return co

    def term(self, ctx: Context, t) -> FinMor:
        co = self.co(ctx)
        env = self.env
        if isinstance(t, Var):
            if len(ctx) == 1:
                return fs.identity(co.carrier)
            return co.projection(t.name)
        if isinstance(t, Star):
            return fs.to_terminal(co.carrier)
        if isinstance(t, Pair):
            return fs.pairing(self.term(ctx, t.left), self.term(ctx, t.right))
        if isinstance(t, (Fst, Snd)):
            inner = self.term(ctx, t.arg)
            prod, p1, p2 = fs.product(env.type_obj(t.arg.type.left), env.type_obj(t.arg.type.right))
            return fs.compose(p1 if isinstance(t, Fst) else p2, inner)
        if isinstance(t, App):
            return fs.compose(env.funs[t.fun], self.term(ctx, t.arg))
        if isinstance(t, Comprehension):
            var, body = _bind_fresh(ctx, t)
            wider = ctx.append(var, t.var_type)
            chi = fs.char_of(self.formula(wider, body))
            a = env.type_obj(t.var_type)
            wco = self.co(wider)
            table = {
                (x, s): chi.table[wco.pack(co.unpack(s) + (x,))]
                for x in a for s in co.carrier
            }
            swapped = FinMor(fs.product(a, co.carrier)[0], fs.omega(), table, check=False)
            return fs.transpose(swapped, a, co.carrier)
        raise TypeError(f"not a term: {t!r}")

    def formula(self, ctx: Context, p) -> Subobj:
        key = (ctx, p)
        out = self._formulas.get(key)
        if out is None:
            out = self._formulas[key] = self._formula(ctx, p)
        return out

    def _formula(self, ctx: Context, p) -> Subobj:
        co = self.co(ctx)
        env = self.env
        if isinstance(p, Top):
            return fs.top(co.carrier)
        if isinstance(p, Bot):
            return fs.bottom(co.carrier)
        if isinstance(p, Rel):
            return fs.inv_image(self.term(ctx, p.arg), env.rels[p.sym])
        if isinstance(p, Eq):
            return fs.equalizer(self.term(ctx, p.left), self.term(ctx, p.right))
        if isinstance(p, And):
            return fs.sub_meet(self.formula(ctx, p.left), self.formula(ctx, p.right))
        if isinstance(p, Or):
            return fs.sub_join(self.formula(ctx, p.left), self.formula(ctx, p.right))
        if isinstance(p, Implies):
            return fs.sub_implies(self.formula(ctx, p.left), self.formula(ctx, p.right))
        if isinstance(p, (Exists, Forall)):
            var, body = _bind_fresh(ctx, p)
            wider = ctx.append(var, p.var_type)
            inner = self.formula(wider, body)
            drop = self.co(wider).drop_last(co)
            if isinstance(p, Exists):
                return fs.image(fs.compose(drop, inner.inclusion()))
            return fs.forall_f(drop, inner)
        if isinstance(p, Member):
            a = env.type_obj(p.elem.type)
            pair = fs.pairing(self.term(ctx, p.elem), self.term(ctx, p.coll))
            return fs.inv_image(pair, fs.membership_subobject(a))
        if isinstance(p, CountableOr):
            join, n = fs.countable_join_fixpoint(
                lambda i: self.formula(ctx, p.member(i)), co.carrier, p.period, p.recurrent
            )
            self.join_indices[(ctx, p)] = n
            return join
        raise TypeError(f"not a formula: {p!r}")


# ---------------------------------------------------------------- pointwise evaluation


class Evaluator:
    """Evaluates terms and formulas at an assignment of values to variables."""

    def __init__(self, env: Environment):
        self.env = env
        self._memo: dict = {}
        self._keep: list = []
        self.join_indices: dict = {}

    def domain(self, tau: TypeExpr):
        return self.env.type_obj(tau).elements

    def _key(self, node, asg):
        return (id(node), tuple(asg[n] for n in node.free_names()))

    def value(self, t, asg: dict):
        if isinstance(t, Var):
            return asg[t.name]
        if isinstance(t, Star):
            return "*"
        if isinstance(t, Pair):
            return (self.value(t.left, asg), self.value(t.right, asg))
        if isinstance(t, Fst):
            return self.value(t.arg, asg)[0]
        if isinstance(t, Snd):
            return self.value(t.arg, asg)[1]
        if isinstance(t, App):
            return self.env.funs[t.fun].table[self.value(t.arg, asg)]
        if isinstance(t, Comprehension):
            key = self._key(t, asg)
            out = self._memo.get(key)
            if out is None:
                self._keep.append(t)
                out = frozenset(
                    x for x in self.domain(t.var_type) if self.holds(t.body, {**asg, t.var: x})
                )
                self._memo[key] = out
            return out
        raise TypeError(f"not a term: {t!r}")

    def holds(self, p, asg: dict) -> bool:
        if isinstance(p, Top):
            return True
        if isinstance(p, Bot):
            return False
        if isinstance(p, Eq):
            return self.value(p.left, asg) == self.value(p.right, asg)
        if isinstance(p, And):
            return self.holds(p.left, asg) and self.holds(p.right, asg)
        if isinstance(p, Or):
            return self.holds(p.left, asg) or self.holds(p.right, asg)
        if isinstance(p, Implies):
            return not self.holds(p.left, asg) or self.holds(p.right, asg)
        if isinstance(p, Rel):
            return self.value(p.arg, asg) in self.env.rels[p.sym].subset
        if isinstance(p, Member):
            if isinstance(p.coll, Comprehension):
                x = self.value(p.elem, asg)
                return self.holds(p.coll.body, {**asg, p.coll.var: x})
            return self.value(p.elem, asg) in self.value(p.coll, asg)
        key = self._key(p, asg)
        out = self._memo.get(key)
        if out is not None:
            return out
        self._keep.append(p)
        if isinstance(p, Exists):
            dom = self._candidates(p.var, p.body, asg)
            if dom is None:
                dom = self.domain(p.var_type)
            out = any(self.holds(p.body, {**asg, p.var: x}) for x in dom)
        elif isinstance(p, Forall):
            out = all(self.holds(p.body, {**asg, p.var: x}) for x in self.domain(p.var_type))
        elif isinstance(p, CountableOr):
            join, names = self.countable_join(p)
            out = tuple(asg[n] for n in names) in join.subset
        else:
            raise TypeError(f"not a formula: {p!r}")
        self._memo[key] = out
        return out

    def countable_join(self, p: CountableOr):
        """Join of the family over the carrier of its own free variables."""
        key = ("join", id(p))
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        ctx = Context(sorted(p.free()))
        co = ContextObject(ctx, self.env)
        names = ctx.names()
        tuples = {pt: co.unpack(pt) for pt in co.carrier}
        # the join is indexed by value tuples so lookups need not re-pack
        ambient = FinObj(tuples.values())

        def member(i):
            q = p.member(i)
            return Subobj(
                ambient,
                (v for v in tuples.values() if self.holds(q, dict(zip(names, v)))),
                check=False,
            )

        join, n = fs.countable_join_fixpoint(member, ambient, p.period, p.recurrent)
        self.join_indices[p] = n
        self._keep.append(p)
        self._memo[key] = (join, names)
        return join, names

    # -- witnesses read off equations

    def _candidates(self, x: str, body, asg):
        if isinstance(body, Eq):
            for a, b in ((body.left, body.right), (body.right, body.left)):
                if x in a.free_names() and x not in b.free_names():
                    found = _solve(x, a, self.value(b, asg))
                    if found is not None:
                        return found
            return None
        if isinstance(body, And):
            left = self._candidates(x, body.left, asg)
            right = self._candidates(x, body.right, asg)
            if left is None:
                return right
            if right is None:
                return left
            return left & right
        if isinstance(body, Or):
            left = self._candidates(x, body.left, asg)
            if left is None:
                return None
            right = self._candidates(x, body.right, asg)
            if right is None:
                return None
            return left | right
        return None


def _solve(x: str, pattern, v):
    """Values of x making pattern evaluate to v, when pattern is built from pairs."""
    if isinstance(pattern, Var):
        return {v} if pattern.name == x else None
    if isinstance(pattern, Pair):
        out = None
        for part, component in ((pattern.left, v[0]), (pattern.right, v[1])):
            if x in part.free_names():
                found = _solve(x, part, component)
                if found is not None:
                    out = found if out is None else out & found
        return out
    return None


# ---------------------------------------------------------------- public operations


def _categorical(env: Environment) -> "_Categorical":
    """One categorical interpreter per environment, so context objects are reused."""
    cat = env.__dict__.get("_categorical")
    if cat is None:
        cat = env._categorical = _Categorical(env)
    return cat


def _strategy(method: str, env: Environment):
    if method == "categorical":
        return _categorical(env)
    if method == "pointwise":
        return Evaluator(env)
    raise ValueError(f"unknown interpretation method {method!r}")


def interp_term(ctx: Context, t, env: Environment, method: str = "categorical") -> FinMor:
    _check_context(ctx, t)
    if method == "categorical":
        return _categorical(env).term(ctx, t)
    ev = Evaluator(env)
    co = ContextObject(ctx, env)
    table = {pt: ev.value(t, co.assignment(pt)) for pt in co.carrier}
    cod = env.type_obj(t.type) if env.type_size(t.type) <= MAX_ELEMENTS else FinObj(table.values())
    return FinMor(co.carrier, cod, table, check=False)


def interp_formula(ctx: Context, p, env: Environment, method: str = "categorical") -> Subobj:
    _check_context(ctx, p)
    if method == "categorical":
        return _categorical(env).formula(ctx, p)
    ev = _strategy(method, env)
    co = ContextObject(ctx, env)
    return Subobj(co.carrier, (pt for pt in co.carrier if ev.holds(p, co.assignment(pt))), check=False)


def context_carrier(ctx: Context, env: Environment) -> FinObj:
    return ContextObject(ctx, env).carrier


def semantic_entails(ctx: Context, p, q, env: Environment, method: str = "categorical") -> bool:
    return fs.sub_leq(interp_formula(ctx, p, env, method), interp_formula(ctx, q, env, method))


def tuple_morphism(maps) -> FinMor:
    """Left-associated pairing (m1, ..., mn), matching context carriers."""
    maps = list(maps)
    out = maps[0]
    for m in maps[1:]:
        out = fs.pairing(out, m)
    return out


def validate_substitution_lemma(ctx: Context, bindings, q, env: Environment, method: str = "categorical"):
    """Check that interpreting q[b := t] equals pulling back q along (t1, ..., tn).

    `bindings` is a list of (Var, term).  Returns the common subobject;
    raises SemanticMismatch otherwise.
    """
    if not bindings:
        return interp_formula(ctx, q, env, method)
    sigma = Context((b.name, b.type) for b, _ in bindings)
    direct = interp_formula(ctx, substitute(q, bindings), env, method)
    maps = [interp_term(ctx, t, env, method) for _, t in bindings]
    tup = tuple_morphism(maps)
    target = interp_formula(sigma, q, env, method)
    sig_carrier = context_carrier(sigma, env)
    tup = FinMor(tup.dom, sig_carrier, tup.table, check=False)
    pulled = fs.inv_image(tup, target)
    if direct != pulled:
        raise SemanticMismatch(
            f"substitution lemma fails: direct {sorted(map(fs.label_str, direct.subset))} "
            f"vs pullback {sorted(map(fs.label_str, pulled.subset))}"
        )
    return direct


class Counterexample(AssertionError):
    def __init__(self, rule, premises, conclusion, env):
        super().__init__(f"derived rule {rule} fails on an instance")
        self.rule = rule
        self.premises = premises
        self.conclusion = conclusion
        self.env = env


def sequent_holds(seq, env: Environment, method: str = "categorical") -> bool:
    return semantic_entails(seq.context, seq.lhs, seq.rhs, env, method)


def validate_derived_rule(rule: str, cases: Iterable, method: str = "categorical") -> int:
    """Check a derived rule on (premises, conclusion, env) cases and register it.

    Returns the number of cases examined; raises Counterexample if some
    case has all premises valid and the conclusion invalid.
    """
    from .sequents import register_derived

    count = 0
    for premises, conclusion, env in cases:
        count += 1
        if all(sequent_holds(s, env, method) for s in premises):
            if not sequent_holds(conclusion, env, method):
                raise Counterexample(rule, premises, conclusion, env)
    register_derived(rule)
    return count
