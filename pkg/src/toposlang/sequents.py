"""Sequents, proof trees and a node-by-node proof checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .context import Context
from .syntax import (
    And, Bot, Comprehension, CountableOr, Eq, Exists, Forall, Implies, Member,
    Or, Pair, Product, Signature, Top, TypingError, Var, alpha_eq, canonical,
    check_formula, substitute,
)


class Rule(str, Enum):
    Ax = "Ax"
    Cut = "Cut"
    Subst = "Subst"
    TopR = "TopR"
    BotL = "BotL"
    AndI = "AndI"
    AndEL = "AndEL"
    AndER = "AndER"
    OrI = "OrI"
    OrEL = "OrEL"
    OrER = "OrER"
    ImpI = "ImpI"
    ImpE = "ImpE"
    ForallI = "ForallI"
    ForallE = "ForallE"
    ExistsI = "ExistsI"
    ExistsE = "ExistsE"
    EqI = "EqI"
    EqE = "EqE"
    Mem1 = "Mem1"
    Mem2 = "Mem2"
    BigOrI = "BigOrI"
    BigOrE = "BigOrE"
    SetI = "SetI"
    SetE = "SetE"
    Derived = "Derived"
    Hyp = "Hyp"


ARITY = {
    Rule.Ax: 0, Rule.Cut: 2, Rule.Subst: 1, Rule.TopR: 0, Rule.BotL: 0,
    Rule.AndI: 2, Rule.AndEL: 1, Rule.AndER: 1, Rule.OrI: 2, Rule.OrEL: 1,
    Rule.OrER: 1, Rule.ImpI: 1, Rule.ImpE: 1, Rule.ForallI: 1, Rule.ForallE: 1,
    Rule.ExistsI: 1, Rule.ExistsE: 1, Rule.EqI: 0, Rule.EqE: 0, Rule.Mem1: 1,
    Rule.Mem2: 1, Rule.BigOrE: 1, Rule.SetI: 1, Rule.SetE: 1, Rule.Derived: 0,
    Rule.Hyp: 0,
}

# rules sound only because they were checked semantically
SEMANTIC_RULES = {Rule.Mem1, Rule.Mem2, Rule.BigOrI, Rule.BigOrE, Rule.SetI, Rule.SetE}


@dataclass(frozen=True)
class Sequent:
    context: Context
    lhs: object
    rhs: object

    def is_valid(self) -> bool:
        return self.context.covers(self.lhs.free()) and self.context.covers(self.rhs.free())

    def matches(self, other: "Sequent") -> bool:
        """Same sequent up to alpha-equivalence and reordering of the context."""
        return (
            self.context.same_entries(other.context)
            and alpha_eq(self.lhs, other.lhs)
            and alpha_eq(self.rhs, other.rhs)
        )

    def __str__(self):
        from .surface import pretty

        ctx = ", ".join(f"{n}:{t}" for n, t in self.context)
        return f"{pretty(self.lhs)} |-[{ctx}] {pretty(self.rhs)}"


@dataclass(frozen=True)
class ProofTree:
    conclusion: Sequent
    rule: Rule
    params: dict = field(default_factory=dict, compare=False)
    premises: tuple = ()

    def nodes(self):
        """All nodes, premises before their conclusion."""
        for p in self.premises:
            yield from p.nodes()
        yield self

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


class ProofError(Exception):
    def __init__(self, message, path=()):
        super().__init__(f"{message} (at node {list(path)})" if path else message)
        self.reason = message
        self.path = tuple(path)


# ---------------------------------------------------------------- derived-rule registry

_VALIDATED: set = set()
_DERIVED_SEQUENTS: dict = {}
_STABILITY: dict = {}


def register_derived(name: str):
    _VALIDATED.add(str(name))


def is_validated(name: str) -> bool:
    return str(name) in _VALIDATED


def register_derived_sequent(name: str, matcher):
    """Register a zero-premise derived rule; `matcher(sequent)` decides instances."""
    _DERIVED_SEQUENTS[name] = matcher


def register_stability(cor: CountableOr, index: int):
    """Record that the join of cor was found stable from `index` on."""
    key = canonical(cor)
    _STABILITY[key] = max(_STABILITY.get(key, 0), index)


def _require_validated(name: str):
    if not is_validated(name):
        from .derived import ensure_validated

        ensure_validated(name)


# ---------------------------------------------------------------- checking


def _fail(msg):
    raise ProofError(msg)


def _same(a, b, what):
    if not alpha_eq(a, b):
        _fail(f"{what} does not match")


def _same_ctx(a: Sequent, b: Sequent):
    if not a.context.same_entries(b.context):
        _fail("contexts differ")


def _one_extra(big: Context, small: Context):
    extra = big.as_set() - small.as_set()
    if len(extra) != 1 or not small.as_set() <= big.as_set():
        _fail("context must extend the other by exactly one variable")
    (name, tau), = extra
    if name in small:
        _fail(f"variable {name} already in context")
    return name, tau


def _conjuncts(p):
    out = []
    while isinstance(p, And):
        out.append(p.left)
        p = p.right
    out.append(p)
    return out


def _rebuild_conj(parts):
    out = parts[-1]
    for q in reversed(parts[:-1]):
        out = And(q, out)
    return out


def _check_eq_elim(c: Sequent) -> bool:
    parts = _conjuncts(c.lhs)
    for n in range(1, len(parts)):
        eqs, rest = parts[:n], _rebuild_conj(parts[n:])
        if not all(isinstance(e, Eq) for e in eqs):
            break
        for forward in (True, False):
            sources = [e.left if forward else e.right for e in eqs]
            targets = [e.right if forward else e.left for e in eqs]
            if not all(isinstance(s, Var) for s in sources):
                continue
            if len({s.name for s in sources}) != len(sources):
                continue
            try:
                result = substitute(rest, list(zip(sources, targets)))
            except TypingError:
                continue
            if alpha_eq(result, c.rhs):
                return True
    return False


def _is_iff(p):
    return (
        isinstance(p, And)
        and isinstance(p.left, Implies)
        and isinstance(p.right, Implies)
        and alpha_eq(p.left.left, p.right.right)
        and alpha_eq(p.left.right, p.right.left)
    )


def check_node(node: ProofTree, sig: Signature, hypotheses=()) -> None:
    """Raise ProofError unless node's conclusion follows from its premises by node.rule."""
    rule = Rule(node.rule)
    c = node.conclusion
    ps = [p.conclusion for p in node.premises]
    if rule == Rule.BigOrI:
        pass  # arity comes from the certificate
    elif len(ps) != ARITY[rule]:
        _fail(f"{rule.value} takes {ARITY[rule]} premise(s), got {len(ps)}")
    for name, tau in c.context:
        sig.check_type(tau)
    try:
        check_formula(c.lhs, sig)
        check_formula(c.rhs, sig)
    except TypingError as e:
        _fail(f"ill-formed conclusion: {e}")
    if not c.is_valid():
        _fail("context does not cover the free variables of the conclusion")
    if rule in SEMANTIC_RULES:
        _require_validated(rule.value)

    if rule == Rule.Ax:
        _same(c.lhs, c.rhs, "axiom sides")
    elif rule == Rule.Cut:
        p1, p2 = ps
        _same_ctx(p1, c)
        _same_ctx(p2, c)
        _same(p1.lhs, c.lhs, "cut left formula")
        _same(p2.rhs, c.rhs, "cut right formula")
        _same(p1.rhs, p2.lhs, "cut formula")
        if "cut" in node.params:
            _same(node.params["cut"], p1.rhs, "declared cut formula")
    elif rule == Rule.Subst:
        (p,) = ps
        bindings = list(node.params.get("bindings", ()))
        moved = {v.name for v, _ in bindings}
        for v, t in bindings:
            if v.type != t.type:
                _fail(f"binding {v.name} to a term of another type")
        for name, tau in p.context:
            if name not in moved and (name, tau) not in c.context.as_set():
                _fail(f"variable {name} of the premise context is missing")
        for v, t in bindings:
            if not c.context.covers(t.free()):
                _fail(f"substituted term for {v.name} is not in the new context")
        _same(substitute(p.lhs, bindings), c.lhs, "substituted left side")
        _same(substitute(p.rhs, bindings), c.rhs, "substituted right side")
    elif rule == Rule.TopR:
        if not isinstance(c.rhs, Top):
            _fail("right side must be top")
    elif rule == Rule.BotL:
        if not isinstance(c.lhs, Bot):
            _fail("left side must be bottom")
    elif rule == Rule.AndI:
        p1, p2 = ps
        _same_ctx(p1, c)
        _same_ctx(p2, c)
        if not isinstance(c.rhs, And):
            _fail("conclusion must be a conjunction")
        _same(p1.lhs, c.lhs, "left side")
        _same(p2.lhs, c.lhs, "left side")
        _same(p1.rhs, c.rhs.left, "left conjunct")
        _same(p2.rhs, c.rhs.right, "right conjunct")
    elif rule in (Rule.AndEL, Rule.AndER):
        (p,) = ps
        _same_ctx(p, c)
        if not isinstance(p.rhs, And):
            _fail("premise must conclude a conjunction")
        _same(p.lhs, c.lhs, "left side")
        _same(p.rhs.left if rule == Rule.AndEL else p.rhs.right, c.rhs, "projected conjunct")
    elif rule == Rule.OrI:
        p1, p2 = ps
        _same_ctx(p1, c)
        _same_ctx(p2, c)
        if not isinstance(c.lhs, Or):
            _fail("conclusion must assume a disjunction")
        _same(p1.lhs, c.lhs.left, "left disjunct")
        _same(p2.lhs, c.lhs.right, "right disjunct")
        _same(p1.rhs, c.rhs, "right side")
        _same(p2.rhs, c.rhs, "right side")
    elif rule in (Rule.OrEL, Rule.OrER):
        (p,) = ps
        _same_ctx(p, c)
        if not isinstance(p.lhs, Or):
            _fail("premise must assume a disjunction")
        _same(p.lhs.left if rule == Rule.OrEL else p.lhs.right, c.lhs, "disjunct")
        _same(p.rhs, c.rhs, "right side")
    elif rule == Rule.ImpI:
        (p,) = ps
        _same_ctx(p, c)
        if not isinstance(p.lhs, And) or not isinstance(c.rhs, Implies):
            _fail("implication introduction shape")
        _same(p.lhs.left, c.lhs, "left side")
        _same(p.lhs.right, c.rhs.left, "antecedent")
        _same(p.rhs, c.rhs.right, "consequent")
    elif rule == Rule.ImpE:
        (p,) = ps
        _same_ctx(p, c)
        if not isinstance(p.rhs, Implies) or not isinstance(c.lhs, And):
            _fail("implication elimination shape")
        _same(p.lhs, c.lhs.left, "left side")
        _same(p.rhs.left, c.lhs.right, "antecedent")
        _same(p.rhs.right, c.rhs, "consequent")
    elif rule in (Rule.ForallI, Rule.ForallE):
        (p,) = ps
        wide, narrow = (p, c) if rule == Rule.ForallI else (c, p)
        x, tau = _one_extra(wide.context, narrow.context)
        _same(wide.lhs, narrow.lhs, "left side")
        if not isinstance(narrow.rhs, Forall) or narrow.rhs.var_type != tau:
            _fail("universal formula expected")
        _same(Forall(x, tau, wide.rhs), narrow.rhs, "quantified formula")
    elif rule in (Rule.ExistsI, Rule.ExistsE):
        (p,) = ps
        wide, narrow = (p, c) if rule == Rule.ExistsI else (c, p)
        x, tau = _one_extra(wide.context, narrow.context)
        _same(wide.rhs, narrow.rhs, "right side")
        if not isinstance(narrow.lhs, Exists) or narrow.lhs.var_type != tau:
            _fail("existential formula expected")
        _same(Exists(x, tau, wide.lhs), narrow.lhs, "quantified formula")
    elif rule == Rule.EqI:
        if not isinstance(c.lhs, Top) or not isinstance(c.rhs, Eq):
            _fail("equality introduction concludes top |- t = t")
        _same(c.rhs.left, c.rhs.right, "sides of the equation")
    elif rule == Rule.EqE:
        if not _check_eq_elim(c):
            _fail("not an instance of equality elimination")
    elif rule in (Rule.Mem1, Rule.Mem2):
        (p,) = ps
        _same_ctx(p, c)
        _same(p.lhs, c.lhs, "left side")
        member, plain = (p.rhs, c.rhs) if rule == Rule.Mem1 else (c.rhs, p.rhs)
        if not isinstance(member, Member) or not isinstance(member.coll, Comprehension):
            _fail("membership in a comprehension expected")
        comp = member.coll
        expected = substitute(comp.body, [(Var(comp.var, comp.var_type), member.elem)])
        _same(expected, plain, "instantiated comprehension body")
    elif rule == Rule.BigOrI:
        cor = c.lhs
        if not isinstance(cor, CountableOr):
            _fail("conclusion must assume a countable disjunction")
        n = node.params.get("certificate", len(ps) - 1)
        if len(ps) != n + 1:
            _fail(f"certificate {n} needs {n + 1} premises, got {len(ps)}")
        period = cor.period
        if period is None:
            if _STABILITY.get(canonical(cor), None) is None or _STABILITY[canonical(cor)] > n:
                _fail("no stability certificate covers this family")
        elif n + 1 < period:
            _fail(f"family has period {period}; premises stop at {n}")
        for i, p in enumerate(ps):
            _same_ctx(p, c)
            _same(p.lhs, cor.member(i), f"member {i}")
            _same(p.rhs, c.rhs, "right side")
    elif rule == Rule.BigOrE:
        (p,) = ps
        _same_ctx(p, c)
        if not isinstance(p.lhs, CountableOr):
            _fail("premise must assume a countable disjunction")
        i = node.params.get("index")
        if not isinstance(i, int) or i < 0:
            _fail("BigOrE needs a non-negative index")
        _same(p.lhs.member(i), c.lhs, f"member {i}")
        _same(p.rhs, c.rhs, "right side")
    elif rule in (Rule.SetI, Rule.SetE):
        (p,) = ps
        wide, narrow = (p, c) if rule == Rule.SetI else (c, p)
        a, tau = _one_extra(wide.context, narrow.context)
        if not isinstance(wide.lhs, Top) or not isinstance(narrow.lhs, Top):
            _fail("set rules relate sequents with left side top")
        if not _is_iff(wide.rhs):
            _fail("biconditional expected")
        left, right = wide.rhs.left.left, wide.rhs.left.right
        expected = Eq(Comprehension(a, tau, left), Comprehension(a, tau, right))
        _same(expected, narrow.rhs, "equation of comprehensions")
    elif rule == Rule.Derived:
        name = node.params.get("name")
        if name not in _DERIVED_SEQUENTS:
            _fail(f"unknown derived sequent {name!r}")
        _require_validated(name)
        if not _DERIVED_SEQUENTS[name](c):
            _fail(f"not an instance of derived sequent {name}")
    elif rule == Rule.Hyp:
        if not any(c.matches(h) for h in hypotheses):
            _fail("hypothesis leaf matches no declared hypothesis")
    else:  # pragma: no cover
        _fail(f"unknown rule {rule}")


def check_tree(tree: ProofTree, sig: Signature, hypotheses=()) -> bool:
    """Check every node, premises first; raise ProofError at the first bad node."""

    def walk(node, path):
        for i, p in enumerate(node.premises):
            walk(p, path + (i,))
        try:
            check_node(node, sig, hypotheses)
        except ProofError as e:
            raise ProofError(f"{Rule(node.rule).value}: {e.reason}", path) from None

    walk(tree, ())
    return True


def is_valid_tree(tree: ProofTree, sig: Signature, hypotheses=()) -> bool:
    try:
        return check_tree(tree, sig, hypotheses)
    except ProofError:
        return False


# ---------------------------------------------------------------- surjective pairing


def _surjective_pairing_instance(s: Sequent) -> bool:
    if not isinstance(s.lhs, Top):
        return False
    outer = s.rhs
    if not isinstance(outer, Exists) or not isinstance(outer.body, Exists):
        return False
    inner = outer.body
    eq = inner.body
    if not isinstance(eq, Eq) or outer.var == inner.var:
        return False
    z, pair = eq.left, eq.right
    return (
        isinstance(z, Var)
        and isinstance(pair, Pair)
        and z.type == Product(outer.var_type, inner.var_type)
        and z.name not in (outer.var, inner.var)
        and pair.left == Var(outer.var, outer.var_type)
        and pair.right == Var(inner.var, inner.var_type)
    )


register_derived_sequent("surjective_pairing", _surjective_pairing_instance)
