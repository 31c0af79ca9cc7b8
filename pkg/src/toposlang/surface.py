"""S-expression surface syntax: reader, parsers and printers.

Types      A | unit | omega | (prod T U) | (pow T)
Terms      x | * | (pair s t) | (fst t) | (snd t) | (app f t) | (comp x T p)
           | (sing t) | (empty T)
Formulas   top | bot | (rel R t) | (eq s t) | (and p q ...) | (or p q ...)
           | (imp p q) | (not p) | (iff p q) | (forall x T p) | (exists x T p)
           | (mem t s) | (cor family [((x T) ...)] param ...)

Files are sequences of top-level forms; `;` starts a comment.
"""
from __future__ import annotations

import importlib
import re
from dataclasses import dataclass

from .context import Context
from .syntax import (
    And, App, Base, Bot, Comprehension, CountableOr, Eq, Exists, Forall, Fst,
    Iff, Implies, Member, Not, Omega, Or, Pair, Power, Product, Rel, Signature,
    Snd, Star, Top, TypingError, Unit, Var, conj, disj, empty, is_formula,
    singleton,
)


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int

    def __str__(self):
        return self.text


class SList(list):
    """A parenthesised list remembering where it started."""

    def __init__(self, items=(), line=0, col=0):
        super().__init__(items)
        self.line = line
        self.col = col


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def read(text: str) -> list:
    """All top-level forms of text."""
    stack = [SList()]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group(0)
        if tok == "(":
            stack.append(SList(line=line, col=col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unexpected ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].append(Atom(tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if len(stack) > 1:
        opened = stack[-1]
        raise ParseError("unclosed '('", opened.line, opened.col)
    return list(stack[0])


def _where(x):
    return getattr(x, "line", None), getattr(x, "col", None)


def _err(x, message):
    return ParseError(message, *_where(x))


def _atom(x, what="name") -> str:
    if not isinstance(x, Atom):
        raise _err(x, f"expected a {what}")
    return x.text


def _head(x):
    if isinstance(x, SList) and x and isinstance(x[0], Atom):
        return x[0].text
    return None


def _arity(x, n):
    if len(x) != n + 1:
        raise _err(x, f"'{_head(x)}' takes {n} argument(s), got {len(x) - 1}")


KEYWORDS = {
    "unit", "omega", "prod", "pow", "pair", "fst", "snd", "app", "comp", "sing", "empty",
    "top", "bot", "rel", "eq", "and", "or", "imp", "not", "iff", "forall", "exists", "mem", "cor",
}
_FORMULA_HEADS = {"rel", "eq", "and", "or", "imp", "not", "iff", "forall", "exists", "mem", "cor"}


# ---------------------------------------------------------------- parsing


class Parser:
    """Parses types, terms and formulas against a signature."""

    def __init__(self, sig: Signature):
        self.sig = sig

    def type(self, x):
        if isinstance(x, Atom):
            if x.text == "unit":
                return Unit()
            if x.text == "omega":
                return Omega()
            if x.text not in self.sig.base_types:
                raise _err(x, f"undeclared base type {x.text!r}")
            return Base(x.text)
        head = _head(x)
        if head == "prod":
            _arity(x, 2)
            return Product(self.type(x[1]), self.type(x[2]))
        if head == "pow":
            _arity(x, 1)
            return Power(self.type(x[1]))
        raise _err(x, "malformed type")

    def _binder(self, x, scope):
        name = _atom(x[1], "variable")
        if name in KEYWORDS:
            raise _err(x[1], f"{name!r} is reserved")
        tau = self.type(x[2])
        return name, tau, {**scope, name: tau}

    def term(self, x, scope: dict):
        try:
            return self._term(x, scope)
        except TypingError as e:
            raise _err(x, str(e)) from None

    def _term(self, x, scope):
        if isinstance(x, Atom):
            if x.text == "*":
                return Star()
            if x.text in scope:
                return Var(x.text, scope[x.text])
            raise _err(x, f"unbound variable {x.text!r}")
        head = _head(x)
        if head == "pair":
            _arity(x, 2)
            return Pair(self.term(x[1], scope), self.term(x[2], scope))
        if head in ("fst", "snd"):
            _arity(x, 1)
            return (Fst if head == "fst" else Snd)(self.term(x[1], scope))
        if head == "app":
            _arity(x, 2)
            fun = _atom(x[1], "function symbol")
            if fun not in self.sig.functions:
                raise _err(x[1], f"undeclared function symbol {fun!r}")
            dom, cod = self.sig.functions[fun]
            arg = self.term(x[2], scope)
            if arg.type != dom:
                raise _err(x, f"{fun} expects {show_type(dom)}, got {show_type(arg.type)}")
            return App(fun, arg, cod)
        if head == "comp":
            _arity(x, 3)
            name, tau, inner = self._binder(x, scope)
            return Comprehension(name, tau, self.formula(x[3], inner))
        if head == "sing":
            _arity(x, 1)
            return singleton(self.term(x[1], scope))
        if head == "empty":
            _arity(x, 1)
            return empty(self.type(x[1]))
        raise _err(x, "malformed term")

    def formula(self, x, scope: dict):
        try:
            return self._formula(x, scope)
        except TypingError as e:
            raise _err(x, str(e)) from None

    def _formula(self, x, scope):
        if isinstance(x, Atom):
            if x.text == "top":
                return Top()
            if x.text == "bot":
                return Bot()
            raise _err(x, f"expected a formula, found {x.text!r}")
        head = _head(x)
        if head == "rel":
            _arity(x, 2)
            sym = _atom(x[1], "relation symbol")
            if sym not in self.sig.relations:
                raise _err(x[1], f"undeclared relation symbol {sym!r}")
            arg = self.term(x[2], scope)
            if arg.type != self.sig.relations[sym]:
                raise _err(x, f"{sym} is on {show_type(self.sig.relations[sym])}")
            return Rel(sym, arg)
        if head == "eq":
            _arity(x, 2)
            return Eq(self.term(x[1], scope), self.term(x[2], scope))
        if head in ("and", "or"):
            parts = [self.formula(p, scope) for p in x[1:]]
            return conj(*parts) if head == "and" else disj(*parts)
        if head in ("imp", "iff"):
            _arity(x, 2)
            p, q = self.formula(x[1], scope), self.formula(x[2], scope)
            return Implies(p, q) if head == "imp" else Iff(p, q)
        if head == "not":
            _arity(x, 1)
            return Not(self.formula(x[1], scope))
        if head in ("forall", "exists"):
            _arity(x, 3)
            name, tau, inner = self._binder(x, scope)
            return (Forall if head == "forall" else Exists)(name, tau, self.formula(x[3], inner))
        if head == "mem":
            _arity(x, 2)
            return Member(self.term(x[1], scope), self.term(x[2], scope))
        if head == "cor":
            if len(x) < 2:
                raise _err(x, "cor takes a family name, an optional bound-variable list and parameters")
            family = _atom(x[1], "family name")
            # the chain family lives with the constructions that use it
            importlib.import_module(".colimits", __package__)
            rest = list(x[2:])
            bound, inner = [], dict(scope)
            # a bound list is a list of (name type) lists, possibly empty
            if rest and isinstance(rest[0], SList) and all(isinstance(b, SList) for b in rest[0]):
                for b in rest.pop(0):
                    if len(b) != 2:
                        raise _err(b, "bound variables are written (name type)")
                    name = _atom(b[0], "variable")
                    tau = self.type(b[1])
                    bound.append((name, tau))
                    inner[name] = tau
            params = tuple(self.param(p, inner) for p in rest)
            return CountableOr(family, tuple(bound), params)
        raise _err(x, "malformed formula")

    def param(self, x, scope):
        if (isinstance(x, Atom) and x.text in ("top", "bot")) or _head(x) in _FORMULA_HEADS:
            return self.formula(x, scope)
        return self.term(x, scope)

    def context(self, x) -> Context:
        if not isinstance(x, SList):
            raise _err(x, "a context is a list of (name type) pairs")
        entries = []
        for e in x:
            if not isinstance(e, SList) or len(e) != 2:
                raise _err(e, "context entries are written (name type)")
            entries.append((_atom(e[0], "variable"), self.type(e[1])))
        try:
            return Context(entries)
        except ValueError as err:
            raise _err(x, str(err)) from None


def parse_signature(form) -> Signature:
    """(signature (type A B) (fun f A B) (rel R A) ...)."""
    if _head(form) != "signature":
        raise _err(form, "expected (signature ...)")
    bases, funs, rels = set(), {}, {}
    for item in form[1:]:
        head = _head(item)
        if head == "type":
            bases |= {_atom(a, "type name") for a in item[1:]}
    partial = Parser(Signature(bases))
    for item in form[1:]:
        head = _head(item)
        if head == "type":
            continue
        if head == "fun":
            _arity(item, 3)
            funs[_atom(item[1])] = (partial.type(item[2]), partial.type(item[3]))
        elif head == "rel":
            _arity(item, 2)
            rels[_atom(item[1])] = partial.type(item[2])
        else:
            raise _err(item, "signature entries are (type ...), (fun f A B) or (rel R A)")
    for name in bases:
        if name in KEYWORDS:
            raise _err(form, f"{name!r} is reserved")
    return Signature(bases, funs, rels)


def parse_label(x):
    """Element labels: integers, symbols, (pair-like) 2-lists and (subset ...)."""
    if isinstance(x, Atom):
        if re.fullmatch(r"-?\d+", x.text):
            return int(x.text)
        if x.text in ("true", "false"):
            return x.text == "true"
        return x.text
    if _head(x) == "subset":
        return frozenset(parse_label(y) for y in x[1:])
    if len(x) == 2:
        return (parse_label(x[0]), parse_label(x[1]))
    raise _err(x, "labels are atoms, (a b) pairs or (subset ...)")


def find_form(forms, head, required=True):
    found = [f for f in forms if _head(f) == head]
    if len(found) > 1:
        raise _err(found[1], f"more than one ({head} ...) form")
    if not found:
        if required:
            raise ParseError(f"missing ({head} ...) form")
        return None
    return found[0]


def parse_term(text: str, sig: Signature, scope=None):
    forms = read(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one term")
    return Parser(sig).term(forms[0], dict(scope or {}))


def parse_formula(text: str, sig: Signature, scope=None):
    forms = read(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one formula")
    return Parser(sig).formula(forms[0], dict(scope or {}))


def parse_type(text: str, sig: Signature):
    forms = read(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one type")
    return Parser(sig).type(forms[0])


# ---------------------------------------------------------------- printing


def show_type(tau) -> str:
    if isinstance(tau, Base):
        return tau.name
    if isinstance(tau, Unit):
        return "unit"
    if isinstance(tau, Omega):
        return "omega"
    if isinstance(tau, Product):
        return f"(prod {show_type(tau.left)} {show_type(tau.right)})"
    if isinstance(tau, Power):
        return f"(pow {show_type(tau.inner)})"
    raise TypeError(f"not a type: {tau!r}")


def pretty(x) -> str:
    """S-expression text that parses back to x up to alpha-equivalence."""
    if isinstance(x, Var):
        return x.name
    if isinstance(x, Star):
        return "*"
    if isinstance(x, Pair):
        return f"(pair {pretty(x.left)} {pretty(x.right)})"
    if isinstance(x, Fst):
        return f"(fst {pretty(x.arg)})"
    if isinstance(x, Snd):
        return f"(snd {pretty(x.arg)})"
    if isinstance(x, App):
        return f"(app {x.fun} {pretty(x.arg)})"
    if isinstance(x, Comprehension):
        return f"(comp {x.var} {show_type(x.var_type)} {pretty(x.body)})"
    if isinstance(x, Top):
        return "top"
    if isinstance(x, Bot):
        return "bot"
    if isinstance(x, Rel):
        return f"(rel {x.sym} {pretty(x.arg)})"
    if isinstance(x, Eq):
        return f"(eq {pretty(x.left)} {pretty(x.right)})"
    if isinstance(x, And):
        return f"(and {pretty(x.left)} {pretty(x.right)})"
    if isinstance(x, Or):
        return f"(or {pretty(x.left)} {pretty(x.right)})"
    if isinstance(x, Implies):
        return f"(imp {pretty(x.left)} {pretty(x.right)})"
    if isinstance(x, (Forall, Exists)):
        kw = "forall" if isinstance(x, Forall) else "exists"
        return f"({kw} {x.var} {show_type(x.var_type)} {pretty(x.body)})"
    if isinstance(x, Member):
        return f"(mem {pretty(x.elem)} {pretty(x.coll)})"
    if isinstance(x, CountableOr):
        bound = " ".join(f"({n} {show_type(t)})" for n, t in x.bound)
        params = " ".join(pretty(p) for p in x.params)
        return f"(cor {x.family_id} ({bound}) {params})"
    raise TypeError(f"cannot print {x!r}")


def show_context(ctx: Context) -> str:
    return "(" + " ".join(f"({n} {show_type(t)})" for n, t in ctx) + ")"


def notation(x) -> str:
    """Conventional mathematical notation, for comments and reports."""
    if isinstance(x, Var):
        return x.name
    if isinstance(x, Star):
        return "*"
    if isinstance(x, Pair):
        return f"<{notation(x.left)}, {notation(x.right)}>"
    if isinstance(x, Fst):
        return f"fst {notation(x.arg)}"
    if isinstance(x, Snd):
        return f"snd {notation(x.arg)}"
    if isinstance(x, App):
        return f"{x.fun}({notation(x.arg)})"
    if isinstance(x, Comprehension):
        return f"{{{x.var}:{x.var_type} | {notation(x.body)}}}"
    if isinstance(x, Top):
        return "⊤"
    if isinstance(x, Bot):
        return "⊥"
    if isinstance(x, Rel):
        return f"{x.sym}({notation(x.arg)})"
    if isinstance(x, Eq):
        return f"{notation(x.left)} = {notation(x.right)}"
    if isinstance(x, Implies) and isinstance(x.right, Bot):
        return f"¬({notation(x.left)})"
    symbols = {And: "∧", Or: "∨", Implies: "⇒"}
    for kind, sym in symbols.items():
        if isinstance(x, kind):
            return f"({notation(x.left)} {sym} {notation(x.right)})"
    if isinstance(x, (Forall, Exists)):
        q = "∀" if isinstance(x, Forall) else "∃"
        return f"{q}{x.var}:{x.var_type}. {notation(x.body)}"
    if isinstance(x, Member):
        return f"{notation(x.elem)} ∈ {notation(x.coll)}"
    if isinstance(x, CountableOr):
        return f"⋁_i {x.family_id}[{', '.join(notation(p) for p in x.params)}]_i"
    raise TypeError(f"cannot print {x!r}")


def formula_or_term(x) -> str:
    return "formula" if is_formula(x) else "term"


# ---------------------------------------------------------------- sequents and proofs


def parse_sequent(form, sig: Signature):
    """(seq ((x A) ...) lhs rhs)."""
    from .sequents import Sequent

    if _head(form) != "seq":
        raise _err(form, "expected (seq context lhs rhs)")
    _arity(form, 3)
    parser = Parser(sig)
    ctx = parser.context(form[1])
    scope = dict(ctx)
    return Sequent(ctx, parser.formula(form[2], scope), parser.formula(form[3], scope))


def show_sequent(s) -> str:
    return f"(seq {show_context(s.context)} {pretty(s.lhs)} {pretty(s.rhs)})"


_PARAM_HEADS = {"bind", "cut", "certificate", "index", "name"}


def _int(x, what):
    text = _atom(x, what)
    if not re.fullmatch(r"\d+", text):
        raise _err(x, f"{what} must be a non-negative integer")
    return int(text)


def parse_proof(form, sig: Signature):
    """(Rule (seq ...) param ... premise ...) with params (bind x T t), (cut p),
    (certificate n), (index n) and (name id)."""
    from .sequents import ProofTree, Rule

    if not isinstance(form, SList) or len(form) < 2:
        raise _err(form, "a proof node is (Rule (seq ...) ...)")
    rule_name = _atom(form[0], "rule name")
    try:
        rule = Rule(rule_name)
    except ValueError:
        raise _err(form[0], f"unknown rule {rule_name!r}") from None
    conclusion = parse_sequent(form[1], sig)
    scope = dict(conclusion.context)
    parser = Parser(sig)
    params, premises, bindings = {}, [], []
    for item in form[2:]:
        head = _head(item)
        if head == "bind":
            _arity(item, 3)
            name = _atom(item[1], "variable")
            bindings.append((Var(name, parser.type(item[2])), parser.term(item[3], scope)))
        elif head == "cut":
            _arity(item, 1)
            params["cut"] = parser.formula(item[1], scope)
        elif head in ("certificate", "index"):
            _arity(item, 1)
            params[head] = _int(item[1], head)
        elif head == "name":
            _arity(item, 1)
            params["name"] = _atom(item[1])
        else:
            premises.append(parse_proof(item, sig))
    if rule == Rule.Subst:
        params["bindings"] = bindings
    elif bindings:
        raise _err(form, "only Subst takes bindings")
    return ProofTree(conclusion, rule, params, tuple(premises))


def show_proof(tree, indent: int = 0) -> str:
    pad = "  " * indent
    parts = [f"{pad}({tree.rule.value} {show_sequent(tree.conclusion)}"]
    for v, t in tree.params.get("bindings", ()):
        parts.append(f"{pad}  (bind {v.name} {show_type(v.type)} {pretty(t)})")
    if "cut" in tree.params:
        parts.append(f"{pad}  (cut {pretty(tree.params['cut'])})")
    for key in ("certificate", "index", "name"):
        if key in tree.params:
            parts.append(f"{pad}  ({key} {tree.params[key]})")
    for p in tree.premises:
        parts.append(show_proof(p, indent + 1))
    return "\n".join(parts) + ")"


def show_signature(sig: Signature) -> str:
    lines = ["(signature"]
    if sig.base_types:
        lines.append("  (type " + " ".join(sorted(sig.base_types)) + ")")
    for f, (dom, cod) in sorted(sig.functions.items()):
        lines.append(f"  (fun {f} {show_type(dom)} {show_type(cod)})")
    for r, tau in sorted(sig.relations.items()):
        lines.append(f"  (rel {r} {show_type(tau)})")
    return "\n".join(lines) + ")"


@dataclass
class LemmaScript:
    name: str
    statement: object
    proof: object
    hypotheses: tuple = ()


def parse_lemmas(text: str):
    """A signature followed by (lemma name (hypothesis s)* (statement s) (proof p)) forms."""
    forms = read(text)
    sig = parse_signature(find_form(forms, "signature"))
    out = []
    for form in forms:
        if _head(form) != "lemma":
            continue
        if len(form) < 2:
            raise _err(form, "lemma needs a name")
        name = _atom(form[1], "lemma name")
        hyps, statement, proof = [], None, None
        for item in form[2:]:
            head = _head(item)
            if head == "hypothesis":
                _arity(item, 1)
                hyps.append(parse_sequent(item[1], sig))
            elif head == "statement":
                _arity(item, 1)
                statement = parse_sequent(item[1], sig)
            elif head == "proof":
                _arity(item, 1)
                proof = parse_proof(item[1], sig)
            else:
                raise _err(item, "lemma parts are hypothesis, statement and proof")
        if proof is None:
            raise _err(form, f"lemma {name} has no proof")
        out.append(LemmaScript(name, statement or proof.conclusion, proof, tuple(hyps)))
    return sig, out


def show_lemma(name, statement, tree, hypotheses=()) -> str:
    lines = [f"; {notation(statement.lhs)}  ⊢  {notation(statement.rhs)}", f"(lemma {name}"]
    for h in hypotheses:
        lines.append(f"  (hypothesis {show_sequent(h)})")
    lines.append(f"  (statement {show_sequent(statement)})")
    lines.append("  (proof\n" + show_proof(tree, 2) + "))")
    return "\n".join(lines)


# ---------------------------------------------------------------- models and diagrams


def show_label(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, tuple):
        return f"({show_label(x[0])} {show_label(x[1])})"
    if isinstance(x, frozenset):
        from .finset import label_key

        return "(subset" + "".join(" " + show_label(y) for y in sorted(x, key=label_key)) + ")"
    return str(x)


def parse_model(forms, sig: Signature):
    """(model (set A a ...) (fun f (x y) ...) (rel R x ...)) as an Environment."""
    from .interpret import Environment

    form = find_form(forms, "model")
    base, funs, rels = {}, {}, {}
    for item in form[1:]:
        head = _head(item)
        if head == "set":
            base[_atom(item[1], "type name")] = [parse_label(y) for y in item[2:]]
        elif head == "fun":
            table = {}
            for pair in item[2:]:
                if not isinstance(pair, SList) or len(pair) != 2:
                    raise _err(pair, "function entries are (input output)")
                table[parse_label(pair[0])] = parse_label(pair[1])
            funs[_atom(item[1])] = table
        elif head == "rel":
            rels[_atom(item[1])] = [parse_label(y) for y in item[2:]]
        else:
            raise _err(item, "model entries are (set ...), (fun ...) or (rel ...)")
    try:
        return Environment(sig, base, funs, rels)
    except (KeyError, ValueError) as e:
        raise _err(form, str(e)) from None


def parse_diagram(text: str):
    """(diagram (object A a ...) (morphism f A B (a b) ...)) as (DiagramSpec, Environment)."""
    from .colimits import DiagramSpec

    forms = read(text)
    form = find_form(forms, "diagram")
    objects, sets, morphisms, tables = [], {}, [], {}
    for item in form[1:]:
        head = _head(item)
        if head == "object":
            name = _atom(item[1], "object name")
            objects.append(name)
            sets[name] = [parse_label(y) for y in item[2:]]
        elif head == "morphism":
            if len(item) < 4:
                raise _err(item, "morphism needs a name, a domain and a codomain")
            name = _atom(item[1])
            morphisms.append((name, _atom(item[2]), _atom(item[3])))
            table = {}
            for pair in item[4:]:
                if not isinstance(pair, SList) or len(pair) != 2:
                    raise _err(pair, "morphism entries are (input output)")
                table[parse_label(pair[0])] = parse_label(pair[1])
            tables[name] = table
        else:
            raise _err(item, "diagram entries are (object ...) or (morphism ...)")
    try:
        spec = DiagramSpec(tuple(objects), tuple(morphisms))
        return spec, spec.environment(sets, tables)
    except (KeyError, ValueError) as e:
        raise _err(form, str(e)) from None


def show_diagram(spec, env) -> str:
    lines = ["(diagram"]
    for name in spec.objects:
        lines.append(f"  (object {name}" + "".join(" " + show_label(e) for e in env.base[name]) + ")")
    for name, dom, cod in spec.morphisms:
        f = env.funs[name]
        entries = "".join(f" ({show_label(x)} {show_label(f.table[x])})" for x in f.dom)
        lines.append(f"  (morphism {name} {dom} {cod}{entries})")
    return "\n".join(lines) + ")"
