"""Command-line entry point.

    toposlang parse FILE
    toposlang check-proof FILE [--signature FILE]
    toposlang interpret FILE [--model FILE] [--method categorical|pointwise|both]
    toposlang colimit FILE [--mode internal|oracle|both]
    toposlang verify [--criteria 1,2,...]

Every command accepts --seed, --cases, --size-cap and --json OUT.  The exit
code is 0 exactly when the report status is "pass", 1 on failure and 2 on
unreadable input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import finset as fs
from .colimits import (
    DiagramSpec, VerificationError, coequalizer, finite_colimit, initial_object,
    isomorphic_over_cocones, nary_coproduct, oracle_colimit,
)
from .interpret import ContextObject, interp_formula, interp_term
from .sequents import ProofError, check_tree
from .surface import (
    ParseError, Parser, find_form, notation, parse_diagram, parse_lemmas, parse_model,
    parse_signature, pretty, read, show_type, _head,
)
from .syntax import App, Base, TypingError, Var, alpha_eq

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class Report:
    def __init__(self, command: str, seed: int):
        self.command = command
        self.seed = seed
        self.status = "pass"
        self.artifacts: list = []
        self.counterexamples: list = []
        self.timings: dict = {}

    def fail(self, counterexample):
        self.status = "fail"
        self.counterexamples.append(counterexample)

    def error(self, message):
        self.status = "error"
        self.counterexamples.append({"error": message})

    def timed(self, label, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[label] = round(time.perf_counter() - start, 4)

    def to_json(self):
        return {
            "command": self.command,
            "status": self.status,
            "seed": self.seed,
            "artifacts": self.artifacts,
            "counterexamples": self.counterexamples,
            "timings": self.timings,
        }

    @property
    def exit_code(self):
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(self.status, EXIT_ERROR)


def _text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


# ---------------------------------------------------------------- expressions


def _expressions(forms, sig):
    """(formula ctx p), (term ctx t) and (seq ctx p q) forms, parsed."""
    from .surface import parse_sequent

    parser = Parser(sig)
    out = []
    for form in forms:
        head = _head(form)
        if head in ("formula", "term"):
            if len(form) != 3:
                raise ParseError(f"({head} context body) expected", form.line, form.col)
            ctx = parser.context(form[1])
            read_body = parser.formula if head == "formula" else parser.term
            out.append((head, ctx, read_body(form[2], dict(ctx)), form))
        elif head == "seq":
            out.append(("sequent", None, parse_sequent(form, sig), form))
    return out


def _round_trip(kind, ctx, x, sig):
    from .surface import parse_sequent, show_sequent

    if kind == "sequent":
        again = parse_sequent(read(show_sequent(x))[0], sig)
        return again.matches(x)
    parser = Parser(sig)
    body = read(pretty(x))[0]
    again = parser.formula(body, dict(ctx)) if kind == "formula" else parser.term(body, dict(ctx))
    return alpha_eq(again, x)


def cmd_parse(args, report: Report):
    text = _text(args.file)
    forms = report.timed("read", read, text)
    heads = {_head(f) for f in forms}
    if "lemma" in heads:
        sig, lemmas = report.timed("parse", parse_lemmas, text)
        for lem in lemmas:
            from .surface import show_lemma

            shown = show_lemma(lem.name, lem.statement, lem.proof, lem.hypotheses)
            _, again = parse_lemmas(text_with_signature(sig, shown))
            same = again[0].statement.matches(lem.statement) and _same_tree(again[0].proof, lem.proof)
            report.artifacts.append({"kind": "lemma", "name": lem.name, "nodes": lem.proof.size(),
                                     "round_trip": same})
            if not same:
                report.fail({"lemma": lem.name, "reason": "pretty-printed proof does not parse back"})
        return
    if "diagram" in heads:
        spec, env = report.timed("parse", parse_diagram, text)
        from .surface import show_diagram

        shown = show_diagram(spec, env)
        spec2, env2 = parse_diagram(shown)
        same = spec2 == spec and all(env2.funs[m].table == env.funs[m].table for m, _, _ in spec.morphisms)
        report.artifacts.append({"kind": "diagram", "diagram": spec.to_json(), "round_trip": same,
                                 "sizes": {o: len(env.base[o]) for o in spec.objects}})
        if not same:
            report.fail({"reason": "pretty-printed diagram does not parse back"})
        return
    sig = parse_signature(find_form(forms, "signature"))
    items = report.timed("parse", _expressions, forms, sig)
    for kind, ctx, x, form in items:
        entry = {"kind": kind, "line": form.line}
        if kind == "sequent":
            from .surface import show_sequent

            entry["text"] = show_sequent(x)
        else:
            entry.update({"text": pretty(x), "notation": notation(x)})
            if kind == "term":
                entry["type"] = show_type(x.type)
        entry["round_trip"] = _round_trip(kind, ctx, x, sig)
        report.artifacts.append(entry)
        if not entry["round_trip"]:
            report.fail({"line": form.line, "reason": "pretty-printed form does not parse back"})


def text_with_signature(sig, body: str) -> str:
    from .surface import show_signature

    return show_signature(sig) + "\n" + body


def _same_tree(a, b) -> bool:
    return (
        a.rule == b.rule
        and a.conclusion.matches(b.conclusion)
        and len(a.premises) == len(b.premises)
        and all(_same_tree(x, y) for x, y in zip(a.premises, b.premises))
    )


# ---------------------------------------------------------------- proofs


def cmd_check_proof(args, report: Report):
    text = _text(args.file)
    if args.signature:
        text = _text(args.signature) + "\n" + text
    sig, lemmas = report.timed("parse", parse_lemmas, text)
    if not lemmas:
        report.error("no (lemma ...) forms found")
        return
    start = time.perf_counter()
    for lem in lemmas:
        entry = {"lemma": lem.name, "nodes": lem.proof.size(), "hypotheses": len(lem.hypotheses)}
        try:
            check_tree(lem.proof, sig, lem.hypotheses)
            if not lem.proof.conclusion.matches(lem.statement):
                raise ProofError("the proof concludes a different sequent than the statement")
            entry["checked"] = True
        except ProofError as e:
            entry["checked"] = False
            report.fail({"lemma": lem.name, "path": list(e.path), "reason": e.reason})
        report.artifacts.append(entry)
    report.timings["check"] = round(time.perf_counter() - start, 4)


# ---------------------------------------------------------------- interpretation


def _assignment_json(co: ContextObject, point):
    return {n: fs.label_str(v) for n, v in zip(co.names, co.unpack(point))}


def cmd_interpret(args, report: Report):
    forms = read(_text(args.file))
    model_forms = read(_text(args.model)) if args.model else forms
    sig_form = find_form(forms, "signature", required=False) or find_form(model_forms, "signature")
    sig = parse_signature(sig_form)
    env = parse_model(model_forms, sig)
    items = _expressions(forms, sig)
    methods = ["categorical", "pointwise"] if args.method == "both" else [args.method]
    for kind, ctx, x, form in items:
        if kind == "sequent":
            ctx, shown = x.context, f"{pretty(x.lhs)} |- {pretty(x.rhs)}"
        else:
            shown = pretty(x)
        co = ContextObject(ctx, env)
        results = {}
        for method in methods:
            label = f"line {form.line} {method}"
            if kind == "formula":
                results[method] = report.timed(label, interp_formula, ctx, x, env, method)
            elif kind == "term":
                results[method] = report.timed(label, interp_term, ctx, x, env, method)
            else:
                lhs = report.timed(label, interp_formula, ctx, x.lhs, env, method)
                rhs = interp_formula(ctx, x.rhs, env, method)
                results[method] = fs.sub_leq(lhs, rhs)
        first = results[methods[0]]
        entry = {"kind": kind, "line": form.line, "text": shown}
        if kind == "formula":
            entry["holds_at"] = [_assignment_json(co, p) for p in first.elements()]
        elif kind == "term":
            entry["table"] = [
                {"at": _assignment_json(co, p), "value": fs.label_str(first.table[p])} for p in first.dom
            ]
        else:
            entry["valid"] = first
            if not first:
                report.fail({"line": form.line, "reason": "sequent does not hold in the model"})
        if len(methods) == 2:
            agree = _same_value(results["categorical"], results["pointwise"])
            entry["methods_agree"] = agree
            if not agree:
                report.fail({"line": form.line, "reason": "categorical and pointwise interpretations differ"})
        report.artifacts.append(entry)


def _same_value(a, b):
    if isinstance(a, fs.FinMor):
        return a.table == b.table
    return a == b


# ---------------------------------------------------------------- colimits


def _construct(spec: DiagramSpec, env, cap, seed, cases):
    """Pick the most specific internal construction for the diagram's shape."""
    samples = cases or 500
    if not spec.morphisms:
        r = nary_coproduct(list(spec.objects), env, cap=cap, seed=seed)
        return "coproduct", r
    if len(spec.objects) == 2 and len(spec.morphisms) == 2:
        (f, d0, c0), (g, d1, c1) = spec.morphisms
        if d0 == d1 and c0 == c1 and d0 != c0:
            ordered = DiagramSpec((d0, c0), spec.morphisms)
            a = Var("a", Base(d0))
            r = coequalizer(App(f, a, Base(c0)), App(g, a, Base(c0)), a, env, cap=cap, seed=seed, diagram=ordered)
            return "coequaliser", r
    return "finite colimit", finite_colimit(spec, env, cap=cap, seed=seed, samples=samples)


def cmd_colimit(args, report: Report):
    spec, env = report.timed("parse", parse_diagram, _text(args.file))
    cap = args.size_cap if args.size_cap is not None else 3
    entry = {"diagram": spec.to_json()}
    if not spec.objects:
        out = report.timed("internal", initial_object, env, [])
        entry["internal"] = {"construction": "initial object", "size": len(out["object"])}
        report.artifacts.append(entry)
        return
    oracle = None
    if args.mode in ("oracle", "both"):
        obj, oracle = report.timed("oracle", oracle_colimit, spec, env)
        entry["oracle"] = {"object": obj.to_json(), "size": len(obj), "cocone": oracle.to_json()}
    if args.mode in ("internal", "both"):
        try:
            kind, result = report.timed("internal", _construct, spec, env, cap, args.seed, args.cases)
        except VerificationError as e:
            report.fail({"reason": str(e), "counterexample": _plain(e.counterexample)})
            report.artifacts.append(entry)
            return
        entry["internal"] = {"construction": kind, **result.to_json()}
        if oracle is not None:
            same = len(result.object) == len(oracle.apex) and isomorphic_over_cocones(result.cocone, oracle)
            entry["agree"] = same
            if not same:
                report.fail({"reason": "internal colimit and oracle are not isomorphic over the cocones"})
    report.artifacts.append(entry)


def _plain(x):
    try:
        json.dumps(x)
        return x
    except TypeError:
        return str(x)


# ---------------------------------------------------------------- acceptance suite


def cmd_verify(args, report: Report):
    from .suite import run_all

    only = None
    if args.criteria:
        only = {int(c) for c in args.criteria.split(",") if c.strip()}
    for r in run_all(args.seed, only, args.cases, args.size_cap):
        print(r.line())
        report.artifacts.append(r.to_json())
        report.timings[f"criterion {r.number}"] = round(r.seconds, 4)
        if not r.passed:
            report.fail({"criterion": r.number, "detail": r.detail, "counterexample": r.counterexample})


# ---------------------------------------------------------------- driver


COMMANDS = {
    "parse": cmd_parse,
    "check-proof": cmd_check_proof,
    "interpret": cmd_interpret,
    "colimit": cmd_colimit,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    common.add_argument("--cases", type=int, default=None, help="number of random cases or samples")
    common.add_argument("--size-cap", type=int, default=None, help="largest apex size for universal-property checks")
    common.add_argument("--json", metavar="OUT", default=None, help="write the JSON report here ('-' for stdout)")

    parser = argparse.ArgumentParser(prog="toposlang", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("parse", parents=[common], help="parse a file and check the printer round-trips")
    p.add_argument("file")
    p = sub.add_parser("check-proof", parents=[common], help="check the proof scripts in a file")
    p.add_argument("file")
    p.add_argument("--signature", default=None, help="file holding the (signature ...) form")
    p = sub.add_parser("interpret", parents=[common], help="interpret formulas, terms and sequents in a model")
    p.add_argument("file")
    p.add_argument("--model", default=None, help="file holding the (model ...) form")
    p.add_argument("--method", choices=["categorical", "pointwise", "both"], default="both")
    p = sub.add_parser("colimit", parents=[common], help="construct and verify the colimit of a diagram")
    p.add_argument("file")
    p.add_argument("--mode", choices=["internal", "oracle", "both"], default="both")
    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma-separated criterion numbers (default all)")
    return parser


def run(argv=None) -> Report:
    args = build_parser().parse_args(argv)
    report = Report(args.command, args.seed)
    try:
        COMMANDS[args.command](args, report)
    except ParseError as e:
        where = getattr(args, "file", "")
        report.error(f"{where}: {e}")
        if e.line is not None:
            report.counterexamples[-1].update({"line": e.line, "column": e.col})
    except (OSError, TypingError, KeyError, ValueError) as e:
        report.error(f"{type(e).__name__}: {e}")
    report.args = args
    return report


def main(argv=None) -> int:
    report = run(argv)
    payload = json.dumps(report.to_json(), indent=2, default=str)
    target = report.args.json
    if target == "-":
        print(payload)
    elif target:
        Path(target).write_text(payload + "\n", encoding="utf-8")
    for c in report.counterexamples:
        print(f"{report.status}: {c.get('error') or c.get('reason') or json.dumps(c, default=str)[:300]}",
              file=sys.stderr)
    print(f"{report.command}: {report.status}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
