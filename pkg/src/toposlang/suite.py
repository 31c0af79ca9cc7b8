"""The twelve acceptance checks, each returning a CriterionReport."""
from __future__ import annotations

import inspect
import random
import time
import traceback
from dataclasses import dataclass, field
from itertools import product as cartesian

from . import finset as fs
from .colimits import (
    VerificationError, binary_coproduct, coequalizer_of_maps, finite_colimit, initial_object,
    isomorphic_over_cocones, nary_coproduct, oracle_colimit, singleton_embedding,
)
from .context import Context
from .derived import all_maps, validate_all
from .finset import FinObj
from .generate import (
    FormulaGen, environments_upto, random_diagram, random_environment, random_map, restrict, symbols,
)
from .interpret import Environment, interp_formula, sequent_holds, validate_substitution_lemma
from .lemmas import LIBRARY_SIGNATURE, lemma_library
from .sequents import ProofTree, Rule, Sequent, check_tree, is_valid_tree
from .syntax import App, Base, Eq, Exists, Pair, Product, Signature, Top, Var
from .unionfind import DisjointSet

METHODS = ("categorical", "pointwise")


@dataclass
class CriterionReport:
    number: int
    title: str
    passed: bool = False
    seconds: float = 0.0
    budget: float | None = None
    detail: dict = field(default_factory=dict)
    counterexample: object = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" / {self.budget:g} s" if self.budget else ""
        facts = ", ".join(f"{k}={v}" for k, v in self.detail.items() if not isinstance(v, (dict, list)))
        return f"[{status}] criterion {self.number:2d} {self.title}: {facts} ({self.seconds:.2f} s{budget})"

    def to_json(self):
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": round(self.seconds, 4),
            "budget": self.budget,
            "detail": self.detail,
            "counterexample": self.counterexample,
        }


class CheckFailed(AssertionError):
    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


def _require(cond, message, counterexample=None):
    if not cond:
        raise CheckFailed(message, counterexample)


def _run(number, title, budget, body, *args):
    report = CriterionReport(number, title, budget=budget)
    start = time.perf_counter()
    try:
        report.detail = body(*args)
        report.passed = True
    except (CheckFailed, VerificationError) as e:
        report.detail = {"error": str(e)}
        report.counterexample = _jsonable(getattr(e, "counterexample", None))
    except Exception as e:  # a crash is a failure with a traceback attached
        report.detail = {"error": f"{type(e).__name__}: {e}"}
        report.counterexample = traceback.format_exc()
    report.seconds = time.perf_counter() - start
    if report.passed and budget is not None and report.seconds > budget:
        report.passed = False
        report.detail["error"] = f"took {report.seconds:.2f} s, budget {budget:g} s"
    return report


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    return str(x)


# ---------------------------------------------------------------- 1, 2: lemma library


def check_library(seed: int = 0) -> dict:
    lib = lemma_library()
    for name, lemma in lib.items():
        lemma.check()
    return {"lemmas": len(lib), "nodes": sum(lem.tree.size() for lem in lib.values())}


def _env_json(env: Environment):
    return {
        "sets": {k: v.to_json() for k, v in env.base.items()},
        "functions": {k: {fs.label_str(x): fs.label_str(y) for x, y in f.table.items()} for k, f in env.funs.items()},
        "relations": {k: sorted(fs.label_str(x) for x in r.subset) for k, r in env.rels.items()},
    }


def check_soundness(seed: int = 0, top: int = 3, limit: int = 10**4, samples: int = 500,
                    method: str = "categorical") -> dict:
    """Each proof step preserves truth, and hypotheses entail the lemma, in every environment."""
    rng = random.Random(seed)
    cases = sequents = 0
    exhaustive = {}
    for name, lemma in lemma_library().items():
        funs, rels = symbols([lemma.tree.conclusion, *(n.conclusion for n in lemma.tree.nodes()), *lemma.hypotheses])
        sig = restrict(LIBRARY_SIGNATURE, funs, rels)
        envs, exhaustive[name] = environments_upto(sig, top, limit, samples, rng)
        nodes = [n for n in lemma.tree.nodes() if n.rule != Rule.Hyp]
        for env in envs:
            cases += 1
            holds = {}

            def ok(seq):
                if seq not in holds:
                    holds[seq] = sequent_holds(seq, env, method)
                return holds[seq]

            for node in nodes:
                if all(ok(p.conclusion) for p in node.premises):
                    sequents += 1
                    if not ok(node.conclusion):
                        raise CheckFailed(f"{name}: rule {node.rule.value} not sound here",
                                          {"lemma": name, "rule": node.rule.value, "sequent": str(node.conclusion),
                                           "environment": _env_json(env)})
            if all(ok(h) for h in lemma.hypotheses) and not ok(lemma.statement):
                raise CheckFailed(f"{name} fails although its hypotheses hold",
                                  {"lemma": name, "environment": _env_json(env)})
    return {"environments": cases, "steps_checked": sequents,
            "exhaustive_lemmas": sum(exhaustive.values()), "sampled_lemmas": sum(not v for v in exhaustive.values())}


# ---------------------------------------------------------------- 3, 4: Heyting structure


def _subsets(obj: FinObj):
    return list(fs.HeytingOpsWitness(obj).all_subobjects())


def check_heyting(seed: int = 0, top: int = 4) -> dict:
    triples = 0
    for n in range(top + 1):
        E = FinObj(range(n))
        everything = frozenset(E)
        subs = _subsets(E)
        bot, tp = fs.bottom(E), fs.top(E)
        for a in subs:
            _require(fs.sub_meet(a, tp) == a and fs.sub_join(a, bot) == a, "unit laws", a.to_json())
            _require(fs.sub_not(a).subset == everything - a.subset, "negation", a.to_json())
            _require(fs.sub_leq(a, fs.sub_not(fs.sub_not(a))), "double negation", a.to_json())
            for b in subs:
                meet, join, imp = fs.sub_meet(a, b), fs.sub_join(a, b), fs.sub_implies(a, b)
                _require(meet.subset == a.subset & b.subset, "meet", [a.to_json(), b.to_json()])
                _require(join.subset == a.subset | b.subset, "join", [a.to_json(), b.to_json()])
                _require(imp.subset == (everything - a.subset) | b.subset, "implication", [a.to_json(), b.to_json()])
                _require(fs.sub_meet(a, join) == a and fs.sub_join(a, meet) == a, "absorption")
                _require(meet == fs.sub_meet(b, a) and join == fs.sub_join(b, a), "commutativity")
                _require(fs.sub_leq(a, b) == (a.subset <= b.subset), "order")
                for c in subs:
                    triples += 1
                    _require(
                        fs.sub_leq(fs.sub_meet(c, a), b) == fs.sub_leq(c, imp),
                        "residuation c & a <= b iff c <= a => b",
                        [a.to_json(), b.to_json(), c.to_json()],
                    )
                    _require(
                        fs.sub_meet(a, fs.sub_join(b, c)) == fs.sub_join(meet, fs.sub_meet(a, c)),
                        "distributivity",
                        [a.to_json(), b.to_json(), c.to_json()],
                    )
                    _require(fs.sub_meet(fs.sub_meet(a, b), c) == fs.sub_meet(a, fs.sub_meet(b, c)), "associativity")
    return {"max_size": top, "triples": triples}


def check_adjoints(seed: int = 0, top: int = 3) -> dict:
    checked = 0
    for m in range(top + 1):
        dom = FinObj(range(m))
        dsubs = _subsets(dom)
        for n in range(top + 1):
            cod = FinObj(range(n))
            csubs = _subsets(cod)
            for f in all_maps(dom, cod):
                for x in dsubs:
                    ex, fa = fs.exists_f(f, x), fs.forall_f(f, x)
                    _require(ex.subset == {f.table[a] for a in x.subset}, "direct image", f.to_json())
                    for y in csubs:
                        checked += 1
                        pre = fs.inv_image(f, y)
                        _require(fs.sub_leq(ex, y) == fs.sub_leq(x, pre), "exists -| pullback",
                                 {"f": f.to_json(), "X": x.to_json(), "Y": y.to_json()})
                        _require(fs.sub_leq(pre, x) == fs.sub_leq(y, fa), "pullback -| forall",
                                 {"f": f.to_json(), "X": x.to_json(), "Y": y.to_json()})
    return {"max_size": top, "instances": checked}


# ---------------------------------------------------------------- 5, 6: interpretation


def _random_sizes(rng, top, nonempty_cod=True):
    m = rng.randint(0, top)
    n = rng.randint(1 if (m and nonempty_cod) else 0, top)
    return m, n


def check_images(seed: int = 0, count: int = 200, top: int = 6) -> dict:
    rng = random.Random(seed)
    A, B = Base("A"), Base("B")
    sig = Signature({"A", "B"}, {"f": (A, B)})
    a, b = Var("a", A), Var("b", B)
    phi = Exists("a", A, Eq(App("f", a, B), b))
    ctx = Context([("b", B)])
    for k in range(count):
        m, n = _random_sizes(rng, top)
        f = random_map(FinObj(range(m)), FinObj(range(n)), rng)
        expected = {f.table[x] for x in f.dom}
        _require(fs.image(f).subset == expected, "image differs from the set of values", f.to_json())
        env = Environment(sig, {"A": f.dom, "B": f.cod}, {"f": f})
        for method in METHODS:
            got = interp_formula(ctx, phi, env, method)
            _require(got.subset == expected, f"internal image differs ({method})", f.to_json())
    return {"morphisms": count, "max_size": top}


def check_substitution(seed: int = 0, count: int = 100, top: int = 3) -> dict:
    rng = random.Random(seed)
    A = Base("A")
    sig = LIBRARY_SIGNATURE
    gen = FormulaGen(sig, rng)
    sigma = {"x": A, "y": A}
    gamma = Context([("u", A), ("w", Product(A, A))])
    for k in range(count):
        n = rng.randint(0, top)
        env = random_environment(sig, {"A": n}, rng)
        q = gen.formula(sigma, 3)
        scope = dict(gamma)
        bindings = [(Var("x", A), gen.term(scope, A, 2)), (Var("y", A), gen.term(scope, A, 2))]
        results = []
        for method in METHODS:
            try:
                results.append(validate_substitution_lemma(gamma, bindings, q, env, method))
            except AssertionError as e:
                raise CheckFailed(str(e), {"formula": str(q), "bindings": [(v.name, str(t)) for v, t in bindings],
                                           "environment": _env_json(env), "method": method}) from None
        _require(results[0] == results[1], "the two interpretations disagree", str(q))
    return {"instances": count, "max_size": top}


# ---------------------------------------------------------------- 7-11: colimits


def check_singletons(seed: int = 0, top: int = 5) -> dict:
    for n in range(top + 1):
        env = Environment(Signature({"U"}), {"U": range(n)})
        for method in METHODS:
            sub, emb = singleton_embedding(env, Base("U"), method)
            _require(len(sub.subset) == n, "singleton object has the wrong size")
    return {"max_size": top}


def check_initial(seed: int = 0, top: int = 4) -> dict:
    for n in range(top + 1):
        env = Environment(Signature({"U"}), {"U": range(n)})
        for method in METHODS:
            out = initial_object(env, ["U"], method)
            _require(len(out["object"]) == 0, "initial object is not empty")
            _require(len(out["maps"]["U"].table) == 0, "map out of the initial object is not empty")
    return {"max_size": top}


def check_coproducts(seed: int = 0, top: int = 4, cap: int = 3, nary_total: int = 6) -> dict:
    binary = 0
    for m in range(top + 1):
        for n in range(top + 1):
            env = Environment(Signature({"A", "B"}), {"A": range(m), "B": range(n)})
            r = binary_coproduct("A", "B", env, cap=cap, seed=seed)
            _require(len(r.object) == m + n, "binary coproduct size", [m, n])
            binary += 1
    names = ["A", "B", "C", "D"]
    nary = 0
    for length in range(1, 5):
        for sizes in cartesian(range(nary_total + 1), repeat=length):
            if sum(sizes) > nary_total:
                continue
            env = Environment(Signature(set(names[:length])), {nm: range(s) for nm, s in zip(names, sizes)})
            r = nary_coproduct(names[:length], env, cap=cap, seed=seed)
            _require(len(r.object) == sum(sizes), "n-ary coproduct size", list(sizes))
            nary += 1
    return {"binary_cases": binary, "nary_cases": nary, "cap": cap}


def _uf_classes(f, g):
    ds = DisjointSet(f.cod.elements)
    for x in f.dom:
        ds.union(f.table[x], g.table[x])
    return len({ds.find(y) for y in f.cod})


def check_coequalizers(seed: int = 0, count: int = 100, top: int = 5, cap: int = 3) -> dict:
    rng = random.Random(seed)
    worst = 0
    for k in range(count):
        m, n = _random_sizes(rng, top)
        A, B = FinObj(range(m)), FinObj(range(n))
        f, g = random_map(A, B, rng), random_map(A, B, rng)
        witness = {"f": f.to_json(), "g": g.to_json()}
        r = coequalizer_of_maps(f, g, cap=cap, seed=seed)
        c = r.extras["c"]
        _require(len(r.object) == _uf_classes(f, g), "class count differs from union-find", witness)
        _require(fs.compose(c, f) == fs.compose(c, g), "c does not coequalise", witness)
        index = r.extras["stabilization_index"]
        _require(index <= n * n, f"stabilization index {index} exceeds |B|^2", witness)
        worst = max(worst, index)
    return {"pairs": count, "max_size": top, "cap": cap, "worst_stabilization_index": worst}


def check_colimits(seed: int = 0, count: int = 200, cap: int = 3) -> dict:
    rng = random.Random(seed)
    shapes = {}
    sampled_cocones = 0
    for k in range(count):
        spec, env = random_diagram(rng, 3, 3, 3)
        r = finite_colimit(spec, env, cap=cap, seed=seed)
        obj, oracle = oracle_colimit(spec, env)
        _require(isomorphic_over_cocones(r.cocone, oracle), "not isomorphic to the oracle", spec.to_json())
        sampled_cocones += not r.verification["exhaustive"]
        key = (len(spec.objects), len(spec.morphisms))
        shapes[key] = shapes.get(key, 0) + 1
    return {"diagrams": count, "cap": cap, "shapes": len(shapes), "sampled_cocone_checks": sampled_cocones}


# ---------------------------------------------------------------- 12: derived rules


def check_derived(seed: int = 0) -> dict:
    counts = validate_all()
    # a proof step by surjective pairing is accepted only on its own instances
    A, B = Base("A"), Base("B")
    sig = Signature({"A", "B"})
    ctx = Context([("z", Product(A, B))])
    good = Exists("a", A, Exists("b", B, Eq(Var("z", Product(A, B)), Pair(Var("a", A), Var("b", B)))))
    check_tree(ProofTree(Sequent(ctx, Top(), good), Rule.Derived, {"name": "surjective_pairing"}), sig)
    bad = Exists("a", A, Exists("b", B, Top()))
    bad_tree = ProofTree(Sequent(ctx, Top(), bad), Rule.Derived, {"name": "surjective_pairing"})
    _require(not is_valid_tree(bad_tree, sig), "surjective pairing accepted a non-instance")
    return dict(counts)


# ---------------------------------------------------------------- running


CRITERIA = [
    (1, "lemma library checks", 1.0, check_library),
    (2, "soundness", 60.0, check_soundness),
    (3, "Heyting laws", 10.0, check_heyting),
    (4, "adjoint triple", 60.0, check_adjoints),
    (5, "image agreement", None, check_images),
    (6, "substitution lemma", None, check_substitution),
    (7, "singleton embedding", None, check_singletons),
    (8, "initial object", None, check_initial),
    (9, "coproducts", None, check_coproducts),
    (10, "coequalisers", None, check_coequalizers),
    (11, "finite colimits", 300.0, check_colimits),
    (12, "derived rules", None, check_derived),
]


def _overrides(body, cases, size_cap):
    """Keyword overrides a check accepts: --cases sets count or samples, --size-cap sets cap."""
    params = inspect.signature(body).parameters
    out = {}
    if cases is not None:
        for name in ("count", "samples"):
            if name in params:
                out[name] = cases
    if size_cap is not None and "cap" in params:
        out["cap"] = size_cap
    return out


def run_criterion(number: int, seed: int = 0, cases: int | None = None, size_cap: int | None = None) -> CriterionReport:
    for n, title, budget, body in CRITERIA:
        if n == number:
            kwargs = _overrides(body, cases, size_cap)
            report = _run(n, title, budget, lambda: body(seed, **kwargs))
            if kwargs:
                report.detail.setdefault("overrides", kwargs)
            return report
    raise KeyError(f"no criterion {number}")


def run_all(seed: int = 0, only=None, cases: int | None = None, size_cap: int | None = None):
    return [run_criterion(n, seed, cases, size_cap) for n, *_ in CRITERIA if only is None or n in only]
