import random
from itertools import product as cartesian

import pytest

from toposlang import finset as fs
from toposlang.colimits import (
    CoconeSpec, DiagramSpec, VerificationError, binary_coproduct, chain_family,
    chain_literal, coequalizer_of_maps, finite_colimit, full_product_classes,
    initial_object, isomorphic_over_cocones, nary_coproduct, oracle_colimit,
    pushforward_term, relation_term, singleton_embedding, union_term,
)
from toposlang.context import Context
from toposlang.finset import FinMor, FinObj
from toposlang.generate import random_diagram
from toposlang.interpret import Environment, interp_formula, interp_term
from toposlang.syntax import App, Base, Power, Signature, Var, empty
from toposlang.unionfind import DisjointSet

A, B = Base("A"), Base("B")


def discrete(**sizes):
    spec = DiagramSpec(tuple(sizes))
    return spec, spec.environment({k: range(v) for k, v in sizes.items()}, {})


def uf_class_count(f: FinMor, g: FinMor) -> int:
    ds = DisjointSet(f.cod.elements)
    for a in f.dom:
        ds.union(f(a), g(a))
    return len(ds.classes())


# ---------------------------------------------------------------- initial object and singletons


def test_initial_object_is_empty_with_unique_maps():
    _, env = discrete(U=3, V=0)
    out = initial_object(env, targets=["U", "V"])
    assert len(out["object"]) == 0
    assert set(out["maps"]) == {"U", "V"}


@pytest.mark.parametrize("n", range(6))
def test_singleton_embedding_is_bijective(n):
    _, env = discrete(U=n)
    sub, emb = singleton_embedding(env, Base("U"))
    assert len(sub) == n
    assert emb.table == {e: frozenset([e]) for e in range(n)}


# ---------------------------------------------------------------- crucial terms


def test_union_of_two_singleton_labels():
    sig = Signature({"A"})
    env = Environment(sig, {"A": range(2)})
    z1, z2 = Var("z1", Power(A)), Var("z2", Power(A))
    ctx = Context([("z1", Power(A)), ("z2", Power(A))])
    m = interp_term(ctx, union_term(z1, z2), env)
    assert m.table[(frozenset({0}), frozenset({1}))] == frozenset({0, 1})


def test_pushforward_along_identity_and_of_empty():
    sig = Signature({"A"}, {"i": (A, A)})
    env = Environment(sig, {"A": range(3)}, {"i": {k: k for k in range(3)}})
    z = Var("z", Power(A))
    m = interp_term(Context([("z", Power(A))]), pushforward_term(sig, "i", z), env)
    assert all(m.table[s] == s for s in m.dom)
    e = interp_term(Context(), pushforward_term(sig, "i", empty(A)), env)
    assert set(e.table.values()) == {frozenset()}


# ---------------------------------------------------------------- coproducts


def test_binary_coproduct_size_and_injections():
    _, env = discrete(A=2, B=3)
    result = binary_coproduct("A", "B", env)
    assert len(result.object) == 5
    ia, ib = result.cocone.legs["A"], result.cocone.legs["B"]
    ra, rb = set(ia.table.values()), set(ib.table.values())
    assert len(ra) == 2 and len(rb) == 3 and not ra & rb
    assert ra | rb == set(result.object)
    assert result.verification["cocones"] > 0


def test_coproduct_with_empty_summand():
    _, env = discrete(A=0, B=3)
    result = binary_coproduct("A", "B", env)
    ib = result.cocone.legs["B"]
    assert sorted(ib.table.values(), key=fs.label_key) == list(result.object.elements)


def test_nary_coproduct_sizes():
    _, env = discrete(A=1, B=2, C=3)
    assert len(nary_coproduct(["A", "B", "C"], env).object) == 6
    single = nary_coproduct(["B"], env)
    assert len(single.object) == 2


def test_mediating_map_is_case_split():
    spec, env = discrete(A=2, B=1)
    result = binary_coproduct("A", "B", env)
    apex = FinObj("pq")
    cocone = CoconeSpec(apex, {"A": FinMor(env.base["A"], apex, {0: "q", 1: "p"}),
                               "B": FinMor(env.base["B"], apex, {0: "q"})}, spec, env)
    table = {}
    for name, leg in result.cocone.legs.items():
        for x in leg.dom:
            table[leg(x)] = cocone.legs[name](x)
    assert len(table) == 3 and sorted(table.values()) == ["p", "q", "q"]


def test_associativity_by_cardinality():
    _, env = discrete(A=1, B=2, C=2)
    three = nary_coproduct(["A", "B", "C"], env)
    two = nary_coproduct(["A", "B"], env)
    assert len(three.object) == len(two.object) + 2


def test_tampered_cocone_rejected():
    spec = DiagramSpec(("A", "B"), (("f", "A", "B"),))
    env = spec.environment({"A": range(2), "B": range(2)}, {"f": {0: 0, 1: 1}})
    apex = FinObj([0, 1])
    with pytest.raises(VerificationError):
        CoconeSpec(apex, {"A": fs.identity(apex), "B": FinMor(apex, apex, {0: 1, 1: 0})}, spec, env)


# ---------------------------------------------------------------- coequalisers


def test_relation_of_equal_terms_is_diagonal():
    sig = Signature({"A", "B"}, {"f": (A, B)})
    env = Environment(sig, {"A": range(2), "B": range(3)}, {"f": {0: 0, 1: 2}})
    a = Var("a", A)
    fa = App("f", a, B)
    relation, _ = relation_term(fa, fa, a)
    w = Var(relation.var, relation.var_type)
    sub = interp_formula(Context([(w.name, w.type)]), relation.body, env, "pointwise")
    assert sub.subset == {(b, b) for b in range(3)}


def test_coequaliser_classes_example():
    a, b = FinObj([0]), FinObj("xyz")
    result = coequalizer_of_maps(FinMor(a, b, {0: "x"}), FinMor(a, b, {0: "y"}))
    assert set(result.object) == {frozenset("xy"), frozenset("z")}


def test_coequaliser_of_equal_maps_is_bijective():
    a, b = FinObj([0, 1]), FinObj([0, 1, 2])
    f = FinMor(a, b, {0: 2, 1: 2})
    result = coequalizer_of_maps(f, f)
    c = result.extras["c"]
    assert len(result.object) == 3
    assert len(set(c.table.values())) == 3


def test_coequaliser_collapses_two_points():
    a, b = FinObj([0]), FinObj("xy")
    result = coequalizer_of_maps(FinMor(a, b, {0: "x"}), FinMor(a, b, {0: "y"}))
    assert len(result.object) == 1


def test_coequalisers_match_union_find():
    rng = random.Random(7)
    for _ in range(40):
        a, b = FinObj(range(rng.randint(0, 4))), FinObj(range(rng.randint(1, 4)))
        f = FinMor(a, b, {x: rng.choice(b.elements) for x in a})
        g = FinMor(a, b, {x: rng.choice(b.elements) for x in a})
        result = coequalizer_of_maps(f, g, cap=2)
        assert len(result.object) == uf_class_count(f, g)
        assert result.extras["stabilization_index"] <= len(b) ** 2
        related = result.extras["relation_pairs"]
        assert all((y, x) in related for x, y in related)
        assert all((x, x) in related for x in b)
        assert all((x, w) in related for x, y in related for z, w in related if y == z)


def test_chain_family_members_match_literal_chains():
    sig = Signature({"A", "B"}, {"f": (A, B), "g": (A, B)})
    a = Var("a", A)
    t0, t1 = App("f", a, B), App("g", a, B)
    b1, b2 = Var("b1", B), Var("b2", B)
    cor = chain_family(t0, t1, a, b1, b2)
    ctx = Context([("b1", B), ("b2", B)])
    rng = random.Random(2)
    for _ in range(10):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        tables = {k: {x: rng.randrange(m) for x in range(n)} for k in ("f", "g")}
        env = Environment(sig, {"A": range(n), "B": range(m)}, tables)
        for length in (1, 2, 3):
            ours = interp_formula(ctx, cor.member(length - 1), env, "pointwise")
            literal = interp_formula(ctx, chain_literal(t0, t1, a, b1, b2, length), env, "pointwise")
            assert ours == literal


# ---------------------------------------------------------------- finite colimits


def test_discrete_colimit_is_the_coproduct():
    spec, env = discrete(A=2, B=1)
    assert len(finite_colimit(spec, env).object) == len(binary_coproduct("A", "B", env).object) == 3


def test_parallel_identity_and_swap():
    spec = DiagramSpec(("A", "B"), (("f", "A", "B"), ("g", "A", "B")))
    env = spec.environment({"A": range(2), "B": range(2)}, {"f": {0: 0, 1: 1}, "g": {0: 1, 1: 0}})
    assert len(finite_colimit(spec, env).object) == 1


def test_pushout_shape():
    spec = DiagramSpec(("A", "B", "C"), (("f", "A", "B"), ("g", "A", "C")))
    env = spec.environment({"A": range(2), "B": range(3), "C": range(2)},
                           {"f": {0: 0, 1: 1}, "g": {0: 0, 1: 0}})
    result = finite_colimit(spec, env)
    oracle_obj, oracle = oracle_colimit(spec, env)
    assert len(result.object) == len(oracle_obj) == 3
    assert isomorphic_over_cocones(result.cocone, oracle)


def test_oracle_examples():
    spec, env = discrete(A=2, B=3)
    assert len(oracle_colimit(spec, env)[0]) == 5
    spec = DiagramSpec(("A",), (("i", "A", "A"),))
    env = spec.environment({"A": range(3)}, {"i": {k: k for k in range(3)}})
    assert len(oracle_colimit(spec, env)[0]) == 3


def test_random_diagrams_against_oracle():
    rng = random.Random(11)
    for _ in range(25):
        spec, env = random_diagram(rng)
        result = finite_colimit(spec, env, cap=2, samples=50, limit=2000)
        oracle_obj, oracle = oracle_colimit(spec, env)
        assert len(result.object) == len(oracle_obj)
        assert isomorphic_over_cocones(result.cocone, oracle)


def test_full_product_relation_agrees_with_oracle():
    spec = DiagramSpec(("A", "B"), (("f", "A", "B"),))
    env = spec.environment({"A": range(1), "B": range(2)}, {"f": {0: 1}})
    classes = full_product_classes(spec, env)
    _, oracle = oracle_colimit(spec, env)
    # a reflexive relation whose classes are as many as the oracle's
    assert all(p in cls for p, cls in classes.items())
    assert len({cls for cls in classes.values()}) == len(oracle.apex)


def test_empty_diagram_rejected():
    with pytest.raises(ValueError):
        finite_colimit(DiagramSpec(()), Environment(Signature(), {}))


def test_nonsquare_diagram_validation():
    with pytest.raises(ValueError):
        DiagramSpec(("A",), (("f", "A", "B"),))
    with pytest.raises(ValueError):
        DiagramSpec(("A", "A"))


def test_exhaustive_cocones_for_one_plus_one():
    spec, env = discrete(A=1, B=1)
    result = binary_coproduct("A", "B", env, cap=3)
    report = result.verification
    assert report["exhaustive"] and report["cocones"] == sum(k * k for k in range(4))


@pytest.mark.parametrize("sizes", list(cartesian(range(3), range(3))))
def test_small_coproducts_exhaustive(sizes):
    spec, env = discrete(A=sizes[0], B=sizes[1])
    assert len(binary_coproduct("A", "B", env).object) == sum(sizes)
