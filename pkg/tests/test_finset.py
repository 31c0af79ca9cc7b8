import random
from itertools import product as cartesian

import pytest
from hypothesis import given, settings, strategies as st

from toposlang import finset as fs
from toposlang.finset import FinMor, FinObj, ShapeError, Subobj
from toposlang.unionfind import DisjointSet


def mor(dom, cod, values):
    dom, cod = FinObj(dom), FinObj(cod)
    return FinMor(dom, cod, dict(zip(dom.elements, values)))


def test_objects_are_canonical():
    assert FinObj([3, 1, 2]) == FinObj([1, 2, 3])
    assert FinObj([1, 1]).elements == (1,)


def test_morphism_must_be_total_and_land_in_codomain():
    with pytest.raises(ShapeError):
        FinMor(FinObj([0, 1]), FinObj([0]), {0: 0})
    with pytest.raises(ShapeError):
        FinMor(FinObj([0]), FinObj([0]), {0: 5})


def test_compose_and_identity():
    f = mor([0, 1, 2], "ab", "aba")
    g = mor("ab", [7, 8], [8, 7])
    assert fs.compose(g, f).table == {0: 8, 1: 7, 2: 8}
    assert fs.compose(f, fs.identity(f.dom)) == f
    assert fs.compose(fs.identity(f.cod), f) == f
    with pytest.raises(ShapeError):
        fs.compose(f, g)


def test_product_projections_and_pairing():
    a, b = FinObj([0, 1]), FinObj("xyz")
    p, p1, p2 = fs.product(a, b)
    assert len(p) == 6
    f, g = mor([5, 6], [0, 1], [1, 0]), mor([5, 6], "xyz", "zz")
    h = fs.pairing(f, g)
    assert fs.compose(p1, h) == f and fs.compose(p2, h) == g


def test_equalizer():
    f = mor([0, 1, 2], [0, 1], [0, 1, 1])
    g = mor([0, 1, 2], [0, 1], [0, 0, 1])
    assert fs.equalizer(f, g).subset == {0, 2}


def test_pullback_counts_fibre_pairs():
    f = mor([0, 1, 2], "ab", "aab")
    g = mor([0, 1], "ab", "ab")
    p, p1, p2 = fs.pullback(f, g)
    assert set(p) == {(0, 0), (1, 0), (2, 1)}
    assert fs.compose(f, p1) == fs.compose(g, p2)


def test_pushout_of_two_injections_glues():
    a = FinObj([0, 1])
    f = FinMor(a, FinObj([0, 1, 2]), {0: 0, 1: 1})
    q, i1, i2 = fs.pushout(f, f)
    # 2|B| - |A|
    assert len(q) == 2 * 3 - 2
    assert fs.compose(i1, f) == fs.compose(i2, f)


def test_image_of_constant():
    f = mor([0, 1, 2], [0, 1, 2], [1, 1, 1])
    assert fs.image(f).subset == {1}


def test_heyting_ops_small():
    e = FinObj([0, 1, 2])
    x, y = Subobj(e, [0, 1]), Subobj(e, [1, 2])
    assert fs.sub_meet(x, y).subset == {1}
    assert fs.sub_join(x, y).subset == {0, 1, 2}
    assert fs.sub_implies(x, y).subset == {1, 2}
    assert fs.sub_not(x).subset == {2}
    w = fs.HeytingOpsWitness(e)
    assert w.top.subset == {0, 1, 2} and not w.bottom.subset
    assert len(list(w.all_subobjects())) == 8


def test_subobjects_of_different_objects_do_not_mix():
    with pytest.raises(ShapeError):
        fs.sub_meet(Subobj(FinObj([0]), []), Subobj(FinObj([1]), []))


def test_countable_join_constant_family():
    e = FinObj(range(4))
    s = Subobj(e, [1, 2])
    join, n = fs.countable_join_fixpoint(lambda i: s, e)
    assert join == s and n == 0


def test_countable_join_growing_family():
    e = FinObj(range(5))
    join, n = fs.countable_join_fixpoint(lambda i: Subobj(e, range(min(i, 4) + 1)), e)
    assert join == fs.top(e) and n == 4


def test_countable_join_recurrent_stops_on_repeat():
    e = FinObj(range(3))
    calls = []

    def family(i):
        calls.append(i)
        return Subobj(e, [i % 2])

    join, n = fs.countable_join_fixpoint(family, e, recurrent=True)
    assert join.subset == {0, 1} and n == 1
    assert max(calls) == 2


def test_countable_join_rejects_wrong_ambient():
    e = FinObj(range(2))
    with pytest.raises(ShapeError):
        fs.countable_join_fixpoint(lambda i: Subobj(FinObj([9]), []), e)


def test_quantifier_examples():
    f = mor([0, 1, 2], "ab", "aab")
    x = Subobj(f.dom, [0, 2])
    assert fs.exists_f(f, x).subset == {"a", "b"}
    assert fs.forall_f(f, x).subset == {"b"}
    assert fs.inv_image(f, Subobj(f.cod, ["a"])).subset == {0, 1}


def test_power_and_membership():
    a = FinObj([0, 1, 2])
    assert len(fs.power(a)) == 8
    mem = fs.membership_subobject(a)
    assert (1, frozenset({1, 2})) in mem
    assert (0, frozenset({1, 2})) not in mem


def test_characteristic_round_trip():
    e = FinObj("abcd")
    s = Subobj(e, "bd")
    assert fs.subobj_of_char(fs.char_of(s)) == s


def test_transpose_round_trip_random():
    rng = random.Random(3)
    omega = fs.omega()
    for _ in range(100):
        a = FinObj(range(rng.randint(0, 3)))
        b = FinObj(range(rng.randint(0, 3)))
        ab, _, _ = fs.product(a, b)
        f = FinMor(ab, omega, {e: rng.random() < 0.5 for e in ab})
        g = fs.transpose(f, a, b)
        assert fs.untranspose(g, a) == f


def test_quotient_labels_classes_by_least_member():
    q, m = fs.quotient(FinObj(range(5)), [(3, 1), (4, 3)])
    assert set(q) == {0, 1, 2}
    assert m.table == {0: 0, 1: 1, 2: 2, 3: 1, 4: 1}


def test_json_shapes():
    f = mor([0, 1], "ab", "ba")
    assert f.to_json() == {"0": "b", "1": "a"}
    assert Subobj(f.dom, [1]).to_json() == ["1"]


# ---------------------------------------------------------------- properties

def maps(top=4):
    @st.composite
    def build(draw):
        n = draw(st.integers(0, top))
        m = draw(st.integers(1, top))
        values = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
        return FinMor(FinObj(range(n)), FinObj(range(m)), dict(enumerate(values)))
    return build()


def subsets_of(obj, draw):
    return Subobj(obj, [x for x in obj if draw(st.booleans())])


@settings(max_examples=200, deadline=None)
@given(maps(6))
def test_image_equals_range(f):
    assert fs.image(f).subset == set(f.table.values())


@settings(max_examples=200, deadline=None)
@given(maps(), st.data())
def test_exists_is_image_of_restriction(f, data):
    x = subsets_of(f.dom, data.draw)
    assert fs.exists_f(f, x).subset == fs.image(fs.restrict(f, x)).subset


@settings(max_examples=200, deadline=None)
@given(maps(), st.data())
def test_inverse_image_preserves_meets_and_joins(f, data):
    y1, y2 = subsets_of(f.cod, data.draw), subsets_of(f.cod, data.draw)
    assert fs.inv_image(f, fs.sub_meet(y1, y2)) == fs.sub_meet(fs.inv_image(f, y1), fs.inv_image(f, y2))
    assert fs.inv_image(f, fs.sub_join(y1, y2)) == fs.sub_join(fs.inv_image(f, y1), fs.inv_image(f, y2))


@settings(max_examples=200, deadline=None)
@given(maps(5), maps(5))
def test_pushout_classes_match_union_find(f, g):
    if f.dom != g.dom:
        g = FinMor(f.dom, g.cod, {x: g.cod.elements[0] for x in f.dom}) if len(g.cod) else g
    if f.dom != g.dom:
        return
    q, i1, i2 = fs.pushout(f, g)
    ds = DisjointSet([("l", b) for b in f.cod] + [("r", c) for c in g.cod])
    for x in f.dom:
        ds.union(("l", f(x)), ("r", g(x)))
    assert len(q) == len(ds.classes())
    glue = {}
    for b in f.cod:
        glue.setdefault(ds.find(("l", b)), set()).add(i1(b))
    for c in g.cod:
        glue.setdefault(ds.find(("r", c)), set()).add(i2(c))
    assert all(len(v) == 1 for v in glue.values())


def test_adjunctions_exhaustive_small():
    for n, m in cartesian(range(3), range(1, 3)):
        dom, cod = FinObj(range(n)), FinObj(range(m))
        for values in cartesian(range(m), repeat=n):
            f = FinMor(dom, cod, dict(enumerate(values)))
            for xs in cartesian((0, 1), repeat=n):
                x = Subobj(dom, [i for i in range(n) if xs[i]])
                for ys in cartesian((0, 1), repeat=m):
                    y = Subobj(cod, [j for j in range(m) if ys[j]])
                    assert fs.sub_leq(fs.exists_f(f, x), y) == fs.sub_leq(x, fs.inv_image(f, y))
                    assert fs.sub_leq(fs.inv_image(f, y), x) == fs.sub_leq(y, fs.forall_f(f, x))
