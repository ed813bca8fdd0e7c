import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import BruteSpace, dtm_axioms, to_mask

from dtmlab.classify import tm_test
from dtmlab.constructions import (
    CellMap,
    closed_part,
    collapse_first_edge,
    construction_suite,
    extend_from_closed_subspace,
    open_part,
    open_part_limit_check,
    pushforward,
    restrict_to_closed,
    restrict_to_open_subspace,
    with_extra_point,
)
from dtmlab.dtm import DeficientTM
from dtmlab.errors import InputError
from dtmlab.gallery import build_example, gallery
from dtmlab.setfn import cell_sum, lebesgue, point_mass
from dtmlab.topology import discrete, path

ITEMS = [it.name for it in gallery()]


def nu_fn(nu):
    return lambda S: nu.value(to_mask(S))


def oracle_ok(nu):
    return dtm_axioms(BruteSpace(nu.space), nu_fn(nu)) == []


def weights():
    sp = discrete(3)
    return DeficientTM.from_function(cell_sum(sp, {"a": 1, "b": 2, "c": 0}))


def test_pushforward_merging_points():
    X = discrete(3)
    Y = discrete(2, ["p", "q"])
    f = CellMap(X, Y, {"a": "p", "b": "p", "c": "q"})
    out = pushforward(DeficientTM.from_function(point_mass(X, "a")), f)
    assert [out(["p"]), out(["q"])] == [1, 0]
    assert oracle_ok(out)


def test_pushforward_identity_and_collapse():
    lam, nu = build_example("solid_indicator")
    same = pushforward(nu, CellMap.identity(nu.space))
    assert same.values == nu.values
    f = collapse_first_edge(nu.space)
    img = pushforward(nu, f)
    assert oracle_ok(img)
    assert img(f.target.full) == 1 and img(["v0"]) == 1
    assert tm_test(nu).data["is_tm"] is False
    assert tm_test(img).data["is_tm"] is True


def test_cell_map_validation():
    sp = path(2)
    with pytest.raises(InputError):
        CellMap(sp, sp, [0, 1, 2, 4, 3])  # edges swapped: faces no longer match
    with pytest.raises(InputError):
        CellMap(sp, sp, [0, 1])


def test_restrict_to_closed_examples():
    lam, nu = build_example("solid_indicator")
    sp = nu.space
    D = sp.mask(["v0", "e01", "v1"])
    nD = restrict_to_closed(nu, D)
    assert nD(nD.space.full) == 1 and oracle_ok(nD)
    far = restrict_to_closed(nu, sp.mask(["v2"]))
    assert all(v == 0 for v in far.values.values())
    w = weights()
    part = restrict_to_closed(w, w.space.mask(["a", "b"]))
    assert part(part.space.full) == 3


def test_extend_from_closed_subspace_examples():
    X = path(2)
    Y = path(3)
    delta = DeficientTM.from_function(point_mass(X, "v0"))
    ext = extend_from_closed_subspace(delta, Y)
    assert ext(Y.full) == 1 and ext(["v3"]) == 0 and oracle_ok(ext)
    _, sv = build_example("solid_indicator")
    e2 = extend_from_closed_subspace(sv, Y)
    for A in Y.admissible_sets():
        contains = not Y.mask(["v0", "e01", "v1"]) & ~A
        if Y.is_compact(A):
            assert e2.value(A) == (1 if contains else 0)
    Z, emb = with_extra_point(X)
    e3 = extend_from_closed_subspace(sv, Z, emb)
    assert e3(Z.full) == 1 and oracle_ok(e3)


def test_extend_rejects_non_closed_embedding():
    X = discrete(1, ["v1"])
    nu = DeficientTM.from_function(cell_sum(X, {"v1": 1}))
    Y = path(2)
    assert extend_from_closed_subspace(nu, Y, [Y.by_label["v1"]])(Y.full) == 1
    with pytest.raises(InputError):
        extend_from_closed_subspace(nu, Y, [Y.by_label["e01"]])
    with pytest.raises(InputError):
        extend_from_closed_subspace(DeficientTM.from_function(lebesgue(path(1))), path(2),
                                    [0, 1, 4])


def test_restrict_to_open_subspace_examples():
    nu = DeficientTM.from_function(lebesgue(path(2)))
    sp = nu.space
    V = sp.up_closure(sp.mask(["v1"]))
    nV = restrict_to_open_subspace(nu, V)
    assert nV(nV.space.full) == nu.value(V) == 0
    assert any(c.collar for c in nV.space.cells) and oracle_ok(nV)
    w = weights()
    a = restrict_to_open_subspace(w, w.space.mask(["a"]))
    assert a(a.space.full) == 1


def test_open_part_examples():
    w = weights()
    sp = w.space
    assert open_part(w, sp.mask(["a"]))(sp.full) == 1
    _, sv = build_example("solid_indicator")
    assert open_part(sv, sv.space.full).values == sv.values


def test_closed_part_examples():
    w = weights()
    sp = w.space
    b = closed_part(w, sp.mask(["b"]))
    assert all(b.value(A) == w.value(A & sp.mask(["b"])) for A in sp.admissible_sets())
    _, sv = build_example("solid_indicator")
    assert closed_part(sv, sv.space.full).values == sv.values


def test_open_and_closed_parts_require_right_kind():
    _, sv = build_example("solid_indicator")
    with pytest.raises(InputError):
        open_part(sv, ["v0"])
    with pytest.raises(InputError):
        closed_part(sv, ["e01"])


@pytest.mark.parametrize("item", ITEMS)
def test_suite_on_gallery_inputs(item):
    _, nu = build_example(item)
    rep = construction_suite(nu)
    assert rep.passed, [(c.name, c.witnesses[:1]) for c in rep.failures()]


@pytest.mark.parametrize("item", ITEMS)
def test_open_part_limit_identity(item):
    _, nu = build_example(item)
    c = open_part_limit_check(nu)
    assert c.passed
    assert "cell_opens_attain" in c.data


def test_cell_opens_alone_attain_for_point_counting():
    _, nu = build_example("point_counting")
    assert open_part_limit_check(nu).data["cell_opens_attain"] is True


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_parts_are_dtms_by_oracle(data):
    _, nu = build_example(data.draw(st.sampled_from(["solid_indicator", "overlap_gadget",
                                                     "point_counting"])))
    sp = nu.space
    V = data.draw(st.sampled_from(sp.open_sets()))
    F = data.draw(st.sampled_from(sp.closed_sets()))
    muV, muF = open_part(nu, V), closed_part(nu, F)
    assert oracle_ok(muV) and oracle_ok(muF)
    for K in sp.compacts():
        assert muF.value(K) == nu.value(F & K)
        assert muV.value(K) <= nu.value(K)
