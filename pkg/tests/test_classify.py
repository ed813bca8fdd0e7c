from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import (
    BruteSpace,
    outer_star,
    subadditive_on_compacts,
    subadditive_on_opens,
    tm1,
    to_mask,
)

from dtmlab.classify import (
    caratheodory_test,
    classify,
    csv_table,
    dtm_csv,
    extend_to_measure,
    outer_measure,
    subadditivity_test,
    tm_test,
)
from dtmlab.dtm import DeficientTM
from dtmlab.errors import ClassificationError
from dtmlab.extreal import INF, ext_sum, parse_value
from dtmlab.gallery import build_example, gallery
from dtmlab.setfn import cell_sum, counting, lebesgue, point_mass
from dtmlab.topology import discrete, grid1d, path

ITEMS = [it.name for it in gallery()]


def nu_fn(nu):
    return lambda S: nu.value(to_mask(S))


def dtm_of(lam):
    return DeficientTM.from_function(lam)


def rank(rows, n):
    """Rank of 0/1 rows over the rationals."""
    rows = [[Fraction(x) for x in r] for r in rows]
    r = 0
    for col in range(n):
        piv = next((k for k in range(r, len(rows)) if rows[k][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for k in range(len(rows)):
            if k != r and rows[k][col]:
                f = rows[k][col] / rows[r][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        r += 1
    return r


@pytest.mark.parametrize("item", ITEMS)
def test_tm_verdict_matches_oracle(item):
    _, nu = build_example(item)
    rep = tm_test(nu)
    assert rep.passed
    assert rep.data["is_tm"] == tm1(BruteSpace(nu.space), nu_fn(nu))
    assert rep.data["criterion"] == rep.data["is_tm"]


@pytest.mark.parametrize("item", ITEMS)
def test_subadditivity_verdicts_match_oracle(item):
    _, nu = build_example(item)
    rep = subadditivity_test(nu)
    bs = BruteSpace(nu.space)
    assert rep.data["compact_pairs"] == subadditive_on_compacts(bs, nu_fn(nu))
    assert rep.data["open_pairs"] == subadditive_on_opens(bs, nu_fn(nu))
    assert rep.data["consistent"]


def test_solid_indicator_certificates():
    _, nu = build_example("solid_indicator")
    cert = tm_test(nu).data["certificate"]
    assert cert["C"]["labels"] == ["v0"] and cert["gap"] == 1
    sub = subadditivity_test(nu).data
    assert sub["subadditive"] is False
    c = sub["certificate"]
    assert c["resolution"] == "refined"
    # the two halves of the segment at half resolution
    assert c["C"]["labels"] == ["v0", "v1", "e01"] and c["K"]["labels"] == ["v1", "v2", "e12"]


def test_two_point_gadget_is_not_tm():
    _, nu = build_example("single_zero_point")
    sp = nu.space
    z = sp.mask(["v1"])
    assert nu.value(z) == 0 and nu.value(sp.full & ~z) == 0 and nu.value(sp.full) > 0
    assert tm_test(nu).data["is_tm"] is False


def test_point_mass_is_tm_and_subadditive():
    nu = dtm_of(point_mass(discrete(3), "a"))
    assert tm_test(nu).data["is_tm"]
    assert subadditivity_test(nu).data["subadditive"]


def test_length_on_path_needs_finer_resolution_for_subadditivity():
    nu = dtm_of(lebesgue(path(2)))
    d = subadditivity_test(nu).data
    assert d["compact_pairs"] and not d["open_pairs"]
    assert d["refined"] == {"compact_pairs": True, "open_pairs": True}
    with pytest.raises(ClassificationError):
        extend_to_measure(nu)


def test_outer_measure_discrete_values():
    sp = discrete(2)
    nu = dtm_of(cell_sum(sp, {"a": 1, "b": 2}))
    t = outer_measure(nu)
    assert t.report.passed
    assert t(sp.full) == 3 and t(0) == 0


def test_outer_measure_of_open_edge_is_zero_under_thin_rule():
    nu = dtm_of(lebesgue(path(2)))
    t = outer_measure(nu)
    assert t(["e01"]) == 0
    assert t.thin_used > 0


@pytest.mark.parametrize("item", ["point_counting", "family_counting", "point_counting_inf",
                                  "unbounded_family"])
def test_outer_measure_matches_oracle(item):
    _, nu = build_example(item)
    bs = BruteSpace(nu.space)
    t = outer_measure(nu)
    assert t.report.passed
    f = nu_fn(nu)
    for E in bs.subsets:
        via_closed = min(f(F) for F in bs.closed if E <= F)
        assert t(to_mask(E)) == min(outer_star(bs, f, E), via_closed)


@pytest.mark.parametrize("item", ["point_counting", "family_counting", "point_counting_inf",
                                  "unbounded_family"])
def test_measure_extension_for_subadditive_gallery_items(item):
    _, nu = build_example(item)
    sp = nu.space
    bs = BruteSpace(sp)
    m = extend_to_measure(nu)
    assert m.report.passed, m.report.failures()
    for A in bs.admissible:
        assert m.value(to_mask(A)) == nu.value(to_mask(A))
    for E in bs.subsets:
        assert m.value(to_mask(E)) == ext_sum(m.atoms[i] for i in E)
    t = outer_measure(nu)
    assert all(caratheodory_test(t, nu, to_mask(E)) for E in bs.subsets)
    # admissible indicators span all cell functions, so the weights are forced
    rows = [[1 if i in A else 0 for i in range(sp.n)] for A in bs.admissible]
    assert rank(rows, sp.n) == sp.n


def test_radon_flags():
    _, nu = build_example("point_counting")
    assert extend_to_measure(nu).radon is True
    _, inf = build_example("point_counting_inf")
    m = extend_to_measure(inf)
    assert m.radon is False and m.regular_borel is None
    assert m.atoms[inf.space.by_label["v0"]] == INF


def test_non_subadditive_extension_names_certificate():
    _, nu = build_example("solid_indicator")
    with pytest.raises(ClassificationError) as info:
        extend_to_measure(nu)
    assert info.value.certificate is not None


def test_caratheodory_closed_sets_measurable_on_counting():
    sp = grid1d(2, "left")
    nu = dtm_of(counting(sp, ["v1", "v2"]))
    t = outer_measure(nu)
    for F in sp.closed_sets():
        assert caratheodory_test(t, nu, F)


def test_classify_and_csv():
    _, nu = build_example("point_counting")
    rep = classify(nu)
    assert rep.passed and rep.data["is_tm"] and rep.data["subadditive"]
    text = dtm_csv(nu)
    header, *rows = text.strip().splitlines()
    assert header == "region_key,value_num,value_den,value_inf_flag"
    assert len(rows) == len(nu.space.admissible_sets())
    assert csv_table(nu.space, [(0, INF)]).strip().splitlines()[1] == ",0,1,1"


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=4))
def test_discrete_measures_classify_as_measures(ws):
    sp = discrete(len(ws))
    nu = dtm_of(cell_sum(sp, dict(enumerate(ws))))
    assert tm_test(nu).data["is_tm"]
    assert subadditivity_test(nu).data["subadditive"]
    m = extend_to_measure(nu)
    assert [m.atoms[i] for i in range(sp.n)] == ws
    t = outer_measure(nu)
    assert all(caratheodory_test(t, nu, E) for E in range(sp.full + 1))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from([0, 1, 2, "inf"]), min_size=2, max_size=2))
def test_vertex_weights_on_path_are_measures(ws):
    sp = path(2)
    nu = dtm_of(cell_sum(sp, {"v0": ws[0], "v2": ws[1]}))
    assert tm_test(nu).data["is_tm"] == tm1(BruteSpace(sp), nu_fn(nu))
    m = extend_to_measure(nu)
    assert m.report.passed
    assert m.atoms[sp.by_label["v0"]] == parse_value(ws[0])
    assert m.atoms[sp.by_label["v2"]] == parse_value(ws[1])
