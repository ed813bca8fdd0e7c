import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import BruteSpace, dtm_axioms, lam_of, plus, to_mask

from dtmlab.dtm import (
    DeficientTM,
    check_dtm_axioms,
    extend_from_compacts,
    random_dominating_dtm,
    regularity_suite,
    smallest_dominating_certificate,
)
from dtmlab.errors import InputError
from dtmlab.gallery import build_example, gallery
from dtmlab.setfn import SolidIndicator, TableFunction, cell_sum, lebesgue, point_mass
from dtmlab.topology import discrete, grid1d, path


def nu_fn(nu):
    return lambda S: nu.value(to_mask(S))


def solid_indicator():
    return build_example("solid_indicator")


def test_point_mass_on_discrete_is_dtm():
    sp = discrete(3)
    table = {A: (1 if A & 1 else 0) for A in sp.admissible_sets()}
    rep = check_dtm_axioms(sp, table, "delta_a")
    assert rep.passed and rep.dtm is not None


def test_solid_indicator_is_dtm_with_known_values():
    lam, nu = solid_indicator()
    sp = nu.space
    assert check_dtm_axioms(sp, nu).passed
    assert nu(sp.full) == 1
    assert nu(["v0"]) == 0
    assert nu(sp.full & ~sp.mask(["v0"])) == 0


def test_empty_set_with_mass_fails():
    sp = discrete(2)
    table = {A: 1 for A in sp.admissible_sets()}
    rep = check_dtm_axioms(sp, table)
    assert not rep.passed
    assert not rep["additive_on_compacts"].passed
    assert rep.dtm is None


def test_inner_regular_names_attaining_compacts():
    lam, nu = solid_indicator()
    rep = check_dtm_axioms(nu.space, nu)
    att = rep["inner_regular"].data["attaining"]
    assert len(att) == len(nu.space.open_sets())


@pytest.mark.parametrize("item", [it.name for it in gallery()])
def test_gallery_dtms_pass_oracle_axioms(item):
    lam, nu = next(g for g in gallery() if g.name == item).build()
    bs = BruteSpace(nu.space)
    assert dtm_axioms(bs, nu_fn(nu)) == []
    assert check_dtm_axioms(nu.space, nu).passed


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_axiom_checker_agrees_with_oracle_on_perturbations(seed, bump):
    lam, nu = solid_indicator()
    sp = nu.space
    rng = random.Random(seed)
    table = {A: nu.value(A) for A in sp.admissible_sets()}
    A = rng.choice(sp.admissible_sets())
    table[A] = table[A] + bump
    ok = check_dtm_axioms(sp, table).passed
    bs = BruteSpace(sp)
    assert ok == (dtm_axioms(bs, lambda S: table[to_mask(S)]) == [])
    # X is connected, compact and open, so only its own value may move freely
    assert ok == (A == sp.full)


def test_extension_on_discrete_always_exists():
    lam = cell_sum(discrete(3), {"a": 2, "b": 0, "c": 5})
    res = extend_from_compacts(lam)
    assert res.exists and res.witness is None
    for K in lam.space.compacts():
        assert res.dtm.value(K) == lam.value(K)


def test_extension_for_component_rule_and_resolution_verdicts():
    lam, _ = build_example("component_rule_multi")
    res = extend_from_compacts(lam)
    assert res.exists
    assert all(res.dtm.value(K) == lam.value(K) for K in lam.space.compacts())
    hungry, _ = build_example("edge_hungry")
    v = extend_from_compacts(hungry).verdicts
    assert set(v) >= {"thin", "star_r", "star_r2"}
    assert v["star_r"] != v["star_r2"]


def test_extension_rejects_negative_functions():
    with pytest.raises(InputError):
        extend_from_compacts(cell_sum(discrete(2), {"a": -1}))


def test_extension_failure_reports_witness():
    sp = path(1)
    assert extend_from_compacts(point_mass(sp, "v0")).exists
    # additive but not monotone: the whole segment weighs less than its endpoint
    vals = {(): 0, ("v0",): 1, ("v1",): 0, ("v0", "v1"): 1, ("v0", "v1", "e01"): 0}
    res = extend_from_compacts(TableFunction(sp, vals))
    assert not res.exists
    assert res.witness.labels == ["v0", "v1", "e01"]


def test_smallest_dominating_certificate_on_lam1():
    lam = cell_sum(discrete(3), {"a": 2, "b": -3, "c": 1})
    rep = smallest_dominating_certificate(lam, trials=50, seed=11)
    assert rep.passed, rep.failures()
    bound = rep["mass_bound"].data
    assert bound["M"] == 3


def test_random_dominating_dtms_dominate_plus_by_oracle():
    lam, nu = solid_indicator()
    bs = BruteSpace(lam.space)
    f = lam_of(lam)
    rng = random.Random(5)
    for _ in range(10):
        mu = random_dominating_dtm(lam, rng)
        assert dtm_axioms(bs, nu_fn(mu)) == []
        for K in bs.compacts:
            assert mu.value(to_mask(K)) >= f(K)
        for A in bs.admissible:
            assert mu.value(to_mask(A)) >= plus(bs, f, A)


def test_regularity_on_solid_indicator():
    lam, nu = solid_indicator()
    rep = regularity_suite(nu)
    assert rep.passed, rep.failures()
    assert rep["mass_on_connected"].data["max_connected"] == 1
    assert rep.data["compact_finite"] and rep.data["semifinite"]


def test_infinite_point_weights():
    _, nu = build_example("point_counting_inf")
    rep = regularity_suite(nu)
    assert rep.passed
    assert rep.data["compact_finite"] is False
    assert rep.data["semifinite"] is False
    _, adapted = build_example("semifinite_adapted")
    rep = regularity_suite(adapted)
    assert rep.data["compact_finite"] is False and rep.data["semifinite"] is True


def test_cone_closure():
    lam, nu = solid_indicator()
    delta = DeficientTM.from_function(point_mass(nu.space, "v0"))
    both = nu.plus(delta)
    assert check_dtm_axioms(nu.space, both).passed
    assert both(nu.space.full) == 2
    assert check_dtm_axioms(nu.space, nu.scaled(3)).passed


def test_outer_modes_differ_on_solid_indicator():
    sp = path(2)
    lam = SolidIndicator(sp, ["v0", "e01", "v1"])
    thin = DeficientTM.from_function(lam)
    star = DeficientTM.from_function(lam, outer="star")
    F = sp.mask(["v0", "v1"])
    assert thin(F) == 0 and star(F) == 1
    assert not check_dtm_axioms(sp, star, outer="star").passed


def test_collar_model_lebesgue_dtm():
    sp = grid1d(3, "both")
    nu = DeficientTM.from_function(lebesgue(sp))
    assert check_dtm_axioms(sp, nu).passed
    assert nu.total_mass == 1
    assert regularity_suite(nu).passed
