"""Named example DTMs with their expected classification, plus the closed-form
positive variation of component rules.

Each gallery item records the properties it is expected to have; ``run_item``
recomputes them with the verification battery and compares.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .classify import subadditivity_test, tm_test
from .constructions import construction_suite
from .dtm import (
    DeficientTM,
    check_dtm_axioms,
    extend_from_compacts,
    regularity_suite,
    smallest_dominating_certificate,
)
from .errors import InputError
from .extreal import ExtValue, ext_sum
from .report import Check, Report, region_json
from .setfn import CompactSetFunction, ComponentRule, from_descriptor
from .topology import build_space, popcount
from .variation import content, variation_identities_suite, table_for

PROPERTIES = ("is_dtm", "is_tm", "subadditive", "compact_finite", "semifinite")


# -- closed form --------------------------------------------------------------------

def closed_form_variation(lam: CompactSetFunction, A) -> ExtValue:
    """Σ λ₀(A_i) over the components A_i of A that contain a family member.

    Open components are valued by λ₀ of their largest compact; closed sets
    are evaluated through their compact content.
    """
    if not isinstance(lam, ComponentRule):
        raise InputError("closed form applies to component rules only")
    if not lam.bounded_family:
        raise InputError("closed form needs bounded family members")
    sp = lam.space
    A = sp.mask(A)
    if not sp.is_admissible(A):
        raise InputError(f"{sp.labels(A)} is neither open nor closed")
    if not sp.is_open(A):
        A = content(sp, A, "thin")
    total: list[ExtValue] = []
    for comp in sp.components(A):
        if any(not E & ~comp for E in lam.family):
            total.append(lam.base.value(sp.core(comp)))
    return ext_sum(total)


def closed_form_check(lam: ComponentRule, outer: str = "thin") -> Check:
    sp = lam.space
    t = table_for(lam, outer)
    c = Check("closed_form_matches",
              "λ⁺(A) = Σ λ₀ over components of A containing a family member, "
              "for every open and closed A")
    if not lam.bounded_family:
        c.passed = None
        c.notes.append("family touches the collar; the formula assumes bounded members")
        return c
    for A in sp.admissible_sets():
        c.checked += 1
        lhs, rhs = t.plus(A), closed_form_variation(lam, A)
        if lhs != rhs:
            c.fail({"A": region_json(sp, A), "enumerated": lhs, "closed_form": rhs})
    return c


# -- items -----------------------------------------------------------------------------

@dataclass
class GalleryItem:
    name: str
    space: dict
    descriptor: dict
    expected: dict
    claim: str
    facts: Callable[["GalleryItem", CompactSetFunction, DeficientTM], list] | None = None
    family: list | None = None
    notes: list = field(default_factory=list)

    def build(self) -> tuple[CompactSetFunction, DeficientTM]:
        sp = build_space(self.space)
        lam = from_descriptor(sp, self.descriptor)
        return lam, DeficientTM.from_function(lam, "+", provenance=f"{self.name} (λ⁺)")

    def to_json(self) -> dict:
        return {"name": self.name, "space": self.space, "descriptor": self.descriptor,
                "expected": self.expected, "claim": self.claim, "notes": self.notes}


def _exp(dtm=True, tm=False, sub=False, cf=True, sf=True) -> dict:
    return dict(zip(PROPERTIES, (dtm, tm, sub, cf, sf)))


def _path(n: int, collar: str = "none") -> dict:
    return {"kind": "grid1d", "size": [n], "collar": collar}


def _fact(name: str, claim: str, ok: bool, **data) -> Check:
    c = Check(name, claim, ok, 1)
    c.data.update(data)
    return c


def _facts_solid(item, lam, nu):
    sp = nu.space
    v = lambda labels: nu(labels)  # noqa: E731
    rest = sp.full & ~sp.mask(["v0"])
    return [_fact("values", "ν(X) = 1, ν({v0}) = 0, ν(X∖{v0}) = 0",
                  (v(list(range(sp.n))), v(["v0"]), nu.value(rest)) == (1, 0, 0))]


def _facts_zero_point(z_labels):
    def facts(item, lam, nu):
        sp = nu.space
        K = sp.mask(z_labels)
        vals = (nu.value(K), nu.value(sp.full & ~K), nu.value(sp.full))
        return [_fact("marked_points_invisible",
                      "λ⁺(K) = λ⁺(X∖K) = 0 < λ⁺(X) for the marked set K",
                      vals[0] == 0 and vals[1] == 0 and vals[2] > 0,
                      values=list(vals))]
    return facts


def _facts_counting(item, lam, nu):
    sp = nu.space
    J = lam.J
    bad = [A for A in sp.admissible_sets() if nu.value(A) != popcount(A & J)]
    return [_fact("counts_marked_points", "λ⁺(A) = |A ∩ J| for every open and closed A",
                  not bad, counterexamples=[region_json(sp, A) for A in bad[:3]])]


def _facts_family_counting(item, lam, nu):
    sp = nu.space
    fam = [sp.mask(E) for E in item.family]
    out = _facts_counting(item, lam, nu)
    wit = None
    for A in sp.admissible_sets():
        contained = sum(1 for E in fam if not E & ~A)
        if contained != nu.value(A):
            wit = (A, contained)
            break
    c = Check("counts_contained_members",
              "λ⁺(A) equals the number of family members contained in A", kind="verdict")
    c.checked = len(sp.admissible_sets())
    if wit is not None:
        c.fail({"A": region_json(sp, wit[0]), "value": nu.value(wit[0]),
                "members_contained": wit[1]})
    c.notes.append("λ⁺ counts marked points, not whole members: a set holding only the "
                   "marked point of a member already scores")
    return out + [c]


def _facts_overlap(item, lam, nu):
    t = table_for(lam)
    X = lam.space.full
    p, m, a = t.triple(X)
    return [_fact("strict_total_bound", "|λ|(X) = 1 < λ⁺(X) + λ⁻(X) = 2",
                  (p, m, a) == (1, 1, 1), plus=p, minus=m, total=a)]


def _facts_zero(item, lam, nu):
    return [_fact("vanishes", "λ = 0 on compacts and λ⁺ = 0",
                  all(lam.value(K) == 0 for K in lam.space.compacts())
                  and all(v == 0 for v in nu.values.values()))]


def _facts_edge_hungry(item, lam, nu):
    ext = extend_from_compacts(lam)
    c = Check("resolution_probe", "extension verdicts at the native and the halved resolution",
              kind="verdict")
    c.checked = 1
    c.data.update(ext.verdicts)
    c.passed = ext.exists
    return [c]


def gallery() -> list[GalleryItem]:
    leb2 = {"kind": "lebesgue"}
    items = [
        GalleryItem("solid_indicator", _path(2),
                    {"flavor": "solid_indicator", "D": ["v0", "e01", "v1"]},
                    _exp(), "indicator of containing a connected compact D",
                    _facts_solid),
        GalleryItem("component_rule_multi", _path(3),
                    {"flavor": "component_rule",
                     "family": [["v0", "e01", "v1"], ["v2", "e23", "v3"]], "base": leb2},
                    _exp(), "component rule with multi-point members is a DTM but not a TM"),
        GalleryItem("single_zero_point", _path(2),
                    {"flavor": "component_rule", "family": [["v1"]], "base": leb2},
                    _exp(), "one marked point of zero length", _facts_zero_point(["v1"])),
        GalleryItem("singletons", _path(4),
                    {"flavor": "component_rule", "family": [["v1"], ["v3"]], "base": leb2},
                    _exp(), "several marked points of zero length",
                    _facts_zero_point(["v1", "v3"])),
        GalleryItem("point_counting", _path(3),
                    {"flavor": "point_counting", "weights": {"v0": 1, "v2": 1}},
                    _exp(tm=True, sub=True), "counting the marked points of J",
                    _facts_counting),
        GalleryItem("family_counting", _path(3),
                    {"flavor": "point_counting", "weights": {"v0": 1, "v3": 1}},
                    _exp(tm=True, sub=True),
                    "one marked point per family member {v0,e01,v1}, {v2,e23,v3}",
                    _facts_family_counting,
                    family=[["v0", "e01", "v1"], ["v2", "e23", "v3"]]),
        GalleryItem("point_counting_inf", _path(3),
                    {"flavor": "point_counting", "weights": {"v0": "inf", "v2": 1}},
                    _exp(tm=True, sub=True, cf=False, sf=False),
                    "one marked point of infinite weight: the point itself has no "
                    "subset of finite positive value"),
        GalleryItem("semifinite_adapted", _path(3),
                    {"flavor": "component_weights",
                     "targets": [[["v1"], 1], [["v3"], 1], [["v0", "e01", "v1"], "inf"]]},
                    _exp(cf=False, sf=True),
                    "infinite weight on a segment carrying a marked point: semifinite "
                    "but not compact-finite"),
        GalleryItem("overlap_gadget", _path(2),
                    {"flavor": "component_weights",
                     "targets": [[["v0", "e01", "v1"], 1], [["v1", "e12", "v2"], -1]]},
                    _exp(), "total variation strictly below λ⁺ + λ⁻", _facts_overlap),
        GalleryItem("edge_hungry", _path(2),
                    {"flavor": "component_weights",
                     "targets": [[["v0", "e01", "v1"], 1], [["v1", "e12", "v2"], 1],
                                 [["v0", "v1", "v2", "e01", "e12"], -1]]},
                    _exp(), "resolution-sensitivity probe for the extension condition",
                    _facts_edge_hungry),
        GalleryItem("unbounded_family", _path(3, "both"),
                    {"flavor": "component_rule", "family": [["e01", "v1"]], "base": leb2,
                     "allow_unbounded": True},
                    _exp(tm=True, sub=True), "a member touching the collar gives λ = 0",
                    _facts_zero),
    ]
    return items


def get_item(name: str) -> GalleryItem:
    for it in gallery():
        if it.name == name:
            return it
    raise InputError(f"unknown gallery item {name!r}")


def build_example(kind: str, params: dict | None = None) -> tuple[CompactSetFunction, DeficientTM]:
    """Build a gallery item by name, or a generator from ``params``.

    ``params`` may carry ``space`` and the generator fields (``D``, ``family``
    and ``base``, ``weights``, ``targets``); without it the named gallery item
    is built.
    """
    if params is None:
        return get_item(kind).build()
    sp = build_space(params["space"])
    desc = {k: v for k, v in params.items() if k != "space"}
    desc["flavor"] = kind
    lam = from_descriptor(sp, desc)
    return lam, DeficientTM.from_function(lam, "+", provenance=f"{kind} (λ⁺)")


# -- running -------------------------------------------------------------------------

def semifinite(nu: DeficientTM) -> bool:
    return regularity_suite(nu).data["semifinite"]


def compute_properties(nu: DeficientTM) -> tuple[dict, dict]:
    reps = {"axioms": check_dtm_axioms(nu.space, nu), "tm": tm_test(nu),
            "subadditivity": subadditivity_test(nu), "regularity": regularity_suite(nu)}
    props = {"is_dtm": reps["axioms"].passed, "is_tm": reps["tm"].data["is_tm"],
             "subadditive": reps["subadditivity"].data["subadditive"],
             "compact_finite": nu.compact_finite,
             "semifinite": reps["regularity"].data["semifinite"]}
    return props, reps


def run_item(item: GalleryItem, seed: int = 0, trials: int = 10,
             constructions: bool = True) -> Report:
    lam, nu = item.build()
    rep = Report(item.name)
    computed, reps = compute_properties(nu)
    c = rep.add(Check("expected_properties", f"{item.claim}: expected classification"))
    c.checked = len(PROPERTIES)
    for k in PROPERTIES:
        if computed[k] != item.expected[k]:
            c.fail({"property": k, "expected": item.expected[k], "computed": computed[k]})
    rep.data.update(expected=item.expected, computed=computed,
                    tm_certificate=reps["tm"].data["certificate"],
                    sub_certificate=reps["subadditivity"].data.get("certificate"))
    c = rep.add(Check("tm_criterion_agrees", "single-compact criterion agrees with brute force"))
    c.checked = 1
    if not reps["tm"].data["agree"]:
        c.fail(reps["tm"].data)
    c = rep.add(Check("subadditivity_verdicts_agree",
                      "compact-pair and open-pair subadditivity agree"))
    c.checked = 1
    if not reps["subadditivity"].data["consistent"]:
        c.fail(reps["subadditivity"].data)
    suite = variation_identities_suite(lam)
    c = rep.add(Check("variation_identities", "all variation identities hold for λ"))
    c.checked = len(suite.checks)
    for f in suite.failures():
        c.fail(f.name)
    dom = smallest_dominating_certificate(lam, trials=trials, seed=seed)
    c = rep.add(Check("smallest_dominating", "λ⁺ is the smallest DTM dominating λ"))
    c.checked = trials
    for f in dom.failures():
        c.fail(f.name)
    c = rep.add(Check("regularity", "regularity battery"))
    for f in reps["regularity"].failures():
        c.fail(f.name)
    c.checked = len(reps["regularity"].checks)
    if isinstance(lam, ComponentRule):
        rep.add(closed_form_check(lam))
    if item.facts is not None:
        for f in item.facts(item, lam, nu):
            rep.add(f)
    if constructions:
        cons = construction_suite(nu)
        c = rep.add(Check("constructions", "all constructions on this DTM yield DTMs"))
        c.checked = len(cons.checks)
        for f in cons.failures():
            c.fail(f.name)
        rep.data["constructions"] = cons.to_json()
    return rep


def run_gallery(seed: int = 0, trials: int = 10, names=None, constructions: bool = True) -> Report:
    rep = Report("gallery")
    items = gallery()
    if names:
        items = [get_item(n) for n in names]
    manifest = []
    for it in items:
        r = run_item(it, seed, trials, constructions)
        rep.add(Check(it.name, it.claim, r.passed, len(r.checks)))
        manifest.append({"item": it.to_json(), "report": r.to_json(),
                         "expected": r.data["expected"], "computed": r.data["computed"]})
    rep.data["seed"] = seed
    rep.data["items"] = manifest
    return rep


__all__ = [
    "GalleryItem", "gallery", "get_item", "build_example", "closed_form_variation",
    "closed_form_check", "compute_properties", "run_item", "run_gallery", "semifinite",
    "PROPERTIES",
]
