"""Deficient topological measures: axioms, extension from compacts, minimality,
and the regularity battery.

A DTM is a nonnegative table on every admissible (open or closed) region that
is additive on disjoint compacts, inner regular on opens (value = max over
compacts inside) and outer regular on closed sets.  Outer regularity takes
the infimum over cell-open supersets together with the thin neighbourhood
of F (see ``variation``); once inner regularity holds, that infimum is the
maximum of ν over compacts inside F.  ``outer="star"`` drops the thin
neighbourhood and uses the up-closure alone.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import CapacityError, ConsistencyError, InputError
from .extreal import (
    INF,
    ExtValue,
    Infinity,
    ext_min,
    format_value,
    normalize,
    parse_value,
)
from .report import Check, Report, region_json
from .setfn import (
    CompactSetFunction,
    FunctionOnCompacts,
    SolidIndicator,
    cell_sum,
    combine,
)
from .topology import Region, SpaceModel, bits, region_key
from .variation import VariationTable, content, sub_ideal_max, table_for


class DeficientTM:
    """Verified DTM: a value for every admissible region."""

    def __init__(self, space: SpaceModel, values: dict[int, ExtValue], provenance: str,
                 source: CompactSetFunction | None = None, sign: str = "+",
                 outer: str = "thin"):
        self.space = space
        self.values = values
        self.provenance = provenance
        self.source = source
        self.sign = sign
        self.outer = outer

    def value(self, mask: int) -> ExtValue:
        try:
            return self.values[mask]
        except KeyError:
            raise InputError(f"{self.space.labels(mask)} is not admissible") from None

    def __call__(self, A) -> ExtValue:
        return self.value(self.space.mask(A))

    def on_compacts(self) -> FunctionOnCompacts:
        return FunctionOnCompacts(self.space, self.value, self.provenance)

    @property
    def total_mass(self) -> ExtValue:
        return self.values[self.space.full]

    @property
    def compact_finite(self) -> bool:
        return all(not isinstance(self.values[K], Infinity) for K in self.space.compacts())

    def refined(self) -> "DeficientTM":
        """Same construction one subdivision finer (only for λ-built DTMs)."""
        if self.source is None or not self.source.refinable:
            raise InputError(f"{self.provenance} has no refinable source function")
        lam, _ = self.source.refined()
        return DeficientTM.from_function(lam, self.sign, self.outer, self.provenance)

    @classmethod
    def from_function(cls, lam: CompactSetFunction, sign: str = "+", outer: str = "thin",
                      provenance: str | None = None) -> "DeficientTM":
        """λ⁺ (sign "+"), λ⁻ ("-") or |λ| ("abs") tabulated on admissible sets."""
        t = table_for(lam, outer)
        get = {"+": t.plus, "-": t.minus, "abs": t.total}[sign]
        vals = {A: get(A) for A in lam.space.admissible_sets()}
        name = {"+": "positive variation", "-": "negative variation", "abs": "total variation"}
        return cls(lam.space, vals, provenance or name[sign], lam, sign, outer)

    @classmethod
    def from_compact_values(cls, space: SpaceModel, f: Callable[[int], ExtValue],
                            provenance: str, outer: str = "thin") -> "DeficientTM":
        """Opens and closed sets by max over compacts inside their content."""
        best = sub_ideal_max(space, f)
        vals = {A: best[content(space, A, outer)] for A in space.admissible_sets()}
        return cls(space, vals, provenance, None, "+", outer)

    def scaled(self, alpha) -> "DeficientTM":
        a = parse_value(alpha)
        return DeficientTM(self.space, {A: normalize(v * a) for A, v in self.values.items()},
                           f"{format_value(a)}·{self.provenance}", None, "+", self.outer)

    def plus(self, other: "DeficientTM") -> "DeficientTM":
        if other.space is not self.space:
            raise InputError("DTMs live on different spaces")
        return DeficientTM(self.space, {A: v + other.values[A] for A, v in self.values.items()},
                           f"{self.provenance} + {other.provenance}", None, "+", self.outer)

    def to_json(self) -> dict:
        sp = self.space
        return {"space": sp.params, "provenance": self.provenance,
                "values": [{"region": region_key(A), "labels": sp.labels(A),
                            "value": format_value(self.values[A])}
                           for A in sp.admissible_sets()]}


@dataclass
class AxiomReport(Report):
    dtm: DeficientTM | None = None


def _lookup(space: SpaceModel, table) -> Callable[[int], ExtValue | None]:
    if isinstance(table, DeficientTM):
        return lambda A: table.values.get(A)
    if callable(table):
        return table
    norm = {}
    for k, v in table.items():
        norm[space.mask(k) if not isinstance(k, int) else k] = parse_value(v)
    return norm.get


def check_dtm_axioms(space: SpaceModel, table, provenance: str = "table",
                     outer: str = "thin", source: CompactSetFunction | None = None,
                     sign: str = "+") -> AxiomReport:
    """Verify additivity on compacts, inner regularity on opens, outer regularity on closeds."""
    if isinstance(table, DeficientTM):
        source, sign, provenance = table.source, table.sign, table.provenance
    get = _lookup(space, table)
    rep = AxiomReport(f"DTM axioms ({provenance})")
    rj = lambda m: region_json(space, m)  # noqa: E731
    adm = space.admissible_sets()
    vals: dict[int, ExtValue] = {}

    c = rep.add(Check("total_nonnegative", "a value ≥ 0 on every open and every closed set"))
    for A in adm:
        c.checked += 1
        v = get(A)
        if v is None:
            c.fail({"A": rj(A), "reason": "missing"})
            continue
        v = parse_value(v)
        if v < 0:
            c.fail({"A": rj(A), "value": v})
        vals[A] = v
    if c.passed is False:
        rep.data["aborted"] = "table is not a total nonnegative map"
        return rep

    comps = space.compacts()
    c = rep.add(Check("additive_on_compacts", "ν(C ⊔ K) = ν(C) + ν(K) for disjoint compacts"))
    for a, C in enumerate(comps):
        for K in comps[a:]:
            if C & K:
                continue
            c.checked += 1
            if vals[C | K] != vals[C] + vals[K]:
                c.fail({"C": rj(C), "K": rj(K), "union": vals[C | K],
                        "sum": normalize(vals[C] + vals[K])})

    best, arg = argmax_below(space, lambda K: vals[K])
    c = rep.add(Check("inner_regular", "ν(U) = max{ν(K): K compact ⊆ U} for open U"))
    attaining = {}
    for U in space.open_sets():
        c.checked += 1
        core = space.core(U)
        if vals[U] != best[core]:
            c.fail({"U": rj(U), "value": vals[U], "max_inside": best[core]})
        attaining[region_key(U)] = region_key(arg[core])
    c.data["attaining"] = attaining
    inner_ok = c.passed

    c = rep.add(Check("outer_regular",
                      "ν(F) = inf{ν(U): U open ⊇ F} for closed F"
                      + (" (thin neighbourhood included)" if outer == "thin" else "")))
    opens = space.open_sets()
    for F in space.closed_sets():
        c.checked += 1
        if inner_ok:
            star = vals[space.up_closure(F)]
        else:
            star = min(vals[U] for U in opens if not F & ~U)
        inf = ext_min(star, best[F & space.noncollar_mask]) if outer == "thin" else star
        if vals[F] != inf:
            c.fail({"F": rj(F), "value": vals[F], "inf": inf})

    c = rep.add(Check("monotone", "ν(A) ≤ ν(B) for admissible A ⊆ B"))
    c.notes.append("checked on single-cell steps between closed sets and between opens, "
                   "plus F ⊆ up(F) and U ⊆ cl(U); every inclusion factors through these")
    _monotone_steps(space, vals, c)
    if rep.passed:
        rep.dtm = DeficientTM(space, vals, provenance, source, sign, outer)
    return rep


def argmax_below(space: SpaceModel, f: Callable[[int], ExtValue]) -> tuple[dict, dict]:
    """Like ``sub_ideal_max`` but also returns an attaining ideal for each compact."""
    best: dict[int, ExtValue] = {}
    arg: dict[int, int] = {}
    up = space.up
    for K in space.compacts():
        v, a = f(K), K
        for i in bits(K):
            if not up[i] & K:
                J = K ^ (1 << i)
                if best[J] > v:
                    v, a = best[J], arg[J]
        best[K], arg[K] = v, a
    return best, arg


def _monotone_steps(space: SpaceModel, vals: dict, c: Check) -> None:
    rj = lambda m: region_json(space, m)  # noqa: E731
    for fam in (space.closed_sets(), space.open_sets()):
        members = set(fam)
        for A in fam:
            for i in bits(space.full & ~A):
                B = A | (1 << i)
                if B in members:
                    c.checked += 1
                    if vals[A] > vals[B]:
                        c.fail({"A": rj(A), "B": rj(B)})
    for F in space.closed_sets():
        c.checked += 1
        if vals[F] > vals[space.up_closure(F)]:
            c.fail({"A": rj(F), "B": rj(space.up_closure(F))})
    for U in space.open_sets():
        c.checked += 1
        if vals[U] > vals[space.closure(U)]:
            c.fail({"A": rj(U), "B": rj(space.closure(U))})


def require_dtm(space: SpaceModel, table, provenance: str, **kw) -> DeficientTM:
    rep = check_dtm_axioms(space, table, provenance, **kw)
    if rep.dtm is None:
        bad = rep.failures()[0]
        raise ConsistencyError(f"{provenance} fails {bad.name}", witness=bad.witnesses[:1])
    return rep.dtm


# -- extension from compacts -------------------------------------------------

@dataclass
class ExtensionResult:
    exists: bool
    dtm: DeficientTM | None
    witness: Region | None
    verdicts: dict = field(default_factory=dict)
    report: Report | None = None

    def to_json(self) -> dict:
        return {"exists": self.exists,
                "witness": None if self.witness is None else self.witness.labels,
                "verdicts": self.verdicts,
                "report": None if self.report is None else self.report.to_json()}


def _regularity_condition(lam: CompactSetFunction, outer: str,
                          fine: tuple | None = None) -> tuple[bool, int | None]:
    """For each compact C with λ(C) < ∞: max λ over compacts in its neighbourhood ≤ λ(C)."""
    sp = lam.space
    if fine is None:
        best = table_for(lam, outer)
        for C in sp.compacts():
            v = lam.value(C)
            if not isinstance(v, Infinity) and best.plus(C) > v:
                return False, C
        return True, None
    flam, transfer = fine
    fsp = flam.space
    ft = table_for(flam, "star")
    for C in sp.compacts():
        v = lam.value(C)
        if not isinstance(v, Infinity) and ft.plus(fsp.up_closure(transfer(C))) > v:
            return False, C
    return True, None


def extend_from_compacts(lam: CompactSetFunction, outer: str = "thin") -> ExtensionResult:
    """Decide whether λ extends (uniquely) to a DTM; the extension is λ⁺."""
    sp = lam.space
    if any(lam.value(K) < 0 for K in sp.compacts()):
        raise InputError("extension needs a nonnegative set function")
    rep = Report("extension from compacts")
    verdicts = {}
    ok, wit = _regularity_condition(lam, "thin")
    verdicts["thin"] = ok
    ok_star, wit_star = _regularity_condition(lam, "star")
    verdicts["star_r"] = ok_star
    if lam.refinable:
        try:
            ok_fine, _ = _regularity_condition(lam, "star", lam.refined())
        except CapacityError:
            verdicts["star_r2"] = None
        else:
            verdicts["star_r2"] = ok_fine
            verdicts["resolution_disagreement"] = ok_fine != ok_star
    chosen_ok, chosen_wit = (ok, wit) if outer == "thin" else (ok_star, wit_star)
    c = rep.add(Check("regularity_condition",
                      "every compact C with λ(C) < ∞ has an open U ⊇ C whose compacts K "
                      "satisfy λ(K) ≤ λ(C)", kind="verdict"))
    c.checked = len(sp.compacts())
    if not chosen_ok:
        c.fail({"C": region_json(sp, chosen_wit), "lambda": lam.value(chosen_wit),
                "plus": table_for(lam, outer).plus(chosen_wit)})
        return ExtensionResult(False, None, Region(sp, chosen_wit), verdicts, rep)
    dtm = require_dtm(sp, DeficientTM.from_function(lam, "+", outer, "extension"),
                      "extension")
    c2 = rep.add(Check("agrees_on_compacts", "the extension equals λ on compacts"))
    for K in sp.compacts():
        c2.checked += 1
        if dtm.values[K] != lam.value(K):
            raise ConsistencyError("regularity condition held but λ⁺ differs from λ",
                                   witness=region_json(sp, K))
    return ExtensionResult(True, dtm, None, verdicts, rep)


# -- minimality of λ⁺ --------------------------------------------------------

def _random_connected_compact(sp: SpaceModel, rng: random.Random) -> int | None:
    cands = [K for K in sp.compacts() if K and sp.is_connected_mask(K)]
    return rng.choice(cands) if cands else None


def random_dominating_dtm(lam: CompactSetFunction, rng: random.Random,
                          outer: str = "thin") -> DeficientTM:
    """A DTM ν with ν ≥ λ on compacts.

    Even draws perturb λ⁺ by a random nonnegative cell measure; odd draws take
    (λ + w)⁺ plus a random multiple of a solid indicator, which dominates λ
    without being built from λ⁺.
    """
    sp = lam.space
    w = cell_sum(sp, {i: rng.randint(0, 3) if rng.random() < 0.5 else 0 for i in range(sp.n)})
    if rng.random() < 0.5:
        lp = table_for(lam, outer)
        return DeficientTM.from_compact_values(
            sp, lambda K: lp.plus(K) + w.value(K), "λ⁺ + random cell measure", outer)
    base = DeficientTM.from_function(combine("add", lam, w), "+", outer)
    D = _random_connected_compact(sp, rng)
    if D is None:
        return base
    alpha = Fraction(rng.randint(0, 4), rng.randint(1, 2))
    extra = DeficientTM.from_function(SolidIndicator(sp, D), "+", outer).scaled(alpha)
    out = base.plus(extra)
    out.provenance = "(λ + random cell measure)⁺ + solid indicator"
    return out


def smallest_dominating_certificate(lam: CompactSetFunction, trials: int = 50, seed: int = 0,
                                    outer: str = "thin") -> Report:
    """λ⁺ is a DTM dominating λ, and every other dominating DTM dominates λ⁺."""
    sp = lam.space
    rep = Report("smallest dominating DTM")
    rep.data["seed"] = seed
    rj = lambda m: region_json(sp, m)  # noqa: E731
    lp = DeficientTM.from_function(lam, "+", outer)
    ax = check_dtm_axioms(sp, lp)
    c = rep.add(Check("plus_is_dtm", "λ⁺ satisfies the DTM axioms"))
    c.checked = 1
    if not ax.passed:
        c.fail({"failed": [f.name for f in ax.failures()]})
    c = rep.add(Check("plus_dominates", "λ⁺(K) ≥ λ(K) on compacts"))
    for K in sp.compacts():
        c.checked += 1
        if lp.values[K] < lam.value(K):
            c.fail({"K": rj(K)})
    rng = random.Random(seed)
    c = rep.add(Check("plus_is_smallest",
                      "every DTM ν ≥ λ on compacts satisfies ν ≥ λ⁺ on admissible sets"))
    for _ in range(trials):
        nu = random_dominating_dtm(lam, rng, outer)
        c.checked += 1
        if not check_dtm_axioms(sp, nu.values, nu.provenance, outer=outer).passed:
            c.fail({"reason": "generated candidate is not a DTM", "provenance": nu.provenance})
            continue
        if any(nu.values[K] < lam.value(K) for K in sp.compacts()):
            c.fail({"reason": "generated candidate does not dominate λ"})
            continue
        for A in sp.admissible_sets():
            if nu.values[A] < lp.values[A]:
                c.fail({"A": rj(A), "nu": nu.values[A], "plus": lp.values[A]})
                break
    t = table_for(lam, outer)
    M = max(abs(lam.value(K)) for K in sp.compacts())
    c = rep.add(Check("mass_bound", "with M = max|λ| on compacts: λ⁺(X), λ⁻(X) ≤ M, |λ|(X) ≤ 2M"))
    c.checked = 1
    c.data.update(M=M, plus=t.plus(sp.full), minus=t.minus(sp.full), total=t.total(sp.full))
    if t.plus(sp.full) > M or t.minus(sp.full) > M or t.total(sp.full) > M * 2:
        c.fail(c.data)
    return rep


# -- regularity battery ---------------------------------------------------------

def _closed_core(space: SpaceModel, mask: int) -> int:
    """Largest closed subset of mask."""
    out = 0
    for i in bits(mask):
        if not space.down[i] & ~mask:
            out |= 1 << i
    return out


def regularity_suite(nu: DeficientTM, other: DeficientTM | None = None) -> Report:
    sp = nu.space
    rep = Report(f"regularity ({nu.provenance})")
    rj = lambda m: region_json(sp, m)  # noqa: E731
    vals = nu.values
    adm = sp.admissible_sets()
    comps = sp.compacts()
    opens = sp.open_sets()

    c = rep.add(Check("self_variation", "ν = ν⁺ = |ν| and ν⁻ = 0, recomputed from ν on compacts"))
    t = VariationTable(nu.on_compacts(), nu.outer)
    for A in adm:
        c.checked += 1
        p, m, a = t.triple(A)
        if not (p == vals[A] == a and m == 0):
            c.fail({"A": rj(A), "nu": vals[A], "plus": p, "minus": m, "total": a})

    c = rep.add(Check("additive_on_opens", "ν(U ⊔ V) = ν(U) + ν(V) for disjoint opens"))
    for i, U in enumerate(opens):
        for W in opens[i:]:
            if not U & W:
                c.checked += 1
                if vals[U | W] != vals[U] + vals[W]:
                    c.fail({"U": rj(U), "V": rj(W)})
    ca = Check("additive_on_compacts", "")
    for i, C in enumerate(comps):
        for K in comps[i:]:
            if not C & K and vals[C | K] != vals[C] + vals[K]:
                ca.passed = False
    c.data["compact_additive"] = ca.passed
    c.data["equivalent"] = ca.passed == c.passed

    c = rep.add(Check("small_outside_max",
                      "for open U with ν(U) < ∞ and an attaining compact C ⊆ U: "
                      "ν(E) ≤ ν(U) − ν(C) for admissible E ⊆ U∖C"))
    c.notes.append("E ranges over the largest open and the largest closed subset of U∖C; "
                   "monotonicity covers the rest")
    _, arg = argmax_below(sp, lambda K: vals[K])
    for U in opens:
        if isinstance(vals[U], Infinity):
            continue
        C = arg[sp.core(U)]
        gap = vals[U] - vals[C]
        W = U & ~C
        for E in (sp.interior(W), _closed_core(sp, W)):
            c.checked += 1
            if vals[E] > gap:
                c.fail({"U": rj(U), "C": rj(C), "E": rj(E)})

    c = rep.add(Check("smooth_on_chains",
                      "ν is monotone along every covering step of compacts and of opens, so "
                      "monotone chains reach their limit value"))
    for K in comps:
        for i in sp.maximal_cells(K):
            c.checked += 1
            if vals[K ^ (1 << i)] > vals[K]:
                c.fail({"K": rj(K), "drop": sp.cells[i].label})
    open_set = set(opens)
    for U in opens:
        for i in bits(sp.full & ~U):
            W = U | (1 << i)
            if W in open_set:
                c.checked += 1
                if vals[W] < vals[U]:
                    c.fail({"U": rj(U), "add": sp.cells[i].label})

    c = rep.add(Check("mass_on_connected",
                      "ν(X) = max ν over connected compacts (connected grid models)"))
    if sp.kind in ("grid1d", "grid2d") or (sp.kind == "subspace" and sp.is_connected):
        cc = [K for K in comps if sp.is_connected_mask(K)]
        c.checked = len(cc)
        top = max((vals[K] for K in cc), default=0)
        c.data["max_connected"] = top
        if top != vals[sp.full]:
            c.fail({"total": vals[sp.full], "max_connected": top})
        solids = [K for K in cc if sp.is_solid(K)]
        c.data["solid_count"] = len(solids)
        if solids:
            c.data["max_solid"] = max(vals[K] for K in solids)
            c.data["solid_matches"] = c.data["max_solid"] == vals[sp.full]
        else:
            c.data["solid_matches"] = "not applicable"
    else:
        c.passed = None
        c.notes.append("model is not a connected grid")

    compact_finite = nu.compact_finite
    semifinite = True
    sf_witness = None
    for A in adm:
        if isinstance(vals[A], Infinity):
            if not any(0 < vals[E] and not isinstance(vals[E], Infinity)
                       for E in adm if not E & ~A):
                semifinite = False
                sf_witness = A
                break
    rep.data.update(compact_finite=compact_finite, semifinite=semifinite)
    if sf_witness is not None:
        rep.data["semifinite_witness"] = rj(sf_witness)

    c = rep.add(Check("cone", "ν + ν, ν/2, 3ν (and ν + μ if given) are DTMs"))
    cands = [nu.plus(nu), nu.scaled(Fraction(1, 2)), nu.scaled(3)]
    if other is not None:
        cands.append(nu.plus(other))
    for d in cands:
        c.checked += 1
        if not check_dtm_axioms(sp, d.values, d.provenance, outer=nu.outer).passed:
            c.fail({"candidate": d.provenance})
    return rep


__all__ = [
    "DeficientTM", "AxiomReport", "check_dtm_axioms", "require_dtm", "ExtensionResult",
    "extend_from_compacts", "smallest_dominating_certificate", "random_dominating_dtm",
    "regularity_suite", "INF",
]
