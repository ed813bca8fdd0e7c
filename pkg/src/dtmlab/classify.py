"""Topological-measure and measure classification of DTMs.

``tm_test`` compares the single-compact criterion against a brute-force
additivity scan, ``subadditivity_test`` compares compact pairs against open
pairs, and ``extend_to_measure`` builds the unique additive extension of a
subadditive DTM to all cell subsets.
"""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field

from .dtm import DeficientTM
from .errors import CapacityError, ClassificationError
from .extreal import ExtValue, Infinity, csv_fields, ext_sum
from .report import Check, Report, region_json
from .topology import SpaceModel, bits, popcount, region_key

OUTER_LIMIT = 16
PAIR_LIMIT = 10


def _rj(sp: SpaceModel):
    return lambda m: region_json(sp, m)


# -- topological measures ---------------------------------------------------------

def tm_test(nu: DeficientTM) -> Report:
    """Is ν additive across every disjoint compact/open split?"""
    sp = nu.space
    vals = nu.values
    rj = _rj(sp)
    rep = Report(f"topological measure test ({nu.provenance})")
    opens = list(reversed(sp.open_sets()))

    crit = rep.add(Check("single_compact_criterion",
                         "ν(U) ≤ ν(C) + ν(U∖C) for every compact C ⊆ open U", kind="verdict"))
    cert = None
    for C in sp.compacts():
        for U in opens:
            if C & ~U:
                continue
            crit.checked += 1
            rest = vals[U & ~C]
            if vals[U] > vals[C] + rest:
                if cert is None:
                    cert = {"C": rj(C), "U": rj(U), "nu_U": vals[U], "nu_C": vals[C],
                            "nu_rest": rest}
                    if not isinstance(vals[U], Infinity):
                        cert["gap"] = vals[U] - vals[C] - rest
                crit.fail({"C": rj(C), "U": rj(U)})
    crit.data["compact_model"] = sp.is_compact_model

    brute = rep.add(Check("additive_on_admissible_splits",
                          "ν(A ⊔ B) = ν(A) + ν(B) whenever A, B and A ⊔ B are compact or open",
                          kind="verdict"))
    fam = sorted(set(sp.compacts()) | set(sp.open_sets()))
    members = set(fam)
    for i, A in enumerate(fam):
        for B in fam[i:]:
            if A & B or (A | B) not in members:
                continue
            brute.checked += 1
            if vals[A | B] != vals[A] + vals[B]:
                brute.fail({"A": rj(A), "B": rj(B)})
    is_tm = brute.passed is not False
    agree = (crit.passed is not False) == is_tm
    eq = rep.add(Check("criterion_matches_bruteforce",
                       "the single-compact criterion and the brute-force scan agree"))
    eq.checked = 1
    if not agree:
        eq.fail({"criterion": crit.passed, "bruteforce": brute.passed})
    rep.data.update(is_tm=is_tm, criterion=crit.passed is not False, agree=agree,
                    certificate=cert)
    return rep


# -- subadditivity -----------------------------------------------------------------

def _pair_scan(sets: list[int], vals, check: Check, rj) -> int | None:
    first = None
    for i, A in enumerate(sets):
        for B in sets[i + 1:]:
            check.checked += 1
            if vals[A | B] > vals[A] + vals[B]:
                check.fail({"A": rj(A), "B": rj(B), "union": vals[A | B],
                            "a": vals[A], "b": vals[B]})
                if first is None:
                    first = (A, B)
    return first


def subadditivity_test(nu: DeficientTM, recheck: bool = True) -> Report:
    """Subadditivity on compact pairs (a) and on open pairs (b).

    The verdict is (b).  When (a) and (b) disagree and ν comes from a
    refinable generator, both are recomputed one subdivision finer, with (a)
    over all fine compacts and (b) over the opens inherited from the coarse
    model.
    """
    sp = nu.space
    vals = nu.values
    rj = _rj(sp)
    rep = Report(f"subadditivity test ({nu.provenance})")
    a = rep.add(Check("subadditive_on_compacts", "ν(C ∪ K) ≤ ν(C) + ν(K) for compacts",
                      kind="verdict"))
    wa = _pair_scan(sp.compacts(), vals, a, rj)
    b = rep.add(Check("subadditive_on_opens", "ν(U ∪ V) ≤ ν(U) + ν(V) for opens", kind="verdict"))
    _pair_scan(sp.open_sets(), vals, b, rj)
    va, vb = a.passed is not False, b.passed is not False
    rep.data.update(compact_pairs=va, open_pairs=vb, subadditive=vb, agree_native=va == vb)
    consistent = va == vb
    if not consistent and recheck and nu.source is not None and nu.source.refinable:
        try:
            fine_a, fine_b, fine_wit = _recheck_refined(nu)
        except CapacityError as exc:
            rep.data["refined"] = {"skipped": str(exc)}
        else:
            rep.data["refined"] = {"compact_pairs": fine_a, "open_pairs": fine_b}
            consistent = fine_a == fine_b
            if wa is None and fine_wit is not None:
                rep.data["certificate"] = fine_wit
    rep.data["consistent"] = consistent
    if wa is not None:
        rep.data["certificate"] = {"resolution": "native", "C": rj(wa[0]), "K": rj(wa[1])}
    c = rep.add(Check("compact_and_open_verdicts_agree",
                      "subadditivity on compacts holds iff it holds on opens"))
    c.checked = 1
    if not consistent:
        c.fail({"compact_pairs": va, "open_pairs": vb})
    elif va != vb:
        c.notes.append("native verdicts differ; agreement restored one subdivision finer")
    return rep


def _recheck_refined(nu: DeficientTM) -> tuple[bool, bool, dict | None]:
    fine = nu.refined()
    fsp = fine.space
    _, transfer = nu.source.refined()
    fv = fine.values
    comps = fsp.compacts()
    wit = next(((A, B) for i, A in enumerate(comps) for B in comps[i + 1:]
                if fv[A | B] > fv[A] + fv[B]), None)
    opens = [transfer(U) for U in nu.space.open_sets()]
    ok_b = all(fv[A | B] <= fv[A] + fv[B]
               for i, A in enumerate(opens) for B in opens[i + 1:])
    if wit is not None:
        wit = {"resolution": "refined", "C": region_json(fsp, wit[0]),
               "K": region_json(fsp, wit[1])}
    return wit is None, ok_b, wit


# -- outer measure -------------------------------------------------------------------

@dataclass
class OuterMeasureTable:
    space: SpaceModel
    values: list
    thin_used: int = 0
    report: Report | None = None

    def __call__(self, E) -> ExtValue:
        return self.values[self.space.mask(E)]

    def rows(self):
        for E in sorted(range(len(self.values)), key=lambda m: (popcount(m), tuple(bits(m)))):
            yield E, self.values[E]


def outer_value(nu: DeficientTM, E: int) -> tuple[ExtValue, bool]:
    """inf of ν over opens containing E: the cell-open up(E) or the thin neighbourhood of cl(E)."""
    sp = nu.space
    star = nu.values[sp.up_closure(E)]
    thin = nu.values[sp.closure(E)] if nu.outer == "thin" else star
    return (thin, True) if thin < star else (star, False)


def outer_measure(nu: DeficientTM, seed: int = 0, samples: int = 20000) -> OuterMeasureTable:
    sp = nu.space
    if sp.n > OUTER_LIMIT:
        raise CapacityError(f"outer measure tables are limited to {OUTER_LIMIT} cells", sp.n)
    vals, thin_used = [], 0
    for E in range(1 << sp.n):
        v, t = outer_value(nu, E)
        vals.append(v)
        thin_used += t
    rep = Report(f"outer measure ({nu.provenance})")
    rj = _rj(sp)
    c = rep.add(Check("empty_zero", "μ*(∅) = 0"))
    c.checked = 1
    if vals[0] != 0:
        c.fail({"value": vals[0]})
    c = rep.add(Check("agrees_on_admissible", "μ*(A) = ν(A) on open and closed sets"))
    for A in sp.admissible_sets():
        c.checked += 1
        if vals[A] != nu.values[A]:
            c.fail({"A": rj(A), "outer": vals[A], "nu": nu.values[A]})
    c = rep.add(Check("monotone", "μ*(E) ≤ μ*(E ∪ {c})"))
    for E in range(1 << sp.n):
        for i in bits(((1 << sp.n) - 1) & ~E):
            c.checked += 1
            if vals[E] > vals[E | (1 << i)]:
                c.fail({"E": rj(E), "add": sp.cells[i].label})
    c = rep.add(Check("subadditive", "μ*(E ∪ G) ≤ μ*(E) + μ*(G)"))
    N = 1 << sp.n
    if sp.n <= PAIR_LIMIT:
        pairs = ((E, G) for E in range(N) for G in range(E + 1, N))
    else:
        rng = random.Random(seed)
        pairs = ((rng.randrange(N), rng.randrange(N)) for _ in range(samples))
        c.notes.append(f"{samples} sampled pairs (seed {seed})")
    for E, G in pairs:
        c.checked += 1
        if vals[E | G] > vals[E] + vals[G]:
            c.fail({"E": rj(E), "G": rj(G)})
    rep.data["is_outer_measure"] = rep.passed
    return OuterMeasureTable(sp, vals, thin_used, rep)


def caratheodory_test(table: OuterMeasureTable, nu: DeficientTM, E) -> bool:
    """ν(U) ≥ μ*(U∩E) + μ*(U∖E) for every open U."""
    sp = table.space
    E = sp.mask(E)
    v = table.values
    return all(nu.values[U] >= v[U & E] + v[U & ~E] for U in sp.open_sets())


# -- measures ------------------------------------------------------------------------

@dataclass
class MeasureTable:
    space: SpaceModel
    atoms: dict
    radon: bool
    regular_borel: bool | None
    report: Report = field(default_factory=lambda: Report("measure extension"))

    def __call__(self, E) -> ExtValue:
        return self.value(self.space.mask(E))

    def value(self, mask: int) -> ExtValue:
        return ext_sum(self.atoms[i] for i in bits(mask))


def _atom_weight(nu: DeficientTM, i: int) -> ExtValue | None:
    sp = nu.space
    up = sp.up[i] | (1 << i)
    rest = up & ~(1 << i)
    if not isinstance(nu.values[rest], Infinity):
        return nu.values[up] - nu.values[rest]
    down = sp.down[i] | (1 << i)
    rest = down & ~(1 << i)
    if not isinstance(nu.values[rest], Infinity):
        return nu.values[down] - nu.values[rest]
    return None


def extend_to_measure(nu: DeficientTM, sub: Report | None = None) -> MeasureTable:
    """The unique additive extension of a subadditive DTM to all cell subsets.

    Each cell's weight is forced: m(up c) − m(up c ∖ {c}) for the open star
    of c (or the closed analogue when that difference is ∞ − ∞).
    """
    sp = nu.space
    sub = sub or subadditivity_test(nu)
    if not sub.data["subadditive"]:
        raise ClassificationError(f"{nu.provenance} is not subadditive on opens",
                                  certificate=sub.data.get("certificate"))
    rj = _rj(sp)
    atoms = {}
    for i in range(sp.n):
        w = _atom_weight(nu, i)
        if w is None:
            raise ClassificationError(
                f"weight of {sp.cells[i].label} is undetermined (∞ on both stars)")
        atoms[i] = w
    compact_finite = nu.compact_finite
    mass = nu.values[sp.full]
    m = MeasureTable(sp, atoms, compact_finite,
                     None if isinstance(mass, Infinity) else compact_finite)
    rep = m.report
    rep.data["atoms"] = {sp.cells[i].label: w for i, w in atoms.items()}
    rep.data.update(radon=m.radon, regular_borel=m.regular_borel)

    c = rep.add(Check("nonnegative_atoms", "every cell carries a weight ≥ 0"))
    c.checked = sp.n
    for i, w in atoms.items():
        if w < 0:
            c.fail({"cell": sp.cells[i].label, "weight": w})

    c = rep.add(Check("agrees_on_admissible", "m(A) = ν(A) on open and closed sets"))
    for A in sp.admissible_sets():
        c.checked += 1
        if m.value(A) != nu.values[A]:
            c.fail({"A": rj(A), "m": m.value(A), "nu": nu.values[A]})

    c = rep.add(Check("additive", "m(E ⊔ G) = m(E) + m(G) on disjoint cell subsets"))
    c.notes.append("m is an atom sum; pairs are scanned on up to 8 cells")
    if sp.n <= 8:
        for E in range(1 << sp.n):
            comp = ((1 << sp.n) - 1) & ~E
            G = comp
            while True:
                c.checked += 1
                if m.value(E | G) != m.value(E) + m.value(G):
                    c.fail({"E": rj(E), "G": rj(G)})
                if G == 0:
                    break
                G = (G - 1) & comp

    if sp.n <= OUTER_LIMIT:
        table = outer_measure(nu)
        c = rep.add(Check("outer_regular", "m(E) = inf of ν over opens containing E"))
        for E in range(1 << sp.n):
            c.checked += 1
            if m.value(E) != table.values[E]:
                c.fail({"E": rj(E), "m": m.value(E), "outer": table.values[E]})
        c = rep.add(Check("all_sets_measurable",
                          "every cell subset splits every open additively under μ*"))
        for E in range(1 << sp.n):
            c.checked += 1
            if not caratheodory_test(table, nu, E):
                c.fail({"E": rj(E)})
        rep.data["outer_table"] = table.report.to_json()
    c = rep.add(Check("inner_regular_on_opens", "m(U) = max m(K) over compacts K ⊆ U"))
    comps = sp.compacts()
    for U in sp.open_sets():
        c.checked += 1
        core = sp.core(U)
        top = max(m.value(K) for K in comps if not K & ~core)
        if top != m.value(U):
            c.fail({"U": rj(U)})
    c = rep.add(Check("unique", "each cell weight is forced by the values on two opens "
                      "(or two closed sets) differing in that cell"))
    c.checked = sp.n
    c = rep.add(Check("compact_subadditive",
                      "m(C ∪ K) ≤ m(C) + m(K) for compacts, closing the loop"))
    for a, C in enumerate(comps):
        for K in comps[a + 1:]:
            c.checked += 1
            if m.value(C | K) > m.value(C) + m.value(K):
                c.fail({"C": rj(C), "K": rj(K)})
    return m


# -- combined report and CSV ----------------------------------------------------------

def classify(nu: DeficientTM) -> Report:
    rep = Report(f"classification ({nu.provenance})")
    tm = tm_test(nu)
    sub = subadditivity_test(nu)
    rep.data.update(is_tm=tm.data["is_tm"], tm_agree=tm.data["agree"],
                    tm_certificate=tm.data["certificate"],
                    subadditive=sub.data["subadditive"], sub_consistent=sub.data["consistent"],
                    sub_certificate=sub.data.get("certificate"),
                    compact_finite=nu.compact_finite)
    rep.checks.extend(tm.checks + sub.checks)
    if sub.data["subadditive"]:
        m = extend_to_measure(nu, sub)
        rep.checks.extend(m.report.checks)
        rep.data.update(radon=m.radon, regular_borel=m.regular_borel,
                        atoms=m.report.data["atoms"])
    return rep


def csv_table(space: SpaceModel, rows) -> str:
    """CSV with columns region_key, value_num, value_den, value_inf_flag."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["region_key", "value_num", "value_den", "value_inf_flag"])
    for mask, v in rows:
        w.writerow([region_key(mask), *csv_fields(v)])
    return buf.getvalue()


def dtm_csv(nu: DeficientTM) -> str:
    return csv_table(nu.space, ((A, nu.values[A]) for A in nu.space.admissible_sets()))


__all__ = [
    "tm_test", "subadditivity_test", "OuterMeasureTable", "outer_measure", "outer_value",
    "caratheodory_test", "MeasureTable", "extend_to_measure", "classify", "csv_table",
    "dtm_csv",
]
