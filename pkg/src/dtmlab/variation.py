"""Positive, negative and total variations of a compact set function.

Every admissible region A has a *compact content*: the ideal that carries all
compact sets the variation can see inside A.

* open A: the largest compact inside A (its core)
* closed A, ``outer="thin"``: A minus its collar cells
* closed A, ``outer="star"``: the core of the up-closure of A

The thin rule evaluates a closed set through a neighbourhood hugging it
one subdivision deeper, whose compacts are exactly the compacts inside A.
The star rule evaluates it at the smallest cell-open superset at the native
resolution.  ``outer="thin"`` is the default; see ``resolution_report`` for
the comparison.

λ⁺(A) = max{λ(K): K ideal ⊆ content(A)} is computed for all ideals at once
by a DP over the ideal lattice (drop one maximal cell at a time).  |λ| uses
the component form Σ_c |λ(c)| maximized the same way; the family form is kept
as an independent oracle.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .errors import CapacityError, ConsistencyError, ExtArithmeticError, InputError
from .extreal import ExtValue, Infinity, ext_sum
from .report import Check, Report, region_json
from .setfn import CompactSetFunction, FunctionOnCompacts, combine
from .topology import Region, SpaceModel, bits, popcount

OUTER_MODES = ("thin", "star")
FAMILY_LIMIT = 12


def content(space: SpaceModel, mask: int, outer: str = "thin") -> int:
    if space.is_open(mask):
        return space.core(mask)
    if space.is_closed(mask):
        if outer == "thin":
            return mask & space.noncollar_mask
        if outer == "star":
            return space.core(space.up_closure(mask))
        raise InputError(f"unknown outer mode {outer!r}")
    raise InputError(f"{space.labels(mask)} is neither open nor closed")


def sub_ideal_max(space: SpaceModel, f: Callable[[int], ExtValue]) -> dict[int, ExtValue]:
    """best[K] = max over ideals K' ⊆ K of f(K'), for every compact K."""
    best: dict[int, ExtValue] = {}
    up = space.up
    for K in space.compacts():
        v = f(K)
        for i in bits(K):
            if not up[i] & K:
                w = best[K ^ (1 << i)]
                if w > v:
                    v = w
        best[K] = v
    return best


class VariationTable:
    """Memoized λ⁺, λ⁻ and |λ| on every admissible region of λ's space."""

    def __init__(self, lam: CompactSetFunction, outer: str = "thin"):
        if outer not in OUTER_MODES:
            raise InputError(f"unknown outer mode {outer!r}")
        self.lam = lam
        self.space = lam.space
        self.outer = outer
        self._tables: dict[str, dict[int, ExtValue]] = {}
        self._family_memo: dict[int, ExtValue] = {}

    def _table(self, which: str) -> dict[int, ExtValue]:
        t = self._tables.get(which)
        if t is None:
            sp, lam = self.space, self.lam
            if which == "+":
                f = lam.value
            elif which == "-":
                f = lambda K: -lam.value(K)  # noqa: E731
            else:
                f = lambda K: ext_sum(abs(lam.value(c)) for c in sp.components(K))  # noqa: E731
            t = sub_ideal_max(sp, f)
            self._tables[which] = t
        return t

    def content(self, A) -> int:
        return content(self.space, self.space.mask(A), self.outer)

    def plus(self, A) -> ExtValue:
        return self._table("+")[self.content(A)]

    def minus(self, A) -> ExtValue:
        return self._table("-")[self.content(A)]

    def total(self, A) -> ExtValue:
        return self._table("abs")[self.content(A)]

    def triple(self, A) -> tuple[ExtValue, ExtValue, ExtValue]:
        c = self.content(A)
        return self._table("+")[c], self._table("-")[c], self._table("abs")[c]

    def argmax_plus(self, A) -> int:
        """An attaining ideal for λ⁺(A) (first in canonical order)."""
        c = self.content(A)
        target = self._table("+")[c]
        lam = self.lam
        for K in self.space.compacts():
            if not K & ~c and lam.value(K) == target:
                return K
        return 0

    # -- independent oracle for |λ| ---------------------------------------
    def total_by_families(self, A) -> ExtValue:
        """Max of Σ|λ(K_i)| over families of pairwise disjoint ideals in A."""
        sp = self.space
        if popcount(sp.noncollar_mask) > FAMILY_LIMIT:
            raise CapacityError(
                f"family enumeration is limited to {FAMILY_LIMIT} non-collar cells",
                count=popcount(sp.noncollar_mask))
        return self._family(self.content(A))

    def _family(self, S: int) -> ExtValue:
        sp = self.space
        S = sp.core(S)
        if S in self._family_memo:
            return self._family_memo[S]
        if not S:
            return 0
        c = S & -S
        best = self._family(S & ~c)
        for K in sp.compacts():
            if K & c and not K & ~S:
                v = abs(self.lam.value(K)) + self._family(S & ~K)
                if v > best:
                    best = v
        self._family_memo[S] = best
        return best


def table_for(lam: CompactSetFunction, outer: str = "thin") -> VariationTable:
    """Shared VariationTable cached on the function object."""
    cache = lam.__dict__.setdefault("_variation_tables", {})
    if outer not in cache:
        cache[outer] = VariationTable(lam, outer)
    return cache[outer]


def _admissible_mask(lam: CompactSetFunction, A) -> int:
    m = lam.space.mask(A)
    if not lam.space.is_admissible(m):
        raise InputError(f"{lam.space.labels(m)} is neither open nor closed")
    return m


def positive_variation(lam: CompactSetFunction, A, sign: int = 1, outer: str = "thin") -> ExtValue:
    """λ⁺(A) for sign=+1, λ⁻(A) = (−λ)⁺(A) for sign=−1."""
    m = _admissible_mask(lam, A)
    t = table_for(lam, outer)
    return t.plus(m) if sign > 0 else t.minus(m)


def negative_variation(lam: CompactSetFunction, A, outer: str = "thin") -> ExtValue:
    return positive_variation(lam, A, -1, outer)


def total_variation(lam: CompactSetFunction, A, method: str = "component",
                    outer: str = "thin") -> ExtValue:
    """|λ|(A) by the component form, the family form, or both (must agree)."""
    m = _admissible_mask(lam, A)
    t = table_for(lam, outer)
    if method == "component":
        return t.total(m)
    if method == "family":
        return t.total_by_families(m)
    if method == "both":
        a, b = t.total(m), t.total_by_families(m)
        if a != b:
            raise ConsistencyError(
                f"component form {a} != family form {b} on {lam.space.labels(m)}",
                witness=region_json(lam.space, m))
        return a
    raise InputError(f"unknown method {method!r}")


def positive_variation_bruteforce(lam: CompactSetFunction, U) -> ExtValue:
    """Max of λ over compacts listed by the generic enumerator (opens only)."""
    from .topology import enumerate_compacts_within

    region = U if isinstance(U, Region) else lam.space.region(U)
    return max(lam.value(K.mask) for K in enumerate_compacts_within(region))


def positive_part(lam: CompactSetFunction, outer: str = "thin") -> FunctionOnCompacts:
    """λ⁺ restricted to compacts, as a new set function."""
    t = table_for(lam, outer)
    return FunctionOnCompacts(lam.space, t.plus, "positive part")


# -- variation identity suite -----------------------------------------------------------

class _Vals:
    """Precomputed (λ⁺, λ⁻, |λ|) for every admissible set."""

    def __init__(self, lam: CompactSetFunction, outer: str):
        self.t = table_for(lam, outer)
        self.sp = lam.space
        self.adm = self.sp.admissible_sets()
        self.p, self.m, self.a = {}, {}, {}
        for A in self.adm:
            self.p[A], self.m[A], self.a[A] = self.t.triple(A)


def _family_sums(candidates: list[int], within: int, value: Callable[[int], ExtValue],
                 visit: Callable[[int, ExtValue, int, int], None],
                 max_size: int | None, noncompact_flag: Callable[[int], bool] | None,
                 limit: int) -> int:
    """DFS over families of pairwise disjoint nonempty candidates inside ``within``.

    ``visit(union, total, size, noncompact_count)`` is called for each
    nonempty family.  Returns the number of families visited.
    """
    count = 0
    cands = [c for c in candidates if c and not c & ~within]

    def rec(start: int, used: int, total: ExtValue, size: int, nc: int) -> None:
        nonlocal count
        for k in range(start, len(cands)):
            c = cands[k]
            if c & used:
                continue
            extra = 1 if noncompact_flag is not None and noncompact_flag(c) else 0
            if nc + extra > 1:
                continue
            count += 1
            if count > limit:
                raise CapacityError(f"more than {limit} families to enumerate", count=count)
            t = total + value(c)
            visit(used | c, t, size + 1, nc + extra)
            if max_size is None or size + 1 < max_size:
                rec(k + 1, used | c, t, size + 1, nc + extra)

    rec(0, 0, 0, 0, 0)
    return count


def variation_identities_suite(lam: CompactSetFunction, outer: str = "thin", max_family: int | None = None,
                    work_limit: int = 3_000_000) -> Report:
    """Check every basic property of λ⁺, λ⁻ and |λ| exhaustively."""
    sp = lam.space
    rep = Report("variation properties")
    rep.data.update(outer=outer, cells=sp.n, admissible=len(sp.admissible_sets()))
    V = _Vals(lam, outer)
    adm, P, M, T = V.adm, V.p, V.m, V.a
    opens = sp.open_sets()
    closed = sp.closed_sets()
    compacts = sp.compacts()
    rj = lambda m: region_json(sp, m)  # noqa: E731

    c = rep.add(Check("vanish_on_empty",
                      "λ, λ⁺, λ⁻, |λ| vanish at ∅; λ⁺ ≥ 0 and |λ| ≥ 0 everywhere"))
    c.checked = 1 + len(adm)
    if lam.value(0) != 0 or P[0] != 0 or M[0] != 0 or T[0] != 0:
        c.fail({"region": rj(0), "values": [lam.value(0), P[0], M[0], T[0]]})
    for A in adm:
        if P[A] < 0 or T[A] < 0 or M[A] < 0:
            c.fail({"region": rj(A), "plus": P[A], "total": T[A]})

    c = rep.add(Check("sign_split_on_opens",
                      "on opens: λ⁺(U)=0 ⇒ |λ|(U)=λ⁻(U), and λ⁻(U)=0 ⇒ |λ|(U)=λ⁺(U)"))
    for U in opens:
        c.checked += 1
        if (P[U] == 0 and T[U] != M[U]) or (M[U] == 0 and T[U] != P[U]):
            c.fail({"U": rj(U), "plus": P[U], "minus": M[U], "total": T[U]})

    c = rep.add(Check("monotone", "λ⁺ and |λ| are monotone on nested admissible sets"))
    for A in adm:
        for B in adm:
            if A & ~B:
                continue
            c.checked += 1
            if P[A] > P[B] or T[A] > T[B]:
                c.fail({"A": rj(A), "B": rj(B)})

    c = rep.add(Check("additive_on_opens", "λ⁺ and |λ| are additive on disjoint open pairs"))
    for a, U in enumerate(opens):
        for W in opens[a:]:
            if U & W:
                continue
            c.checked += 1
            if P[U | W] != P[U] + P[W] or T[U | W] != T[U] + T[W]:
                c.fail({"U": rj(U), "V": rj(W)})

    c = rep.add(Check("compact_bounds",
                      "λ(K) ≤ λ⁺(K), λ(K) ≤ |λ(K)| ≤ |λ|(K), |λ(K)| ≤ λ⁺(K)+λ⁻(K)"))
    for K in compacts:
        c.checked += 1
        x = lam.value(K)
        if not (x <= P[K] and x <= abs(x) <= T[K] and abs(x) <= P[K] + M[K]):
            c.fail({"K": rj(K), "lambda": x, "plus": P[K], "minus": M[K], "total": T[K]})
    zero_total = all(T[K] == 0 for K in compacts)
    if zero_total and any(lam.value(K) != 0 for K in compacts):
        c.fail({"reason": "|λ| vanishes on compacts but λ does not"})

    sup = rep.add(Check("closed_compact_superadditive",
                        "λ⁺, |λ| of F ⊔ C₁ ⊔ … ⊔ Cₙ dominate the sums (F closed, Cᵢ compact)"))
    eq = rep.add(Check("closed_compact_additive",
                       "λ⁺, |λ| of F ⊔ C₁ ⊔ … ⊔ Cₙ equal the sums (F closed, Cᵢ compact)"))
    budget = [work_limit]
    nonempty_compacts = [K for K in compacts if K]
    for F in closed:
        def visit(union: int, tot: "_Pair", size: int, nc: int, F=F) -> None:
            S = F | union
            sp_, st_ = P[F] + tot.v[0], T[F] + tot.v[1]
            sup.checked += 1
            eq.checked += 1
            if P[S] < sp_ or T[S] < st_:
                sup.fail({"F": rj(F), "union": rj(S)})
            if P[S] != sp_ or T[S] != st_:
                eq.fail({"F": rj(F), "union": rj(S), "plus": P[S], "sum_plus": sp_})

        budget[0] -= _family_sums(nonempty_compacts, sp.full & ~F,
                                  lambda K: _Pair(P[K], T[K]), visit, max_family, None,
                                  budget[0])
    if max_family is not None:
        sup.notes.append(f"families limited to {max_family} compacts")
        eq.notes.append(f"families limited to {max_family} compacts")

    c = rep.add(Check("inner_regular", "λ⁺(U), |λ|(U) are maxima over compacts inside U"))
    for U in opens:
        c.checked += 1
        inside = [K for K in compacts if not K & ~U]
        if P[U] != max(P[K] for K in inside) or T[U] != max(T[K] for K in inside):
            c.fail({"U": rj(U)})

    c = rep.add(Check("superadditive",
                      "λ⁺(A), |λ|(A) dominate sums over disjoint admissible families inside A "
                      "(at most one non-compact closed member)"))
    noncompact_closed = lambda B: sp.is_closed(B) and not sp.is_compact(B)  # noqa: E731
    nonempty_adm = [B for B in adm if B]
    for A in adm:
        def visit(union: int, tot, size: int, nc: int, A=A) -> None:
            c.checked += 1
            if tot.v[0] > P[A] or tot.v[1] > T[A]:
                c.fail({"A": rj(A), "union": rj(union), "sum_plus": tot.v[0], "plus": P[A]})

        budget[0] -= _family_sums(nonempty_adm, A, lambda B: _Pair(P[B], T[B]), visit,
                                  max_family, noncompact_closed, budget[0])
    if max_family is not None:
        c.notes.append(f"families limited to {max_family} members")

    c = rep.add(Check("total_at_most_sum", "|λ| ≤ λ⁺ + λ⁻ on admissible sets"))
    strict = []
    for A in adm:
        c.checked += 1
        s = P[A] + M[A]
        if T[A] > s:
            c.fail({"A": rj(A), "total": T[A], "sum": s})
        elif T[A] < s:
            strict.append(A)
    c.data["strict_count"] = len(strict)
    c.data["strict_examples"] = [{"A": rj(A), "total": T[A], "plus": P[A], "minus": M[A]}
                                 for A in strict[:5]]

    c = rep.add(Check("idempotent", "(λ⁺)⁺ = λ⁺, recomputed from λ⁺ on compacts"))
    again = VariationTable(FunctionOnCompacts(sp, lambda K: P[K], "positive part"), outer)
    for A in adm:
        c.checked += 1
        if again.plus(A) != P[A]:
            c.fail({"A": rj(A), "plus": P[A], "plus_plus": again.plus(A)})
    return rep


class _Pair:
    """Pair of extended values added componentwise (λ⁺ and |λ| sums)."""

    __slots__ = ("v",)

    def __init__(self, a, b):
        self.v = (a, b)

    def __add__(self, other):
        return _Pair(self.v[0] + other.v[0], self.v[1] + other.v[1])

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented


# -- identities -------------------------------------------------------------

def sign_split_identity(lam: CompactSetFunction, outer: str = "thin") -> Check:
    """Record where |λ| = λ⁺ + λ⁻ holds (always expected on discrete models)."""
    sp = lam.space
    t = table_for(lam, outer)
    c = Check("sign_split_identity", "|λ| = λ⁺ + λ⁻ on every admissible set")
    for A in sp.admissible_sets():
        c.checked += 1
        p, m, a = t.triple(A)
        try:
            s = p + m
        except ExtArithmeticError:
            c.fail({"A": region_json(sp, A), "reason": "inf-inf"})
            continue
        if a != s:
            c.fail({"A": region_json(sp, A), "total": a, "plus": p, "minus": m})
    return c


def algebra_checks(lam: CompactSetFunction, other: CompactSetFunction | None = None,
                   scalars=(2, -3, Fraction(1, 2), 0), outer: str = "thin") -> Report:
    """Closure properties of the variations under negation, scaling and sums."""
    sp = lam.space
    rep = Report("variation algebra")
    adm = sp.admissible_sets()
    base = table_for(lam, outer)
    rj = lambda m: region_json(sp, m)  # noqa: E731

    c = rep.add(Check("negation", "|−λ| = |λ| and (−λ)⁺ = λ⁻"))
    neg = VariationTable(combine("negate", lam), outer)
    for A in adm:
        c.checked += 1
        if neg.total(A) != base.total(A) or neg.plus(A) != base.minus(A):
            c.fail({"A": rj(A)})

    c = rep.add(Check("scaling", "|bλ| = |b|·|λ|"))
    for b in scalars:
        sc = VariationTable(combine("scale", lam, b=b), outer)
        for A in adm:
            c.checked += 1
            if sc.total(A) != base.total(A) * abs(Fraction(b)):
                c.fail({"A": rj(A), "b": Fraction(b)})

    if other is not None:
        ot = table_for(other, outer)
        for op in ("add", "sub"):
            c = rep.add(Check(f"triangle_{op}", f"|λ {'+' if op == 'add' else '−'} ν| ≤ |λ| + |ν|"))
            try:
                comb = VariationTable(combine(op, lam, other), outer)
            except ExtArithmeticError:
                c.passed = None
                c.notes.append("combination mixes infinities")
                continue
            for A in adm:
                c.checked += 1
                if comb.total(A) > base.total(A) + ot.total(A):
                    c.fail({"A": rj(A)})
        c = rep.add(Check("order", "λ ≤ ν on compacts ⇒ λ⁺ ≤ ν⁺"))
        if all(lam.value(K) <= other.value(K) for K in sp.compacts()):
            for A in adm:
                c.checked += 1
                if base.plus(A) > ot.plus(A):
                    c.fail({"A": rj(A)})
        else:
            c.passed = None
            c.notes.append("λ ≤ ν fails on some compact; implication vacuous")
    return rep


def resolution_report(lam: CompactSetFunction) -> Report:
    """Compare λ⁺ on closed sets under thin, star@r and (if refinable) star@r/2."""
    sp = lam.space
    rep = Report("resolution comparison")
    thin = table_for(lam, "thin")
    star = table_for(lam, "star")
    fine = None
    if lam.refinable:
        flam, transfer = lam.refined()
        fine = (table_for(flam, "star"), transfer)
    rows = []
    c = rep.add(Check("star_refinement_stable",
                      "λ⁺ on closed sets agrees at resolutions r and r/2 (star rule)",
                      kind="verdict"))
    d = rep.add(Check("thin_matches_fine_star",
                      "thin rule equals the star rule at r/2 on closed sets"))
    for F in sp.closed_sets():
        row = {"F": region_json(sp, F), "thin": thin.plus(F), "star_r": star.plus(F)}
        if fine is not None:
            ft, transfer = fine
            row["star_r2"] = ft.plus(transfer(F))
            c.checked += 1
            d.checked += 1
            if row["star_r2"] != row["star_r"]:
                c.fail(row)
            if row["star_r2"] != row["thin"]:
                d.fail(row)
        rows.append(row)
    if fine is None:
        c.passed = d.passed = None
        c.notes.append("function has no geometric refinement")
    # informational: disagreement is a finding, not an error
    c.data["disagreements"] = sum(1 for r in rows if "star_r2" in r and r["star_r2"] != r["star_r"])
    rep.data["rows"] = rows
    return rep


__all__ = [
    "VariationTable", "table_for", "positive_variation", "negative_variation",
    "total_variation", "positive_variation_bruteforce", "positive_part", "variation_identities_suite",
    "sign_split_identity", "algebra_checks", "resolution_report", "content", "sub_ideal_max",
    "Infinity",
]
