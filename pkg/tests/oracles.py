"""Brute-force reference implementations used as test oracles.

Nothing here calls the library's topology or variation code.  Faces are
recomputed from cell geometry, regions are frozensets of cell indices, and
every sup/inf is taken over an explicit enumeration of all cell subsets.
Keep spaces small (n <= 12 or so).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from dtmlab.extreal import INF, NEG_INF


def to_mask(S) -> int:
    m = 0
    for i in S:
        m |= 1 << i
    return m


def to_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _inside(small, big) -> bool:
    return all(b[0] <= s[0] and s[1] <= b[1] for s, b in zip(small, big))


class BruteSpace:
    """Cell complex rebuilt from extents: j is a face of i iff its closed box lies in i's."""

    def __init__(self, sp):
        self.sp = sp
        self.n = sp.n
        cells = sp.cells
        self.collar = frozenset(i for i, c in enumerate(cells) if c.collar)
        if sp.kind == "discrete":
            self.faces = [frozenset() for _ in cells]
        else:
            self.faces = [frozenset(j for j, d in enumerate(cells)
                                    if j != i and _inside(d.extent, c.extent))
                          for i, c in enumerate(cells)]
        self.everything = frozenset(range(self.n))
        self.subsets = [frozenset(s) for k in range(self.n + 1)
                        for s in combinations(range(self.n), k)]
        self.closed = [S for S in self.subsets if self.is_closed(S)]
        self.open = [S for S in self.subsets if self.is_open(S)]
        self.compacts = [S for S in self.closed if not S & self.collar]
        self.admissible = sorted(set(self.closed) | set(self.open), key=lambda s: (len(s), sorted(s)))

    def is_closed(self, S) -> bool:
        return all(self.faces[i] <= S for i in S)

    def is_open(self, S) -> bool:
        return self.is_closed(self.everything - S)

    def is_compact(self, S) -> bool:
        return self.is_closed(S) and not S & self.collar

    def smallest_open(self, S):
        out = self.everything
        for U in self.open:
            if S <= U:
                out &= U
        return out

    def smallest_closed(self, S):
        out = self.everything
        for F in self.closed:
            if S <= F:
                out &= F
        return out

    def compacts_in(self, S):
        return [K for K in self.compacts if K <= S]

    def opens_over(self, S):
        return [U for U in self.open if S <= U]

    def connected(self, S) -> bool:
        if not S:
            return False
        seen, todo = set(), [min(S)]
        while todo:
            i = todo.pop()
            if i in seen:
                continue
            seen.add(i)
            todo.extend(j for j in S if j not in seen and (j in self.faces[i] or i in self.faces[j]))
        return seen == set(S)


def lam_of(lam):
    cache = {}

    def f(S):
        if S not in cache:
            cache[S] = lam.value(to_mask(S))
        return cache[S]
    return f


def plus(bs: BruteSpace, f, A, outer="thin"):
    """max f(K) over compacts K in the region that A's value sees (0 from K = ∅)."""
    view = A if bs.is_open(A) or outer == "thin" else bs.smallest_open(A)
    return max(f(K) for K in bs.compacts_in(view))


def total(bs: BruteSpace, f, A, outer="thin"):
    """max over families of pairwise disjoint compacts in view of Σ|f(K_i)|."""
    view = A if bs.is_open(A) or outer == "thin" else bs.smallest_open(A)
    pool = [K for K in bs.compacts_in(view) if K]

    @lru_cache(maxsize=None)
    def best(start, used):
        out = 0
        for t in range(start, len(pool)):
            K = pool[t]
            if not K & used:
                out = max(out, abs(f(K)) + best(t + 1, used | K))
        return out
    return best(0, frozenset())


def dtm_axioms(bs: BruteSpace, nu, outer="thin") -> list[str]:
    """Names of violated axioms for a value map nu(S) on admissible S."""
    bad = []
    if any(nu(A) < 0 for A in bs.admissible):
        bad.append("nonnegative")
    if nu(frozenset()) != 0:
        bad.append("empty")
    for C, K in combinations(bs.compacts, 2):
        if not C & K and nu(C | K) != nu(C) + nu(K):
            bad.append("additive")
            break
    for U in bs.open:
        if nu(U) != max(nu(K) for K in bs.compacts_in(U)):
            bad.append("inner")
            break
    for F in bs.closed:
        inf = min(nu(U) for U in bs.opens_over(F))
        if outer == "thin":
            inf = min(inf, max(nu(K) for K in bs.compacts_in(F)))
        if nu(F) != inf:
            bad.append("outer")
            break
    return bad


def tm1(bs: BruteSpace, nu) -> bool:
    """Additivity on disjoint admissible pairs whose union is admissible."""
    adm = set(bs.admissible)
    for A in bs.admissible:
        for B in bs.admissible:
            if not A & B and (A | B) in adm and nu(A | B) != nu(A) + nu(B):
                return False
    return True


def subadditive_on_compacts(bs: BruteSpace, nu) -> bool:
    return all(nu(C | K) <= nu(C) + nu(K) for C in bs.compacts for K in bs.compacts)


def subadditive_on_opens(bs: BruteSpace, nu) -> bool:
    return all(nu(U | V) <= nu(U) + nu(V) for U in bs.open for V in bs.open)


def outer_star(bs: BruteSpace, nu, E):
    return min(nu(U) for U in bs.opens_over(E))


def component_count(bs: BruteSpace, S) -> int:
    left, count = set(S), 0
    while left:
        seed = left.pop()
        comp, todo = {seed}, [seed]
        while todo:
            i = todo.pop()
            for j in list(left):
                if j in bs.faces[i] or i in bs.faces[j]:
                    left.discard(j)
                    comp.add(j)
                    todo.append(j)
        count += 1
    return count


def random_singletons(rng, n, lo=-5, hi=5, infinite=False):
    vals = [Fraction(rng.randint(lo, hi)) for _ in range(n)]
    if infinite:
        vals[rng.randrange(n)] = INF
    return vals


__all__ = ["BruteSpace", "INF", "NEG_INF", "dtm_axioms", "lam_of", "plus", "random_singletons",
           "subadditive_on_compacts", "subadditive_on_opens", "tm1", "to_mask", "to_set", "total", "outer_star",
           "component_count"]
