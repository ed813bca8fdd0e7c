"""Finite cell-poset models of compact and locally compact spaces.

A model is a list of cells ordered by dimension plus the strict face order.
A region is a set of cells; it denotes the union of the *open* cells it
lists.  Down-closed regions are therefore closed, up-closed regions open, and
down-closed regions free of collar cells compact.  Collar cells are cells
whose closure leaves the modelled space (the missing boundary is simply not
present); they are how non-compactness enters.

Regions are stored as int bitmasks (bit i = cell i).  All enumeration lists
are returned in canonical order: by size, then lexicographically by sorted
cell indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator, Sequence

from .errors import CapacityError, InputError, ResolutionError

BUDGET = 24


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def canonical_key(mask: int) -> tuple[int, tuple[int, ...]]:
    return popcount(mask), tuple(bits(mask))


def region_key(mask: int) -> str:
    """Stable text key: comma-joined sorted cell indices ("" for the empty set)."""
    return ",".join(str(i) for i in bits(mask))


@dataclass(frozen=True)
class Cell:
    index: int
    label: str
    dim: int
    key: tuple
    extent: tuple
    collar: bool = False


class SpaceModel:
    """Immutable finite cell poset with collar flags.

    ``faces[i]`` lists direct (or any) faces of cell i; the strict order is
    its transitive closure.  Cells must be listed in nondecreasing dimension.
    """

    def __init__(
        self,
        cells: Sequence[Cell],
        faces: Sequence[Iterable[int]],
        kind: str,
        resolution: Fraction = Fraction(1),
        connected: bool | None = None,
        params: dict | None = None,
    ):
        n = len(cells)
        if n == 0:
            raise InputError("a space needs at least one cell")
        if len(faces) != n:
            raise InputError("faces list must have one entry per cell")
        self.cells: tuple[Cell, ...] = tuple(cells)
        self.kind = kind
        self.resolution = Fraction(resolution)
        if self.resolution <= 0:
            raise InputError("resolution must be positive")
        self.params = dict(params or {})
        self.n = n
        self.full = (1 << n) - 1
        for i, c in enumerate(self.cells):
            if c.index != i:
                raise InputError(f"cell {c.label} has index {c.index}, expected {i}")
            if i and c.dim < self.cells[i - 1].dim:
                raise InputError("cells must be listed in nondecreasing dimension")
        down = [0] * n
        for i in range(n):
            m = 0
            for f in faces[i]:
                if not 0 <= f < n:
                    raise InputError(f"face index {f} out of range")
                if self.cells[f].dim >= self.cells[i].dim:
                    raise InputError(
                        f"face {self.cells[f].label} of {self.cells[i].label} "
                        "must have strictly smaller dimension")
                m |= (1 << f) | down[f]
            down[i] = m
        self.down: tuple[int, ...] = tuple(down)
        up = [0] * n
        for i in range(n):
            for f in bits(down[i]):
                up[f] |= 1 << i
        self.up: tuple[int, ...] = tuple(up)
        self.adj: tuple[int, ...] = tuple(down[i] | up[i] for i in range(n))
        self.collar_mask = mask_of(i for i, c in enumerate(self.cells) if c.collar)
        self.noncollar_mask = self.full & ~self.collar_mask
        for i in bits(self.collar_mask):
            if up[i] & ~self.collar_mask:
                raise InputError(f"collar flags must be up-closed (check cofaces of {self.cells[i].label})")
        if kind == "discrete":
            if any(down) or self.collar_mask or any(c.dim for c in self.cells):
                raise InputError("discrete spaces have only isolated 0-cells without collar")
        self.is_connected = len(self._components(self.full)) == 1
        if connected and not self.is_connected:
            raise InputError("space declared connected but its comparability graph is not")
        self.by_key = {c.key: c.index for c in self.cells}
        self.by_label = {c.label: c.index for c in self.cells}
        self._cache: dict = {}

    # -- basic mask operations ------------------------------------------------
    def __repr__(self) -> str:
        return f"SpaceModel({self.kind}, {self.n} cells, {popcount(self.collar_mask)} collar)"

    @property
    def is_compact_model(self) -> bool:
        return self.collar_mask == 0

    def check_mask(self, mask: int) -> int:
        if mask < 0 or mask & ~self.full:
            raise InputError(f"region mask {mask} has cell indices outside 0..{self.n - 1}")
        return mask

    def mask(self, cells) -> int:
        """Accept a Region, an int mask, or an iterable of indices/labels."""
        if isinstance(cells, Region):
            if cells.space is not self:
                raise InputError("region belongs to a different space")
            return cells.mask
        if isinstance(cells, int):
            return self.check_mask(cells)
        m = 0
        for c in cells:
            if isinstance(c, str):
                if c not in self.by_label:
                    raise InputError(f"unknown cell label {c!r}")
                c = self.by_label[c]
            if isinstance(c, bool) or not isinstance(c, int) or not 0 <= c < self.n:
                raise InputError(f"invalid cell index {c!r}")
            m |= 1 << c
        return m

    def closure(self, mask: int) -> int:
        out = mask
        for i in bits(mask):
            out |= self.down[i]
        return out

    def up_closure(self, mask: int) -> int:
        out = mask
        for i in bits(mask):
            out |= self.up[i]
        return out

    def interior(self, mask: int) -> int:
        """Largest up-closed subset."""
        out = 0
        for i in bits(mask):
            if not self.up[i] & ~mask:
                out |= 1 << i
        return out

    def core(self, mask: int) -> int:
        """Largest compact (down-closed, collar-free) subset."""
        base = mask & self.noncollar_mask
        out = 0
        for i in bits(base):
            if not self.down[i] & ~base:
                out |= 1 << i
        return out

    def is_closed(self, mask: int) -> bool:
        return all(not self.down[i] & ~mask for i in bits(mask))

    def is_open(self, mask: int) -> bool:
        return all(not self.up[i] & ~mask for i in bits(mask))

    def is_compact(self, mask: int) -> bool:
        return not mask & self.collar_mask and self.is_closed(mask)

    def is_admissible(self, mask: int) -> bool:
        return self.is_open(mask) or self.is_closed(mask)

    def maximal_cells(self, mask: int) -> Iterator[int]:
        for i in bits(mask):
            if not self.up[i] & mask:
                yield i

    def _components(self, mask: int) -> list[int]:
        comps = []
        rest = mask
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                nxt = 0
                for i in bits(frontier):
                    nxt |= self.adj[i]
                nxt &= mask & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            rest &= ~comp
        return comps

    def components(self, mask: int) -> list[int]:
        return self._components(mask)

    def is_connected_mask(self, mask: int) -> bool:
        return mask != 0 and len(self._components(mask)) == 1

    def is_bounded(self, mask: int) -> bool:
        return not self.closure(mask) & self.collar_mask

    def is_solid(self, mask: int) -> bool:
        if not self.is_connected_mask(mask):
            return False
        return all(c & self.collar_mask for c in self._components(self.full & ~mask))

    def labels(self, mask: int) -> list[str]:
        return [self.cells[i].label for i in bits(mask)]

    # -- enumeration --------------------------------------------------------
    def _check_budget(self, mask: int, budget: int) -> None:
        cnt = popcount(mask & self.noncollar_mask)
        if cnt > budget:
            raise CapacityError(
                f"{cnt} non-collar cells exceed the enumeration budget of {budget}", count=cnt)

    def ideals(self, within: int, collar_free: bool = True, budget: int = BUDGET) -> list[int]:
        """All down-closed subsets of ``within`` (collar-free ones if requested), canonical order."""
        self._check_budget(within, budget)
        allowed = within & (self.noncollar_mask if collar_free else self.full)
        order = list(bits(allowed))
        down = self.down
        out: list[int] = []

        def rec(pos: int, cur: int) -> None:
            if pos == len(order):
                out.append(cur)
                return
            i = order[pos]
            rec(pos + 1, cur)
            if not down[i] & ~cur:
                rec(pos + 1, cur | (1 << i))

        rec(0, 0)
        out.sort(key=canonical_key)
        return out

    def compacts(self) -> list[int]:
        if "compacts" not in self._cache:
            self._cache["compacts"] = self.ideals(self.full)
        return self._cache["compacts"]

    def closed_sets(self) -> list[int]:
        if "closed" not in self._cache:
            self._cache["closed"] = self.ideals(self.full, collar_free=False)
        return self._cache["closed"]

    def open_sets(self) -> list[int]:
        if "open" not in self._cache:
            opens = [self.full & ~f for f in self.closed_sets()]
            opens.sort(key=canonical_key)
            self._cache["open"] = opens
        return self._cache["open"]

    def admissible_sets(self) -> list[int]:
        if "admissible" not in self._cache:
            s = set(self.closed_sets()) | set(self.open_sets())
            self._cache["admissible"] = sorted(s, key=canonical_key)
        return self._cache["admissible"]

    def compact_set(self) -> frozenset[int]:
        if "compact_set" not in self._cache:
            self._cache["compact_set"] = frozenset(self.compacts())
        return self._cache["compact_set"]

    def region(self, cells) -> "Region":
        return Region(self, self.mask(cells))

    # -- derived spaces -----------------------------------------------------
    def subspace(self, mask: int, mode: str) -> tuple["SpaceModel", list[int]]:
        """Induced model on ``mask``; returns (subspace, sub-index -> ambient index).

        ``mode="closed"`` inherits collar flags; ``mode="open"`` also marks
        cells whose ambient closure leaves the subset.
        """
        mask = self.check_mask(mask)
        if mode == "closed" and not self.is_closed(mask):
            raise InputError("closed subspace requires a down-closed cell set")
        if mode == "open" and not self.is_open(mask):
            raise InputError("open subspace requires an up-closed cell set")
        if mode not in ("closed", "open"):
            raise InputError(f"unknown subspace mode {mode!r}")
        idx = list(bits(mask))
        if not idx:
            raise InputError("cannot build a subspace on the empty set")
        pos = {a: k for k, a in enumerate(idx)}
        cells = []
        faces = []
        for k, a in enumerate(idx):
            c = self.cells[a]
            collar = c.collar or (mode == "open" and bool(self.down[a] & ~mask))
            cells.append(Cell(k, c.label, c.dim, c.key, c.extent, collar))
            faces.append([pos[f] for f in bits(self.down[a] & mask)])
        params = {"kind": "subspace", "mode": mode, "parent": self.params, "cells": idx}
        sub = SpaceModel(cells, faces, "subspace", self.resolution, None, params)
        return sub, idx

    def disjoint_union(self, other: "SpaceModel") -> tuple["SpaceModel", list[int], list[int]]:
        """Disjoint union; returns (union, self-index map, other-index map)."""
        entries = [(c.dim, 0, c) for c in self.cells] + [(c.dim, 1, c) for c in other.cells]
        entries.sort(key=lambda t: (t[0], t[1], t[2].index))
        maps: list[list[int]] = [[0] * self.n, [0] * other.n]
        for k, (_, side, c) in enumerate(entries):
            maps[side][c.index] = k
        cells, faces = [], []
        for k, (_, side, c) in enumerate(entries):
            src = self if side == 0 else other
            label = c.label if side == 0 else f"{c.label}'"
            cells.append(Cell(k, label, c.dim, (side, c.key), c.extent, c.collar))
            faces.append([maps[side][f] for f in bits(src.down[c.index])])
        params = {"kind": "union", "parts": [self.params, other.params]}
        kind = "discrete" if self.kind == other.kind == "discrete" else "union"
        if kind == "discrete":
            params = {"kind": "discrete", "size": [len(cells)]}
            cells = [Cell(k, c.label, 0, ("p", k), (), False) for k, c in enumerate(cells)]
        return SpaceModel(cells, faces, kind, self.resolution, None, params), maps[0], maps[1]


# -- constructors ----------------------------------------------------------

def _letters(n: int) -> list[str]:
    if n <= 26:
        return [chr(ord("a") + i) for i in range(n)]
    return [f"p{i}" for i in range(n)]


def discrete(n: int, labels: Sequence[str] | None = None) -> SpaceModel:
    if n < 1:
        raise InputError("a discrete space needs at least one point")
    labels = list(labels) if labels is not None else _letters(n)
    if len(labels) != n or len(set(labels)) != n:
        raise InputError("need one distinct label per point")
    cells = [Cell(i, labels[i], 0, ("p", i), (), False) for i in range(n)]
    return SpaceModel(cells, [[] for _ in range(n)], "discrete", Fraction(1), n == 1,
                      {"kind": "discrete", "size": [n]})


_SIDES_1D = {"none": (False, False), "left": (True, False), "right": (False, True),
             "both": (True, True)}


def _factor(n: int, lo_collar: bool, hi_collar: bool):
    """1D factor cells as (key, dim, lo, hi, collar, faces-keys) in geometric order."""
    out = []
    for i in range(n + 1):
        if (i == 0 and lo_collar) or (i == n and hi_collar):
            continue
        out.append((("v", i), 0, i, i, False, []))
    for i in range(n):
        collar = (i == 0 and lo_collar) or (i == n - 1 and hi_collar)
        fk = [("v", j) for j in (i, i + 1)
              if not ((j == 0 and lo_collar) or (j == n and hi_collar))]
        out.append((("e", i), 1, i, i + 1, collar, fk))
    return out


def _pos(key) -> int:
    return 2 * key[1] + (1 if key[0] == "e" else 0)


def _label1d(key, n: int) -> str:
    t, i = key
    if t == "v":
        return f"v{i}"
    return f"e{i}{i + 1}" if n < 10 else f"e{i}_{i + 1}"


def grid1d(n: int, collar: str = "none", resolution: Fraction | int = 1) -> SpaceModel:
    """Path with n edges on [0, n*r]; collar sides drop their boundary vertex."""
    if n < 1:
        raise InputError("grid1d needs at least one edge")
    if collar not in _SIDES_1D:
        raise InputError(f"unknown grid1d collar {collar!r}")
    lo, hi = _SIDES_1D[collar]
    r = Fraction(resolution)
    fac = _factor(n, lo, hi)
    fac.sort(key=lambda t: (t[1], _pos(t[0])))
    keyidx = {t[0]: k for k, t in enumerate(fac)}
    cells = [Cell(k, _label1d(t[0], n), t[1], (t[0],), ((t[2] * r, t[3] * r),), t[4])
             for k, t in enumerate(fac)]
    faces = [[keyidx[f] for f in t[5]] for t in fac]
    space = SpaceModel(cells, faces, "grid1d", r, True,
                       {"kind": "grid1d", "size": [n], "collar": collar,
                        "resolution": str(r)})
    if not space.noncollar_mask:
        raise InputError("grid1d model has no non-collar cell")
    return space


def _sides_2d(collar) -> tuple[bool, bool, bool, bool]:
    if isinstance(collar, str):
        table = {"none": [], "left": ["left"], "right": ["right"], "bottom": ["bottom"],
                 "top": ["top"], "both": ["left", "right"],
                 "all": ["left", "right", "bottom", "top"]}
        if collar not in table:
            raise InputError(f"unknown grid2d collar {collar!r}")
        sides = table[collar]
    else:
        sides = list(collar)
        bad = [s for s in sides if s not in ("left", "right", "bottom", "top")]
        if bad:
            raise InputError(f"unknown collar sides {bad}")
    return ("left" in sides, "right" in sides, "bottom" in sides, "top" in sides)


def grid2d(nx: int, ny: int, collar="none", resolution: Fraction | int = 1) -> SpaceModel:
    """Rectangle [0, nx*r] x [0, ny*r] as a product of two 1D factors."""
    if nx < 1 or ny < 1:
        raise InputError("grid2d needs at least one square")
    left, right, bottom, top = _sides_2d(collar)
    r = Fraction(resolution)
    fx = {t[0]: t for t in _factor(nx, left, right)}
    fy = {t[0]: t for t in _factor(ny, bottom, top)}
    raw = []
    for kx, ky in product(fx, fy):
        tx, ty = fx[kx], fy[ky]
        dim = tx[1] + ty[1]
        raw.append(((dim, _pos(ky), _pos(kx)), (kx, ky), tx, ty))
    raw.sort(key=lambda t: t[0])
    keyidx = {t[1]: k for k, t in enumerate(raw)}
    cells, faces = [], []
    for k, (_, key, tx, ty) in enumerate(raw):
        kx, ky = key
        dim = tx[1] + ty[1]
        if dim == 0:
            label = f"v{kx[1]}_{ky[1]}"
        elif dim == 2:
            label = f"s{kx[1]}_{ky[1]}"
        else:
            label = (f"eh{kx[1]}_{ky[1]}" if kx[0] == "e" else f"ev{kx[1]}_{ky[1]}")
        extent = ((tx[2] * r, tx[3] * r), (ty[2] * r, ty[3] * r))
        cells.append(Cell(k, label, dim, key, extent, tx[4] or ty[4]))
        fl = [keyidx[(fk, ky)] for fk in tx[5]] + [keyidx[(kx, fk)] for fk in ty[5]]
        faces.append(fl)
    params = {"kind": "grid2d", "size": [nx, ny],
              "collar": collar if isinstance(collar, str) else list(collar),
              "resolution": str(r)}
    space = SpaceModel(cells, faces, "grid2d", r, True, params)
    if not space.noncollar_mask:
        raise InputError("grid2d model has no non-collar cell")
    return space


def build_space(desc: dict) -> SpaceModel:
    """Build a model from its JSON description."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InputError("space description needs a 'kind'")
    kind = desc["kind"]
    size = desc.get("size")
    if not isinstance(size, list) or not all(isinstance(s, int) for s in size):
        raise InputError("space 'size' must be a list of ints")
    collar = desc.get("collar", "none")
    res = Fraction(desc.get("resolution", 1))
    if kind == "discrete":
        if len(size) != 1:
            raise InputError("discrete size is [n]")
        return discrete(size[0], desc.get("labels"))
    if kind == "grid1d":
        if len(size) != 1:
            raise InputError("grid1d size is [n]")
        return grid1d(size[0], collar, res)
    if kind == "grid2d":
        if len(size) != 2:
            raise InputError("grid2d size is [nx, ny]")
        return grid2d(size[0], size[1], collar, res)
    raise InputError(f"unknown space kind {kind!r}")


def path(n: int) -> SpaceModel:
    """P_n: compact path with n edges."""
    return grid1d(n)


# -- regions ---------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    space: SpaceModel
    mask: int

    @property
    def cells(self) -> tuple[int, ...]:
        return tuple(bits(self.mask))

    @property
    def labels(self) -> list[str]:
        return self.space.labels(self.mask)

    @property
    def key(self) -> str:
        return region_key(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self):
        return iter(self.cells)

    def __contains__(self, cell) -> bool:
        if isinstance(cell, str):
            cell = self.space.by_label[cell]
        return bool(self.mask >> cell & 1)

    def __repr__(self) -> str:
        return "{" + ",".join(self.labels) + "}"

    @property
    def is_closed(self) -> bool:
        return self.space.is_closed(self.mask)

    @property
    def is_open(self) -> bool:
        return self.space.is_open(self.mask)

    @property
    def is_compact(self) -> bool:
        return self.space.is_compact(self.mask)

    @property
    def is_admissible(self) -> bool:
        return self.is_open or self.is_closed

    @property
    def classes(self) -> frozenset[str]:
        out = set()
        if self.is_open:
            out.add("open")
        if self.is_closed:
            out.add("closed")
        if self.is_compact:
            out.add("compact")
        return frozenset(out)

    @property
    def cls(self) -> str:
        c = self.classes
        return "+".join(x for x in ("open", "closed", "compact") if x in c) or "neither"

    @property
    def is_bounded(self) -> bool:
        return self.space.is_bounded(self.mask)

    @property
    def is_connected(self) -> bool:
        return self.space.is_connected_mask(self.mask)

    @property
    def is_solid(self) -> bool:
        return self.space.is_solid(self.mask)

    def closure(self) -> "Region":
        return Region(self.space, self.space.closure(self.mask))

    def interior(self) -> "Region":
        return Region(self.space, self.space.interior(self.mask))

    def components(self) -> list["Region"]:
        return [Region(self.space, m) for m in self.space.components(self.mask)]

    def _other(self, other) -> int:
        return self.space.mask(other)

    def __or__(self, other) -> "Region":
        return Region(self.space, self.mask | self._other(other))

    def __and__(self, other) -> "Region":
        return Region(self.space, self.mask & self._other(other))

    def __sub__(self, other) -> "Region":
        return Region(self.space, self.mask & ~self._other(other))

    def complement(self) -> "Region":
        return Region(self.space, self.space.full & ~self.mask)

    def __le__(self, other) -> bool:
        return not self.mask & ~self._other(other)

    def isdisjoint(self, other) -> bool:
        return not self.mask & self._other(other)


def classify_region(space: SpaceModel, cells) -> Region:
    return Region(space, space.mask(cells))


def closure_interior(region: Region) -> tuple[Region, Region]:
    return region.closure(), region.interior()


def components(region: Region) -> list[Region]:
    return region.components()


def enumerate_compacts_within(open_region: Region, budget: int = BUDGET) -> Iterator[Region]:
    """All compact regions inside an open region, including the empty one."""
    if not open_region.is_open:
        raise InputError("enumerate_compacts_within expects an open region")
    sp = open_region.space
    for m in sp.ideals(open_region.mask, budget=budget):
        yield Region(sp, m)


def minimal_open_superset(closed_region: Region) -> Region:
    """Up-closure: the smallest cell-open set containing the region."""
    if not closed_region.is_closed:
        raise InputError("minimal_open_superset expects a closed region")
    return Region(closed_region.space, closed_region.space.up_closure(closed_region.mask))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InputError(msg)


def interpolate(K: Region, U: Region, flavor: str = "plain"):
    """Bounded open V with K in V, closure(V) in U (plus variants).

    ``plain`` returns V; ``connected`` returns (V, C) with V connected and
    C = closure(V) compact connected; ``k0`` returns C, a disjoint union of
    compact connected regions with K in C in U.
    """
    sp = K.space
    _require(U.space is sp, "K and U must share a space")
    _require(K.is_compact, "K must be compact")
    _require(U.is_open, "U must be open")
    _require(K <= U, "K must lie inside U")
    if flavor == "plain":
        V = sp.up_closure(K.mask)
        cl = sp.closure(V)
        # any open superset of K contains V, so V is the only candidate
        if cl & ~U.mask or cl & sp.collar_mask:
            raise ResolutionError(
                f"no bounded open V with closure inside U at resolution {sp.resolution}")
        return Region(sp, V)
    if flavor == "connected":
        _require(K.is_connected or U.is_connected, "K or U must be connected")
        start = sp.up_closure(K.mask)
        for V in sp.open_sets():
            if V & start != start or V & ~U.mask:
                continue
            cl = sp.closure(V)
            if cl & ~U.mask or cl & sp.collar_mask:
                continue
            if sp.is_connected_mask(V):
                return Region(sp, V), Region(sp, cl)
        raise ResolutionError(
            f"no connected interpolant between K and U at resolution {sp.resolution}")
    if flavor == "k0":
        return Region(sp, K.mask)
    raise InputError(f"unknown interpolation flavor {flavor!r}")


def split(C: Region, parts, flavor: str = "cover"):
    """Splitting operations: ``cover``, ``clopen``, ``avoid``."""
    sp = C.space
    if flavor == "cover":
        U, V = parts
        _require(C.is_compact, "C must be compact")
        _require(U.is_open and V.is_open, "cover parts must be open")
        _require(not C.mask & ~(U.mask | V.mask), "C must lie in U ∪ V")
        k = sp.core(C.mask & U.mask)
        d = sp.core(C.mask & V.mask)
        if k | d != C.mask:
            raise ResolutionError(
                f"cells {sp.labels(C.mask & ~(k | d))} cannot be assigned at resolution "
                f"{sp.resolution}")
        return [Region(sp, k), Region(sp, d)]
    if flavor == "clopen":
        K, U = parts
        _require(C.is_compact, "C must be compact")
        _require(U.is_open and K <= U, "need an open U containing K")
        comps = sp.components(C.mask)
        _require(K.mask != 0 and all(c & K.mask in (0, c) for c in comps) and K <= C,
                 "K must be a union of components of C")
        return [Region(sp, K.mask), Region(sp, C.mask & ~K.mask)]
    if flavor == "avoid":
        family, E = parts
        E_mask = E.mask if isinstance(E, Region) else sp.mask(E)
        witness = 0
        for Ei in family:
            em = Ei.mask if isinstance(Ei, Region) else sp.mask(Ei)
            cand = sorted(bits(em & ~E_mask), key=lambda i: (sp.cells[i].dim, i))
            _require(bool(cand), "each family member must not be contained in E")
            pick = next((i for i in cand if not sp.closure(1 << i) & E_mask), None)
            if pick is None:
                raise ResolutionError("every witness cell has closure meeting E")
            witness |= 1 << pick
        return [Region(sp, sp.full & ~sp.closure(witness))]
    raise InputError(f"unknown split flavor {flavor!r}")


# -- refinement ------------------------------------------------------------

def _sub1d(key) -> list:
    t, i = key
    if t == "v":
        return [("v", 2 * i)]
    return [("e", 2 * i), ("v", 2 * i + 1), ("e", 2 * i + 1)]


def refine(space: SpaceModel) -> tuple[SpaceModel, Callable[[int], int]]:
    """Halve the resolution; returns the fine model and a coarse->fine mask transfer."""
    if "refine" in space._cache:
        return space._cache["refine"]
    if space.kind == "discrete":
        return space, lambda m: m
    p = space.params
    if space.kind == "grid1d":
        fine = grid1d(2 * p["size"][0], p["collar"], space.resolution / 2)
    elif space.kind == "grid2d":
        fine = grid2d(2 * p["size"][0], 2 * p["size"][1], p["collar"], space.resolution / 2)
    else:
        raise ResolutionError(f"cannot refine a {space.kind} model")
    images = []
    for c in space.cells:
        m = 0
        for sub in product(*(_sub1d(k) for k in c.key)):
            m |= 1 << fine.by_key[tuple(sub)]
        images.append(m)

    def transfer(mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= images[i]
        return out

    transfer.images = images  # type: ignore[attr-defined]
    # cached so every refinement of one model shares a single fine model
    space._cache["refine"] = (fine, transfer)
    return fine, transfer
