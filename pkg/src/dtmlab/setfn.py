"""Signed, extended-valued set functions on compact regions.

Flavors:

* ``table``             explicit value for every compact region
* ``cell_sum``          sum of per-cell weights (base functionals, discrete singletons)
* ``solid_indicator``   1 if a fixed connected compact D lies inside K
* ``component_rule``    sum of a base functional over components of K containing a family member
* ``point_counting``    sum of point weights over K ∩ J
* ``component_weights`` each component pays the weights of the targets it contains
* ``derived``           negation, scaling, sums and differences of the above

Generator flavors know how to transfer themselves to a refined model.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .errors import CapacityError, ExtArithmeticError, InputError, ResolutionError
from .extreal import (
    INF,
    NEG_INF,
    ExtValue,
    Infinity,
    ext_sum,
    format_value,
    normalize,
    parse_value,
)
from .report import Check, Report, region_json
from .topology import BUDGET, Region, SpaceModel, bits, popcount, refine, region_key

EXHAUSTIVE_LIMIT = 12


class CompactSetFunction:
    flavor = "abstract"
    generator = False

    def __init__(self, space: SpaceModel):
        self.space = space
        self._memo: dict[int, ExtValue] = {}

    def _eval(self, mask: int) -> ExtValue:
        raise NotImplementedError

    def value(self, mask: int) -> ExtValue:
        """Evaluate on a compact mask without re-checking compactness."""
        v = self._memo.get(mask)
        if v is None:
            v = normalize(self._eval(mask))
            self._memo[mask] = v
        return v

    def __call__(self, K) -> ExtValue:
        mask = self.space.mask(K)
        if not self.space.is_compact(mask):
            raise InputError(f"{self.space.labels(mask)} is not compact")
        return self.value(mask)

    def descriptor(self) -> dict:
        raise NotImplementedError

    def refined(self) -> tuple["CompactSetFunction", Callable[[int], int]]:
        raise ResolutionError(f"{self.flavor} functions have no geometric refinement")

    @property
    def refinable(self) -> bool:
        return False

    def infinity_signs(self) -> set[int]:
        signs = set()
        for K in self.space.compacts():
            v = self.value(K)
            if isinstance(v, Infinity):
                signs.add(v.sign)
        return signs

    @property
    def one_sided(self) -> str:
        """'finite', '+inf' or '-inf': which infinity the function attains."""
        s = self.infinity_signs()
        if len(s) == 2:
            raise ExtArithmeticError("function attains both +inf and -inf")
        if not s:
            return "finite"
        return "+inf" if 1 in s else "-inf"

    def __repr__(self) -> str:
        return f"<{self.flavor} on {self.space!r}>"


def evaluate(lam: CompactSetFunction, K) -> ExtValue:
    return lam(K)


def _masks(space: SpaceModel, regions) -> list[int]:
    return [space.mask(r) for r in regions]


def _components_containing(space: SpaceModel, mask: int, targets: list[int]) -> list[int]:
    return [c for c in space.components(mask) if any(not t & ~c for t in targets)]


class TableFunction(CompactSetFunction):
    flavor = "table"

    def __init__(self, space: SpaceModel, entries: dict):
        super().__init__(space)
        table: dict[int, ExtValue] = {}
        for k, v in entries.items():
            m = space.mask(k) if not isinstance(k, int) else space.check_mask(k)
            if not space.is_compact(m):
                raise InputError(f"table key {space.labels(m)} is not compact")
            table[m] = parse_value(v)
        missing = [m for m in space.compacts() if m not in table]
        if missing:
            raise InputError(f"table misses {len(missing)} compact regions, "
                             f"first {space.labels(missing[0])}")
        self.table = table
        if len(self.infinity_signs()) == 2:
            raise ExtArithmeticError("table attains both +inf and -inf")

    def _eval(self, mask: int) -> ExtValue:
        return self.table[mask]

    def descriptor(self) -> dict:
        return {"flavor": "table",
                "entries": [[list(bits(m)), format_value(self.table[m])]
                            for m in self.space.compacts()]}


class CellSum(CompactSetFunction):
    """λ(K) = Σ_{c∈K} w(c); signed weights allowed (at most one infinity sign)."""

    flavor = "cell_sum"
    generator = True

    def __init__(self, space: SpaceModel, weights: list, name: str = "weighted"):
        super().__init__(space)
        if len(weights) != space.n:
            raise InputError("need one weight per cell")
        self.weights = [parse_value(w) for w in weights]
        signs = {w.sign for w in self.weights if isinstance(w, Infinity)}
        if len(signs) == 2:
            raise ExtArithmeticError("weights mix +inf and -inf")
        self.name = name

    def _eval(self, mask: int) -> ExtValue:
        return ext_sum(self.weights[i] for i in bits(mask))

    @property
    def nonnegative(self) -> bool:
        return all(w >= 0 for w in self.weights)

    def descriptor(self) -> dict:
        return {"flavor": "cell_sum", "name": self.name,
                "weights": {str(i): format_value(w) for i, w in enumerate(self.weights) if w != 0}}

    @property
    def refinable(self) -> bool:
        return self.space.kind in ("grid1d", "grid2d", "discrete")

    def refined(self):
        fine, transfer = refine(self.space)
        w: list[ExtValue] = [0] * fine.n
        for i, c in enumerate(self.space.cells):
            subs = [j for j in bits(transfer(1 << i)) if fine.cells[j].dim == c.dim]
            for j in subs:
                x = self.weights[i]
                w[j] = x if isinstance(x, Infinity) else normalize(Fraction(x) / len(subs))
        return CellSum(fine, w, self.name), transfer


def cell_sum(space: SpaceModel, weights: dict, name: str = "weighted") -> CellSum:
    """Weights keyed by cell index or label; unlisted cells weigh 0."""
    w: list[ExtValue] = [0] * space.n
    for k, v in weights.items():
        if isinstance(k, str) and k.lstrip("-").isdigit():
            k = int(k)
        idx = space.by_label[k] if isinstance(k, str) else k
        if not isinstance(idx, int) or not 0 <= idx < space.n:
            raise InputError(f"invalid cell {k!r}")
        w[idx] = parse_value(v)
    return CellSum(space, w, name)


def lebesgue(space: SpaceModel) -> CellSum:
    """Length (1D) or area (2D) of the realization, exact in the grid step."""
    if space.kind not in ("grid1d", "grid2d"):
        raise InputError("lebesgue measure needs a grid model")
    top = 1 if space.kind == "grid1d" else 2
    r = space.resolution
    w = [normalize(r ** top) if c.dim == top else 0 for c in space.cells]
    return CellSum(space, w, "lebesgue")


def counting(space: SpaceModel, points) -> CellSum:
    pts = list(bits(space.mask(points)))
    if any(space.cells[p].dim for p in pts):
        raise InputError("counting measure needs 0-cells")
    return CellSum(space, [1 if i in pts else 0 for i in range(space.n)], "counting")


def point_mass(space: SpaceModel, point) -> CellSum:
    m = space.mask([point])
    return CellSum(space, [1 if m >> i & 1 else 0 for i in range(space.n)], "point_mass")


def _check_family(space: SpaceModel, family: list[int], allow_unbounded: bool) -> None:
    seen = 0
    for E in family:
        if not E:
            raise InputError("family members must be nonempty")
        if not space.is_connected_mask(E):
            raise InputError(f"family member {space.labels(E)} is not connected")
        if E & seen:
            raise InputError("family members must be pairwise disjoint")
        if not allow_unbounded and not space.is_bounded(E):
            raise InputError(f"family member {space.labels(E)} is unbounded")
        seen |= E


class SolidIndicator(CompactSetFunction):
    flavor = "solid_indicator"
    generator = True

    def __init__(self, space: SpaceModel, D):
        super().__init__(space)
        self.D = space.mask(D)
        if not space.is_compact(self.D) or not space.is_connected_mask(self.D):
            raise InputError("D must be a nonempty connected compact region")

    def _eval(self, mask: int) -> ExtValue:
        return 1 if not self.D & ~mask else 0

    def descriptor(self) -> dict:
        return {"flavor": "solid_indicator", "D": list(bits(self.D))}

    @property
    def refinable(self) -> bool:
        return self.space.kind in ("grid1d", "grid2d")

    def refined(self):
        fine, transfer = refine(self.space)
        return SolidIndicator(fine, transfer(self.D)), transfer


class ComponentRule(CompactSetFunction):
    """Sum of λ₀ over the components of K that contain a family member."""

    flavor = "component_rule"
    generator = True

    def __init__(self, space: SpaceModel, family, base: CellSum, allow_unbounded: bool = False):
        super().__init__(space)
        self.family = _masks(space, family)
        _check_family(space, self.family, allow_unbounded)
        if base.space is not space:
            raise InputError("base functional lives on a different space")
        if not base.nonnegative:
            raise InputError("base functional must be nonnegative")
        self.base = base
        self.allow_unbounded = allow_unbounded

    def _eval(self, mask: int) -> ExtValue:
        return ext_sum(self.base.value(c)
                       for c in _components_containing(self.space, mask, self.family))

    @property
    def bounded_family(self) -> bool:
        return all(self.space.is_bounded(E) for E in self.family)

    def descriptor(self) -> dict:
        return {"flavor": "component_rule", "family": [list(bits(E)) for E in self.family],
                "base": self.base.descriptor(), "allow_unbounded": self.allow_unbounded}

    @property
    def refinable(self) -> bool:
        return self.space.kind in ("grid1d", "grid2d")

    def refined(self):
        base, transfer = self.base.refined()
        fam = [transfer(E) for E in self.family]
        return ComponentRule(base.space, fam, base, self.allow_unbounded), transfer


class PointCounting(CompactSetFunction):
    """λ(K) = Σ_{p ∈ K∩J} w(p); additive weights on subsets of a finite J."""

    flavor = "point_counting"
    generator = True

    def __init__(self, space: SpaceModel, weights: dict):
        super().__init__(space)
        w: dict[int, ExtValue] = {}
        for k, v in weights.items():
            if isinstance(k, str) and k.isdigit():
                k = int(k)
            idx = space.by_label[k] if isinstance(k, str) else k
            if not isinstance(idx, int) or not 0 <= idx < space.n or space.cells[idx].dim:
                raise InputError(f"J must consist of 0-cells, got {k!r}")
            w[idx] = parse_value(v)
        if not w:
            raise InputError("J must be nonempty")
        if len({x.sign for x in w.values() if isinstance(x, Infinity)}) == 2:
            raise ExtArithmeticError("weights mix +inf and -inf")
        self.weights = dict(sorted(w.items()))
        self.J = sum(1 << p for p in w)

    def _eval(self, mask: int) -> ExtValue:
        return ext_sum(self.weights[p] for p in bits(mask & self.J))

    def descriptor(self) -> dict:
        return {"flavor": "point_counting",
                "weights": {str(p): format_value(v) for p, v in self.weights.items()}}

    @property
    def refinable(self) -> bool:
        return self.space.kind in ("grid1d", "grid2d")

    def refined(self):
        fine, transfer = refine(self.space)
        return PointCounting(fine, {transfer(1 << p).bit_length() - 1: v
                                    for p, v in self.weights.items()}), transfer


class ComponentWeights(CompactSetFunction):
    """Each component of K pays w_E for every target E it contains."""

    flavor = "component_weights"
    generator = True

    def __init__(self, space: SpaceModel, targets):
        super().__init__(space)
        self.targets = []
        for region, w in targets:
            m = space.mask(region)
            if not m or not space.is_connected_mask(m):
                raise InputError("targets must be nonempty and connected")
            self.targets.append((m, parse_value(w)))
        if len({w.sign for _, w in self.targets if isinstance(w, Infinity)}) == 2:
            raise ExtArithmeticError("target weights mix +inf and -inf")

    def _eval(self, mask: int) -> ExtValue:
        total: ExtValue = 0
        for c in self.space.components(mask):
            for E, w in self.targets:
                if not E & ~c:
                    total = total + w
        return total

    def descriptor(self) -> dict:
        return {"flavor": "component_weights",
                "targets": [[list(bits(E)), format_value(w)] for E, w in self.targets]}

    @property
    def refinable(self) -> bool:
        return self.space.kind in ("grid1d", "grid2d")

    def refined(self):
        fine, transfer = refine(self.space)
        return ComponentWeights(fine, [(transfer(E), w) for E, w in self.targets]), transfer


class FunctionOnCompacts(CompactSetFunction):
    """Wrap a callable mask -> value (used for restrictions of DTMs)."""

    flavor = "derived"

    def __init__(self, space: SpaceModel, fn: Callable[[int], ExtValue], tag: str):
        super().__init__(space)
        self._fn = fn
        self.tag = tag

    def _eval(self, mask: int) -> ExtValue:
        return self._fn(mask)

    def descriptor(self) -> dict:
        return {"flavor": "table", "tag": self.tag,
                "entries": [[list(bits(m)), format_value(self.value(m))]
                            for m in self.space.compacts()]}


class Combined(CompactSetFunction):
    flavor = "derived"

    def __init__(self, op: str, lam: CompactSetFunction, other: CompactSetFunction | None,
                 b: Fraction | int | None):
        super().__init__(lam.space)
        self.op, self.lam, self.other, self.b = op, lam, other, b

    def _eval(self, mask: int) -> ExtValue:
        x = self.lam.value(mask)
        if self.op == "negate":
            return -x
        if self.op == "scale":
            return x * self.b
        y = self.other.value(mask)
        return x + y if self.op == "add" else x + (-y)

    def descriptor(self) -> dict:
        d = {"flavor": "derived", "op": self.op, "of": self.lam.descriptor()}
        if self.other is not None:
            d["other"] = self.other.descriptor()
        if self.b is not None:
            d["b"] = format_value(self.b)
        return d

    @property
    def refinable(self) -> bool:
        return self.lam.refinable and (self.other is None or self.other.refinable)

    def refined(self):
        lam, transfer = self.lam.refined()
        other = self.other.refined()[0] if self.other is not None else None
        return Combined(self.op, lam, other, self.b), transfer


def combine(op: str, lam: CompactSetFunction, other: CompactSetFunction | None = None,
            b=None) -> CompactSetFunction:
    """``negate``, ``scale`` (by rational b), ``add`` or ``sub``."""
    if op == "negate":
        return Combined("negate", lam, None, None)
    if op == "scale":
        if b is None:
            raise InputError("scale needs b")
        b = parse_value(b)
        if isinstance(b, Infinity):
            raise InputError("scale factor must be finite")
        return Combined("scale", lam, None, b)
    if op in ("add", "sub"):
        if other is None or other.space is not lam.space:
            raise InputError(f"{op} needs a second function on the same space")
        out = Combined(op, lam, other, None)
        out.infinity_signs()  # raises on +inf + -inf at some compact
        return out
    raise InputError(f"unknown combine op {op!r}")


def random_ideal(space: SpaceModel, rng: random.Random, within: int | None = None) -> int:
    within = space.noncollar_mask if within is None else within & space.noncollar_mask
    pick = 0
    for i in bits(within):
        if rng.random() < 0.5:
            pick |= 1 << i
    return space.core(pick)


def check_compact_additivity(lam: CompactSetFunction, seed: int = 0, samples: int = 4000,
                             sampling: bool = True, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
                             budget: int = BUDGET) -> Report:
    """λ(C ⊔ K) = λ(C) + λ(K) over disjoint compact pairs."""
    sp = lam.space
    rep = Report("compact additivity")
    chk = rep.add(Check("additive_on_compacts",
                        "λ(C ⊔ K) = λ(C) + λ(K) for disjoint compacts C, K"))
    nc = popcount(sp.noncollar_mask)
    if nc <= exhaustive_limit:
        comps = sp.compacts()
        pairs = ((C, K) for a, C in enumerate(comps) for K in comps[a:] if not C & K)
        chk.data["mode"] = "exhaustive"
    elif sampling:
        rng = random.Random(seed)
        if nc <= budget:
            comps = sp.compacts()
            draw = lambda: rng.choice(comps)  # noqa: E731
        else:
            draw = lambda: random_ideal(sp, rng)  # noqa: E731

        def gen():
            for _ in range(samples):
                C = draw()
                yield C, random_ideal(sp, rng, sp.full & ~C)
        pairs = gen()
        chk.data.update(mode="sampled", seed=seed, samples=samples)
    else:
        raise CapacityError(f"{nc} non-collar cells exceed the exhaustive limit "
                            f"{exhaustive_limit}; enable sampling", count=nc)
    for C, K in pairs:
        chk.checked += 1
        try:
            lhs = lam.value(C | K)
            rhs = lam.value(C) + lam.value(K)
        except ExtArithmeticError:
            chk.fail({"C": region_json(sp, C), "K": region_json(sp, K), "reason": "inf-inf"})
            continue
        if lhs != rhs:
            chk.fail({"C": region_json(sp, C), "K": region_json(sp, K),
                      "lhs": lhs, "rhs": normalize(rhs)})
    return rep


# -- descriptors ------------------------------------------------------------

def _region_arg(space: SpaceModel, raw):
    if isinstance(raw, (list, tuple)):
        return list(raw)
    raise InputError(f"region must be a list of cell indices or labels, got {raw!r}")


def base_from_descriptor(space: SpaceModel, desc: dict) -> CellSum:
    kind = desc.get("kind", desc.get("name"))
    if kind == "lebesgue":
        return lebesgue(space)
    if kind == "counting":
        return counting(space, _region_arg(space, desc.get("points")))
    if kind == "point_mass":
        return point_mass(space, desc.get("point"))
    if kind in ("weighted", "cell_sum"):
        return cell_sum(space, desc.get("weights", {}))
    raise InputError(f"unknown base functional {kind!r}")


def from_descriptor(space: SpaceModel, desc: dict) -> CompactSetFunction:
    """Build a set function from its JSON descriptor."""
    if not isinstance(desc, dict) or "flavor" not in desc:
        raise InputError("set-function descriptor needs a 'flavor'")
    fl = desc["flavor"]
    if fl == "table":
        entries = desc.get("entries")
        if not isinstance(entries, list):
            raise InputError("table 'entries' must be a list of [cells, value] pairs")
        table = {}
        for item in entries:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise InputError("table entries are [cells, value] pairs")
            table[space.mask(item[0])] = item[1]
        return TableFunction(space, table)
    if fl in ("cell_sum", "singletons"):
        key = "weights" if "weights" in desc else "values"
        return cell_sum(space, desc.get(key, {}), desc.get("name", "weighted"))
    if fl == "solid_indicator":
        return SolidIndicator(space, _region_arg(space, desc.get("D")))
    if fl == "component_rule":
        fam = [_region_arg(space, E) for E in desc.get("family", [])]
        return ComponentRule(space, fam, base_from_descriptor(space, desc.get("base", {})),
                             bool(desc.get("allow_unbounded", False)))
    if fl == "point_counting":
        return PointCounting(space, desc.get("weights", {}))
    if fl == "component_weights":
        return ComponentWeights(space, [(_region_arg(space, r), w)
                                        for r, w in desc.get("targets", [])])
    if fl == "derived":
        lam = from_descriptor(space, desc["of"])
        other = from_descriptor(space, desc["other"]) if "other" in desc else None
        return combine(desc["op"], lam, other, desc.get("b"))
    raise InputError(f"unknown flavor {fl!r}")


__all__ = [
    "CompactSetFunction", "TableFunction", "CellSum", "SolidIndicator", "ComponentRule",
    "PointCounting", "ComponentWeights", "FunctionOnCompacts", "Combined", "evaluate",
    "combine", "check_compact_additivity", "cell_sum", "lebesgue", "counting", "point_mass",
    "from_descriptor", "base_from_descriptor", "random_ideal", "INF", "NEG_INF", "Region",
    "region_key",
]
