"""New DTMs from old: image under a cell map, restrictions to closed and open
subspaces, extension from a closed subspace, and the open and closed parts
μ_V and μ_F on the ambient space.

Every construction tabulates its defining formula on all admissible regions
and then runs ``check_dtm_axioms``; a failure raises ConsistencyError.  The
axiom report stays attached to the result as ``.axioms``.
"""
from __future__ import annotations

from typing import Sequence

from .dtm import DeficientTM, check_dtm_axioms, extend_from_compacts
from .errors import ConsistencyError, InputError
from .extreal import ExtValue, ext_min
from .report import Check, Report, region_json
from .setfn import FunctionOnCompacts
from .topology import SpaceModel, bits, discrete
from .variation import sub_ideal_max

SMALL = 10


def _finish(space: SpaceModel, values: dict, provenance: str, outer: str) -> DeficientTM:
    rep = check_dtm_axioms(space, values, provenance, outer=outer)
    if rep.dtm is None:
        bad = rep.failures()[0]
        raise ConsistencyError(f"{provenance} fails {bad.name}", witness=bad.witnesses[:1])
    rep.dtm.axioms = rep
    return rep.dtm


def _lift(idx: Sequence[int], mask: int) -> int:
    out = 0
    for k in bits(mask):
        out |= 1 << idx[k]
    return out


def _pull(idx: Sequence[int], mask: int) -> int:
    out = 0
    for k, a in enumerate(idx):
        if mask >> a & 1:
            out |= 1 << k
    return out


# -- cell maps ---------------------------------------------------------------------

class CellMap:
    """A continuous closed map between models, given cell by cell.

    Continuity means faces go to faces (so preimages of closed sets are
    closed); closedness means the image of each closed cell is closed.
    """

    def __init__(self, source: SpaceModel, target: SpaceModel, assignment):
        self.source, self.target = source, target
        if isinstance(assignment, dict):
            assignment = [assignment[c.label] for c in source.cells]
        amap = []
        for a in assignment:
            amap.append(target.by_label[a] if isinstance(a, str) else a)
        if len(amap) != source.n or not all(isinstance(a, int) and 0 <= a < target.n for a in amap):
            raise InputError("a cell map assigns one target cell to each source cell")
        self.assignment = amap
        for i in range(source.n):
            fi = amap[i]
            for f in bits(source.down[i]):
                if not (amap[f] == fi or target.down[fi] >> amap[f] & 1):
                    raise InputError(
                        f"map is not continuous: face {source.cells[f].label} of "
                        f"{source.cells[i].label} does not land in the closure of its image")
            img = self.image((1 << i) | source.down[i])
            if not target.is_closed(img):
                raise InputError(
                    f"map is not closed: image of the closed cell {source.cells[i].label} "
                    "is not closed")

    def image(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.assignment[i]
        return out

    def preimage(self, mask: int) -> int:
        out = 0
        for i, a in enumerate(self.assignment):
            if mask >> a & 1:
                out |= 1 << i
        return out

    @classmethod
    def identity(cls, space: SpaceModel) -> "CellMap":
        return cls(space, space, list(range(space.n)))

    @classmethod
    def to_point(cls, space: SpaceModel) -> "CellMap":
        return cls(space, discrete(1, ["p"]), [0] * space.n)


def collapse_first_edge(space: SpaceModel) -> CellMap:
    """P_n -> P_{n-1} squeezing [v0, v1] to the new v0 and shifting the rest left."""
    from .topology import grid1d

    p = space.params
    if space.kind != "grid1d" or p["collar"] != "none" or p["size"][0] < 2:
        raise InputError("edge collapse needs a compact path with at least two edges")
    n = p["size"][0]
    target = grid1d(n - 1)
    amap = []
    for c in space.cells:
        t, i = c.key[0]
        if t == "v":
            j = max(i - 1, 0)
            amap.append(target.by_key[(("v", j),)])
        elif i == 0:
            amap.append(target.by_key[(("v", 0),)])
        else:
            amap.append(target.by_key[(("e", i - 1),)])
    return CellMap(space, target, amap)


def pushforward(nu: DeficientTM, f: CellMap) -> DeficientTM:
    """(ν∘f⁻¹)(A) = ν(f⁻¹(A))."""
    if f.source is not nu.space:
        raise InputError("map source differs from the DTM's space")
    Y = f.target
    vals = {A: nu.values[f.preimage(A)] for A in Y.admissible_sets()}
    return _finish(Y, vals, f"pushforward of {nu.provenance}", nu.outer)


# -- subspaces -----------------------------------------------------------------------

def restrict_to_closed(nu: DeficientTM, F) -> DeficientTM:
    """ν_F(A) = sup of ν over compacts of the ambient space inside A."""
    sp = nu.space
    F = sp.mask(F)
    sub, idx = sp.subspace(F, "closed")
    on_compacts = lambda K: nu.values[_lift(idx, K)]  # noqa: E731
    ext = extend_from_compacts(FunctionOnCompacts(sub, on_compacts, "restriction"), nu.outer)
    if not ext.exists:
        raise ConsistencyError("restriction fails the extension condition on the subspace",
                               witness=ext.witness.labels)
    vals = DeficientTM.from_compact_values(sub, on_compacts, "restriction", nu.outer).values
    out = _finish(sub, vals, f"{nu.provenance} restricted to closed {sp.labels(F)}", nu.outer)
    out.embedding = idx
    return out


def restrict_to_open_subspace(nu: DeficientTM, V) -> DeficientTM:
    """ν_V(W) = ν(W) on opens of V; closed G of V by the inf over opens of V around G."""
    sp = nu.space
    V = sp.mask(V)
    sub, idx = sp.subspace(V, "open")
    best = sub_ideal_max(sub, lambda K: nu.values[_lift(idx, K)])
    vals = {}
    for A in sub.admissible_sets():
        amb = _lift(idx, A)
        if sub.is_open(A):
            vals[A] = nu.values[amb]
        else:
            star = nu.values[sp.up_closure(amb)]
            vals[A] = ext_min(star, best[A & sub.noncollar_mask]) if nu.outer == "thin" else star
    out = _finish(sub, vals, f"{nu.provenance} restricted to open {sp.labels(V)}", nu.outer)
    out.embedding = idx
    return out


def embed_by_labels(X: SpaceModel, Y: SpaceModel) -> list[int]:
    try:
        return [Y.by_label[c.label] for c in X.cells]
    except KeyError as exc:
        raise InputError(f"cell {exc.args[0]} of the subspace is missing in the ambient model") \
            from None


def extend_from_closed_subspace(nu: DeficientTM, Y: SpaceModel,
                                embedding: Sequence[int] | None = None) -> DeficientTM:
    """ν₁(A) = ν(A ∩ X) for X embedded in Y as a closed subcomplex."""
    X = nu.space
    idx = list(embedding) if embedding is not None else embed_by_labels(X, Y)
    if len(set(idx)) != X.n:
        raise InputError("embedding must be injective")
    img = _lift(idx, X.full)
    if not Y.is_closed(img):
        raise InputError(f"image {Y.labels(img)} is not closed in the ambient model")
    for k in range(X.n):
        if Y.down[idx[k]] != _lift(idx, X.down[k]) or \
                Y.cells[idx[k]].collar != X.cells[k].collar:
            raise InputError(f"embedding does not preserve the faces of {X.cells[k].label}")
    vals = {A: nu.values[_pull(idx, A)] for A in Y.admissible_sets()}
    return _finish(Y, vals, f"{nu.provenance} extended by zero", nu.outer)


def with_extra_point(X: SpaceModel) -> tuple[SpaceModel, list[int]]:
    """X ⊔ {q}; X sits inside as a closed (and open) subcomplex."""
    Y, left, _ = X.disjoint_union(discrete(1, ["q"]))
    return Y, left


# -- parts -----------------------------------------------------------------------------

def open_part(mu: DeficientTM, V) -> DeficientTM:
    """μ_V(U) = μ(U ∩ V) on opens, outer regular on closed sets."""
    sp = mu.space
    V = sp.mask(V)
    if not sp.is_open(V):
        raise InputError(f"{sp.labels(V)} is not open")
    best = sub_ideal_max(sp, lambda K: mu.values[K])
    vals = {}
    for A in sp.admissible_sets():
        if sp.is_open(A):
            vals[A] = mu.values[A & V]
        else:
            star = mu.values[sp.up_closure(A) & V]
            vals[A] = ext_min(star, best[sp.core(A & V)]) if mu.outer == "thin" else star
    return _finish(sp, vals, f"open part of {mu.provenance} on {sp.labels(V)}", mu.outer)


def closed_part(mu: DeficientTM, F) -> DeficientTM:
    """μ_F(K) = μ(F ∩ K) on compacts, inner regular on opens, outer regular on closed sets."""
    sp = mu.space
    F = sp.mask(F)
    if not sp.is_closed(F):
        raise InputError(f"{sp.labels(F)} is not closed")
    vals = {}
    for A in sp.admissible_sets():
        if sp.is_open(A):
            vals[A] = mu.values[F & sp.core(A)]
        else:
            star = mu.values[F & sp.core(sp.up_closure(A))]
            thin = mu.values[F & A & sp.noncollar_mask]
            vals[A] = ext_min(star, thin) if mu.outer == "thin" else star
    return _finish(sp, vals, f"closed part of {mu.provenance} on {sp.labels(F)}", mu.outer)


def open_part_value(mu: DeficientTM, V: int, A: int, best=None) -> ExtValue:
    """μ_V(A) from the formula alone (no axiom check)."""
    sp = mu.space
    if sp.is_open(A):
        return mu.values[A & V]
    best = best or sub_ideal_max(sp, lambda K: mu.values[K])
    star = mu.values[sp.up_closure(A) & V]
    return ext_min(star, best[sp.core(A & V)]) if mu.outer == "thin" else star


def open_part_limit_check(mu: DeficientTM) -> Check:
    """μ(F ∩ C) = inf over opens V ⊇ F of μ_V(C), F closed, C compact (and C closed if F compact)."""
    sp = mu.space
    rj = lambda m: region_json(sp, m)  # noqa: E731
    c = Check("open_part_limit",
              "μ(F ∩ C) = inf{μ_V(C): V open ⊇ F} for closed F and compact C, and for "
              "closed C when F is compact")
    best = sub_ideal_max(sp, lambda K: mu.values[K])
    opens = sp.open_sets()
    cell_only_attains = True
    for F in sp.closed_sets():
        Cs = sp.closed_sets() if sp.is_compact(F) else sp.compacts()
        sups = [V for V in opens if not F & ~V]
        for C in Cs:
            c.checked += 1
            target = mu.values[F & C]
            cell_inf = min(open_part_value(mu, V, C, best) for V in sups)
            if mu.outer == "thin":
                # the thin neighbourhood N of F meets C in a set whose compacts lie in F ∩ C
                thin_val = best[sp.core(F & C)]
                inf = ext_min(cell_inf, thin_val)
            else:
                inf = cell_inf
            if inf != target:
                c.fail({"F": rj(F), "C": rj(C), "lhs": target, "inf": inf})
            if cell_inf != target:
                cell_only_attains = False
                c.data.setdefault("cell_open_gaps", 0)
                c.data["cell_open_gaps"] += 1
    c.data["cell_opens_attain"] = cell_only_attains
    return c


# -- suite ------------------------------------------------------------------------------

def _sample(seq: list[int], limit: int) -> list[int]:
    if len(seq) <= limit:
        return seq
    step = len(seq) / limit
    return [seq[int(k * step)] for k in range(limit)]


def construction_suite(nu: DeficientTM, limit: int = 12) -> Report:
    """Run every construction on ν with a spread of parameters and check the outputs."""
    from .classify import tm_test

    sp = nu.space
    rj = lambda m: region_json(sp, m)  # noqa: E731
    rep = Report(f"constructions ({nu.provenance})")
    small = sp.n <= SMALL
    closed = [F for F in sp.closed_sets() if F]
    opens = [V for V in sp.open_sets() if V]
    if not small:
        closed, opens = _sample(closed, limit), _sample(opens, limit)

    c = rep.add(Check("pushforward", "images under cell maps are DTMs with the same total mass; "
                      "TMs map to TMs"))
    maps = [("identity", CellMap.identity(sp)), ("to_point", CellMap.to_point(sp))]
    if sp.kind == "grid1d" and sp.params["collar"] == "none" and sp.params["size"][0] >= 2:
        maps.append(("collapse_first_edge", collapse_first_edge(sp)))
    src_tm = tm_test(nu).data["is_tm"]
    for name, f in maps:
        c.checked += 1
        img = pushforward(nu, f)
        if img.values[f.target.full] != nu.values[sp.full]:
            c.fail({"map": name, "reason": "total mass changed"})
        if name == "identity" and img.values != nu.values:
            c.fail({"map": name, "reason": "identity changed values"})
        if src_tm and not tm_test(img).data["is_tm"]:
            c.fail({"map": name, "reason": "image of a TM is not a TM"})
        c.data[name] = {"target_is_tm": tm_test(img).data["is_tm"]}

    c = rep.add(Check("restrict_to_closed", "ν_F is a DTM on F agreeing with ν on compacts of F"))
    for F in closed:
        c.checked += 1
        r = restrict_to_closed(nu, F)
        if any(r.values[K] != nu.values[_lift(r.embedding, K)] for K in r.space.compacts()):
            c.fail({"F": rj(F)})

    c = rep.add(Check("extend_from_closed_subspace",
                      "ν₁(A) = ν(A ∩ X) on X ⊔ {q} is a DTM with ν₁(Y) = ν(X)"))
    Y, emb = with_extra_point(sp)
    c.checked = 1
    e = extend_from_closed_subspace(nu, Y, emb)
    if e.values[Y.full] != nu.values[sp.full]:
        c.fail({"reason": "total mass changed"})

    c = rep.add(Check("restrict_to_open_subspace", "ν_V is a DTM on V with ν_V = ν on opens of V"))
    for V in opens:
        c.checked += 1
        r = restrict_to_open_subspace(nu, V)
        if any(r.values[W] != nu.values[_lift(r.embedding, W)] for W in r.space.open_sets()):
            c.fail({"V": rj(V)})

    c = rep.add(Check("open_part", "μ_V is a DTM, μ_X = μ, μ_V(F) = μ(F) for closed F ⊆ V, "
                      "and μ_V grows with V"))
    parts = {}
    for V in opens:
        c.checked += 1
        p = open_part(nu, V)
        parts[V] = p
        for F in sp.closed_sets():
            if not F & ~V and p.values[F] != nu.values[F]:
                c.fail({"V": rj(V), "F": rj(F)})
                break
    if parts.get(sp.full) is not None and parts[sp.full].values != nu.values:
        c.fail({"reason": "μ_X differs from μ"})
    for V in parts:
        for W in parts:
            if V != W and not V & ~W:
                if any(parts[V].values[A] > parts[W].values[A] for A in sp.admissible_sets()):
                    c.fail({"V": rj(V), "W": rj(W), "reason": "not monotone in V"})

    c = rep.add(Check("closed_part", "μ_F is a DTM with μ_F(K) = μ(F ∩ K), equal to μ(F ∩ C) on "
                      "closed C when F is compact, and growing with F"))
    cparts = {}
    for F in closed:
        c.checked += 1
        p = closed_part(nu, F)
        cparts[F] = p
        for K in sp.compacts():
            if p.values[K] != nu.values[F & K]:
                c.fail({"F": rj(F), "K": rj(K)})
                break
        if sp.is_compact(F):
            for C in sp.closed_sets():
                if p.values[C] != nu.values[F & C]:
                    c.fail({"F": rj(F), "C": rj(C)})
                    break
    for F in cparts:
        for G in cparts:
            if F != G and not F & ~G:
                if any(cparts[F].values[K] > cparts[G].values[K] for K in sp.compacts()):
                    c.fail({"F": rj(F), "G": rj(G), "reason": "not monotone in F"})

    if small:
        rep.add(open_part_limit_check(nu))
    rep.data["exhaustive"] = small
    return rep


__all__ = [
    "CellMap", "collapse_first_edge", "pushforward", "restrict_to_closed",
    "restrict_to_open_subspace", "embed_by_labels", "extend_from_closed_subspace",
    "with_extra_point", "open_part", "closed_part", "open_part_value", "open_part_limit_check",
    "construction_suite",
]
