"""Glued pairs of pants: construction, validation, holonomy, skeleton.

Geometry lives in the upper half-plane. Every cuff slot of a pants owns a
"slot chart" in which that cuff's lift is the imaginary axis, the positive
cuff direction points up, the pants interior is the left half-plane, and
the slot's anchor point sits at i. Seam-transport matrices express one slot
chart inside another; gluings are half-turns composed with a shear by
twist * length. Surface orientation is counterclockwise throughout
(boundary traversal keeps the interior on the left).
"""

import json
import math
from dataclasses import dataclass

from . import _matrix as mat
from ._tol import eps
from .errors import DisconnectedError, DomainError, LamtrackError
from .hyp_trig import hexagon_orthogeodesic, safe_acosh

# Frozen sign conventions for the boundary-product relation X0*X1*X2 = +-I
# (slot order), found once by scripts/calibrate.py and locked by regression
# tests. Cusped pants solve their parabolic slots from the same relation.
PANTS_RELATION_SIGNS = (1, 1, 1)
CUSP1_SIGNS = (1, 1)


class Cusp:
    """Sentinel slot value for a cusp (no boundary length)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CUSP"


CUSP = Cusp()


@dataclass(frozen=True)
class Cuff:
    length: float

    def __post_init__(self):
        if not (self.length > 0):
            raise DomainError(f"cuff length must be positive, got {self.length}")


@dataclass(frozen=True)
class PairOfPants:
    id: int
    slots: tuple

    def __post_init__(self):
        if len(self.slots) != 3:
            raise DomainError("a pants has exactly 3 boundary slots")
        n_cusps = sum(1 for s in self.slots if s is CUSP)
        if n_cusps > 2:
            raise DomainError("at most 2 cusps per pants")
        for s in self.slots:
            if s is not CUSP and not isinstance(s, Cuff):
                raise DomainError(f"slot must be Cuff or CUSP, got {s!r}")

    def cuff_slots(self):
        return [k for k, s in enumerate(self.slots) if isinstance(s, Cuff)]

    def cusp_slots(self):
        return [k for k, s in enumerate(self.slots) if s is CUSP]


@dataclass(frozen=True)
class Gluing:
    a: tuple  # (pants_id, slot)
    b: tuple  # (pants_id, slot)
    twist: float  # fraction of the cuff length, right-positive


@dataclass
class PantsDecomposition:
    pants: list
    gluings: list

    def __post_init__(self):
        ids = [p.id for p in self.pants]
        if len(set(ids)) != len(ids):
            raise DomainError("duplicate pants ids")
        self._by_id = {p.id: p for p in self.pants}
        used = set()
        for g in self.gluings:
            if g.a == g.b:
                raise DomainError("a slot cannot be glued to itself")
            for end in (g.a, g.b):
                pid, slot = end
                if pid not in self._by_id:
                    raise DomainError(f"gluing references unknown pants {pid}")
                if slot not in (0, 1, 2):
                    raise DomainError(f"bad slot index {slot}")
                if not isinstance(self._by_id[pid].slots[slot], Cuff):
                    raise DomainError(f"glued slot {end} is not a cuff")
                if end in used:
                    raise DomainError(f"slot {end} glued twice")
                used.add(end)
            la = self._by_id[g.a[0]].slots[g.a[1]].length
            lb = self._by_id[g.b[0]].slots[g.b[1]].length
            if abs(la - lb) > eps():
                raise DomainError(
                    f"glued cuffs must have equal length ({la} vs {lb})"
                )

    def pants_by_id(self, pid: int):
        return self._by_id.get(pid)

    def gluing_of_slot(self, pid: int, slot: int):
        """Return (gluing_index, side) for a glued slot, else None."""
        for k, g in enumerate(self.gluings):
            if g.a == (pid, slot):
                return k, "a"
            if g.b == (pid, slot):
                return k, "b"
        return None

    def cuff_id(self, pid: int, slot: int) -> str:
        hit = self.gluing_of_slot(pid, slot)
        if hit is None:
            return f"b{pid}s{slot}"
        return f"g{hit[0]}"

    def cuff_length(self, pid: int, slot: int) -> float:
        s = self._by_id[pid].slots[slot]
        if not isinstance(s, Cuff):
            raise DomainError(f"slot ({pid},{slot}) is not a cuff")
        return s.length

    def all_cuffs(self):
        """Yield (cuff_id, [(pid, slot) sides], length) for every cuff."""
        seen = set()
        for p in self.pants:
            for k in p.cuff_slots():
                cid = self.cuff_id(p.id, k)
                if cid in seen:
                    continue
                seen.add(cid)
                hit = self.gluing_of_slot(p.id, k)
                if hit is None:
                    yield cid, [(p.id, k)], p.slots[k].length
                else:
                    g = self.gluings[hit[0]]
                    yield cid, [g.a, g.b], p.slots[k].length


# ---------------------------------------------------------------------------
# JSON serialization (schema is part of the public interface)

def to_json_dict(pd: PantsDecomposition) -> dict:
    pants = []
    for p in pd.pants:
        slots = []
        for s in p.slots:
            slots.append("cusp" if s is CUSP else {"cuff": s.length})
        pants.append({"id": p.id, "slots": slots})
    gluings = [
        {"a": list(g.a), "b": list(g.b), "twist": g.twist} for g in pd.gluings
    ]
    return {"pants": pants, "gluings": gluings}


def from_json_dict(data: dict) -> PantsDecomposition:
    try:
        pants = []
        for p in data["pants"]:
            slots = []
            for s in p["slots"]:
                if s == "cusp":
                    slots.append(CUSP)
                else:
                    slots.append(Cuff(float(s["cuff"])))
            pants.append(PairOfPants(int(p["id"]), tuple(slots)))
        gluings = [
            Gluing(
                (int(g["a"][0]), int(g["a"][1])),
                (int(g["b"][0]), int(g["b"][1])),
                float(g["twist"]),
            )
            for g in data.get("gluings", [])
        ]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise DomainError(f"malformed surface JSON: {exc}") from exc
    return PantsDecomposition(pants, gluings)


def dumps(pd: PantsDecomposition) -> str:
    return json.dumps(to_json_dict(pd), sort_keys=True)


def loads(text: str) -> PantsDecomposition:
    return from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Example families

DEFAULT_CUFF_LENGTH = 2.0 * math.acosh(2.0)


def build_example(kind: str, depth: int, cuff_length: float = DEFAULT_CUFF_LENGTH,
                  twist: float = 0.0) -> PantsDecomposition:
    """Assemble a standard test surface.

    kind 'tree': finite rooted tree of three-cuff pants (root glues all
    three slots at depth >= 2, inner pants glue slots 1 and 2 to children).
    kind 'ladder': two rails of pants joined by rungs, four loose rail ends.
    kind 'flute': a chain of one-cusp pants glued end to end.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    c = Cuff(cuff_length)
    pants = []
    gluings = []
    if kind == "tree":
        pants.append(PairOfPants(0, (c, c, c)))
        frontier = [(0, [0, 1, 2])]  # (pid, open slots)
        next_id = 1
        for level in range(1, depth):
            new_frontier = []
            for pid, open_slots in frontier:
                for slot in open_slots:
                    child = next_id
                    next_id += 1
                    pants.append(PairOfPants(child, (c, c, c)))
                    gluings.append(Gluing((pid, slot), (child, 0), twist))
                    new_frontier.append((child, [1, 2]))
            frontier = new_frontier
    elif kind == "ladder":
        for i in range(depth):
            pants.append(PairOfPants(2 * i, (c, c, c)))
            pants.append(PairOfPants(2 * i + 1, (c, c, c)))
        for i in range(depth):
            gluings.append(Gluing((2 * i, 0), (2 * i + 1, 0), twist))
        for i in range(depth - 1):
            gluings.append(Gluing((2 * i, 2), (2 * (i + 1), 1), twist))
            gluings.append(Gluing((2 * i + 1, 2), (2 * (i + 1) + 1, 1), twist))
    elif kind == "flute":
        for i in range(depth):
            pants.append(PairOfPants(i, (c, c, CUSP)))
        for i in range(depth - 1):
            gluings.append(Gluing((i, 1), (i + 1, 0), twist))
    else:
        raise DomainError(f"unknown example kind {kind!r}")
    return PantsDecomposition(pants, gluings)


def validate_bounded(pd: PantsDecomposition, M: float) -> bool:
    """True iff every cuff length lies in [1/M, M]."""
    if M <= 0:
        raise DomainError("bound must be positive")
    lo, hi = 1.0 / M, M
    for p in pd.pants:
        for k in p.cuff_slots():
            length = p.slots[k].length
            if length < lo - eps() or length > hi + eps():
                return False
    return True


# ---------------------------------------------------------------------------
# Per-pants geometry

def _parabolic_pin(length: float):
    """Parabolic around the first cusp of a one-cuff pants, in the cuff chart.

    Unipotent with fixed point -e^{l/4}; chosen so that the product with the
    cuff translation T(l) has trace exactly -2 and the self-seam's foot on
    the cuff lies at the anchor.
    """
    x = -math.exp(length / 4.0)
    mu = (1.0 / math.tanh(length / 4.0)) * math.exp(-length / 4.0)
    return (1.0 + mu * x, -mu * x * x, mu, 1.0 - mu * x)


def _perp_to_axis(e1: float, e2: float):
    """Perpendicular data between the imaginary axis and geodesic (e1, e2).

    Requires e1*e2 > 0 (disjoint from the axis). Returns (distance,
    axis_foot_offset): the common perpendicular meets the axis at
    i * exp(axis_foot_offset).
    """
    if e1 * e2 <= 0:
        raise DomainError("geodesic endpoints must lie on one side of 0")
    p, q = abs(e1), abs(e2)
    if p > q:
        p, q = q, p
    cosh_d = (q + p) / (q - p)
    return math.acosh(cosh_d), 0.5 * math.log(p * q)


def _perp_feet(e1: float, e2: float):
    """Both feet of the perpendicular from the axis to geodesic (e1, e2).

    Returns (axis_foot point, other_foot point) as complex numbers.
    """
    _, off = _perp_to_axis(e1, e2)
    r = math.exp(off)
    c = 0.5 * (e1 + e2)
    rho = 0.5 * abs(e2 - e1)
    cos_t = (r * r - c * c - rho * rho) / (2.0 * c * rho)
    cos_t = max(-1.0, min(1.0, cos_t))
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    foot_other = complex(c + rho * cos_t, rho * sin_t)
    return complex(0.0, r), foot_other


@dataclass
class SkeletonArc:
    name: str
    pants_id: int
    ends: tuple  # ((slot, offset), (slot, offset)) in each slot's own chart
    length: float


@dataclass
class PantsGeometry:
    """Derived geometric data for a single pants (slot charts and seams)."""

    pants: PairOfPants
    kind: str  # 'cuffs3' | 'cusp1' | 'cusp2'
    half: dict  # cuff slot -> half length
    arcs: list  # SkeletonArc
    feet: dict  # cuff slot -> sorted [(offset, label)]
    to_ref: dict  # cuff slot -> matrix: slot chart -> reference chart
    ref_slot: int
    boundary: list  # [X0, X1, X2] in reference chart, relation-ready
    relation_sign: float  # boundary product equals this times identity


def _seam_matrix_next(u: float, x_next: float):
    """Transport into the next slot chart: S_{i -> i+1}."""
    return mat.chain(mat.rot(math.pi / 2), mat.trans(u), mat.rot(math.pi / 2),
                     mat.sl2_inv(mat.trans(x_next)))


def _seam_matrix_skip(x_here: float, u: float):
    """Transport into the slot-after-next chart: S_{i -> i+2}."""
    return mat.chain(mat.trans(x_here), mat.rot(math.pi / 2), mat.trans(u),
                     mat.rot(math.pi / 2))


def _geometry_cuffs3(p: PairOfPants) -> PantsGeometry:
    lengths = [p.slots[k].length for k in range(3)]
    x = [0.5 * v for v in lengths]
    u = {}
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        u[(i, j)] = hexagon_orthogeodesic(x[i], x[j], x[k])
    s_next = {i: _seam_matrix_next(u[(i, (i + 1) % 3)], x[(i + 1) % 3])
              for i in range(3)}
    s_skip = {i: _seam_matrix_skip(x[i], u[((i + 2) % 3, i)]) for i in range(3)}
    to_ref = {0: mat.IDENT, 1: s_next[0], 2: s_skip[0]}
    arcs = []
    feet = {i: [] for i in range(3)}
    for i in range(3):
        j = (i + 1) % 3
        arcs.append(SkeletonArc(
            f"seam{i}{j}", p.id, ((i, 0.0), (j, x[j])), u[(i, j)]))
        feet[i].append((0.0, f"seam{i}{j}"))
        feet[j].append((x[j], f"seam{i}{j}"))
    for i in range(3):
        feet[i].sort()
    boundary = []
    for slot in range(3):
        sgn = PANTS_RELATION_SIGNS[slot]
        c = to_ref[slot]
        boundary.append(
            mat.chain(c, mat.trans(sgn * lengths[slot]), mat.sl2_inv(c)))
    prod = mat.chain(*boundary)
    sign = 1.0 if prod[0] > 0 else -1.0
    return PantsGeometry(p, "cuffs3", {i: x[i] for i in range(3)}, arcs, feet,
                         to_ref, 0, boundary, sign)


def _geometry_cusp1(p: PairOfPants) -> PantsGeometry:
    cuffs = p.cuff_slots()
    sp, sq = cuffs[0], cuffs[1]
    lp, lq = p.slots[sp].length, p.slots[sq].length
    xp, xq = 0.5 * lp, 0.5 * lq
    num = 1.0 + math.cosh(xp) * math.cosh(xq)
    den = math.sinh(xp) * math.sinh(xq)
    u_pq = safe_acosh(num / den)
    s_pq = mat.chain(mat.rot(math.pi / 2), mat.trans(u_pq),
                     mat.rot(math.pi / 2))
    to_ref = {sp: mat.IDENT, sq: s_pq}
    xs = {
        sp: mat.trans(CUSP1_SIGNS[0] * lp),
        sq: mat.chain(s_pq, mat.trans(CUSP1_SIGNS[1] * lq), mat.sl2_inv(s_pq)),
    }
    cusp_slot = p.cusp_slots()[0]
    mats = dict(xs)
    _solve_relation_slot(mats, cusp_slot)
    boundary = [mats[0], mats[1], mats[2]]

    # self-seam around the cusp, from the lower-indexed cuff; its two feet
    # come out symmetric about the cuff midpoint
    para_m = mats[cusp_slot]
    e1 = _apply_real(para_m, 0.0)
    e2 = _apply_real(para_m, math.inf)
    d_self, off1 = _perp_to_axis(e1, e2)
    _, foot_other = _perp_feet(e1, e2)
    pulled = mat.apply_cplx(mat.sl2_inv(para_m), foot_other)
    off2 = math.log(abs(pulled))
    w1, w2 = sorted((off1 % lp, off2 % lp))
    arcs = [
        SkeletonArc(f"seam{sp}{sq}", p.id, ((sp, 0.0), (sq, 0.0)), u_pq),
        SkeletonArc(f"self{sp}", p.id, ((sp, w1), (sp, w2)), d_self),
    ]
    feet = {
        sp: sorted([(0.0, f"seam{sp}{sq}"), (w1, f"self{sp}"),
                    (w2, f"self{sp}")]),
        sq: [(0.0, f"seam{sp}{sq}")],
    }
    return PantsGeometry(p, "cusp1", {sp: xp, sq: xq}, arcs, feet, to_ref,
                         sp, boundary, 1.0)


def _solve_relation_slot(mats: dict, hole: int) -> None:
    """Fill mats[hole] so that mats[0] * mats[1] * mats[2] = identity."""
    left = mat.IDENT
    right = mat.IDENT
    for s in range(hole):
        left = mat.mul(left, mats[s])
    for s in range(hole + 1, 3):
        right = mat.mul(right, mats[s])
    mats[hole] = mat.chain(mat.sl2_inv(left), mat.sl2_inv(right))


def _geometry_cusp2(p: PairOfPants) -> PantsGeometry:
    k = p.cuff_slots()[0]
    length = p.slots[k].length
    c1, c2 = p.cusp_slots()
    pin = _parabolic_pin(length)
    x_cuff = mat.trans(length)
    mats = {k: x_cuff, c1: pin}
    _solve_relation_slot(mats, c2)
    boundary = [mats[0], mats[1], mats[2]]
    l_self = 2.0 * math.atanh(1.0 / math.cosh(length / 4.0))
    arcs = [SkeletonArc(f"self{k}", p.id, ((k, 0.0), (k, 0.5 * length)),
                        l_self)]
    feet = {k: [(0.0, f"self{k}"), (0.5 * length, f"self{k}")]}
    return PantsGeometry(p, "cusp2", {k: 0.5 * length}, arcs, feet,
                         {k: mat.IDENT}, k, boundary, 1.0)


def _apply_real(m, x: float) -> float:
    a, b, c, d = m
    if math.isinf(x):
        if c == 0:
            return math.inf
        return a / c
    den = c * x + d
    if den == 0:
        return math.inf
    return (a * x + b) / den


def pants_geometry(p: PairOfPants) -> PantsGeometry:
    n_cusps = len(p.cusp_slots())
    if n_cusps == 0:
        return _geometry_cuffs3(p)
    if n_cusps == 1:
        return _geometry_cusp1(p)
    return _geometry_cusp2(p)


# ---------------------------------------------------------------------------
# Global placement and holonomy

def gluing_map(length: float, twist: float):
    """Chart map from the far side's slot chart into the near side's.

    Half-turn about the anchor composed with a shear by twist * length;
    an involution up to sign, so the same matrix serves both directions.
    """
    return mat.mul(mat.trans(twist * length), mat.J)


@dataclass
class Placement:
    """Matrices locating every pants' reference chart in the global chart."""

    global_of: dict  # pants_id -> matrix
    tree_gluings: set  # indices of spanning-tree gluings
    geometries: dict  # pants_id -> PantsGeometry


def slot_chart_map(pl: Placement, pd: PantsDecomposition, pid: int,
                   slot: int):
    """Matrix mapping a cuff slot's chart into the global chart."""
    geo = pl.geometries[pid]
    return mat.mul(pl.global_of[pid], geo.to_ref[slot])


def place(pd: PantsDecomposition) -> Placement:
    geos = {p.id: pants_geometry(p) for p in pd.pants}
    if not pd.pants:
        raise DomainError("empty decomposition")
    root = pd.pants[0].id
    global_of = {root: mat.IDENT}
    tree = set()
    frontier = [root]
    adj = {}
    for idx, g in enumerate(pd.gluings):
        adj.setdefault(g.a[0], []).append((idx, g.a, g.b))
        adj.setdefault(g.b[0], []).append((idx, g.b, g.a))
    while frontier:
        pid = frontier.pop()
        for idx, near, far in adj.get(pid, []):
            fpid = far[0]
            if fpid in global_of:
                continue
            g = pd.gluings[idx]
            length = pd.cuff_length(*near)
            w = gluing_map(length, g.twist)
            near_chart = mat.mul(global_of[pid], geos[pid].to_ref[near[1]])
            far_geo = geos[fpid]
            global_of[fpid] = mat.unit_det(mat.chain(
                near_chart, w, mat.sl2_inv(far_geo.to_ref[far[1]])))
            tree.add(idx)
            frontier.append(fpid)
    if len(global_of) != len(pd.pants):
        missing = [p.id for p in pd.pants if p.id not in global_of]
        raise DisconnectedError(f"pants {missing} not connected to the base")
    return Placement(global_of, tree, geos)


def holonomy(pd: PantsDecomposition) -> dict:
    """Generating set of the surface group, as det-1 matrices.

    Keys: 'cuff:{cuff_id}' for translation along each cuff, and
    'cycle:{gluing_index}' for each gluing outside the spanning tree.
    """
    pl = place(pd)
    gens = {}
    for cid, sides, length in pd.all_cuffs():
        pid, slot = sides[0]
        chart = slot_chart_map(pl, pd, pid, slot)
        gens[f"cuff:{cid}"] = mat.unit_det(
            mat.chain(chart, mat.trans(length), mat.sl2_inv(chart)))
    for idx, g in enumerate(pd.gluings):
        if idx in pl.tree_gluings:
            continue
        length = pd.cuff_length(*g.a)
        w = gluing_map(length, g.twist)
        near_chart = slot_chart_map(pl, pd, g.a[0], g.a[1])
        far_chart = slot_chart_map(pl, pd, g.b[0], g.b[1])
        gens[f"cycle:{idx}"] = mat.unit_det(
            mat.chain(near_chart, w, mat.sl2_inv(far_chart)))
    return gens


def pants_boundary_holonomies(pd: PantsDecomposition) -> dict:
    """Per pants, the three slot boundary matrices in the global chart.

    Their ordered product is plus or minus the identity; cuff slots have
    |trace| = 2 cosh(length/2) and cusp slots |trace| = 2.
    """
    pl = place(pd)
    out = {}
    for p in pd.pants:
        g = pl.global_of[p.id]
        ginv = mat.sl2_inv(g)
        out[p.id] = [mat.chain(g, x, ginv) for x in pl.geometries[p.id].boundary]
    return out


# ---------------------------------------------------------------------------
# Skeleton

@dataclass
class CuffSkeleton:
    cuff_id: str
    length: float
    basepoint: tuple  # (pants_id, slot) owning the anchor that is a_k
    sides: dict  # (pants_id, slot) -> {"feet": [...], "sub_arcs": [...]}


@dataclass
class Skeleton:
    arcs: list  # SkeletonArc for every pants
    cuffs: dict  # cuff_id -> CuffSkeleton
    empirical_m1: float


def skeleton(pd: PantsDecomposition) -> Skeleton:
    place(pd)  # connectivity check; geometry itself is per pants
    geos = {p.id: pants_geometry(p) for p in pd.pants}
    arcs = []
    for p in pd.pants:
        arcs.extend(geos[p.id].arcs)
    cuffs = {}
    side_lengths = []
    for cid, sides, length in pd.all_cuffs():
        side_data = {}
        for (pid, slot) in sides:
            feet = geos[pid].feet[slot]
            offs = sorted(o for o, _ in feet)
            subs = []
            for k in range(len(offs)):
                nxt = offs[(k + 1) % len(offs)]
                d = nxt - offs[k]
                if k == len(offs) - 1:
                    d += length
                subs.append(d)
            side_data[(pid, slot)] = {"feet": list(feet), "sub_arcs": subs}
            side_lengths.extend(subs)
        cuffs[cid] = CuffSkeleton(cid, length, sides[0], side_data)
    for arc in arcs:
        side_lengths.append(arc.length)
    m1 = 1.0
    for v in side_lengths:
        if v > 0:
            m1 = max(m1, v, 1.0 / v)
    return Skeleton(arcs, cuffs, m1)
