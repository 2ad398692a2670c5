"""Geodesic lifts of carried paths.

Each switch of a train track gets a preferred lift to the upper half-plane
chart of the universal cover, and each directed branch gets the chart
transition between the preferred lifts of its endpoints.  Multiplying these
transitions along a train path locates the lift of the path that starts at
the preferred lift of its first switch; from that we get closed-path
holonomies, ideal endpoints of eventually periodic paths, and the carrier
boxes that pin down which complete geodesics run along a given span of the
track.

Boundary data lives on the circle at infinity.  Points are kept in
homogeneous coordinates so the cross-ratio behind the Liouville measure
needs no special case at infinity.
"""

import math
import weakref
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import _matrix as mat
from ._tol import eps
from .errors import (
    DegenerateBox,
    DomainError,
    MalformedTrack,
    NotCarried,
    NotSpanning,
    ParabolicOrElliptic,
)
from .surface import PantsDecomposition, gluing_map, place, slot_chart_map
from .traintrack import (
    EdgePath,
    TrainTrack,
    flip_directed,
    is_edge_path,
    split_directed,
)

_TWO_PI = 2.0 * math.pi

# Orientation of the two winding branch families.  Both are pinned by the
# complementary-region laws (disk regions have trivial holonomy, cusp
# regions are parabolic, rim regions match their cuff trace): flipping
# either sign breaks those laws on every surface that uses that family.
_LOOP_WIND = 1
_CUSP_WIND = 1


# ---------------------------------------------------------------------------
# boundary points and arcs


class IdealPoint:
    """Point on the circle at infinity, in homogeneous coordinates.

    A pair (w1, w2) stands for w1/w2 on the boundary of the upper
    half-plane, with (1, 0) the point at infinity.  Pairs are normalized to
    unit length with w2 >= 0, so equal points get equal coordinates up to
    rounding.  `chart` names the chart the coordinates refer to.
    """

    __slots__ = ("w1", "w2", "chart")

    def __init__(self, w1: float, w2: float, chart: str = "global"):
        n = math.hypot(w1, w2)
        if not (n > 0.0 and math.isfinite(n)):
            raise DomainError("ideal point needs a nonzero finite pair")
        w1, w2 = w1 / n, w2 / n
        if w2 < 0.0 or (w2 == 0.0 and w1 < 0.0):
            w1, w2 = -w1, -w2
        self.w1 = w1
        self.w2 = w2
        self.chart = chart

    @property
    def angle(self) -> float:
        """Boundary position, increasing with the real coordinate.

        Infinity sits at angle 0, the origin at pi; increasing angle walks
        the circle counterclockwise in the disk picture.
        """
        return (-2.0 * math.atan2(self.w2, self.w1)) % _TWO_PI

    @property
    def x(self) -> float:
        if self.w2 == 0.0:
            return math.inf
        return self.w1 / self.w2

    def apply(self, m) -> "IdealPoint":
        w = mat.apply_hom(m, (self.w1, self.w2))
        return IdealPoint(w[0], w[1], self.chart)

    def to_json_dict(self) -> dict:
        return {"chart": self.chart, "theta": self.angle}

    def __repr__(self):
        v = self.x
        return "IdealPoint(%s)" % ("inf" if math.isinf(v) else "%.6g" % v)


def point_from_real(x: float, chart: str = "global") -> IdealPoint:
    if math.isinf(x):
        return IdealPoint(1.0, 0.0, chart)
    return IdealPoint(x, 1.0, chart)


def boundary_point(theta: float, chart: str = "global") -> IdealPoint:
    """The boundary point sitting at the given circle angle."""
    t = -0.5 * theta
    return IdealPoint(math.cos(t), math.sin(t), chart)


def _wedge(p: IdealPoint, q: IdealPoint) -> float:
    return p.w1 * q.w2 - p.w2 * q.w1


def _ccw(a: float, b: float) -> float:
    return (b - a) % _TWO_PI


def _angle_in_arc(theta: float, start: float, end: float, tol: float) -> bool:
    """Whether an angle lies on the closed arc start->end (ccw), widened by
    tol (or shrunk, when tol is negative)."""
    span = _ccw(start, end)
    off = _ccw(start, theta)
    if off > _TWO_PI - max(tol, 0.0) - 1e-15:
        off -= _TWO_PI
    return -tol <= off <= span + tol


def smallest_arc_containing(points: Sequence[IdealPoint],
                            excluded: IdealPoint
                            ) -> Tuple[IdealPoint, IdealPoint]:
    """Shortest closed boundary arc holding every point but not `excluded`.

    Returns (start, end): the arc runs counterclockwise from start to end.
    The excluded point must not coincide with any of the points.
    """
    pts = list(points)
    if not pts:
        raise DomainError("no points to enclose")
    ex = excluded.angle
    if len(pts) == 1:
        if abs(_ccw(pts[0].angle, ex)) < 1e-15:
            raise DomainError("separating point coincides with the arc point")
        return pts[0], pts[0]
    items = sorted(((p.angle, i) for i, p in enumerate(pts)))
    n = len(items)
    for k in range(n):
        lo = items[k][0]
        hi = items[(k + 1) % n][0]
        gap = _ccw(lo, hi) if k + 1 < n else _ccw(lo, hi) or _TWO_PI
        off = _ccw(lo, ex)
        if 0.0 < off < gap:
            return pts[items[(k + 1) % n][1]], pts[items[k][1]]
    raise DomainError("separating point lies on the configuration")


@dataclass(frozen=True)
class LiftedGeodesic:
    """Complete geodesic recorded by its two ideal endpoints."""

    p: IdealPoint
    q: IdealPoint

    def crosses(self, other: "LiftedGeodesic", tol: float = 1e-9) -> bool:
        """Transverse intersection test: endpoints strictly interleave."""
        s = self.p.angle
        span = _ccw(s, self.q.angle)
        inside = 0
        for z in (other.p, other.q):
            off = _ccw(s, z.angle)
            if tol < off < span - tol:
                inside += 1
        return inside == 1

    def to_json_dict(self) -> dict:
        return [self.p.to_json_dict(), self.q.to_json_dict()]


class GeodesicBox:
    """Pair of disjoint closed boundary arcs I and J.

    The four corners run counterclockwise: I from i_start to i_end, then J
    from j_start to j_end.  A complete geodesic belongs to the box when one
    ideal endpoint lies on I and the other on J.
    """

    __slots__ = ("i_start", "i_end", "j_start", "j_end")

    def __init__(self, i_start: IdealPoint, i_end: IdealPoint,
                 j_start: IdealPoint, j_end: IdealPoint):
        charts = {p.chart for p in (i_start, i_end, j_start, j_end)}
        if len(charts) != 1:
            raise DomainError("box corners from different charts")
        a = i_start.angle
        db = _ccw(a, i_end.angle)
        dc = _ccw(a, j_start.angle)
        dd = _ccw(a, j_end.angle)
        if not (db <= dc + 1e-12 and dc <= dd + 1e-12):
            raise DomainError("box corners out of cyclic order")
        self.i_start = i_start
        self.i_end = i_end
        self.j_start = j_start
        self.j_end = j_end

    @property
    def chart(self) -> str:
        return self.i_start.chart

    def corners(self) -> Tuple[IdealPoint, ...]:
        return (self.i_start, self.i_end, self.j_start, self.j_end)

    def transformed(self, m) -> "GeodesicBox":
        return GeodesicBox(*(p.apply(m) for p in self.corners()))

    def rotated(self, delta: float) -> "GeodesicBox":
        return GeodesicBox(*(boundary_point(p.angle + delta, p.chart)
                             for p in self.corners()))

    def side_of(self, point: IdealPoint, tol: float = 0.0) -> Optional[str]:
        """"i", "j", or None, by which arc (widened by tol) holds the point."""
        th = point.angle
        if _angle_in_arc(th, self.i_start.angle, self.i_end.angle, tol):
            return "i"
        if _angle_in_arc(th, self.j_start.angle, self.j_end.angle, tol):
            return "j"
        return None

    def holds(self, g: LiftedGeodesic, tol: float = 0.0) -> bool:
        a = self.side_of(g.p, tol)
        b = self.side_of(g.q, tol)
        return (a == "i" and b == "j") or (a == "j" and b == "i")

    def classify(self, g: LiftedGeodesic, margin: float = 1e-12) -> str:
        """"in", "out", or "boundary" when the answer flips within margin."""
        if self.holds(g, -margin):
            return "in"
        if self.holds(g, margin):
            return "boundary"
        return "out"

    def to_json_dict(self) -> dict:
        return {
            "chart": self.chart,
            "i": [self.i_start.angle, self.i_end.angle],
            "j": [self.j_start.angle, self.j_end.angle],
        }


def box_from_angles(angles: Sequence[float], chart: str = "global"
                    ) -> GeodesicBox:
    if len(angles) != 4:
        raise DomainError("a box needs four corner angles")
    return GeodesicBox(*(boundary_point(t, chart) for t in angles))


def box_from_reals(i0: float, i1: float, j0: float, j1: float,
                   chart: str = "global") -> GeodesicBox:
    return GeodesicBox(point_from_real(i0, chart), point_from_real(i1, chart),
                       point_from_real(j0, chart), point_from_real(j1, chart))


def liouville(box: GeodesicBox) -> float:
    """Liouville measure of the set of geodesics joining I to J.

    Evaluated as the log of a boundary cross-ratio of the four corners; the
    homogeneous form is exactly invariant under chart changes.  Arcs that
    share a corner (or nearly so) have no finite measure and raise
    DegenerateBox.
    """
    a, b, c, d = box.corners()
    for u in (a, b):
        for v in (c, d):
            if abs(_wedge(u, v)) < 1e-13:
                raise DegenerateBox("box arcs meet near %r" % (v,))
    ratio = (_wedge(c, a) * _wedge(d, b)) / (_wedge(c, b) * _wedge(d, a))
    if ratio <= 0.0:
        raise DomainError("corners do not bound a geodesic box")
    return math.log(ratio)


# ---------------------------------------------------------------------------
# branch transitions over the universal cover


def _plan_layout(pants, ttype: str):
    """Slot attachment of every branch of a pants-level track piece.

    Returns (ends, gauges, wind): `ends` maps a branch name to its two
    attachment descriptors, ("s", slot) on a cuff switch or ("g", slot) at
    an inner switch anchored in that slot's chart; `gauges` maps inner
    switch names to their anchor slots; `wind` maps a branch name to the
    slot whose boundary transformation the branch picks up on its way
    around the back of the pants.
    """
    cuffs = pants.cuff_slots()
    cusps = pants.cusp_slots()
    if ttype == "pairwise":
        s0, s1, s2 = cuffs
        ends = {"c01": (("s", s0), ("s", s1)),
                "c12": (("s", s1), ("s", s2)),
                "c20": (("s", s2), ("s", s0))}
        return ends, {}, {}
    if ttype in ("loopP", "loopQ"):
        lo, hi = cuffs
        stem = lo if ttype == "loopP" else hi
        ends = {"c": (("s", lo), ("s", hi)),
                "s": (("s", stem), ("g", stem)),
                "o": (("g", stem), ("g", stem))}
        return ends, {"w": stem}, {"o": cusps[0]}
    if ttype == "cusp2":
        k = cuffs[0]
        ends = {"s": (("s", k), ("g", k)),
                "o": (("g", k), ("g", k))}
        return ends, {"w": k}, {"o": cusps[0]}
    if ttype.startswith("loop"):
        i = int(ttype[4:])
        j, k = (i + 1) % 3, (i + 2) % 3
        ends = {"f": (("s", i), ("g", j)),
                "g": (("s", i), ("g", k)),
                "b": (("g", j), ("g", k)),
                "p": (("s", j), ("g", j)),
                "q": (("s", k), ("g", k))}
        return ends, {"u": j, "v": k}, {"b": j}
    raise MalformedTrack("unknown track type %r" % (ttype,))


def _mat_power(m, k: int):
    if k < 0:
        m = mat.sl2_inv(m)
        k = -k
    out = mat.IDENT
    for _ in range(k):
        out = mat.mul(out, m)
    return out


class TrackTransport:
    """Preferred switch lifts and branch transition matrices.

    `vertex_chart(vid)` is the chart of the preferred lift of a switch;
    `edge_matrix(de)` is the transition picked up by one traversal of a
    directed branch, so the product of `edge_matrix` along a smooth word,
    conjugated by the start chart, is the word's holonomy.
    """

    def __init__(self, tt: TrainTrack):
        self.tt = tt
        self.pd = tt.pd
        self.placement = place(tt.pd)
        self.cuff_length: Dict[str, float] = {}
        self._chart: Dict[str, tuple] = {}
        self._adapter: Dict[Tuple[int, int], tuple] = {}
        self._forward: Dict[str, tuple] = {}
        self._build()

    def _build(self):
        tt, pd, pl = self.tt, self.pd, self.placement
        flow = {}
        for cid, sides, length in pd.all_cuffs():
            self.cuff_length[cid] = length
            self._chart["a:" + cid] = slot_chart_map(pl, pd, *sides[0])
            self._adapter[sides[0]] = mat.IDENT
            flow[cid] = 1.0 if tt.choice.tangency(*sides[0]) == "L" else -1.0
            if len(sides) == 2:
                g = pd.gluings[int(cid[1:])]
                self._adapter[sides[1]] = gluing_map(length, g.twist)
        layouts = {}
        bend = {}
        for pants in pd.pants:
            tset = {tt.choice.tangency(pants.id, s) for s in pants.cuff_slots()}
            if len(tset) > 1:
                raise DomainError(
                    "pants %d mixes L and R tangencies; transition matrices "
                    "need one tangency side per pants" % pants.id)
            bend[pants.id] = tset.pop() if tset else "L"
            lay = _plan_layout(pants, tt.choice.track_types[pants.id])
            layouts[pants.id] = lay
            geo = pl.geometries[pants.id]
            base = pl.global_of[pants.id]
            for nm, gslot in lay[1].items():
                self._chart["i:%d:%s" % (pants.id, nm)] = mat.mul(
                    base, geo.to_ref[gslot])
        for eid in sorted(tt.edges):
            e = tt.edges[eid]
            if e.kind == "cuff":
                self._forward[eid] = mat.trans(
                    flow[e.cuff_id] * self.cuff_length[e.cuff_id])
                continue
            ends, _gauges, wind = layouts[e.pants_id]
            geo = pl.geometries[e.pants_id]
            d0, r0 = self._attach(e.pants_id, geo, ends[e.name][0])
            d1, r1 = self._attach(e.pants_id, geo, ends[e.name][1])
            if e.name in wind:
                tau = bend[e.pants_id]
                if e.kind == "cusp_loop":
                    sign = _CUSP_WIND if tau == "L" else -_CUSP_WIND
                    w = wind[e.name]
                else:
                    sign = _LOOP_WIND
                    w = wind[e.name] if tau == "L" else ends[e.name][1][1]
                anchor = ends[e.name][0][1]
                conj = mat.IDENT
                t = (anchor + 1) % 3
                while t != w:
                    conj = mat.mul(conj, geo.boundary[t])
                    t = (t + 1) % 3
                x = _mat_power(geo.boundary[w], sign)
                x = mat.chain(conj, x, mat.sl2_inv(conj))
                mid = mat.chain(mat.sl2_inv(r0), x, r1)
            else:
                mid = mat.mul(mat.sl2_inv(r0), r1)
            self._forward[eid] = mat.chain(d0, mid, mat.sl2_inv(d1))

    def _attach(self, pid: int, geo, descr):
        tag, slot = descr
        if tag == "s":
            return self._adapter[(pid, slot)], geo.to_ref[slot]
        return mat.IDENT, geo.to_ref[slot]

    def vertex_chart(self, vid: str):
        try:
            return self._chart[vid]
        except KeyError:
            raise DomainError("no preferred lift for switch %r" % (vid,))

    def edge_matrix(self, de: str):
        eid, fwd = split_directed(de)
        self.tt.require_edge(eid)
        m = self._forward[eid]
        return m if fwd else mat.sl2_inv(m)

    def path_matrix(self, edges: Sequence[str]):
        out = mat.IDENT
        for de in edges:
            out = mat.mul(out, self.edge_matrix(de))
        return out

    def path_start_chart(self, path, base=None):
        seq = path.edges if isinstance(path, EdgePath) else tuple(path)
        u = self.vertex_chart(self.tt.tail_vertex(seq[0]))
        if base is not None:
            u = mat.mul(base, u)
        return u


_transports = weakref.WeakKeyDictionary()


def transport(tt: TrainTrack) -> TrackTransport:
    """Transition table for a track, built once per track and cached."""
    tr = _transports.get(tt)
    if tr is None:
        tr = TrackTransport(tt)
        _transports[tt] = tr
    return tr


# ---------------------------------------------------------------------------
# holonomy and endpoints


def closed_path_holonomy(tt: TrainTrack, path: EdgePath, base=None):
    """Holonomy of a smooth closed train path: a det-1 matrix, |trace| > 2.

    The matrix is expressed at the preferred lift of the path's first
    switch; `base` conjugates the result into another frame.  Paths whose
    holonomy is not hyperbolic raise ParabolicOrElliptic.
    """
    if not isinstance(path, EdgePath) or not path.closed:
        raise DomainError("closed edge path required")
    if not is_edge_path(tt, path):
        raise NotCarried("path is not smooth at every switch")
    tr = transport(tt)
    u0 = tr.path_start_chart(path, base)
    h = mat.unit_det(mat.chain(u0, tr.path_matrix(path.edges),
                               mat.sl2_inv(u0)))
    if abs(mat.tr(h)) <= 2.0 + eps():
        raise ParabolicOrElliptic(
            "closed path has trace %.9f" % mat.tr(h))
    return h


def axis_of(tt: TrainTrack, path: EdgePath, base=None) -> LiftedGeodesic:
    """Axis of a closed path's holonomy (attracting endpoint first)."""
    h = closed_path_holonomy(tt, path, base)
    att, rep = mat.fixed_points(h)
    return LiftedGeodesic(IdealPoint(att[0], att[1]),
                          IdealPoint(rep[0], rep[1]))


def endpoint_of_path(tt: TrainTrack, path: EdgePath, base=None) -> IdealPoint:
    """Forward ideal endpoint of an eventually periodic carried path.

    The path's repeating cycle must have hyperbolic holonomy; the endpoint
    is the attracting fixed point of that holonomy expressed at the lift of
    the cycle reached from the preferred lift of the path's first switch.
    """
    if not isinstance(path, EdgePath) or path.period is None:
        raise DomainError("eventually periodic edge path required")
    if not is_edge_path(tt, path):
        raise NotCarried("path is not smooth at every switch")
    tr = transport(tt)
    u0 = tr.path_start_chart(path, base)
    n = len(path.edges)
    pre = mat.mul(u0, tr.path_matrix(path.edges[: n - path.period]))
    cyc = tr.path_matrix(path.edges[n - path.period:])
    g = mat.unit_det(mat.chain(pre, cyc, mat.sl2_inv(pre)))
    if abs(mat.tr(g)) <= 2.0 + eps():
        raise ParabolicOrElliptic(
            "repeating cycle has trace %.9f" % mat.tr(g))
    att = mat.fixed_points(g)[0]
    return IdealPoint(att[0], att[1])


# ---------------------------------------------------------------------------
# carrier boxes


@dataclass(frozen=True)
class MarginBox:
    box: GeodesicBox
    measure: float


@dataclass(frozen=True)
class CarrierBoxes:
    """Nested geodesic boxes certifying carriage across a span.

    Every complete carried geodesic whose train path runs through the span
    (in either direction) belongs to the inner box; no other carried
    geodesic belongs to the outer box.  The four margin boxes, between the
    inner and outer corners, all have positive measure.
    """

    kind: str
    alpha: LiftedGeodesic
    beta: LiftedGeodesic
    inner: GeodesicBox
    outer: GeodesicBox
    margins: Dict[str, MarginBox]
    inner_measure: float

    @property
    def min_margin(self) -> float:
        return min(m.measure for m in self.margins.values())

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha.to_json_dict(),
            "beta": self.beta.to_json_dict(),
            "inner": self.inner.to_json_dict(),
            "outer": self.outer.to_json_dict(),
            "inner_measure": self.inner_measure,
            "margins": {k: {"measure": v.measure,
                            "box": v.box.to_json_dict()}
                        for k, v in sorted(self.margins.items())},
        }


def _axis_points(m, chart: str = "global") -> Tuple[IdealPoint, IdealPoint]:
    """Images of (infinity, zero) under a matrix, as ideal points."""
    return (IdealPoint(m[0], m[2], chart), IdealPoint(m[1], m[3], chart))


def _depart(germ) -> str:
    """Directed edge leaving a switch through the given half-edge."""
    return ("+" if germ[1] == 0 else "-") + germ[0]


def _germs_on_side(v, side: str):
    return v.minus if side == "-" else v.plus


def _other_side(side: str) -> str:
    return "-" if side == "+" else "+"


def _smooth_continuations(tt: TrainTrack, de: str) -> List[str]:
    h = tt.head_germ(de)
    v = tt.vertices[tt.head_vertex(de)]
    return [_depart(g)
            for g in _germs_on_side(v, _other_side(tt.germ_side(h)))]


def _connector_spans(tt: TrainTrack, d_start: str) -> List[Tuple[str, ...]]:
    """All smooth connector-only words from a departure to a cuff switch."""
    out = []
    stack = [(d_start,)]
    while stack:
        word = stack.pop()
        head = tt.head_vertex(word[-1])
        if head.startswith("a:"):
            out.append(word)
            continue
        if len(word) >= 6:
            raise MalformedTrack("inner switches do not close out a span")
        stack.extend(word + (d2,)
                     for d2 in _smooth_continuations(tt, word[-1]))
    return out


def _same_point(p: IdealPoint, q: IdealPoint, tol: float = 1e-12) -> bool:
    d = _ccw(p.angle, q.angle)
    return d < tol or _TWO_PI - d < tol


def _assemble_boxes(kind, apts, bpts, inner_i, inner_j, outer_i, outer_j,
                    final_map=None) -> CarrierBoxes:
    if final_map is not None:
        conv = lambda p: p.apply(final_map)
        apts = tuple(conv(p) for p in apts)
        bpts = tuple(conv(p) for p in bpts)
        inner_i = tuple(conv(p) for p in inner_i)
        inner_j = tuple(conv(p) for p in inner_j)
        outer_i = tuple(conv(p) for p in outer_i)
        outer_j = tuple(conv(p) for p in outer_j)
    try:
        inner = GeodesicBox(inner_i[0], inner_i[1], inner_j[0], inner_j[1])
        outer = GeodesicBox(outer_i[0], outer_i[1], outer_j[0], outer_j[1])
    except DomainError as exc:
        raise NotSpanning("box corners collapsed: %s" % (exc,))
    for pt in (outer.j_start, outer.j_end):
        if _angle_in_arc(pt.angle, outer.i_start.angle, outer.i_end.angle,
                         0.0):
            raise NotSpanning("outer intervals overlap")
    for pt in (outer.i_start, outer.i_end):
        if _angle_in_arc(pt.angle, outer.j_start.angle, outer.j_end.angle,
                         0.0):
            raise NotSpanning("outer intervals overlap")
    pieces = {
        "i_start": (outer.i_start, inner.i_start,
                    outer.j_start, outer.j_end),
        "i_end": (inner.i_end, outer.i_end, outer.j_start, outer.j_end),
        "j_start": (outer.i_start, outer.i_end,
                    outer.j_start, inner.j_start),
        "j_end": (outer.i_start, outer.i_end, inner.j_end, outer.j_end),
    }
    margins = {}
    for name, corners in pieces.items():
        try:
            piece = GeodesicBox(*corners)
            measure = liouville(piece)
        except (DomainError, DegenerateBox) as exc:
            raise NotSpanning("margin %s collapsed: %s" % (name, exc))
        if measure <= 0.0:
            raise NotSpanning("margin %s has measure %g" % (name, measure))
        margins[name] = MarginBox(piece, measure)
    return CarrierBoxes(
        kind=kind,
        alpha=LiftedGeodesic(apts[0], apts[1]),
        beta=LiftedGeodesic(bpts[0], bpts[1]),
        inner=inner,
        outer=outer,
        margins=margins,
        inner_measure=liouville(inner),
    )


def carrier_boxes(tt: TrainTrack, pd: PantsDecomposition, path: EdgePath,
                  base=None) -> CarrierBoxes:
    """Inner and outer geodesic boxes across a spanning segment of track.

    `path` must be a finite smooth span: either a run of connector branches
    from one cuff switch to another, or j >= 1 passes along a single cuff
    branch in one direction.  Anything else raises NotSpanning, as does a
    span whose crossings leave no room for positive margins.
    """
    if pd is not tt.pd and pd != tt.pd:
        raise DomainError("track was built on a different decomposition")
    if not isinstance(path, EdgePath) or path.closed or path.period:
        raise NotSpanning("span must be a finite open path")
    if not is_edge_path(tt, path):
        raise NotSpanning("span is not smooth at every switch")
    kinds = {tt.require_edge(split_directed(de)[0]).kind
             for de in path.edges}
    tr = transport(tt)
    if kinds == {"cuff"}:
        return _cuff_span_boxes(tr, path, base)
    if "cuff" in kinds:
        raise NotSpanning("span mixes cuff and connector branches")
    return _connector_span_boxes(tr, path, base)


def _connector_span_boxes(tr: TrackTransport, path: EdgePath,
                          base) -> CarrierBoxes:
    tt = tr.tt
    v0 = tt.tail_vertex(path.edges[0])
    v1 = tt.head_vertex(path.edges[-1])
    if not (v0.startswith("a:") and v1.startswith("a:")):
        raise NotSpanning("connector span must join two cuff switches")
    for de in path.edges[:-1]:
        if not tt.head_vertex(de).startswith("i:"):
            raise NotSpanning("connector span touches a cuff inside")
    u0 = tr.path_start_chart(path, base)
    mg = tr.path_matrix(path.edges)
    uend = mat.mul(u0, mg)
    la = tr.cuff_length[v0[2:]]
    lb = tr.cuff_length[v1[2:]]
    a1, a2 = _axis_points(u0)
    b1, b2 = _axis_points(uend)
    ipts = [a1, a2]
    jpts = [b1, b2]
    for s in (la, -la):
        ipts.extend(_axis_points(mat.chain(u0, mat.trans(s), mg)))
    for s in (lb, -lb):
        jpts.extend(_axis_points(mat.chain(uend, mat.trans(s),
                                           mat.sl2_inv(mg))))
    inner_i = smallest_arc_containing([a1, a2], b1)
    inner_j = smallest_arc_containing([b1, b2], a1)
    outer_i = smallest_arc_containing(ipts, b1)
    outer_j = smallest_arc_containing(jpts, a1)
    return _assemble_boxes("connector", (a1, a2), (b1, b2),
                           inner_i, inner_j, outer_i, outer_j)


def _cuff_span_boxes(tr: TrackTransport, path: EdgePath,
                     base) -> CarrierBoxes:
    tt = tr.tt
    eids = {split_directed(de)[0] for de in path.edges}
    dirs = {split_directed(de)[1] for de in path.edges}
    if len(eids) != 1 or len(dirs) != 1:
        raise NotSpanning("cuff span must ride one cuff one way")
    eid = eids.pop()
    fwd = dirs.pop()
    edge = tt.edges[eid]
    cid = edge.cuff_id
    ell = tr.cuff_length[cid]
    j = len(path.edges)
    vid = "a:" + cid
    v = tt.vertices[vid]
    de0 = path.edges[0]

    # Local frame: the preferred lift of the cuff is the imaginary axis.
    signed = ell if fwd else -ell
    step = mat.trans(signed)
    mg = mat.trans(j * signed)
    initial = IdealPoint(0.0, 1.0) if fwd else IdealPoint(1.0, 0.0)
    final = IdealPoint(1.0, 0.0) if fwd else IdealPoint(0.0, 1.0)

    dep_side = tt.germ_side(tt.tail_germ(de0))
    arr_side = tt.germ_side(tt.head_germ(de0))
    entry_germs = [g for g in _germs_on_side(v, _other_side(dep_side))
                   if g[0] != eid]
    exit_germs = [g for g in _germs_on_side(v, _other_side(arr_side))
                  if g[0] != eid]
    if not entry_germs or not exit_germs:
        raise NotSpanning("cuff %s has no crossings on one side" % cid)

    def reaches(germs):
        out = []
        for g in germs:
            for word in _connector_spans(tt, _depart(g)):
                m = tr.path_matrix(word)
                out.append((m, tt.head_vertex(word[-1])))
        return out

    entry = reaches(entry_germs)
    exits = reaches(exit_germs)
    entry_pts = [(initial, None)]
    for m, rvid in entry:
        for p in _axis_points(m):
            entry_pts.append((p, (m, rvid)))
    exit_pts = [(final, None)]
    for m, rvid in exits:
        for p in _axis_points(mat.mul(mg, m)):
            exit_pts.append((p, (mat.mul(mg, m), rvid)))

    inner_i = smallest_arc_containing([p for p, _ in entry_pts], final)
    inner_j = smallest_arc_containing([p for p, _ in exit_pts], initial)

    def far_and_dirs(arc, anchor):
        # anchor is one end of the arc; the other end is the far extreme.
        if _same_point(arc[1], anchor):
            return arc[0], -1, 1
        if _same_point(arc[0], anchor):
            return arc[1], 1, -1
        raise NotSpanning("cuff crossings box in their own cuff")

    far_i, flank_dir_i, near_dir_i = far_and_dirs(inner_i, initial)
    far_j, flank_dir_j, near_dir_j = far_and_dirs(inner_j, final)

    def reach_of(target, pool):
        for p, info in pool:
            if info is not None and _same_point(p, target):
                return info
        raise NotSpanning("no crossing reaches the interval end")

    bad_i = [p.apply(step) for p, info in entry_pts if info is not None]
    bad_j = [p.apply(mat.sl2_inv(step)) for p, info in exit_pts
             if info is not None]

    flank_i = _deck_flank(tr, far_i, reach_of(far_i, entry_pts), bad_i,
                          flank_dir_i, avoid_arc=None)
    near_i = _near_extension([m for m, _ in exits], initial, near_dir_i,
                             [p for p, _ in exit_pts])
    outer_i = smallest_arc_containing(
        [p for p, _ in entry_pts] + flank_i + near_i, final)

    flank_j = _deck_flank(tr, far_j, reach_of(far_j, exit_pts), bad_j,
                          flank_dir_j, avoid_arc=outer_i)
    near_j = _near_extension([mat.mul(mg, m) for m, _ in entry], final,
                             near_dir_j, [outer_i[0], outer_i[1]])
    outer_j = smallest_arc_containing(
        [p for p, _ in exit_pts] + flank_j + near_j, initial)

    u0 = tr.vertex_chart(vid)
    if base is not None:
        u0 = mat.mul(base, u0)
    return _assemble_boxes("cuff", (initial, final), (initial, final),
                           inner_i, inner_j, outer_i, outer_j,
                           final_map=u0)


def _deck_flank(tr: TrackTransport, far_pt: IdealPoint, reach, bad_pts,
                dir_sign: int, avoid_arc) -> List[IdealPoint]:
    """Extension points in the clean gap just beyond an interval end.

    Candidates are deck translates, along the cuff reached by the extreme
    crossing, of the lifts visible one crossing further out; they
    accumulate on the interval end from outside, so deep enough translates
    fall between the end and the first shadow of the next deck period.  If
    none of the probed translates does, the geometric middle of that gap is
    used instead.
    """
    tt = tr.tt
    reach_m, reach_vid = reach

    def off(p):
        d = _ccw(far_pt.angle, p.angle)
        return d if dir_sign > 0 else _TWO_PI - d

    lims = [off(p) for p in bad_pts]
    lim = min(x for x in lims if x > 1e-12) if any(
        x > 1e-12 for x in lims) else None
    if lim is None:
        raise NotSpanning("deck periods leave no gap at an interval end")
    ell = tr.cuff_length[reach_vid[2:]]
    vr = tt.vertices[reach_vid]
    spans = []
    for g in list(vr.minus) + list(vr.plus):
        if tt.edges[g[0]].kind == "cuff":
            continue
        for word in _connector_spans(tt, _depart(g)):
            spans.append(tr.path_matrix(word))
    best = None
    best_score = 0.0
    for span_m in spans:
        for k in (1, 2, 3, 4, -1, -2, -3, -4):
            c = mat.chain(reach_m, mat.trans(k * ell), span_m)
            p1, p2 = _axis_points(c)
            o1, o2 = off(p1), off(p2)
            if not (1e-12 < o1 < lim - 1e-12
                    and 1e-12 < o2 < lim - 1e-12):
                continue
            if avoid_arc is not None and (
                    _angle_in_arc(p1.angle, avoid_arc[0].angle,
                                  avoid_arc[1].angle, 1e-12)
                    or _angle_in_arc(p2.angle, avoid_arc[0].angle,
                                     avoid_arc[1].angle, 1e-12)):
                continue
            score = max(o1, o2)
            if score > best_score:
                best_score = score
                best = [p1, p2]
    if best is not None:
        return best
    return [boundary_point(far_pt.angle + dir_sign * lim / 2.0,
                           far_pt.chart)]


def _near_extension(lift_ms, origin: IdealPoint, dir_sign: int,
                    bound_pts) -> List[IdealPoint]:
    """Farthest crossing lift on the blind side of an interval end,
    stopping short of the nearest far-side shadow."""

    def off(p):
        d = _ccw(origin.angle, p.angle)
        return d if dir_sign > 0 else _TWO_PI - d

    lims = [off(p) for p in bound_pts if off(p) > 1e-12]
    lim = min(lims) if lims else _TWO_PI
    best = None
    best_score = 0.0
    for m in lift_ms:
        p1, p2 = _axis_points(m)
        o1, o2 = off(p1), off(p2)
        if not (1e-12 < o1 < lim - 1e-12 and 1e-12 < o2 < lim - 1e-12):
            continue
        score = max(o1, o2)
        if score > best_score:
            best_score = score
            best = [p1, p2]
    return best if best is not None else []


# ---------------------------------------------------------------------------
# sampling helpers for endpoint checks


def extend_to_periodic(tt: TrainTrack, word, rng, grow: int = 6) -> EdgePath:
    """Random smooth extension of a word, closed off by riding a cuff.

    After at least `grow` random smooth steps the walk appends the first
    available cuff branch and repeats it forever (period one).
    """
    word = list(word)
    for n in range(grow + 40):
        conts = _smooth_continuations(tt, word[-1])
        rides = [d for d in conts
                 if tt.edges[split_directed(d)[0]].kind == "cuff"]
        if n >= grow and rides:
            word.append(rng.choice(rides))
            return EdgePath(tuple(word), period=1)
        word.append(rng.choice(conts))
    raise DomainError("random walk never reached a cuff branch")


def span_test_rays(tt: TrainTrack, span: EdgePath, rng,
                   grow: int = 6) -> Tuple[EdgePath, EdgePath]:
    """Forward and backward eventually periodic rays through a span.

    Both rays start at the span's first switch, so their two endpoints are
    the ideal endpoints of one complete carried geodesic whose train path
    contains the span.
    """
    fwd = extend_to_periodic(tt, list(span.edges), rng, grow)
    g0 = tt.tail_germ(span.edges[0])
    v = tt.vertices[tt.tail_vertex(span.edges[0])]
    preds = _germs_on_side(v, _other_side(tt.germ_side(g0)))
    bwd = extend_to_periodic(tt, [_depart(rng.choice(list(preds)))],
                             rng, grow)
    return fwd, bwd


def _contains_subword(seq, sub) -> bool:
    n = len(sub)
    return any(tuple(seq[i:i + n]) == tuple(sub)
               for i in range(len(seq) - n + 1))


def closed_loops_avoiding(tt: TrainTrack, span: EdgePath, rng, count: int,
                          min_len: int = 4, max_len: int = 16
                          ) -> List[EdgePath]:
    """Random smooth closed loops near a span whose cyclic words avoid the
    span in both directions and have hyperbolic holonomy."""
    fwd_word = tuple(span.edges)
    bwd_word = tuple(flip_directed(de) for de in reversed(span.edges))
    anchors = sorted({tt.tail_vertex(span.edges[0]),
                      tt.head_vertex(span.edges[-1])})
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 600 * count:
            raise DomainError("could not sample enough avoiding loops")
        vid = anchors[rng.randrange(len(anchors))]
        v = tt.vertices[vid]
        germs = list(v.minus) + list(v.plus)
        d0 = _depart(germs[rng.randrange(len(germs))])
        word = [d0]
        loop = None
        for _ in range(max_len):
            conts = _smooth_continuations(tt, word[-1])
            d = conts[rng.randrange(len(conts))]
            word.append(d)
            if len(word) >= min_len and tt.smooth_step(d, d0):
                loop = EdgePath(tuple(word), closed=True)
                break
        if loop is None:
            continue
        doubled = tuple(word) * 2
        if (_contains_subword(doubled, fwd_word)
                or _contains_subword(doubled, bwd_word)):
            continue
        try:
            closed_path_holonomy(tt, loop)
        except ParabolicOrElliptic:
            continue
        out.append(loop)
    return out


# ---------------------------------------------------------------------------
# disk-model drawing support


def disk_xy(point: IdealPoint) -> Tuple[float, float]:
    """Boundary position on the unit circle of the disk picture."""
    th = point.angle
    return math.cos(th), math.sin(th)


def interior_disk_xy(z: complex) -> Tuple[float, float]:
    """Disk position of an upper half-plane point."""
    w = (z - 1j) / (z + 1j)
    return w.real, w.imag


def geodesic_disk_arc(p: IdealPoint, q: IdealPoint):
    """Disk-model arc data for the geodesic p-q.

    Returns ("line", (x1, y1), (x2, y2)) for a diameter, otherwise
    ("arc", (x1, y1), (x2, y2), radius, sweep) where sweep is the SVG
    sweep flag for the minor arc from the first point to the second.
    """
    x1, y1 = disk_xy(p)
    x2, y2 = disk_xy(q)
    dot = 1.0 + (x1 * x2 + y1 * y2)
    if abs(dot) < 1e-9:
        return ("line", (x1, y1), (x2, y2))
    cx, cy = (x1 + x2) / dot, (y1 + y2) / dot
    r = math.hypot(cx - x1, cy - y1)
    cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx)
    sweep = 1 if cross < 0 else 0
    return ("arc", (x1, y1), (x2, y2), r, sweep)
