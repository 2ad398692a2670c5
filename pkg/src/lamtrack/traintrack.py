"""Standard train tracks on a pants decomposition.

A track is built from one cuff edge per cuff plus a small set of connector
edges inside each pair of pants.  The connector pattern in a pants is chosen
from a fixed menu:

* ``pairwise``   -- one connector between each pair of cuff slots (3 cuffs);
* ``loop0/1/2``  -- a self-loop based at the named slot that wraps the next
  slot, plus one peel-off connector to each of the other two cuffs;
* ``loopP/loopQ``-- for a one-cusp pants: a connector between the two cuffs,
  plus a loop around the cusp attached to the named cuff (P = lower slot);
* ``cusp2``      -- for a two-cusp pants: a loop around the first cusp
  attached by a stem to the single cuff.

Every vertex carries a two-block smooth partition (side ``minus`` / side
``plus``): a train path may pass through the vertex only by entering on one
side and leaving on the other.  Each vertex also stores the full
counterclockwise cyclic order of its half-edges; the surface is oriented so
that each boundary cuff keeps the pants interior on its left.

Half-edges are pairs ``(edge_id, end)`` with ``end`` 0 or 1.  Directed edges
are written as signed ids ``"+K:g0"`` / ``"-C:0:c01"``: the positive
direction runs from end 0 to end 1.  For a cuff edge, end 0 points in the
positive cuff direction, so ``+K:...`` rides the cuff positively.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DomainError,
    MalformedTrack,
    NotCarried,
    TangencyMismatch,
    UnknownEdge,
)
from .surface import CUSP, PantsDecomposition

HalfEdge = Tuple[str, int]

TRACK_TYPES_3CUFF = ("pairwise", "loop0", "loop1", "loop2")
TRACK_TYPES_1CUSP = ("loopP", "loopQ")
TRACK_TYPE_2CUSP = "cusp2"


@dataclass(frozen=True)
class StandardChoice:
    """Per-pants connector pattern and per-slot cuff tangency.

    track_types maps pants id -> type name.  tangencies maps (pants_id, slot)
    -> "L" or "R"; the two sides of a glued cuff must agree.
    """

    track_types: Dict[int, str]
    tangencies: Dict[Tuple[int, int], str] = field(default_factory=dict)

    def tangency(self, pants_id: int, slot: int) -> str:
        return self.tangencies.get((pants_id, slot), "L")


@dataclass(frozen=True)
class Edge:
    """One branch of the track.

    kind is "cuff", "connector" or "cusp_loop"; ends are the two incident
    vertex ids (equal for loops).
    """

    id: str
    kind: str
    ends: Tuple[str, str]
    pants_id: Optional[int] = None
    name: Optional[str] = None
    cuff_id: Optional[str] = None


@dataclass(frozen=True)
class Vertex:
    """A switch: two smooth blocks plus the ccw cyclic order of half-edges."""

    id: str
    minus: Tuple[HalfEdge, ...]
    plus: Tuple[HalfEdge, ...]
    cyclic: Tuple[HalfEdge, ...]


@dataclass(frozen=True)
class EdgePath:
    """A train path as a sequence of signed edge ids.

    closed marks a cycle (the last edge joins smoothly back to the first).
    period, if set, makes the path eventually periodic: the final `period`
    edges repeat forever.
    """

    edges: Tuple[str, ...]
    closed: bool = False
    period: Optional[int] = None

    def __post_init__(self):
        if self.closed and self.period is not None:
            raise DomainError("a path cannot be both closed and periodic")
        if self.period is not None and not 0 < self.period <= len(self.edges):
            raise DomainError("period out of range")

    def reversed(self) -> "EdgePath":
        if self.period is not None:
            raise DomainError("cannot reverse a one-sided infinite path")
        flipped = tuple(flip_directed(e) for e in reversed(self.edges))
        return EdgePath(flipped, closed=self.closed)

    def to_json_dict(self) -> dict:
        out = {"edges": list(self.edges), "closed": self.closed}
        if self.period is not None:
            out["period"] = self.period
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "EdgePath":
        try:
            edges = tuple(str(e) for e in data["edges"])
        except (KeyError, TypeError) as exc:
            raise DomainError("edge path JSON needs an 'edges' list") from exc
        return EdgePath(
            edges,
            closed=bool(data.get("closed", False)),
            period=data.get("period"),
        )


def flip_directed(de: str) -> str:
    if de.startswith("+"):
        return "-" + de[1:]
    if de.startswith("-"):
        return "+" + de[1:]
    raise UnknownEdge("directed edge must start with '+' or '-': %r" % (de,))


def split_directed(de: str) -> Tuple[str, bool]:
    """Return (edge_id, forward) for a signed edge id."""
    if de.startswith("+"):
        return de[1:], True
    if de.startswith("-"):
        return de[1:], False
    raise UnknownEdge("directed edge must start with '+' or '-': %r" % (de,))


@dataclass(frozen=True)
class Region:
    """A complementary region, recorded by its cycle of arrival half-edges."""

    kind: str
    germs: Tuple[HalfEdge, ...]
    cusp_corners: int


class TrainTrack:
    """The assembled track: vertices, edges, and the defining choice."""

    def __init__(self, pd: PantsDecomposition, choice: StandardChoice,
                 vertices: Dict[str, Vertex], edges: Dict[str, Edge]):
        self.pd = pd
        self.choice = choice
        self.vertices = vertices
        self.edges = edges
        self._side_of: Dict[HalfEdge, str] = {}
        self._vertex_of: Dict[HalfEdge, str] = {}
        for v in vertices.values():
            for h in v.minus:
                self._side_of[h] = "-"
                self._vertex_of[h] = v.id
            for h in v.plus:
                self._side_of[h] = "+"
                self._vertex_of[h] = v.id

    # -- directed-edge helpers ------------------------------------------

    def require_edge(self, eid: str) -> Edge:
        try:
            return self.edges[eid]
        except KeyError:
            raise UnknownEdge("no edge %r in track" % (eid,))

    def head_germ(self, de: str) -> HalfEdge:
        """Half-edge at which a traversal of `de` arrives."""
        eid, fwd = split_directed(de)
        self.require_edge(eid)
        return (eid, 1 if fwd else 0)

    def tail_germ(self, de: str) -> HalfEdge:
        """Half-edge through which a traversal of `de` departs."""
        eid, fwd = split_directed(de)
        self.require_edge(eid)
        return (eid, 0 if fwd else 1)

    def head_vertex(self, de: str) -> str:
        return self._vertex_of[self.head_germ(de)]

    def tail_vertex(self, de: str) -> str:
        return self._vertex_of[self.tail_germ(de)]

    def germ_side(self, h: HalfEdge) -> str:
        return self._side_of[h]

    def smooth_step(self, de_in: str, de_out: str) -> bool:
        """True when de_out may follow de_in along a train path."""
        h_in = self.head_germ(de_in)
        h_out = self.tail_germ(de_out)
        if self._vertex_of[h_in] != self._vertex_of[h_out]:
            return False
        if h_in == h_out:
            return False
        return self._side_of[h_in] != self._side_of[h_out]

    # -- JSON -------------------------------------------------------------

    def to_json_dict(self) -> dict:
        verts = {}
        for vid in sorted(self.vertices):
            v = self.vertices[vid]
            verts[vid] = {
                "minus": [list(h) for h in v.minus],
                "plus": [list(h) for h in v.plus],
                "cyclic": [list(h) for h in v.cyclic],
            }
        edges = {}
        for eid in sorted(self.edges):
            e = self.edges[eid]
            entry = {"kind": e.kind, "ends": list(e.ends)}
            if e.pants_id is not None:
                entry["pants"] = e.pants_id
            if e.name is not None:
                entry["name"] = e.name
            if e.cuff_id is not None:
                entry["cuff"] = e.cuff_id
            edges[eid] = entry
        return {
            "vertices": verts,
            "edges": edges,
            "choice": {
                "track_types": {str(k): v for k, v in
                                sorted(self.choice.track_types.items())},
                "tangencies": {"%d:%d" % k: v for k, v in
                               sorted(self.choice.tangencies.items())},
            },
        }


def _loop_slots(track_type: str) -> Tuple[int, int, int]:
    base = int(track_type[-1])
    return base, (base + 1) % 3, (base + 2) % 3


def _connector_plan(pants, track_type: str):
    """Edges and per-slot attachment lists for one pants.

    Returns (edges, slot_germs, interior) where edges maps local name ->
    (kind, local end descriptors), slot_germs maps cuff slot -> list of
    (name, end) nearest-the-cuff-vertex-first, and interior maps local
    vertex name -> (minus, plus) lists of (name, end).
    """
    kind = len(pants.cusp_slots())
    if kind == 0:
        if track_type == "pairwise":
            edges = {
                "c01": ("connector", ("a0", "a1")),
                "c12": ("connector", ("a1", "a2")),
                "c20": ("connector", ("a2", "a0")),
            }
            slot_germs = {
                0: [("c01", 0), ("c20", 1)],
                1: [("c12", 0), ("c01", 1)],
                2: [("c20", 0), ("c12", 1)],
            }
            return edges, slot_germs, {}
        if track_type in ("loop0", "loop1", "loop2"):
            i, j, k = _loop_slots(track_type)
            edges = {
                "f": ("connector", ("a%d" % i, "u")),
                "g": ("connector", ("a%d" % i, "v")),
                "b": ("connector", ("u", "v")),
                "p": ("connector", ("a%d" % j, "u")),
                "q": ("connector", ("a%d" % k, "v")),
            }
            slot_germs = {i: [("f", 0), ("g", 0)], j: [("p", 0)], k: [("q", 0)]}
            interior = {
                "u": ([("f", 1)], [("b", 0), ("p", 1)]),
                "v": ([("g", 1)], [("b", 1), ("q", 1)]),
            }
            return edges, slot_germs, interior
        raise DomainError(
            "pants %d has three cuffs; track type must be one of %s, got %r"
            % (pants.id, TRACK_TYPES_3CUFF, track_type))
    if kind == 1:
        lo, hi = pants.cuff_slots()
        if track_type == "loopP":
            stem_slot, other = lo, hi
        elif track_type == "loopQ":
            stem_slot, other = hi, lo
        else:
            raise DomainError(
                "pants %d has one cusp; track type must be loopP or loopQ, "
                "got %r" % (pants.id, track_type))
        edges = {
            "c": ("connector", ("a%d" % lo, "a%d" % hi)),
            "s": ("connector", ("a%d" % stem_slot, "w")),
            "o": ("cusp_loop", ("w", "w")),
        }
        c_end_at = {lo: 0, hi: 1}
        slot_germs = {
            stem_slot: [("s", 0), ("c", c_end_at[stem_slot])],
            other: [("c", c_end_at[other])],
        }
        interior = {"w": ([("s", 1)], [("o", 0), ("o", 1)])}
        return edges, slot_germs, interior
    if track_type != TRACK_TYPE_2CUSP:
        raise DomainError(
            "pants %d has two cusps; track type must be cusp2, got %r"
            % (pants.id, track_type))
    (slot,) = pants.cuff_slots()
    edges = {
        "s": ("connector", ("a%d" % slot, "w")),
        "o": ("cusp_loop", ("w", "w")),
    }
    slot_germs = {slot: [("s", 0)]}
    interior = {"w": ([("s", 1)], [("o", 0), ("o", 1)])}
    return edges, slot_germs, interior


def build_track(pd: PantsDecomposition, choice: StandardChoice) -> TrainTrack:
    """Assemble the track for `choice` on `pd`.

    Raises TangencyMismatch when the two sides of a glued cuff request
    different tangencies, and DomainError for a type that does not fit the
    pants it names.
    """
    for pid in choice.track_types:
        if pd.pants_by_id(pid) is None:
            raise DomainError("choice names unknown pants %d" % pid)

    edges: Dict[str, Edge] = {}
    vertices: Dict[str, Vertex] = {}
    # slot -> ordered germ list of actual half-edges, nearest-first
    slot_attach: Dict[Tuple[int, int], List[HalfEdge]] = {}

    for pants in pd.pants:
        track_type = choice.track_types.get(pants.id)
        if track_type is None:
            raise DomainError("choice missing a track type for pants %d"
                              % pants.id)
        local_edges, slot_germs, interior = _connector_plan(pants, track_type)

        def vid_of(local: str) -> str:
            if local.startswith("a"):
                return "a:" + pd.cuff_id(pants.id, int(local[1]))
            return "i:%d:%s" % (pants.id, local)

        ids = {}
        for name, (ekind, (v0, v1)) in local_edges.items():
            eid = "C:%d:%s" % (pants.id, name)
            ids[name] = eid
            edges[eid] = Edge(id=eid, kind=ekind,
                              ends=(vid_of(v0), vid_of(v1)),
                              pants_id=pants.id, name=name)
        for slot, germs in slot_germs.items():
            slot_attach[(pants.id, slot)] = [(ids[n], end) for n, end in germs]
        for local, (minus, plus) in interior.items():
            m = tuple((ids[n], end) for n, end in minus)
            p = tuple((ids[n], end) for n, end in plus)
            vertices["i:%d:%s" % (pants.id, local)] = Vertex(
                id="i:%d:%s" % (pants.id, local),
                minus=m, plus=p, cyclic=m + p)

    for cuff_id, sides, _length in pd.all_cuffs():
        side_a = sides[0]
        side_b = sides[1] if len(sides) > 1 else None
        tan = choice.tangency(*side_a)
        if side_b is not None and choice.tangency(*side_b) != tan:
            raise TangencyMismatch(
                "cuff %s: sides %s and %s request different tangencies"
                % (cuff_id, side_a, side_b))

        kid = "K:" + cuff_id
        vid = "a:" + cuff_id
        edges[kid] = Edge(id=kid, kind="cuff", ends=(vid, vid),
                          cuff_id=cuff_id)
        near_a = slot_attach[side_a]
        near_b = slot_attach[side_b] if side_b is not None else []
        k_e: HalfEdge = (kid, 0)
        k_w: HalfEdge = (kid, 1)
        if tan == "L":
            minus = tuple(reversed(near_a)) + (k_w,)
            plus = (k_e,) + tuple(near_b)
            cyclic = (k_e,) + tuple(near_a) + (k_w,) + tuple(near_b)
        elif tan == "R":
            plus = tuple(reversed(near_a)) + (k_e,)
            minus = (k_w,) + tuple(near_b)
            cyclic = ((k_e,) + tuple(reversed(near_a)) + (k_w,)
                      + tuple(reversed(near_b)))
        else:
            raise DomainError("tangency must be 'L' or 'R', got %r" % (tan,))
        if not minus or not plus:
            raise MalformedTrack("vertex %s has an empty smooth side" % vid)
        vertices[vid] = Vertex(id=vid, minus=minus, plus=plus, cyclic=cyclic)

    return TrainTrack(pd, choice, vertices, edges)


def standard_choice(pd: PantsDecomposition,
                    tangency: str = "L") -> StandardChoice:
    """The default choice: pairwise / loopP / cusp2, one tangency throughout."""
    types = {}
    for pants in pd.pants:
        n_cusp = len(pants.cusp_slots())
        types[pants.id] = ("pairwise", "loopP", "cusp2")[n_cusp]
    tangencies = {}
    for pants in pd.pants:
        for slot in pants.cuff_slots():
            tangencies[(pants.id, slot)] = tangency
    return StandardChoice(track_types=types, tangencies=tangencies)


# ---------------------------------------------------------------------------
# regions


def _walk_step(tt: TrainTrack, germ: HalfEdge):
    """One step of the complementary-region walk.

    Returns (exit_germ, is_cusp_corner) for the region lying to the right of
    the arrival through `germ`.
    """
    v = tt.vertices[tt._vertex_of[germ]]
    if tt._side_of[germ] == "+":
        i = v.plus.index(germ)
        if i + 1 < len(v.plus):
            return v.plus[i + 1], True
        return v.minus[-1], False
    j = v.minus.index(germ)
    if j > 0:
        return v.minus[j - 1], True
    return v.plus[0], False


def regions(tt: TrainTrack) -> List[Region]:
    """Census of complementary regions.

    Every directed edge borders exactly one region.  Regions are classified
    as Triangle (three cusp corners), PuncturedMonogon (one cusp corner,
    encloses a puncture) or Boundary (runs along an unglued cuff); anything
    else raises MalformedTrack.
    """
    unglued = set()
    for cuff_id, sides, _length in tt.pd.all_cuffs():
        if len(sides) == 1:
            unglued.add("K:" + cuff_id)
    cusp2_stems = set()
    for pants in tt.pd.pants:
        if len(pants.cusp_slots()) == 2:
            cusp2_stems.add("C:%d:s" % pants.id)

    seen = set()
    out: List[Region] = []
    for eid in sorted(tt.edges):
        for end in (0, 1):
            start = (eid, end)
            if start in seen:
                continue
            germs: List[HalfEdge] = []
            corners = 0
            punctures = 0
            boundary = 0
            g = start
            while True:
                germs.append(g)
                seen.add(g)
                e = tt.edges[g[0]]
                if e.kind == "cusp_loop" and g[1] == 0:
                    punctures += 1
                if g[0] in cusp2_stems and g[1] == 1:
                    punctures += 1
                if g[0] in unglued and g[1] == 0:
                    boundary += 1
                exit_germ, is_cusp = _walk_step(tt, g)
                if is_cusp:
                    corners += 1
                g = (exit_germ[0], 1 - exit_germ[1])
                if g == start:
                    break
            if boundary:
                if corners or punctures:
                    raise MalformedTrack(
                        "boundary region with cusps: %r" % (germs,))
                kind = "Boundary"
            elif punctures:
                if punctures != 1 or corners != 1:
                    raise MalformedTrack(
                        "region with %d punctures, %d corners: %r"
                        % (punctures, corners, germs))
                kind = "PuncturedMonogon"
            else:
                if corners != 3:
                    raise MalformedTrack(
                        "cuspless region with %d corners: %r"
                        % (corners, germs))
                kind = "Triangle"
            out.append(Region(kind=kind, germs=tuple(germs),
                              cusp_corners=corners))
    return out


def region_census(tt: TrainTrack) -> Dict[str, int]:
    counts = {"Triangle": 0, "PuncturedMonogon": 0, "Boundary": 0}
    for r in regions(tt):
        counts[r.kind] += 1
    return counts


# ---------------------------------------------------------------------------
# paths


def is_edge_path(tt: TrainTrack, path) -> bool:
    """True when consecutive edges join smoothly at shared switches.

    Accepts an EdgePath or a plain sequence of signed edge ids (treated as an
    open path).  Unknown ids raise UnknownEdge.
    """
    if isinstance(path, EdgePath):
        seq = path.edges
        closed = path.closed
        period = path.period
    else:
        seq = tuple(path)
        closed = False
        period = None
    if not seq:
        return False
    for de in seq:
        eid, _fwd = split_directed(de)
        tt.require_edge(eid)
    for a, b in zip(seq, seq[1:]):
        if not tt.smooth_step(a, b):
            return False
    if closed and not tt.smooth_step(seq[-1], seq[0]):
        return False
    if period is not None:
        if not tt.smooth_step(seq[-1], seq[len(seq) - period]):
            return False
    return True


def _expand(path: EdgePath) -> Tuple[Tuple[str, ...], bool]:
    """Finite word plus cyclicity flag used by the crossing test.

    Eventually periodic paths are unrolled three periods past the prefix;
    this covers every divergence pattern the finite comparisons below need.
    """
    if path.period is None:
        return path.edges, path.closed
    cycle = path.edges[len(path.edges) - path.period:]
    return path.edges + cycle * 3, False


def _chords_cross(cyclic: Sequence[HalfEdge], a_in, a_out, b_in, b_out) -> bool:
    """Do chords (a_in,a_out) and (b_in,b_out) cross in the vertex disk?"""
    n = len(cyclic)
    pos = {h: i for i, h in enumerate(cyclic)}
    ai, ao = pos[a_in], pos[a_out]
    count = 0
    for x in (pos[b_in], pos[b_out]):
        if (x - ai) % n and (x - ai) % n < (ao - ai) % n:
            count += 1
    return count == 1


def _rot_pos(cyclic: Sequence[HalfEdge], ref: HalfEdge, h: HalfEdge) -> int:
    n = len(cyclic)
    pos = {g: i for i, g in enumerate(cyclic)}
    return (pos[h] - pos[ref]) % n


def _directed_at(seq, i, n, cyc):
    if cyc:
        return seq[i % n]
    if 0 <= i < n:
        return seq[i]
    return None


def paths_cross(tt: TrainTrack, path_a: EdgePath, path_b: EdgePath) -> bool:
    """Whether carried realizations of the two paths must intersect.

    The test aligns maximal shared runs (in both relative orientations) and
    compares the flanking branches in the cyclic order at the divergence
    switches; it also checks transverse chords at isolated shared vertices.
    Comparing a path with itself is allowed and ignores the identity
    alignment.
    """
    variants = [(path_b, False)]
    if path_b.period is None:
        variants.append((path_b.reversed(), True))
    for variant, flipped in variants:
        if _aligned_cross(tt, path_a, variant,
                          same_object=(path_a is path_b and not flipped)):
            return True
    if _vertex_cross(tt, path_a, path_b):
        return True
    return False


def _aligned_cross(tt: TrainTrack, pa: EdgePath, pb: EdgePath,
                   same_object: bool) -> bool:
    a, cyc_a = _expand(pa)
    b, cyc_b = _expand(pb)
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        return False

    for i0 in range(na):
        for j0 in range(nb):
            if a[i0] != b[j0]:
                continue
            if same_object and (i0 - j0) % na == 0 and na == nb:
                continue
            # require a run start: predecessors differ or are absent
            pa_prev = _directed_at(a, i0 - 1, na, cyc_a)
            pb_prev = _directed_at(b, j0 - 1, nb, cyc_b)
            if pa_prev is not None and pa_prev == pb_prev:
                continue
            # extend the shared run forward
            k = 1
            limit = min(na if cyc_a else na - i0, nb if cyc_b else nb - j0)
            while k < limit:
                xa = _directed_at(a, i0 + k, na, cyc_a)
                xb = _directed_at(b, j0 + k, nb, cyc_b)
                if xa is None or xb is None or xa != xb:
                    break
                k += 1
            # divergence at the forward end
            a_next = _directed_at(a, i0 + k, na, cyc_a)
            b_next = _directed_at(b, j0 + k, nb, cyc_b)
            if a_next is None or b_next is None or a_next == b_next:
                continue
            last = a[(i0 + k - 1) % na] if cyc_a else a[i0 + k - 1]
            h_in = tt.head_germ(last)
            v_e = tt.vertices[tt._vertex_of[h_in]]
            s_end = (_rot_pos(v_e.cyclic, h_in, tt.tail_germ(a_next))
                     < _rot_pos(v_e.cyclic, h_in, tt.tail_germ(b_next)))
            # divergence at the backward end
            if pa_prev is None or pb_prev is None:
                continue
            h_out = tt.tail_germ(a[i0])
            v_s = tt.vertices[tt._vertex_of[h_out]]
            s_start = (_rot_pos(v_s.cyclic, h_out, tt.head_germ(pa_prev))
                       < _rot_pos(v_s.cyclic, h_out, tt.head_germ(pb_prev)))
            if s_start == s_end:
                return True
    return False


def _vertex_cross(tt: TrainTrack, pa: EdgePath, pb: EdgePath) -> bool:
    """Transverse crossings at switches the paths pass without sharing edges."""
    a, cyc_a = _expand(pa)
    b, cyc_b = _expand(pb)
    na, nb = len(a), len(b)

    def transits(seq, n, cyc):
        out = []
        rng = range(n) if cyc else range(n - 1)
        for i in rng:
            d_in = seq[i]
            d_out = seq[(i + 1) % n]
            out.append((tt.head_germ(d_in), tt.tail_germ(d_out)))
        return out

    ta = transits(a, na, cyc_a)
    tb = transits(b, nb, cyc_b)
    for h_in_a, h_out_a in ta:
        vid = tt._vertex_of[h_in_a]
        cyclic = tt.vertices[vid].cyclic
        for h_in_b, h_out_b in tb:
            if tt._vertex_of[h_in_b] != vid:
                continue
            four = {h_in_a, h_out_a, h_in_b, h_out_b}
            if len(four) < 4:
                continue  # shared germs are handled by the run alignment
            if _chords_cross(cyclic, h_in_a, h_out_a, h_in_b, h_out_b):
                return True
    return False


# ---------------------------------------------------------------------------
# carrying


def _pants_classes(m: Sequence[int]) -> Dict[Tuple[int, int], int]:
    """Arc classes induced in a three-cuff pants by crossing numbers m.

    Keys (i, i) count arcs from cuff i back to itself (wrapping cuff i+1);
    keys (i, j) with i < j count arcs joining the two cuffs.
    """
    if sum(m) % 2:
        raise NotCarried("odd total crossing number %r in a pants" % (m,))
    if any(x < 0 for x in m):
        raise NotCarried("negative crossing number")
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        if m[i] > m[j] + m[k]:
            x = {(i, i): (m[i] - m[j] - m[k]) // 2,
                 (min(i, j), max(i, j)): m[j],
                 (min(i, k), max(i, k)): m[k]}
            return {key: val for key, val in x.items() if val > 0}
    x = {}
    for i, j in ((0, 1), (1, 2), (0, 2)):
        k = 3 - i - j
        val = (m[i] + m[j] - m[k]) // 2
        if val > 0:
            x[(i, j)] = val
    return x


def carrying_choice(pd: PantsDecomposition, multicurve) -> StandardChoice:
    """Choose the track that carries every component of the multicurve.

    Raises NotCarried when no standard choice works: crossing-number parity
    fails somewhere, two components force different self-loop slots in one
    pants, twist signs conflict on a cuff, or a component crosses a cuff that
    also carries a parallel component.
    """
    forced_type: Dict[int, str] = {}
    twist_sign: Dict[str, int] = {}
    parallel_cuffs = set()
    crossed_cuffs = set()
    cross_pairs: Dict[int, set] = {}

    def force(pid: int, track_type: str):
        prev = forced_type.get(pid)
        if prev is not None and prev != track_type:
            raise NotCarried(
                "pants %d needs both %s and %s" % (pid, prev, track_type))
        forced_type[pid] = track_type

    for comp in multicurve.components:
        if comp.kind == "cuff":
            parallel_cuffs.add(comp.cuff_id)
            continue
        if comp.kind == "path":
            for de in comp.path.edges:
                eid, _fwd = split_directed(de)
                if eid.startswith("K:"):
                    continue
                parts = eid.split(":")
                if len(parts) != 3 or parts[0] != "C" or not parts[1].isdigit():
                    raise NotCarried("path component uses unknown edge %r"
                                     % (eid,))
                pid = int(parts[1])
                pants = pd.pants_by_id(pid)
                if pants is None:
                    raise NotCarried("path component names unknown pants %d"
                                     % pid)
                name = parts[2]
                n_cusp = len(pants.cusp_slots())
                if n_cusp == 0:
                    if name in ("c01", "c12", "c20"):
                        force(pid, "pairwise")
                    # f/g/b/p/q are shared by all loop types -- no constraint
                elif n_cusp == 2:
                    force(pid, "cusp2")
            continue
        # DT component: per-cuff (m, t) data
        for cuff_id, (m, t) in comp.data.items():
            if m == 0 and t != 0:
                raise NotCarried(
                    "component twists cuff %s it does not cross" % cuff_id)
            if m > 0:
                known = any(cid == cuff_id
                            for cid, _sides, _ln in pd.all_cuffs())
                if not known:
                    raise NotCarried("unknown cuff %r" % (cuff_id,))
                crossed_cuffs.add(cuff_id)
                if t:
                    s = 1 if t > 0 else -1
                    prev = twist_sign.get(cuff_id)
                    if prev is not None and prev != s:
                        raise NotCarried(
                            "opposite twist directions on cuff %s" % cuff_id)
                    twist_sign[cuff_id] = s
        if all(m == 0 for m, _t in comp.data.values()):
            raise NotCarried("component never crosses a cuff; "
                             "give it as a cuff component")
        for pants in pd.pants:
            cuffs = pants.cuff_slots()
            m_by_slot = {s: 0 for s in range(3)}
            for s in cuffs:
                cid = pd.cuff_id(pants.id, s)
                if cid in comp.data:
                    m_by_slot[s] = comp.data[cid][0]
            if not any(m_by_slot.values()):
                continue
            n_cusp = len(pants.cusp_slots())
            if n_cusp == 0:
                classes = _pants_classes([m_by_slot[s] for s in range(3)])
                for (i, j), _val in classes.items():
                    if i == j:
                        force(pants.id, "loop%d" % i)
                    else:
                        cross_pairs.setdefault(pants.id, set()).add((i, j))
            elif n_cusp == 1:
                lo, hi = cuffs
                m_lo, m_hi = m_by_slot[lo], m_by_slot[hi]
                if (m_lo - m_hi) % 2:
                    raise NotCarried(
                        "pants %d: crossing numbers %d, %d differ in parity"
                        % (pants.id, m_lo, m_hi))
                if m_lo > m_hi:
                    force(pants.id, "loopP")
                elif m_hi > m_lo:
                    force(pants.id, "loopQ")
            else:
                (s,) = cuffs
                if m_by_slot[s] % 2:
                    raise NotCarried(
                        "pants %d: odd crossing number %d on its only cuff"
                        % (pants.id, m_by_slot[s]))
                force(pants.id, "cusp2")

    conflict = parallel_cuffs & crossed_cuffs
    if conflict:
        raise NotCarried(
            "cuffs %s carry both a parallel component and a crossing one"
            % sorted(conflict))

    # fill defaults and check self loops against pairwise classes
    types: Dict[int, str] = {}
    for pants in pd.pants:
        n_cusp = len(pants.cusp_slots())
        default = ("pairwise", "loopP", "cusp2")[n_cusp]
        chosen = forced_type.get(pants.id, default)
        if chosen.startswith("loop") and chosen[-1].isdigit():
            i = int(chosen[-1])
            blocked = tuple(sorted(((i + 1) % 3, (i + 2) % 3)))
            if blocked in cross_pairs.get(pants.id, set()):
                raise NotCarried(
                    "pants %d needs a self loop at slot %d and an arc "
                    "between the other two cuffs" % (pants.id, i))
        types[pants.id] = chosen

    tangencies: Dict[Tuple[int, int], str] = {}
    for cuff_id, sides, _ln in pd.all_cuffs():
        tan = "R" if twist_sign.get(cuff_id, 0) > 0 else "L"
        for pid, slot in sides:
            tangencies[(pid, slot)] = tan
    return StandardChoice(track_types=types, tangencies=tangencies)
