"""Edge-weight systems on train tracks and weighted multicurves.

Weights assign a nonnegative number to every branch; a system is admissible
when it balances at every switch (the two smooth sides sum equally).
Rational systems are realized as weighted multicurves by fattening each edge
into an integer-width band of strands and matching strand ends across each
switch by transverse position, which is forced by planarity.  The resulting
strand permutation decomposes into closed orbits; each orbit is one closed
carried curve.

Weight JSON: ``{"weights": {edge_id: w}, "mode": "rational"|"float"}`` with
rational entries written as ``"p/q"`` strings.
"""

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (
    BoundaryHit,
    DomainError,
    IrrationalWeight,
    MalformedTrack,
    NotCarried,
    SwitchViolation,
    UnknownEdge,
)
from ._tol import eps
from . import _matrix as mat
from .cover import (
    GeodesicBox,
    IdealPoint,
    LiftedGeodesic,
    axis_of,
    boundary_point,
    closed_path_holonomy,
    transport,
)
from .surface import PantsDecomposition, holonomy
from .traintrack import (
    EdgePath,
    TrainTrack,
    _pants_classes,
    flip_directed,
    is_edge_path,
    split_directed,
)

Weight = object  # Fraction in rational mode, float otherwise


def _as_fraction(w) -> Fraction:
    if isinstance(w, Fraction):
        return w
    if isinstance(w, int):
        return Fraction(w)
    if isinstance(w, str):
        return Fraction(w)
    if isinstance(w, float):
        f = Fraction(w).limit_denominator(10 ** 4)
        if abs(float(f) - w) > 1e-9:
            raise IrrationalWeight(
                "weight %r has no small rational form" % (w,))
        return f
    raise DomainError("cannot interpret %r as a weight" % (w,))


@dataclass(frozen=True)
class Component:
    """One weighted piece of a multicurve.

    kind "cuff": a curve parallel to the named cuff.
    kind "path": a closed carried edge path.
    kind "dt":   crossing data per cuff id, entries (m, t) with m >= 0
                 crossings and integer twist t.
    """

    kind: str
    weight: Weight
    cuff_id: Optional[str] = None
    path: Optional[EdgePath] = None
    data: Optional[Dict[str, Tuple[int, int]]] = None

    def __post_init__(self):
        if self.kind not in ("cuff", "path", "dt"):
            raise DomainError("unknown component kind %r" % (self.kind,))
        w = self.weight
        if not (isinstance(w, (int, float, Fraction)) and w > 0):
            raise DomainError("component weight must be positive, got %r"
                              % (w,))
        if self.kind == "cuff" and not self.cuff_id:
            raise DomainError("cuff component needs a cuff id")
        if self.kind == "path":
            if self.path is None or not self.path.closed:
                raise DomainError("path component needs a closed edge path")
        if self.kind == "dt":
            if not self.data:
                raise DomainError("dt component needs crossing data")
            for cid, (m, t) in self.data.items():
                if m < 0 or m != int(m) or t != int(t):
                    raise DomainError(
                        "dt entry for %s must be integers with m >= 0" % cid)


def cuff_component(cuff_id: str, weight) -> Component:
    return Component(kind="cuff", weight=weight, cuff_id=cuff_id)


def path_component(path: EdgePath, weight) -> Component:
    return Component(kind="path", weight=weight, path=path)


def dt_component(data: Dict[str, Tuple[int, int]], weight) -> Component:
    return Component(kind="dt", weight=weight,
                     data={k: (int(m), int(t)) for k, (m, t) in data.items()})


@dataclass(frozen=True)
class Multicurve:
    components: Tuple[Component, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def scaled(self, factor) -> "Multicurve":
        out = []
        for c in self.components:
            out.append(Component(kind=c.kind, weight=c.weight * factor,
                                 cuff_id=c.cuff_id, path=c.path, data=c.data))
        return Multicurve(tuple(out))

    def to_json_dict(self) -> dict:
        comps = []
        for c in self.components:
            entry = {"kind": c.kind, "weight": _weight_json(c.weight)}
            if c.kind == "cuff":
                entry["cuff"] = c.cuff_id
            elif c.kind == "path":
                entry["path"] = c.path.to_json_dict()
            else:
                entry["data"] = {cid: list(mt) for cid, mt in
                                 sorted(c.data.items())}
            comps.append(entry)
        return {"components": comps}

    @staticmethod
    def from_json_dict(data: dict) -> "Multicurve":
        try:
            raw = data["components"]
        except (KeyError, TypeError) as exc:
            raise DomainError("multicurve JSON needs 'components'") from exc
        comps = []
        for entry in raw:
            kind = entry.get("kind")
            weight = _weight_parse(entry.get("weight"))
            if kind == "cuff":
                comps.append(cuff_component(entry["cuff"], weight))
            elif kind == "path":
                comps.append(path_component(
                    EdgePath.from_json_dict(entry["path"]), weight))
            elif kind == "dt":
                comps.append(dt_component(
                    {cid: (mt[0], mt[1])
                     for cid, mt in entry["data"].items()}, weight))
            else:
                raise DomainError("unknown component kind %r" % (kind,))
        return Multicurve(tuple(comps))


def _weight_json(w):
    if isinstance(w, Fraction):
        return "%d/%d" % (w.numerator, w.denominator)
    if isinstance(w, int):
        return "%d/1" % w
    return float(w)

def _weight_parse(raw):
    if isinstance(raw, str):
        return Fraction(raw)
    if isinstance(raw, (int, float)):
        return raw
    raise DomainError("bad weight value %r" % (raw,))


@dataclass(frozen=True)
class EdgeWeightSystem:
    """Map edge id -> weight, with an exactness mode."""

    weights: Dict[str, Weight]
    mode: str = "rational"

    def __post_init__(self):
        if self.mode not in ("rational", "float"):
            raise DomainError("mode must be 'rational' or 'float'")
        for eid, w in self.weights.items():
            if w < 0:
                raise DomainError("negative weight on %s" % eid)

    def get(self, eid: str):
        return self.weights.get(eid, Fraction(0) if self.mode == "rational"
                                else 0.0)

    def to_json_dict(self) -> dict:
        return {
            "weights": {eid: _weight_json(w)
                        for eid, w in sorted(self.weights.items())},
            "mode": self.mode,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "EdgeWeightSystem":
        try:
            raw = data["weights"]
            mode = data.get("mode", "rational")
        except TypeError as exc:
            raise DomainError("weight JSON needs 'weights'") from exc
        weights = {}
        for eid, val in raw.items():
            w = _weight_parse(val)
            if mode == "rational":
                w = _as_fraction(w)
            else:
                w = float(w)
            weights[eid] = w
        return EdgeWeightSystem(weights=weights, mode=mode)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def loads(text: str) -> "EdgeWeightSystem":
        return EdgeWeightSystem.from_json_dict(json.loads(text))


def sup_norm(ews: EdgeWeightSystem):
    """Largest weight over all edges; 0 for an empty system."""
    if not ews.weights:
        return Fraction(0) if ews.mode == "rational" else 0.0
    return max(ews.weights.values())


# ---------------------------------------------------------------------------
# multicurve -> weights


def _cusp_classes(lo: int, hi: int, m_lo: int, m_hi: int):
    if (m_lo - m_hi) % 2:
        raise NotCarried(
            "crossing numbers %d, %d differ in parity on a one-cusp pants"
            % (m_lo, m_hi))
    classes = {}
    both = min(m_lo, m_hi)
    if both:
        classes[(lo, hi)] = both
    if m_lo > m_hi:
        classes[(lo, lo)] = (m_lo - m_hi) // 2
    elif m_hi > m_lo:
        classes[(hi, hi)] = (m_hi - m_lo) // 2
    return classes


def _classes_for_pants(pants, m_by_slot: Dict[int, int]):
    n_cusp = len(pants.cusp_slots())
    if n_cusp == 0:
        return _pants_classes([m_by_slot.get(s, 0) for s in range(3)])
    if n_cusp == 1:
        lo, hi = pants.cuff_slots()
        return _cusp_classes(lo, hi, m_by_slot.get(lo, 0),
                             m_by_slot.get(hi, 0))
    (k,) = pants.cuff_slots()
    m = m_by_slot.get(k, 0)
    if m % 2:
        raise NotCarried("odd crossing number %d on a two-cusp pants" % m)
    return {(k, k): m // 2} if m else {}


def _connector_counts(pants, track_type: str, classes) -> Dict[str, int]:
    """Traversal count per connector name for the given arc classes."""
    counts: Dict[str, int] = {}

    def bump(name, n):
        counts[name] = counts.get(name, 0) + n

    if track_type == "pairwise":
        names = {(0, 1): "c01", (1, 2): "c12", (0, 2): "c20"}
        for key, val in classes.items():
            if key[0] == key[1]:
                raise NotCarried(
                    "pairwise track cannot carry a self arc at slot %d"
                    % key[0])
            bump(names[key], val)
        return counts
    if track_type in ("loop0", "loop1", "loop2"):
        i = int(track_type[-1])
        j, k = (i + 1) % 3, (i + 2) % 3
        for (u, v), val in classes.items():
            if (u, v) == (i, i):
                bump("f", val)
                bump("g", val)
                bump("b", val)
            elif (u, v) == (min(i, j), max(i, j)):
                bump("f", val)
                bump("p", val)
            elif (u, v) == (min(i, k), max(i, k)):
                bump("g", val)
                bump("q", val)
            else:
                raise NotCarried(
                    "track %s cannot carry arc class %r" % (track_type,
                                                            (u, v)))
        return counts
    if track_type in ("loopP", "loopQ"):
        lo, hi = pants.cuff_slots()
        stem = lo if track_type == "loopP" else hi
        for (u, v), val in classes.items():
            if (u, v) == (lo, hi):
                bump("c", val)
            elif u == v == stem:
                bump("s", 2 * val)
                bump("o", val)
            else:
                raise NotCarried(
                    "track %s cannot carry arc class %r" % (track_type,
                                                            (u, v)))
        return counts
    if track_type == "cusp2":
        for (u, v), val in classes.items():
            if u != v:
                raise NotCarried("two-cusp pants has one cuff")
            bump("s", 2 * val)
            bump("o", val)
        return counts
    raise DomainError("unknown track type %r" % (track_type,))


def weights_from_multicurve(tt: TrainTrack, mc: Multicurve,
                            ) -> EdgeWeightSystem:
    """Edge weights f(e) = sum of weight x traversal count per component.

    Raises NotCarried when a component cannot run on this track: arc classes
    missing from the chosen type, twist sign against the cuff tangency,
    crossings over an unglued cuff, or a cuff both crossed and carried
    parallel.
    """
    pd = tt.pd
    weights: Dict[str, Fraction] = {}
    exact = True
    parallel_cuffs = set()
    crossed_cuffs = set()

    def bump(eid: str, amount):
        if eid not in tt.edges:
            raise UnknownEdge("no edge %r in track" % (eid,))
        weights[eid] = weights.get(eid, Fraction(0)) + amount

    glued = {}
    for cuff_id, sides, _length in pd.all_cuffs():
        glued[cuff_id] = len(sides) > 1

    for comp in mc.components:
        w = comp.weight
        if isinstance(w, float):
            exact = False
        if comp.kind == "cuff":
            if comp.cuff_id not in glued:
                raise UnknownEdge("no cuff %r" % (comp.cuff_id,))
            parallel_cuffs.add(comp.cuff_id)
            bump("K:" + comp.cuff_id, w)
            continue
        if comp.kind == "path":
            if not comp.path.closed:
                raise NotCarried("path components must be closed")
            if not is_edge_path(tt, comp.path):
                raise NotCarried("component path is not smooth on this track")
            for de in comp.path.edges:
                eid, _fwd = split_directed(de)
                bump(eid, w)
            continue
        # dt component
        for cuff_id, (m, t) in comp.data.items():
            if cuff_id not in glued:
                raise UnknownEdge("no cuff %r" % (cuff_id,))
            if m == 0:
                if t != 0:
                    raise NotCarried(
                        "component twists cuff %s it does not cross"
                        % cuff_id)
                continue
            if not glued[cuff_id]:
                raise NotCarried(
                    "no closed curve crosses the unglued cuff %s" % cuff_id)
            crossed_cuffs.add(cuff_id)
            sides = None
            for cid, cuff_sides, _ln in pd.all_cuffs():
                if cid == cuff_id:
                    sides = cuff_sides
                    break
            tan = tt.choice.tangency(*sides[0])
            if (t > 0 and tan == "L") or (t < 0 and tan == "R"):
                raise NotCarried(
                    "twist %d on cuff %s runs against its %s tangency"
                    % (t, cuff_id, tan))
            if t:
                bump("K:" + cuff_id, w * m * abs(t))
        if all(m == 0 for m, _t in comp.data.values()):
            raise NotCarried("dt component never crosses a cuff; "
                             "give it as a cuff component")
        for pants in pd.pants:
            m_by_slot = {}
            for s in pants.cuff_slots():
                cid = pd.cuff_id(pants.id, s)
                if cid in comp.data:
                    m_by_slot[s] = comp.data[cid][0]
            if not any(m_by_slot.values()):
                continue
            classes = _classes_for_pants(pants, m_by_slot)
            track_type = tt.choice.track_types[pants.id]
            for name, n in _connector_counts(pants, track_type,
                                             classes).items():
                bump("C:%d:%s" % (pants.id, name), w * n)

    mixed = parallel_cuffs & crossed_cuffs
    if mixed:
        raise NotCarried(
            "cuffs %s are both crossed and carried parallel"
            % sorted(mixed))

    mode = "rational" if exact else "float"
    if mode == "float":
        weights = {eid: float(v) for eid, v in weights.items()}
    return EdgeWeightSystem(weights=weights, mode=mode)


# ---------------------------------------------------------------------------
# switch relations


def switch_imbalances(tt: TrainTrack, ews: EdgeWeightSystem):
    """Per-vertex difference (minus-side sum) - (plus-side sum)."""
    out = {}
    for vid, v in tt.vertices.items():
        total = sum((ews.get(h[0]) for h in v.minus),
                    Fraction(0) if ews.mode == "rational" else 0.0)
        total -= sum(ews.get(h[0]) for h in v.plus)
        out[vid] = total
    return out


def validate_switch(tt: TrainTrack, ews: EdgeWeightSystem) -> bool:
    """True when every switch balances (exactly in rational mode)."""
    for diff in switch_imbalances(tt, ews).values():
        if ews.mode == "rational":
            if diff != 0:
                return False
        elif abs(diff) > eps():
            return False
    return True


# ---------------------------------------------------------------------------
# realization


def _integer_widths(tt: TrainTrack, ews: EdgeWeightSystem):
    fracs: Dict[str, Fraction] = {}
    for eid, w in ews.weights.items():
        tt.require_edge(eid)
        fracs[eid] = _as_fraction(w)
    scale = 1
    for f in fracs.values():
        scale = scale * f.denominator // math.gcd(scale, f.denominator)
    widths = {eid: int(f * scale) for eid, f in fracs.items()}
    return widths, scale


def _block_points(v, side, widths):
    """Strand points of one smooth block, scanned along the cyclic order.

    The block must be cyclically contiguous; the scan starts where the other
    block ends.  Zero-width germs contribute no points.
    """
    n = len(v.cyclic)
    flags = [h in side for h in v.cyclic]
    if all(flags):
        start = 0
    else:
        start = next(i for i in range(n) if flags[i] and not flags[i - 1])
    run = []
    k = start
    while len(run) < n and flags[k % n]:
        run.append(v.cyclic[k % n])
        k += 1
    if len(run) != sum(flags):
        raise MalformedTrack(
            "smooth side of switch %s is not cyclically contiguous" % v.id)
    pts = []
    for h in run:
        pts.extend((h, s) for s in range(widths.get(h[0], 0)))
    return pts


def realize_weights(tt: TrainTrack, ews: EdgeWeightSystem) -> Multicurve:
    """Decompose a balanced rational weight system into closed curves.

    Scales to integers, fattens each edge into that many strands, matches
    strands across switches by transverse position, and reads off the closed
    orbits.  Raises SwitchViolation for unbalanced input and IrrationalWeight
    for float weights with no small rational form.
    """
    if not validate_switch(tt, ews):
        raise SwitchViolation("weights do not balance at every switch")
    widths, scale = _integer_widths(tt, ews)
    widths = {eid: n for eid, n in widths.items() if n > 0}
    if not widths:
        return Multicurve(())

    # Strand matching at each switch.  The two smooth blocks occupy
    # complementary arcs of the fattened vertex boundary; with strand points
    # listed along the cyclic order (intra-germ slots ascending), the unique
    # non-crossing matching joins the i-th minus point to the (W-1-i)-th
    # plus point.
    cross = {}
    for v in tt.vertices.values():
        minus_pts = _block_points(v, set(v.minus), widths)
        plus_pts = _block_points(v, set(v.plus), widths)
        if len(minus_pts) != len(plus_pts):
            raise SwitchViolation("switch %s does not balance" % v.id)
        total = len(minus_pts)
        for i, a in enumerate(minus_pts):
            b = plus_pts[total - 1 - i]
            cross[a] = b
            cross[b] = a

    visited = set()
    orbits: Dict[Tuple[str, ...], Fraction] = {}
    for eid in sorted(widths):
        n = widths[eid]
        for end in (0, 1):
            for slot in range(n):
                start = (eid, end, slot)
                if start in visited:
                    continue
                word: List[str] = []
                state = start
                while True:
                    e, send, sslot = state
                    visited.add(state)
                    visited.add((e, 1 - send, widths[e] - 1 - sslot))
                    word.append("+" + e if send == 0 else "-" + e)
                    arrive_germ = (e, 1 - send)
                    arrive_slot = widths[e] - 1 - sslot
                    out_germ, out_slot = cross[(arrive_germ, arrive_slot)]
                    state = (out_germ[0], out_germ[1], out_slot)
                    if state == start:
                        break
                key = _canonical_cycle(tuple(word))
                orbits[key] = orbits.get(key, Fraction(0)) + Fraction(1, scale)

    comps = []
    for word in sorted(orbits):
        weight = orbits[word]
        if len(word) == 1 and word[0][1:].startswith("K:"):
            comps.append(cuff_component(word[0][3:], weight))
        else:
            comps.append(path_component(EdgePath(word, closed=True), weight))
    return Multicurve(tuple(comps))


def _canonical_cycle(word: Tuple[str, ...]) -> Tuple[str, ...]:
    """Least rotation over both traversal directions of a closed word."""
    best = None
    rev = tuple(flip_directed(d) for d in reversed(word))
    for w in (word, rev):
        for r in range(len(w)):
            cand = w[r:] + w[:r]
            if best is None or cand < best:
                best = cand
    return best


# ---------------------------------------------------------------------------
# random multicurves for property tests


def random_multicurve(pd: PantsDecomposition, rng: random.Random,
                      max_components: int = 5, max_q: int = 16) -> Multicurve:
    """A random weighted multicurve with pairwise disjoint components.

    Components are parallel cuff curves plus at most one crossing family,
    supported on glued cuffs only, with even crossing numbers (so every
    per-pants parity constraint holds on the example surfaces) and one twist
    sign per cuff.
    """
    glued = [cid for cid, sides, _ln in pd.all_cuffs() if len(sides) > 1]
    all_cuffs = [cid for cid, _s, _ln in pd.all_cuffs()]

    def rand_weight():
        q = rng.randint(1, max_q)
        p = rng.randint(1, 4 * q)
        return Fraction(p, q)

    comps: List[Component] = []
    budget = rng.randint(1, max_components)
    use_dt = glued and rng.random() < 0.7
    dt_cuffs = set()
    if use_dt:
        sign = rng.choice((1, -1))
        data = {}
        n_cross = rng.randint(1, min(3, len(glued)))
        for cid in rng.sample(glued, n_cross):
            m = 2 * rng.randint(1, 2)
            t = sign * rng.randint(0, 2)
            data[cid] = (m, t)
            dt_cuffs.add(cid)
        comps.append(dt_component(data, rand_weight()))
        budget -= 1
    free = [cid for cid in all_cuffs if cid not in dt_cuffs]
    rng.shuffle(free)
    for cid in free[:max(0, budget)]:
        comps.append(cuff_component(cid, rand_weight()))
    if not comps:
        comps.append(cuff_component(rng.choice(all_cuffs), rand_weight()))
    return Multicurve(tuple(comps))


# ---------------------------------------------------------------------------
# geodesic mass in boxes and the norm estimate

_TWO_PI = 2.0 * math.pi
_PHI = (1.0 + math.sqrt(5.0)) / 2.0


def _closed_components(tt: TrainTrack, mc: Multicurve):
    """(weight, closed EdgePath) per component, expanding crossing data."""
    if any(c.kind == "dt" for c in mc.components):
        mc = realize_weights(tt, weights_from_multicurve(tt, mc))
    out = []
    for c in mc.components:
        if c.kind == "cuff":
            out.append((c.weight,
                        EdgePath(("+K:" + c.cuff_id,), closed=True)))
        else:
            out.append((c.weight, c.path))
    return out


def _deck_generators(pd: PantsDecomposition):
    gens = []
    hol = holonomy(pd)
    for name in sorted(hol):
        m = mat.unit_det(hol[name])
        gens.append(m)
        gens.append(mat.sl2_inv(m))
    return gens


def _hyp_dist(z: complex, w: complex) -> float:
    return math.acosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def _dist_point_geodesic(z: complex, p: IdealPoint, q: IdealPoint) -> float:
    xp, xq = p.x, q.x
    y = z.imag
    if math.isinf(xp) or math.isinf(xq):
        a = xq if math.isinf(xp) else xp
        return math.asinh(abs(z.real - a) / y)
    spread = abs(xp - xq)
    if spread == 0.0:
        raise DomainError("geodesic endpoints coincide")
    c = (abs(z - xp) * abs(z - xq)) / (y * spread)
    return math.acosh(max(1.0, c))


def _geod_shape(p: IdealPoint, q: IdealPoint):
    """("line", x, None) for a vertical, else ("circle", center, radius)."""
    xp, xq = p.x, q.x
    if math.isinf(xp) or math.isinf(xq):
        return ("line", xq if math.isinf(xp) else xp, None)
    return ("circle", 0.5 * (xp + xq), 0.5 * abs(xp - xq))


def _cross_point(a, b):
    """Upper half-plane crossing of two complete geodesics, or None."""
    k1, c1, r1 = a
    k2, c2, r2 = b
    if k1 == "line" and k2 == "line":
        return None
    if k2 == "line":
        k1, c1, r1, k2, c2, r2 = k2, c2, r2, k1, c1, r1
    if k1 == "line":
        x = c1
        y2 = r2 * r2 - (x - c2) ** 2
    else:
        if c1 == c2:
            return None
        x = (r1 * r1 - r2 * r2 - c1 * c1 + c2 * c2) / (2.0 * (c2 - c1))
        y2 = r1 * r1 - (x - c1) ** 2
    if y2 <= 0.0:
        return None
    return complex(x, math.sqrt(y2))


def _box_anchor(box: GeodesicBox):
    """Basepoint on the box's separating geodesic, plus a reach bound.

    The separator joins the midpoints of the two boundary gaps between the
    box arcs, so every geodesic belonging to the box crosses it; by
    convexity the crossing stays within the reach of the basepoint, which
    is measured against the four corner geodesics.
    """
    ia, ib = box.i_start.angle, box.i_end.angle
    ja, jb = box.j_start.angle, box.j_end.angle
    s1 = boundary_point(ib + 0.5 * ((ja - ib) % _TWO_PI), box.chart)
    s2 = boundary_point(jb + 0.5 * ((ia - jb) % _TWO_PI), box.chart)
    sep = _geod_shape(s1, s2)
    pts = []
    for u in (box.i_start, box.i_end):
        for v in (box.j_start, box.j_end):
            z = _cross_point(sep, _geod_shape(u, v))
            if z is not None:
                pts.append(z)
    if not pts:
        if sep[0] == "circle":
            z0 = complex(sep[1], sep[2])
        else:
            z0 = complex(sep[1], max(1.0, abs(sep[1])))
        return z0, 8.0
    z0 = pts[0]
    return z0, max(_hyp_dist(z0, z) for z in pts)


def _orbit_key(z: complex, z0: complex):
    return (round((z.real - z0.real) / z0.imag, 7),
            round(math.log(z.imag / z0.imag), 7))


def _axis_pair_key(p: IdealPoint, q: IdealPoint):
    k1 = int(round(p.angle / _TWO_PI * 1e9)) % 1000000000
    k2 = int(round(q.angle / _TWO_PI * 1e9)) % 1000000000
    return (k1, k2) if k1 <= k2 else (k2, k1)


class _OnBoundary(Exception):
    pass


def _axis_apex(p: IdealPoint, q: IdealPoint) -> complex:
    shape = _geod_shape(p, q)
    if shape[0] == "line":
        return complex(shape[1], 1.0)
    return complex(shape[1], shape[2])


def _greedy_close(z0: complex, w0: complex, gens):
    """Deck word whose orbit point gets as near z0 as single steps allow."""
    g = mat.IDENT
    d = _hyp_dist(z0, w0)
    for _ in range(10000):
        best = None
        for s in gens:
            g2 = mat.mul(g, s)
            d2 = _hyp_dist(z0, mat.apply_cplx(g2, w0))
            if d2 < d - 1e-9 and (best is None or d2 < best[1]):
                best = (g2, d2)
        if best is None:
            return g, d
        g, d = best
    return g, d


def _lift_count_in_box(box: GeodesicBox, axis: LiftedGeodesic,
                       half_period: float, gens, z0: complex,
                       reach: float) -> int:
    """Distinct deck translates of the axis belonging to the box.

    Every translate in the box crosses the separator within reach of the
    anchor z0, so some point of it sits within reach + half_period of z0.
    Translates are grown breadth-first from a word brought near the anchor
    by greedy descent, pruned once their track point on the axis leaves a
    ball around z0 wide enough (ball convexity plus a fellow-traveling
    allowance) to keep every member reachable.  The pruning ball holds
    finitely many orbit points, so the walk terminates on its own.
    """
    w0 = _axis_apex(axis.p, axis.q)
    start, d0 = _greedy_close(z0, w0, gens)
    cut = max(reach + half_period, d0) + 4.0
    seen_orbit = {_orbit_key(mat.apply_cplx(start, w0), z0)}
    seen_axes = set()
    count = 0
    queue = [start]
    while queue:
        nxt = []
        for g in queue:
            moved = LiftedGeodesic(axis.p.apply(g), axis.q.apply(g))
            key = _axis_pair_key(moved.p, moved.q)
            if key not in seen_axes:
                seen_axes.add(key)
                cls = box.classify(moved, margin=1e-9)
                if cls == "boundary":
                    raise _OnBoundary()
                if cls == "in":
                    count += 1
            for s in gens:
                g2 = mat.mul(g, s)
                z = mat.apply_cplx(g2, w0)
                k2 = _orbit_key(z, z0)
                if k2 in seen_orbit:
                    continue
                if _hyp_dist(z0, z) > cut:
                    continue
                seen_orbit.add(k2)
                nxt.append(g2)
        queue = nxt
    return count


def box_mass(pd: PantsDecomposition, tt: TrainTrack, mc: Multicurve,
             box: GeodesicBox):
    """Total weight of the carried lifts joining the box's two arcs.

    Each component contributes its weight once per deck translate of its
    axis with one ideal endpoint on each arc.  A lift endpoint landing on
    the box boundary nudges the corners by 1e-7 (three tries) before
    giving up with BoundaryHit.  Exact (Fraction) when every component
    weight is exact.
    """
    if box.chart != "global":
        raise DomainError("box mass needs a box in the global chart")
    comps = _closed_components(tt, mc)
    if not comps:
        return 0
    gens = _deck_generators(pd)
    axes = [(w, axis_of(tt, path),
             0.5 * mat.translation_length(closed_path_holonomy(tt, path)))
            for w, path in comps]
    for attempt in range(4):
        b = box if attempt == 0 else box.rotated(attempt * 1e-7)
        z0, reach = _box_anchor(b)
        total = 0
        try:
            for w, ax, half in axes:
                total = total + w * _lift_count_in_box(b, ax, half, gens,
                                                       z0, reach)
        except _OnBoundary:
            continue
        return total
    raise BoundaryHit("a carried endpoint stays on the box boundary "
                      "after three perturbations")


def thurston_norm_estimate(pd: PantsDecomposition, tt: TrainTrack,
                           mc: Multicurve, sample_count: int = 200) -> float:
    """Largest weighted count of carried lifts meeting a radius-1 ball,
    over deterministically sampled ball centers.

    Centers walk every cuff geodesic at golden-ratio spacing, so a larger
    sample_count refines the same family and the estimate only grows.  At
    a center, the lifts tested are the passes of each component through
    that cuff's switch together with their deck translates along the cuff,
    measured by axis-to-center distance; skipping lifts that stay off the
    cuff keeps this a lower bound.
    """
    comps = _closed_components(tt, mc)
    if not comps or sample_count <= 0:
        return 0.0
    trp = transport(tt)
    cuffs = sorted(trp.cuff_length)
    passes = {cid: [] for cid in cuffs}
    for w, path in comps:
        for j, de in enumerate(path.edges):
            vid = tt.tail_vertex(de)
            if not vid.startswith("a:"):
                continue
            cyc = path.edges[j:] + path.edges[:j]
            passes[vid[2:]].append((w, mat.unit_det(trp.path_matrix(cyc))))
    best = 0.0
    n = len(cuffs)
    for k in range(sample_count):
        cid = cuffs[k % n]
        ell = trp.cuff_length[cid]
        t = ell * (((k // n) + 1) * _PHI % 1.0)
        z = complex(0.0, math.exp(t))
        seen = set()
        total = 0.0
        for w, hloc in passes[cid]:
            for shift in (-2, -1, 0, 1, 2):
                d = mat.trans(shift * ell)
                m = mat.chain(d, hloc, mat.sl2_inv(d))
                try:
                    att, rep = mat.fixed_points(m)
                except ValueError:
                    continue
                p = IdealPoint(att[0], att[1])
                q = IdealPoint(rep[0], rep[1])
                key = _axis_pair_key(p, q)
                if key in seen:
                    continue
                if _dist_point_geodesic(z, p, q) <= 1.0:
                    seen.add(key)
                    total += float(w)
        best = max(best, total)
    return best


@dataclass(frozen=True)
class NormReport:
    """Both norms of a multicurve and their empirical comparison constants.

    c_star and k_star are the smallest constants with
    sup_norm <= c_star * thurston_estimate and
    thurston_estimate <= k_star * sup_norm.
    """

    sup_norm: float
    thurston_estimate: float
    c_star: float
    k_star: float

    def to_json_dict(self) -> dict:
        return {
            "sup_norm": self.sup_norm,
            "thurston_estimate": self.thurston_estimate,
            "c_star": self.c_star,
            "k_star": self.k_star,
        }


def norm_report(pd: PantsDecomposition, tt: TrainTrack, mc: Multicurve,
                sample_count: int = 200) -> NormReport:
    s = float(sup_norm(weights_from_multicurve(tt, mc)))
    th = thurston_norm_estimate(pd, tt, mc, sample_count)
    c = s / th if th > 0.0 else (0.0 if s == 0.0 else math.inf)
    k = th / s if s > 0.0 else (0.0 if th == 0.0 else math.inf)
    return NormReport(sup_norm=s, thurston_estimate=th, c_star=c, k_star=k)
