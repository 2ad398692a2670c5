"""Command-line front end.

Subcommands build example surfaces, validate them, dump train tracks,
convert between multicurves and edge weight systems, evaluate norms and
box masses, and draw SVG pictures of the universal cover.

Exit codes: 0 on success, 1 when a geometric operation fails or a
validation check does not hold, 2 on malformed input or flags.  Output is
canonical: keys sorted, floats printed with 12 significant digits, so
identical inputs give byte-identical files.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Tuple

from . import _matrix as mat
from . import cover
from . import measures
from . import surface
from . import traintrack
from .errors import LamtrackError

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INPUT = 2


class _InputError(Exception):
    """Malformed file or flag; reported with exit code 2."""


# ---------------------------------------------------------------------------
# canonical JSON

def _fmt(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".12g")


def _emit(value, out) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_fmt(value))
    elif isinstance(value, dict):
        out.append("{")
        first = True
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            if not first:
                out.append(", ")
            first = False
            out.append(json.dumps(key))
            out.append(": ")
            _emit(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError("cannot serialize %r" % (type(value),))


def canonical_json(value) -> str:
    out = []
    _emit(value, out)
    out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# file plumbing

def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputError("cannot read %s: %s" % (path, exc))


def _read_json(path: str):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _InputError("%s: line %d column %d: %s"
                          % (path, exc.lineno, exc.colno, exc.msg))


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_surface(path: str) -> surface.PantsDecomposition:
    data = _read_json(path)
    try:
        return surface.from_json_dict(data)
    except (LamtrackError, KeyError, TypeError, ValueError) as exc:
        raise _InputError("%s: bad surface description (%s)" % (path, exc))


def _load_multicurve(path: str) -> measures.Multicurve:
    data = _read_json(path)
    try:
        return measures.Multicurve.from_json_dict(data)
    except (LamtrackError, KeyError, TypeError, ValueError) as exc:
        raise _InputError("%s: bad multicurve (%s)" % (path, exc))


def _load_weights(path: str) -> measures.EdgeWeightSystem:
    data = _read_json(path)
    try:
        return measures.EdgeWeightSystem.from_json_dict(data)
    except (LamtrackError, KeyError, TypeError, ValueError) as exc:
        raise _InputError("%s: bad weight system (%s)" % (path, exc))


def _load_track_choice(path: str) -> traintrack.StandardChoice:
    data = _read_json(path)
    try:
        ch = data["choice"]
        types = {int(k): str(v) for k, v in ch["track_types"].items()}
        tang = {}
        for key, val in ch["tangencies"].items():
            pid, slot = key.split(":")
            tang[(int(pid), int(slot))] = str(val)
        return traintrack.StandardChoice(types, tang)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise _InputError("%s: bad track file (%s)" % (path, exc))


def _load_boxes(path: str):
    data = _read_json(path)
    raw = data.get("boxes") if isinstance(data, dict) else None
    if not isinstance(raw, list) or not raw:
        raise _InputError("%s: expected {\"boxes\": [[a,b,c,d], ...]}"
                          % path)
    boxes = []
    for i, corner in enumerate(raw):
        if (not isinstance(corner, list) or len(corner) != 4
                or not all(isinstance(v, (int, float)) for v in corner)):
            raise _InputError("%s: box %d needs four corner angles"
                              % (path, i))
        try:
            boxes.append(cover.box_from_angles([float(v) for v in corner]))
        except LamtrackError as exc:
            raise _InputError("%s: box %d: %s" % (path, i, exc))
    return boxes


def _pick_track(pd, args, mc=None) -> traintrack.TrainTrack:
    """Track selection shared by the conversion subcommands."""
    if getattr(args, "track", None):
        return traintrack.build_track(pd, _load_track_choice(args.track))
    if mc is not None and getattr(args, "tangency", "auto") == "auto":
        return traintrack.build_track(pd, traintrack.carrying_choice(pd, mc))
    tangency = getattr(args, "tangency", "L")
    if tangency == "auto":
        tangency = "L"
    return traintrack.build_track(
        pd, traintrack.standard_choice(pd, tangency=tangency))


# ---------------------------------------------------------------------------
# subcommands

def _cmd_gen(args) -> int:
    try:
        pd = surface.build_example(args.kind, args.depth,
                                   cuff_length=args.cuff_length,
                                   twist=args.twist)
    except LamtrackError as exc:
        raise _InputError(str(exc))
    _write_text(args.out, canonical_json(surface.to_json_dict(pd)))
    return EXIT_OK


def _cmd_validate(args) -> int:
    pd = _load_surface(args.surface)
    ok = True
    bounded = surface.validate_bounded(pd, args.bound)
    print("bounded-geometry: %s" % ("ok" if bounded else "fail"))
    ok = ok and bounded
    if args.weights:
        ews = _load_weights(args.weights)
        try:
            tt = _pick_track(pd, args)
            balanced = measures.validate_switch(tt, ews)
            note = "ok" if balanced else "fail"
        except LamtrackError as exc:
            balanced = False
            note = "fail (%s)" % exc
        print("switch-relations: %s" % note)
        ok = ok and balanced
    else:
        print("switch-relations: skipped (no weight system given)")
    return EXIT_OK if ok else EXIT_DOMAIN


def _cmd_track(args) -> int:
    pd = _load_surface(args.surface)
    tt = traintrack.build_track(
        pd, traintrack.standard_choice(pd, tangency=args.tangency))
    _write_text(args.out, canonical_json(tt.to_json_dict()))
    return EXIT_OK


def _cmd_weights(args) -> int:
    pd = _load_surface(args.surface)
    mc = _load_multicurve(args.multicurve)
    tt = _pick_track(pd, args, mc=mc)
    ews = measures.weights_from_multicurve(tt, mc)
    _write_text(args.out, canonical_json(ews.to_json_dict()))
    return EXIT_OK


def _cmd_realize(args) -> int:
    pd = _load_surface(args.surface)
    ews = _load_weights(args.weights)
    tt = _pick_track(pd, args)
    mc = measures.realize_weights(tt, ews)
    _write_text(args.out, canonical_json(mc.to_json_dict()))
    return EXIT_OK


def _cmd_norms(args) -> int:
    pd = _load_surface(args.surface)
    mc = _load_multicurve(args.multicurve)
    tt = _pick_track(pd, args, mc=mc)
    if args.samples < 1:
        raise _InputError("--samples must be at least 1")
    rep = measures.norm_report(pd, tt, mc, sample_count=args.samples)
    _write_text(args.out, canonical_json(rep.to_json_dict()))
    return EXIT_OK


def _cmd_boxmass(args) -> int:
    pd = _load_surface(args.surface)
    mc = _load_multicurve(args.multicurve)
    boxes = _load_boxes(args.boxes)
    tt = _pick_track(pd, args, mc=mc)
    masses = [measures.box_mass(pd, tt, mc, box) for box in boxes]
    blob = {"masses": [measures._weight_json(m) for m in masses]}
    _write_text(args.out, canonical_json(blob))
    return EXIT_OK


# ---------------------------------------------------------------------------
# SVG rendering

_LAYERS = ("cuff-lifts", "skeleton", "track", "boxes", "carried-geodesics")

_LAYER_STYLE = {
    "cuff-lifts": ("#9aa2ab", 1.0),
    "skeleton": ("#2e9e4f", 0.8),
    "track": ("#d64545", 1.2),
    "boxes": ("#8455c8", 1.4),
    "carried-geodesics": ("#2f6fd6", 1.2),
}


@dataclass(frozen=True)
class RenderSpec:
    """What to draw: picture model, layer set, and deck-word radius."""

    model: str
    layers: Tuple[str, ...]
    radius: int
    out_path: str

    def __post_init__(self):
        if self.model not in ("disk", "halfplane"):
            raise _InputError("model must be 'disk' or 'halfplane'")
        if self.radius < 0:
            raise _InputError("deck-word radius must be >= 0")
        if not self.layers:
            raise _InputError("at least one layer is required")
        for name in self.layers:
            if name not in _LAYERS:
                raise _InputError("unknown layer %r (choose from %s)"
                                  % (name, ", ".join(_LAYERS)))


def _mat_key(m):
    a, b, c, d = m
    for v in (a, b, c, d):
        if abs(v) > 1e-9:
            if v < 0:
                a, b, c, d = -a, -b, -c, -d
            break
    return (round(a, 6), round(b, 6), round(c, 6), round(d, 6))


def _deck_words(pd, radius: int):
    hol = surface.holonomy(pd)
    gens = []
    for name in sorted(hol):
        g = mat.unit_det(hol[name])
        gens.append(g)
        gens.append(mat.sl2_inv(g))
    words = [mat.IDENT]
    seen = {_mat_key(mat.IDENT)}
    frontier = [mat.IDENT]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in gens:
                g2 = mat.unit_det(mat.mul(g, s))
                key = _mat_key(g2)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(g2)
                words.append(g2)
        frontier = nxt
    return words


def _angle_key(p: cover.IdealPoint, q: cover.IdealPoint):
    a = int(round(p.angle * 1e8))
    b = int(round(q.angle * 1e8))
    return (a, b) if a <= b else (b, a)


class _Canvas:
    """Collects SVG path strings for one picture model.

    Coordinates are emitted with the vertical axis flipped, matching the
    SVG convention; arc sweep flags are chosen in emitted coordinates.
    """

    def __init__(self, model: str):
        self.model = model

    def header(self) -> str:
        if self.model == "disk":
            return ('<svg xmlns="http://www.w3.org/2000/svg" '
                    'viewBox="-1.1 -1.1 2.2 2.2">\n'
                    '<circle cx="0" cy="0" r="1" fill="none" '
                    'stroke="#30343a" stroke-width="0.008"/>\n')
        return ('<svg xmlns="http://www.w3.org/2000/svg" '
                'viewBox="-6 -6.2 12 6.4">\n'
                '<line x1="-6" y1="0" x2="6" y2="0" '
                'stroke="#30343a" stroke-width="0.02"/>\n')

    def stroke_width(self, factor: float) -> float:
        base = 0.006 if self.model == "disk" else 0.03
        return base * factor

    def geodesic(self, p: cover.IdealPoint, q: cover.IdealPoint) -> str:
        if self.model == "disk":
            arc = cover.geodesic_disk_arc(p, q)
            if arc[0] == "line":
                (x1, y1), (x2, y2) = arc[1], arc[2]
                return "M %s %s L %s %s" % (_fmt(x1), _fmt(-y1),
                                            _fmt(x2), _fmt(-y2))
            (x1, y1), (x2, y2), r, sweep = arc[1], arc[2], arc[3], arc[4]
            return "M %s %s A %s %s 0 0 %d %s %s" % (
                _fmt(x1), _fmt(-y1), _fmt(r), _fmt(r), 1 - sweep,
                _fmt(x2), _fmt(-y2))
        xa, xb = p.x, q.x
        if math.isinf(xa) or math.isinf(xb):
            x = xb if math.isinf(xa) else xa
            return "M %s 0 L %s -6.2" % (_fmt(x), _fmt(x))
        lo, hi = (xa, xb) if xa <= xb else (xb, xa)
        r = 0.5 * (hi - lo)
        return "M %s 0 A %s %s 0 0 1 %s 0" % (_fmt(lo), _fmt(r), _fmt(r),
                                              _fmt(hi))

    def segment(self, z1: complex, z2: complex) -> str:
        """Geodesic segment between two interior points."""
        if self.model == "disk":
            x1, y1 = cover.interior_disk_xy(z1)
            x2, y2 = cover.interior_disk_xy(z2)
        else:
            x1, y1 = z1.real, z1.imag
            x2, y2 = z2.real, z2.imag
        q1 = (x1, -y1)
        q2 = (x2, -y2)
        center = self._arc_center(x1, y1, x2, y2)
        if center is None:
            return "M %s %s L %s %s" % (_fmt(q1[0]), _fmt(q1[1]),
                                        _fmt(q2[0]), _fmt(q2[1]))
        cx, cy = center[0], -center[1]
        r = math.hypot(q1[0] - cx, q1[1] - cy)
        a1 = math.atan2(q1[1] - cy, q1[0] - cx)
        a2 = math.atan2(q2[1] - cy, q2[0] - cx)
        sweep = 1 if (a2 - a1) % (2.0 * math.pi) < math.pi else 0
        return "M %s %s A %s %s 0 0 %d %s %s" % (
            _fmt(q1[0]), _fmt(q1[1]), _fmt(r), _fmt(r), sweep,
            _fmt(q2[0]), _fmt(q2[1]))

    def _arc_center(self, x1, y1, x2, y2):
        """Center of the geodesic circle through two points, or None."""
        if self.model == "halfplane":
            if abs(x1 - x2) < 1e-12:
                return None
            cx = (x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2) / (2.0 * (x1 - x2))
            return (cx, 0.0)
        b1 = 0.5 * (1.0 + x1 * x1 + y1 * y1)
        b2 = 0.5 * (1.0 + x2 * x2 + y2 * y2)
        det = x1 * y2 - y1 * x2
        if abs(det) < 1e-12:
            return None
        return ((b1 * y2 - b2 * y1) / det, (x1 * b2 - x2 * b1) / det)

    def boundary_arc(self, t1: float, t2: float) -> str:
        """Arc of the circle at infinity from angle t1 to t2 (ccw)."""
        if self.model != "disk":
            lo, hi = sorted((cover.boundary_point(t1).x,
                             cover.boundary_point(t2).x))
            if math.isinf(hi):
                return "M %s 0 L 6 0" % _fmt(lo)
            return "M %s 0 L %s 0" % (_fmt(lo), _fmt(hi))
        span = (t2 - t1) % (2.0 * math.pi)
        large = 1 if span > math.pi else 0
        return "M %s %s A 1 1 0 %d 0 %s %s" % (
            _fmt(math.cos(t1)), _fmt(-math.sin(t1)), large,
            _fmt(math.cos(t2)), _fmt(-math.sin(t2)))


def _render(pd, tt, mc, boxes, spec: RenderSpec) -> str:
    canvas = _Canvas(spec.model)
    words = _deck_words(pd, spec.radius)
    pl = surface.place(pd)
    parts = [canvas.header()]
    for layer in _LAYERS:
        if layer not in spec.layers:
            continue
        color, weight = _LAYER_STYLE[layer]
        parts.append('<g id="%s" fill="none" stroke="%s" '
                     'stroke-width="%s">\n'
                     % (layer, color, _fmt(canvas.stroke_width(weight))))
        for d in _layer_paths(layer, pd, tt, mc, boxes, words, pl, canvas):
            parts.append('<path d="%s"/>\n' % d)
        parts.append("</g>\n")
    parts.append("</svg>\n")
    return "".join(parts)


def _layer_paths(layer, pd, tt, mc, boxes, words, pl, canvas):
    zero = cover.point_from_real(0.0)
    infinity = cover.IdealPoint(1.0, 0.0)
    if layer == "cuff-lifts":
        seen = set()
        for cid, sides, _length in sorted(pd.all_cuffs()):
            chart = surface.slot_chart_map(pl, pd, *sides[0])
            p = zero.apply(chart)
            q = infinity.apply(chart)
            for g in words:
                pg, qg = p.apply(g), q.apply(g)
                key = _angle_key(pg, qg)
                if key in seen:
                    continue
                seen.add(key)
                yield canvas.geodesic(pg, qg)
    elif layer == "skeleton":
        seen = set()
        for pants in pd.pants:
            geo = pl.geometries[pants.id]
            for arc in geo.arcs:
                (s1, o1), (s2, o2) = arc.ends
                z1 = mat.apply_cplx(
                    surface.slot_chart_map(pl, pd, pants.id, s1),
                    complex(0.0, math.exp(o1)))
                z2 = mat.apply_cplx(
                    surface.slot_chart_map(pl, pd, pants.id, s2),
                    complex(0.0, math.exp(o2)))
                for g in words:
                    w1, w2 = mat.apply_cplx(g, z1), mat.apply_cplx(g, z2)
                    key = (round(w1.real, 8), round(w1.imag, 8),
                           round(w2.real, 8), round(w2.imag, 8))
                    if key in seen:
                        continue
                    seen.add(key)
                    yield canvas.segment(w1, w2)
    elif layer == "track":
        if tt is None:
            return
        trp = cover.transport(tt)
        seen = set()
        for eid in sorted(tt.edges):
            chart = trp.vertex_chart(tt.tail_vertex("+" + eid))
            z1 = mat.apply_cplx(chart, 1j)
            z2 = mat.apply_cplx(mat.mul(chart, trp.edge_matrix("+" + eid)),
                                1j)
            for g in words:
                w1, w2 = mat.apply_cplx(g, z1), mat.apply_cplx(g, z2)
                key = (round(w1.real, 8), round(w1.imag, 8),
                       round(w2.real, 8), round(w2.imag, 8))
                if key in seen:
                    continue
                seen.add(key)
                yield canvas.segment(w1, w2)
    elif layer == "boxes":
        for box in boxes or ():
            yield canvas.boundary_arc(box.i_start.angle, box.i_end.angle)
            yield canvas.boundary_arc(box.j_start.angle, box.j_end.angle)
            for u in (box.i_start, box.i_end):
                for v in (box.j_start, box.j_end):
                    yield canvas.geodesic(u, v)
    elif layer == "carried-geodesics":
        if tt is None or mc is None:
            return
        seen = set()
        for _w, path in measures._closed_components(tt, mc):
            axis = cover.axis_of(tt, path)
            for g in words:
                pg, qg = axis.p.apply(g), axis.q.apply(g)
                key = _angle_key(pg, qg)
                if key in seen:
                    continue
                seen.add(key)
                yield canvas.geodesic(pg, qg)


def _cmd_render(args) -> int:
    spec = RenderSpec(model=args.model,
                      layers=tuple(s for s in args.layers.split(",") if s),
                      radius=args.radius,
                      out_path=args.out)
    pd = _load_surface(args.surface)
    mc = _load_multicurve(args.multicurve) if args.multicurve else None
    boxes = _load_boxes(args.boxes) if args.boxes else None
    tt = None
    if "track" in spec.layers or "carried-geodesics" in spec.layers:
        tt = _pick_track(pd, args, mc=mc)
    _write_text(spec.out_path, _render(pd, tt, mc, boxes, spec))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized operations; identical "
                             "seeds give identical output")
    common.add_argument("--threads", type=int, default=1,
                        help="worker budget for library reductions; results "
                             "are reduced in a fixed order, so the count "
                             "never changes output")
    common.add_argument("-o", "--out", default="-",
                        help="output path ('-' for stdout)")

    track_source = argparse.ArgumentParser(add_help=False)
    track_source.add_argument("--track", default=None,
                              help="track file (from the 'track' "
                                   "subcommand) to reuse")
    track_source.add_argument("--tangency", default="auto",
                              choices=("auto", "L", "R"),
                              help="tangency side when no track file is "
                                   "given; 'auto' fits the multicurve")

    parser = argparse.ArgumentParser(
        prog="lamtrack",
        description="Train tracks and weighted multicurves on glued "
                    "pairs of hyperbolic pants.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common],
                       help="write an example surface")
    p.add_argument("--kind", required=True,
                   choices=("tree", "ladder", "flute"))
    p.add_argument("--depth", required=True, type=int)
    p.add_argument("--cuff-length", type=float,
                   default=surface.DEFAULT_CUFF_LENGTH)
    p.add_argument("--twist", type=float, default=0.0)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", parents=[common, track_source],
                       help="check bounded geometry and switch balance")
    p.add_argument("--surface", required=True)
    p.add_argument("--bound", type=float, default=20.0,
                   help="cuff lengths must lie in [1/bound, bound]")
    p.add_argument("--weights", default=None,
                   help="weight system to balance-check on the track")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("track", parents=[common],
                       help="build and dump the standard track")
    p.add_argument("--surface", required=True)
    p.add_argument("--tangency", default="L", choices=("L", "R"))
    p.set_defaults(func=_cmd_track)

    p = sub.add_parser("weights", parents=[common, track_source],
                       help="convert a multicurve to edge weights")
    p.add_argument("--surface", required=True)
    p.add_argument("--multicurve", required=True)
    p.set_defaults(func=_cmd_weights)

    p = sub.add_parser("realize", parents=[common, track_source],
                       help="convert edge weights back to a multicurve")
    p.add_argument("--surface", required=True)
    p.add_argument("--weights", required=True)
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("norms", parents=[common, track_source],
                       help="sup norm, ball-count estimate, and ratios")
    p.add_argument("--surface", required=True)
    p.add_argument("--multicurve", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=_cmd_norms)

    p = sub.add_parser("boxmass", parents=[common, track_source],
                       help="carried mass inside boundary-arc boxes")
    p.add_argument("--surface", required=True)
    p.add_argument("--multicurve", required=True)
    p.add_argument("--boxes", required=True,
                   help="JSON file {\"boxes\": [[a,b,c,d], ...]} of "
                        "corner angles in the global chart")
    p.set_defaults(func=_cmd_boxmass)

    p = sub.add_parser("render", parents=[common, track_source],
                       help="draw cover geometry as SVG")
    p.add_argument("--surface", required=True)
    p.add_argument("--multicurve", default=None)
    p.add_argument("--boxes", default=None)
    p.add_argument("--model", default="disk",
                   choices=("disk", "halfplane"))
    p.add_argument("--layers", default="cuff-lifts",
                   help="comma list from: %s" % ", ".join(_LAYERS))
    p.add_argument("--radius", type=int, default=1,
                   help="deck-word radius for repeated copies")
    p.set_defaults(func=_cmd_render)

    return parser


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return EXIT_OK
        return EXIT_INPUT
    try:
        return args.func(args)
    except _InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except LamtrackError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
