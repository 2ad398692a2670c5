import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from lamtrack import _matrix as mat
from lamtrack import cover as C
from lamtrack import measures as M
from lamtrack import surface as S
from lamtrack import traintrack as T
from lamtrack.errors import (
    DomainError,
    IrrationalWeight,
    NotCarried,
    SwitchViolation,
    UnknownEdge,
)


def standard_track(kind, depth):
    pd = S.build_example(kind, depth)
    return pd, T.build_track(pd, T.standard_choice(pd))


# -- weight systems ---------------------------------------------------------


def test_weight_json_round_trip():
    ews = M.EdgeWeightSystem(weights={"K:g0": Fraction(5, 2),
                                      "C:0:c01": Fraction(3)},
                             mode="rational")
    text = ews.dumps()
    assert '"5/2"' in text and '"3/1"' in text
    back = M.EdgeWeightSystem.loads(text)
    assert back == ews
    assert back.dumps() == text


def test_weight_system_rejects_negative():
    with pytest.raises(DomainError):
        M.EdgeWeightSystem(weights={"K:g0": Fraction(-1)})


def test_sup_norm():
    assert M.sup_norm(M.EdgeWeightSystem(weights={})) == 0
    ews = M.EdgeWeightSystem(weights={"a": Fraction(1, 3),
                                      "b": Fraction(7, 2)})
    assert M.sup_norm(ews) == Fraction(7, 2)


# -- weights from multicurves -----------------------------------------------


def test_cuff_component_gives_single_entry():
    pd, tt = standard_track("tree", 1)
    mc = M.Multicurve((M.cuff_component("b0s1", Fraction(5, 2)),))
    ews = M.weights_from_multicurve(tt, mc)
    assert ews.weights == {"K:b0s1": Fraction(5, 2)}
    assert ews.mode == "rational"


def test_dt_weights_with_twist():
    pd = S.build_example("tree", 2)
    g0 = pd.cuff_id(0, 0)
    mc = M.Multicurve((M.dt_component({g0: (2, -1)}, Fraction(3, 4)),))
    tt = T.build_track(pd, T.carrying_choice(pd, mc))
    ews = M.weights_from_multicurve(tt, mc)
    # self loop in each adjacent pants, one ride per crossing on the cuff
    w = Fraction(3, 4)
    assert ews.weights["K:" + g0] == 2 * w
    for pid in (0, 1):
        for name in ("f", "g", "b"):
            assert ews.weights["C:%d:%s" % (pid, name)] == w


def test_weights_reject_crossing_unglued_cuff():
    pd, tt = standard_track("tree", 1)
    mc = M.Multicurve((M.dt_component({"b0s0": (2, 0)}, 1),))
    tt_loop = T.build_track(pd, T.carrying_choice(pd, mc))
    with pytest.raises(NotCarried):
        M.weights_from_multicurve(tt_loop, mc)


def test_weights_reject_type_mismatch():
    pd = S.build_example("tree", 2)
    g0 = pd.cuff_id(0, 0)
    mc = M.Multicurve((M.dt_component({g0: (2, 0)}, 1),))
    # the default pairwise track cannot carry the forced self loops
    tt = T.build_track(pd, T.standard_choice(pd))
    with pytest.raises(NotCarried):
        M.weights_from_multicurve(tt, mc)


def test_weights_reject_twist_against_tangency():
    pd = S.build_example("tree", 2)
    g0 = pd.cuff_id(0, 0)
    mc = M.Multicurve((M.dt_component({g0: (2, 1)}, 1),))
    tt = T.build_track(pd, T.carrying_choice(
        pd, M.Multicurve((M.dt_component({g0: (2, -1)}, 1),))))
    with pytest.raises(NotCarried):
        M.weights_from_multicurve(tt, mc)


def test_weights_reject_parallel_plus_crossing():
    pd = S.build_example("tree", 2)
    g0 = pd.cuff_id(0, 0)
    mc = M.Multicurve((M.cuff_component(g0, 1),
                       M.dt_component({g0: (2, 0)}, 1)))
    tt = T.build_track(
        pd, T.carrying_choice(
            pd, M.Multicurve((M.dt_component({g0: (2, 0)}, 1),))))
    with pytest.raises(NotCarried):
        M.weights_from_multicurve(tt, mc)


def test_weights_unknown_cuff():
    pd, tt = standard_track("tree", 1)
    with pytest.raises(UnknownEdge):
        M.weights_from_multicurve(
            tt, M.Multicurve((M.cuff_component("nope", 1),)))


def test_path_component_weights_count_traversals():
    pd, tt = standard_track("ladder", 2)
    g1 = T.EdgePath(("+C:0:c20", "-C:1:c20", "-C:3:c01", "+C:2:c01"),
                    closed=True)
    ews = M.weights_from_multicurve(
        tt, M.Multicurve((M.path_component(g1, Fraction(7, 3)),)))
    assert ews.weights == {
        "C:0:c20": Fraction(7, 3), "C:1:c20": Fraction(7, 3),
        "C:3:c01": Fraction(7, 3), "C:2:c01": Fraction(7, 3)}


# -- switch relations -------------------------------------------------------


def test_validate_switch_and_perturbation():
    pd = S.build_example("tree", 2)
    g0 = pd.cuff_id(0, 0)
    mc = M.Multicurve((M.dt_component({g0: (2, -1)}, Fraction(1, 2)),
                       M.cuff_component(pd.cuff_id(1, 1), Fraction(4, 7))))
    tt = T.build_track(pd, T.carrying_choice(pd, mc))
    ews = M.weights_from_multicurve(tt, mc)
    assert M.validate_switch(tt, ews)
    assert M.validate_switch(tt, M.EdgeWeightSystem(weights={}))
    # bumping an edge at a trivalent interior switch breaks its balance
    for eid in sorted(ews.weights):
        if eid.startswith("K:"):
            continue
        bumped = dict(ews.weights)
        bumped[eid] = bumped[eid] + 1
        assert not M.validate_switch(
            tt, M.EdgeWeightSystem(weights=bumped)), eid
    # a cuff edge sits on both sides of its own switch, so bumping it
    # alone never unbalances anything
    bumped = dict(ews.weights)
    bumped["K:" + g0] = bumped["K:" + g0] + 1
    assert M.validate_switch(tt, M.EdgeWeightSystem(weights=bumped))


def test_validate_switch_float_tolerance():
    pd, tt = standard_track("tree", 1)
    ews = M.EdgeWeightSystem(weights={"K:b0s0": 1.0 + 1e-12}, mode="float")
    assert M.validate_switch(tt, ews)
    bad = M.EdgeWeightSystem(weights={"C:0:c01": 1e-3}, mode="float")
    assert not M.validate_switch(tt, bad)


# -- realization ------------------------------------------------------------


def test_realize_pure_cuff_band():
    pd, tt = standard_track("tree", 1)
    ews = M.EdgeWeightSystem(weights={"K:b0s2": Fraction(3)})
    mc = M.realize_weights(tt, ews)
    assert len(mc.components) == 1
    c = mc.components[0]
    assert c.kind == "cuff" and c.cuff_id == "b0s2"
    assert c.weight == Fraction(3)


def test_realize_requires_balance():
    pd, tt = standard_track("tree", 1)
    with pytest.raises(SwitchViolation):
        M.realize_weights(
            tt, M.EdgeWeightSystem(weights={"C:0:c01": Fraction(1)}))


def test_realize_rejects_irrational():
    pd, tt = standard_track("tree", 1)
    ews = M.EdgeWeightSystem(weights={"K:b0s0": math.sqrt(2)}, mode="float")
    with pytest.raises(IrrationalWeight):
        M.realize_weights(tt, ews)


def test_realize_recovers_path_component():
    pd, tt = standard_track("ladder", 2)
    g1 = T.EdgePath(("+C:0:c20", "-C:1:c20", "-C:3:c01", "+C:2:c01"),
                    closed=True)
    ews = M.weights_from_multicurve(
        tt, M.Multicurve((M.path_component(g1, Fraction(7, 3)),)))
    back = M.realize_weights(tt, ews)
    assert len(back.components) == 1
    c = back.components[0]
    assert c.kind == "path"
    assert c.weight == Fraction(7, 3)
    assert c.path.edges == g1.edges


def test_realize_twisted_crossing_round_trip():
    pd = S.build_example("tree", 2)
    g0 = pd.cuff_id(0, 0)
    mc = M.Multicurve((M.dt_component({g0: (2, -2)}, Fraction(2, 5)),))
    tt = T.build_track(pd, T.carrying_choice(pd, mc))
    ews = M.weights_from_multicurve(tt, mc)
    assert ews.weights["K:" + g0] == Fraction(2, 5) * 4
    back = M.realize_weights(tt, ews)
    assert M.weights_from_multicurve(tt, back).weights == ews.weights
    for c in back.components:
        if c.kind == "path":
            assert T.is_edge_path(tt, c.path)


def test_realize_weights_round_trip_random():
    rng = random.Random(7)
    for kind, depth in (("tree", 2), ("ladder", 3), ("flute", 3)):
        pd = S.build_example(kind, depth)
        for _ in range(10):
            mc = M.random_multicurve(pd, rng)
            tt = T.build_track(pd, T.carrying_choice(pd, mc))
            ews = M.weights_from_multicurve(tt, mc)
            assert M.validate_switch(tt, ews)
            back = M.realize_weights(tt, ews)
            assert M.weights_from_multicurve(tt, back).weights == ews.weights
            assert M.realize_weights(
                tt, M.weights_from_multicurve(tt, back)) == back


def test_realized_components_do_not_cross():
    rng = random.Random(13)
    pd = S.build_example("ladder", 3)
    for _ in range(5):
        mc = M.random_multicurve(pd, rng)
        tt = T.build_track(pd, T.carrying_choice(pd, mc))
        back = M.realize_weights(tt, M.weights_from_multicurve(tt, mc))
        paths = []
        for c in back.components:
            if c.kind == "path":
                paths.append(c.path)
            else:
                paths.append(T.EdgePath(("+K:" + c.cuff_id,), closed=True))
        for p in paths:
            assert not T.paths_cross(tt, p, p)
        for p, q in combinations(paths, 2):
            assert not T.paths_cross(tt, p, q)


def test_realize_then_dumps_is_canonical():
    pd, tt = standard_track("flute", 2)
    g0 = pd.cuff_id(0, 1)
    mc = M.Multicurve((M.cuff_component(g0, Fraction(5, 2)),))
    ews = M.weights_from_multicurve(tt, mc)
    once = M.weights_from_multicurve(tt, M.realize_weights(tt, ews)).dumps()
    assert once == ews.dumps()


# -- multicurve JSON --------------------------------------------------------


def test_multicurve_json_round_trip():
    path = T.EdgePath(("+K:g0",), closed=True)
    mc = M.Multicurve((
        M.cuff_component("b0s1", Fraction(5, 2)),
        M.path_component(path, Fraction(1, 3)),
        M.dt_component({"g0": (2, -1)}, Fraction(4)),
    ))
    blob = mc.to_json_dict()
    back = M.Multicurve.from_json_dict(blob)
    assert back == mc


def test_component_validation():
    with pytest.raises(DomainError):
        M.cuff_component("g0", 0)
    with pytest.raises(DomainError):
        M.cuff_component("g0", -2)
    with pytest.raises(DomainError):
        M.path_component(T.EdgePath(("+K:g0",)), 1)  # open path
    with pytest.raises(DomainError):
        M.dt_component({}, 1)
    with pytest.raises(DomainError):
        M.Component(kind="weird", weight=1)


def test_random_multicurve_shape():
    pd = S.build_example("ladder", 2)
    rng = random.Random(0)
    for _ in range(20):
        mc = M.random_multicurve(pd, rng, max_components=5, max_q=16)
        assert 1 <= len(mc.components) <= 5
        for c in mc.components:
            assert c.weight > 0
            if isinstance(c.weight, Fraction):
                assert c.weight.denominator <= 16


# ---------------------------------------------------------------------------
# box masses and norms

def _std_track(pd):
    return T.build_track(pd, T.standard_choice(pd))


def _box_near(p, q, delta=0.003):
    a, b = (p.angle, q.angle) if p.angle < q.angle else (q.angle, p.angle)
    gap = min(b - a, 2.0 * math.pi - (b - a))
    d = min(delta, 0.25 * gap)
    return C.box_from_angles([a - d, a + d, b - d, b + d])


def _cuff_axis(tt, cid):
    return C.axis_of(tt, T.EdgePath(("+K:" + cid,), closed=True))


def test_box_mass_single_lift_is_exact():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(3, 2)),))
    ax = _cuff_axis(tt, "g0")
    total = M.box_mass(pd, tt, mc, _box_near(ax.p, ax.q))
    assert total == Fraction(3, 2)
    assert isinstance(total, Fraction)


def test_box_mass_empty_and_disjoint():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    box = C.box_from_angles([0.3, 0.35, 0.4, 0.45])
    assert M.box_mass(pd, tt, M.Multicurve(()), box) == 0
    mc = M.Multicurve((M.cuff_component("g0", Fraction(1)),))
    assert M.box_mass(pd, tt, mc, box) == 0


def test_box_mass_counts_translated_lifts():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(3, 2)),))
    ax = _cuff_axis(tt, "g0")
    hol = S.holonomy(pd)
    words = [
        mat.mul(mat.unit_det(hol["cuff:g1"]), mat.unit_det(hol["cuff:g2"])),
        mat.chain(mat.unit_det(hol["cuff:g3"]), mat.unit_det(hol["cycle:3"]),
                  mat.unit_det(hol["cuff:g0"])),
    ]
    for g in words:
        box = _box_near(ax.p.apply(g), ax.q.apply(g))
        assert M.box_mass(pd, tt, mc, box) == Fraction(3, 2)


def test_box_mass_is_homogeneous():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(2, 3)),))
    ax = _cuff_axis(tt, "g0")
    box = _box_near(ax.p, ax.q)
    assert M.box_mass(pd, tt, mc.scaled(5), box) == \
        5 * M.box_mass(pd, tt, mc, box)


def test_box_mass_shrinking_boxes_stay_on_the_lift():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(1)),))
    ax = _cuff_axis(tt, "g0")
    masses = [M.box_mass(pd, tt, mc, _box_near(ax.p, ax.q, d))
              for d in (0.01, 0.003, 0.001, 0.0003)]
    assert all(m1 >= m2 for m1, m2 in zip(masses, masses[1:]))
    assert masses[-1] == Fraction(1)


def test_box_mass_path_component():
    pd = S.build_example("ladder", 2)
    rng = random.Random(7)
    mc = None
    while mc is None:
        cand = M.random_multicurve(pd, rng, max_components=3, max_q=4)
        dts = [c for c in cand.components if c.kind == "dt"]
        if dts and all(t <= 0 for c in dts
                       for (_m, t) in c.data.values()):
            mc = cand
    tt = T.build_track(pd, T.carrying_choice(pd, mc))
    picked = None
    for w, path in M._closed_components(tt, mc):
        if len(path.edges) > 1:
            picked = (w, path)
            break
    assert picked is not None
    w, path = picked
    ax = C.axis_of(tt, path)
    assert M.box_mass(pd, tt, mc, _box_near(ax.p, ax.q)) == w


def test_box_mass_requires_global_chart():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(1)),))
    box = C.box_from_angles([0.1, 0.2, 0.3, 0.4], chart="pants:0")
    with pytest.raises(DomainError):
        M.box_mass(pd, tt, mc, box)


def test_box_mass_corner_on_lift_is_perturbed_deterministically():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(1)),))
    ax = _cuff_axis(tt, "g0")
    box = C.box_from_angles([ax.p.angle, ax.p.angle + 0.02,
                             ax.q.angle - 0.02, ax.q.angle + 0.02])
    first = M.box_mass(pd, tt, mc, box)
    assert first == M.box_mass(pd, tt, mc, box)


def test_thurston_estimate_sees_a_cuff_curve():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(2)),))
    est = M.thurston_norm_estimate(pd, tt, mc, 60)
    assert est == pytest.approx(2.0, abs=1e-9)


def test_thurston_estimate_is_homogeneous():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(2)),
                       M.cuff_component("g2", Fraction(1, 3))))
    base = M.thurston_norm_estimate(pd, tt, mc, 80)
    assert base > 0.0
    scaled = M.thurston_norm_estimate(pd, tt, mc.scaled(7), 80)
    assert scaled == pytest.approx(7.0 * base, abs=1e-9)


def test_thurston_estimate_grows_with_samples():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g1", Fraction(5, 4)),
                       M.cuff_component("b0s1", Fraction(1, 2))))
    vals = [M.thurston_norm_estimate(pd, tt, mc, n)
            for n in (10, 20, 40, 80, 160)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[0] > 0.0


def test_thurston_estimate_monotone_in_components():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc1 = M.Multicurve((M.cuff_component("g0", Fraction(1)),))
    mc2 = M.Multicurve((M.cuff_component("g0", Fraction(1)),
                        M.cuff_component("g3", Fraction(2)),))
    a = M.thurston_norm_estimate(pd, tt, mc1, 60)
    b = M.thurston_norm_estimate(pd, tt, mc2, 60)
    assert b >= a - 1e-12


def test_norm_report_bounds_hold():
    pd = S.build_example("ladder", 2)
    tt = _std_track(pd)
    mc = M.Multicurve((M.cuff_component("g0", Fraction(3)),
                       M.cuff_component("g2", Fraction(1, 2))))
    rep = M.norm_report(pd, tt, mc, 60)
    assert rep.sup_norm <= rep.c_star * rep.thurston_estimate + 1e-9
    assert rep.thurston_estimate <= rep.k_star * rep.sup_norm + 1e-9
    blob = rep.to_json_dict()
    assert set(blob) == {"sup_norm", "thurston_estimate",
                         "c_star", "k_star"}
