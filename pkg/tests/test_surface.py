import json
import math

import pytest

from lamtrack import _matrix as mat
from lamtrack.errors import DisconnectedError, DomainError
from lamtrack.surface import (
    CUSP,
    Cuff,
    DEFAULT_CUFF_LENGTH,
    Gluing,
    PairOfPants,
    PantsDecomposition,
    build_example,
    dumps,
    from_json_dict,
    holonomy,
    loads,
    pants_boundary_holonomies,
    pants_geometry,
    skeleton,
    to_json_dict,
    validate_bounded,
)


def test_build_tree_depth_1():
    pd = build_example("tree", 1)
    assert len(pd.pants) == 1
    assert len(pd.gluings) == 0
    assert [pd.cuff_id(0, k) for k in range(3)] == ["b0s0", "b0s1", "b0s2"]


def test_build_tree_depth_2():
    pd = build_example("tree", 2)
    assert len(pd.pants) == 4
    assert len(pd.gluings) == 3


def test_build_ladder_depth_3():
    pd = build_example("ladder", 3, 2.0, 0.25)
    assert len(pd.pants) == 6
    assert len(pd.gluings) == 7
    unglued = [
        (p.id, k)
        for p in pd.pants
        for k in p.cuff_slots()
        if pd.gluing_of_slot(p.id, k) is None
    ]
    assert len(unglued) == 4


def test_build_flute_depth_2():
    pd = build_example("flute", 2)
    assert len(pd.pants) == 2
    assert len(pd.gluings) == 1
    for p in pd.pants:
        assert len(p.cusp_slots()) == 1


def test_json_round_trip():
    pd = build_example("ladder", 2, 1.7, 0.125)
    text = dumps(pd)
    data = json.loads(text)
    assert set(data.keys()) == {"pants", "gluings"}
    assert data["gluings"][0]["twist"] == 0.125
    pd2 = loads(text)
    assert dumps(pd2) == text


def test_json_cusp_spelling():
    pd = build_example("flute", 1)
    data = to_json_dict(pd)
    assert data["pants"][0]["slots"][2] == "cusp"
    back = from_json_dict(data)
    assert back.pants[0].slots[2] is CUSP


def test_gluing_validation():
    c = Cuff(2.0)
    pants = [PairOfPants(0, (c, c, c)), PairOfPants(1, (Cuff(2.5), c, c))]
    with pytest.raises(DomainError):
        PantsDecomposition(pants, [Gluing((0, 0), (1, 0), 0.0)])
    # equal lengths are fine
    PantsDecomposition(pants, [Gluing((0, 0), (1, 1), 0.0)])
    # double use of one slot is not
    with pytest.raises(DomainError):
        PantsDecomposition(
            pants,
            [Gluing((0, 0), (1, 1), 0.0), Gluing((0, 0), (1, 2), 0.0)],
        )


def test_validate_bounded():
    pd = build_example("tree", 2, 2.0)
    assert validate_bounded(pd, 3.0)
    assert not validate_bounded(pd, 1.5)
    pd_small = build_example("tree", 1, 0.2)
    assert validate_bounded(pd_small, 5.0)
    assert not validate_bounded(pd_small, 4.0)


def test_single_pants_generators_trace_4():
    pd = build_example("tree", 1)  # default cuff length
    gens = holonomy(pd)
    assert len(gens) == 3
    for m in gens.values():
        assert abs(mat.det(m) - 1.0) < 1e-9
        assert abs(abs(mat.tr(m)) - 4.0) < 1e-9


def test_cuff_trace_identity_families():
    for kind, depth in [("tree", 3), ("ladder", 3), ("flute", 3)]:
        pd = build_example(kind, depth, 2.1, 0.3)
        gens = holonomy(pd)
        for cid, _, length in pd.all_cuffs():
            m = gens[f"cuff:{cid}"]
            expected = 2.0 * math.cosh(length / 2.0)
            assert abs(abs(mat.tr(m)) - expected) < 1e-9


def test_pants_relation_all_families():
    for kind, depth in [("tree", 2), ("ladder", 2), ("flute", 2)]:
        pd = build_example(kind, depth, 1.9, -0.2)
        rel = pants_boundary_holonomies(pd)
        for p in pd.pants:
            x0, x1, x2 = rel[p.id]
            prod = mat.chain(x0, x1, x2)
            assert mat.psl_close(mat.unit_det(prod), mat.IDENT, 1e-9)
            for k in range(3):
                m = rel[p.id][k]
                slot = p.slots[k]
                if slot is CUSP:
                    assert abs(abs(mat.tr(m)) - 2.0) < 1e-9
                else:
                    want = 2.0 * math.cosh(slot.length / 2.0)
                    assert abs(abs(mat.tr(m)) - want) < 1e-9


def test_relation_signs_regression_random_pants():
    # unequal cuffs force the frozen sign pattern; this guards the constants
    p = PairOfPants(0, (Cuff(0.9), Cuff(2.3), Cuff(3.4)))
    geo = pants_geometry(p)
    prod = mat.chain(*geo.boundary)
    assert mat.psl_close(mat.unit_det(prod), mat.IDENT, 1e-9)


def test_traces_invariant_under_twist():
    a = build_example("ladder", 2, 2.0, 0.0)
    b = build_example("ladder", 2, 2.0, 0.37)
    ga, gb = holonomy(a), holonomy(b)
    for key in ga:
        if key.startswith("cuff:"):
            assert abs(abs(mat.tr(ga[key])) - abs(mat.tr(gb[key]))) < 1e-9


def test_disconnected_raises():
    c = Cuff(2.0)
    pants = [PairOfPants(0, (c, c, c)), PairOfPants(1, (c, c, c))]
    pd = PantsDecomposition(pants, [])
    with pytest.raises(DisconnectedError):
        holonomy(pd)


def test_skeleton_symmetric_pants_seams():
    pd = build_example("tree", 1)  # length 2*acosh(2)
    sk = skeleton(pd)
    assert len(sk.arcs) == 3
    for arc in sk.arcs:
        assert arc.length == pytest.approx(math.acosh(2.0), abs=1e-12)


def test_skeleton_sub_arcs_sum_to_length():
    for kind, depth in [("tree", 2), ("ladder", 3), ("flute", 3)]:
        pd = build_example(kind, depth, 2.4, 0.2)
        sk = skeleton(pd)
        for cid, cs in sk.cuffs.items():
            for side, data in cs.sides.items():
                assert sum(data["sub_arcs"]) == pytest.approx(
                    cs.length, abs=1e-9
                )
                for s in data["sub_arcs"]:
                    assert s > 0


def test_skeleton_two_cusp_pants_half_splits():
    c = Cuff(2.6)
    pd = PantsDecomposition([PairOfPants(0, (c, CUSP, CUSP))], [])
    sk = skeleton(pd)
    data = sk.cuffs["b0s0"].sides[(0, 0)]
    assert data["sub_arcs"] == pytest.approx([1.3, 1.3], abs=1e-12)
    (arc,) = sk.arcs
    assert arc.length == pytest.approx(
        2.0 * math.atanh(1.0 / math.cosh(2.6 / 4.0)), abs=1e-12
    )


def test_skeleton_one_cusp_pants_feet():
    pd = build_example("flute", 1, 2.0)
    sk = skeleton(pd)
    sides0 = sk.cuffs["b0s0"].sides[(0, 0)]
    sides1 = sk.cuffs["b0s1"].sides[(0, 1)]
    assert len(sides0["feet"]) == 3
    assert len(sides1["feet"]) == 1
    assert sides1["sub_arcs"] == pytest.approx([2.0], abs=1e-12)


def test_skeleton_empirical_bound():
    pd = build_example("ladder", 2, 2.0, 0.1)
    sk = skeleton(pd)
    assert sk.empirical_m1 >= 1.0
    for arc in sk.arcs:
        assert 1.0 / sk.empirical_m1 - 1e-12 <= arc.length
        assert arc.length <= sk.empirical_m1 + 1e-12


def test_default_cuff_length_value():
    assert DEFAULT_CUFF_LENGTH == pytest.approx(2.6339157938496336, abs=1e-12)
