import json
import xml.dom.minidom

import pytest

from lamtrack import cli
from lamtrack import cover as C
from lamtrack import surface as S
from lamtrack import traintrack as T


def write(path, payload) -> str:
    path.write_text(payload if isinstance(payload, str)
                    else json.dumps(payload))
    return str(path)


@pytest.fixture
def ladder_files(tmp_path):
    surf = tmp_path / "s.json"
    assert cli.run(["gen", "--kind", "ladder", "--depth", "2",
                    "-o", str(surf)]) == 0
    track = tmp_path / "t.json"
    assert cli.run(["track", "--surface", str(surf),
                    "-o", str(track)]) == 0
    return tmp_path, str(surf), str(track)


def test_gen_writes_one_pants_tree(capsys):
    assert cli.run(["gen", "--kind", "tree", "--depth", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["pants"]) == 1
    assert data["gluings"] == []


def test_gen_output_is_canonical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        assert cli.run(["gen", "--kind", "flute", "--depth", "3",
                        "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.index('"gluings"') < text.index('"pants"')


def test_gen_rejects_unknown_kind():
    assert cli.run(["gen", "--kind", "cube", "--depth", "2"]) == 2


def test_track_dump_names_choice(ladder_files):
    _tmp, _surf, track = ladder_files
    data = json.loads(open(track).read())
    assert data["choice"]["track_types"]["0"] == "pairwise"
    assert data["choice"]["tangencies"]["0:0"] == "L"
    assert "K:g0" in data["edges"]


def test_weights_single_cuff_entry(ladder_files, capsys):
    tmp, surf, track = ladder_files
    mc = write(tmp / "mc.json", {"components": [
        {"kind": "cuff", "cuff": "g0", "weight": "5/2"}]})
    assert cli.run(["weights", "--surface", surf, "--track", track,
                    "--multicurve", mc]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["weights"] == {"K:g0": "5/2"}
    assert data["mode"] == "rational"


def test_round_trip_is_byte_identical(ladder_files):
    tmp, surf, track = ladder_files
    mc = write(tmp / "mc.json", {"components": [
        {"kind": "cuff", "cuff": "b0s1", "weight": "5/2"},
        {"kind": "dt", "weight": "1/3",
         "data": {"g0": [2, 0], "g1": [2, 0],
                  "g2": [2, 0], "g3": [2, 0]}}]})
    w1 = tmp / "w1.json"
    mc2 = tmp / "mc2.json"
    w2 = tmp / "w2.json"
    assert cli.run(["weights", "--surface", surf, "--track", track,
                    "--multicurve", mc, "-o", str(w1)]) == 0
    assert cli.run(["realize", "--surface", surf, "--track", track,
                    "--weights", str(w1), "-o", str(mc2)]) == 0
    assert cli.run(["weights", "--surface", surf, "--track", track,
                    "--multicurve", str(mc2), "-o", str(w2)]) == 0
    assert w1.read_bytes() == w2.read_bytes()


def test_validate_passes_clean_surface(ladder_files, capsys):
    _tmp, surf, _track = ladder_files
    assert cli.run(["validate", "--surface", surf]) == 0
    out = capsys.readouterr().out
    assert "bounded-geometry: ok" in out
    assert "skipped" in out


def test_validate_flags_unbounded_geometry(tmp_path, capsys):
    surf = tmp_path / "s.json"
    assert cli.run(["gen", "--kind", "tree", "--depth", "1",
                    "--cuff-length", "100", "-o", str(surf)]) == 0
    assert cli.run(["validate", "--surface", str(surf),
                    "--bound", "20"]) == 1
    assert "bounded-geometry: fail" in capsys.readouterr().out


def test_validate_flags_unbalanced_weights(ladder_files, tmp_path, capsys):
    _tmp, surf, track = ladder_files
    bad = write(tmp_path / "bad_w.json",
                {"mode": "rational", "weights": {"C:0:c01": "1/1"}})
    assert cli.run(["validate", "--surface", surf, "--track", track,
                    "--weights", bad]) == 1
    assert "switch-relations: fail" in capsys.readouterr().out


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", '{"pants": [')
    code = cli.run(["validate", "--surface", bad])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 1" in err


def test_missing_file_is_input_error(tmp_path):
    assert cli.run(["validate", "--surface",
                    str(tmp_path / "nope.json")]) == 2


def test_bad_multicurve_field_is_input_error(ladder_files, tmp_path):
    _tmp, surf, track = ladder_files
    mc = write(tmp_path / "mc.json",
               {"components": [{"kind": "mystery", "weight": "1/1"}]})
    assert cli.run(["weights", "--surface", surf, "--track", track,
                    "--multicurve", mc]) == 2


def test_uncarried_multicurve_is_domain_error(ladder_files, tmp_path):
    _tmp, surf, track = ladder_files
    mc = write(tmp_path / "mc.json", {"components": [
        {"kind": "dt", "data": {"g0": [2, 0]}, "weight": "1/1"}]})
    assert cli.run(["weights", "--surface", surf, "--track", track,
                    "--multicurve", mc]) == 1


def test_norms_report_fields(ladder_files, capsys):
    tmp, surf, track = ladder_files
    mc = write(tmp / "mc.json", {"components": [
        {"kind": "cuff", "cuff": "g0", "weight": "5/2"}]})
    assert cli.run(["norms", "--surface", surf, "--track", track,
                    "--multicurve", mc, "--samples", "60"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["sup_norm"] == 2.5
    assert data["thurston_estimate"] == 2.5
    assert data["c_star"] == 1
    assert data["k_star"] == 1


def test_boxmass_masses(ladder_files, capsys):
    tmp, surf, track = ladder_files
    pd = S.from_json_dict(json.loads(open(surf).read()))
    tt = T.build_track(pd, T.standard_choice(pd))
    ax = C.axis_of(tt, T.EdgePath(("+K:g0",), closed=True))
    a, b = sorted((ax.p.angle, ax.q.angle))
    mc = write(tmp / "mc.json", {"components": [
        {"kind": "cuff", "cuff": "g0", "weight": "5/2"}]})
    boxes = write(tmp / "boxes.json", {"boxes": [
        [a - 0.01, a + 0.01, b - 0.01, b + 0.01],
        [0.3, 0.35, 0.4, 0.45]]})
    assert cli.run(["boxmass", "--surface", surf, "--track", track,
                    "--multicurve", mc, "--boxes", boxes]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["masses"] == ["5/2", "0/1"]


def test_boxmass_rejects_bad_box_file(ladder_files, tmp_path):
    _tmp, surf, track = ladder_files
    mc = write(tmp_path / "mc.json", {"components": [
        {"kind": "cuff", "cuff": "g0", "weight": "1/1"}]})
    short = write(tmp_path / "b1.json", {"boxes": [[0.1, 0.2, 0.3]]})
    assert cli.run(["boxmass", "--surface", surf, "--track", track,
                    "--multicurve", mc, "--boxes", short]) == 2
    disorder = write(tmp_path / "b2.json", {"boxes": [[0.4, 0.3, 0.2, 0.1]]})
    assert cli.run(["boxmass", "--surface", surf, "--track", track,
                    "--multicurve", mc, "--boxes", disorder]) == 2


def test_render_disk_all_layers(ladder_files, tmp_path):
    tmp, surf, track = ladder_files
    mc = write(tmp / "mc.json", {"components": [
        {"kind": "cuff", "cuff": "g0", "weight": "1/1"}]})
    boxes = write(tmp / "boxes.json",
                  {"boxes": [[0.3, 0.35, 0.4, 0.45]]})
    out = tmp_path / "pic.svg"
    assert cli.run(["render", "--surface", surf, "--track", track,
                    "--multicurve", mc, "--boxes", boxes,
                    "--model", "disk", "--radius", "1",
                    "--layers",
                    "cuff-lifts,skeleton,track,boxes,carried-geodesics",
                    "-o", str(out)]) == 0
    doc = xml.dom.minidom.parse(str(out))
    groups = {g.getAttribute("id") for g in doc.getElementsByTagName("g")}
    assert groups == {"cuff-lifts", "skeleton", "track", "boxes",
                      "carried-geodesics"}
    assert len(doc.getElementsByTagName("path")) > 20


def test_render_is_canonical_in_layer_order(ladder_files, tmp_path):
    _tmp, surf, _track = ladder_files
    one = tmp_path / "one.svg"
    two = tmp_path / "two.svg"
    assert cli.run(["render", "--surface", surf, "--radius", "1",
                    "--layers", "cuff-lifts,skeleton",
                    "-o", str(one)]) == 0
    assert cli.run(["render", "--surface", surf, "--radius", "1",
                    "--layers", "skeleton,cuff-lifts",
                    "-o", str(two)]) == 0
    assert one.read_bytes() == two.read_bytes()


def test_render_radius_grows_the_picture(ladder_files, tmp_path):
    _tmp, surf, _track = ladder_files
    small = tmp_path / "r0.svg"
    big = tmp_path / "r1.svg"
    for radius, path in (("0", small), ("1", big)):
        assert cli.run(["render", "--surface", surf, "--radius", radius,
                        "--layers", "cuff-lifts", "-o", str(path)]) == 0
    assert small.read_text().count("<path") < big.read_text().count("<path")


def test_render_halfplane_model(ladder_files, tmp_path):
    _tmp, surf, _track = ladder_files
    out = tmp_path / "hp.svg"
    assert cli.run(["render", "--surface", surf, "--model", "halfplane",
                    "--layers", "cuff-lifts,skeleton", "--radius", "0",
                    "-o", str(out)]) == 0
    doc = xml.dom.minidom.parse(str(out))
    assert len(doc.getElementsByTagName("path")) > 0


def test_render_rejects_bad_spec(ladder_files):
    _tmp, surf, _track = ladder_files
    assert cli.run(["render", "--surface", surf,
                    "--layers", "nope"]) == 2
    assert cli.run(["render", "--surface", surf,
                    "--layers", "cuff-lifts", "--radius", "-1"]) == 2
    assert cli.run(["render", "--surface", surf, "--layers", ""]) == 2


def test_common_flags_are_accepted(ladder_files, capsys):
    _tmp, surf, _track = ladder_files
    assert cli.run(["validate", "--surface", surf,
                    "--seed", "7", "--threads", "4"]) == 0
    capsys.readouterr()
