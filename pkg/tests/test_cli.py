import json

import pytest

from lagsurgery.catalog import CONSTRUCTIONS
from lagsurgery.cli import main


def _scene(tmp_path, scene, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(scene))
    return str(path)


def test_list_constructions(capsys):
    assert main(["list-constructions"]) == 0
    assert capsys.readouterr().out.split() == list(CONSTRUCTIONS)


def test_verify_real_surface(tmp_path, capsys):
    assert main(["verify", "RealCP2", "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report_RealCP2.json").read_text())
    assert report["status"] == "PASS"
    assert (tmp_path / "samples_RealCP2.csv").exists()
    assert (tmp_path / "moment_RealCP2.svg").read_text().startswith("<")
    assert "RealCP2: PASS" in capsys.readouterr().out


def test_run_scene(tmp_path):
    scene = {"construction": "KSigma2", "params": {"lambda": 0.05},
             "outputs": ["topology", "seam-trace", "monotonicity"]}
    assert main(["run", _scene(tmp_path, scene), "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report_KSigma2.json").read_text())
    assert {c["name"] for c in report["checks"]} >= {"euler_characteristic", "orientable"}
    assert (tmp_path / "seams_KSigma2.csv").exists()


def test_angle_mismatch_fails(tmp_path, capsys):
    scene = {"construction": "KSigma2", "params": {"handle_angles": {"2": [1.5707963, 1.0471976]}},
             "outputs": ["topology"]}
    assert main(["run", _scene(tmp_path, scene), "--out-dir", str(tmp_path)]) == 1
    assert "AngleMismatch" in capsys.readouterr().out


@pytest.mark.parametrize("scene", [
    {"construction": "Nope"},
    {"construction": "KSigma2", "params": {"lambda": "big"}},
    {"construction": "KSigma2", "outputs": ["everything"]},
    {"construction": "KSigma2", "extra": 1},
    {"construction": "KSigma2", "params": {"grid": 4}},
])
def test_schema_errors_exit_2(tmp_path, scene):
    assert main(["run", _scene(tmp_path, scene), "--out-dir", str(tmp_path)]) == 2


def test_unreadable_scene_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_bad_flags_exit_2(tmp_path):
    assert main(["verify", "Nope", "--out-dir", str(tmp_path)]) == 2
    assert main(["verify", "RealCP2", "--grid", "4", "--out-dir", str(tmp_path)]) == 2
    assert main(["verify", "RealCP2", "--tolerance", "-1", "--out-dir", str(tmp_path)]) == 2


def test_csv_output_is_deterministic(tmp_path):
    scene = {"construction": "KSigma2", "outputs": ["seam-trace", "moment-image"]}
    path = _scene(tmp_path, scene)
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["run", path, "--out-dir", str(d)]) == 0
        outs.append({f: (d / f).read_bytes() for f in ("samples_KSigma2.csv", "seams_KSigma2.csv")})
    assert outs[0] == outs[1]
