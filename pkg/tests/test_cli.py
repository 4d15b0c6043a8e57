import json
import subprocess
import sys

from toricadj.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_unit_square(capsys, tmp_json):
    code, out, _ = run(capsys, "analyze", tmp_json({"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}))
    rep = json.loads(out)
    assert code == 0
    assert rep["adjoint_nef"] is False
    assert [(w["dL"], w["dSq"]) for w in rep["witnesses"]] == [(1, 0)] * 4
    assert rep["polytope"] == [[0, 0], [1, 0], [1, 1], [0, 1]]


def test_analyze_two_square_any_order(capsys, tmp_json):
    path = tmp_json({"vertices": [[2, 2], [0, 0], [0, 2], [1, 0], [2, 0]]})
    code, out, _ = run(capsys, "analyze", path)
    rep = json.loads(out)
    assert code == 0 and rep["adjoint_nef"] and not rep["adjoint_ample"]
    assert {(w["dL"], w["dSq"]) for w in rep["witnesses"]} == {(2, 0)}
    assert all({"L_dot_D", "D_sq", "adjoint"} <= set(r) for r in rep["rays_data"])


def test_analyze_triangle_marks_plane(capsys, tmp_json):
    code, out, _ = run(capsys, "analyze", tmp_json({"vertices": [[0, 0], [1, 0], [0, 1]]}))
    assert code == 0 and json.loads(out)["excluded_surface"] is True


def test_analyze_round_trips(capsys, tmp_json):
    code, out, _ = run(capsys, "analyze", tmp_json({"vertices": [[0, 0], [3, 0], [3, 1], [2, 2], [0, 2]]}))
    assert code == 0
    first = json.loads(out)
    code2, out2, _ = run(capsys, "analyze", tmp_json({"vertices": first["polytope"]}, "again.json"))
    second = json.loads(out2)
    for key in ("adjoint_nef", "adjoint_ample", "witnesses", "rays_data", "L2"):
        assert first[key] == second[key]


def test_analyze_pretty(capsys, tmp_json):
    code, out, _ = run(capsys, "analyze", "--pretty", tmp_json({"vertices": [[0, 0], [2, 0], [2, 2], [0, 2]]}))
    assert code == 0 and "K+L nef: True" in out


def test_analyze_singular_fan_exit_3(capsys, tmp_json):
    code, _, err = run(capsys, "analyze", tmp_json({"vertices": [[0, 0], [2, 0], [0, 1]]}))
    assert code == 3 and "cone" in err


def test_analyze_input_errors_exit_2(capsys, tmp_json):
    assert run(capsys, "analyze", tmp_json("{not json"))[0] == 2
    assert run(capsys, "analyze", tmp_json({"vertices": [[0, 0], [1, 1], [2, 2]]}))[0] == 2
    assert run(capsys, "analyze", tmp_json({"vertices": [[0, 0.5], [1, 0], [0, 1]]}))[0] == 2
    assert run(capsys, "analyze", tmp_json({"points": []}))[0] == 2
    assert run(capsys, "analyze", "/nonexistent/file.json")[0] == 2


def test_analyze_fan_file_with_coeffs(capsys, tmp_json):
    path = tmp_json({"rays": [[0, -1], [1, 0], [0, 1], [-1, 1]], "coeffs": [1, 0, 0, 2]})
    code, out, _ = run(capsys, "analyze", path)
    rep = json.loads(out)
    assert code == 0 and rep["L2"] == 5
    code, _, _ = run(capsys, "analyze", tmp_json({"rays": [[1, 0], [0, 1], [-1, 1], [0, -1]], "coeffs": [0, 0, 1, 0]}))
    assert code == 3  # not ample


def test_fan_info(capsys, tmp_json):
    path = tmp_json({"rays": [[1, 0], [0, 1], [-1, 2], [0, -1]], "coeffs": [0, 0, 1, 1]})
    code, out, _ = run(capsys, "fan-info", path)
    info = json.loads(out)
    assert code == 0
    assert info["self_intersections"] == [0, -2, 0, 2]
    assert info["K2"] == 8 and info["ample"] is True


def test_blowup_pulls_back_divisor(capsys, tmp_json):
    path = tmp_json({"rays": [[1, 0], [0, 1], [-1, -1]], "coeffs": [0, 0, 1]})
    code, out, _ = run(capsys, "blowup", path, "--cone", "1")
    new = json.loads(out)
    assert code == 0
    assert new["rays"] == [[1, 0], [0, 1], [-1, 0], [-1, -1]]
    assert new["coeffs"] == [0, 0, 1, 1]
    assert run(capsys, "blowup", path, "--cone", "5")[0] == 2


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "hirzebruch", "--r", "2", "--json")
    entry = json.loads(out)
    assert code == 0
    assert entry["self_intersections"][1] == -2 and entry["self_intersections"][3] == 2
    assert "nef_cone" in entry
    entry = json.loads(run(capsys, "catalog", "p1xp1", "--json")[1])
    assert entry["self_intersections"] == [0, 0, 0, 0]
    entry = json.loads(run(capsys, "catalog", "p2", "--json")[1])
    assert entry["self_intersections"] == [1, 1, 1] and entry["K2"] == 9
    assert run(capsys, "catalog", "hirzebruch", "--r", "0")[0] == 2
    code, out, _ = run(capsys, "catalog", "p2")
    assert "K^2 = 9" in out


def test_verify_flag_errors(capsys):
    assert run(capsys, "verify", "--max-blowups", "99")[0] == 2
    assert run(capsys, "verify", "--box", "9")[0] == 2
    assert run(capsys, "verify", "--checks", "pick,bogus")[0] == 2
    assert run(capsys, "verify", "--max-degree", "5")[0] == 2


def test_verify_pick_only(capsys):
    code, out, err = run(capsys, "verify", "--checks", "pick", "--box", "4", "--random-hulls", "5")
    report = json.loads(out)
    assert code == 0 and list(report["checks"]) == ["pick"]
    assert "PASS" in err


def test_verify_acceptance_subset(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(
        capsys, "verify", "--max-blowups", "2", "--max-degree", "50", "--box", "5",
        "--pentagon-box", "5", "--random-hulls", "50", "--out", str(out),
    )
    assert code == 0 and json.loads(out.read_text())["passed"]


def test_verify_config_file(capsys, tmp_json):
    path = tmp_json({"max_blowups": 0, "max_degree": 10, "checks": ["hodge"], "box_size": 2})
    code, out, _ = run(capsys, "verify", "--config", path, "--max-hirzebruch-r", "2")
    report = json.loads(out)
    assert code == 0
    assert report["config"]["max_hirzebruch_r"] == 2 and report["config"]["max_blowups"] == 0
    assert list(report["checks"]) == ["hodge"]


def test_console_entry_point(tmp_json):
    path = tmp_json({"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})
    proc = subprocess.run([sys.executable, "-m", "toricadj.cli", "analyze", path], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["schema"] == 1


def test_verify_counterexample_exit_1(capsys, monkeypatch):
    from toricadj import intersection

    real = intersection.intersection_table

    def broken(F):
        rows = [list(r) for r in real(F).pairing]
        rows[0][0] += 2
        return intersection.IntersectionTable(F, tuple(map(tuple, rows)))

    monkeypatch.setattr(intersection, "intersection_table", broken)
    code, out, err = run(capsys, "verify", "--max-blowups", "0", "--max-degree", "10", "--checks", "hodge,lemma34")
    assert code == 1 and "FAIL" in err
    assert json.loads(out)["passed"] is False
