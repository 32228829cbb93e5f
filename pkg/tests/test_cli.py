import io
import json
import subprocess
import sys

import pytest

from metricgames.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return {
        "x1": write("x1.json", {"kind": "metric_space", "points": ["x", "y"], "d": [[0, 1], [1, 0]]}),
        "x2": write("x2.json", {"kind": "metric_space", "points": ["u", "v"], "d": [[0, 2], [2, 0]]}),
        "bad": write("bad.json", {"kind": "metric_space", "points": ["x", "y"],
                                  "d": [[0, 1], [2, 0]]}),
        "menus": write("menus.json", {"s": ["33/16"], "k": [1]}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_validate(capsys, files):
    assert run(capsys, "validate", "--in", files["x1"]) == (0, "ok", "")
    code, _, err = run(capsys, "validate", "--in", files["bad"])
    assert code == 1 and err.startswith("AsymmetricMatrix:")


def test_distance_methods(capsys, files):
    ab = ["--a", files["x1"], "--b", files["x2"]]
    assert run(capsys, "distance", *ab, "--method", "gh-brute")[:2] == (0, "1/2")
    assert run(capsys, "distance", *ab, "--method", "lipschitz")[1] == "2"
    assert run(capsys, "distance", *ab, "--method", "game")[1] == "[1/2, 1/2]"
    code, out, _ = run(capsys, "distance", *ab, "--method", "game", "--resolution", "1/8", "--json")
    assert json.loads(out)["interval"] == ["1/2", "1/2"]
    code, out, _ = run(capsys, "distance", *ab, "--json", "--witness")
    assert json.loads(out) == {"method": "gh-brute", "value": "1/2",
                               "witness": [["x", "u"], ["y", "v"]]}


def test_watershed_and_solve(capsys, files):
    ab = ["--a", files["x1"], "--b", files["x2"]]
    assert run(capsys, "watershed", *ab, "--eps", "2/5")[:2] == (0, "2")
    assert run(capsys, "watershed", *ab, "--eps", "1/2")[1] == "IIWinsAll"
    assert run(capsys, "solve", *ab, "--eps", "2/5", "--clock", "2")[1] == "I"
    assert run(capsys, "solve", *ab, "--factor", "2", "--clock", "4", "--menus", files["menus"])[1] == "II"
    code, out, _ = run(capsys, "solve", *ab, "--eps", "2/5", "--clock", "2", "--json")
    assert json.loads(out)["winner"] == "I"


def test_usage_errors_exit_2(capsys, files):
    ab = ["--a", files["x1"], "--b", files["x2"]]
    code, _, err = run(capsys, "solve", *ab, "--eps", "1/2", "--factor", "2", "--clock", "1")
    assert code == 2 and "--factor" in err
    code, _, err = run(capsys, "solve", *ab, "--clock", "soon")
    assert code == 2 and "--clock" in err
    assert run(capsys, "frobnicate")[0] == 2


def test_domain_errors_exit_1(capsys, files, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(""))
    code, _, err = run(capsys, "solve", "--a", files["x1"], "--b", str(files["dir"] / "none.json"),
                       "--clock", "1")
    assert code == 1 and err.startswith("ParseError:")
    code, _, err = run(capsys, "play", "--a", files["x1"], "--b", files["x2"], "--clock", "2",
                       "--role", "I")
    assert code == 1 and err.startswith("Abort:")


def test_scott_output(capsys, files):
    code, out, _ = run(capsys, "scott", "--a", files["x1"], "--eps", "1/2", "--clock", "1",
                       "--tuple", "x")
    assert code == 0 and json.loads(out)["meta"]["start"] == ["x"]
    code, out, _ = run(capsys, "scott", "--a", files["x1"], "--eps", "1/2", "--clock", "2", "--shared")
    assert json.loads(out)["op"] == "shared"
    code, out, _ = run(capsys, "scott", "--a", files["x1"], "--factor", "3/2", "--clock", "1",
                       "--start", "x:2:1")
    assert code == 0 and json.loads(out)["meta"]["kbar"] == [1]


def test_output_is_deterministic(capsys, files):
    argv = ["scott", "--a", files["x1"], "--eps", "1/4", "--clock", "2", "--tuple", "x,y"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_out_file(capsys, files):
    path = files["dir"] / "w.txt"
    run(capsys, "watershed", "--a", files["x1"], "--b", files["x2"], "--eps", "2/5", "--out", str(path))
    assert path.read_text() == "2\n"


def test_play_reads_stdin(capsys, files, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("u\nu\n"))
    code, out, _ = run(capsys, "play", "--a", files["x1"], "--b", files["x2"], "--eps", "2/5",
                       "--clock", "2", "--role", "II")
    assert code == 0 and "winner: I" in out and "D-constraint" in out


def test_unknown_suite_exits_2(capsys):
    code, _, err = run(capsys, "suite", "bogus")
    assert code == 2 and err.startswith("UnknownSuite:")


def test_suite_reports_json(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "suite", "appr-laws", "--quick", "--json", "--out", str(out))
    report = json.loads(text)
    assert report == json.loads(out.read_text())
    names = {p["name"]: p for p in report["properties"]}
    assert names["appr-additivity"]["pass"] and names["truncation-boundary-characterization"]["pass"]
    # the raw weak-negation law fails at truncation boundaries, so the suite exits nonzero
    assert code == (0 if report["pass"] else 1)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "metricgames", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "watershed" in proc.stdout
