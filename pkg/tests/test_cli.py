import csv
import json
import math
import subprocess
import sys

import pytest

from oqw.cli import fmt, main, parse_angle, parse_grid
from oqw.graph import InputError


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("pi/2", math.pi / 2), ("1.5", 1.5), ("-pi", -math.pi), ("2*pi/3", 2 * math.pi / 3),
        ("(pi+1)/2", (math.pi + 1) / 2), ("1e-3", 1e-3),
    ])
    def test_angle(self, text, value):
        assert parse_angle(text) == pytest.approx(value, abs=1e-15)

    @pytest.mark.parametrize("text", ["__import__('os')", "pi;1", "x", "sin(1)", "", "1/0"])
    def test_angle_rejects(self, text):
        with pytest.raises(Exception):
            parse_angle(text)

    def test_grid(self):
        assert len(parse_grid("0:3.1415927:0.19634954")) == 17
        assert parse_grid("0:1:0.5") == [0, 0.5, 1]
        assert parse_grid("0:pi:pi/2")[-1] == pytest.approx(math.pi)
        for bad in ("0:1", "1:0:0.5", "0:1:0", "a:b:c"):
            with pytest.raises(Exception):
                parse_grid(bad)

    def test_fmt(self):
        assert fmt(0.1) == "0.10000000000000001"
        assert fmt(3) == "3"


def test_simulate_example(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["simulate", "--family", "line-uniform", "--alpha", "1.5707963", "--theta",
                 "0.9045569", "--initial", "plus", "--steps", "200", "--half-window", "404",
                 "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 808 and list(rows[0]) == ["x", "probability"]
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1, abs=1e-10)
    summary = dict(kv.split("=") for kv in capsys.readouterr().out.split())
    assert float(summary["abs_mean_rate"]) == pytest.approx(0.60, abs=0.02)
    assert b"\r\n" not in out.read_bytes()


def test_simulate_wraparound_message(capsys):
    assert main(["simulate", "--steps", "10", "--half-window", "12"]) == 2
    assert "at least 22" in capsys.readouterr().err


def test_simulate_record(tmp_path):
    out = tmp_path / "long.csv"
    assert main(["simulate", "--family", "lattice", "--n", "4", "--steps", "1",
                 "--initial", "site:0,0", "--record-distributions", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["t", "x", "y", "probability"]
    assert len(rows) == 2 * 64


def test_dump_operators(tmp_path):
    path = tmp_path / "ops.json"
    assert main(["simulate", "--steps", "1", "--half-window", "4", "--dump-operators",
                 str(path)]) == 0
    doc = json.loads(path.read_text())
    assert len(doc["local_unitaries"]) == 2
    gap = max(abs(a - b) for ra, rb in zip(doc["step"]["real"], doc["oracle_step"]["real"])
              for a, b in zip(ra, rb))
    assert gap <= 1e-10


def test_sweep_example(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--family", "lattice", "--n", "16", "--steps", "13", "--initial", "corner4",
            "--alpha-grid", "0:3.1415927:0.19634954", "--out", str(out)]
    assert main(argv) == 2
    assert "n >= 27" in capsys.readouterr().err
    assert main(argv + ["--allow-wrap"]) == 0
    rows = read_csv(out)
    assert len(rows) == 17
    assert list(rows[0]) == ["t", "alpha", "theta", "mean_x", "mean_y", "mu", "x2", "sigma",
                             "sigma_x", "sigma_y"]
    mus = [float(r["mu"]) for r in rows]
    assert mus.index(max(mus)) == 8
    assert float(rows[8]["alpha"]) == pytest.approx(math.pi / 2, abs=1e-6)


def test_sweep_deterministic(tmp_path, monkeypatch):
    argv = ["sweep", "--steps", "5", "--alpha-grid", "0:1:0.25", "--theta-grid", "0.5:1:0.5"]
    monkeypatch.setenv("OQW_THREADS", "4")
    assert main(argv + ["--out", str(tmp_path / "a.csv")]) == 0
    monkeypatch.setenv("OQW_THREADS", "1")
    assert main(argv + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert len(read_csv(tmp_path / "a.csv")) == 10


def test_validate(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertex_count": 2, "arcs": [[0, 1], [1, 0]]}))
    assert main(["validate", "--file", str(bad)]) == 2
    assert "bidirected pair" in capsys.readouterr().err
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"vertex_count": 3, "arcs": [[0, 1], [1, 2]],
                                "tessellations": [[[0, 1], [2]]]}))
    assert main(["validate", "--file", str(good)]) == 0
    captured = capsys.readouterr()
    assert "uncovered edge 1-2" in captured.err and "ok" in captured.out
    assert main(["validate", "--family", "lattice", "--n", "3"]) == 0


def test_file_family_simulate(tmp_path):
    g = tmp_path / "tri.json"
    g.write_text(json.dumps({"vertex_count": 3, "arcs": [[0, 1], [1, 2], [2, 0]],
                             "tessellations": [[[0, 1, 2]]]}))
    out = tmp_path / "d.csv"
    assert main(["simulate", "--family", f"file:{g}", "--steps", "3", "--initial", "site:0",
                 "--out", str(out)]) == 0
    assert list(read_csv(out)[0]) == ["vertex", "probability"]


def test_analyze_tables(tmp_path):
    for table, cols in (("dispersion", 2), ("reduced", 9), ("rates", 4)):
        out = tmp_path / f"{table}.csv"
        extra = ["--alpha-grid", "0:pi:pi/4"] if table == "rates" else ["--k-points", "11"]
        assert main(["analyze", "--table", table, "--out", str(out), *extra]) == 0
        rows = read_csv(out)
        assert len(rows[0]) == cols
        assert len(rows) == (5 if table == "rates" else 11)


def test_optimize(capsys):
    assert main(["optimize"]) == 0
    out = dict(kv.split("=") for kv in capsys.readouterr().out.split())
    assert float(out["cos_theta"]) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-6)
    assert abs(float(out["rate"])) == pytest.approx(0.6006, abs=1e-4)


def test_compare(capsys):
    assert main(["compare", "--seed", "42", "--trials", "50"]) == 0
    first = capsys.readouterr().out
    assert "ok" in first
    assert main(["compare", "--seed", "42", "--trials", "50"]) == 0
    assert capsys.readouterr().out == first
    assert main(["compare", "--trials", "0"]) == 2


def test_config_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": "pi/2", "theta": 0.9045569, "half-window": 104}))
    assert main(["simulate", "--config", str(cfg), "--steps", "50"]) == 0
    from_file = capsys.readouterr().out
    assert "alpha=1.5707963267948966" in from_file
    assert main(["simulate", "--config", str(cfg), "--steps", "50", "--alpha", "0"]) == 0
    assert "alpha=0 " in capsys.readouterr().out


def test_input_errors(tmp_path, capsys):
    assert main(["simulate", "--steps", "3", "--out", str(tmp_path / "no" / "dir.csv")]) == 2
    assert main(["simulate", "--steps", "3", "--bogus"]) == 2
    assert main(["sweep", "--steps", "3", "--alpha-grid", "1:0:0.1"]) == 2
    assert main(["simulate", "--steps", "3", "--initial", "ab:0,0"]) == 2
    assert main(["simulate", "--steps", "3", "--config", str(tmp_path / "missing.json")]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "oqw", "compare", "--trials", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "max_deviation" in res.stdout
