import csv
import io
import json
import subprocess
import sys

import pytest

from fdlab import cli


def _files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_bounds_outputs(tmp_path):
    assert cli.run(["bounds", "--d", "3", "--points", "20", "--out", str(tmp_path)]) == 0
    files = _files(tmp_path)
    assert set(files) == {"bounds.csv", "thresholds.json", "config.json"}
    text = files["bounds.csv"].decode()
    assert "\r\n" in text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][:3] == ["d", "alpha", "beta_lower"] and len(rows) == 21
    # 17 significant digits round-trip exactly
    assert all(float(repr(float(v))) == float(v) for v in rows[1][:3])
    conf = json.loads(files["config.json"])
    assert conf["d"] == 3 and conf["points"] == 20 and conf["seed"] == 0
    assert "func" not in conf and "out" not in conf


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["knapp", "--d", "4", "--n", "1", "--samples", "500", "--seed", "7"]
    assert cli.run(argv + ["--out", str(a)]) == 0
    assert cli.run(argv + ["--out", str(b)]) == 0
    assert _files(a) == _files(b)


def test_knapp_formula_value(tmp_path):
    assert cli.run(["knapp", "--d", "4", "--n", "1", "--kappa", "0.5", "--samples", "200",
                    "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "knapp.json").read_text())
    assert rep["formula_beta"] == 2.0


def test_exit_codes(tmp_path, capsys):
    assert cli.run(["bounds", "--bogus", "1"]) == 64
    assert cli.run(["frobnicate"]) == 64
    assert cli.run([]) == 64
    assert cli.run(["knapp", "--d", "3", "--out", str(tmp_path / "k")]) == 1
    assert cli.run(["bounds", "--d", "1", "--out", str(tmp_path / "b")]) == 1


def test_numeric_guard_exit(monkeypatch):
    def underflow(args, out):
        raise cli.spectral.QuadratureUnderflow("sigma vanished")

    parser = cli.build_parser
    monkeypatch.setattr(cli, "build_parser", lambda: _patched(parser(), underflow))
    assert cli.run(["decay-scan", "--d", "2"]) == 2


def _patched(parser, func):
    parser.set_defaults(func=func)
    for action in parser._subparsers._group_actions:
        for sub in action.choices.values():
            sub.set_defaults(func=func)
    return parser


def test_config_merge(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": 5, "points": 10}))
    out = tmp_path / "o"
    assert cli.run(["bounds", "--config", str(cfg), "--points", "12", "--out", str(out)]) == 0
    conf = json.loads((out / "config.json").read_text())
    assert conf["d"] == 5 and conf["points"] == 12  # flags win over the file
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert cli.run(["bounds", "--config", str(bad)]) == 64


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FDL_THREADS", "2")
    assert cli.run(["bounds", "--points", "5", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "config.json").read_text())["threads"] == 2
    monkeypatch.setenv("FDL_THREADS", "zero")
    assert cli.run(["bounds", "--points", "5"]) == 64


def test_stdout_mode(capsys):
    assert cli.run(["bounds", "--d", "4", "--points", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc["distance_threshold"]) == {"erdogan", "full", "theorem"}


@pytest.mark.parametrize("argv, name, header", [
    (["caps", "--d", "2", "--points", "50"], "ladder.csv", ["m", "K_m", "chain_ok"]),
    (["evolve", "--R", "16,32", "--seeds", "1", "--grid-points", "64"], "norms.csv", ["R", "norm"]),
    (["decay-scan", "--measure", "cantor", "--d", "2", "--quad-nodes", "128", "--R-max", "32"],
     "decay.csv", ["R", "sigma"]),
])
def test_other_subcommands(tmp_path, argv, name, header):
    assert cli.run(argv + ["--out", str(tmp_path)]) == 0
    rows = list(csv.reader(io.StringIO((tmp_path / name).read_bytes().decode())))
    assert rows[0][: len(header)] == header and len(rows) > 1


def test_selftest(tmp_path):
    assert cli.run(["selftest", "--out", str(tmp_path)]) == 0
    assert "FAIL" not in (tmp_path / "selftest.txt").read_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fdlab", "bounds", "--nope"], capture_output=True)
    assert proc.returncode == 64
