import csv
import json
import subprocess
import sys

import pytest

from noma_lab.cli import run


def _csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_lattice(capsys):
    assert run(["lattice", "--p", "5"]) == 0
    out = capsys.readouterr().out
    assert "n=2" in out and "dpmin=0.447214" in out and "-0.525731" in out
    assert "orthogonality_residual=" in out


@pytest.mark.parametrize("argv, field", [
    (["lattice", "--p", "4"], "p"),
    (["lattice", "--p", "3"], "p"),
    (["lattice"], "p"),
    (["lattice", "--p", "five"], "argv"),
    (["ser-sim", "--snr", "10", "--trials", "10000"], "seed"),
    (["ser-sim", "--snr", "10", "--trials", "100", "--seed", "1"], "trials"),
    (["ser-sim", "--snr", "20,10", "--trials", "10000", "--seed", "1"], "snr"),
    (["ser-sim", "--snr", "10", "--trials", "10000", "--seed", "1", "--alpha", "1.5"], "alpha"),
    (["constellation", "dump", "--m1", "5", "--m2", "5"], "max_bits"),
    (["dpmin-sweep", "--m1", "3", "--m2", "3", "--p", "7", "--method", "pairs"], "method"),
    (["mindet-sweep", "--p", "7"], "p"),
    (["reproduce", "fig99"], "figure"),
])
def test_config_errors_exit_2(argv, field, capsys):
    assert run(argv) == 2
    assert f"[field: {field}]" in capsys.readouterr().err


def test_no_command(capsys):
    assert run([]) == 2


def test_constellation_dump(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["constellation", "dump", "--p", "7", "--m1", "1", "--m2", "1",
                "--alpha", "0.3", "--out", str(out), "--svg", str(tmp_path / "c.svg")]) == 0
    rows = _csv(out)
    assert len(rows) == 64
    assert list(rows[0]) == ["label1", "label2", "coord_1", "coord_2", "coord_3"]
    digits = rows[5]["coord_1"].lstrip("-").replace(".", "").lstrip("0")
    assert len(digits) <= 12
    assert (tmp_path / "c.svg").read_text().startswith("<svg")


def test_dpmin_sweep_postcondition_and_idempotence(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["dpmin-sweep", "--p", "5", "--m1", "2", "--m2", "1", "--grid", "33"]
    assert run(argv + ["--out", str(a), "--svg", str(tmp_path / "a.svg")]) == 0
    assert run(argv + ["--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _csv(a)
    assert list(rows[0]) == ["alpha", "dpmin_exact", "dpmin_bound", "demin_exact",
                             "is_lattice_partition_alpha"]
    assert len(rows) == 34
    assert all(float(r["dpmin_bound"]) >= float(r["dpmin_exact"]) - 1e-12 for r in rows)
    lp = [r for r in rows if r["is_lattice_partition_alpha"] == "true"]
    assert len(lp) == 1 and float(lp[0]["alpha"]) == pytest.approx(1 / 17)


def test_dpmin_sweep_grid_method(tmp_path):
    out = tmp_path / "g.csv"
    assert run(["dpmin-sweep", "--p", "7", "--m1", "3", "--m2", "3", "--alphas",
                "0.1,0.3", "--out", str(out)]) == 0
    rows = _csv(out)
    assert len(rows) == 3
    lp = [r for r in rows if r["is_lattice_partition_alpha"] == "true"][0]
    assert float(lp["dpmin_exact"]) == pytest.approx(float(lp["dpmin_bound"]), abs=1e-9)


def test_mindet_sweep(tmp_path):
    out = tmp_path / "m.csv"
    assert run(["mindet-sweep", "--alphas", "0.11,0.14,0.31", "--out", str(out)]) == 0
    rows = _csv(out)
    assert list(rows[0]) == ["alpha", "min_det"]
    vals = {round(float(r["alpha"]), 6): float(r["min_det"]) for r in rows}
    assert vals[0.31] == pytest.approx(0.449e-2, rel=0.01)


def _write_ini(path, body):
    path.write_text(body)
    return str(path)


def test_ser_sim_config_and_sidecar(tmp_path):
    ini = _write_ini(tmp_path / "run.ini", "[ser-sim]\nm1 = 2\nm2 = 1\nalpha = 0.3\n"
                     "snr = 0:10:5\ntrials = 10000\nseed = 11\ndecoder = sic\n")
    out = tmp_path / "s.csv"
    assert run(["ser-sim", "--config", ini, "--seed", "12", "--out", str(out)]) == 0
    rows = _csv(out)
    assert list(rows[0]) == ["user", "snr_db", "trials", "errors", "ser"]
    assert len(rows) == 6
    meta = json.loads((tmp_path / "s.csv.json").read_text())
    assert meta["seed"] == 12 and meta["decoder"] == "sic"
    assert meta["scheme"]["alpha"] == 0.3
    assert len(meta["config_sha256"]) == 64 and "git_describe" in meta
    first = out.read_bytes()
    assert run(["ser-sim", "--config", ini, "--seed", "12", "--out", str(out),
                "--threads", "3"]) == 0
    assert out.read_bytes() == first


def test_ser_sim_mimo_svg(tmp_path):
    svg = tmp_path / "s.svg"
    assert run(["ser-sim", "--m1", "2", "--alpha", "lp", "--channel", "mimo_rayleigh",
                "--snr", "10,20", "--snr-gap", "5", "--trials", "10000", "--seed", "1",
                "--out", str(tmp_path / "s.csv"), "--svg", str(svg)]) == 0
    assert "<polyline" in svg.read_text()


@pytest.mark.parametrize("body, field", [
    ("[ser-sim]\nseed = 1\ntrials = 10000\nsnr = 10\nbogus = 1\n", "bogus"),
    ("[ser-sim]\nseed = one\ntrials = 10000\nsnr = 10\n", "seed"),
    ("[ser-sim]\nseed = 1\ntrials = 10000\nsnr = 10\ndecoder = oracle\n", "decoder"),
    ("[serr-sim]\nseed = 1\n", "serr-sim"),
    ("not an ini", "config"),
])
def test_bad_config(tmp_path, body, field, capsys):
    ini = _write_ini(tmp_path / "bad.ini", body)
    assert run(["ser-sim", "--config", ini]) == 2
    assert f"[field: {field}]" in capsys.readouterr().err


def test_missing_config_file(capsys):
    assert run(["lattice", "--p", "5", "--config", "/nonexistent/x.ini"]) == 2


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("NOMA_LAB_THREADS", "x")
    assert run(["lattice", "--p", "5"]) == 2
    assert "NOMA_LAB_THREADS" in capsys.readouterr().err
    assert run(["lattice", "--p", "5", "--threads", "1"]) == 0


def test_reproduce_mindet_table(capsys):
    assert run(["reproduce", "mindet-table"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS  min det") == 4


def test_reproduce_header_names_seed_and_trials(capsys, tmp_path):
    code = run(["reproduce", "fig8-9", "--seed", "5", "--trials-scale", "0.01",
                "--out", str(tmp_path / "r.csv")])
    assert code in (0, 1)
    head = capsys.readouterr().out.splitlines()[0]
    assert "seed=5" in head and "trials=" in head
    assert len(_csv(tmp_path / "r.csv")) == 24


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "noma_lab", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "ser-sim" in res.stdout
