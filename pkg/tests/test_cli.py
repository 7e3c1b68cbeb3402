import json
import subprocess
import sys

import pytest

from anharmonic import __version__
from anharmonic.cli import RunConfig, main, run
from anharmonic.exactseries import bender_wu, write_cache


def call(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_coeffs_csv(capsys):
    code, out, _ = call(["coeffs", "--order", "4", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "k,E_k"
    assert len(lines) == 6
    assert lines[-1].endswith("-30885/128")


def test_alpha_first_order(capsys):
    code, out, _ = call(["alpha", "--order", "1", "--precision", "30"], capsys)
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert row[0] == "0" and row[1].startswith("0.681420")
    assert len(row[1].replace("0.", "", 1)) >= 30


@pytest.mark.parametrize("argv", [
    ["converge", "--order", "0"],
    ["coeffs"],
    ["energy", "--order", "3"],
    ["alpha", "--order", "2", "--index", "3"],
    ["sigma", "--order", "3", "--precision", "8"],
    ["sigma", "--order", "3", "--nmax", "5"],
    ["bogus"],
    ["coeffs", "--order", "2", "--unknown"],
])
def test_usage_errors(argv, capsys):
    code, _, err = call(argv, capsys)
    assert code == 1
    assert "usage error" in err


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _, _ = call(["coeffs", "--order", "2", "--output", str(target)], capsys)
    assert code == 1


def test_oracle_not_converged(capsys):
    code, _, err = call(["oracle", "--g", "1000", "--basis-size", "6", "--tolerance", "1e-12"], capsys)
    assert code == 2
    assert "gap" in err


def test_energy_row(capsys):
    code, out, _ = call(["energy", "--order", "8", "--g", "0.4", "--precision", "20"], capsys)
    assert code == 0
    header, row = out.splitlines()
    assert header == "N,g,omega,sigma,Omega,energy"
    assert float(row.split(",")[-1]) == pytest.approx(0.5591463, abs=1e-6)


def test_json_metadata(capsys):
    code, out, _ = call(["sigma", "--nmin", "1", "--nmax", "3", "--format", "json", "--precision", "20"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["metadata"]["precision"] == 20
    assert doc["metadata"]["version"] == __version__
    assert doc["metadata"]["selection"] == "nearest"
    assert [r["N"] for r in doc["rows"]] == [1, 2, 3]
    assert doc["rows"][0]["sigma"].startswith("1.5")


def test_converge_overlay(capsys):
    code, out, _ = call(["converge", "--nmin", "1", "--nmax", "20", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert len(doc["rows"]) == 20
    assert doc["fit"]["model"]["envelope_rate"] > 0
    assert set(doc["overlay"]) == {str(n) for n in range(1, 21)}


def test_converge_too_short_for_fit(capsys):
    code, out, _ = call(["converge", "--order", "5"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "N,delta,flag,kind,fit"


def test_fit_command(capsys):
    code, out, _ = call(["fit", "--nmin", "10", "--nmax", "24"], capsys)
    assert code == 0
    rows = dict(line.split(",") for line in out.splitlines()[1:])
    assert 0.15 < float(rows["c"]) < 0.25


def test_epsilon_rows(capsys):
    code, out, _ = call(["epsilon", "--order", "1"], capsys)
    assert out.splitlines()[1:] == ["0,0,1/2", "1,0,3/4", "1,1,-1"]


def test_cache_roundtrip_command(tmp_path, capsys):
    path = tmp_path / "weak.txt"
    code, out, _ = call(["cache", "--cache", str(path), "--order", "200"], capsys)
    assert code == 0 and out.splitlines()[1].endswith(",200,ok")
    code, out, _ = call(["coeffs", "--order", "150", "--cache", str(path)], capsys)
    assert code == 0 and len(out.splitlines()) == 152


def test_cache_from_environment(tmp_path, monkeypatch, capsys):
    path = tmp_path / "weak.txt"
    write_cache(path, bender_wu(10))
    monkeypatch.setenv("ANHARMONIC_CACHE", str(path))
    code, out, _ = call(["cache"], capsys)
    assert code == 0 and ",10,ok" in out


def test_cache_errors_exit_two(tmp_path, capsys):
    path = tmp_path / "weak.txt"
    write_cache(path, bender_wu(30))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:12]) + "\n")
    code, _, err = call(["cache", "--cache", str(path)], capsys)
    assert code == 2 and "line" in err

    write_cache(path, bender_wu(3))
    path.write_text(path.read_text().replace(" v1", " v9", 1))
    code, _, err = call(["coeffs", "--order", "3", "--cache", str(path)], capsys)
    assert code == 2 and "header" in err


def test_run_writes_to_sink(tmp_path):
    import io

    sink = io.StringIO()
    assert run(RunConfig("coeffs", order=1), sink) == 0
    assert sink.getvalue() == "k,E_k\n0,1/2\n1,3/4\n"
    out = tmp_path / "c.csv"
    assert run(RunConfig("coeffs", order=1, output=str(out))) == 0
    assert out.read_text() == sink.getvalue()


@pytest.mark.parametrize("argv", [
    ["sigma", "--nmax", "6", "--precision", "25"],
    ["alpha", "--order", "12", "--index", "4", "--format", "json"],
])
def test_byte_identical_reruns(argv, tmp_path):
    outputs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "anharmonic.cli", *argv], capture_output=True, check=True)
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]
    assert outputs[0]
