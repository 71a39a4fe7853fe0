import io
import json
import subprocess
import sys

import numpy as np
import pytest

from primescatter.cli import main, prime_power_midpoints
from primescatter.serialize import read_csv_columns
from primescatter.spectrum import dirichlet_power


def run(args):
    return main([str(a) for a in args])


def read(path):
    with open(path, encoding="utf-8") as fh:
        return read_csv_columns(fh)


def test_lattice_csv(tmp_path):
    out = tmp_path / "lat.csv"
    assert run(["lattice", "--kind", "chi", "--atoms", 50, "--weights", "guinand-weil", "--out", out]) == 0
    text = out.read_text()
    assert text.startswith("# primescatter ")
    cols = read(out)
    assert cols["index"].tolist() == list(range(50))
    assert cols["position"][0] == pytest.approx(np.log(2))
    assert cols["weight"][0] == pytest.approx(np.log(2) / np.sqrt(2))


def test_lattice_json(tmp_path):
    out = tmp_path / "lat.json"
    assert run(["lattice", "--kind", "integer", "--atoms", 4, "--format", "json", "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert doc["positions"] == [0, 1, 2, 3]
    assert doc["config"]["kind"] == "integer"


def test_scatter_integer_end_to_end(tmp_path):
    out = tmp_path / "spec.csv"
    assert run(["scatter", "--lattice", "integer", "--atoms", 16, "--kmin", 0.1, "--kmax", 2.9, "--samples", 141, "--out", out]) == 0
    cols = read(out)
    assert cols["k"].size == 141
    ref = dirichlet_power(16, cols["k"])
    nz = ref > 1e-20
    assert np.max(np.abs(cols["power"][nz] - ref[nz]) / ref[nz]) < 1e-9


def test_scatter_detrend_and_markers(tmp_path):
    out = tmp_path / "spec.csv"
    args = ["scatter", "--atoms", 2000, "--weights", "guinand-weil", "--kmin", 1.5, "--kmax", 8, "--samples", 651]
    assert run(args + ["--detrend", 21, "--mark-zeros", "--out", out]) == 0
    cols = read(out)
    assert set(cols) == {"k", "power", "baseline", "residual", "zero_marker"}
    assert cols["zero_marker"].sum() == 10
    assert np.all(cols["residual"] >= 0)


def test_scatter_json(tmp_path):
    out = tmp_path / "spec.json"
    assert run(["scatter", "--atoms", 100, "--samples", 11, "--kmax", 1, "--format", "json", "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert {"label", "atom_count", "k_min", "k_max", "samples", "power"} <= set(doc)
    assert len(doc["power"]) == 11
    assert doc["power"][0] == pytest.approx(100**2)


def test_peaks_and_match_roundtrip(tmp_path):
    spec = tmp_path / "spec.csv"
    assert run(["scatter", "--lattice", "integer", "--atoms", 64, "--kmin", 0.2, "--kmax", 2.8, "--samples", 2601, "--out", spec]) == 0
    peaks = tmp_path / "peaks.csv"
    assert run(["peaks", "--in", spec, "--out", peaks]) == 0
    cols = read(peaks)
    assert list(cols) == ["center_k", "height", "hwhm", "prominence", "matched_gamma", "match_error_k"]
    assert sorted(np.round(cols["center_k"]).tolist()) == [1.0, 2.0]
    assert np.all(np.isnan(cols["matched_gamma"]))

    matched = tmp_path / "match.json"
    assert run(["match", "--in", spec, "--format", "json", "--out", matched]) == 0
    doc = json.loads(matched.read_text())
    assert doc["matched"] == 0
    assert doc["spurious"] == 2


def test_psi_check(tmp_path):
    out = tmp_path / "psi.json"
    assert run(["psi-check", "--x-max", 50, "--zero-counts", "10,100", "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["midpoints"]) == 22
    assert doc["rms"]["100"] < doc["rms"]["10"]
    assert doc["rms"]["100"] < 0.5
    csv_out = tmp_path / "psi.csv"
    assert run(["psi-check", "--format", "csv", "--out", csv_out]) == 0
    assert set(read(csv_out)) == {"x", "psi", "psi_explicit_10", "psi_explicit_100"}


def test_prime_power_midpoints():
    mids = prime_power_midpoints(10)
    assert mids.tolist() == [2.5, 3.5, 4.5, 6.0, 7.5, 8.5]


def test_sweep_small(tmp_path):
    out = tmp_path / "sweep.json"
    args = ["sweep", "--sizes", "200,600,2000", "--samples", 651, "--out", out]
    assert run(args) == 0
    doc = json.loads(out.read_text())
    assert doc["sizes"] == [200, 600, 2000]
    assert doc["config"]["weights"] == "guinand-weil"
    csv_out = tmp_path / "sweep.csv"
    assert run(args[:-2] + ["--window", 31, "--format", "csv", "--out", csv_out]) == 0
    assert read(csv_out)["atoms"].size >= 1


def test_stdout_default(capsys):
    assert run(["lattice", "--kind", "integer", "--atoms", 3]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[-1] == "2,2,1"


def test_exit_usage_domain(capsys):
    assert run(["lattice", "--atoms", 0]) == 2
    assert run(["scatter", "--kmin", 3, "--kmax", 1, "--atoms", 5]) == 2
    assert "usage error" in capsys.readouterr().err


def test_exit_usage_argparse():
    with pytest.raises(SystemExit) as info:
        run(["scatter", "--weights", "bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run(["nonsense"])
    assert info.value.code == 2


def test_exit_io(tmp_path):
    assert run(["peaks", "--in", tmp_path / "missing.csv"]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("k,power\n0.1,abc\n")
    assert run(["peaks", "--in", bad]) == 3
    nocol = tmp_path / "nocol.csv"
    nocol.write_text("x,y\n1,2\n")
    assert run(["peaks", "--in", nocol]) == 3
    assert run(["lattice", "--atoms", 3, "--out", tmp_path / "no" / "dir.csv"]) == 3
    zt = tmp_path / "z.txt"
    zt.write_text("21\n14.5\n")
    spec = tmp_path / "s.csv"
    spec.write_text("k,power\n" + "".join(f"{i / 10},{1 + (i == 5)}\n" for i in range(11)))
    assert run(["match", "--in", spec, "--window", 3, "--zeros", zt]) == 3


def test_exit_numeric(tmp_path):
    spec = tmp_path / "s.csv"
    spec.write_text("k,power\n" + "".join(f"{i / 10},{v}\n" for i, v in enumerate([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, float('nan')])))
    assert run(["peaks", "--in", spec, "--window", 3]) == 4


def test_csv_roundtrip_exact(tmp_path):
    out = tmp_path / "spec.csv"
    assert run(["scatter", "--atoms", 500, "--weights", "inv-sqrt", "--samples", 101, "--out", out]) == 0
    from primescatter import KGrid, WeightScheme, chi_lattice, nudft

    s = nudft(chi_lattice(500, WeightScheme.INV_SQRT), KGrid(0.0, 8.0, 101))
    cols = read(out)
    assert np.array_equal(cols["k"], s.k)
    assert np.array_equal(cols["power"], s.power)


def test_byte_identical_reruns(tmp_path):
    args = ["scatter", "--atoms", 3000, "--weights", "guinand-weil", "--kmin", 1.5, "--kmax", 8, "--samples", 651]
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.csv"
        assert run(args + ["--out", p]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "primescatter.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("primescatter ")
