"""Secondary-component tests: figures regenerated from real CLI artifacts.

The solver package is exercised only through its command line (the CSV
contract is the interface), so these tests shell out to
`python -m kinetic_fronts.cli`.
"""

import subprocess
import sys

import numpy as np
import pytest

from front_plots.csv_data import read_table
from front_plots.front_comparison import main as front_main, render as front_render
from front_plots.phase_snapshots import main as snap_main


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "kinetic_fronts.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    """Front CSVs in the A4/A5 configurations (coarser grids for speed)."""
    root = tmp_path_factory.mktemp("artifacts")
    kpp = root / "kpp"
    bgk = root / "bgk"
    cli("hj", "--model", "quadratic", "--d", "1", "--r", "1",
        "--dx", "0.02", "--T", "4", "--out", str(kpp))
    cli("hj", "--model", "bgk-tabulated", "--n", "101", "--vmax", "1",
        "--r", "1", "--dx", "0.02", "--T", "4", "--out", str(bgk))
    return bgk / "front.csv", kpp / "front.csv", kpp / "snapshots.csv"


def test_a12_front_comparison_figure(artifacts, tmp_path):
    """A12: two-panel figure; the quadratic slope exceeds the BGK slope."""
    bgk_csv, kpp_csv, _ = artifacts
    out = tmp_path / "front_comparison.png"
    slopes = front_render(str(bgk_csv), str(kpp_csv), str(out))
    ok = out.exists() and out.stat().st_size > 0 and slopes["kpp"] > slopes["bgk"]
    print(f"[A12] {'PASS' if ok else 'FAIL'} - kpp slope {slopes['kpp']:.4f} > "
          f"bgk slope {slopes['bgk']:.4f}; figure {out.stat().st_size} bytes")
    assert out.exists() and out.stat().st_size > 0
    assert slopes["kpp"] > slopes["bgk"]


def test_front_comparison_annotations_match_solver(artifacts, tmp_path):
    bgk_csv, kpp_csv, _ = artifacts
    out = tmp_path / "fig.png"
    slopes = front_render(str(bgk_csv), str(kpp_csv), str(out))
    meta_bgk, _ = read_table(str(bgk_csv), required=("t", "front_x"))
    meta_kpp, _ = read_table(str(kpp_csv), required=("t", "front_x"))
    # the re-fitted slopes agree with the solver's own fits
    assert slopes["bgk"] == pytest.approx(float(meta_bgk["fitted_speed"]), rel=1e-6)
    assert slopes["kpp"] == pytest.approx(float(meta_kpp["fitted_speed"]), rel=1e-6)


def test_duplicated_input_gives_identical_panels(artifacts, tmp_path):
    bgk_csv, _, _ = artifacts
    out = tmp_path / "dup.png"
    slopes = front_render(str(bgk_csv), str(bgk_csv), str(out))
    assert slopes["kpp"] == slopes["bgk"]


def test_reruns_are_byte_identical(artifacts, tmp_path):
    bgk_csv, kpp_csv, _ = artifacts
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    front_render(str(bgk_csv), str(kpp_csv), str(a))
    front_render(str(bgk_csv), str(kpp_csv), str(b))
    assert a.read_bytes() == b.read_bytes()


def test_missing_column_is_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    rc = front_main([str(bad), str(bad), str(tmp_path / "x.png")])
    assert rc == 1
    assert str(bad) in capsys.readouterr().err


def test_empty_csv_is_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("t,front_x\n")
    assert front_main([str(empty), str(empty), str(tmp_path / "x.png")]) == 1


def test_usage_error_exit_code(tmp_path):
    assert front_main([str(tmp_path / "only-one.csv")]) == 2


def test_phase_snapshots_from_hj(artifacts, tmp_path):
    _, _, snap_csv = artifacts
    out = tmp_path / "phases.png"
    assert snap_main([str(snap_csv), str(out)]) == 0
    assert out.stat().st_size > 0


def test_phase_snapshots_from_kinetic(tmp_path):
    out_dir = tmp_path / "kin"
    cli("kinetic", "--n", "16", "--r", "1", "--eps", "0.25", "--dx", "0.05",
        "--T", "0.4", "--xmax", "1.5", "--slope", "6", "--plateau", "0.4",
        "--out", str(out_dir))
    out = tmp_path / "kin.png"
    assert snap_main([str(out_dir / "kinetic_snapshots.csv"), str(out)]) == 0
    assert out.stat().st_size > 0


def test_phase_snapshots_malformed_time(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x,phi\noops,0.0,1.0\n")
    assert snap_main([str(bad), str(tmp_path / "x.png")]) == 1
    assert "not numeric" in capsys.readouterr().err
