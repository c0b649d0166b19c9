import numpy as np
import pytest

from kinetic_fronts.cli import main, parse_args, UsageError
from kinetic_fronts.csvio import read_csv, write_csv


def read_lines_without_timestamp(path):
    with open(path) as fh:
        return [ln for ln in fh if not ln.startswith("# timestamp=")]


def test_parse_rejects_negative_growth():
    with pytest.raises(UsageError, match="growth rate must be >= 0"):
        parse_args(["speed", "--r", "-1"])


def test_parse_rejects_unknown_flag(capsys):
    assert main(["speed", "--nonsense", "1"]) == 2


def test_parse_rejects_unknown_command():
    assert main(["frobnicate"]) == 2


def test_parse_rejects_bad_epsilon_order():
    with pytest.raises(UsageError, match="strictly decreasing"):
        parse_args(["converge", "--eps", "0.25,0.5"])


def test_parse_kernel_model_needs_csv():
    with pytest.raises(UsageError, match="kernel-csv"):
        parse_args(["hamiltonian", "--model", "kernel"])


def test_exit_codes(tmp_path):
    assert main(["speed", "--model", "quadratic", "--d", "1", "--r", "1",
                 "--out", str(tmp_path)]) == 0
    assert main(["speed", "--r", "-3"]) == 2


def test_speed_output_values(tmp_path, capsys):
    rc = main(["speed", "--model", "quadratic", "--d", "1", "--r", "1",
               "--out", str(tmp_path)])
    assert rc == 0
    meta, cols = read_csv(tmp_path / "summary.csv")
    assert cols["c_star"][0] == pytest.approx(2.0, abs=1e-8)
    assert cols["p_star"][0] == pytest.approx(1.0, abs=1e-6)
    out = capsys.readouterr().out
    assert "c*" in out


def test_bgk_speed_against_grid_scan(tmp_path):
    main(["speed", "--model", "bgk", "--vmax", "1", "--r", "1",
          "--out", str(tmp_path)])
    _, cols = read_csv(tmp_path / "summary.csv")
    ps = np.arange(1e-3, 20.0, 1e-3)
    scan = np.min((ps / np.tanh(ps / 2.0) - 2.0 + 1.0) / ps)
    assert abs(cols["c_star"][0] - scan) <= 1e-6


def test_hamiltonian_table_and_manifest(tmp_path):
    rc = main(["hamiltonian", "--model", "bgk", "--vmax", "1", "--n", "64",
               "--r", "1", "--p-max", "2", "--p-step", "0.5",
               "--out", str(tmp_path)])
    assert rc == 0
    meta, cols = read_csv(tmp_path / "hamiltonian.csv")
    assert list(cols) == ["p", "H", "dH"]
    assert cols["p"].size == 9
    assert abs(cols["H"][4]) <= 1e-10  # H(0) = 0
    manifest = (tmp_path / "manifest.csv").read_text()
    assert "status,,ok" in manifest
    assert "hamiltonian.csv" in manifest


def test_hamiltonian_kernel_csv_input(tmp_path):
    n = 16
    from kinetic_fronts.velocity_space import make_grid

    grid = make_grid(1.0, n)
    k = 1.0 + 0.5 * np.cos(grid.nodes[:, None] - grid.nodes[None, :])
    path = tmp_path / "kernel.csv"
    np.savetxt(path, k, delimiter=",")
    rc = main(["hamiltonian", "--model", "kernel", "--kernel-csv", str(path),
               "--vmax", "1", "--n", str(n), "--p-max", "1", "--p-step", "0.5",
               "--out", str(tmp_path)])
    assert rc == 0


def test_hj_front_csv(tmp_path):
    rc = main(["hj", "--model", "quadratic", "--d", "1", "--r", "1",
               "--dx", "0.05", "--T", "2", "--out", str(tmp_path)])
    assert rc == 0
    meta, cols = read_csv(tmp_path / "front.csv")
    assert list(cols) == ["t", "front_x"]
    assert float(meta["fitted_speed"]) == pytest.approx(2.0, rel=0.1)
    assert float(meta["predicted_c_star"]) == pytest.approx(2.0, abs=1e-8)
    meta2, cols2 = read_csv(tmp_path / "snapshots.csv")
    assert list(cols2) == ["t", "x", "phi"]


def test_solver_error_writes_manifest(tmp_path, monkeypatch):
    # break the pipeline mid-run: the manifest must still appear with a
    # module-qualified error status
    import kinetic_fronts.cli as cli_mod

    def boom(cfg, out):
        raise RuntimeError("deliberate failure")

    monkeypatch.setitem(cli_mod._COMMANDS, "speed", boom)
    rc = main(["speed", "--model", "quadratic", "--r", "1", "--out", str(tmp_path)])
    assert rc == 1
    manifest = (tmp_path / "manifest.csv").read_text()
    assert "status,,error: builtins.RuntimeError: deliberate failure" in manifest


def test_identical_runs_are_byte_identical(tmp_path):
    args = ["kolmogorov", "--sigma", "1", "--check", "all"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "kolmogorov.csv").read_bytes() == (out2 / "kolmogorov.csv").read_bytes()
    assert read_lines_without_timestamp(out1 / "manifest.csv") \
        == read_lines_without_timestamp(out2 / "manifest.csv")


def test_thread_cap_env(tmp_path, monkeypatch):
    monkeypatch.setenv("KINETIC_FRONT_THREADS", "2")
    rc = main(["hamiltonian", "--model", "bgk", "--n", "32", "--p-max", "1",
               "--p-step", "0.25", "--out", str(tmp_path)])
    assert rc == 0
    monkeypatch.setenv("KINETIC_FRONT_THREADS", "zero")
    assert main(["hamiltonian", "--out", str(tmp_path)]) == 2


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, {"a": [1.0, 2.5], "b": [3, 4]}, {"note": "x"})
    meta, cols = read_csv(path)
    assert meta["note"] == "x"
    np.testing.assert_allclose(cols["a"], [1.0, 2.5])


def test_converge_smoke(tmp_path):
    rc = main(["converge", "--n", "16", "--r", "1", "--eps", "0.5,0.25",
               "--dx", "0.05", "--T", "0.4", "--xmax", "1.5",
               "--slope", "6", "--plateau", "0.3", "--out", str(tmp_path)])
    assert rc == 0
    meta, cols = read_csv(tmp_path / "kinetic_summary.csv")
    assert list(cols) == ["eps", "gap", "min_rho_nullset", "max_f_positive"]
    assert cols["gap"][0] > cols["gap"][1]
