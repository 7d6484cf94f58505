"""Command-line interface tests: artifact layout, exit codes, config-file
precedence, and byte-stable output."""

import json

import numpy as np
import pytest

from fracsg.cli import main


def read_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_run_benchmark_produces_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "--example", "5.1", "--alpha", "2", "--omega", "1.1",
                 "--domain", "-20", "20", "--h", "0.2", "--tau", "0.02",
                 "--T", "1", "--out", str(out)])
    assert code == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["example"] == "5.1"
    assert meta["M"] == 200 and meta["N"] == 50
    assert meta["fft_embed_size"] == 512
    assert (out / "solution_0.csv").exists()
    assert (out / "solution_50.csv").exists()

    energy = read_csv(out / "energy.csv")
    assert energy.shape == (51, 4)
    assert energy[0, 3] == 0.0
    assert np.max(np.abs(energy[:, 3])) <= 1e-8

    final = read_csv(out / "solution_50.csv")
    assert final.shape == (199, 4)
    # displacement stays within the breather's range
    assert np.max(np.abs(final[:, 1])) < 2.0 * np.pi


def test_run_is_byte_stable(tmp_path):
    args = ["run", "--example", "5.2", "--alpha", "1.5", "--domain", "-20", "20",
            "--h", "0.5", "--tau", "0.1", "--T", "0.5"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    for name in sorted(p.name for p in out1.iterdir()):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_run_preset_with_overrides(tmp_path):
    out = tmp_path / "p"
    code = main(["run", "--preset", "soliton1", "--alpha", "1.5", "--h", "0.5",
                 "--tau", "0.05", "--T", "0.1", "--out", str(out)])
    assert code == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["example"] == "5.1"
    assert meta["omega"] == 1.0  # preset value survives the overrides
    assert meta["domain"] == [-100.0, 100.0]
    assert meta["h"] == 0.5


def test_alpha_out_of_range_exits_one(tmp_path, capsys):
    code = main(["run", "--example", "5.1", "--alpha", "2.5", "--domain", "-20", "20",
                 "--h", "0.2", "--tau", "0.02", "--T", "1",
                 "--out", str(tmp_path / "x")])
    assert code == 1
    assert "(1, 2]" in capsys.readouterr().err


def test_nondivisible_mesh_exits_one(tmp_path, capsys):
    code = main(["run", "--example", "5.1", "--alpha", "2", "--domain", "-20", "20",
                 "--h", "0.3", "--tau", "0.02", "--T", "1",
                 "--out", str(tmp_path / "x")])
    assert code == 1
    assert "divide" in capsys.readouterr().err


def test_missing_required_setting_exits_one(tmp_path, capsys):
    code = main(["run", "--alpha", "1.5", "--out", str(tmp_path / "x")])
    assert code == 1
    assert "missing required" in capsys.readouterr().err


def test_unknown_subcommand_exits_one(capsys):
    assert main(["nonsense"]) == 1


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "settings.txt"
    cfg.write_text(
        "# benchmark configuration\n"
        "example = 5.2\n"
        "alpha = 1.5\n"
        "domain = -20 20\n"
        "h = 0.5\n"
        "tau = 0.1\n"
        "T = 0.5\n")
    out = tmp_path / "out"
    code = main(["run", "--config", str(cfg), "--alpha", "1.9", "--out", str(out)])
    assert code == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["alpha"] == 1.9  # flag wins
    assert meta["example"] == "5.2"  # file supplies the rest


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "settings.txt"
    cfg.write_text("alpha = 1.5\nwavelength = 3\n")
    code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert code == 1
    assert "wavelength" in capsys.readouterr().err


def test_convergence_single_level_has_empty_order(tmp_path):
    out = tmp_path / "conv"
    code = main(["convergence", "--example", "5.1", "--alphas", "2", "--omega", "1.1",
                 "--domain", "-20", "20", "--base-h", "1", "--base-tau", "0.25",
                 "--levels", "1", "--T", "1", "--out", str(out)])
    assert code == 0
    lines = (out / "convergence.csv").read_text().splitlines()
    assert lines[0] == "alpha,h,tau,error,order"
    assert len(lines) == 2
    assert lines[1].endswith(",")  # no order on the first ladder level


def test_convergence_preset_scaled_down(tmp_path):
    out = tmp_path / "conv"
    code = main(["convergence", "--preset", "table2", "--alphas", "1.6,2",
                 "--base-h", "2", "--base-tau", "0.25", "--levels", "2",
                 "--T", "0.5", "--out", str(out)])
    assert code == 0
    rows = (out / "convergence.csv").read_text().splitlines()
    assert len(rows) == 5  # header + 2 levels x 2 orders


def test_energy_writes_per_alpha_series(tmp_path):
    from fracsg import FracOperator, GridSpec, discrete_energy, get_problem, initial_state

    out = tmp_path / "en"
    code = main(["energy", "--example", "5.2", "--alphas", "1.5,2",
                 "--domain", "-20", "20", "--h", "0.5", "--tau", "0.1",
                 "--T", "0.5", "--out", str(out)])
    assert code == 0
    for name, alpha in (("energy_1.5.csv", 1.5), ("energy_2.csv", 2.0)):
        series = read_csv(out / name)
        assert series.shape == (6, 4)
        assert series[0, 3] == 0.0
        assert np.max(series[:, 3]) <= 1e-10
        grid = GridSpec(a=-20.0, b=20.0, M=80)
        op = FracOperator(alpha, grid)
        e0 = discrete_energy(initial_state(get_problem("5.2"), grid), op)
        assert series[0, 2] == pytest.approx(e0, rel=1e-15)


def test_bench_rejects_empty_sizes(tmp_path, capsys):
    code = main(["bench", "--sizes", "", "--out", str(tmp_path / "b")])
    assert code == 1
    assert "nonempty" in capsys.readouterr().err


def test_bench_small_instance(tmp_path):
    out = tmp_path / "bench"
    code = main(["bench", "--sizes", "64", "--alphas", "1.5", "--taus", "0.1",
                 "--T", "0.2", "--reps", "1", "--out", str(out)])
    assert code == 0
    rows = read_csv(out / "bench.csv")
    assert rows.shape == (1, 8)
    assert rows[0, 7] <= 1e-8  # direct and FFT paths agree
