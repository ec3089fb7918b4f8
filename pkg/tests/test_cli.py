"""Command-line interface: config validation, file schemas, exit codes
and byte-level determinism."""

import json
import os

import numpy as np
import pytest

from qst.cli import (EXIT_CONFIG, EXIT_OK, ConfigError, main, parse_config,
                     run_experiment)

PULSE = {"kappa": 5.8927, "tau_d": 0.2699}


def write_config(tmp_path, name="config.json", **cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


class TestParseConfig:
    def test_minimal_transfer_config_fills_defaults(self, tmp_path):
        path = write_config(tmp_path, experiment="transfer", g_ratio=0.5,
                            **PULSE)
        cfg = parse_config(path)
        assert cfg["n_modes"] == 51
        assert cfg["scheme"] == "simultaneous"
        assert cfg["out"] == "."

    def test_unknown_key_named_in_error(self, tmp_path):
        path = write_config(tmp_path, experiment="transfer", g_ratio=0.5,
                            gama=0.01, **PULSE)
        with pytest.raises(ConfigError, match="gama"):
            parse_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            parse_config(str(tmp_path / "nope.json"))

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="JSON"):
            parse_config(str(path))

    def test_unknown_experiment(self, tmp_path):
        path = write_config(tmp_path, experiment="teleport")
        with pytest.raises(ConfigError, match="experiment"):
            parse_config(path)

    def test_experiment_subcommand_mismatch(self, tmp_path):
        path = write_config(tmp_path, experiment="transfer", g_ratio=0.5,
                            **PULSE)
        with pytest.raises(ConfigError, match="does not match"):
            parse_config(path, "optimize")

    def test_even_mode_count_rejected(self, tmp_path):
        path = write_config(tmp_path, experiment="transfer", g_ratio=0.5,
                            n_modes=50, **PULSE)
        with pytest.raises(ConfigError, match="odd"):
            parse_config(path)

    def test_empty_list_rejected(self, tmp_path):
        path = write_config(tmp_path, experiment="sweep-detuning",
                            g_ratio=0.5, delta_omegas=[])
        with pytest.raises(ConfigError, match="delta_omegas"):
            parse_config(path)


class TestTransferRun:
    def run(self, tmp_path, **extra):
        out = tmp_path / "out"
        cfg = dict(experiment="transfer", g_ratio=0.5, n_modes=11,
                   n_samples=21, out=str(out), **PULSE, **extra)
        assert run_experiment(parse_config(
            write_config(tmp_path, **cfg))) == EXIT_OK
        return out

    def test_timeseries_schema(self, tmp_path):
        out = self.run(tmp_path)
        header, rows = read_csv(out / "timeseries.csv")
        assert header == ["t", "P_A", "P_B"] + \
            [f"mode_{k:02d}" for k in range(11)]
        assert len(rows) == 21

    def test_dissipative_run_adds_vacuum_column(self, tmp_path):
        out = self.run(tmp_path, gamma=1e-3)
        header, _ = read_csv(out / "timeseries.csv")
        assert header[-1] == "P_vac"

    def test_seventeen_significant_digits_round_trip(self, tmp_path):
        out = self.run(tmp_path)
        _, rows = read_csv(out / "timeseries.csv")
        for cell in rows[7]:
            assert repr(float(cell)) == repr(float(f"{float(cell):.17g}"))
            assert float(cell) == float(f"{float(cell):.17g}")

    def test_meta_sidecar(self, tmp_path):
        out = self.run(tmp_path)
        meta = json.loads((out / "meta.json").read_text())
        assert meta["experiment"] == "transfer"
        assert 0.0 <= meta["fidelity"] <= 1.0
        assert "pulse_checksum" in meta
        assert meta["config"]["g_ratio"] == 0.5

    def test_byte_identical_rerun(self, tmp_path):
        a = self.run(tmp_path)
        data = (a / "timeseries.csv").read_bytes()
        b_dir = tmp_path / "again"
        cfg = dict(experiment="transfer", g_ratio=0.5, n_modes=11,
                   n_samples=21, out=str(b_dir), **PULSE)
        run_experiment(parse_config(write_config(tmp_path, "c2.json", **cfg)))
        assert (b_dir / "timeseries.csv").read_bytes() == data


class TestSweepRuns:
    def test_sweep_csv_schema(self, tmp_path):
        out = tmp_path / "out"
        cfg = dict(experiment="sweep-dissipation", which="gamma",
                   values=[0.0, 1e-3], pulses={"0.5": [5.8927, 0.2699]},
                   n_modes=11, out=str(out))
        path = write_config(tmp_path, **cfg)
        assert run_experiment(parse_config(path)) == EXIT_OK
        header, rows = read_csv(out / "sweep.csv")
        assert header == ["param_name", "param_value", "g_ratio",
                          "infidelity", "stderr"]
        assert [r[0] for r in rows] == ["gamma", "gamma"]

    def test_disorder_seed_flag_overrides(self, tmp_path):
        outs = []
        for seed in (1, 2):
            out = tmp_path / f"out{seed}"
            cfg = dict(experiment="sweep-disorder", deltas=[0.05],
                       n_realizations=3, pulses={"0.5": [5.8927, 0.2699]},
                       n_modes=11, out=str(out))
            path = write_config(tmp_path, f"c{seed}.json", **cfg)
            code = main(["sweep-disorder", "--config", path,
                         "--seed", str(seed)])
            assert code == EXIT_OK
            outs.append((out / "sweep.csv").read_text())
        assert outs[0] != outs[1]

    def test_leakage_labels_alpha(self, tmp_path):
        out = tmp_path / "out"
        cfg = dict(experiment="sweep-leakage", g_ratio=0.5,
                   pulse=[5.8927, 0.2699], epsilons=[0.0, 0.1],
                   alphas=[1.0, 10.0], n_modes=5, out=str(out))
        assert run_experiment(parse_config(
            write_config(tmp_path, **cfg))) == EXIT_OK
        _, rows = read_csv(out / "sweep.csv")
        assert {r[0] for r in rows} == \
            {"epsilon_f[alpha=1]", "epsilon_f[alpha=10]"}


class TestOptimizeAndFits:
    def test_fit_trends_outputs(self, tmp_path, reference_optima):
        out = tmp_path / "out"
        pulses = {str(g): [k, d] for g, (k, d, _) in reference_optima.items()}
        cfg = dict(experiment="fit-trends", pulses=pulses, n_modes=11,
                   out=str(out))
        assert run_experiment(parse_config(
            write_config(tmp_path, **cfg))) == EXIT_OK
        header, rows = read_csv(out / "optimum.csv")
        assert header == ["g_ratio", "kappa_opt", "tau_d_opt", "F_opt",
                          "t_cycle"]
        assert len(rows) == len(pulses)
        header, rows = read_csv(out / "fits.csv")
        assert header == ["model", "coeff_1", "coeff_2", "r_squared"]
        assert [r[0] for r in rows] == ["kappa_opt_exponential",
                                       "t_cycle_exponential",
                                       "tau_d_opt_logarithmic"]

    def test_optimize_writes_scan_and_optimum(self, tmp_path):
        out = tmp_path / "out"
        cfg = dict(experiment="optimize", g_ratio=0.5, n_modes=3,
                   out=str(out))
        assert run_experiment(parse_config(
            write_config(tmp_path, **cfg))) == EXIT_OK
        header, rows = read_csv(out / "scan.csv")
        assert header == ["kappa", "tau_d", "infidelity"]
        assert len(rows) > 100
        header, rows = read_csv(out / "optimum.csv")
        assert len(rows) == 1
        assert float(rows[0][3]) > 0.99   # F_opt


class TestRoundTripRun:
    def test_constant_coupling_run(self, tmp_path):
        out = tmp_path / "out"
        cfg = dict(experiment="round-trip", g_ratio=0.5, constant_g=0.5,
                   t_final=3.0, n_modes=11, n_samples=31, out=str(out))
        assert run_experiment(parse_config(
            write_config(tmp_path, **cfg))) == EXIT_OK
        meta = json.loads((out / "meta.json").read_text())
        assert "return_probability" in meta

    def test_g_b_warning_path(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfg = dict(experiment="round-trip", g_ratio=0.5, g_b=0.3,
                   constant_g=0.5, t_final=1.0, n_modes=5, n_samples=11,
                   out=str(out))
        assert run_experiment(parse_config(
            write_config(tmp_path, **cfg))) == EXIT_OK
        assert "g_B" in capsys.readouterr().err


class TestMainEntry:
    def test_exit_code_config_error(self, tmp_path):
        path = write_config(tmp_path, experiment="transfer", g_ratio=0.5,
                            bogus=1, **PULSE)
        assert main(["transfer", "--config", path]) == EXIT_CONFIG

    def test_out_flag_overrides_config(self, tmp_path):
        path = write_config(tmp_path, experiment="transfer", g_ratio=0.5,
                            n_modes=5, n_samples=5, out="ignored", **PULSE)
        out = tmp_path / "flagged"
        assert main(["transfer", "--config", path,
                     "--out", str(out)]) == EXIT_OK
        assert (out / "timeseries.csv").exists()
        assert not os.path.exists("ignored")

    def test_no_partial_files_on_config_error(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(tmp_path, experiment="transfer", out=str(out))
        assert main(["transfer", "--config", path]) == EXIT_CONFIG
        assert not out.exists()
