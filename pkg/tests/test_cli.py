import csv
import json

import numpy as np
import pytest

from mmwsim.cli import SUMMARY_COLUMNS, emit_results, run
from mmwsim.config import dump_config, load_config, load_grid, parse_config
from mmwsim.engine import ScenarioConfig, ScenarioGrid, ScenarioPoint
from mmwsim.exceptions import ConfigError
from mmwsim.metrics import build_report


class TestConfig:
    def test_empty_file_is_table1(self, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("")
        assert load_config(path) == ScenarioConfig.table1()
        assert load_config(path).policy == "pf"

    def test_preset_name(self):
        assert load_config("table1") == ScenarioConfig()

    def test_scenario_c(self, tmp_path):
        path = tmp_path / "c.ini"
        path.write_text("[blockage]\narrival_rate = 2.0\nmean_duration = 3000\n")
        cfg = load_config(path)
        assert (cfg.blockage.arrival_rate, cfg.blockage.mean_duration) == (2.0, 3000.0)
        assert cfg.blockage.decay_rate == 0.2

    def test_zero_ues(self):
        with pytest.raises(ConfigError, match="n_ues"):
            parse_config("[scenario]\nn_ues = 0\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match=r"\[blockage\] speed"):
            parse_config("[blockage]\nspeed = 3\n")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[radio]\nx = 1\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match=r"\[run\] drops"):
            parse_config("[run]\ndrops = many\n")

    def test_syntax_error_has_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("[run]\nthis is not a key value pair\n")

    def test_round_trip(self):
        cfg = ScenarioConfig(n_ues=5, policy="bapf", master_seed=99).with_blockage(
            arrival_rate=0.1 + 0.2, mean_duration=1234.5
        ).with_prediction(window_ms=200.0, error_std=0.0123)
        grid = ScenarioGrid((0.2, 2.0), (3000.0,), (50.0, 500.0), ("pf", "bapf"))
        again, grid_again = parse_config(dump_config(cfg, grid))
        assert again == cfg
        assert grid_again == grid

    def test_auto_error_round_trip(self):
        cfg = ScenarioConfig()
        assert "error_std = auto" in dump_config(cfg)
        assert parse_config(dump_config(cfg))[0] == cfg

    def test_sweep_defaults(self, tmp_path):
        path = tmp_path / "s.ini"
        path.write_text("[blockage]\nmean_duration = 3000\n[sweep]\narrival_rates = 0.2, 0.5, 1.0, 2.0\n")
        grid = load_grid(path)
        assert grid.arrival_rates == (0.2, 0.5, 1.0, 2.0)
        assert grid.mean_durations == (3000.0,)


def small_results():
    rng = np.random.default_rng(0)
    return [
        (ScenarioPoint("pf", 1.0, 1000.0), build_report([rng.uniform(1e8, 1e9, 8) for _ in range(3)])),
        (ScenarioPoint("bapf", 1.0, 1000.0, 50.0, 1e-3), build_report([rng.uniform(1e8, 1e9, 8)])),
    ]


class TestEmit:
    def test_csv(self, tmp_path):
        results = small_results()
        files = emit_results(results, "csv", tmp_path, seed=4)
        names = sorted(f.name for f in files)
        assert names == ["ecdf_bapf_lam1_tau1000_nt50.csv", "ecdf_pf_lam1_tau1000.csv", "summary.csv"]
        with (tmp_path / "summary.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert tuple(rows[0]) == SUMMARY_COLUMNS
        for row, (point, report) in zip(rows, results):
            assert row["policy"] == point.policy
            assert float(row["p1_rate_bps"]) == report.p1_rate
            assert float(row["mean_rate_bps"]) == report.mean_rate
            assert float(row["jain_mean"]) == report.jain_mean
            assert float(row["jain_pooled"]) == report.jain_pooled
            assert int(row["drops"]) == report.drops and row["seed"] == "4"
        assert rows[0]["n_t"] == "" and float(rows[1]["n_t"]) == 50.0

    def test_ecdf_file(self, tmp_path):
        emit_results(small_results(), "csv", tmp_path, seed=0)
        with (tmp_path / "ecdf_pf_lam1_tau1000.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["rate_bps", "cum_prob"]
        rates = [float(r[0]) for r in rows[1:]]
        probs = [float(r[1]) for r in rows[1:]]
        assert rates == sorted(rates) and len(rates) == 24
        assert probs[-1] == 1.0

    def test_json(self, tmp_path):
        emit_results(small_results(), "json", tmp_path, seed=0)
        rows = json.loads((tmp_path / "summary.json").read_text())
        assert rows[1]["policy"] == "bapf"
        ecdf = json.loads((tmp_path / "ecdf_pf_lam1_tau1000.json").read_text())
        assert ecdf[-1]["cum_prob"] == 1.0


def outputs(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.name != "manifest.json"}


class TestCommands:
    def test_simulate_reproducible(self, tmp_path):
        args = ["simulate", "--config", "table1", "--policy", "pf", "--seed", "7", "--drops", "2"]
        assert run(args + ["--out", str(tmp_path / "a")]) == 0
        assert run(args + ["--out", str(tmp_path / "b"), "--threads", "3"]) == 0
        a, b = outputs(tmp_path / "a"), outputs(tmp_path / "b")
        assert a == b and len(a) == 2
        manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
        assert manifest["master_seed"] == 7
        assert parse_config(manifest["config"])[0] == ScenarioConfig(drops=2, master_seed=7)

    def test_manifest_reproduces(self, tmp_path):
        assert run(["simulate", "--seed", "3", "--drops", "2", "--out", str(tmp_path / "a")]) == 0
        manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
        cfg_path = tmp_path / "snapshot.ini"
        cfg_path.write_text(manifest["config"])
        assert run(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
        assert outputs(tmp_path / "a") == outputs(tmp_path / "b")

    def test_sweep_three_policies(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[blockage]\narrival_rate = 2.0\nmean_duration = 3000\n[scenario]\nhorizon = 4000\n")
        assert run(["sweep", "--config", str(cfg), "--drops", "2", "--out", str(tmp_path / "o")]) == 0
        names = sorted(p.name for p in (tmp_path / "o").iterdir())
        assert names == [
            "ecdf_bapf_lam2_tau3000_nt50.csv",
            "ecdf_maxmin_lam2_tau3000.csv",
            "ecdf_pf_lam2_tau3000.csv",
            "manifest.json",
            "summary.csv",
        ]

    def test_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MMWSIM_SEED", "13")
        assert run(["simulate", "--drops", "1", "--out", str(tmp_path)]) == 0
        assert json.loads((tmp_path / "manifest.json").read_text())["master_seed"] == 13

    def test_validate(self, capsys):
        assert run(["validate"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and out.count("PASS") >= 5

    def test_trace(self, tmp_path):
        cfg = tmp_path / "t.ini"
        cfg.write_text("[scenario]\nn_ues = 2\nhorizon = 100\n")
        assert run(["trace", "--config", str(cfg), "--out", str(tmp_path / "tr")]) == 0
        files = sorted((tmp_path / "tr").iterdir())
        assert [f.name for f in files] == ["trace_ue0.csv", "trace_ue1.csv"]
        assert files[0].read_text().splitlines()[0] == "slot_index,state_label,attenuation_db"
        assert len(files[0].read_text().splitlines()) == 101

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[scenario]\nn_ues = 0\n")
        assert run(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) != 0
        assert "n_ues" in capsys.readouterr().err

    def test_missing_config(self, tmp_path, capsys):
        assert run(["simulate", "--config", str(tmp_path / "nope.ini")]) != 0
        assert "cannot read config" in capsys.readouterr().err
