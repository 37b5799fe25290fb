"""CLI argument handling, flag overrides, and exit codes."""

import json
import subprocess
import sys

import pytest

from rmtlab.cli import main
from rmtlab.harness import FailureBudgetError


def test_no_subcommand_prints_help_and_exits_2(capsys):
    assert main([]) == 2
    assert "experiment" in capsys.readouterr().out


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["teleport"])
    assert info.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "rmtlab-v" in capsys.readouterr().out


def test_small_run_writes_artifacts(tmp_path, capsys):
    code = main([
        "circular-law", "--n", "24", "--m", "1", "--replicas", "6",
        "--seed", "3", "--out", str(tmp_path),
    ])
    assert code in (0, 1)
    out = capsys.readouterr().out
    assert "circular-law" in out
    assert (tmp_path / "circular-law" / "replicas.csv").exists()
    summary = json.load(open(tmp_path / "circular-law" / "summary.json"))
    assert summary["config"]["n"] == 24


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "experiment = circular-law\nn = 16\nreplicas = 4\nmaster_seed = 1\n"
    )
    code = main([
        "circular-law", "--config", str(cfg), "--n", "20",
        "--out", str(tmp_path / "runs"),
    ])
    assert code in (0, 1)
    summary = json.load(
        open(tmp_path / "runs" / "circular-law" / "summary.json"))
    assert summary["config"]["n"] == 20          # flag wins
    assert summary["config"]["replicas"] == 4    # file value kept


def test_run_prefix_alias(tmp_path):
    code = main([
        "run_circular_law", "--n", "16", "--replicas", "4",
        "--out", str(tmp_path),
    ])
    assert code in (0, 1)
    assert (tmp_path / "circular-law" / "summary.json").exists()


def test_missing_config_file_exits_2(capsys):
    assert main(["clt", "--config", "/no/such/file.cfg"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_bad_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("warp_factor = 9\n")
    assert main(["clt", "--config", str(cfg)]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_runner_config_error_exits_2(capsys):
    # universality refuses truncated factors
    assert main(["universality", "--tau", "0.5", "--n", "16"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_failure_budget_maps_to_exit_3(monkeypatch, capsys):
    def explode(cfg):
        raise FailureBudgetError("synthetic budget blowout")

    monkeypatch.setattr("rmtlab.cli.run_experiment", explode)
    assert main(["circular-law", "--n", "16"]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_gate_failure_maps_to_exit_1(tmp_path):
    # tiny clt run: variance gate cannot hold at this replica count,
    # but the artifacts must still be written
    code = main([
        "clt", "--n", "16", "--replicas", "8", "--seed", "1",
        "--out", str(tmp_path),
    ])
    assert code in (0, 1)
    assert (tmp_path / "clt" / "summary.json").exists()


def test_installed_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "rmtlab.cli", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "rmtlab-v" in proc.stdout
