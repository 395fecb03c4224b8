"""
Command-line tests driven through Typer's CliRunner.

Every invocation writes into a temporary ``--out`` directory so result files
and the run log can be inspected.
"""
import json
import os
import sys

import pandas as pd
import pytest
from typer.testing import CliRunner

current_dir = os.path.dirname(__file__)
project_root = os.path.abspath(os.path.join(current_dir, ".."))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from cli.main import app  # noqa: E402

runner = CliRunner()


@pytest.fixture
def invoke(tmp_path):
    def _invoke(*args, out=None):
        return runner.invoke(app, ["--out", str(out or tmp_path), *args])
    return _invoke


def test_help_lists_commands_and_defaults():
    result = runner.invoke(app, ["exchange", "--help"])
    assert result.exit_code == 0
    assert "--key-bits" in result.output
    assert "--threshold" in result.output
    assert "--transcript-out" in result.output


def test_exchange_prints_key_and_is_deterministic(invoke):
    first = invoke("exchange", "--key-bits", "4", "--seed", "11")
    second = invoke("exchange", "--key-bits", "4", "--seed", "11")
    assert first.exit_code == 0, first.output
    assert first.output == second.output
    key_line = next(line for line in first.output.splitlines() if line.startswith("key: "))
    assert len(key_line.removeprefix("key: ")) == 4
    assert "kept indexes: [" in first.output
    assert "status: complete" in first.output


def test_global_seed_matches_command_seed(invoke):
    assert invoke("--seed", "4", "exchange").output == invoke("exchange", "--seed", "4").output


def test_exchange_writes_transcript(invoke, tmp_path):
    path = tmp_path / "transcript.csv"
    result = invoke("exchange", "--key-bits", "8", "--transcript-out", str(path))
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["slot_index", "emitted_a", "emitted_c", "channel_sum", "kept"]
    assert frame["kept"].sum() == 8


def test_exchange_invalid_threshold_is_config_error(invoke):
    result = invoke("exchange", "--threshold", "0")
    assert result.exit_code == 1
    assert "threshold" in result.output


def test_exchange_unknown_policy_is_usage_error(invoke):
    assert invoke("exchange", "--policy", "b").exit_code == 2


def test_send_round_trip(invoke):
    result = invoke("send", "--message", "hello nanomachine")
    assert result.exit_code == 0, result.output
    assert "received: hello nanomachine" in result.output
    assert "bit errors: 0" in result.output


def test_energy_reference_point(invoke):
    result = invoke("energy", "--n", "4096", "--k", "8", "--m", "2", "--ebt", "125")
    assert result.exit_code == 0, result.output
    assert "517024.0" in result.output
    assert "512000.0" in result.output


def test_energy_default_rekey_count(invoke):
    result = invoke("energy")
    assert result.exit_code == 0, result.output
    assert "517024.0" in result.output


def test_energy_sweep_csv(invoke, tmp_path):
    result = invoke("energy", "--sweep", "8,16,32")
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "sweep.csv")
    assert frame["k"].tolist() == [8, 16, 32]
    assert frame["e_plain"].nunique() == 1
    assert "k,m,n,e_secure_analytic" in result.output


def test_energy_sweep_simulated(invoke, tmp_path):
    result = invoke("energy", "--sweep", "8,16", "--simulate")
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "sweep.csv")
    assert frame["e_secure_measured"].notna().all()


def test_energy_rejects_zero_key(invoke):
    assert invoke("energy", "--k", "0").exit_code == 1


def test_energy_bad_sweep_is_usage_error(invoke):
    assert invoke("energy", "--sweep", "8,x").exit_code == 2


def test_attack_within_band(invoke, tmp_path):
    result = invoke("attack", "--k", "4", "--trials", "100000", "--seed", "1")
    assert result.exit_code == 0, result.output
    assert "expected rate: 0.0625" in result.output
    rows = pd.read_csv(tmp_path / "attack.csv")
    assert rows["trials"].tolist() == [100000]


def test_attack_small_sample(invoke):
    result = invoke("attack", "--k", "16", "--trials", "100")
    assert result.exit_code == 0, result.output
    assert "3-sigma band" in result.output


def test_attack_zero_trials(invoke):
    assert invoke("attack", "--trials", "0").exit_code == 1


def test_attack_band_failure_exit_code(invoke, monkeypatch):
    from cli.commands import attack as attack_cmd
    from mcsec.experiment import AttackStats

    monkeypatch.setattr(attack_cmd, "attack_statistics", lambda k, trials, seed: AttackStats(k, trials, trials))
    assert invoke("attack", "--k", "4", "--trials", "1000").exit_code == 3


def test_experiment_defaults(invoke, tmp_path):
    result = invoke("experiment")
    assert result.exit_code == 0, result.output
    data = json.loads((tmp_path / "experiment.json").read_text())
    assert data["keys_generated"] == 2
    assert data["bit_errors"] == 0
    assert (tmp_path / "sweep.csv").exists()
    assert not (tmp_path / "attack.csv").exists()


def test_experiment_outputs_are_byte_identical(invoke, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert invoke("experiment", "--seed", "9", "--attack-trials", "500", out=a).exit_code == 0
    assert invoke("experiment", "--seed", "9", "--attack-trials", "500", out=b).exit_code == 0
    for name in ("sweep.csv", "attack.csv", "experiment.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_experiment_noise_sweep(invoke, tmp_path):
    result = invoke("experiment", "--noise-sweep", "1.0,0.6")
    assert result.exit_code in (0, 4), result.output
    frame = pd.read_csv(tmp_path / "noise.csv")
    assert frame["arrival_prob"].tolist() == [1.0, 0.6]


def test_experiment_noisy_channel_reports_mismatch(invoke, tmp_path):
    result = invoke("experiment", "--arrival-prob", "0.05")
    assert result.exit_code == 4
    data = json.loads((tmp_path / "experiment.json").read_text())
    assert data["key_agreement_failures"] > 0


def test_experiment_missing_config_is_usage_error(invoke, tmp_path):
    result = runner.invoke(app, ["--out", str(tmp_path), "--config", str(tmp_path / "nope.json"), "experiment"])
    assert result.exit_code == 2


def test_experiment_reads_config_document(tmp_path):
    doc = tmp_path / "run.json"
    doc.write_text(json.dumps({"key_bits": 16, "seed": 3}))
    result = runner.invoke(app, ["--out", str(tmp_path), "--config", str(doc), "experiment"])
    assert result.exit_code == 0, result.output
    rows = pd.read_csv(tmp_path / "sweep.csv")
    assert rows["k"].tolist() == [16]


def test_run_log_records_each_command(invoke, tmp_path):
    invoke("exchange")
    invoke("exchange", "--threshold", "0")
    lines = [json.loads(line) for line in (tmp_path / "runs.log").read_text().splitlines()]
    assert [entry["command"] for entry in lines] == ["exchange", "exchange"]
    assert [entry["exit_code"] for entry in lines] == [0, 1]
    assert lines[1]["outcome"] == "config_error"
    assert lines[0]["run_id"] != lines[1]["run_id"]


@pytest.mark.parametrize("command", ["exchange", "send", "attack"])
def test_negative_seed_is_usage_error(invoke, tmp_path, command):
    result = invoke(command, "--seed", "-1")
    assert result.exit_code == 2
    assert "seed" in result.output
    entry = json.loads((tmp_path / "runs.log").read_text().splitlines()[-1])
    assert entry["outcome"] == "usage_error"
    assert entry["exit_code"] == 2


def test_global_negative_seed_is_usage_error(invoke):
    assert invoke("--seed", "-1", "exchange").exit_code == 2


def test_experiment_reads_sectioned_config_document(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"n_bits": 1024, "frame_bits": 256, "channel": {"threshold": 30}, "energy": {"e_bit_tx": 250.0}}))
    result = runner.invoke(app, ["--out", str(tmp_path), "--config", str(path), "experiment"])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "experiment.json").read_text())
    assert report["energy"]["e_plain_total"] == 1024 * 250.0
