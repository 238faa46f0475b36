import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from audit_pipeline import CONVERGED_LOSS, AuditPipeline, load_audit_config
from connectors.report_output import read_report, read_train_log, read_weights, to_json, write_weights
from main import EXIT_CONFIG, EXIT_DIVERGED, EXIT_NOT_CONVERGED, EXIT_OK, main
from models.grid_agent import GridAgent
from schemas.gridworld import AgentSpec, WorldSpec

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _write(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def _report_without_timestamp(path: Path) -> dict:
    payload = json.loads(path.read_text(encoding="utf-8"))
    payload.pop("generated_at")
    return payload


def test_missing_config_exits_with_config_error(tmp_path) -> None:
    assert main(["audit", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    assert main(["train", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG


def test_invalid_config_exits_with_config_error(tmp_path) -> None:
    bad = _write(tmp_path / "audit.json", {"architecture": "gridworld-printed", "bogus": 1})
    assert main(["audit", "--config", str(bad)]) == EXIT_CONFIG
    unsorted = _write(tmp_path / "scales.json", {"architecture": "gridworld-printed", "scales": [0.0, 1.0, 0.5]})
    assert main(["audit", "--config", str(unsorted)]) == EXIT_CONFIG
    no_weights = _write(tmp_path / "grid.json", {"architecture": "gridworld"})
    assert main(["audit", "--config", str(no_weights)]) == EXIT_CONFIG


def test_printed_audit_is_byte_identical_across_runs(tmp_path) -> None:
    config = CONFIGS / "audit_printed.json"
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["audit", "--config", str(config), "--seed", "3", "--out", str(first)]) == EXIT_OK
    assert main(["audit", "--config", str(config), "--seed", "3", "--out", str(second)]) == EXIT_OK
    a = _report_without_timestamp(first / "profile_report.json")
    b = _report_without_timestamp(second / "profile_report.json")
    a["config"].pop("output_dir")
    b["config"].pop("output_dir")
    assert a == b
    assert a["verdict"]["cell_g2a_g4"] == "miscalibrated"
    assert a["seed"] == 3


def test_gridworld_audit_is_byte_identical_across_runs(tmp_path, small_agent) -> None:
    write_weights(small_agent.to_weight_file(), tmp_path / "weights.json")
    config = _write(tmp_path / "audit.json", {
        "architecture": "gridworld",
        "weights": "weights.json",
        "scales": [0.0, 0.5, 1.0],
        "samples_per_scale": 25,
    })
    assert main(["audit", "--config", str(config), "--out", str(tmp_path)]) == EXIT_OK
    first = (tmp_path / "profile_report.json").read_text(encoding="utf-8")
    assert main(["audit", "--config", str(config), "--out", str(tmp_path)]) == EXIT_OK
    second = (tmp_path / "profile_report.json").read_text(encoding="utf-8")
    strip = lambda text: [line for line in text.splitlines() if '"generated_at"' not in line]  # noqa: E731
    assert strip(first) == strip(second)


def test_report_round_trip(tmp_path) -> None:
    pipeline = AuditPipeline(output_dir=str(tmp_path))
    report = pipeline.audit(load_audit_config(CONFIGS / "audit_printed.json"))
    (path,) = pipeline.write_audit(report, tmp_path)
    loaded = read_report(path)
    assert to_json(loaded) == path.read_text(encoding="utf-8")
    assert loaded.profile == report.profile


def test_symbolic_audit_writes_tables(tmp_path) -> None:
    assert main(["audit", "--config", str(CONFIGS / "audit_symbolic.json"), "--out", str(tmp_path)]) == EXIT_OK
    report = read_report(tmp_path / "profile_report.json")
    assert report.profile.eps_pres == 0.0
    assert report.profile.delta_comp == 0.0
    assert report.profile.g0_level == "weak"
    assert report.verdict.cell_g0_g2a == "cargo cult"
    assert report.verdict.archetype == "parrot"
    ace = pd.read_csv(tmp_path / "ace.csv")
    assert set(ace["success_on"]) == {1}
    robustness = pd.read_csv(tmp_path / "robustness.csv")
    assert list(robustness.columns) == ["label", "scale", "value", "raw_value"]


def test_classify_saved_report(tmp_path, capsys) -> None:
    assert main(["audit", "--config", str(CONFIGS / "audit_printed.json"), "--out", str(tmp_path)]) == EXIT_OK
    capsys.readouterr()
    assert main(["classify", "--report", str(tmp_path / "profile_report.json")]) == EXIT_OK
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["cell_g2a_g2b"] == "effortful failure"


@pytest.mark.parametrize("suite", ["modulus", "homomorphism", "counterexample"])
def test_verify_suites_pass(suite) -> None:
    assert main(["verify", suite, "--seed", "0", "--trials", "20"]) == EXIT_OK


def test_verify_gradients() -> None:
    result = AuditPipeline().verify("gradients", seed=0)
    assert result.passed, result.summary
    assert set(result.details) == {"distance", "surrogate"}


def test_train_zero_episodes_writes_initial_weights(tmp_path) -> None:
    config = _write(tmp_path / "train.json", {
        "agent": {"embed_dim": 4, "hidden_dim": 8, "seed": 2},
        "train": {"episodes": 0},
    })
    assert main(["train", "--config", str(config), "--out", str(tmp_path)]) == EXIT_OK
    restored = GridAgent.from_weight_file(read_weights(tmp_path / "weights.json"))
    initial = GridAgent.initialize(WorldSpec().vocab, AgentSpec(embed_dim=4, hidden_dim=8, seed=2))
    for name, arr in initial.params.items():
        assert np.array_equal(restored.params[name], arr)
    assert read_train_log(tmp_path / "train_log.csv").rows == []


def test_train_short_run_writes_log(tmp_path) -> None:
    config = _write(tmp_path / "train.json", {
        "agent": {"embed_dim": 4, "hidden_dim": 8},
        "train": {"episodes": 20, "log_every": 10},
    })
    code = main(["train", "--config", str(config), "--seed", "4", "--out", str(tmp_path)])
    log = read_train_log(tmp_path / "train_log.csv")
    assert [r.episode for r in log.rows] == [0, 10, 20]
    assert code == (EXIT_OK if log.final_loss < CONVERGED_LOSS else EXIT_NOT_CONVERGED)
    assert read_weights(tmp_path / "weights.json").seed == 4


def test_unconverged_training_has_its_own_exit_code(tmp_path) -> None:
    config = _write(tmp_path / "train.json", {
        "agent": {"embed_dim": 2, "hidden_dim": 3, "seed": 1},
        "train": {"episodes": 1, "log_every": 1},
    })
    assert main(["train", "--config", str(config), "--out", str(tmp_path)]) == EXIT_NOT_CONVERGED
    assert read_train_log(tmp_path / "train_log.csv").final_loss >= CONVERGED_LOSS
    assert (tmp_path / "weights.json").exists()


def test_diverged_training_exit_code(tmp_path) -> None:
    config = _write(tmp_path / "train.json", {
        "agent": {"embed_dim": 2, "hidden_dim": 3},
        "train": {"episodes": 5, "divergence_loss": 1e-6},
    })
    assert main(["train", "--config", str(config), "--out", str(tmp_path)]) == EXIT_DIVERGED
