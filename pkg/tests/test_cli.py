"""End-to-end subcommand runs on a miniature pipeline."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from dockpilot.cli import main
from dockpilot.dataset import read_manifest
from dockpilot.util import read_csv

# miniature run: 2 scenes x 6 samples, small lens, tiny net, 2 epochs
MINI_CONFIG = """\
[run]
seed = 3

[camera]
width = 212
height = 200

[scene]
block_height = 0.5

[collect]
scenes = 2
samples_per_scene = 6
min_block_pixels = 60

[augment]
copies = 1

[network]
input_side = 16
conv_channels = [2, 4]
fc_sizes = [16]
dropout_rate = 0.5

[train]
epochs = 2
batch_size = 4

[evaluation]
data_efficiency_sizes = [6, 12]
data_efficiency_epochs = 1

[dock]
trials = 1
timeout_s = 30.0
"""


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One full collect->augment->train chain shared by the command tests."""
    root = tmp_path_factory.mktemp("pipeline")
    cfg = root / "run.toml"
    cfg.write_text(MINI_CONFIG)
    out = root / "out"
    assert main(["collect", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["augment", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
    return cfg, out


class TestCollect:
    def test_manifest_and_stats_written(self, pipeline):
        _, out = pipeline
        samples = read_manifest(out / "manifest.jsonl")
        assert len(samples) == 12
        header, rows = read_csv(out / "stats.csv")
        assert header[0] == "metric"
        assert {r[0] for r in rows} == {"dist_m", "speed_mps"}
        summary = json.loads((out / "collect-summary.json").read_text())
        assert summary["samples"] == 12
        assert len(summary["config_hash"]) == 64

    def test_effective_config_dropped_alongside(self, pipeline):
        _, out = pipeline
        assert (out / "effective-config-collect.toml").exists()

    def test_zero_scenes_warns_but_exits_zero(self, tmp_path, capsys):
        cfg = tmp_path / "zero.toml"
        cfg.write_text("[collect]\nscenes = 0\n")
        code = main(["collect", "--config", str(cfg), "--out", str(tmp_path / "o")])
        captured = capsys.readouterr()
        assert code == 0
        assert "warning" in captured.err
        assert read_manifest(tmp_path / "o" / "manifest.jsonl") == []

    def test_rerun_is_byte_identical(self, pipeline, tmp_path):
        cfg, out = pipeline
        out2 = tmp_path / "again"
        assert main(["collect", "--config", str(cfg), "--out", str(out2)]) == 0
        first = (out / "manifest.jsonl").read_bytes()
        assert (out2 / "manifest.jsonl").read_bytes() == first
        img = sorted(p.name for p in (out / "images").iterdir())
        assert sorted(p.name for p in (out2 / "images").iterdir()) == img
        for name in img[:3]:
            assert (out2 / "images" / name).read_bytes() == \
                (out / "images" / name).read_bytes()


class TestAugment:
    def test_doubles_the_manifest(self, pipeline):
        _, out = pipeline
        combined = read_manifest(out / "manifest-aug.jsonl")
        assert len(combined) == 24
        assert sum(s.augmented for s in combined) == 12

    def test_labels_match_sources(self, pipeline):
        _, out = pipeline
        combined = read_manifest(out / "manifest-aug.jsonl")
        by_id = {s.id: s for s in combined}
        for s in combined:
            if s.augmented:
                src = by_id[s.id.rsplit("-a", 1)[0]]
                assert s.label == src.label


class TestTrain:
    def test_artifacts(self, pipeline):
        _, out = pipeline
        assert (out / "weights.dpw").exists()
        header, rows = read_csv(out / "history.csv")
        assert header == ["epoch", "train_loss", "val_loss"]
        assert len(rows) == 2
        assert (out / "loss-curve.svg").exists()
        summary = json.loads((out / "train-summary.json").read_text())
        assert summary["epochs"] == 2
        best = min(float(r[2]) for r in rows)
        assert summary["best_val_loss"] == pytest.approx(best)


class TestEval:
    def test_eval_outputs(self, pipeline):
        cfg, out = pipeline
        assert main(["eval", "--config", str(cfg), "--out", str(out)]) == 0
        summary = json.loads((out / "eval-summary.json").read_text())
        assert "distance_slope" in summary
        header, rows = read_csv(out / "eval-samples.csv")
        assert header[0] == "id"
        assert len(rows) == summary["samples"]
        assert (out / "eval-vs-distance.svg").exists()
        assert (out / "eval-vs-speed.svg").exists()


class TestDataEff:
    def test_one_row_per_size(self, pipeline):
        cfg, out = pipeline
        assert main(["data-eff", "--config", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out / "data-efficiency.csv")
        assert header == ["size", "train_loss", "val_loss"]
        assert [int(r[0]) for r in rows] == [6, 12]


class TestDock:
    def test_oracle_trials_and_logs(self, pipeline):
        cfg, out = pipeline
        assert main(["dock", "--config", str(cfg), "--out", str(out), "--trials", "2"]) == 0
        summary = json.loads((out / "dock-summary.json").read_text())
        assert summary["predictor"] == "oracle"
        assert summary["trials"] == 2
        header, rows = read_csv(out / "dock-trials.csv")
        assert len(rows) == 4  # 2 trials x 2 servo modes
        logs = sorted((out / "trials").iterdir())
        assert len(logs) == 4

    def test_zero_trials_empty_report(self, tmp_path):
        cfg = tmp_path / "r.toml"
        cfg.write_text(MINI_CONFIG)
        out = tmp_path / "o"
        assert main(["dock", "--config", str(cfg), "--out", str(out), "--trials", "0"]) == 0
        summary = json.loads((out / "dock-summary.json").read_text())
        assert summary["trials"] == 0
        _, rows = read_csv(out / "dock-trials.csv")
        assert rows == []


class TestReport:
    def test_aggregates_present_stages(self, pipeline):
        cfg, out = pipeline
        assert main(["report", "--config", str(cfg), "--out", str(out)]) == 0
        text = (out / "report.txt").read_text()
        assert "[collect]" in text
        assert "[train]" in text

    def test_empty_out_reports_no_runs(self, tmp_path):
        out = tmp_path / "empty"
        assert main(["report", "--out", str(out)]) == 0
        assert "no runs found" in (out / "report.txt").read_text()


class TestErrors:
    def test_bad_config_is_a_hard_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[nonsense]\nkey = 1\n")
        code = main(["collect", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "r.toml"
        cfg.write_text(MINI_CONFIG)
        out = tmp_path / "o"
        assert main(["collect", "--config", str(cfg), "--out", str(out),
                     "--seed", "9"]) == 0
        text = (out / "effective-config-collect.toml").read_text()
        assert "seed = 9" in text


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "o"
        proc = subprocess.run(
            [sys.executable, "-m", "dockpilot", "report", "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "no runs found" in proc.stdout
