"""End-to-end tests of the command-line interface on tiny synthetic runs."""

import csv
import json

import numpy as np
import pytest
import yaml

from sparsehead_lab.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from sparsehead_lab.datagen import load_tds

pytestmark = pytest.mark.integration

WORLD = {"latent_dim": 4, "obs_dim": 8, "n_subject": 2, "n_classes": 2}


def _experiment(tmp_path, name="tiny", head="linear", **train):
    doc = {
        "name": name,
        "output_dir": f"runs/{name}",
        "dataset": {"source": "synthetic", "world": WORLD, "n": 64},
        "train": {
            "encoder": {"hidden": [16], "output_dim": 4},
            "head": {"kind": head},
            "batch_size": 16,
            "steps": 3,
            "lr": 1e-2,
            "lambda": 0.0,
            "eval_size": 32,
            **train,
        },
    }
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


class TestUsage:
    def test_no_command(self, capsys):
        code, _ = _run(capsys)
        assert code == EXIT_USAGE

    def test_train_needs_config(self, capsys):
        code, out = _run(capsys, "train")
        assert code == EXIT_USAGE
        assert "--config" in out.err

    def test_missing_config(self, tmp_path, capsys):
        code, _ = _run(capsys, "--config", tmp_path / "none.yaml", "train")
        assert code == EXIT_USAGE
        assert not (tmp_path / "runs").exists()

    def test_unknown_key(self, tmp_path, capsys):
        path = _experiment(tmp_path, momentum=0.9)
        code, _ = _run(capsys, "--config", path, "train")
        assert code == EXIT_USAGE
        assert not (tmp_path / "runs").exists()


class TestTrain:
    def test_writes_outputs(self, tmp_path, capsys):
        code, out = _run(capsys, "--config", _experiment(tmp_path), "train")
        assert code == EXIT_OK
        summary = json.loads(out.out)
        assert summary["steps"] == 3
        assert summary["final"]["step"] == 3
        run_dir = tmp_path / "runs" / "tiny"
        for name in ("checkpoint.sphd", "metrics.jsonl", "spectrum.csv"):
            assert (run_dir / name).is_file()
        lines = (run_dir / "metrics.jsonl").read_text().splitlines()
        assert [json.loads(line)["step"] for line in lines] == [1, 2, 3]

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        path = _experiment(tmp_path)
        run_dir = tmp_path / "runs" / "tiny"
        _run(capsys, "--config", path, "train")
        first = {n: (run_dir / n).read_bytes() for n in ("checkpoint.sphd", "metrics.jsonl", "spectrum.csv")}
        _run(capsys, "--config", path, "train")
        for name, data in first.items():
            assert (run_dir / name).read_bytes() == data

    def test_seed_and_out_override(self, tmp_path, capsys):
        out_dir = tmp_path / "elsewhere"
        code, out = _run(capsys, "--config", _experiment(tmp_path), "--seed", 5, "--out", out_dir, "train")
        assert code == EXIT_OK
        assert json.loads(out.out)["seed"] == 5
        assert (out_dir / "checkpoint.sphd").is_file()

    def test_divergence_exit_code(self, tmp_path, capsys):
        path = _experiment(tmp_path, sparsity_mode="proximal", **{"lambda": 1000.0})
        code, out = _run(capsys, "--config", path, "train")
        assert code == EXIT_RUNTIME
        assert "diverged" in out.err
        metrics = tmp_path / "runs" / "tiny" / "metrics.jsonl"
        assert len(metrics.read_text().splitlines()) == 1


class TestAnalysisCommands:
    @pytest.fixture
    def identity_run(self, tmp_path, capsys):
        _run(capsys, "--config", _experiment(tmp_path, name="ident", head="identity"), "train")
        world = tmp_path / "world.yaml"
        world.write_text(yaml.safe_dump(WORLD))
        data = tmp_path / "data.tds"
        _run(capsys, "synth", data, "--world", world, "--n", 40)
        return tmp_path / "runs" / "ident" / "checkpoint.sphd", data

    def test_spectrum_identity_head(self, tmp_path, capsys, identity_run):
        checkpoint, data = identity_run
        output = tmp_path / "spectrum.csv"
        code, _ = _run(capsys, "spectrum", checkpoint, data, output)
        assert code == EXIT_OK
        with open(output, newline="") as f:
            rows = list(csv.reader(f))
        assert len(rows) == 1 + 4
        assert all(row[1] == row[3] for row in rows[1:])

    def test_eval(self, capsys, identity_run):
        checkpoint, data = identity_run
        code, out = _run(capsys, "eval", checkpoint, data, data, "--k", 3, "--probe-iters", 20)
        assert code == EXIT_OK
        result = json.loads(out.out)
        assert set(result) == {"linear_acc", "knn_acc"}
        assert 0.0 <= result["knn_acc"] <= 1.0

    def test_eval_dimension_mismatch(self, tmp_path, capsys, identity_run):
        checkpoint, _ = identity_run
        world = tmp_path / "wide.yaml"
        world.write_text(yaml.safe_dump({**WORLD, "obs_dim": 10}))
        wide = tmp_path / "wide.tds"
        _run(capsys, "synth", wide, "--world", world, "--n", 20)
        code, _ = _run(capsys, "eval", checkpoint, wide, wide)
        assert code == EXIT_USAGE

    def test_align(self, tmp_path, capsys, identity_run):
        checkpoint, _ = identity_run
        code, out = _run(capsys, "--config", tmp_path / "ident.yaml", "align", checkpoint, "--n", 50)
        assert code == EXIT_OK
        result = json.loads(out.out)
        assert result["n"] == 50
        assert 0.0 <= result["mcc"] <= 1.0
        assert len(result["pairs"]) == 4

    def test_align_mlp_world_uses_stored_latents(self, tmp_path, capsys, identity_run):
        checkpoint, _ = identity_run
        world = tmp_path / "mlp.yaml"
        world.write_text(yaml.safe_dump({**WORLD, "mixing": "mlp"}))
        code, out = _run(capsys, "align", checkpoint, "--world", world, "--n", 50)
        assert code == EXIT_OK
        result = json.loads(out.out)
        assert 0.0 <= result["mcc"] <= 1.0
        assert len(result["pairs"]) == 4

    def test_bad_checkpoint(self, tmp_path, capsys, identity_run):
        _, data = identity_run
        bogus = tmp_path / "bogus.sphd"
        bogus.write_bytes(b"not a checkpoint")
        code, _ = _run(capsys, "spectrum", bogus, data, tmp_path / "s.csv")
        assert code == EXIT_USAGE


class TestDataCommands:
    def test_synth_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.tds", tmp_path / "b.tds"
        _run(capsys, "--seed", 3, "synth", a, "--n", 30)
        _run(capsys, "--seed", 3, "synth", b, "--n", 30)
        assert a.read_bytes() == b.read_bytes()
        assert load_tds(a).n == 30

    def test_unwritable_output_is_runtime_error(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        code, out = _run(capsys, "synth", blocker / "data.tds", "--n", 10)
        assert code == EXIT_RUNTIME
        assert "I/O failure" in out.err

    def test_task_heads_wider_than_rows_is_usage_error(self, tmp_path, capsys):
        world = tmp_path / "tasks.yaml"
        world.write_text(yaml.safe_dump({**WORLD, "n_tasks": 3, "support_max": 3, "task_head_dim": 2}))
        code, out = _run(capsys, "synth", tmp_path / "t.tds", "--world", world, "--n", 10)
        assert code == EXIT_USAGE
        assert "task_head_dim" in out.err

    def test_synth_seed_changes_world(self, tmp_path, capsys):
        a, b = tmp_path / "a.tds", tmp_path / "b.tds"
        _run(capsys, "--seed", 3, "synth", a, "--n", 30)
        _run(capsys, "--seed", 4, "synth", b, "--n", 30)
        assert a.read_bytes() != b.read_bytes()

    def test_import_raw(self, tmp_path, capsys):
        raw = tmp_path / "batch.bin"
        raw.write_bytes(bytes([2]) + bytes(3072) + bytes([5]) + bytes([255]) * 3072)
        output = tmp_path / "images.tds"
        code, out = _run(capsys, "import-raw", output, raw)
        assert code == EXIT_OK
        assert json.loads(out.out) == {"output": str(output), "n": 2, "dim": 3072, "n_classes": 10}
        data = load_tds(output)
        assert data.labels.tolist() == [2, 5]
        assert np.all(data.features[1] == 1.0)

    def test_import_raw_bad_size(self, tmp_path, capsys):
        raw = tmp_path / "batch.bin"
        raw.write_bytes(bytes(10))
        code, _ = _run(capsys, "import-raw", tmp_path / "out.tds", raw)
        assert code == EXIT_USAGE

    def test_concentration(self, tmp_path, capsys):
        code, out = _run(capsys, "--seed", 0, "--out", tmp_path, "concentration", "--dims", "2,8", "--n", 10, "--trials", 2)
        assert code == EXIT_OK
        lines = out.out.splitlines()
        assert lines[0] == "d,mean_M"
        assert [line.split(",")[0] for line in lines[1:]] == ["2", "8"]
        assert (tmp_path / "concentration.csv").read_text() == out.out

    def test_concentration_bad_dims(self, capsys):
        code, _ = _run(capsys, "concentration", "--dims", "8,2")
        assert code == EXIT_USAGE
