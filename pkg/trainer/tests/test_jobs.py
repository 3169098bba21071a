import json
import subprocess

import pytest

from emlang_trainer.data import read_records
from emlang_trainer.jobs import evaluate_corpus, export_corpus, serve_receiver, sweep_lengths
from emlang_trainer.train import TrainConfig, train

from conftest import EMLANG


@pytest.fixture(scope="module")
def mini_checkpoint(small_data, tmp_path_factory):
    """A briefly trained pair; exercises the job plumbing, not accuracy."""
    out = tmp_path_factory.mktemp("mini_run")
    result = train(
        TrainConfig(
            data_dir=str(small_data),
            out_dir=str(out),
            hidden_size=32,
            epochs=2,
            batch_size=64,
            seed=0,
            warmup_epochs=10**9,
        )
    )
    return result.checkpoint_path


class TestExport:
    def test_export_fills_messages_and_keeps_schema(
        self, mini_checkpoint, small_data, tmp_path
    ):
        out = tmp_path / "exported.jsonl"
        n = export_corpus(mini_checkpoint, small_data / "test.jsonl", out)
        assert n == 200
        records = read_records(out)
        assert all(len(r["message"]) == 3 for r in records)
        assert all(0 <= s < 26 for r in records for s in r["message"])
        # everything except the message is untouched
        original = read_records(small_data / "test.jsonl")
        for before, after in zip(original, records):
            for field in ("seq", "obs", "obs_kind", "target_value",
                          "target_index", "candidates", "target_position"):
                assert before[field] == after[field]

    def test_exported_corpus_is_accepted_by_the_toolkit(
        self, mini_checkpoint, small_data, tmp_path
    ):
        out = tmp_path / "exported.jsonl"
        export_corpus(mini_checkpoint, small_data / "test.jsonl", out)
        proc = subprocess.run(
            [EMLANG, "analyze", "--corpus", str(out),
             "--config", str(small_data / "config.json"),
             "--out", str(tmp_path / "analysis.json")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr


class TestServe:
    def test_predictions_count_and_format(
        self, mini_checkpoint, marked_data, tmp_path
    ):
        preds_path = tmp_path / "preds.jsonl"
        n = serve_receiver(mini_checkpoint, marked_data / "test.jsonl", preds_path)
        assert n == 200
        lines = [json.loads(l) for l in preds_path.read_text().splitlines()]
        assert len(lines) == 200
        assert [l["index"] for l in lines] == list(range(200))
        assert all(0 <= l["prediction"] <= 5 for l in lines)

    def test_malformed_message_abstains(self, mini_checkpoint, marked_data, tmp_path):
        records = read_records(marked_data / "test.jsonl")
        records[0]["message"] = [99, 0, 1]   # symbol outside the alphabet
        records[1]["message"] = []           # missing entirely
        bad = tmp_path / "bad.jsonl"
        from emlang_trainer.data import write_records

        write_records(records, bad)
        preds_path = tmp_path / "preds.jsonl"
        serve_receiver(mini_checkpoint, bad, preds_path)
        lines = [json.loads(l) for l in preds_path.read_text().splitlines()]
        assert lines[0]["prediction"] == 0
        assert lines[1]["prediction"] == 0
        assert any(l["prediction"] != 0 for l in lines[2:])


class TestSweep:
    def test_zero_delta_has_zero_change(self, mini_checkpoint):
        def generator(num_points, n, seed, out_dir):
            subprocess.run(
                [EMLANG, "gen-data", "--seed", str(seed),
                 "--num-points", str(num_points), "--sizes", f"{n},1,1",
                 "--out", str(out_dir)],
                check=True,
                capture_output=True,
            )
            return out_dir / "train.jsonl"

        rows = sweep_lengths(
            mini_checkpoint, deltas=(0, 5), n=150, seed=3, generator=generator
        )
        assert rows[0]["delta"] == 0
        assert rows[0]["change"] == 0.0
        assert rows[1]["num_points"] == 15

    def test_impossible_delta_marked_na(self, mini_checkpoint):
        rows = sweep_lengths(mini_checkpoint, deltas=(18,), n=10, seed=3)
        assert rows[0]["accuracy"] is None
        assert rows[0]["note"] == "N/A"


class TestDivergenceGuard:
    def test_guard_triggers_on_hopeless_config(self, small_data, tmp_path):
        from emlang_trainer.train import DivergenceError

        # zero learning rate cannot leave chance
        with pytest.raises(DivergenceError):
            train(
                TrainConfig(
                    data_dir=str(small_data),
                    out_dir=str(tmp_path / "run"),
                    hidden_size=16,
                    learning_rate=0.0,
                    epochs=4,
                    batch_size=128,
                    seed=0,
                    warmup_epochs=2,
                )
            )
