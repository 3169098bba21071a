import json

import numpy as np
import pytest
import torch

from emlang_trainer.data import (
    GameConfig,
    batches,
    read_records,
    to_tensors,
    write_predictions,
    write_records,
)


class TestWireFormat:
    def test_read_generated_splits(self, small_data):
        config = GameConfig.load(small_data / "config.json")
        assert config.num_points == 20
        records = read_records(small_data / "train.jsonl")
        assert len(records) == 600
        first = records[0]
        assert len(first["seq"]) == 20
        assert len(first["obs"]) == 5
        assert first["obs"].count(-1) == 1
        assert first["candidates"][first["target_position"] - 1] == first["target_value"]

    def test_roundtrip_preserves_bytes(self, small_data, tmp_path):
        records = read_records(small_data / "train.jsonl")
        out = tmp_path / "copy.jsonl"
        write_records(records, out)
        assert out.read_bytes() == (small_data / "train.jsonl").read_bytes()

    def test_missing_field_rejected(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"seq": [1, 2, 3]}\n')
        with pytest.raises(ValueError):
            read_records(bad)

    def test_empty_rejected(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        with pytest.raises(ValueError):
            read_records(empty)


class TestTensors:
    def test_normalization_and_targets(self, small_data):
        config = GameConfig.load(small_data / "config.json")
        records = read_records(small_data / "train.jsonl")
        data = to_tensors(records, config.num_points)
        assert data.obs.shape == (600, 5)
        assert data.seq.shape == (600, 20)
        assert data.candidates.shape == (600, 5)
        assert float(data.seq.max()) <= 1.0
        # file positions are 1-based, tensor targets 0-based
        assert int(data.target_pos.min()) >= 0
        assert int(data.target_pos.max()) <= 4
        row = records[0]
        assert float(data.candidates[0, data.target_pos[0]]) == pytest.approx(
            row["target_value"] / 20
        )

    def test_batches_cover_everything_deterministically(self, small_data):
        config = GameConfig.load(small_data / "config.json")
        data = to_tensors(read_records(small_data / "train.jsonl"), config.num_points)
        seen = []
        for obs, seq, cands, target in batches(data, 64, np.random.default_rng(3)):
            assert obs.shape[0] == seq.shape[0] == cands.shape[0] == target.shape[0]
            seen.append(obs)
        total = int(sum(o.shape[0] for o in seen))
        assert total == len(data)
        again = [
            obs for obs, *_ in batches(data, 64, np.random.default_rng(3))
        ]
        assert all(torch.equal(a, b) for a, b in zip(seen, again))


class TestPredictionsFile:
    def test_one_based_with_zero_abstain(self, tmp_path):
        path = tmp_path / "preds.jsonl"
        write_predictions([0, 3, None, 4], path)
        lines = [json.loads(l) for l in path.read_text().splitlines()]
        assert lines == [
            {"index": 0, "prediction": 1},
            {"index": 1, "prediction": 4},
            {"index": 2, "prediction": 0},
            {"index": 3, "prediction": 5},
        ]
