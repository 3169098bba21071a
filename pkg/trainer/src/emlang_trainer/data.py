"""Corpus JSONL wire format shared with the analysis toolkit.

One record per line:

    {"seq":[...],"obs":[int x5],"obs_kind":str,"target_value":int,
     "target_index":int,"candidates":[...],"target_position":int,
     "message":[int x3]}

``target_position`` is 1-based on the wire.  Predictions files are JSONL
``{"index": int, "prediction": int}`` with 1-based positions, 0 meaning
abstain.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

FIELDS = (
    "seq",
    "obs",
    "obs_kind",
    "target_value",
    "target_index",
    "candidates",
    "target_position",
    "message",
)


@dataclass(frozen=True)
class GameConfig:
    num_points: int
    num_distractors: int
    vocab_size: int
    message_length: int = 3
    window: int = 5
    seed: int | None = None

    @classmethod
    def load(cls, path) -> "GameConfig":
        data = json.loads(Path(path).read_text())
        return cls(**{k: data[k] for k in (
            "num_points", "num_distractors", "vocab_size",
            "message_length", "window", "seed",
        )})


def read_records(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            data = json.loads(raw)
            missing = [f for f in FIELDS if f not in data]
            if missing:
                raise ValueError(f"line {lineno}: missing fields {missing}")
            if len(data["obs"]) != 5:
                raise ValueError(f"line {lineno}: obs must have 5 entries")
            if len(data["message"]) not in (0, 3):
                raise ValueError(f"line {lineno}: message must have 0 or 3 symbols")
            records.append(data)
    if not records:
        raise ValueError(f"{path} holds no records")
    return records


def write_records(records: list[dict], path) -> None:
    """Re-emit records with the canonical field order, one per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            ordered = {field: record[field] for field in FIELDS}
            fh.write(json.dumps(ordered, separators=(",", ":")))
            fh.write("\n")


def write_predictions(predictions: list[int | None], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for index, pred in enumerate(predictions):
            value = 0 if pred is None else pred + 1
            fh.write(json.dumps({"index": index, "prediction": value}))
            fh.write("\n")


@dataclass
class Batchable:
    """Tensor views of a corpus; scalars are normalized by num_points."""

    obs: torch.Tensor          # (L, 5) float
    seq: torch.Tensor          # (L, N) float
    candidates: torch.Tensor   # (L, k+1) float
    target_pos: torch.Tensor   # (L,) long, 0-based
    num_points: int

    def __len__(self) -> int:
        return len(self.obs)


def to_tensors(records: list[dict], num_points: int) -> Batchable:
    scale = float(num_points)
    obs = torch.tensor([r["obs"] for r in records], dtype=torch.float32) / scale
    seq = torch.tensor([r["seq"] for r in records], dtype=torch.float32) / scale
    cands = (
        torch.tensor([r["candidates"] for r in records], dtype=torch.float32) / scale
    )
    target = torch.tensor(
        [r["target_position"] - 1 for r in records], dtype=torch.long
    )
    return Batchable(obs, seq, cands, target, num_points)


def batches(data: Batchable, batch_size: int, generator: np.random.Generator):
    """Shuffled minibatch index streams, deterministic per generator state."""
    order = generator.permutation(len(data))
    for start in range(0, len(order), batch_size):
        idx = torch.from_numpy(order[start : start + batch_size].copy())
        yield (
            data.obs[idx],
            data.seq[idx],
            data.candidates[idx],
            data.target_pos[idx],
        )
