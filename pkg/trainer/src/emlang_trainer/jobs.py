"""Batch jobs around a trained checkpoint: corpus export, receiver
serving, and sequence-length generalization sweeps."""
from __future__ import annotations

import json
import subprocess
import tempfile
from pathlib import Path

import torch

from .data import GameConfig, read_records, to_tensors, write_predictions, write_records
from .train import load_checkpoint


@torch.no_grad()
def export_corpus(checkpoint_path, corpus_path, out_path,
                  batch_size: int = 1024) -> int:
    """Fill the ``message`` field with argmax-decoded sender output.

    The exported file keeps the exact wire schema, so the analysis
    toolkit can consume it directly.
    """
    sender, _, game = load_checkpoint(checkpoint_path)
    records = read_records(corpus_path)
    data = to_tensors(records, game.num_points)
    for start in range(0, len(records), batch_size):
        msgs = sender.decode(data.obs[start : start + batch_size])
        for record, msg in zip(records[start : start + batch_size], msgs):
            record["message"] = [int(s) for s in msg]
    write_records(records, out_path)
    return len(records)


@torch.no_grad()
def serve_receiver(checkpoint_path, eval_path, predictions_path,
                   batch_size: int = 1024) -> int:
    """Answer an evaluation corpus with one prediction per record.

    Records whose message is malformed (wrong length or out-of-alphabet
    symbols) are answered with an abstention.
    """
    _, receiver, game = load_checkpoint(checkpoint_path)
    records = read_records(eval_path)
    predictions: list[int | None] = [None] * len(records)
    valid_idx = [
        i
        for i, r in enumerate(records)
        if len(r["message"]) == 3
        and all(0 <= s < game.vocab_size for s in r["message"])
    ]
    data = to_tensors([records[i] for i in valid_idx], game.num_points)
    messages = torch.tensor(
        [records[i]["message"] for i in valid_idx], dtype=torch.long
    )
    for start in range(0, len(valid_idx), batch_size):
        sl = slice(start, start + batch_size)
        pred = receiver.decode(messages[sl], data.seq[sl], data.candidates[sl])
        for offset, p in enumerate(pred):
            predictions[valid_idx[start + offset]] = int(p)
    write_predictions(predictions, predictions_path)
    return len(records)


@torch.no_grad()
def evaluate_corpus(checkpoint_path, corpus_path, batch_size: int = 1024) -> float:
    """End-to-end accuracy of the trained pair on a corpus."""
    sender, receiver, game = load_checkpoint(checkpoint_path)
    records = read_records(corpus_path)
    data = to_tensors(records, game.num_points)
    hits = 0
    for start in range(0, len(records), batch_size):
        sl = slice(start, start + batch_size)
        msg = sender.decode(data.obs[sl])
        pred = receiver.decode(msg, data.seq[sl], data.candidates[sl])
        hits += int((pred == data.target_pos[sl]).sum())
    return hits / len(records)


def _default_generator(num_points: int, n: int, seed: int, out_dir: Path) -> Path:
    """Generate an evaluation split through the toolkit CLI."""
    subprocess.run(
        [
            "emlang", "gen-data",
            "--seed", str(seed),
            "--num-points", str(num_points),
            "--sizes", f"{n},1,1",
            "--out", str(out_dir),
        ],
        check=True,
        capture_output=True,
    )
    return out_dir / "train.jsonl"


def sweep_lengths(checkpoint_path, deltas=(0, 5, 10, 20, 40), n: int = 2000,
                  seed: int = 99, generator=_default_generator) -> list[dict]:
    """Accuracy on sequences shortened by each delta, with the change
    relative to the unshortened baseline."""
    _, _, game = load_checkpoint(checkpoint_path)
    rows = []
    baseline = None
    with tempfile.TemporaryDirectory() as tmp:
        for delta in deltas:
            num_points = game.num_points - delta
            if num_points < 5 or num_points <= game.num_distractors:
                rows.append(
                    {"delta": delta, "num_points": num_points, "accuracy": None,
                     "change": None, "note": "N/A"}
                )
                continue
            out_dir = Path(tmp) / f"delta{delta}"
            out_dir.mkdir()
            corpus = generator(num_points, n, seed + delta, out_dir)
            acc = evaluate_corpus(checkpoint_path, corpus)
            if baseline is None:
                baseline = acc
            rows.append(
                {
                    "delta": delta,
                    "num_points": num_points,
                    "accuracy": acc,
                    "change": acc - baseline,
                }
            )
    return rows


def save_sweep(rows: list[dict], path) -> None:
    Path(path).write_text(json.dumps(rows, indent=2) + "\n")
