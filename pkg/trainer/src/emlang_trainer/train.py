"""Training loop: cross entropy on the target index through the discrete
channel, Adam, early stop at a target validation accuracy."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from .data import Batchable, GameConfig, batches, read_records, to_tensors
from .models import Receiver, Sender


@dataclass
class TrainConfig:
    data_dir: str
    out_dir: str
    hidden_size: int = 64
    learning_rate: float = 1e-3
    temperature: float = 1.0
    epochs: int = 1000
    batch_size: int = 256
    seed: int = 0
    target_accuracy: float | None = None
    warmup_epochs: int = 15
    max_records: int | None = None
    val_records: int | None = None
    device: str = "cpu"


@dataclass
class TrainResult:
    checkpoint_path: str
    best_val_accuracy: float
    epochs_run: int
    history: list[dict] = field(default_factory=list)


class DivergenceError(RuntimeError):
    """Raised when validation accuracy is stuck at chance after warmup."""


def _load_split(data_dir: Path, name: str, limit: int | None, n: int) -> Batchable:
    records = read_records(data_dir / f"{name}.jsonl")
    if limit is not None:
        records = records[:limit]
    return to_tensors(records, n)


@torch.no_grad()
def accuracy(sender: Sender, receiver: Receiver, data: Batchable,
             batch_size: int = 1024, sampled: bool = False) -> float:
    """Task accuracy with argmax-decoded messages (the export channel) or,
    with ``sampled=True``, through the stochastic training channel."""
    sender.eval()
    receiver.eval()
    hits = 0
    for start in range(0, len(data), batch_size):
        sl = slice(start, start + batch_size)
        if sampled:
            msg, _ = sender(data.obs[sl], hard=True)
            pred = receiver(msg, data.seq[sl], data.candidates[sl]).argmax(dim=-1)
        else:
            msg = sender.decode(data.obs[sl])
            pred = receiver.decode(msg, data.seq[sl], data.candidates[sl])
        hits += int((pred == data.target_pos[sl]).sum())
    sender.train()
    receiver.train()
    return hits / len(data)


def train(config: TrainConfig) -> TrainResult:
    torch.manual_seed(config.seed)
    data_dir = Path(config.data_dir)
    game = GameConfig.load(data_dir / "config.json")
    train_data = _load_split(data_dir, "train", config.max_records, game.num_points)
    val_data = _load_split(data_dir, "validation", config.val_records, game.num_points)

    device = torch.device(config.device)
    sender = Sender(game.vocab_size, config.hidden_size, game.num_points).to(device)
    receiver = Receiver(game.vocab_size, config.hidden_size, game.num_points).to(device)
    params = list(sender.parameters()) + list(receiver.parameters())
    optimizer = torch.optim.Adam(params, lr=config.learning_rate)
    shuffler = np.random.default_rng(config.seed)
    chance = 1.0 / (game.num_distractors + 1)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = out_dir / "checkpoint.pt"
    history: list[dict] = []
    best_val = 0.0
    epochs_run = 0

    for epoch in range(1, config.epochs + 1):
        epochs_run = epoch
        started = time.monotonic()
        total_loss = 0.0
        total_hits = 0
        for obs, seq, cands, target in batches(train_data, config.batch_size, shuffler):
            message, _ = sender(obs, temperature=config.temperature, hard=True)
            logits = receiver(message, seq, cands)
            loss = F.cross_entropy(logits, target)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach()) * len(obs)
            total_hits += int((logits.argmax(dim=-1) == target).sum())
        val_acc = accuracy(sender, receiver, val_data)
        val_sampled = accuracy(sender, receiver, val_data, sampled=True)
        entry = {
            "epoch": epoch,
            "train_loss": total_loss / len(train_data),
            "train_accuracy": total_hits / len(train_data),
            "val_accuracy": val_acc,
            "val_sampled_accuracy": val_sampled,
            "seconds": round(time.monotonic() - started, 2),
        }
        history.append(entry)
        if val_acc > best_val:
            best_val = val_acc
            save_checkpoint(checkpoint_path, sender, receiver, game, config)
        # The argmax channel lags the stochastic one early on, so the
        # divergence check watches communication success where the
        # gradients actually flow.
        if epoch >= config.warmup_epochs and val_sampled < chance + 0.05:
            raise DivergenceError(
                f"sampled-channel accuracy {val_sampled:.3f} is within 5 "
                f"points of chance {chance:.3f} after {epoch} epochs; "
                f"last train loss {entry['train_loss']:.4f}"
            )
        if config.target_accuracy is not None and val_acc >= config.target_accuracy:
            break
    (out_dir / "history.json").write_text(json.dumps(history, indent=2) + "\n")
    return TrainResult(
        checkpoint_path=str(checkpoint_path),
        best_val_accuracy=best_val,
        epochs_run=epochs_run,
        history=history,
    )


def desk_configs(data_dir, out_root, seeds=(0, 1)) -> list[TrainConfig]:
    """Scaled-down protocol: N=20 data, 2 seeds by default."""
    return [
        TrainConfig(
            data_dir=str(data_dir),
            out_dir=str(Path(out_root) / f"seed{seed}"),
            hidden_size=128,
            epochs=200,
            batch_size=64,
            seed=seed,
            target_accuracy=0.92,
            warmup_epochs=60,
        )
        for seed in seeds
    ]


def full_configs(data_dir, out_root, seeds=tuple(range(16))) -> list[TrainConfig]:
    """Full protocol: 16 seeds, 1000 epochs over the 200k-record splits."""
    return [
        TrainConfig(
            data_dir=str(data_dir),
            out_dir=str(Path(out_root) / f"seed{seed}"),
            hidden_size=64,
            epochs=1000,
            batch_size=256,
            seed=seed,
            warmup_epochs=100,
        )
        for seed in seeds
    ]


def save_checkpoint(path, sender: Sender, receiver: Receiver,
                    game: GameConfig, config: TrainConfig) -> None:
    torch.save(
        {
            "sender": sender.state_dict(),
            "receiver": receiver.state_dict(),
            "game": asdict(game),
            "train_config": asdict(config),
        },
        path,
    )


def load_checkpoint(path) -> tuple[Sender, Receiver, GameConfig]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    game = GameConfig(**blob["game"])
    hidden = blob["train_config"]["hidden_size"]
    sender = Sender(game.vocab_size, hidden, game.num_points)
    receiver = Receiver(game.vocab_size, hidden, game.num_points)
    sender.load_state_dict(blob["sender"])
    receiver.load_state_dict(blob["receiver"])
    sender.eval()
    receiver.eval()
    return sender, receiver, game
