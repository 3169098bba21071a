"""Episode records, dataset splits, JSONL serialization, overlap audit.

The JSONL record schema is the single exchange surface between this
package and external tooling (including the neural trainer):

    {"seq":[int...],"obs":[int x5],"obs_kind":"begin|begin_plus_1|middle|
     end_minus_1|end","target_value":int,"target_index":int,
     "candidates":[int...],"target_position":int,"message":[int x3]}

``target_position`` is serialized 1-based; in memory it is 0-based.
``message`` may be empty before a sender has filled it.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .env import (
    MASK,
    Observation,
    ObservationKind,
    Sequence,
    build_candidates,
    extract_window,
    generate_sequence,
)
from .errors import ConfigError, ParseError, ValidationError
from .validation import as_rng, check_message, positive_int

JSONL_FIELDS = (
    "seq",
    "obs",
    "obs_kind",
    "target_value",
    "target_index",
    "candidates",
    "target_position",
    "message",
)

CONFIG_FIELDS = (
    "num_points",
    "num_distractors",
    "vocab_size",
    "message_length",
    "window",
    "seed",
)


@dataclass(frozen=True, slots=True)
class EnvConfig:
    """Environment configuration shared by every record of a corpus."""

    num_points: int = 60
    num_distractors: int = 4
    vocab_size: int = 26
    message_length: int = 3
    window: int = 5
    seed: int | None = None

    def validate(self) -> "EnvConfig":
        positive_int(self.num_points, "num_points")
        positive_int(self.num_distractors, "num_distractors")
        positive_int(self.vocab_size, "vocab_size")
        if self.window != 5:
            raise ConfigError(f"window length is fixed at 5, got {self.window}")
        if self.message_length != 3:
            raise ConfigError(
                f"message length is fixed at 3, got {self.message_length}"
            )
        if self.num_points < self.window:
            raise ConfigError(
                f"num_points={self.num_points} smaller than window={self.window}"
            )
        if self.num_distractors + 1 > self.num_points:
            raise ConfigError(
                f"{self.num_distractors} distractors do not fit num_points="
                f"{self.num_points}"
            )
        return self

    def compatible_with(self, other: "EnvConfig") -> bool:
        """True when two configs describe the same record space (seed aside)."""
        return (
            self.num_points == other.num_points
            and self.num_distractors == other.num_distractors
            and self.vocab_size == other.vocab_size
            and self.message_length == other.message_length
            and self.window == other.window
        )

    def to_json_dict(self) -> dict:
        return {name: getattr(self, name) for name in CONFIG_FIELDS}

    @classmethod
    def from_json_dict(cls, data: dict) -> "EnvConfig":
        unknown = set(data) - set(CONFIG_FIELDS)
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data).validate()


@dataclass(frozen=True, slots=True)
class EpisodeRecord:
    """One game round: sequence, masked window, candidates, and message."""

    seq: tuple[int, ...]
    obs: tuple[int, ...]
    obs_kind: ObservationKind
    target_value: int
    target_index: int
    candidates: tuple[int, ...]
    target_position: int
    message: tuple[int, ...] = ()

    def with_message(self, message: Iterable[int]) -> "EpisodeRecord":
        return replace(self, message=tuple(int(s) for s in message))


@dataclass(slots=True)
class Corpus:
    """An ordered list of episode records sharing one configuration."""

    records: list[EpisodeRecord]
    config: EnvConfig
    split_name: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def validate_record(record: EpisodeRecord, config: EnvConfig) -> None:
    """Check every record invariant against the environment config."""
    n = config.num_points
    if len(record.seq) != n:
        raise ValidationError(f"seq length {len(record.seq)} != num_points {n}")
    obs = extract_window(record.seq, record.target_index)
    if obs.window != record.obs:
        raise ValidationError(
            f"obs {record.obs} does not match window {obs.window} "
            f"for target_index {record.target_index}"
        )
    if obs.kind != record.obs_kind:
        raise ValidationError(
            f"obs_kind {record.obs_kind} does not match derived {obs.kind}"
        )
    if record.seq[record.target_index] != record.target_value:
        raise ValidationError(
            f"target_value {record.target_value} != seq[{record.target_index}]"
        )
    if len(record.candidates) != config.num_distractors + 1:
        raise ValidationError(
            f"expected {config.num_distractors + 1} candidates, "
            f"got {len(record.candidates)}"
        )
    if len(set(record.candidates)) != len(record.candidates):
        raise ValidationError("candidates contain repeats")
    if not 0 <= record.target_position < len(record.candidates):
        raise ValidationError(f"target_position {record.target_position} out of range")
    if record.candidates[record.target_position] != record.target_value:
        raise ValidationError("candidates do not contain the target at target_position")
    for value in record.candidates:
        if not 0 <= value < n:
            raise ValidationError(f"candidate {value} outside 0..{n - 1}")
    check_message(record.message, config.vocab_size, config.message_length)


def record_observation(record: EpisodeRecord) -> Observation:
    """Rebuild the sender-side Observation carried by a record."""
    mask_idx = record.obs.index(MASK)
    return Observation(
        window=record.obs,
        mask_slot=mask_idx + 1,
        target_index=record.target_index,
        kind=record.obs_kind,
    )


def make_episode(seed, config: EnvConfig) -> EpisodeRecord:
    """Draw one episode: sequence, uniform target, candidates, empty message."""
    config.validate()
    rng = as_rng(seed)
    seq = generate_sequence(rng, config.num_points)
    target_index = int(rng.integers(0, config.num_points))
    obs = extract_window(seq, target_index)
    target_value = seq[target_index]
    cands = build_candidates(rng, config.num_points, target_value, config.num_distractors)
    return EpisodeRecord(
        seq=seq.values,
        obs=obs.window,
        obs_kind=obs.kind,
        target_value=target_value,
        target_index=target_index,
        candidates=cands.entries,
        target_position=cands.target_position,
    )


def episode_seeds(seed, n: int) -> list[np.random.SeedSequence]:
    """Independent per-record seeds; stable regardless of how work is sharded."""
    return np.random.SeedSequence(seed).spawn(n)


def generate_split(seed, n: int, config: EnvConfig, split_name: str = "") -> Corpus:
    """Generate ``n`` independent episodes from a master seed."""
    positive_int(n, "n")
    records = [make_episode(child, config) for child in episode_seeds(seed, n)]
    return Corpus(records=records, config=config, split_name=split_name)


def record_to_json_dict(record: EpisodeRecord) -> dict:
    return {
        "seq": list(record.seq),
        "obs": list(record.obs),
        "obs_kind": record.obs_kind.value,
        "target_value": record.target_value,
        "target_index": record.target_index,
        "candidates": list(record.candidates),
        "target_position": record.target_position + 1,
        "message": list(record.message),
    }


def record_from_json_dict(data: dict, line: int | None = None) -> EpisodeRecord:
    missing = [name for name in JSONL_FIELDS if name not in data]
    if missing:
        raise ParseError(f"record missing fields {missing}", line)
    try:
        kind = ObservationKind(data["obs_kind"])
    except ValueError:
        raise ParseError(f"unknown obs_kind {data['obs_kind']!r}", line) from None
    return EpisodeRecord(
        seq=tuple(data["seq"]),
        obs=tuple(data["obs"]),
        obs_kind=kind,
        target_value=data["target_value"],
        target_index=data["target_index"],
        candidates=tuple(data["candidates"]),
        target_position=data["target_position"] - 1,
        message=tuple(data["message"]),
    )


def dumps_record(record: EpisodeRecord) -> str:
    """Canonical one-line JSON for a record (fixed key order, no spaces)."""
    return json.dumps(record_to_json_dict(record), separators=(",", ":"))


def write_jsonl(corpus: Corpus, sink) -> None:
    """Write one canonical JSON line per record."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            write_jsonl(corpus, fh)
        return
    for record in corpus.records:
        sink.write(dumps_record(record))
        sink.write("\n")


def _infer_config(records: list[EpisodeRecord]) -> EnvConfig:
    first = records[0]
    max_symbol = max((s for r in records for s in r.message), default=1)
    return EnvConfig(
        num_points=len(first.seq),
        num_distractors=len(first.candidates) - 1,
        vocab_size=max(max_symbol + 1, 2),
    )


def read_jsonl(source, config: EnvConfig | None = None, split_name: str = "") -> Corpus:
    """Read and validate a JSONL corpus.

    When ``config`` is omitted it is inferred from the records (vocab_size
    becomes the smallest alphabet containing every observed symbol).
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_jsonl(fh, config, split_name)
    if isinstance(source, str):
        source = io.StringIO(source)
    records = []
    for lineno, raw in enumerate(source, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
        records.append(record_from_json_dict(data, lineno))
    if not records:
        raise ValidationError("corpus is empty")
    if config is None:
        config = _infer_config(records)
    config.validate()
    for lineno, record in enumerate(records, start=1):
        try:
            validate_record(record, config)
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from None
    return Corpus(records=records, config=config, split_name=split_name)


def audit_overlap(a: Corpus, b: Corpus, key: str = "episode") -> float:
    """Fraction of records in ``a`` whose identity also occurs in ``b``.

    ``key="episode"`` identifies a record by (sequence, target_index);
    ``key="sequence"`` audits sequence reuse alone.
    """
    if not a.config.compatible_with(b.config):
        raise ConfigError("corpora have incompatible configurations")
    if key == "episode":
        keyfn = lambda r: (r.seq, r.target_index)  # noqa: E731
    elif key == "sequence":
        keyfn = lambda r: r.seq  # noqa: E731
    else:
        raise ConfigError(f"unknown overlap key {key!r}")
    if not a.records:
        raise ValidationError("corpus a is empty")
    seen = {keyfn(r) for r in b.records}
    hits = sum(1 for r in a.records if keyfn(r) in seen)
    return hits / len(a.records)
