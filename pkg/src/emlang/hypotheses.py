"""Dictionary-driven evaluation: datasets, receivers, accuracy, grid search.

The two standing checks:

* H1: messages extracted for whole-message entries should let a receiver
  find the target far above the 1/(k+1) chance level.
* H2: compositional messages built WITH their positional components
  (Comp-P) should beat the same messages with positional symbols zeroed
  out (Comp-NP); the gap is what validates the positional components.

Evaluation corpora are synthesized from dictionary entries alone:
meanings are sampled uniformly and each is realized with its
best-scoring entry, embedded in a fresh random sequence.
"""
from __future__ import annotations

import json
import subprocess
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .analysis import MessageAnalyzer
from .corpus import Corpus, EnvConfig, EpisodeRecord, record_to_json_dict
from .env import ObservationKind, build_candidates, extract_window
from .errors import ConfigError, ParseError, ValidationError
from .lexicon import Dictionary, extract_dictionary
from .synthlang import LexiconSpec, kind_target_index, oracle_decode
from .validation import as_rng

MODES = ("nc-positional", "nc-integer", "comp-p", "comp-np")

#: Default threshold grids swept by ``grid_search``.
TC_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
TN_GRID = (1, 2, 3, 5, 10, 15)
TCR_GRID = (0.3,)

ABSTAIN = None


@dataclass(frozen=True, slots=True)
class EvalSpec:
    """What to synthesize: mode, sample count, and a master seed."""

    mode: str
    n: int = 1000
    seed: int = 0

    def normalized_mode(self) -> str:
        mode = self.mode.lower().replace("_", "-")
        if mode not in MODES:
            raise ConfigError(f"unknown eval mode {self.mode!r}; pick from {MODES}")
        return mode


# -- receivers ---------------------------------------------------------------


class OracleReceiver(BaseEstimator):
    """Ground-truth receiver backed by a planted lexicon."""

    def __init__(self, lexicon: LexiconSpec):
        self.lexicon = lexicon

    def predict(self, records) -> list[int | None]:
        return [
            oracle_decode(self.lexicon, r.message, r.seq, r.candidates)
            for r in records
        ]


class NullReceiver(BaseEstimator):
    """Always abstains; the floor of any accuracy comparison."""

    def predict(self, records) -> list[int | None]:
        return [ABSTAIN for _ in records]


class RandomReceiver(BaseEstimator):
    """Uniform guesser; realizes the 1/(k+1) chance baseline."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def predict(self, records) -> list[int | None]:
        rng = as_rng(self.seed)
        return [int(rng.integers(0, len(r.candidates))) for r in records]


class FilePredictionsReceiver(BaseEstimator):
    """Receiver whose answers were produced externally.

    The predictions file is JSONL ``{"index": int, "prediction": int}``
    with 1-based candidate positions and 0 meaning abstain, mirroring the
    1-based ``target_position`` of the corpus schema.  When ``command`` is
    given it is run (with the eval corpus already on disk) before reading.
    """

    def __init__(self, predictions_path, command: list[str] | None = None):
        self.predictions_path = predictions_path
        self.command = command

    def predict(self, records) -> list[int | None]:
        if self.command:
            subprocess.run(self.command, check=True)
        preds = read_predictions(self.predictions_path)
        if len(preds) != len(records):
            raise ValidationError(
                f"{len(preds)} predictions for {len(records)} records"
            )
        return [preds[i] for i in range(len(records))]


def write_eval_jsonl(corpus: Corpus, path) -> None:
    """Eval exchange file: corpus schema plus an ``expected_message`` field."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in corpus.records:
            data = record_to_json_dict(record)
            data["expected_message"] = list(record.message)
            fh.write(json.dumps(data, separators=(",", ":")))
            fh.write("\n")


def write_predictions(predictions: list[int | None], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for index, pred in enumerate(predictions):
            value = 0 if pred is None else pred + 1
            fh.write(json.dumps({"index": index, "prediction": value}))
            fh.write("\n")


def read_predictions(path) -> dict[int, int | None]:
    preds: dict[int, int | None] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                data = json.loads(raw)
                index, value = data["index"], data["prediction"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise ParseError(f"bad prediction line: {exc}", lineno) from None
            preds[index] = None if value == 0 else value - 1
    return preds


# -- evaluation dataset construction ------------------------------------------


def _make_record(rng, config: EnvConfig, target_index: int, placements: dict,
                 message: tuple[int, ...]) -> EpisodeRecord:
    """Fresh permutation with required integers swapped to required offsets."""
    n = config.num_points
    seq = [int(v) for v in rng.permutation(n)]
    for off, value in placements.items():
        pos = target_index + off
        cur = seq.index(value)
        seq[pos], seq[cur] = seq[cur], seq[pos]
    seq_t = tuple(seq)
    target_value = seq_t[target_index]
    obs = extract_window(seq_t, target_index)
    cands = build_candidates(rng, n, target_value, config.num_distractors)
    return EpisodeRecord(
        seq=seq_t,
        obs=obs.window,
        obs_kind=obs.kind,
        target_value=target_value,
        target_index=target_index,
        candidates=cands.entries,
        target_position=cands.target_position,
        message=tuple(int(s) for s in message),
    )


def _best_by_meaning(entries) -> dict:
    """meaning -> entries that carry it, best score first."""
    ranked: dict = defaultdict(list)
    for entry in entries:
        for meaning, score in zip(entry.meanings, entry.npmis):
            ranked[meaning].append((score, entry))
    return {
        meaning: [e for _, e in sorted(pairs, key=lambda p: -p[0])]
        for meaning, pairs in ranked.items()
    }


def _placements_of(entry) -> list[tuple[int, ...]]:
    width = len(entry.subject)
    if entry.slot is not None:
        return [tuple(range(entry.slot, entry.slot + width))]
    return [tuple(range(s, s + width)) for s in range(1, 3 - width + 2)]


def _compose(int_entry, pos_entry) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Tile the two entries over slots 1..3; returns (message, pos_slots)."""
    for int_slots in _placements_of(int_entry):
        for pos_slots in _placements_of(pos_entry):
            if sorted(int_slots + pos_slots) != [1, 2, 3]:
                continue
            msg = [0, 0, 0]
            for slot, sym in zip(int_slots, int_entry.subject):
                msg[slot - 1] = sym
            for slot, sym in zip(pos_slots, pos_entry.subject):
                msg[slot - 1] = sym
            return tuple(msg), pos_slots
    return None


def gen_eval_dataset(
    spec: EvalSpec, dictionary: Dictionary, config: EnvConfig, max_tries: int = 100
) -> Corpus:
    """Synthesize observations that the dictionary claims to describe.

    Meanings are drawn uniformly; each is realized with its best-scoring
    entry.  Compositional records place the sampled integer at the sampled
    offset and tile the two components into one message; the NP variant
    then zeroes the positional symbols while keeping the observation.
    """
    mode = spec.normalized_mode()
    config.validate()
    rng = as_rng(spec.seed)
    n_points = config.num_points
    records: list[EpisodeRecord] = []

    if mode == "nc-positional":
        best = {
            kind: entries[0]
            for kind, entries in _best_by_meaning(
                dictionary.by_family("nc_positional")
            ).items()
        }
        if not best:
            raise ValidationError("dictionary has no NC-Positional entries")
        kinds = sorted(best)
        for _ in range(spec.n):
            kind = kinds[int(rng.integers(len(kinds)))]
            target_index = kind_target_index(ObservationKind(kind), n_points)
            records.append(
                _make_record(rng, config, target_index, {}, best[kind].subject)
            )
        return Corpus(records, config, split_name=f"eval-{mode}")

    if mode == "nc-integer":
        best = {
            meaning: entries[0]
            for meaning, entries in _best_by_meaning(
                dictionary.by_family("nc_integer")
            ).items()
        }
        if not best:
            raise ValidationError("dictionary has no NC-Integer entries")
        meanings = sorted(best)
        for _ in range(spec.n):
            off, integer = meanings[int(rng.integers(len(meanings)))]
            target_index = int(rng.integers(2, n_points - 2))
            records.append(
                _make_record(
                    rng,
                    config,
                    target_index,
                    {off: integer},
                    best[(off, integer)].subject,
                )
            )
        return Corpus(records, config, split_name=f"eval-{mode}")

    int_by_meaning = _best_by_meaning(dictionary.by_family("comp_integer"))
    pos_by_meaning = _best_by_meaning(dictionary.by_family("comp_positional"))
    if not int_by_meaning:
        raise ValidationError("dictionary has no Comp-Integer entries")
    if not pos_by_meaning:
        raise ValidationError("dictionary has no Comp-Positional entries")
    integers = sorted(int_by_meaning)
    offsets = sorted(pos_by_meaning)
    for _ in range(spec.n):
        for attempt in range(max_tries):
            integer = integers[int(rng.integers(len(integers)))]
            off = offsets[int(rng.integers(len(offsets)))]
            composed = None
            for int_entry in int_by_meaning[integer]:
                for pos_entry in pos_by_meaning[off]:
                    composed = _compose(int_entry, pos_entry)
                    if composed is not None:
                        break
                if composed is not None:
                    break
            if composed is None:
                continue
            message, pos_slots = composed
            if mode == "comp-np":
                message = tuple(
                    0 if slot in pos_slots else sym
                    for slot, sym in enumerate(message, start=1)
                )
            target_index = int(rng.integers(2, n_points - 2))
            records.append(
                _make_record(rng, config, target_index, {off: integer}, message)
            )
            break
        else:
            raise ValidationError(
                f"no tileable component pair found in {max_tries} tries"
            )
    return Corpus(records, config, split_name=f"eval-{mode}")


def evaluate(receiver, corpus: Corpus) -> float:
    """Fraction of records whose predicted candidate is the target.

    Abstentions count as incorrect.
    """
    if not corpus.records:
        raise ValidationError("evaluation corpus is empty")
    predictions = receiver.predict(corpus.records)
    hits = sum(
        1
        for pred, record in zip(predictions, corpus.records)
        if pred is not None and pred == record.target_position
    )
    return hits / len(corpus.records)


# -- grid search ---------------------------------------------------------------


@dataclass(slots=True)
class GridResult:
    rows: list[dict]
    best: dict[str, dict]

    def to_json_dict(self) -> dict:
        return {"rows": self.rows, "best": self.best}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "GridResult":
        data = json.loads(Path(path).read_text())
        return cls(rows=data["rows"], best=data["best"])


def grid_search(
    corpus: Corpus,
    receiver,
    t_c_grid=TC_GRID,
    t_n_grid=TN_GRID,
    t_c_referent_grid=TCR_GRID,
    eval_n: int = 500,
    seed: int = 0,
    modes=MODES,
    threads: int = 1,
    analyzer: MessageAnalyzer | None = None,
) -> GridResult:
    """Sweep the threshold grids, evaluating every mode at every point.

    The expensive counting passes are shared across grid points; results
    are deterministic for a fixed seed regardless of ``threads``.
    """
    t_c_grid = tuple(t_c_grid)
    t_n_grid = tuple(t_n_grid)
    t_c_referent_grid = tuple(t_c_referent_grid)
    if not t_c_grid or not t_n_grid or not t_c_referent_grid:
        raise ConfigError("threshold grids must be non-empty")
    if analyzer is None:
        analyzer = MessageAnalyzer(max_top_n=max(t_n_grid))
        analyzer.fit(corpus)

    points = [
        (t_c, t_n, t_cr)
        for t_c in t_c_grid
        for t_n in t_n_grid
        for t_cr in t_c_referent_grid
    ]
    # Referent passes depend on (t_c, t_n) only; warm them serially so the
    # per-point work below stays read-only.
    for t_c in t_c_grid:
        for t_n in t_n_grid:
            analyzer.referent_associations(t_c, t_n)

    seeds = np.random.SeedSequence(seed).spawn(len(points))

    def run_point(args):
        index, (t_c, t_n, t_cr) = args
        result = analyzer.result(t_c=t_c, t_n=t_n)
        dictionary = extract_dictionary(result, t_c, t_n, t_cr)
        rows = []
        mode_seeds = seeds[index].spawn(len(modes))
        for mode, mode_seed in zip(modes, mode_seeds):
            row = {
                "t_c": t_c,
                "t_n": t_n,
                "t_c_referent": t_cr,
                "mode": mode,
                "dictionary_size": dictionary.size(),
                "entries": {
                    family: len(dictionary.by_family(family))
                    for family in ("nc_positional", "nc_integer",
                                   "comp_positional", "comp_integer")
                },
            }
            try:
                eval_corpus = gen_eval_dataset(
                    EvalSpec(mode=mode, n=eval_n, seed=mode_seed),
                    dictionary,
                    corpus.config,
                )
                row["accuracy"] = evaluate(receiver, eval_corpus)
            except ValidationError as exc:
                row["accuracy"] = None
                row["skipped"] = str(exc)
            rows.append(row)
        return rows

    tasks = list(enumerate(points))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            nested = list(pool.map(run_point, tasks))
    else:
        nested = [run_point(task) for task in tasks]
    rows = [row for batch in nested for row in batch]

    best: dict[str, dict] = {}
    for row in rows:
        accuracy = row.get("accuracy")
        if accuracy is None:
            continue
        current = best.get(row["mode"])
        if current is None or accuracy > current["accuracy"]:
            best[row["mode"]] = row
    return GridResult(rows=rows, best=best)


# -- reporting -----------------------------------------------------------------


def report(
    accuracies_by_mode: dict[str, list[float]],
    emergence: dict | None = None,
    dictionary: Dictionary | None = None,
) -> dict:
    """Per-mode average/max accuracy with 1-sigma spread across runs."""
    modes = {}
    for mode, values in sorted(accuracies_by_mode.items()):
        values = [v for v in values if v is not None]
        if not values:
            continue
        arr = np.asarray(values, dtype=float)
        modes[mode] = {
            "runs": len(values),
            "avg": float(arr.mean()),
            "max": float(arr.max()),
            "sigma": float(arr.std()),
        }
    out: dict = {"modes": modes}
    if emergence is not None:
        out["emergence"] = emergence
    if dictionary is not None:
        from .lexicon import render_dictionary

        out["dictionary_excerpt"] = render_dictionary(dictionary).splitlines()[:16]
    return out


def render_report(data: dict) -> str:
    lines = ["Mode            Avg      Max      Sigma    Runs"]
    for mode, stats in data["modes"].items():
        lines.append(
            f"{mode:<15} {stats['avg']:<8.4f} {stats['max']:<8.4f} "
            f"{stats['sigma']:<8.4f} {stats['runs']}"
        )
    if "emergence" in data:
        lines.append("")
        lines.append("Family                      Emergence        Coverage")
        for family, stats in data["emergence"].items():
            lines.append(
                f"{family:<27} {stats['emergence_avg']:>6.1%} "
                f"({stats['emergence_min']:.1%}-{stats['emergence_max']:.1%}) "
                f"{stats['coverage_avg']:>8.1%}"
            )
    if "dictionary_excerpt" in data:
        lines.append("")
        lines.extend(data["dictionary_excerpt"])
    return "\n".join(lines) + "\n"
