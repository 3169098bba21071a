"""Collocation pipelines: message-level and n-gram-level NPMI scoring.

Two pipelines square the discrete messages of a corpus against what the
sender saw:

* the message pipeline (``pmi_nc_*``) scores whole messages against
  boundary observation kinds and against (integer, window-offset) pairs,
  catching monolithic messages;
* the n-gram pipeline (``pmi_c_*``) scores unigrams and bigrams against
  visible integers (position-variant and position-invariant), prunes by a
  confidence threshold, and then scores what is left of each matched
  message against the referent position of the identified integer,
  catching trivially compositional messages.

Counting is vectorized but always lands in a plain :class:`CountTable`,
so every score can be re-derived by naive enumeration.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .collocation import (
    STATIC_KIND_PROBS,
    CountTable,
    integer_prior,
    kind_prior,
    npmi,
)
from .corpus import Corpus
from .env import MASK, NAMED_OFFSETS, ObservationKind, OFFSET_NAMES, offset_name
from .errors import ConfigError, ValidationError

BOUNDARY_KIND_VALUES = tuple(
    k.value for k in ObservationKind if k is not ObservationKind.MIDDLE
)

#: Leftover message pieces, keyed by (start slot, length) of the removed
#: integer n-gram.  A slot-2 unigram leaves a non-contiguous remainder,
#: which is treated as two independent unigram candidates.
LEFTOVER_PIECES = {
    (1, 1): ((2, 3),),
    (2, 1): ((1,), (3,)),
    (3, 1): ((1, 2),),
    (1, 2): ((3,),),
    (2, 2): ((1,),),
}

STATIC_REFERENT_PROB = 0.98


@dataclass(frozen=True, slots=True)
class ScoredAssociation:
    """One (subject, context) pair with its NPMI score.

    ``slot`` is the 1-based message position of the subject n-gram, or
    ``None`` for position-invariant subjects and whole messages.  ``rank``
    orders integer contexts per subject by joint count (1 = strongest) and
    is ``None`` for kind and referent contexts.
    """

    subject: tuple[int, ...]
    slot: int | None
    context: tuple
    npmi: float
    joint_count: int
    rank: int | None = None


@dataclass(slots=True)
class Priors:
    """Marginal probabilities injected into every NPMI computation."""

    num_points: int
    kind_probs: dict[str, float]
    integer_mode: str = "static"
    referent_mode: str = "empirical"

    def kind_prob(self, kind_value: str) -> float:
        return self.kind_probs[kind_value]

    def integer_prob(self, rank: int, context: tuple, table: CountTable) -> float:
        if self.integer_mode == "static":
            return integer_prior(rank, self.num_points)
        if self.integer_mode == "empirical":
            return table.context_counts[context] / table.total
        raise ConfigError(f"unknown integer prior mode {self.integer_mode!r}")

    def referent_prob(self, off: int, table: CountTable) -> float:
        if self.referent_mode == "empirical":
            return table.context_counts[("ref", off)] / table.total
        if self.referent_mode == "kind":
            return self.kind_probs[ObservationKind.MIDDLE.value]
        if self.referent_mode == "static":
            return STATIC_REFERENT_PROB
        raise ConfigError(f"unknown referent prior mode {self.referent_mode!r}")


def build_priors(
    records,
    integer_mode: str = "static",
    kind_mode: str = "empirical",
    referent_mode: str = "empirical",
    num_points: int | None = None,
) -> Priors:
    records = getattr(records, "records", records)
    if num_points is None:
        num_points = len(records[0].seq)
    if kind_mode == "empirical":
        kind_probs = {k.value: p for k, p in kind_prior(records).items()}
    elif kind_mode == "static":
        kind_probs = {k.value: p for k, p in STATIC_KIND_PROBS.items()}
    else:
        raise ConfigError(f"unknown kind prior mode {kind_mode!r}")
    return Priors(
        num_points=num_points,
        kind_probs=kind_probs,
        integer_mode=integer_mode,
        referent_mode=referent_mode,
    )


# -- array staging -------------------------------------------------------


@dataclass(slots=True)
class _Arrays:
    msgs: np.ndarray       # (L, 3) message symbols
    obs: np.ndarray        # (L, 5) window values, MASK at the target
    mask: np.ndarray       # (L,) 0-based mask position
    kinds: np.ndarray      # (L,) object array of kind value strings
    num_points: int

    @property
    def total(self) -> int:
        return len(self.msgs)


def corpus_arrays(records) -> _Arrays:
    records = getattr(records, "records", records)
    if not records:
        raise ValidationError("corpus is empty")
    L = len(records)
    msgs = np.empty((L, 3), dtype=np.int64)
    obs = np.empty((L, 5), dtype=np.int64)
    kinds = np.empty(L, dtype=object)
    for i, record in enumerate(records):
        if len(record.message) != 3:
            raise ValidationError(f"record {i} carries no message")
        msgs[i] = record.message
        obs[i] = record.obs
        kinds[i] = record.obs_kind.value
    mask = np.argmax(obs == MASK, axis=1)
    return _Arrays(
        msgs=msgs,
        obs=obs,
        mask=mask,
        kinds=kinds,
        num_points=len(records[0].seq),
    )


def _unique_counts(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if keys.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.unique(keys, return_counts=True)


# -- message pipeline: counting ------------------------------------------


def pmi_nc_count(records) -> CountTable:
    """Gather whole-message counts against kinds and (integer, offset) pairs.

    Every visible window cell at a named offset (left2..right2) counts for
    its (offset, integer) context; boundary kinds count once per record.
    """
    arrays = records if isinstance(records, _Arrays) else corpus_arrays(records)
    L = arrays.total
    table = CountTable(total=L)
    uniq, inverse, counts = np.unique(
        arrays.msgs, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.reshape(-1)
    msg_of = [tuple(int(s) for s in row) for row in uniq]
    for msg, count in zip(msg_of, counts):
        table.ngram_counts[(msg, None)] = int(count)

    for kind in ObservationKind:
        sel = arrays.kinds == kind.value
        total_kind = int(sel.sum())
        if total_kind:
            table.context_counts[("kind", kind.value)] = total_kind
        if kind is ObservationKind.MIDDLE or not total_kind:
            continue
        idx, joint = _unique_counts(inverse[sel])
        for i, j in zip(idx, joint):
            table.joint_counts[((msg_of[i], None), ("kind", kind.value))] = int(j)

    n = arrays.num_points
    rows = np.arange(L)
    for off in NAMED_OFFSETS:
        col = arrays.mask + off
        valid = (col >= 0) & (col < 5)
        vals = arrays.obs[rows[valid], col[valid]]
        uniq_v, counts_v = _unique_counts(vals)
        for v, c in zip(uniq_v, counts_v):
            table.context_counts[("int_at", off, int(v))] = int(c)
        keys, joint = _unique_counts(inverse[valid] * n + vals)
        for key, j in zip(keys, joint):
            msg = msg_of[int(key // n)]
            context = ("int_at", off, int(key % n))
            table.joint_counts[((msg, None), context)] = int(j)
    return table


# -- message pipeline: scoring --------------------------------------------


def _grouped_joints(table: CountTable):
    grouped: dict = defaultdict(list)
    for (subject, context), j in table.joint_counts.items():
        grouped[subject].append((context, j))
    return grouped


def pmi_nc_score(
    table: CountTable, priors: Priors, max_rank: int = 1
) -> tuple[list[ScoredAssociation], list[ScoredAssociation]]:
    """NPMI of every observed (message, kind) and (message, integer@offset) pair.

    Integer contexts are ranked per message by joint count (ties broken by
    smaller integer, then offset order) and scored up to ``max_rank`` deep;
    rank r uses the polysemy prior for a meaning set of size r.
    """
    L = table.total
    nc_positional: list[ScoredAssociation] = []
    nc_integer: list[ScoredAssociation] = []
    for subject, pairs in sorted(_grouped_joints(table).items()):
        msg, _ = subject
        p_msg = table.ngram_counts[subject] / L
        kind_pairs = [(c, j) for c, j in pairs if c[0] == "kind"]
        int_pairs = [(c, j) for c, j in pairs if c[0] == "int_at"]
        for context, j in sorted(kind_pairs):
            score = npmi(j / L, p_msg, priors.kind_prob(context[1]))
            if score is None:
                continue
            nc_positional.append(
                ScoredAssociation(msg, None, context, score, j)
            )
        int_pairs.sort(key=lambda item: (-item[1], item[0][2], item[0][1]))
        for rank, (context, j) in enumerate(int_pairs[:max_rank], start=1):
            score = npmi(j / L, p_msg, priors.integer_prob(rank, context, table))
            if score is None:
                continue
            nc_integer.append(
                ScoredAssociation(msg, None, context, score, j, rank=rank)
            )
    return nc_positional, nc_integer


# -- n-gram pipeline: counting ---------------------------------------------


def _slot_codes(msgs: np.ndarray, base: int) -> dict[tuple[int, int], np.ndarray]:
    """Per-(start-slot, length) integer codes for every message n-gram."""
    codes = {}
    for slot in (1, 2, 3):
        codes[(slot, 1)] = msgs[:, slot - 1]
    for slot in (1, 2):
        codes[(slot, 2)] = msgs[:, slot - 1] * base + msgs[:, slot]
    return codes


def _decode(code: int, length: int, base: int) -> tuple[int, ...]:
    if length == 1:
        return (int(code),)
    return (int(code // base), int(code % base))


def pmi_c_count(records) -> CountTable:
    """Count every observed unigram/bigram against every visible integer.

    Integers are counted irrespective of their window position.  Per-slot
    counts and their position-invariant sums are both kept, so the n-gram
    totals obey slot conservation by construction.
    """
    arrays = records if isinstance(records, _Arrays) else corpus_arrays(records)
    L = arrays.total
    base = int(arrays.msgs.max()) + 1 if L else 1
    n = arrays.num_points
    codes = _slot_codes(arrays.msgs, base)
    table = CountTable(total=L)

    visible_cols = []
    rows = np.arange(L)
    for col in range(5):
        valid = arrays.mask != col
        visible_cols.append((rows[valid], arrays.obs[valid, col]))
    for _, vals in visible_cols:
        uniq_v, counts_v = _unique_counts(vals)
        for v, c in zip(uniq_v, counts_v):
            table.context_counts[("int", int(v))] = table.context_counts.get(
                ("int", int(v)), 0
            ) + int(c)

    any_counts: Counter = Counter()
    any_joints: Counter = Counter()
    for (slot, length), slot_codes in codes.items():
        uniq_c, counts_c = _unique_counts(slot_codes)
        for code, c in zip(uniq_c, counts_c):
            symbols = _decode(code, length, base)
            table.ngram_counts[(symbols, slot)] = int(c)
            any_counts[symbols] += int(c)
        for valid_rows, vals in visible_cols:
            keys, joint = _unique_counts(slot_codes[valid_rows] * n + vals)
            for key, j in zip(keys, joint):
                symbols = _decode(key // n, length, base)
                context = ("int", int(key % n))
                table.joint_counts[((symbols, slot), context)] = (
                    table.joint_counts.get(((symbols, slot), context), 0) + int(j)
                )
                any_joints[(symbols, context)] += int(j)
    for symbols, count in any_counts.items():
        table.ngram_counts[(symbols, None)] = count
    for (symbols, context), j in any_joints.items():
        table.joint_counts[((symbols, None), context)] = j
    return table


def pmi_c_enumerate(records) -> set[tuple[tuple[int, ...], int]]:
    """All (n-gram, slot) pairs that occur in any message."""
    table = pmi_c_count(records) if not isinstance(records, CountTable) else records
    return {
        (symbols, slot)
        for (symbols, slot) in table.ngram_counts
        if slot is not None
    }


# -- n-gram pipeline: integer scoring ---------------------------------------


def pmi_c_integer_score(
    table: CountTable, priors: Priors, max_rank: int = 1
) -> list[ScoredAssociation]:
    """Score n-grams against their most co-occurring integers.

    Position-variant rows use p(ngram@slot) = count/L; position-invariant
    rows normalize by the number of slots the n-gram could occupy,
    p(ngram) = total/(L*(4-len)).  Integers are ranked per subject by
    joint count (ties to the smaller integer) up to ``max_rank``.
    """
    L = table.total
    results: list[ScoredAssociation] = []
    for subject, pairs in sorted(
        _grouped_joints(table).items(), key=lambda kv: _subject_key(kv[0])
    ):
        symbols, slot = subject
        count = table.ngram_counts[subject]
        if slot is None:
            p_sub = count / (L * (4 - len(symbols)))
        else:
            p_sub = count / L
        int_pairs = [(c, j) for c, j in pairs if c[0] == "int"]
        int_pairs.sort(key=lambda item: (-item[1], item[0][1]))
        for rank, (context, j) in enumerate(int_pairs[:max_rank], start=1):
            score = npmi(j / L, p_sub, priors.integer_prob(rank, context, table))
            if score is None:
                continue
            results.append(
                ScoredAssociation(symbols, slot, context, score, j, rank=rank)
            )
    return results


def _subject_key(subject):
    symbols, slot = subject
    return (len(symbols), symbols, -1 if slot is None else slot)


def pmi_c_prune(
    associations: list[ScoredAssociation], t_c: float, top_n: int = 1
) -> list[ScoredAssociation]:
    """Keep associations at or above the confidence threshold, at most
    ``top_n`` integer meanings deep per subject."""
    return [
        a
        for a in associations
        if a.npmi >= t_c and (a.rank is None or a.rank <= top_n)
    ]


# -- n-gram pipeline: referent scoring ---------------------------------------


def best_subject_per_integer(
    survivors: list[ScoredAssociation],
) -> list[ScoredAssociation]:
    """Keep one representative n-gram per integer meaning.

    Overlapping fragments of the same evidence (a bigram and the unigrams
    inside it, or a positional symbol glued to half an integer bigram) all
    survive pruning on deterministic languages.  Counting every one of
    them in the referent pass inflates the referent-context marginals with
    duplicate events until p(referent) saturates and deterministic
    leftovers score near zero.  One subject per integer, the strongest,
    keeps the marginals meaningful.
    """
    best: dict[int, ScoredAssociation] = {}
    for a in survivors:
        if a.context[0] != "int":
            continue
        integer = a.context[1]
        current = best.get(integer)
        if current is None or _strength(a) > _strength(current):
            best[integer] = a
    return [best[v] for v in sorted(best)]


def _strength(a: ScoredAssociation):
    return (
        a.npmi,
        a.joint_count,
        a.slot is not None,
        -(a.slot or 0),
        a.subject,
    )


def pmi_c_referent_count(
    records,
    survivors: list[ScoredAssociation],
    dedup: bool = True,
) -> CountTable:
    """Count leftover n-grams against referent positions.

    For every message matched by a surviving integer n-gram (at its slot
    when position-variant; anywhere for subjects with no surviving
    position-variant row), the remainder of the message is counted against
    the named offset at which the associated integer sits in that record's
    observation.  Matches where the integer is invisible or outside the
    named offsets contribute nothing.  ``dedup`` routes the pass through
    :func:`best_subject_per_integer` first.
    """
    if dedup:
        survivors = best_subject_per_integer(survivors)
    arrays = records if isinstance(records, _Arrays) else corpus_arrays(records)
    L = arrays.total
    base = int(arrays.msgs.max()) + 1 if L else 1
    codes = _slot_codes(arrays.msgs, base)

    # Each surviving row is matched on its own terms: slot rows at their
    # slot, position-invariant rows at every slot the n-gram fits.
    by_row: dict[tuple, list[int]] = defaultdict(list)
    for assoc in survivors:
        if assoc.context[0] != "int":
            continue
        by_row[(assoc.subject, assoc.slot)].append(assoc.context[1])

    table = CountTable(total=L)
    joints: Counter = Counter()
    context_counts: Counter = Counter()

    def matches(symbols, slot, integers):
        length = len(symbols)
        code = symbols[0] if length == 1 else symbols[0] * base + symbols[1]
        rows = np.nonzero(codes[(slot, length)] == code)[0]
        if rows.size == 0:
            return
        window = arrays.obs[rows]
        mask = arrays.mask[rows]
        for integer in integers:
            hits = window == integer
            present = hits.any(axis=1)
            if not present.any():
                continue
            pos = np.argmax(hits, axis=1)
            off = pos - mask
            named = present & (off != 0) & (np.abs(off) <= 2)
            if not named.any():
                continue
            sel = rows[named]
            offs = off[named]
            uniq_o, counts_o = _unique_counts(offs)
            for o, c in zip(uniq_o, counts_o):
                context_counts[("ref", int(o))] += int(c)
            for piece in LEFTOVER_PIECES[(slot, length)]:
                piece_len = len(piece)
                piece_codes = (
                    arrays.msgs[sel, piece[0] - 1]
                    if piece_len == 1
                    else arrays.msgs[sel, piece[0] - 1] * base
                    + arrays.msgs[sel, piece[1] - 1]
                )
                keys, counts_k = _unique_counts(piece_codes * 9 + (offs + 4))
                for key, c in zip(keys, counts_k):
                    piece_syms = _decode(key // 9, piece_len, base)
                    o = int(key % 9) - 4
                    joints[((piece_syms, piece[0]), ("ref", o))] += int(c)
                    joints[((piece_syms, None), ("ref", o))] += int(c)

    for symbols, slot in sorted(by_row, key=lambda k: (len(k[0]), k[0], k[1] or 0)):
        integers = sorted(set(by_row[(symbols, slot)]))
        if slot is not None:
            matches(symbols, slot, integers)
        else:
            for place in (1, 2, 3) if len(symbols) == 1 else (1, 2):
                matches(symbols, place, integers)

    table.joint_counts.update(joints)
    table.context_counts.update(context_counts)
    # Leftover marginals are the per-subject sums over referent positions.
    for (subject, context), j in joints.items():
        table.ngram_counts[subject] = table.ngram_counts.get(subject, 0) + j
    return table


def pmi_c_referent_score(
    table: CountTable, priors: Priors
) -> list[ScoredAssociation]:
    """NPMI of leftover n-grams against referent positions."""
    L = table.total
    results: list[ScoredAssociation] = []
    for subject, pairs in sorted(
        _grouped_joints(table).items(), key=lambda kv: _subject_key(kv[0])
    ):
        symbols, slot = subject
        p_sub = table.ngram_counts[subject] / L
        for context, j in sorted(pairs):
            score = npmi(j / L, p_sub, priors.referent_prob(context[1], table))
            if score is None:
                continue
            results.append(ScoredAssociation(symbols, slot, context, score, j))
    return results


# -- assembled result --------------------------------------------------------


@dataclass(slots=True)
class AnalysisResult:
    """Everything the dictionary extractor needs, serializable as JSON."""

    nc_positional: list[ScoredAssociation]
    nc_integer: list[ScoredAssociation]
    c_integer: list[ScoredAssociation]
    c_positional: list[ScoredAssociation]
    message_counts: dict[tuple[int, ...], int]
    total: int
    num_points: int
    t_c: float
    t_n: int
    priors_meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "total": self.total,
            "num_points": self.num_points,
            "t_c": self.t_c,
            "t_n": self.t_n,
            "priors": self.priors_meta,
            "message_counts": [
                {"message": list(msg), "count": count}
                for msg, count in sorted(self.message_counts.items())
            ],
            "nc_positional": [_assoc_json(a) for a in self.nc_positional],
            "nc_integer": [_assoc_json(a) for a in self.nc_integer],
            "c_integer": [_assoc_json(a) for a in self.c_integer],
            "c_positional": [_assoc_json(a) for a in self.c_positional],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AnalysisResult":
        return cls(
            nc_positional=[_assoc_parse(a) for a in data["nc_positional"]],
            nc_integer=[_assoc_parse(a) for a in data["nc_integer"]],
            c_integer=[_assoc_parse(a) for a in data["c_integer"]],
            c_positional=[_assoc_parse(a) for a in data["c_positional"]],
            message_counts={
                tuple(item["message"]): item["count"]
                for item in data["message_counts"]
            },
            total=data["total"],
            num_points=data["num_points"],
            t_c=data["t_c"],
            t_n=data["t_n"],
            priors_meta=data.get("priors", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, sort_keys=False) + "\n"
        )

    @classmethod
    def load(cls, path) -> "AnalysisResult":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _assoc_json(a: ScoredAssociation) -> dict:
    context: object
    tag = a.context[0]
    if tag == "kind":
        context = {"kind": a.context[1]}
    elif tag == "int_at":
        context = {"integer": a.context[2], "offset": offset_name(a.context[1])}
    elif tag == "int":
        context = {"integer": a.context[1]}
    else:
        context = {"referent": offset_name(a.context[1])}
    out = {
        "subject": list(a.subject),
        "slot": "any" if a.slot is None else a.slot,
        "context": context,
        "npmi": a.npmi,
        "joint_count": a.joint_count,
    }
    if a.rank is not None:
        out["rank"] = a.rank
    return out


def _assoc_parse(data: dict) -> ScoredAssociation:
    ctx = data["context"]
    if "kind" in ctx:
        context: tuple = ("kind", ctx["kind"])
    elif "offset" in ctx:
        context = ("int_at", _offset_of(ctx["offset"]), ctx["integer"])
    elif "referent" in ctx:
        context = ("ref", _offset_of(ctx["referent"]))
    else:
        context = ("int", ctx["integer"])
    return ScoredAssociation(
        subject=tuple(data["subject"]),
        slot=None if data["slot"] == "any" else data["slot"],
        context=context,
        npmi=data["npmi"],
        joint_count=data["joint_count"],
        rank=data.get("rank"),
    )


def _offset_of(name: str) -> int:
    for off, label in OFFSET_NAMES.items():
        if label == name:
            return off
    raise ValidationError(f"unknown offset name {name!r}")


class MessageAnalyzer(BaseEstimator):
    """Fit both collocation pipelines over a marked corpus.

    Follows the scikit-learn estimator protocol: hyperparameters are
    constructor arguments, learned state lives in trailing-underscore
    attributes after :meth:`fit`.  The integer-scoring stage is threshold
    free (scored ``max_top_n`` ranks deep); the referent stage depends on
    the pruning threshold, so it is computed per (t_c, t_n) on demand and
    cached.
    """

    def __init__(
        self,
        max_top_n: int = 15,
        integer_prior_mode: str = "static",
        kind_prior_mode: str = "empirical",
        referent_prior_mode: str = "empirical",
    ):
        self.max_top_n = max_top_n
        self.integer_prior_mode = integer_prior_mode
        self.kind_prior_mode = kind_prior_mode
        self.referent_prior_mode = referent_prior_mode

    def fit(self, records, y=None):
        records = getattr(records, "records", records)
        self.arrays_ = corpus_arrays(records)
        self.total_ = self.arrays_.total
        self.num_points_ = self.arrays_.num_points
        self.priors_ = build_priors(
            records,
            integer_mode=self.integer_prior_mode,
            kind_mode=self.kind_prior_mode,
            referent_mode=self.referent_prior_mode,
            num_points=self.num_points_,
        )
        self.nc_table_ = pmi_nc_count(self.arrays_)
        self.nc_positional_, self.nc_integer_ = pmi_nc_score(
            self.nc_table_, self.priors_, self.max_top_n
        )
        self.c_table_ = pmi_c_count(self.arrays_)
        self.c_integer_ = pmi_c_integer_score(
            self.c_table_, self.priors_, self.max_top_n
        )
        self.message_counts_ = {
            msg: count
            for (msg, slot), count in self.nc_table_.ngram_counts.items()
            if slot is None
        }
        self._referent_cache: dict[tuple[float, int], list[ScoredAssociation]] = {}
        return self

    def referent_associations(self, t_c: float, t_n: int = 1):
        key = (round(float(t_c), 12), int(t_n))
        if key not in self._referent_cache:
            survivors = pmi_c_prune(self.c_integer_, t_c, t_n)
            table = pmi_c_referent_count(self.arrays_, survivors)
            self._referent_cache[key] = pmi_c_referent_score(table, self.priors_)
        return self._referent_cache[key]

    def result(self, t_c: float = 0.5, t_n: int = 1) -> AnalysisResult:
        return AnalysisResult(
            nc_positional=list(self.nc_positional_),
            nc_integer=list(self.nc_integer_),
            c_integer=list(self.c_integer_),
            c_positional=self.referent_associations(t_c, t_n),
            message_counts=dict(self.message_counts_),
            total=self.total_,
            num_points=self.num_points_,
            t_c=t_c,
            t_n=t_n,
            priors_meta={
                "integer": self.integer_prior_mode,
                "kind": self.kind_prior_mode,
                "referent": self.referent_prior_mode,
            },
        )


def analyze(
    records,
    t_c: float = 0.5,
    t_n: int = 1,
    max_top_n: int | None = None,
    **prior_modes,
) -> AnalysisResult:
    """One-shot convenience wrapper around :class:`MessageAnalyzer`."""
    analyzer = MessageAnalyzer(
        max_top_n=max(t_n, max_top_n or t_n), **prior_modes
    )
    analyzer.fit(records)
    return analyzer.result(t_c=t_c, t_n=t_n)
