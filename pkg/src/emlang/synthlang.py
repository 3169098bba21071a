"""Rule-based synthetic senders with known ground truth, plus an oracle receiver.

A :class:`LexiconSpec` pins down exactly which message (or message parts)
stand for which meanings, so the collocation pipeline can be verified
against languages where the right answer is known.  Four entry families
exist:

* ``nc_positional``  - a full 3-symbol message per observation kind,
* ``nc_integer``     - a full message per (offset, integer) pair,
* ``comp_positional``- an n-gram (with optional slot constraint) per offset,
* ``comp_integer``   - an n-gram (with optional slot constraint) per integer.

Compositional messages are built by tiling one positional and one integer
n-gram over the three message slots without overlap.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import Corpus, EnvConfig, EpisodeRecord, make_episode, record_observation
from .env import (
    NAMED_OFFSETS,
    OFFSET_BY_NAME,
    Observation,
    ObservationKind,
    offset_name,
)
from .errors import ConfigError, CoverageError, ValidationError
from .validation import as_rng

MESSAGE_LEN = 3
ALL_SLOTS = (1, 2, 3)

#: Try the nearest reference first; spelled out it reads
#: (left1, right1, left2, right2).
DEFAULT_POLICY = (-1, 1, -2, 2)

KIND_TARGET_INDEX = {
    ObservationKind.BEGIN: 0,
    ObservationKind.BEGIN_PLUS_1: 1,
}


def kind_target_index(kind: ObservationKind, num_points: int) -> int:
    if kind is ObservationKind.END:
        return num_points - 1
    if kind is ObservationKind.END_MINUS_1:
        return num_points - 2
    if kind in KIND_TARGET_INDEX:
        return KIND_TARGET_INDEX[kind]
    raise ValidationError(f"{kind} does not pin the target to a fixed index")


def check_policy(policy: Iterable[int]) -> tuple[int, ...]:
    """A reference policy must rank all four named offsets exactly once."""
    order = tuple(policy)
    if sorted(order) != sorted(NAMED_OFFSETS):
        raise ConfigError(f"policy {order} must cover all of {NAMED_OFFSETS}")
    return order


@dataclass(frozen=True, slots=True)
class LexEntry:
    """One ground-truth mapping between a meaning and message symbols.

    ``slots`` gives the occupied 1-based message positions; ``None`` marks
    a position-invariant n-gram that may tile anywhere it fits.
    """

    family: str
    meaning: object
    ngram: tuple[int, ...]
    slots: tuple[int, ...] | None

    @property
    def invariant(self) -> bool:
        return self.slots is None

    def placements(self) -> list[tuple[int, ...]]:
        """All slot tuples this entry may occupy."""
        if self.slots is not None:
            return [self.slots]
        width = len(self.ngram)
        return [
            tuple(range(start, start + width))
            for start in range(1, MESSAGE_LEN - width + 2)
        ]


@dataclass(slots=True)
class LexiconSpec:
    """Ground-truth synthetic language over one environment configuration."""

    entries: list[LexEntry]
    num_points: int
    vocab_size: int
    policy: tuple[int, ...] = DEFAULT_POLICY
    #: Optional map integer -> offsets the encoder may use for it.  Decoding
    #: ignores the gate; it only shapes which messages get produced.
    offset_gate: dict[int, tuple[int, ...]] | None = None
    seed: int | None = None

    _kind_to_msg: dict = field(init=False, repr=False, default_factory=dict)
    _msg_to_kind: dict = field(init=False, repr=False, default_factory=dict)
    _ncint_to_msg: dict = field(init=False, repr=False, default_factory=dict)
    _msg_to_ncint: dict = field(init=False, repr=False, default_factory=dict)
    _pos_by_offset: dict = field(init=False, repr=False, default_factory=dict)
    _int_by_integer: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.policy = check_policy(self.policy)
        for entry in self.entries:
            if entry.family == "nc_positional":
                kind = ObservationKind(entry.meaning)
                self._kind_to_msg[kind] = entry.ngram
                self._msg_to_kind[entry.ngram] = kind
            elif entry.family == "nc_integer":
                off, integer = entry.meaning
                self._ncint_to_msg[(off, integer)] = entry.ngram
                self._msg_to_ncint[entry.ngram] = (off, integer)
            elif entry.family == "comp_positional":
                self._pos_by_offset.setdefault(entry.meaning, []).append(entry)
            elif entry.family == "comp_integer":
                self._int_by_integer.setdefault(entry.meaning, []).append(entry)
            else:
                raise ValidationError(f"unknown entry family {entry.family!r}")
        self.validate()

    # -- consistency ---------------------------------------------------

    def validate(self) -> None:
        for entry in self.entries:
            for sym in entry.ngram:
                if not 0 <= sym < self.vocab_size:
                    raise ValidationError(
                        f"symbol {sym} outside alphabet 0..{self.vocab_size - 1}"
                    )
            if entry.family.startswith("nc_") and len(entry.ngram) != MESSAGE_LEN:
                raise ValidationError("non-compositional entries are full messages")
            if entry.slots is not None:
                if len(entry.slots) != len(entry.ngram):
                    raise ValidationError("slots do not match n-gram length")
                if entry.slots != tuple(
                    range(entry.slots[0], entry.slots[0] + len(entry.slots))
                ):
                    raise ValidationError("slots must be contiguous")
                if entry.slots[0] < 1 or entry.slots[-1] > MESSAGE_LEN:
                    raise ValidationError(f"slots {entry.slots} out of message range")
        # Composable pairs must tile a full message, and full messages must
        # be unambiguous unless the sharing is declared polysemy.
        seen: dict[tuple[int, ...], object] = {}
        for msg, kind in self._msg_to_kind.items():
            seen[msg] = ("kind", kind)
        for msg, meaning in self._msg_to_ncint.items():
            if msg in seen:
                raise ValidationError(f"message {msg} used by {seen[msg]} and {meaning}")
            seen[msg] = ("nc_int", meaning)
        polysemy = self.polysemy()
        for off, pos_entries in self._pos_by_offset.items():
            for integer, int_entries in self._int_by_integer.items():
                for pos_entry in pos_entries:
                    for int_entry in int_entries:
                        for msg in _tilings(pos_entry, int_entry):
                            prior = seen.get(msg)
                            claim = ("comp", off, integer)
                            if prior is None:
                                seen[msg] = claim
                                continue
                            if prior[0] == "comp" and prior[1] == off:
                                shared = {prior[2], integer}
                                declared = polysemy.get(int_entry.ngram, set())
                                if shared <= declared or prior[2] == integer:
                                    continue
                            raise ValidationError(
                                f"message {msg} is ambiguous: {prior} vs {claim}"
                            )

    def polysemy(self) -> dict[tuple[int, ...], set[int]]:
        """Integer n-grams shared by several integer meanings."""
        by_ngram: dict[tuple[int, ...], set[int]] = {}
        for integer, entries in self._int_by_integer.items():
            for entry in entries:
                by_ngram.setdefault(entry.ngram, set()).add(integer)
        return {ng: ints for ng, ints in by_ngram.items() if len(ints) > 1}

    # -- entry access ---------------------------------------------------

    def by_family(self, family: str) -> list[LexEntry]:
        return [entry for entry in self.entries if entry.family == family]

    def kind_message(self, kind: ObservationKind) -> tuple[int, ...] | None:
        return self._kind_to_msg.get(kind)

    def allowed_offsets(self, integer: int) -> tuple[int, ...]:
        if self.offset_gate is None:
            return NAMED_OFFSETS
        return self.offset_gate.get(integer, ())

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        entries = []
        for entry in self.entries:
            if entry.family == "nc_positional":
                meaning = ObservationKind(entry.meaning).value
            elif entry.family == "nc_integer":
                off, integer = entry.meaning
                meaning = {"offset": offset_name(off), "integer": integer}
            elif entry.family == "comp_positional":
                meaning = offset_name(entry.meaning)
            else:
                meaning = entry.meaning
            entries.append(
                {
                    "type": entry.family,
                    "meaning": meaning,
                    "ngram": list(entry.ngram),
                    "slots": list(entry.slots) if entry.slots else None,
                    "invariant": entry.invariant,
                }
            )
        return {
            "num_points": self.num_points,
            "vocab_size": self.vocab_size,
            "policy": [offset_name(off) for off in self.policy],
            "offset_gate": None
            if self.offset_gate is None
            else {
                str(v): [offset_name(off) for off in offs]
                for v, offs in sorted(self.offset_gate.items())
            },
            "polysemy": [
                {"ngram": list(ngram), "integers": sorted(ints)}
                for ngram, ints in sorted(self.polysemy().items())
            ],
            "seed": self.seed,
            "entries": entries,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "LexiconSpec":
        entries = []
        for raw in data["entries"]:
            family = raw["type"]
            if family == "nc_positional":
                meaning = ObservationKind(raw["meaning"])
            elif family == "nc_integer":
                meaning = (OFFSET_BY_NAME[raw["meaning"]["offset"]], raw["meaning"]["integer"])
            elif family == "comp_positional":
                meaning = OFFSET_BY_NAME[raw["meaning"]]
            else:
                meaning = raw["meaning"]
            entries.append(
                LexEntry(
                    family=family,
                    meaning=meaning,
                    ngram=tuple(raw["ngram"]),
                    slots=tuple(raw["slots"]) if raw["slots"] else None,
                )
            )
        gate = data.get("offset_gate")
        return cls(
            entries=entries,
            num_points=data["num_points"],
            vocab_size=data["vocab_size"],
            policy=tuple(OFFSET_BY_NAME[name] for name in data["policy"]),
            offset_gate=None
            if gate is None
            else {int(v): tuple(OFFSET_BY_NAME[n] for n in offs) for v, offs in gate.items()},
            seed=data.get("seed"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "LexiconSpec":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _tilings(pos_entry: LexEntry, int_entry: LexEntry) -> list[tuple[int, ...]]:
    """All full messages the two entries can tile, in deterministic order."""
    messages = []
    for pos_slots in pos_entry.placements():
        for int_slots in int_entry.placements():
            occupied = pos_slots + int_slots
            if sorted(occupied) != list(ALL_SLOTS):
                continue
            msg = [None] * MESSAGE_LEN
            for slot, sym in zip(pos_slots, pos_entry.ngram):
                msg[slot - 1] = sym
            for slot, sym in zip(int_slots, int_entry.ngram):
                msg[slot - 1] = sym
            messages.append(tuple(msg))
    return messages


def _salt(obs: Observation) -> int:
    """Content-derived value used to pick among equivalent tilings."""
    acc = obs.mask_slot
    for v in obs.window:
        acc = (acc * 1000003 + (v + 7)) % (2**31)
    return acc


def encode(lex: LexiconSpec, policy, obs: Observation) -> tuple[int, ...]:
    """Deterministically express an observation under a planted lexicon.

    Boundary kinds use their dedicated message when one exists; otherwise
    the first policy offset whose (offset, visible integer) pair is
    expressible wins.  Raises :class:`CoverageError` when nothing applies.
    """
    order = check_policy(policy) if policy is not None else lex.policy
    if obs.kind is not ObservationKind.MIDDLE:
        msg = lex.kind_message(obs.kind)
        if msg is not None:
            return msg
    named = obs.named_visible()
    for off in order:
        if off not in named:
            continue
        integer = named[off]
        msg = _express(lex, off, integer, obs)
        if msg is not None:
            return msg
    raise CoverageError(
        f"observation {obs.window} not expressible under the lexicon"
    )


def _express(lex: LexiconSpec, off: int, integer: int, obs: Observation):
    msg = lex._ncint_to_msg.get((off, integer))
    if msg is not None:
        return msg
    if off not in lex.allowed_offsets(integer):
        return None
    tilings = []
    for pos_entry in lex._pos_by_offset.get(off, ()):
        for int_entry in lex._int_by_integer.get(integer, ()):
            tilings.extend(_tilings(pos_entry, int_entry))
    if not tilings:
        return None
    return tilings[_salt(obs) % len(tilings)]


def _locate(seq, off: int, integer: int, candidates) -> int | None:
    """Invert an (offset, integer) reference against a concrete sequence."""
    values = seq.values if hasattr(seq, "values") else tuple(seq)
    try:
        ref_index = values.index(integer)
    except ValueError:
        return None
    target_index = ref_index - off
    if not 0 <= target_index < len(values):
        return None
    target_value = values[target_index]
    try:
        return list(candidates).index(target_value)
    except ValueError:
        return None


def oracle_decode(lex: LexiconSpec, message, seq, candidates) -> int | None:
    """Ground-truth receiver: invert the lexicon, locate the reference.

    Returns the 0-based candidate index, or ``None`` (abstain) for unknown
    or ambiguous messages and references that do not resolve.
    """
    msg = tuple(message)
    if len(msg) != MESSAGE_LEN:
        return None
    kind = lex._msg_to_kind.get(msg)
    if kind is not None:
        target_index = kind_target_index(kind, lex.num_points)
        values = seq.values if hasattr(seq, "values") else tuple(seq)
        try:
            return list(candidates).index(values[target_index])
        except ValueError:
            return None
    meaning = lex._msg_to_ncint.get(msg)
    if meaning is not None:
        off, integer = meaning
        return _locate(seq, off, integer, candidates)
    # Compositional route: every (positional, integer) component pair that
    # tiles this exact message proposes a target; accept a unique proposal.
    proposals = set()
    for integer, int_entries in lex._int_by_integer.items():
        for int_entry in int_entries:
            for int_slots in int_entry.placements():
                if any(msg[s - 1] != sym for s, sym in zip(int_slots, int_entry.ngram)):
                    continue
                rest = tuple(s for s in ALL_SLOTS if s not in int_slots)
                for off, pos_entries in lex._pos_by_offset.items():
                    for pos_entry in pos_entries:
                        for pos_slots in pos_entry.placements():
                            if pos_slots != rest:
                                continue
                            if any(
                                msg[s - 1] != sym
                                for s, sym in zip(pos_slots, pos_entry.ngram)
                            ):
                                continue
                            found = _locate(seq, off, integer, candidates)
                            if found is not None:
                                proposals.add(found)
    if len(proposals) == 1:
        return proposals.pop()
    return None


def mark_corpus(
    lex: LexiconSpec,
    corpus: Corpus,
    policy=None,
    uncovered: str = "error",
    noise: float = 0.0,
    seed: int = 0,
) -> Corpus:
    """Fill every record's message deterministically from the lexicon.

    ``uncovered`` picks what happens when an observation is inexpressible:
    ``"error"`` raises with the record index, ``"drop"`` omits the record,
    ``"resample"`` redraws a fresh episode (bounded retries) so the corpus
    keeps its size.  ``noise`` flips each symbol to a random other symbol
    with the given probability.
    """
    if uncovered not in ("error", "drop", "resample"):
        raise ConfigError(f"unknown uncovered mode {uncovered!r}")
    if not 0.0 <= noise < 1.0:
        raise ConfigError(f"noise={noise} outside [0, 1)")
    if lex.num_points != corpus.config.num_points:
        raise ConfigError("lexicon and corpus disagree on num_points")
    children = np.random.SeedSequence(seed).spawn(len(corpus.records))
    out: list[EpisodeRecord] = []
    for index, record in enumerate(corpus.records):
        rng = as_rng(children[index])
        try:
            msg = encode(lex, policy, record_observation(record))
        except CoverageError:
            if uncovered == "error":
                raise CoverageError(
                    f"record {index}: observation {record.obs} not expressible"
                ) from None
            if uncovered == "drop":
                continue
            record, msg = _resample(lex, policy, corpus.config, rng)
        if noise > 0.0:
            msg = tuple(
                int((sym + 1 + rng.integers(0, lex.vocab_size - 1)) % lex.vocab_size)
                if rng.random() < noise
                else sym
                for sym in msg
            )
        out.append(record.with_message(msg))
    return Corpus(records=out, config=corpus.config, split_name=corpus.split_name)


def _resample(lex, policy, config, rng, max_tries: int = 1000):
    for _ in range(max_tries):
        record = make_episode(rng, config)
        try:
            return record, encode(lex, policy, record_observation(record))
        except CoverageError:
            continue
    raise CoverageError(f"no expressible episode found in {max_tries} tries")


# -- seeded lexicon generators -----------------------------------------


def _distinct_triples(rng, pool: list[int], count: int) -> list[tuple[int, ...]]:
    if len(pool) ** 3 < count * 4:
        raise ConfigError("alphabet too small for the requested lexicon")
    seen: set[tuple[int, ...]] = set()
    triples = []
    while len(triples) < count:
        triple = tuple(int(pool[i]) for i in rng.integers(0, len(pool), size=3))
        if triple in seen:
            continue
        seen.add(triple)
        triples.append(triple)
    return triples


def make_nc_lexicon(
    seed,
    num_points: int = 60,
    vocab_size: int = 26,
    offsets: tuple[int, ...] = (-1,),
) -> LexiconSpec:
    """Non-compositional language: kind messages plus one full message per
    (offset, integer) pair.

    Three kind messages repeat a symbol reserved for them alone; the
    begin+1 message shares the begin symbol but leads with a pooled symbol,
    so reserved-character detection has both a positive and a negative case.
    """
    rng = as_rng(seed)
    if vocab_size < 8:
        raise ConfigError("nc lexicon needs a vocab of at least 8")
    order = [int(s) for s in rng.permutation(vocab_size)]
    r_begin, r_end, r_end_minus_1 = order[:3]
    pool = order[3:]
    entries = [
        LexEntry("nc_positional", ObservationKind.BEGIN, (r_begin,) * 3, ALL_SLOTS),
        LexEntry(
            "nc_positional",
            ObservationKind.BEGIN_PLUS_1,
            (pool[0], r_begin, r_begin),
            ALL_SLOTS,
        ),
        LexEntry("nc_positional", ObservationKind.END, (r_end,) * 3, ALL_SLOTS),
        LexEntry(
            "nc_positional",
            ObservationKind.END_MINUS_1,
            (r_end_minus_1,) * 3,
            ALL_SLOTS,
        ),
    ]
    triples = _distinct_triples(rng, pool, len(offsets) * num_points)
    for i, off in enumerate(offsets):
        for integer in range(num_points):
            entries.append(
                LexEntry(
                    "nc_integer",
                    (off, integer),
                    triples[i * num_points + integer],
                    ALL_SLOTS,
                )
            )
    return LexiconSpec(
        entries=entries,
        num_points=num_points,
        vocab_size=vocab_size,
        seed=seed if isinstance(seed, int) else None,
    )


def make_comp_lexicon(
    seed,
    num_points: int = 60,
    vocab_size: int = 26,
    with_kinds: bool = True,
    variant: bool = True,
    collide: bool = False,
    polysemous: int = 0,
) -> LexiconSpec:
    """Compositional language: positional unigrams plus integer bigrams.

    ``variant=True`` splits the integers over two message shapes
    ([pos, i1, i2] and [i1, i2, pos]) with slot-constrained n-grams; every
    integer is gated to two of the four offsets so all offsets stay in
    use.  ``collide=True`` additionally reuses the same bigram values in
    both shapes, so one bigram means different integers at different
    slots.  ``variant=False`` builds position-invariant n-grams instead.
    ``polysemous`` merges that many integer pairs onto shared bigrams.
    """
    rng = as_rng(seed)
    need = 4 + 4 + 3 + 10 + (4 if with_kinds else 0)
    if vocab_size - 1 < need:
        raise ConfigError(f"comp lexicon needs vocab_size >= {need + 1}")
    # Symbol 0 stays out of every pool: ablation tests replace positional
    # components with 0 and nothing may collide with that.
    order = [int(s) for s in rng.permutation(vocab_size - 1) + 1]
    pos_a = order[0:4]
    pos_b = order[4:8]
    int_first = order[8:11]
    int_second = order[11:21]
    kind_syms = order[21:25]

    entries: list[LexEntry] = []
    if with_kinds:
        for sym, kind in zip(kind_syms, (
            ObservationKind.BEGIN,
            ObservationKind.BEGIN_PLUS_1,
            ObservationKind.END,
            ObservationKind.END_MINUS_1,
        )):
            entries.append(LexEntry("nc_positional", kind, (sym,) * 3, ALL_SLOTS))

    offsets = list(NAMED_OFFSETS)
    if variant:
        for i, off in enumerate(offsets):
            entries.append(LexEntry("comp_positional", off, (pos_a[i],), (1,)))
            entries.append(LexEntry("comp_positional", off, (pos_b[i],), (3,)))
    else:
        for i, off in enumerate(offsets):
            entries.append(LexEntry("comp_positional", off, (pos_a[i],), None))

    ints_order = [int(v) for v in rng.permutation(num_points)]
    half = (num_points + 1) // 2
    gate: dict[int, tuple[int, ...]] = {}
    int_entries: dict[int, LexEntry] = {}
    for rank, integer in enumerate(ints_order):
        shape_a = rank < half
        j = rank if shape_a else rank - half
        first = int_first[j % 3]
        second = int_second[(j // 3) % 10]
        if not shape_a and not collide:
            first, second = second, first
        bigram = (first, second)
        if variant:
            slots = (2, 3) if shape_a else (1, 2)
        else:
            slots = None
        entry = LexEntry("comp_integer", integer, bigram, slots)
        entries.append(entry)
        int_entries[integer] = entry
        gate[integer] = (offsets[j % 4], offsets[(j + 1) % 4])

    for i in range(polysemous):
        v, w = ints_order[2 * i], ints_order[2 * i + 1]
        donor = int_entries[v]
        entries = [
            e if not (e.family == "comp_integer" and e.meaning == w)
            else LexEntry("comp_integer", w, donor.ngram, donor.slots)
            for e in entries
        ]
        gate[w] = gate[v]

    return LexiconSpec(
        entries=entries,
        num_points=num_points,
        vocab_size=vocab_size,
        offset_gate=gate,
        seed=seed if isinstance(seed, int) else None,
    )
