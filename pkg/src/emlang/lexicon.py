"""Dictionary assembly from thresholded associations, plus rendering.

The extracted dictionary is the artifact's main human-facing output: a
typed table mapping full messages and n-grams to observation kinds,
integers, and referent positions.  Entries keep their meanings as a
rank-ordered list so a polysemy cap larger than one simply deepens an
entry instead of duplicating it; the (type, subject, slot) triple stays
unique.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from sklearn.base import BaseEstimator

from .analysis import AnalysisResult, ScoredAssociation
from .env import OFFSET_BY_NAME, offset_name
from .errors import ValidationError

FAMILIES = ("nc_positional", "nc_integer", "comp_positional", "comp_integer")

TYPE_TAGS = {
    "nc_positional": "NC-Positional",
    "nc_positional_reserved": "NC-Positional-Reserved",
    "nc_integer": "NC-Integer",
    "comp_positional": "Comp-Positional",
    "comp_integer": "Comp-Integer",
}

DISPLAY_NAMES = {
    "NC-Positional": "Non-Compositional Positional",
    "NC-Positional-Reserved": "Non-Compositional Positional Reserved",
    "NC-Integer": "Non-Compositional Integer",
    "Comp-Positional": "Compositional Positional",
    "Comp-Integer": "Compositional Integer",
}


@dataclass(frozen=True, slots=True)
class DictionaryEntry:
    """One subject with its rank-ordered meanings and their scores."""

    family: str
    subject: tuple[int, ...]
    slot: int | None
    meanings: tuple
    npmis: tuple[float, ...]
    reserved: bool = False

    @property
    def type_tag(self) -> str:
        if self.family == "nc_positional" and self.reserved:
            return TYPE_TAGS["nc_positional_reserved"]
        return TYPE_TAGS[self.family]

    @property
    def npmi(self) -> float:
        return max(self.npmis)


@dataclass(slots=True)
class Dictionary:
    """Typed lexicon extracted at one threshold setting."""

    entries: list[DictionaryEntry]
    thresholds: dict
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            key = (entry.family, entry.subject, entry.slot)
            if key in seen:
                raise ValidationError(f"duplicate dictionary entry {key}")
            seen.add(key)

    def by_family(self, family: str) -> list[DictionaryEntry]:
        return [e for e in self.entries if e.family == family]

    def size(self) -> int:
        """Total number of (subject, meaning) pairs across all entries."""
        return sum(len(e.meanings) for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    # -- serialization --------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "thresholds": self.thresholds,
            "source": self.source,
            "entries": [
                {
                    "type": e.type_tag,
                    "subject": list(e.subject),
                    "slot": "any" if e.slot is None else e.slot,
                    "meanings": [
                        {"meaning": _meaning_json(e.family, m), "npmi": s}
                        for m, s in zip(e.meanings, e.npmis)
                    ],
                    "npmi": e.npmi,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Dictionary":
        entries = []
        for raw in data["entries"]:
            family = _family_of_tag(raw["type"])
            meanings = tuple(
                _meaning_parse(family, item["meaning"]) for item in raw["meanings"]
            )
            npmis = tuple(item["npmi"] for item in raw["meanings"])
            entries.append(
                DictionaryEntry(
                    family=family,
                    subject=tuple(raw["subject"]),
                    slot=None if raw["slot"] == "any" else raw["slot"],
                    meanings=meanings,
                    npmis=npmis,
                    reserved=raw["type"].endswith("Reserved"),
                )
            )
        return cls(
            entries=entries,
            thresholds=data["thresholds"],
            source=data.get("source", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "Dictionary":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _meaning_json(family: str, meaning) -> object:
    if family == "nc_integer":
        off, integer = meaning
        return {"offset": offset_name(off), "integer": integer}
    if family == "comp_positional":
        return offset_name(meaning)
    return meaning


def _meaning_parse(family: str, raw) -> object:
    if family == "nc_integer":
        return (OFFSET_BY_NAME[raw["offset"]], raw["integer"])
    if family == "comp_positional":
        return OFFSET_BY_NAME[raw]
    return raw


def _family_of_tag(tag: str) -> str:
    for family, t in TYPE_TAGS.items():
        if t == tag:
            return "nc_positional" if family == "nc_positional_reserved" else family
    raise ValidationError(f"unknown entry type {tag!r}")


# -- extraction -------------------------------------------------------------


def _filter(assocs, t_c, t_n):
    return [
        a
        for a in assocs
        if a.npmi >= t_c and (a.rank is None or a.rank <= t_n)
    ]


def _group_by_subject(assocs):
    grouped: dict = defaultdict(list)
    for a in assocs:
        grouped[(a.subject, a.slot)].append(a)
    return grouped


def _slot_first_entries(
    assocs: list[ScoredAssociation], family: str, meaning_of, cap: int | None
) -> list[DictionaryEntry]:
    """Build entries preferring slot-specific rows; fall back to ANY-slot.

    A subject with any surviving position-variant row is treated as
    position-variant; its invariant row only speaks for subjects that
    never survived at a specific slot.
    """
    by_symbols: dict = defaultdict(lambda: defaultdict(list))
    for a in assocs:
        by_symbols[a.subject][a.slot].append(a)
    entries = []
    for symbols in sorted(by_symbols, key=lambda s: (len(s), s)):
        slots = by_symbols[symbols]
        slotted = sorted(s for s in slots if s is not None)
        targets = slotted if slotted else [None]
        for slot in targets:
            ranked = sorted(
                slots[slot], key=lambda a: (a.rank or 1, -a.npmi, str(a.context))
            )
            if cap is not None:
                ranked = ranked[:cap]
            entries.append(
                DictionaryEntry(
                    family=family,
                    subject=symbols,
                    slot=slot,
                    meanings=tuple(meaning_of(a) for a in ranked),
                    npmis=tuple(a.npmi for a in ranked),
                )
            )
    return entries


def extract_dictionary(
    result: AnalysisResult,
    t_c: float = 0.5,
    t_n: int = 1,
    t_c_referent: float = 0.3,
) -> Dictionary:
    """Apply thresholds per association family and classify the survivors.

    ``t_c`` governs message-level and n-gram/integer associations, ``t_n``
    caps how many integer meanings a subject keeps, ``t_c_referent``
    governs leftover/referent associations.  Reserved entries are detected
    by scanning full-message symbol usage.
    """
    entries: list[DictionaryEntry] = []

    # Whole messages naming observation kinds: best kind per message.
    by_msg: dict = defaultdict(list)
    for a in _filter(result.nc_positional, t_c, t_n=10**9):
        by_msg[a.subject].append(a)
    nc_positional_entries = []
    for msg in sorted(by_msg):
        best = max(by_msg[msg], key=lambda a: (a.npmi, a.context))
        nc_positional_entries.append(
            DictionaryEntry(
                family="nc_positional",
                subject=msg,
                slot=None,
                meanings=(best.context[1],),
                npmis=(best.npmi,),
            )
        )

    # Reserved flag: every symbol of the message occurs only inside
    # messages that are themselves kind-naming entries.
    kind_messages = {e.subject for e in nc_positional_entries}
    symbol_messages: dict = defaultdict(set)
    for msg in result.message_counts:
        for sym in set(msg):
            symbol_messages[sym].add(msg)
    for i, entry in enumerate(nc_positional_entries):
        reserved = all(
            symbol_messages[sym] <= kind_messages for sym in set(entry.subject)
        )
        if reserved:
            nc_positional_entries[i] = DictionaryEntry(
                family=entry.family,
                subject=entry.subject,
                slot=entry.slot,
                meanings=entry.meanings,
                npmis=entry.npmis,
                reserved=True,
            )
    entries.extend(nc_positional_entries)

    # Whole messages naming (integer, offset) pairs.
    by_msg = defaultdict(list)
    for a in _filter(result.nc_integer, t_c, t_n):
        by_msg[a.subject].append(a)
    for msg in sorted(by_msg):
        ranked = sorted(by_msg[msg], key=lambda a: a.rank or 1)
        entries.append(
            DictionaryEntry(
                family="nc_integer",
                subject=msg,
                slot=None,
                meanings=tuple((a.context[1], a.context[2]) for a in ranked),
                npmis=tuple(a.npmi for a in ranked),
            )
        )

    # Integer n-grams, position-variant rows first.
    entries.extend(
        _slot_first_entries(
            _filter(result.c_integer, t_c, t_n),
            "comp_integer",
            lambda a: a.context[1],
            cap=t_n,
        )
    )

    # Referent-position n-grams; one offset per subject/slot.
    entries.extend(
        _slot_first_entries(
            _filter(result.c_positional, t_c_referent, t_n=10**9),
            "comp_positional",
            lambda a: a.context[1],
            cap=1,
        )
    )

    return Dictionary(
        entries=entries,
        thresholds={"t_c": t_c, "t_n": t_n, "t_c_referent": t_c_referent},
        source={
            "total": result.total,
            "num_points": result.num_points,
            "priors": result.priors_meta,
        },
    )


class DictionaryExtractor(BaseEstimator):
    """Estimator-flavored wrapper: thresholds in, Dictionary out."""

    def __init__(self, t_c: float = 0.5, t_n: int = 1, t_c_referent: float = 0.3):
        self.t_c = t_c
        self.t_n = t_n
        self.t_c_referent = t_c_referent

    def fit(self, result: AnalysisResult, y=None):
        self.dictionary_ = extract_dictionary(
            result, self.t_c, self.t_n, self.t_c_referent
        )
        return self

    def transform(self, result: AnalysisResult) -> Dictionary:
        return extract_dictionary(result, self.t_c, self.t_n, self.t_c_referent)

    def fit_transform(self, result: AnalysisResult, y=None) -> Dictionary:
        return self.fit(result).dictionary_


# -- rendering ---------------------------------------------------------------


def _offset_phrase(off: int) -> str:
    magnitude = abs(off)
    side = "left" if off < 0 else "right"
    return f"{magnitude} {side} of target"


def _subject_cells(entry: DictionaryEntry) -> str:
    if entry.family.startswith("nc_"):
        return "[" + ", ".join(str(s) for s in entry.subject) + "]"
    if entry.slot is None:
        return "[" + ", ".join(str(s) for s in entry.subject) + "] (any slots)"
    cells = [f"m{i}" for i in (1, 2, 3)]
    for offset, sym in enumerate(entry.subject):
        cells[entry.slot - 1 + offset] = str(sym)
    return "[" + ", ".join(cells) + "]"


def _meaning_phrase(entry: DictionaryEntry) -> str:
    parts = []
    for meaning in entry.meanings:
        if entry.family == "nc_positional":
            parts.append(str(meaning))
        elif entry.family == "nc_integer":
            off, integer = meaning
            parts.append(f"{integer} is {_offset_phrase(off)}")
        elif entry.family == "comp_integer":
            parts.append(f"Integer {meaning}")
        else:
            parts.append(f"? is {_offset_phrase(meaning)}")
    return "; ".join(parts)


_TYPE_ORDER = {
    "NC-Positional": 0,
    "NC-Positional-Reserved": 0,
    "NC-Integer": 1,
    "Comp-Positional": 2,
    "Comp-Integer": 3,
}


def render_dictionary(dictionary: Dictionary) -> str:
    """Plain-text table: Message | Type | Meaning, deterministically sorted."""
    rows = [("Message", "Type", "Meaning")]
    ordered = sorted(
        dictionary.entries,
        key=lambda e: (_TYPE_ORDER[e.type_tag], e.subject, e.slot or 0),
    )
    for entry in ordered:
        rows.append(
            (
                _subject_cells(entry),
                DISPLAY_NAMES[entry.type_tag],
                _meaning_phrase(entry),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(3)]
    lines = []
    for i, row in enumerate(rows):
        lines.append(" | ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- coverage / emergence summaries -------------------------------------------


def _entry_matches(entry: DictionaryEntry, message: tuple[int, ...]) -> bool:
    if entry.family.startswith("nc_"):
        return entry.subject == message
    width = len(entry.subject)
    if entry.slot is not None:
        starts = [entry.slot]
    else:
        starts = range(1, 3 - width + 2)
    return any(
        message[start - 1 : start - 1 + width] == entry.subject for start in starts
    )


def attribute_messages(dictionary: Dictionary, message_counts: dict) -> dict:
    """Fraction of corpus messages each entry family accounts for.

    Full-message families take precedence over component families; a
    message may count for both compositional families at once.
    """
    totals = {family: 0 for family in FAMILIES}
    totals["nc_positional_reserved"] = 0
    grand_total = sum(message_counts.values())
    nc_pos = dictionary.by_family("nc_positional")
    nc_int = dictionary.by_family("nc_integer")
    comp_int = dictionary.by_family("comp_integer")
    comp_pos = dictionary.by_family("comp_positional")
    for message, count in message_counts.items():
        hit = next((e for e in nc_pos if e.subject == message), None)
        if hit is not None:
            totals["nc_positional"] += count
            if hit.reserved:
                totals["nc_positional_reserved"] += count
            continue
        if any(e.subject == message for e in nc_int):
            totals["nc_integer"] += count
            continue
        if any(_entry_matches(e, message) for e in comp_int):
            totals["comp_integer"] += count
        if any(_entry_matches(e, message) for e in comp_pos):
            totals["comp_positional"] += count
    if grand_total == 0:
        raise ValidationError("no messages to attribute")
    return {family: value / grand_total for family, value in totals.items()}


def summarize_emergence(runs: list[dict]) -> dict:
    """Emergence and coverage statistics across runs and threshold choices.

    Each run is ``{"dicts": {choice: Dictionary}, "message_counts": {...}}``
    where ``choice`` is any hashable threshold setting.  For every entry
    family the summary reports the share of runs in which the family
    emerged (averaged over choices, with min/max across choices) and,
    among emerged runs, the average share of corpus messages attributable
    to it.
    """
    if not runs:
        raise ValidationError("no runs to summarize")
    choices = sorted({choice for run in runs for choice in run["dicts"]})
    families = list(FAMILIES) + ["nc_positional_reserved"]
    per_family: dict = {
        family: {"emergence": [], "coverage": []} for family in families
    }
    for choice in choices:
        present: dict = {family: [] for family in families}
        coverage: dict = {family: [] for family in families}
        for run in runs:
            dictionary = run["dicts"].get(choice)
            if dictionary is None:
                continue
            shares = attribute_messages(dictionary, run["message_counts"])
            for family in families:
                if family == "nc_positional_reserved":
                    emerged = any(
                        e.reserved for e in dictionary.by_family("nc_positional")
                    )
                else:
                    emerged = bool(dictionary.by_family(family))
                present[family].append(emerged)
                if emerged:
                    coverage[family].append(shares[family])
        for family in families:
            if present[family]:
                per_family[family]["emergence"].append(
                    sum(present[family]) / len(present[family])
                )
            if coverage[family]:
                per_family[family]["coverage"].append(
                    sum(coverage[family]) / len(coverage[family])
                )
    summary = {}
    for family in families:
        emergence = per_family[family]["emergence"]
        coverage = per_family[family]["coverage"]
        summary[family] = {
            "emergence_avg": sum(emergence) / len(emergence) if emergence else 0.0,
            "emergence_min": min(emergence) if emergence else 0.0,
            "emergence_max": max(emergence) if emergence else 0.0,
            "coverage_avg": sum(coverage) / len(coverage) if coverage else 0.0,
            "coverage_min": min(coverage) if coverage else 0.0,
            "coverage_max": max(coverage) if coverage else 0.0,
        }
    return summary
