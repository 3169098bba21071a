"""NPMI measure, probability estimation, and association priors.

NPMI normalizes pointwise mutual information by the joint self-information:

    npmi(j, a, b) = log2(j / (a * b)) / -log2(j)

1 means the events always co-occur, 0 independence, -1 never co-occur.
When a marginal comes from a static prior instead of the same empirical
counts, values can leave [-1, 1]; that is expected and tolerated
downstream.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .env import ObservationKind
from .errors import ConfigError, ValidationError

#: Static observation-kind probabilities offered as an alternative to the
#: empirical ones (middle dominates heavily in long sequences).
STATIC_KIND_PROBS = {
    ObservationKind.BEGIN: 0.005,
    ObservationKind.BEGIN_PLUS_1: 0.005,
    ObservationKind.MIDDLE: 0.98,
    ObservationKind.END_MINUS_1: 0.005,
    ObservationKind.END: 0.005,
}


def npmi(p_joint: float, p_a: float, p_b: float) -> float | None:
    """Normalized pointwise mutual information of two events.

    Returns ``None`` when the joint probability is zero: such a pair is
    never a candidate association (callers only score observed pairs).
    A joint probability of exactly 1 is defined as +1 when both marginals
    are 1 and is rejected as degenerate otherwise.
    """
    for name, p in (("p_joint", p_joint), ("p_a", p_a), ("p_b", p_b)):
        if p < 0:
            raise ValidationError(f"{name}={p} is negative")
    if p_joint == 0.0:
        return None
    if p_a == 0.0 or p_b == 0.0:
        raise ValidationError("marginal probability is zero for an observed pair")
    if p_joint >= 1.0:
        if p_joint == 1.0 and p_a == 1.0 and p_b == 1.0:
            return 1.0
        raise ValidationError(
            f"degenerate joint probability {p_joint} with marginals {p_a}, {p_b}"
        )
    pmi = math.log2(p_joint / (p_a * p_b))
    return pmi / -math.log2(p_joint)


def estimate_probability(count: int, total: int) -> float:
    """Plain relative frequency count/total."""
    if total <= 0:
        raise ValidationError(f"total must be positive, got {total}")
    if count < 0:
        raise ValidationError(f"count must be nonnegative, got {count}")
    return count / total


def integer_prior(top_n: int, num_points: int = 60, visible: int = 4) -> float:
    """Prior that a tracked integer meaning shows up in an observation.

    For a single meaning the prior is statically 1/num_points.  For a
    polysemous meaning set of size ``top_n`` it is the probability that at
    least one of ``top_n`` specific integers lands among the ``visible``
    cells drawn from ``num_points`` (the masked target excluded):

        (C(N, v) - C(N - top_n, v)) / C(N, v)
    """
    if not 1 <= top_n <= num_points:
        raise ConfigError(f"top_n={top_n} outside 1..{num_points}")
    if top_n == 1:
        return 1.0 / num_points
    total = math.comb(num_points, visible)
    missing = math.comb(num_points - top_n, visible)
    return (total - missing) / total


def kind_prior(records: Iterable) -> dict[ObservationKind, float]:
    """Empirical observation-kind frequencies over a corpus."""
    records = getattr(records, "records", records)
    counts = Counter(r.obs_kind for r in records)
    total = sum(counts.values())
    if total == 0:
        raise ValidationError("corpus is empty")
    return {kind: counts[kind] / total for kind in ObservationKind if counts[kind]}


@dataclass(slots=True)
class CountTable:
    """Occurrence counts backing every NPMI computation.

    Subjects are (symbols, slot) pairs where ``slot`` is a 1-based message
    position or ``None`` for position-invariant totals.  Contexts are typed
    tuples such as ("kind", "begin"), ("int_at", offset, value),
    ("int", value), or ("ref", offset).  Tables are mergeable monoids so
    counting can shard by record ranges.
    """

    ngram_counts: Counter = field(default_factory=Counter)
    context_counts: Counter = field(default_factory=Counter)
    joint_counts: Counter = field(default_factory=Counter)
    total: int = 0

    def merge(self, other: "CountTable") -> "CountTable":
        merged = CountTable(
            ngram_counts=self.ngram_counts + other.ngram_counts,
            context_counts=self.context_counts + other.context_counts,
            joint_counts=self.joint_counts + other.joint_counts,
            total=self.total + other.total,
        )
        return merged

    __add__ = merge

    def slot_conservation_errors(self) -> list[Hashable]:
        """Subjects whose per-slot counts do not sum to their ANY-slot count."""
        sums: Counter = Counter()
        for (symbols, slot), count in self.ngram_counts.items():
            if slot is not None:
                sums[symbols] += count
        bad = []
        for (symbols, slot), count in self.ngram_counts.items():
            if slot is None and sums.get(symbols, 0) != count:
                bad.append(symbols)
        return bad
