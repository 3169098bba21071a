"""Sequence environment: windows, observation kinds, candidates, offsets.

A game round draws a random permutation of 0..N-1, picks a target index,
and shows the sender a 5-wide window around the target with the target
masked by -1.  Windows near either end of the sequence are shifted inward
so they always contain 5 entries.  The receiver sees the full sequence
plus a candidate set of the target value and k distractors.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, ValidationError
from .validation import as_rng, check_index, check_permutation

WINDOW_LEN = 5
MASK = -1

#: Offsets that name a visible window cell relative to the masked target.
NAMED_OFFSETS = (-2, -1, 1, 2)
OFFSET_NAMES = {-2: "left2", -1: "left1", 1: "right1", 2: "right2"}
OFFSET_BY_NAME = {name: off for off, name in OFFSET_NAMES.items()}


class ObservationKind(str, Enum):
    """Position of the target inside its sequence, as visible to the sender."""

    BEGIN = "begin"
    BEGIN_PLUS_1 = "begin_plus_1"
    MIDDLE = "middle"
    END_MINUS_1 = "end_minus_1"
    END = "end"


BOUNDARY_KINDS = (
    ObservationKind.BEGIN,
    ObservationKind.BEGIN_PLUS_1,
    ObservationKind.END_MINUS_1,
    ObservationKind.END,
)


@dataclass(frozen=True, slots=True)
class Sequence:
    """A permutation of 0..num_points-1."""

    values: tuple[int, ...]
    num_points: int

    def __post_init__(self):
        check_permutation(self.values, self.num_points)

    def __len__(self) -> int:
        return self.num_points

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def index(self, value: int) -> int:
        return self.values.index(value)


@dataclass(frozen=True, slots=True)
class Observation:
    """A 5-wide window with the target replaced by -1.

    ``mask_slot`` is 1-based (1..5), matching how window cells are talked
    about externally; ``target_index`` is the 0-based position of the
    target in the source sequence.
    """

    window: tuple[int, ...]
    mask_slot: int
    target_index: int
    kind: ObservationKind

    def visible(self) -> list[tuple[int, int]]:
        """All (offset, value) pairs for the 4 visible cells.

        Offsets are window positions relative to the masked target and may
        exceed +/-2 for shifted windows.
        """
        mask_idx = self.mask_slot - 1
        return [
            (j - mask_idx, v)
            for j, v in enumerate(self.window)
            if j != mask_idx
        ]

    def named_visible(self) -> dict[int, int]:
        """Visible values keyed by named offset (left2..right2 only)."""
        return {off: v for off, v in self.visible() if off in NAMED_OFFSETS}


@dataclass(frozen=True, slots=True)
class CandidateSet:
    """Target value plus k distinct distractors, target position 0-based.

    The serialized form (see :mod:`emlang.corpus`) uses a 1-based position.
    """

    entries: tuple[int, ...]
    target_position: int

    @property
    def target_value(self) -> int:
        return self.entries[self.target_position]


def generate_sequence(seed, num_points: int) -> Sequence:
    """Draw a uniform random permutation of 0..num_points-1."""
    if num_points < WINDOW_LEN:
        raise ConfigError(
            f"num_points must be >= {WINDOW_LEN} so a window fits, got {num_points}"
        )
    rng = as_rng(seed)
    values = tuple(int(v) for v in rng.permutation(num_points))
    return Sequence(values, num_points)


def window_start(target_index: int, num_points: int) -> int:
    """First sequence index covered by the window around ``target_index``."""
    return min(max(target_index - 2, 0), num_points - WINDOW_LEN)


def classify_observation(target_index: int, num_points: int) -> ObservationKind:
    """Classify a target position into one of the five observation kinds."""
    check_index(target_index, num_points, "target_index")
    if target_index == 0:
        return ObservationKind.BEGIN
    if target_index == 1:
        return ObservationKind.BEGIN_PLUS_1
    if target_index == num_points - 1:
        return ObservationKind.END
    if target_index == num_points - 2:
        return ObservationKind.END_MINUS_1
    return ObservationKind.MIDDLE


def extract_window(seq, target_index: int) -> Observation:
    """Cut the 5-wide window around the target, masking the target with -1.

    The window covers indices [target_index-2, target_index+2] clamped by
    shifting: targets within two positions of either end keep a full-width
    window anchored at that end.
    """
    values = seq.values if isinstance(seq, Sequence) else tuple(seq)
    num_points = len(values)
    if num_points < WINDOW_LEN:
        raise ConfigError(f"sequence shorter than window ({num_points} < {WINDOW_LEN})")
    check_index(target_index, num_points, "target_index")
    start = window_start(target_index, num_points)
    window = list(values[start:start + WINDOW_LEN])
    window[target_index - start] = MASK
    return Observation(
        window=tuple(window),
        mask_slot=target_index - start + 1,
        target_index=target_index,
        kind=classify_observation(target_index, num_points),
    )


def build_candidates(seed, num_points: int, target_value: int, k: int) -> CandidateSet:
    """Sample k distinct distractors and insert the target at a random slot.

    Distractors are drawn uniformly from 0..num_points-1 excluding the
    target value; they need not appear in any particular sequence.
    """
    if k < 1:
        raise ConfigError(f"need at least one distractor, got k={k}")
    if k + 1 > num_points:
        raise ConfigError(f"k+1={k + 1} candidates exceed num_points={num_points}")
    check_index(target_value, num_points, "target_value")
    rng = as_rng(seed)
    pool = [v for v in range(num_points) if v != target_value]
    distractors = rng.choice(len(pool), size=k, replace=False)
    entries = [pool[i] for i in distractors]
    position = int(rng.integers(0, k + 1))
    entries.insert(position, target_value)
    return CandidateSet(entries=tuple(entries), target_position=position)


def relative_distance(p_coords, t_coords) -> tuple[int, ...]:
    """Component-wise offset of a reference point from a target point.

    Positive components mean the reference sits after (right of) the
    target along that dimension.
    """
    p = tuple(p_coords)
    t = tuple(t_coords)
    if len(p) != len(t):
        raise ValidationError(f"coordinate arity mismatch: {len(p)} vs {len(t)}")
    return tuple(x - y for x, y in zip(p, t))


def offset_name(offset: int) -> str:
    """Human-readable name for a named offset (left2..right2)."""
    try:
        return OFFSET_NAMES[offset]
    except KeyError:
        raise ValidationError(f"{offset} is not a named offset") from None
