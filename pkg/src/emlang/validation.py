"""Input validation helpers shared by the public API."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ValidationError

RngLike = "int | np.random.SeedSequence | np.random.Generator"


def as_rng(seed) -> np.random.Generator:
    """Coerce an int seed, SeedSequence, or Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_permutation(values: Sequence[int], num_points: int) -> None:
    """Require ``values`` to be a permutation of 0..num_points-1."""
    if len(values) != num_points:
        raise ValidationError(
            f"expected {num_points} values, got {len(values)}"
        )
    if sorted(values) != list(range(num_points)):
        raise ValidationError("values are not a permutation of 0..N-1")


def check_index(index: int, size: int, what: str = "index") -> None:
    if not 0 <= index < size:
        raise IndexError(f"{what} {index} out of range [0, {size})")


def check_probability(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name}={p} is not a probability")


def check_message(message: Iterable[int], vocab_size: int, length: int = 3) -> None:
    msg = tuple(message)
    if len(msg) not in (0, length):
        raise ValidationError(f"message length must be 0 or {length}, got {len(msg)}")
    for sym in msg:
        if not 0 <= sym < vocab_size:
            raise ValidationError(f"message symbol {sym} outside 0..{vocab_size - 1}")


def positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
