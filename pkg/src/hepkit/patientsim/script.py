"""Per-step behavior scripts and pre-labeled behavior mixes."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Union


class ScriptError(ValueError):
    """A behavior script entry is malformed or missing."""


@dataclass(frozen=True)
class CompleteAt:
    """Truly complete the step this many seconds after its announcement."""

    offset_s: float

    def __post_init__(self) -> None:
        if self.offset_s < 0:
            raise ScriptError(f"offset must be nonnegative, got {self.offset_s}")


@dataclass(frozen=True)
class NoAttempt:
    """Ignore the instruction entirely."""


@dataclass(frozen=True)
class PartialAttempt:
    """Approach the goal but stop short of ever satisfying it."""

    fraction: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 < self.fraction < 1.0:
            raise ScriptError(f"fraction must be in (0, 1), got {self.fraction}")


Behavior = Union[CompleteAt, NoAttempt, PartialAttempt]

PRELABEL_COMPLETE = "complete"
PRELABEL_INCOMPLETE = "incomplete"


def behavior_to_json(b: Behavior) -> dict:
    if isinstance(b, CompleteAt):
        return {"kind": "complete_at", "offset_s": b.offset_s}
    if isinstance(b, NoAttempt):
        return {"kind": "no_attempt"}
    return {"kind": "partial_attempt", "fraction": b.fraction}


def behavior_from_json(doc: Mapping[str, object]) -> Behavior:
    kind = doc.get("kind")
    if kind == "complete_at":
        return CompleteAt(float(doc["offset_s"]))
    if kind == "no_attempt":
        return NoAttempt()
    if kind == "partial_attempt":
        return PartialAttempt(float(doc.get("fraction", 0.25)))
    raise ScriptError(f"unknown behavior kind {kind!r}")


def prelabel_of(b: Behavior) -> str:
    return PRELABEL_COMPLETE if isinstance(b, CompleteAt) else PRELABEL_INCOMPLETE


def make_prelabel_mix(
    n_steps: int,
    incomplete_fraction: float,
    seed: int,
    offset_range: tuple[float, float] = (2.0, 8.0),
) -> tuple[list[Behavior], list[str]]:
    """Draw a deterministic behavior list with a known incomplete share.

    Exactly ``round(n_steps * incomplete_fraction)`` entries are left
    incomplete, split as evenly as possible between NoAttempt and
    PartialAttempt; the rest complete at offsets uniform in
    ``offset_range``.  Returns the behaviors and their pre-labels.
    """
    if n_steps < 1:
        raise ScriptError("n_steps must be at least 1")
    if not 0.0 <= incomplete_fraction <= 1.0:
        raise ScriptError("incomplete_fraction must be within [0, 1]")
    rng = random.Random(seed)
    n_incomplete = round(n_steps * incomplete_fraction)
    chosen = rng.sample(range(n_steps), n_incomplete)
    half = (n_incomplete + 1) // 2
    no_attempt = set(chosen[:half])
    partial = set(chosen[half:])
    behaviors: list[Behavior] = []
    for i in range(n_steps):
        if i in no_attempt:
            behaviors.append(NoAttempt())
        elif i in partial:
            behaviors.append(PartialAttempt())
        else:
            behaviors.append(CompleteAt(rng.uniform(*offset_range)))
    return behaviors, [prelabel_of(b) for b in behaviors]
