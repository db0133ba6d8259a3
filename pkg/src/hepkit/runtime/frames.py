"""Sensor frame model and the frame source contract.

A frame is one sample of everything the perception stack can report:
joint angles, hand positions, object positions with grasp state, and a
per-channel validity map.  A channel missing from the validity map is
valid; an explicit ``False`` marks sensor dropout for that frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence, runtime_checkable

from hepkit.dsl import Step

Vec3 = tuple[float, float, float]


def joint_channel(joint: str) -> str:
    return f"joint:{joint}"


def hand_channel(side: str) -> str:
    return f"hand:{side}"


def object_channel(obj: str) -> str:
    return f"object:{obj}"


def distance(a: Vec3, b: Vec3) -> float:
    return (
        (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2
    ) ** 0.5


@dataclass(frozen=True)
class ObjectState:
    position: Vec3
    held_by: str = "none"  # none | left | right


@dataclass(frozen=True)
class PoseFrame:
    ts: float
    joints: Mapping[str, float] = field(default_factory=dict)
    hands: Mapping[str, Vec3] = field(default_factory=dict)
    objects: Mapping[str, ObjectState] = field(default_factory=dict)
    validity: Mapping[str, bool] = field(default_factory=dict)

    def is_valid(self, channel: str) -> bool:
        return self.validity.get(channel, True)


@runtime_checkable
class FrameSource(Protocol):
    """Anything that can feed a session with time-ordered frames."""

    def frames_until(self, t: float) -> Sequence[PoseFrame]:
        """Return (and consume) all frames with timestamp ≤ t."""
        ...

    def on_step_start(self, step: Step, announced_at: float) -> None:
        """Hear that a step was just announced."""
        ...

    def end_time(self) -> float:
        """Last instant this source can cover."""
        ...


class ListFrameSource:
    """A frame source backed by a prebuilt, time-ordered frame list."""

    def __init__(self, frames: Sequence[PoseFrame], horizon: float | None = None):
        self._frames = sorted(frames, key=lambda f: f.ts)
        for earlier, later in zip(self._frames, self._frames[1:]):
            if later.ts <= earlier.ts:
                raise ValueError("frame timestamps must be strictly increasing")
        self._cursor = 0
        self._horizon = horizon if horizon is not None else (
            self._frames[-1].ts if self._frames else 0.0
        )

    def frames_until(self, t: float) -> Sequence[PoseFrame]:
        start = self._cursor
        while self._cursor < len(self._frames) and self._frames[self._cursor].ts <= t:
            self._cursor += 1
        return self._frames[start : self._cursor]

    def on_step_start(self, step: Step, announced_at: float) -> None:
        pass

    def end_time(self) -> float:
        return self._horizon
