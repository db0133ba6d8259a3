"""Patient kinematic profiles.

A profile pins the range of motion per joint, an overall movement speed
scale, and which side is being exercised.  The standard profile models a
right-hemiparetic patient whose elbow is held by a hinged brace and
whose strength grades 3 of 5 on manual muscle testing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from hepkit.dsl.ast import CANONICAL_JOINTS


class ProfileError(ValueError):
    """A profile field is out of its legal range."""


_BASE_ROM = {
    "shoulder_abduction": (0.0, 170.0),
    "shoulder_flexion": (0.0, 170.0),
    "elbow_flexion": (0.0, 150.0),
    "forearm_rotation": (0.0, 160.0),
    "wrist_flexion": (0.0, 140.0),
    "finger_spread": (0.0, 40.0),
    "thumb_opposition": (0.0, 60.0),
}

DEFAULT_ROM: dict[str, tuple[float, float]] = {
    f"{side}_{joint}": band
    for side in ("left", "right")
    for joint, band in _BASE_ROM.items()
}

REST_ANGLE_DEG = 10.0


def mrc_speed_scale(grade: int) -> float:
    """Map a manual muscle testing grade (1..5) onto a speed scale.

    The mapping is linear: grade 5 moves at full speed, grade 3 at 0.6.
    Grade 0 means no movement at all, which a speed scale cannot express.
    """
    if not 1 <= grade <= 5:
        raise ProfileError(f"MRC grade must be 1..5, got {grade}")
    return grade / 5.0


@dataclass(frozen=True)
class PatientProfile:
    rom_limits: Mapping[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_ROM)
    )
    movement_speed_scale: float = 1.0
    affected_side: str = "right"

    def __post_init__(self) -> None:
        if not 0.0 < self.movement_speed_scale <= 1.0:
            raise ProfileError(
                f"movement_speed_scale must be in (0, 1], "
                f"got {self.movement_speed_scale}"
            )
        if self.affected_side not in ("left", "right"):
            raise ProfileError(f"affected_side must be left or right")
        for joint, (lo, hi) in self.rom_limits.items():
            if joint not in CANONICAL_JOINTS:
                raise ProfileError(f"unknown joint {joint!r} in rom_limits")
            if not lo < hi:
                raise ProfileError(f"empty ROM for {joint}: ({lo}, {hi})")

    def rom(self, joint: str) -> tuple[float, float]:
        band = self.rom_limits.get(joint)
        if band is None:
            band = DEFAULT_ROM[joint]
        return band

    def clamp(self, joint: str, angle: float) -> float:
        lo, hi = self.rom(joint)
        return min(max(angle, lo), hi)

    def rest_angle(self, joint: str) -> float:
        return self.clamp(joint, REST_ANGLE_DEG)


def standard_patient() -> PatientProfile:
    """Right-hemiparetic profile: braced elbow, MRC 3/5 strength."""
    rom = dict(DEFAULT_ROM)
    rom["right_elbow_flexion"] = (80.0, 120.0)
    return PatientProfile(
        rom_limits=rom,
        movement_speed_scale=mrc_speed_scale(3),
        affected_side="right",
    )
