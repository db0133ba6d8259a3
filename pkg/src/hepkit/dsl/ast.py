"""AST node types for monitored exercise programs.

All nodes are immutable dataclasses with structural equality, so parser
round-trip tests can compare whole programs directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field


#: Joint identifiers the runtime knows how to track, one set per side.
CANONICAL_JOINTS: tuple[str, ...] = tuple(
    f"{side}_{name}"
    for side in ("left", "right")
    for name in (
        "shoulder_abduction",
        "shoulder_flexion",
        "elbow_flexion",
        "forearm_rotation",
        "wrist_flexion",
        "finger_spread",
        "thumb_opposition",
    )
)

SCENE_KINDS = ("target", "object", "joint")

#: Maximum nesting depth of a monitor predicate (a bare atom has depth 1).
MAX_PREDICATE_DEPTH = 4


@dataclass(frozen=True)
class SceneDecl:
    kind: str  # "target" | "object" | "joint"
    ident: str
    position: tuple[float, float, float] | None = None  # centimeters


@dataclass(frozen=True)
class JointAngle:
    joint: str
    min_deg: float
    max_deg: float


@dataclass(frozen=True)
class HandAt:
    target: str
    radius_cm: float


@dataclass(frozen=True)
class Grasp:
    obj: str


@dataclass(frozen=True)
class Release:
    obj: str


@dataclass(frozen=True)
class ObjectAt:
    obj: str
    target: str
    radius_cm: float


@dataclass(frozen=True)
class Rest:
    joint: str
    seconds: float


Atom = JointAngle | HandAt | Grasp | Release | ObjectAt | Rest


@dataclass(frozen=True)
class All:
    items: tuple["Predicate", ...]


@dataclass(frozen=True)
class Any:
    items: tuple["Predicate", ...]


@dataclass(frozen=True)
class Hold:
    atom: Atom
    seconds: float


@dataclass(frozen=True)
class Count:
    atom: Atom
    times: int


Predicate = Atom | All | Any | Hold | Count


@dataclass(frozen=True)
class Fallback:
    utterance: str
    monitor: Predicate
    timeout: float


@dataclass(frozen=True)
class Step:
    index: int
    utterance: str
    monitor: Predicate | None = None
    timeout: float | None = None  # required iff monitor is present
    fallback: Fallback | None = None


@dataclass(frozen=True)
class Program:
    name: str
    scene: tuple[SceneDecl, ...] = field(default_factory=tuple)
    steps: tuple[Step, ...] = field(default_factory=tuple)


def predicate_depth(pred: Predicate) -> int:
    if isinstance(pred, (All, Any)):
        return 1 + max(predicate_depth(p) for p in pred.items)
    if isinstance(pred, (Hold, Count)):
        return 2
    return 1


def iter_atoms(pred: Predicate):
    """Yield every atom in a predicate tree, left to right."""
    if isinstance(pred, (All, Any)):
        for item in pred.items:
            yield from iter_atoms(item)
    elif isinstance(pred, (Hold, Count)):
        yield pred.atom
    else:
        yield pred
