"""Detection of monitoring logic a prescription never asked for.

A program may only watch joints, objects, and targets the prescription
mentions, and may only compare against numbers the prescription supplies
(within tolerance) or the documented defaults.  Anything else is a
hallucinated monitor and gets reported with the offending symbol or
quantity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from hepkit.dsl import (
    All,
    Any,
    Count,
    Grasp,
    HandAt,
    Hold,
    JointAngle,
    ObjectAt,
    Predicate,
    Program,
    Release,
    Rest,
    fmt_predicate,
)
from hepkit.genpipe.generate import (
    DEFAULT_BAND_DEG,
    DEFAULT_HOLD_S,
    DEFAULT_RADIUS_CM,
    DEFAULT_REST_S,
)
from hepkit.genpipe.prescription import Prescription

SYMBOL_NOT_PRESCRIBED = "SYMBOL_NOT_PRESCRIBED"
THRESHOLD_UNPRESCRIBED = "THRESHOLD_UNPRESCRIBED"

THRESHOLD_TOLERANCE = 0.10

_CM_PER_INCH = 2.54

# Unit spellings mapped onto comparison classes.
_UNIT_CLASSES = {
    "deg": ("deg", 1.0),
    "degree": ("deg", 1.0),
    "degrees": ("deg", 1.0),
    "cm": ("cm", 1.0),
    "centimeter": ("cm", 1.0),
    "centimeters": ("cm", 1.0),
    "in": ("cm", _CM_PER_INCH),
    "inch": ("cm", _CM_PER_INCH),
    "inches": ("cm", _CM_PER_INCH),
    "s": ("s", 1.0),
    "sec": ("s", 1.0),
    "second": ("s", 1.0),
    "seconds": ("s", 1.0),
    "rep": ("reps", 1.0),
    "reps": ("reps", 1.0),
    "times": ("reps", 1.0),
    "repetitions": ("reps", 1.0),
}

# Default numerics per atom slot; values here never need prescribing.
_SLOT_DEFAULTS = {
    "band": set(DEFAULT_BAND_DEG),
    "radius": {DEFAULT_RADIUS_CM},
    "rest": {DEFAULT_REST_S},
    "hold": {DEFAULT_HOLD_S},
    "count": set(),
}

_SLOT_CLASSES = {
    "band": "deg",
    "radius": "cm",
    "rest": "s",
    "hold": "s",
    "count": "reps",
}


@dataclass(frozen=True)
class HallucinationFinding:
    step_index: int
    atom: str
    symbol: str | None
    reason: str
    quantity: float | None = None


def _iter_atoms(pred: Predicate) -> Iterator[Predicate]:
    if isinstance(pred, (All, Any)):
        for item in pred.items:
            yield from _iter_atoms(item)
    elif isinstance(pred, (Hold, Count)):
        yield pred
        yield from _iter_atoms(pred.atom)
    else:
        yield pred


def _prescribed_quantities(rx: Prescription) -> dict[str, list[float]]:
    by_class: dict[str, list[float]] = {}
    for threshold in rx.thresholds():
        entry = _UNIT_CLASSES.get(threshold.unit.lower())
        if entry is None:
            continue
        cls, scale = entry
        by_class.setdefault(cls, []).append(threshold.quantity * scale)
    return by_class


def _quantity_ok(
    value: float, slot: str, prescribed: dict[str, list[float]]
) -> bool:
    if value in _SLOT_DEFAULTS[slot]:
        return True
    for quantity in prescribed.get(_SLOT_CLASSES[slot], ()):
        if abs(value - quantity) <= THRESHOLD_TOLERANCE * abs(quantity):
            return True
    return False


def detect_hallucinated_monitors(
    rx: Prescription, program: Program
) -> list[HallucinationFinding]:
    """Check every monitor atom against the prescription vocabulary.

    A symbol finding on an atom suppresses threshold findings for that
    same atom: an unprescribed joint's band is redundant evidence.
    """
    vocabulary = rx.vocabulary()
    prescribed = _prescribed_quantities(rx)
    findings: list[HallucinationFinding] = []

    def check_atom(step_index: int, atom: Predicate) -> None:
        symbols: list[str] = []
        numerics: list[tuple[float, str]] = []
        if isinstance(atom, JointAngle):
            symbols = [atom.joint]
            numerics = [(atom.min_deg, "band"), (atom.max_deg, "band")]
        elif isinstance(atom, HandAt):
            symbols = [atom.target]
            numerics = [(atom.radius_cm, "radius")]
        elif isinstance(atom, Grasp):
            symbols = [atom.obj]
        elif isinstance(atom, Release):
            symbols = [atom.obj]
        elif isinstance(atom, ObjectAt):
            symbols = [atom.obj, atom.target]
            numerics = [(atom.radius_cm, "radius")]
        elif isinstance(atom, Rest):
            symbols = [atom.joint]
            numerics = [(atom.seconds, "rest")]
        elif isinstance(atom, Hold):
            numerics = [(atom.seconds, "hold")]
        elif isinstance(atom, Count):
            numerics = [(float(atom.times), "count")]

        missing = [s for s in symbols if s not in vocabulary]
        if missing:
            for symbol in missing:
                findings.append(
                    HallucinationFinding(
                        step_index=step_index,
                        atom=fmt_predicate(atom),
                        symbol=symbol,
                        reason=SYMBOL_NOT_PRESCRIBED,
                    )
                )
            return
        for value, slot in numerics:
            if not _quantity_ok(value, slot, prescribed):
                findings.append(
                    HallucinationFinding(
                        step_index=step_index,
                        atom=fmt_predicate(atom),
                        symbol=None,
                        reason=THRESHOLD_UNPRESCRIBED,
                        quantity=value,
                    )
                )

    for step in program.steps:
        monitors = []
        if step.monitor is not None:
            monitors.append(step.monitor)
        if step.fallback is not None:
            monitors.append(step.fallback.monitor)
        for monitor in monitors:
            for atom in _iter_atoms(monitor):
                check_atom(step.index, atom)
    return findings
