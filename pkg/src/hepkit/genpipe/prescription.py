"""Structured exercise prescriptions.

A prescription is the clinician-facing artifact: ordered free-text steps
plus machine-checkable entity annotations.  The annotations are the ground
truth that fidelity and monitor-vocabulary checks run against, so loading
is strict about shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..dsl.ast import CANONICAL_JOINTS

GOAL_IDS = tuple(range(1, 11))


class PrescriptionError(ValueError):
    """Prescription document is malformed."""


@dataclass(frozen=True)
class Threshold:
    quantity: float
    unit: str  # "in", "cm", "deg", "s", "reps"


@dataclass(frozen=True)
class EntityAnnotation:
    joints: tuple[str, ...] = ()
    objects: tuple[str, ...] = ()
    targets: tuple[str, ...] = ()
    thresholds: tuple[Threshold, ...] = ()
    conditional: bool = False
    preparatory: bool = False
    #: Alternative body parts or movement routes the step offers, e.g. the
    #: unaffected arm or a trunk-rotation strategy.
    alternatives: tuple[str, ...] = ()
    #: Entity names that are deliberately outside the canonical vocabulary.
    novel: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not (self.joints or self.objects or self.targets)

    def symbols(self) -> frozenset[str]:
        return frozenset(self.joints) | frozenset(self.objects) | frozenset(self.targets)


@dataclass(frozen=True)
class PrescriptionStep:
    text: str
    entities: EntityAnnotation = field(default_factory=EntityAnnotation)


@dataclass(frozen=True)
class Prescription:
    id: str
    goal_id: int | str  # 1..10, or "custom"
    steps: tuple[PrescriptionStep, ...]
    author: str = ""

    def vocabulary(self) -> frozenset[str]:
        """Union of every step's entity symbols."""
        out: frozenset[str] = frozenset()
        for step in self.steps:
            out |= step.entities.symbols()
        return out

    def thresholds(self) -> tuple[Threshold, ...]:
        out: list[Threshold] = []
        for step in self.steps:
            out.extend(step.entities.thresholds)
        return tuple(out)


def _tuple_of_str(doc: Any, key: str, where: str) -> tuple[str, ...]:
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise PrescriptionError(f"{where}: '{key}' must be a list of strings")
    return tuple(value)


def annotation_from_json(doc: dict[str, Any], where: str = "step") -> EntityAnnotation:
    thresholds = []
    for t in doc.get("thresholds", []):
        try:
            thresholds.append(Threshold(quantity=float(t["quantity"]), unit=str(t["unit"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise PrescriptionError(f"{where}: bad threshold entry {t!r}") from exc
    ann = EntityAnnotation(
        joints=_tuple_of_str(doc, "joints", where),
        objects=_tuple_of_str(doc, "objects", where),
        targets=_tuple_of_str(doc, "targets", where),
        thresholds=tuple(thresholds),
        conditional=bool(doc.get("conditional", False)),
        preparatory=bool(doc.get("preparatory", False)),
        alternatives=_tuple_of_str(doc, "alternatives", where),
        novel=_tuple_of_str(doc, "novel", where),
    )
    for joint in ann.joints:
        if joint not in CANONICAL_JOINTS and joint not in ann.novel:
            raise PrescriptionError(
                f"{where}: joint '{joint}' is neither canonical nor marked novel")
    return ann


def annotation_to_json(ann: EntityAnnotation) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    if ann.joints:
        doc["joints"] = list(ann.joints)
    if ann.objects:
        doc["objects"] = list(ann.objects)
    if ann.targets:
        doc["targets"] = list(ann.targets)
    if ann.thresholds:
        doc["thresholds"] = [{"quantity": t.quantity, "unit": t.unit} for t in ann.thresholds]
    if ann.conditional:
        doc["conditional"] = True
    if ann.preparatory:
        doc["preparatory"] = True
    if ann.alternatives:
        doc["alternatives"] = list(ann.alternatives)
    if ann.novel:
        doc["novel"] = list(ann.novel)
    return doc


def prescription_from_json(doc: dict[str, Any]) -> Prescription:
    if "id" not in doc or "steps" not in doc:
        raise PrescriptionError("prescription needs 'id' and 'steps'")
    goal_id = doc.get("goal_id", "custom")
    if goal_id != "custom":
        try:
            goal_id = int(goal_id)
        except (TypeError, ValueError):
            raise PrescriptionError(f"goal_id must be 1..10 or 'custom', got {goal_id!r}")
        if goal_id not in GOAL_IDS:
            raise PrescriptionError(f"goal_id must be 1..10 or 'custom', got {goal_id!r}")
    steps = []
    raw_steps = doc["steps"]
    if not isinstance(raw_steps, list) or not raw_steps:
        raise PrescriptionError("'steps' must be a nonempty list")
    for i, s in enumerate(raw_steps, start=1):
        where = f"step {i}"
        text = s.get("text", "")
        if not isinstance(text, str) or not text.strip():
            raise PrescriptionError(f"{where}: missing text")
        steps.append(PrescriptionStep(
            text=text,
            entities=annotation_from_json(s.get("entities", s), where=where),
        ))
    return Prescription(
        id=str(doc["id"]),
        goal_id=goal_id,
        steps=tuple(steps),
        author=str(doc.get("author", "")),
    )


def prescription_to_json(rx: Prescription) -> dict[str, Any]:
    return {
        "id": rx.id,
        "goal_id": rx.goal_id,
        "author": rx.author,
        "steps": [
            {"text": s.text, "entities": annotation_to_json(s.entities)}
            for s in rx.steps
        ],
    }
