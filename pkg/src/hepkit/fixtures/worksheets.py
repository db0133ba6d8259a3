"""Bundled exercise worksheets and their instantiation into prescriptions.

Each worksheet is a parameterised template: step texts carry ``{side}``,
``{other_side}``, and difficulty placeholders, joint annotations are stored
without a side prefix, and one contiguous block of steps may be repeated a
configurable number of times.  Instantiating a worksheet resolves all of
that into a concrete :class:`~hepkit.genpipe.prescription.Prescription`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

from hepkit.genpipe.prescription import (
    EntityAnnotation,
    Prescription,
    PrescriptionError,
    PrescriptionStep,
    Threshold,
)

GOAL_IDS = tuple(range(1, 11))

_SIDE_COMPLEMENT = {"left": "right", "right": "left"}


@dataclass(frozen=True)
class WorksheetStep:
    """One templated step: display text plus unresolved annotations."""

    text: str
    joints: tuple[str, ...] = ()
    objects: tuple[str, ...] = ()
    targets: tuple[str, ...] = ()
    thresholds: tuple[Mapping[str, object], ...] = ()
    conditional: bool = False
    preparatory: bool = False
    alternatives: tuple[str, ...] = ()


@dataclass(frozen=True)
class Worksheet:
    """A goal worksheet as shipped, before side or repeat resolution."""

    goal_id: int
    title: str
    default_side: str
    side_options: tuple[str, ...]
    repeat_start: int
    repeat_length: int
    base_repeats: int
    difficulty_options: Mapping[str, tuple[object, ...]]
    difficulty_defaults: Mapping[str, object]
    equipment: frozenset[str]
    steps: tuple[WorksheetStep, ...] = field(repr=False)

    def instantiate(
        self,
        side: str | None = None,
        repeats: int | None = None,
        difficulty: Mapping[str, object] | None = None,
        rx_id: str | None = None,
    ) -> Prescription:
        """Resolve this worksheet into a concrete prescription.

        ``side`` picks which arm the programme exercises, ``repeats`` sets
        how many times the repeat block occurs, and ``difficulty`` supplies
        values for any difficulty parameters.  Omitted arguments fall back
        to the worksheet defaults, which reproduce the published text.
        """
        side = self.default_side if side is None else side
        if side not in self.side_options:
            raise PrescriptionError(
                f"side {side!r} not offered by goal {self.goal_id}; "
                f"choose from {sorted(self.side_options)}"
            )
        repeats = self.base_repeats if repeats is None else repeats
        if repeats < 1:
            raise PrescriptionError("repeat count must be at least 1")

        params = dict(self.difficulty_defaults)
        for name, value in (difficulty or {}).items():
            allowed = self.difficulty_options.get(name)
            if allowed is None:
                raise PrescriptionError(
                    f"goal {self.goal_id} has no difficulty parameter {name!r}"
                )
            if value not in allowed:
                raise PrescriptionError(
                    f"{name}={value!r} is not offered; choose from {list(allowed)}"
                )
            params[name] = value

        subs = {"side": side, "other_side": _SIDE_COMPLEMENT[side], **params}

        lo = self.repeat_start - 1
        block = self.steps[lo : lo + self.repeat_length]
        suffix = self.steps[lo + self.repeat_length * self.base_repeats :]
        expanded = list(self.steps[:lo]) + list(block) * repeats + list(suffix)

        steps = tuple(
            _resolve_step(template, side, subs, params) for template in expanded
        )
        if rx_id is None:
            rx_id = f"wks-g{self.goal_id:02d}-{side}-x{repeats}"
            for name in sorted(params):
                rx_id += f"-{name[:1]}{params[name]}"
        return Prescription(
            id=rx_id, goal_id=self.goal_id, steps=steps, author="worksheet"
        )


def _resolve_step(
    template: WorksheetStep,
    side: str,
    subs: Mapping[str, object],
    params: Mapping[str, object],
) -> PrescriptionStep:
    thresholds = []
    for spec in template.thresholds:
        unit = str(spec["unit"])
        if "param" in spec:
            thresholds.append(Threshold(float(params[str(spec["param"])]), unit))
        else:
            thresholds.append(Threshold(float(spec["quantity"]), unit))
    entities = EntityAnnotation(
        joints=tuple(f"{side}_{j}" for j in template.joints),
        objects=template.objects,
        targets=template.targets,
        thresholds=tuple(thresholds),
        conditional=template.conditional,
        preparatory=template.preparatory,
        alternatives=tuple(a.format(**subs) for a in template.alternatives),
    )
    return PrescriptionStep(text=template.text.format(**subs), entities=entities)


def _step_from_json(doc: Mapping[str, object]) -> WorksheetStep:
    return WorksheetStep(
        text=str(doc["text"]),
        joints=tuple(doc.get("joints", ())),
        objects=tuple(doc.get("objects", ())),
        targets=tuple(doc.get("targets", ())),
        thresholds=tuple(doc.get("thresholds", ())),
        conditional=bool(doc.get("conditional", False)),
        preparatory=bool(doc.get("preparatory", False)),
        alternatives=tuple(doc.get("alternatives", ())),
    )


def worksheet_from_json(doc: Mapping[str, object]) -> Worksheet:
    block = doc["repeat_block"]
    return Worksheet(
        goal_id=int(doc["goal_id"]),
        title=str(doc["title"]),
        default_side=str(doc["side"]),
        side_options=tuple(doc["side_options"]),
        repeat_start=int(block["start"]),
        repeat_length=int(block["length"]),
        base_repeats=int(block["base_repeats"]),
        difficulty_options={
            k: tuple(v) for k, v in dict(doc.get("difficulty_options", {})).items()
        },
        difficulty_defaults=dict(doc.get("difficulty_defaults", {})),
        equipment=frozenset(doc.get("equipment", ())),
        steps=tuple(_step_from_json(s) for s in doc["steps"]),
    )


def load_worksheet(goal_id: int) -> Worksheet:
    """Load one bundled worksheet by goal number (1 through 10)."""
    if goal_id not in GOAL_IDS:
        raise PrescriptionError(f"no bundled worksheet for goal {goal_id}")
    ref = resources.files("hepkit.fixtures") / "data" / "worksheets"
    text = (ref / f"goal_{goal_id:02d}.json").read_text(encoding="utf-8")
    return worksheet_from_json(json.loads(text))


def load_all_worksheets() -> tuple[Worksheet, ...]:
    return tuple(load_worksheet(g) for g in GOAL_IDS)


def default_prescriptions() -> tuple[Prescription, ...]:
    """The ten published prescriptions: right side, default repeats."""
    return tuple(ws.instantiate() for ws in load_all_worksheets())
