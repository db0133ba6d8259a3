"""Parameterised exercise templates against which prescriptions are checked.

A :class:`TemplateSchema` captures what the fixed-template authoring paradigm
can express for one goal: an ordered list of step texts with their entity
annotations, an equipment list, and the handful of knobs a clinician may
turn (side, repetition count, hold times, enumerated difficulty options).
Anything a prescription does beyond those knobs is, by definition, outside
the paradigm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from hepkit.fixtures import GOAL_IDS, Worksheet, WorksheetStep, load_worksheet
from hepkit.genpipe.prescription import Prescription

SIDE_DOMAIN = frozenset({"left", "right", "bilateral"})


class TemplateError(ValueError):
    """A template definition or instantiation request is malformed."""


@dataclass(frozen=True)
class TemplateParameters:
    """The knobs a fixed template exposes to the prescribing clinician.

    ``side`` is the default limb, ``side_options`` the substitutable set,
    ``repetitions`` how many times the repeat block occurs in the published
    text, ``hold_time_s`` the default hold duration (zero when the goal has
    no holds), and ``difficulty_options`` the enumerated values each
    difficulty parameter may take.
    """

    side: str
    side_options: tuple[str, ...]
    repetitions: int
    hold_time_s: float = 0.0
    difficulty_options: Mapping[str, tuple[object, ...]] = field(
        default_factory=dict
    )
    difficulty_defaults: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.side not in SIDE_DOMAIN:
            raise TemplateError(
                f"side must be one of {sorted(SIDE_DOMAIN)}, got {self.side!r}"
            )
        bad = set(self.side_options) - SIDE_DOMAIN
        if bad:
            raise TemplateError(f"side options outside domain: {sorted(bad)}")
        if self.side not in self.side_options:
            raise TemplateError(
                f"default side {self.side!r} missing from side options"
            )
        if self.repetitions < 1:
            raise TemplateError("repetitions must be a positive integer")
        if self.hold_time_s < 0:
            raise TemplateError("hold time cannot be negative")
        for name, values in self.difficulty_options.items():
            if not values:
                raise TemplateError(
                    f"difficulty parameter {name!r} enumerates no values"
                )


@dataclass(frozen=True)
class TemplateSchema:
    """One goal's fixed template: ordered steps plus the allowed knobs."""

    goal_id: int
    title: str
    fixed_steps: tuple[WorksheetStep, ...] = field(repr=False)
    equipment: frozenset[str]
    parameters: TemplateParameters
    repeat_start: int
    repeat_length: int

    def __post_init__(self) -> None:
        if self.goal_id < 1:
            raise TemplateError("goal_id must be a positive integer")
        if not self.fixed_steps:
            raise TemplateError("a template needs at least one fixed step")
        if self.repeat_start < 1 or self.repeat_length < 1:
            raise TemplateError("repeat block bounds must be at least 1")
        end = self.repeat_start - 1 + self.repeat_length * self.parameters.repetitions
        if end > len(self.fixed_steps):
            raise TemplateError(
                "repeat block extends past the end of the fixed steps"
            )

    def instantiate(
        self,
        side: str | None = None,
        repeats: int | None = None,
        difficulty: Mapping[str, object] | None = None,
    ) -> Prescription:
        """Resolve the template into a concrete prescription.

        Only the documented knobs are accepted; this is the ground truth
        for what the fixed paradigm can produce.
        """
        chosen = self.parameters.side if side is None else side
        if chosen == "bilateral":
            raise TemplateError(
                "bilateral templates have no single-limb instantiation"
            )
        return _as_worksheet(self).instantiate(
            side=side, repeats=repeats, difficulty=difficulty
        )


def _as_worksheet(template: TemplateSchema) -> Worksheet:
    return Worksheet(
        goal_id=template.goal_id,
        title=template.title,
        default_side=template.parameters.side,
        side_options=template.parameters.side_options,
        repeat_start=template.repeat_start,
        repeat_length=template.repeat_length,
        base_repeats=template.parameters.repetitions,
        difficulty_options=dict(template.parameters.difficulty_options),
        difficulty_defaults=dict(template.parameters.difficulty_defaults),
        equipment=template.equipment,
        steps=template.fixed_steps,
    )


def template_from_worksheet(worksheet: Worksheet) -> TemplateSchema:
    return TemplateSchema(
        goal_id=worksheet.goal_id,
        title=worksheet.title,
        fixed_steps=worksheet.steps,
        equipment=worksheet.equipment,
        parameters=TemplateParameters(
            side=worksheet.default_side,
            side_options=worksheet.side_options,
            repetitions=worksheet.base_repeats,
            hold_time_s=0.0,
            difficulty_options=MappingProxyType(dict(worksheet.difficulty_options)),
            difficulty_defaults=MappingProxyType(dict(worksheet.difficulty_defaults)),
        ),
        repeat_start=worksheet.repeat_start,
        repeat_length=worksheet.repeat_length,
    )


def template_for_goal(goal_id: int) -> TemplateSchema:
    """The bundled fixed template for one of the ten goals."""
    return template_from_worksheet(load_worksheet(goal_id))


def bundled_templates() -> tuple[TemplateSchema, ...]:
    return tuple(template_for_goal(g) for g in GOAL_IDS)
