"""Translatability verdicts for prescriptions against fixed templates.

A prescription is translatable into a template when every one of its steps
maps onto a legal instantiation of that template and nothing in the
template goes unused. When the mapping fails, each leftover prescription
step is classified by the clinical capability it asked for that the
template lacks. One step may need several capabilities at once; the
generic procedural category applies only when no specific rule fires.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from hepkit.genpipe.prescription import Prescription

from .match import MatchOutcome, match_against_template
from .schema import TemplateSchema

CONTINGENCY = "Contingency"
COMPENSATORY_STRATEGY_OPTIONS = "CompensatoryStrategyOptions"
MOTOR_PRIMING = "MotorPriming"
NEW_EQUIPMENT_USE = "NewEquipmentUse"
PROCEDURAL_VARIATION = "ProceduralVariation"

TRANSLATION_CATEGORIES = frozenset(
    {
        CONTINGENCY,
        COMPENSATORY_STRATEGY_OPTIONS,
        MOTOR_PRIMING,
        NEW_EQUIPMENT_USE,
        PROCEDURAL_VARIATION,
    }
)


class VerdictError(ValueError):
    """A verdict violates its own invariants."""


@dataclass(frozen=True)
class RetrofitVerdict:
    """Whether a prescription fits a template, and if not, why.

    ``evidence`` maps each unmatched prescription step (1-based) to the
    categories its content fired, in rule order. ``dropped_template_steps``
    lists instantiated-template positions the prescription never used;
    dropping published steps is itself a procedural variation. Exactly one
    of ``translatable`` and ``categories`` is non-trivial.
    """

    translatable: bool
    categories: frozenset[str]
    evidence: Mapping[int, tuple[str, ...]] = field(default_factory=dict)
    dropped_template_steps: tuple[int, ...] = ()
    side: str | None = None
    repeats: int | None = None
    difficulty: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        unknown = self.categories - TRANSLATION_CATEGORIES
        if unknown:
            raise VerdictError(f"unknown categories: {sorted(unknown)}")
        if self.translatable == bool(self.categories):
            raise VerdictError(
                "a verdict is either translatable or categorised, never both"
            )

    def to_json(self) -> dict[str, object]:
        return {
            "translatable": self.translatable,
            "categories": sorted(self.categories),
            "evidence": {
                str(index): list(fired)
                for index, fired in sorted(self.evidence.items())
            },
            "dropped_template_steps": list(self.dropped_template_steps),
            "side": self.side,
            "repeats": self.repeats,
            "difficulty": dict(self.difficulty),
        }


def classify_incompatibility(
    rx: Prescription, template: TemplateSchema, residue: MatchOutcome
) -> RetrofitVerdict:
    """Explain an imperfect alignment step by step.

    Rules fire per unmatched prescription step, in order: a conditional
    step needs contingency handling; offering another body part or
    movement route needs compensatory strategy options; a warm-up
    annotation needs motor priming; an object missing from the template's
    equipment needs new equipment; anything else is a procedural
    variation. The first four are independent and may all fire on one
    step; the fifth fires only when none of them did.
    """
    evidence: dict[int, tuple[str, ...]] = {}
    categories: set[str] = set()
    for index in residue.unmatched_prescription:
        entities = rx.steps[index - 1].entities
        fired: list[str] = []
        if entities.conditional:
            fired.append(CONTINGENCY)
        if entities.alternatives:
            fired.append(COMPENSATORY_STRATEGY_OPTIONS)
        if entities.preparatory:
            fired.append(MOTOR_PRIMING)
        novel_objects = [
            name
            for name in (*entities.objects, *entities.novel)
            if name not in template.equipment
        ]
        if novel_objects:
            fired.append(NEW_EQUIPMENT_USE)
        if not fired:
            fired.append(PROCEDURAL_VARIATION)
        evidence[index] = tuple(fired)
        categories.update(fired)
    if residue.unmatched_template:
        categories.add(PROCEDURAL_VARIATION)
    return RetrofitVerdict(
        translatable=False,
        categories=frozenset(categories),
        evidence=evidence,
        dropped_template_steps=residue.unmatched_template,
        side=residue.side,
        repeats=residue.repeats,
        difficulty=residue.difficulty,
    )


def retrofit_check(rx: Prescription, template: TemplateSchema) -> RetrofitVerdict:
    """Decide whether ``rx`` could have been authored from ``template``."""
    outcome = match_against_template(rx, template)
    if outcome.exact:
        return RetrofitVerdict(
            translatable=True,
            categories=frozenset(),
            side=outcome.side,
            repeats=outcome.repeats,
            difficulty=outcome.difficulty,
        )
    return classify_incompatibility(rx, template, outcome)
