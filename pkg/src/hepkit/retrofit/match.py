"""Order-preserving alignment of a prescription against a fixed template.

Translatability means a bijective, order-preserving mapping exists between
the prescription's steps and one legal instantiation of the template, where
an instantiation may differ from the published default only in side,
repeat-block count, hold-time values, and enumerated difficulty choices.
The alignment is a longest common subsequence over step equivalence keys;
whatever falls outside the mapping, on either side, is the residue that the
classifier later explains.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from hepkit.genpipe.fidelity import normalize_utterance
from hepkit.genpipe.prescription import (
    Prescription,
    PrescriptionError,
    PrescriptionStep,
)

from .schema import TemplateError, TemplateSchema

_DURATION = re.compile(r"\b\d+(?:\.\d+)?\s*(?:s|sec|secs|second|seconds)\b")

_MAX_EXTRA_REPEATS = 24


@dataclass(frozen=True)
class StepKey:
    """Everything that must agree for two steps to count as the same step.

    Text is normalised and duration mentions are blanked so hold-time
    edits stay invisible; second-valued thresholds likewise compare by
    unit only. All other annotation content must match exactly.
    """

    text: str
    joints: frozenset[str]
    objects: frozenset[str]
    targets: frozenset[str]
    thresholds: tuple[tuple[str, float | None], ...]
    conditional: bool
    preparatory: bool
    alternatives: frozenset[str]


def step_key(step: PrescriptionStep) -> StepKey:
    entities = step.entities
    thresholds = tuple(
        sorted(
            (t.unit, None if t.unit == "s" else t.quantity)
            for t in entities.thresholds
        )
    )
    return StepKey(
        text=_DURATION.sub("<duration>", normalize_utterance(step.text)),
        joints=frozenset(entities.joints),
        objects=frozenset(entities.objects) | frozenset(entities.novel),
        targets=frozenset(entities.targets),
        thresholds=thresholds,
        conditional=entities.conditional,
        preparatory=entities.preparatory,
        alternatives=frozenset(entities.alternatives),
    )


@dataclass(frozen=True)
class MatchOutcome:
    """The best alignment found, with the knob settings that produced it.

    Step indices are 1-based. ``unmatched_template`` positions refer to the
    instantiated candidate (side, repeats, and difficulty applied), not to
    the template's stored fixed steps.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_prescription: tuple[int, ...]
    unmatched_template: tuple[int, ...]
    side: str
    repeats: int
    difficulty: Mapping[str, object] = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return not self.unmatched_prescription and not self.unmatched_template


def _lcs_pairs(left: Sequence[StepKey], right: Sequence[StepKey]) -> list[tuple[int, int]]:
    n, m = len(left), len(right)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if left[i] == right[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < n and j < m:
        if left[i] == right[j]:
            pairs.append((i + 1, j + 1))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def _difficulty_choices(template: TemplateSchema) -> Iterator[dict[str, object]]:
    options = template.parameters.difficulty_options
    names = sorted(options)
    for values in itertools.product(*(options[name] for name in names)):
        yield dict(zip(names, values))


def _repeat_choices(template: TemplateSchema, rx_len: int) -> range:
    base = template.parameters.repetitions
    fixed = len(template.fixed_steps) - template.repeat_length * base
    need = (rx_len - fixed + template.repeat_length - 1) // template.repeat_length
    upper = max(base, min(need, _MAX_EXTRA_REPEATS)) + 1
    return range(1, upper + 1)


def match_against_template(
    rx: Prescription, template: TemplateSchema
) -> MatchOutcome:
    """Align ``rx`` with the closest legal instantiation of ``template``.

    Every side, repeat count, and difficulty combination the template
    offers is tried; the candidate that matches the most steps wins, with
    the smallest total residue breaking ties.
    """
    rx_keys = [step_key(s) for s in rx.steps]
    best: MatchOutcome | None = None
    for side in template.parameters.side_options:
        for repeats in _repeat_choices(template, len(rx_keys)):
            for difficulty in _difficulty_choices(template):
                try:
                    candidate = template.instantiate(
                        side=side, repeats=repeats, difficulty=difficulty
                    )
                except (PrescriptionError, TemplateError):
                    continue
                cand_keys = [step_key(s) for s in candidate.steps]
                pairs = _lcs_pairs(rx_keys, cand_keys)
                outcome = MatchOutcome(
                    pairs=tuple(pairs),
                    unmatched_prescription=tuple(
                        i
                        for i in range(1, len(rx_keys) + 1)
                        if i not in {a for a, _ in pairs}
                    ),
                    unmatched_template=tuple(
                        j
                        for j in range(1, len(cand_keys) + 1)
                        if j not in {b for _, b in pairs}
                    ),
                    side=side,
                    repeats=repeats,
                    difficulty=difficulty,
                )
                if best is None or _better(outcome, best):
                    best = outcome
                if best.exact:
                    return best
    if best is None:
        raise PrescriptionError(
            f"template for goal {template.goal_id} offers no instantiation"
        )
    return best


def _residue_size(outcome: MatchOutcome) -> int:
    return len(outcome.unmatched_prescription) + len(outcome.unmatched_template)


def _better(candidate: MatchOutcome, incumbent: MatchOutcome) -> bool:
    if len(candidate.pairs) != len(incumbent.pairs):
        return len(candidate.pairs) > len(incumbent.pairs)
    return _residue_size(candidate) < _residue_size(incumbent)
