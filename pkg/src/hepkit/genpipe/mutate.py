"""Seeded program mutations with machine-readable ground-truth labels.

Each mutation breaks a clean program in exactly one known way so the
fidelity and hallucination validators can be scored against a defect
whose location and nature are recorded, not guessed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Mapping

from hepkit.dsl import All, JointAngle, Predicate, Program, SceneDecl, Step
from hepkit.dsl.ast import CANONICAL_JOINTS
from hepkit.genpipe.fidelity import normalize_utterance, similarity

MUTATION_KINDS = ("omit", "duplicate", "substitute", "reorder", "hallucinate-atom")

HALLUCINATED_BAND = (20.0, 160.0)


class MutationError(ValueError):
    """The requested mutation cannot be applied to this program."""


@dataclass(frozen=True)
class MutationLabel:
    """Ground truth for one injected defect."""

    kind: str
    step_index: int
    detail: Mapping[str, object] = field(default_factory=dict)


def _renumber(steps: list[Step]) -> tuple[Step, ...]:
    return tuple(replace(s, index=i) for i, s in enumerate(steps, start=1))


def _substituted_text(utterance: str, rng: random.Random) -> str | None:
    """Rewrite an utterance into the near-match band, if possible."""
    words = utterance.split()
    norm = normalize_utterance(utterance)
    order = list(range(len(words)))
    rng.shuffle(order)
    for drop in order:
        candidate = " ".join(words[:drop] + words[drop + 1 :])
        ratio = similarity(norm, normalize_utterance(candidate))
        if 0.85 <= ratio < 1.0:
            return candidate
    return None


def _program_joints(program: Program) -> frozenset[str]:
    return frozenset(d.ident for d in program.scene if d.kind == "joint")


def mutate_program(
    program: Program,
    kind: str,
    seed: int,
    avoid_joints: frozenset[str] = frozenset(),
) -> tuple[Program, MutationLabel]:
    """Apply one seeded mutation and report exactly what was broken.

    ``avoid_joints`` narrows the joint pool for ``hallucinate-atom`` so
    callers can keep injected atoms observable under a given patient.
    Raises :class:`MutationError` when the program offers no viable site.
    """
    if kind not in MUTATION_KINDS:
        raise MutationError(f"unknown mutation kind {kind!r}")
    rng = random.Random(seed)
    steps = list(program.steps)

    if kind == "omit":
        if len(steps) < 2:
            raise MutationError("cannot omit a step from a one-step program")
        idx = rng.randrange(len(steps))
        removed = steps.pop(idx)
        mutated = replace(program, steps=_renumber(steps))
        return mutated, MutationLabel(
            kind=kind, step_index=idx + 1, detail={"text": removed.utterance}
        )

    if kind == "duplicate":
        idx = rng.randrange(len(steps))
        steps.insert(idx + 1, steps[idx])
        mutated = replace(program, steps=_renumber(steps))
        return mutated, MutationLabel(
            kind=kind, step_index=idx + 1, detail={"text": steps[idx].utterance}
        )

    if kind == "substitute":
        order = list(range(len(steps)))
        rng.shuffle(order)
        for idx in order:
            rewritten = _substituted_text(steps[idx].utterance, rng)
            if rewritten is not None:
                original = steps[idx].utterance
                steps[idx] = replace(steps[idx], utterance=rewritten)
                mutated = replace(program, steps=tuple(steps))
                return mutated, MutationLabel(
                    kind=kind,
                    step_index=idx + 1,
                    detail={"original": original, "rewritten": rewritten},
                )
        raise MutationError("no utterance admits a near-match rewrite")

    if kind == "reorder":
        candidates = [
            i
            for i in range(len(steps) - 1)
            if normalize_utterance(steps[i].utterance)
            != normalize_utterance(steps[i + 1].utterance)
        ]
        if not candidates:
            raise MutationError("no adjacent steps differ, nothing to reorder")
        i = rng.choice(candidates)
        a, b = steps[i], steps[i + 1]
        steps[i] = replace(b, index=a.index)
        steps[i + 1] = replace(a, index=b.index)
        mutated = replace(program, steps=tuple(steps))
        return mutated, MutationLabel(
            kind=kind,
            step_index=i + 1,
            detail={"texts": (a.utterance, b.utterance)},
        )

    # hallucinate-atom: wrap one monitor in a conjunction with a joint
    # band the prescription never mentioned.
    monitored = [i for i, s in enumerate(steps) if s.monitor is not None]
    if not monitored:
        raise MutationError("program has no monitored step to corrupt")
    pool = sorted(frozenset(CANONICAL_JOINTS) - _program_joints(program) - avoid_joints)
    if not pool:
        raise MutationError("every canonical joint is already in use")
    idx = rng.choice(monitored)
    joint = rng.choice(pool)
    extra = JointAngle(joint, *HALLUCINATED_BAND)
    original = steps[idx].monitor
    assert original is not None
    if isinstance(original, All):
        wrapped: Predicate = All(tuple(original.items) + (extra,))
    else:
        wrapped = All((original, extra))
    steps[idx] = replace(steps[idx], monitor=wrapped)
    scene = program.scene
    if joint not in _program_joints(program):
        scene = tuple(scene) + (SceneDecl("joint", joint, None),)
    mutated = replace(program, scene=scene, steps=tuple(steps))
    return mutated, MutationLabel(
        kind=kind, step_index=idx + 1, detail={"joint": joint}
    )
