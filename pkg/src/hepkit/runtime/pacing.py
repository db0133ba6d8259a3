"""Pacing judgment: did the session advance when the patient was ready?

Compares each step's advance against the ground-truth completion time.
Advancing on a detection that fired before the patient truly finished is
Premature; dawdling past the latency threshold after true completion is
Delayed; everything else, including patiently timing out on a step the
patient never completed, is Adequate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from hepkit.runtime.session import SessionLog

PACING_THRESHOLD_S = 3.0

PREMATURE = "Premature"
DELAYED = "Delayed"
ADEQUATE = "Adequate"


class PacingError(ValueError):
    """Ground truth does not line up with the session log."""


@dataclass(frozen=True)
class PacingVerdict:
    step_index: int
    verdict: str
    advanced_at: float
    true_completion_at: float | None


def pacing_of(
    log: SessionLog,
    truth: Mapping[int, float | None],
    threshold_s: float = PACING_THRESHOLD_S,
) -> tuple[PacingVerdict, ...]:
    """Judge every step in the log against true completion times.

    ``truth`` maps step index to the instant the patient actually
    completed the step, or None when they never did.  Announce-only
    steps are Adequate by definition.  Monitored steps missing from
    ``truth`` raise :class:`PacingError`.
    """
    verdicts: list[PacingVerdict] = []
    for step in log.steps:
        if not step.monitored:
            verdicts.append(
                PacingVerdict(step.index, ADEQUATE, step.advanced_at, None)
            )
            continue
        if step.index not in truth:
            raise PacingError(f"no ground truth for monitored step {step.index}")
        true_at = truth[step.index]
        if true_at is None:
            verdict = PREMATURE if step.detected_complete else ADEQUATE
        elif step.detected_complete and step.advanced_at < true_at:
            verdict = PREMATURE
        elif step.advanced_at - true_at > threshold_s:
            verdict = DELAYED
        else:
            verdict = ADEQUATE
        verdicts.append(
            PacingVerdict(step.index, verdict, step.advanced_at, true_at)
        )
    return tuple(verdicts)
