"""Step-level confusion counts and the evaluation report.

Each monitored step of a batch pairs a scripted truth label (will the
patient truly complete it?) with the session's detection verdict.  The
report aggregates the confusion counts, a Wilson interval on accuracy,
and attributes detection errors to hallucinated monitors versus noise.
"""

from __future__ import annotations

from dataclasses import dataclass

from hepkit.evalstats.intervals import wilson_interval
from hepkit.patientsim.script import PRELABEL_COMPLETE, PRELABEL_INCOMPLETE


class PairingError(ValueError):
    """Truth labels and detections cannot be matched up."""


@dataclass(frozen=True)
class StepOutcome:
    """One monitored step: scripted truth, detection, hallucination flag."""

    rx_id: str
    step_index: int
    truth: str
    detected: bool
    hallucinated: bool = False

    def __post_init__(self):
        if self.truth not in (PRELABEL_COMPLETE, PRELABEL_INCOMPLETE):
            raise PairingError(f"unknown truth label {self.truth!r}")

    @property
    def is_error(self) -> bool:
        return self.detected != (self.truth == PRELABEL_COMPLETE)


@dataclass(frozen=True)
class ConfusionCounts:
    true_positive: int
    false_positive: int
    false_negative: int
    true_negative: int

    @property
    def total(self) -> int:
        return (
            self.true_positive
            + self.false_positive
            + self.false_negative
            + self.true_negative
        )

    @property
    def correct(self) -> int:
        return self.true_positive + self.true_negative

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise PairingError("no outcomes to score")
        return self.correct / self.total

    @property
    def sensitivity(self) -> float:
        positives = self.true_positive + self.false_negative
        if positives == 0:
            raise PairingError("no truly-complete steps to score")
        return self.true_positive / positives

    @property
    def specificity(self) -> float:
        negatives = self.true_negative + self.false_positive
        if negatives == 0:
            raise PairingError("no truly-incomplete steps to score")
        return self.true_negative / negatives


def confusion(truths: list[str], detections: list[bool]) -> ConfusionCounts:
    """Count detection outcomes against truth labels, pairing by position."""
    if len(truths) != len(detections):
        raise PairingError(
            f"{len(truths)} truth labels cannot pair with "
            f"{len(detections)} detections"
        )
    tp = fp = fn = tn = 0
    for truth, detected in zip(truths, detections):
        if truth == PRELABEL_COMPLETE:
            if detected:
                tp += 1
            else:
                fn += 1
        elif truth == PRELABEL_INCOMPLETE:
            if detected:
                fp += 1
            else:
                tn += 1
        else:
            raise PairingError(f"unknown truth label {truth!r}")
    return ConfusionCounts(tp, fp, fn, tn)


@dataclass(frozen=True)
class EvalReport:
    counts: ConfusionCounts
    accuracy: float
    accuracy_ci: tuple[float, float]
    confidence: float
    hallucination_step_count: int
    hallucination_share: float
    errors_with_hallucination: int
    errors_noise_only: int

    def to_json(self) -> dict:
        return {
            "counts": {
                "true_positive": self.counts.true_positive,
                "false_positive": self.counts.false_positive,
                "false_negative": self.counts.false_negative,
                "true_negative": self.counts.true_negative,
                "total": self.counts.total,
            },
            "accuracy": self.accuracy,
            "accuracy_ci": list(self.accuracy_ci),
            "confidence": self.confidence,
            "attribution": {
                "hallucination_step_count": self.hallucination_step_count,
                "hallucination_share": self.hallucination_share,
                "errors_with_hallucination": self.errors_with_hallucination,
                "errors_noise_only": self.errors_noise_only,
            },
        }


def build_report(
    outcomes: list[StepOutcome], confidence: float = 0.95
) -> EvalReport:
    if not outcomes:
        raise PairingError("no outcomes to score")
    counts = confusion(
        [o.truth for o in outcomes], [o.detected for o in outcomes]
    )
    halluc = sum(1 for o in outcomes if o.hallucinated)
    err_h = sum(1 for o in outcomes if o.is_error and o.hallucinated)
    err_n = sum(1 for o in outcomes if o.is_error and not o.hallucinated)
    return EvalReport(
        counts=counts,
        accuracy=counts.accuracy,
        accuracy_ci=wilson_interval(counts.correct, counts.total, confidence),
        confidence=confidence,
        hallucination_step_count=halluc,
        hallucination_share=halluc / len(outcomes),
        errors_with_hallucination=err_h,
        errors_noise_only=err_n,
    )
