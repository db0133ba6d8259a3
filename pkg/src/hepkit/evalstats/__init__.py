"""Exact statistics for detection-quality reporting."""

from hepkit.evalstats.confusion import (
    ConfusionCounts,
    EvalReport,
    PairingError,
    StepOutcome,
    build_report,
    confusion,
)
from hepkit.evalstats.contingency import ContingencyError, fisher_exact_2x2
from hepkit.evalstats.intervals import IntervalError, normal_quantile, wilson_interval

__all__ = [
    "ConfusionCounts",
    "ContingencyError",
    "EvalReport",
    "IntervalError",
    "PairingError",
    "StepOutcome",
    "build_report",
    "confusion",
    "fisher_exact_2x2",
    "normal_quantile",
    "wilson_interval",
]
