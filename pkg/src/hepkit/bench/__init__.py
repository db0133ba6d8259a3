"""Benchmark batches, execution, and noise calibration."""

from hepkit.bench.batch import (
    BATCH_TOTAL_MONITORED,
    BRACED_JOINTS,
    BatchEntry,
    BatchError,
    BatchRun,
    DEFAULT_INCOMPLETE_FRACTION,
    build_batch,
    run_batch,
)
from hepkit.bench.calibrate import (
    CALIBRATED_NOISE,
    SweepPoint,
    TARGET_ACCURACY,
    measure_accuracy,
    sweep_noise,
)

__all__ = [
    "BATCH_TOTAL_MONITORED",
    "BRACED_JOINTS",
    "BatchEntry",
    "BatchError",
    "BatchRun",
    "CALIBRATED_NOISE",
    "DEFAULT_INCOMPLETE_FRACTION",
    "SweepPoint",
    "TARGET_ACCURACY",
    "build_batch",
    "measure_accuracy",
    "run_batch",
    "sweep_noise",
]
