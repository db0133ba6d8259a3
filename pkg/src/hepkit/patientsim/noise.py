"""Observation noise model for simulated sensing."""

from __future__ import annotations

from dataclasses import dataclass


class NoiseError(ValueError):
    """A noise rate is outside [0, 1)."""


@dataclass(frozen=True)
class NoiseModel:
    """Per-poll observation corruption rates.

    ``fp_rate``: probability, on a step the patient never truly
    completes, that a frame is replaced with a satisfying observation.
    ``fn_rate``: probability, once a step is truly complete, that a
    frame is replaced with the step-start snapshot.
    ``dropout_rate``: per-channel probability a frame's reading is
    marked invalid.  Noise only touches observations; ground truth is
    computed from the clean trajectory before corruption.
    """

    fp_rate: float = 0.0
    fn_rate: float = 0.0
    dropout_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("fp_rate", "fn_rate", "dropout_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise NoiseError(f"{name} must be in [0, 1), got {rate}")

    @property
    def silent(self) -> bool:
        return self.fp_rate == 0.0 and self.fn_rate == 0.0 and self.dropout_rate == 0.0


ZERO_NOISE = NoiseModel()
