"""Injected clocks: virtual time for tests, paced time for live streaming."""

from __future__ import annotations

import time


class ClockError(ValueError):
    """Time was asked to move backwards."""


class VirtualClock:
    """A clock that only moves when told to, as fast as told to."""

    profile = "virtual"

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    @property
    def now(self) -> float:
        return self._now

    def advance_to(self, t: float) -> None:
        if t < self._now:
            raise ClockError(f"cannot move clock back from {self._now} to {t}")
        self._now = t


class PacedClock(VirtualClock):
    """A virtual clock that sleeps so observers see time pass.

    One virtual second takes ``1 / rt_factor`` wall seconds, so a factor
    of 10 replays a session at ten times real speed.
    """

    profile = "paced"

    def __init__(self, rt_factor: float = 10.0, start: float = 0.0):
        if rt_factor <= 0:
            raise ClockError("rt_factor must be positive")
        super().__init__(start)
        self.rt_factor = rt_factor

    def advance_to(self, t: float) -> None:
        delta = t - self.now
        if delta > 0:
            time.sleep(delta / self.rt_factor)
        super().advance_to(t)
