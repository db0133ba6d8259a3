"""Incremental monitor evaluation over frame streams.

Each predicate node becomes a small stateful evaluator: ``feed`` absorbs
frames as they arrive, ``poll`` answers whether the node is satisfied at
an instant.  Temporal operators (hold, count, rest) keep just enough
history to answer without re-scanning the whole window.

Validity rules: frames whose channel validity is False are skipped for
that channel, keeping the last valid reading instead; a channel that
never appears in any frame at all raises a channel-missing error on the
first poll, since monitoring something the sensors cannot see is a setup
bug, not a false predicate.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping

from hepkit.dsl import (
    All,
    Any,
    Count,
    Grasp,
    HandAt,
    Hold,
    JointAngle,
    ObjectAt,
    Predicate,
    Release,
    Rest,
)
from hepkit.runtime.frames import (
    PoseFrame,
    Vec3,
    distance,
    hand_channel,
    joint_channel,
    object_channel,
)

REST_TRAVEL_DEG = 2.0


class ChannelMissingError(ValueError):
    """A monitor references a channel the frame stream never carries."""

    def __init__(self, channel: str):
        super().__init__(f"monitored channel {channel!r} absent from frame stream")
        self.channel = channel


class _Node:
    """Base evaluator; subclasses override _feed and poll."""

    def __init__(self) -> None:
        self.frames_seen = 0

    def feed(self, frame: PoseFrame) -> None:
        self.frames_seen += 1
        self._feed(frame)

    def _feed(self, frame: PoseFrame) -> None:
        raise NotImplementedError

    def poll(self, now: float) -> bool:
        raise NotImplementedError


class _ChannelValue(_Node):
    """Shared plumbing for atoms reading one channel's latest value."""

    channel: str

    def __init__(self) -> None:
        super().__init__()
        self.present = False

    def _check_presence(self) -> None:
        if self.frames_seen > 0 and not self.present:
            raise ChannelMissingError(self.channel)


class _JointAngleEval(_ChannelValue):
    def __init__(self, atom: JointAngle):
        super().__init__()
        self.atom = atom
        self.channel = joint_channel(atom.joint)
        self.value: float | None = None

    def _feed(self, frame: PoseFrame) -> None:
        if self.atom.joint in frame.joints:
            self.present = True
            if frame.is_valid(self.channel):
                self.value = frame.joints[self.atom.joint]

    def poll(self, now: float) -> bool:
        self._check_presence()
        if self.value is None:
            return False
        return self.atom.min_deg <= self.value <= self.atom.max_deg


class _HandAtEval(_ChannelValue):
    def __init__(self, atom: HandAt, scene: Mapping[str, Vec3], side: str):
        super().__init__()
        self.atom = atom
        self.side = side
        self.channel = hand_channel(side)
        self.target_pos = scene[atom.target]
        self.value: Vec3 | None = None

    def _feed(self, frame: PoseFrame) -> None:
        if self.side in frame.hands:
            self.present = True
            if frame.is_valid(self.channel):
                self.value = frame.hands[self.side]

    def poll(self, now: float) -> bool:
        self._check_presence()
        if self.value is None:
            return False
        return distance(self.value, self.target_pos) <= self.atom.radius_cm


class _ObjectAtEval(_ChannelValue):
    def __init__(self, atom: ObjectAt, scene: Mapping[str, Vec3]):
        super().__init__()
        self.atom = atom
        self.channel = object_channel(atom.obj)
        self.target_pos = scene[atom.target]
        self.value: Vec3 | None = None

    def _feed(self, frame: PoseFrame) -> None:
        if self.atom.obj in frame.objects:
            self.present = True
            if frame.is_valid(self.channel):
                self.value = frame.objects[self.atom.obj].position

    def poll(self, now: float) -> bool:
        self._check_presence()
        if self.value is None:
            return False
        return distance(self.value, self.target_pos) <= self.atom.radius_cm


class _GraspEdgeEval(_ChannelValue):
    """Sticky grasp/release detection from consecutive valid frames."""

    def __init__(self, obj: str, releasing: bool):
        super().__init__()
        self.obj = obj
        self.releasing = releasing
        self.channel = object_channel(obj)
        self.prev: str | None = None
        self.seen_edge = False

    def _feed(self, frame: PoseFrame) -> None:
        if self.obj in frame.objects:
            self.present = True
            if frame.is_valid(self.channel):
                held = frame.objects[self.obj].held_by
                if self.prev is not None:
                    if self.releasing:
                        if self.prev != "none" and held == "none":
                            self.seen_edge = True
                    elif self.prev == "none" and held != "none":
                        self.seen_edge = True
                self.prev = held

    def poll(self, now: float) -> bool:
        self._check_presence()
        return self.seen_edge


class _RestEval(_ChannelValue):
    def __init__(self, atom: Rest, window_start: float):
        super().__init__()
        self.atom = atom
        self.channel = joint_channel(atom.joint)
        self.window_start = window_start
        self.history: deque[tuple[float, float]] = deque()

    def _feed(self, frame: PoseFrame) -> None:
        if self.atom.joint in frame.joints:
            self.present = True
            if frame.is_valid(self.channel):
                self.history.append((frame.ts, frame.joints[self.atom.joint]))

    def poll(self, now: float) -> bool:
        self._check_presence()
        if now - self.window_start < self.atom.seconds:
            return False
        cutoff = now - self.atom.seconds
        while self.history and self.history[0][0] <= cutoff:
            self.history.popleft()
        if len(self.history) < 2:
            return False
        travel = 0.0
        previous = self.history[0][1]
        for _, angle in list(self.history)[1:]:
            travel += abs(angle - previous)
            previous = angle
        return travel < REST_TRAVEL_DEG


class _HoldEval(_Node):
    def __init__(self, atom_eval: _Node, seconds: float, window_start: float):
        super().__init__()
        self.inner = atom_eval
        self.seconds = seconds
        self.window_start = window_start
        self.samples: deque[tuple[float, bool]] = deque()

    def _feed(self, frame: PoseFrame) -> None:
        self.inner.feed(frame)

    def poll(self, now: float) -> bool:
        value = self.inner.poll(now)
        self.samples.append((now, value))
        cutoff = now - self.seconds
        while self.samples and self.samples[0][0] <= cutoff:
            self.samples.popleft()
        if now - self.window_start < self.seconds:
            return False
        return all(sample for _, sample in self.samples)


class _CountEval(_Node):
    """Count satisfactions: grasp/release edges from frames, band entries
    from poll-level rising edges for everything else."""

    def __init__(self, inner_atom: Predicate, times: int, inner_eval: _Node):
        super().__init__()
        self.times = times
        self.count = 0
        self.event_based = isinstance(inner_atom, (Grasp, Release))
        if self.event_based:
            releasing = isinstance(inner_atom, Release)
            obj = inner_atom.obj  # type: ignore[union-attr]
            self.edge = _GraspEdgeEval(obj, releasing)
        else:
            self.inner = inner_eval
            self.prev = False

    def _feed(self, frame: PoseFrame) -> None:
        if self.event_based:
            before = self.edge.seen_edge
            self.edge.feed(frame)
            if self.edge.seen_edge and not before:
                self.count += 1
                self.edge.seen_edge = False
                # keep prev state so back-to-back transitions still count
        else:
            self.inner.feed(frame)

    def poll(self, now: float) -> bool:
        if self.event_based:
            self.edge._check_presence()
        else:
            value = self.inner.poll(now)
            if value and not self.prev:
                self.count += 1
            self.prev = value
        return self.count >= self.times


class _BoolOpEval(_Node):
    def __init__(self, children: list[_Node], conjunction: bool):
        super().__init__()
        self.children = children
        self.conjunction = conjunction

    def _feed(self, frame: PoseFrame) -> None:
        for child in self.children:
            child.feed(frame)

    def poll(self, now: float) -> bool:
        results = [child.poll(now) for child in self.children]
        return all(results) if self.conjunction else any(results)


def build_evaluator(
    pred: Predicate,
    scene: Mapping[str, Vec3],
    active_side: str,
    window_start: float,
) -> _Node:
    """Construct the evaluator tree for one monitoring window."""
    if isinstance(pred, All):
        return _BoolOpEval(
            [build_evaluator(p, scene, active_side, window_start) for p in pred.items],
            conjunction=True,
        )
    if isinstance(pred, Any):
        return _BoolOpEval(
            [build_evaluator(p, scene, active_side, window_start) for p in pred.items],
            conjunction=False,
        )
    if isinstance(pred, Hold):
        inner = build_evaluator(pred.atom, scene, active_side, window_start)
        return _HoldEval(inner, pred.seconds, window_start)
    if isinstance(pred, Count):
        inner = build_evaluator(pred.atom, scene, active_side, window_start)
        return _CountEval(pred.atom, pred.times, inner)
    if isinstance(pred, JointAngle):
        return _JointAngleEval(pred)
    if isinstance(pred, HandAt):
        return _HandAtEval(pred, scene, active_side)
    if isinstance(pred, ObjectAt):
        return _ObjectAtEval(pred, scene)
    if isinstance(pred, Grasp):
        return _GraspEdgeEval(pred.obj, releasing=False)
    if isinstance(pred, Release):
        return _GraspEdgeEval(pred.obj, releasing=True)
    if isinstance(pred, Rest):
        return _RestEval(pred, window_start)
    raise TypeError(f"unknown predicate node {type(pred).__name__}")


def eval_predicate(
    pred: Predicate,
    window: list[PoseFrame],
    now: float,
    scene: Mapping[str, Vec3],
    active_side: str = "right",
    window_start: float | None = None,
) -> bool:
    """One-shot evaluation of a predicate over a frame window.

    Frame timestamps double as poll instants for the temporal operators,
    which matches a session polling at the frame rate.
    """
    if window_start is None:
        window_start = window[0].ts if window else now
    node = build_evaluator(pred, scene, active_side, window_start)
    for frame in window:
        node.feed(frame)
        if frame.ts < now:
            node.poll(frame.ts)
    return node.poll(now)
