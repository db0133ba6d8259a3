"""Standardized-patient frame synthesis with retained ground truth.

The simulator is a frame source: the session announces a step, the
simulator plans a trajectory for that step's scripted behavior, then
emits frames on the session's poll grid.  Ground truth is decided by
running the real runtime evaluators over the noise-free trajectory, so
"truly completed" means exactly what the monitor language means, and
noise is applied strictly after that.

Trajectories are ease-in/ease-out interpolations from the rest pose to
a satisfying pose, timed so the clean trajectory first satisfies the
monitor at the scripted completion offset.  NoAttempt stays at rest
(or keeps fidgeting, for stillness monitors), PartialAttempt stops just
outside the satisfying set, and every emitted joint angle is clamped
into the profile's range of motion.
"""

from __future__ import annotations

import csv
import io
import math
import random
from typing import Callable, Iterable, Mapping

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
    Program,
    Release,
    Rest,
    Step,
)
from hepkit.patientsim.noise import NoiseModel
from hepkit.patientsim.profile import PatientProfile
from hepkit.patientsim.script import Behavior, CompleteAt, NoAttempt, PartialAttempt
from hepkit.runtime.evaluate import build_evaluator
from hepkit.runtime.frames import (
    ObjectState,
    PoseFrame,
    Vec3,
    hand_channel,
    joint_channel,
    object_channel,
)

REST_WIGGLE_DEG = 2.5
PARTIAL_BAND_MARGIN_DEG = 5.0
BASE_MOVE_DURATION_S = 1.5

HAND_REST: dict[str, Vec3] = {
    "left": (-40.0, -30.0, 0.0),
    "right": (40.0, -30.0, 0.0),
}


class InfeasibleStepError(ValueError):
    """A scripted behavior cannot be realized for this step."""

    def __init__(self, step_index: int, message: str):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


class ScenarioMismatchError(ValueError):
    """The behavior script does not cover the program's monitored steps."""


def _smoothstep(u: float) -> float:
    u = min(max(u, 0.0), 1.0)
    return u * u * (3.0 - 2.0 * u)


def _inverse_smoothstep(value: float) -> float:
    lo, hi = 0.0, 1.0
    for _ in range(40):
        mid = (lo + hi) / 2.0
        if _smoothstep(mid) < value:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def _lerp3(a: Vec3, b: Vec3, f: float) -> Vec3:
    return (
        a[0] + (b[0] - a[0]) * f,
        a[1] + (b[1] - a[1]) * f,
        a[2] + (b[2] - a[2]) * f,
    )


def _dist3(a: Vec3, b: Vec3) -> float:
    return math.dist(a, b)


def _ease(
    start: float, rest_value: float, goal_value: float, t0: float, duration: float
) -> Callable[[int, float], float]:
    del start

    def fn(k: int, ts: float) -> float:
        if ts <= t0:
            return rest_value
        u = (ts - t0) / duration if duration > 0 else 1.0
        return rest_value + (goal_value - rest_value) * _smoothstep(u)

    return fn


def _ease3(
    rest_value: Vec3, goal_value: Vec3, t0: float, duration: float
) -> Callable[[int, float], Vec3]:
    def fn(k: int, ts: float) -> Vec3:
        if ts <= t0:
            return rest_value
        u = (ts - t0) / duration if duration > 0 else 1.0
        return _lerp3(rest_value, goal_value, _smoothstep(u))

    return fn


class _Plan:
    """Channel trajectories plus noise overlays for one step window."""

    def __init__(self) -> None:
        self.joint_tracks: dict[str, Callable[[int, float], float]] = {}
        self.hand_tracks: dict[str, Callable[[int, float], Vec3]] = {}
        self.object_tracks: dict[str, Callable[[int, float], ObjectState]] = {}
        self.sat_joints: dict[str, float] = {}
        self.sat_hands: dict[str, Vec3] = {}
        self.sat_objects: dict[str, ObjectState] = {}
        self.completes = False


class SimulatedPatient:
    """Frame source executing a behavior script for one program run.

    ``script`` maps program step index to a behavior; every monitored
    step needs an entry.  Ground truth per monitored step is available
    in :attr:`ground_truth` (absolute completion time or None) once the
    step's window has been generated.
    """

    def __init__(
        self,
        program: Program,
        profile: PatientProfile,
        script: Mapping[int, Behavior],
        noise: NoiseModel | None = None,
        hz: float = 10.0,
    ):
        if not 1.0 <= hz <= 60.0:
            raise ValueError(f"hz {hz} outside [1, 60]")
        self.program = program
        self.profile = profile
        self.script = dict(script)
        self.noise = noise or NoiseModel()
        self.hz = hz
        self.side = profile.affected_side
        self._rng = random.Random(self.noise.seed)
        self._steps_by_index = {s.index: s for s in program.steps}
        self._scene_targets: dict[str, Vec3] = {}
        self._scene_objects: dict[str, Vec3] = {}
        for decl in program.scene:
            if decl.kind == "target" and decl.position is not None:
                self._scene_targets[decl.ident] = decl.position
            elif decl.kind == "object" and decl.position is not None:
                self._scene_objects[decl.ident] = decl.position
        for step in program.steps:
            if step.monitor is not None and step.index not in self.script:
                raise ScenarioMismatchError(
                    f"behavior script missing monitored step {step.index}"
                )
        self.ground_truth: dict[int, float | None] = {}
        self._announced_at = 0.0
        self._next_k = 1
        self._plan = self._baseline_plan()
        self._current_step: Step | None = None
        self._behavior: Behavior | None = None
        self._evaluator = None
        self._snapshot: PoseFrame | None = None
        self._primary_window = True

        # Sanity-check the script before running: complete-at goals must
        # be reachable within the range of motion, and never-complete
        # behaviors must not be satisfied by simply sitting still.
        for step in program.steps:
            if step.monitor is None:
                continue
            behavior = self.script[step.index]
            if isinstance(behavior, CompleteAt):
                self._plan_step(step, behavior, 0.0, dry_run=True)
            elif self._rest_pose_satisfies(step.monitor):
                raise InfeasibleStepError(
                    step.index,
                    "the rest pose already satisfies the monitor, so a "
                    "never-complete behavior cannot be realized",
                )

    def _rest_pose_satisfies(self, pred: Predicate) -> bool:
        evaluator = build_evaluator(pred, self._scene_targets, self.side, 0.0)
        saved_plan, saved_step = self._plan, self._current_step
        self._plan, self._current_step = _Plan(), None
        try:
            for ts in (0.1, 0.2):
                evaluator.feed(self._clean_frame(ts, 0))
            return evaluator.poll(0.2)
        finally:
            self._plan, self._current_step = saved_plan, saved_step

    # -- frame source protocol -------------------------------------------

    def end_time(self) -> float:
        return math.inf

    def on_step_start(self, step: Step, announced_at: float) -> None:
        # The patient acts out their own program's step at this index.
        # When the session runs a mutated copy, the monitors may differ;
        # behavior and ground truth always follow the clean step.
        own = self._steps_by_index.get(step.index, step)
        if own.monitor is None and step.monitor is not None:
            own = step
        self._announced_at = announced_at
        self._next_k = 1
        self._current_step = own
        self._primary_window = own.index not in self.ground_truth
        if own.monitor is None:
            self._plan = self._baseline_plan()
            self._behavior = None
            self._evaluator = None
            self._snapshot = None
            return
        behavior = self.script.get(own.index) or CompleteAt(offset_s=4.0)
        self._behavior = behavior
        self._plan = self._plan_step(own, behavior, announced_at)
        if self._primary_window:
            self.ground_truth[own.index] = None
        self._evaluator = build_evaluator(
            own.monitor, self._scene_targets, self.side, announced_at
        )
        self._snapshot = self._clean_frame(announced_at, 0)

    def frames_until(self, t: float) -> list[PoseFrame]:
        out: list[PoseFrame] = []
        while True:
            ts = self._announced_at + self._next_k / self.hz
            if ts > t + 1e-9:
                break
            out.append(self._emit(ts, self._next_k))
            self._next_k += 1
        return out

    # -- frame construction ----------------------------------------------

    def _baseline_plan(self) -> _Plan:
        return _Plan()

    def _clean_frame(self, ts: float, k: int) -> PoseFrame:
        joints = {}
        for joint in self.profile.rom_limits:
            track = self._plan.joint_tracks.get(joint)
            angle = track(k, ts) if track else self.profile.rest_angle(joint)
            joints[joint] = self.profile.clamp(joint, angle)
        hands = {}
        for hand_side, rest in HAND_REST.items():
            track = self._plan.hand_tracks.get(hand_side)
            hands[hand_side] = track(k, ts) if track else rest
        objects = {}
        for obj, pos in self._scene_objects.items():
            track = self._plan.object_tracks.get(obj)
            objects[obj] = track(k, ts) if track else ObjectState(pos, "none")
        return PoseFrame(ts=ts, joints=joints, hands=hands, objects=objects)

    def _emit(self, ts: float, k: int) -> PoseFrame:
        frame = self._clean_frame(ts, k)
        step = self._current_step
        monitored = step is not None and step.monitor is not None

        truth_at: float | None = None
        if monitored and self._evaluator is not None:
            self._evaluator.feed(frame)
            if self._evaluator.poll(ts):
                truth_at = ts
                if (
                    self._primary_window
                    and self.ground_truth.get(step.index) is None
                ):
                    self.ground_truth[step.index] = ts

        observed = frame
        if monitored:
            behavior = self._behavior or CompleteAt(offset_s=4.0)
            never_completes = not isinstance(behavior, CompleteAt)
            truly_done = self.ground_truth.get(step.index) is not None or (
                truth_at is not None
            )
            if never_completes and self.noise.fp_rate > 0.0:
                if self._rng.random() < self.noise.fp_rate:
                    observed = self._overlay_satisfying(observed)
            elif (
                isinstance(behavior, CompleteAt)
                and truly_done
                and self.noise.fn_rate > 0.0
            ):
                if self._rng.random() < self.noise.fn_rate:
                    observed = self._overlay_snapshot(observed)

        if self.noise.dropout_rate > 0.0:
            validity = {}
            for channel in self._frame_channels(observed):
                if self._rng.random() < self.noise.dropout_rate:
                    validity[channel] = False
            if validity:
                observed = PoseFrame(
                    ts=observed.ts,
                    joints=observed.joints,
                    hands=observed.hands,
                    objects=observed.objects,
                    validity=validity,
                )
        return observed

    @staticmethod
    def _frame_channels(frame: PoseFrame) -> list[str]:
        channels = [joint_channel(j) for j in sorted(frame.joints)]
        channels += [hand_channel(s) for s in sorted(frame.hands)]
        channels += [object_channel(o) for o in sorted(frame.objects)]
        return channels

    def _overlay_satisfying(self, frame: PoseFrame) -> PoseFrame:
        joints = dict(frame.joints)
        for joint, value in self._plan.sat_joints.items():
            joints[joint] = self.profile.clamp(joint, value)
        hands = dict(frame.hands)
        hands.update(self._plan.sat_hands)
        objects = dict(frame.objects)
        objects.update(self._plan.sat_objects)
        return PoseFrame(ts=frame.ts, joints=joints, hands=hands, objects=objects)

    def _overlay_snapshot(self, frame: PoseFrame) -> PoseFrame:
        snap = self._snapshot
        if snap is None:
            return frame
        return PoseFrame(
            ts=frame.ts, joints=snap.joints, hands=snap.hands, objects=snap.objects
        )

    # -- planning ----------------------------------------------------------

    def _plan_step(
        self,
        step: Step,
        behavior: Behavior,
        announced_at: float,
        dry_run: bool = False,
    ) -> _Plan:
        plan = _Plan()
        plan.completes = isinstance(behavior, CompleteAt)
        complete_at = (
            announced_at + behavior.offset_s
            if isinstance(behavior, CompleteAt)
            else None
        )
        assert step.monitor is not None
        self._plan_predicate(
            step.index, step.monitor, behavior, announced_at, complete_at, plan
        )
        del dry_run
        return plan

    def _move_window(
        self, announced_at: float, complete_at: float, crossing_u: float
    ) -> tuple[float, float]:
        """Start time and duration so the crossing lands at complete_at."""
        duration = BASE_MOVE_DURATION_S / self.profile.movement_speed_scale
        start = complete_at - crossing_u * duration
        earliest = announced_at + 0.05
        if start < earliest:
            duration = (complete_at - earliest) / max(crossing_u, 1e-6)
            start = complete_at - crossing_u * duration
        return start, duration

    def _plan_predicate(
        self,
        step_index: int,
        pred: Predicate,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        if isinstance(pred, All):
            for child in pred.items:
                self._plan_predicate(
                    step_index, child, behavior, announced_at, complete_at, plan
                )
            return
        if isinstance(pred, Any):
            errors: list[str] = []
            for child in pred.items:
                try:
                    self._plan_predicate(
                        step_index, child, behavior, announced_at, complete_at, plan
                    )
                    return
                except InfeasibleStepError as exc:
                    errors.append(str(exc))
            raise InfeasibleStepError(
                step_index, "no disjunct is feasible: " + "; ".join(errors)
            )
        if isinstance(pred, Hold):
            inner_at = (
                None
                if complete_at is None
                else max(complete_at - pred.seconds, announced_at + 0.3)
            )
            self._plan_predicate(
                step_index, pred.atom, behavior, announced_at, inner_at, plan
            )
            return
        if isinstance(pred, Count):
            self._plan_count(
                step_index, pred, behavior, announced_at, complete_at, plan
            )
            return
        if isinstance(pred, JointAngle):
            self._plan_joint_band(
                step_index, pred, behavior, announced_at, complete_at, plan
            )
            return
        if isinstance(pred, Rest):
            self._plan_rest(step_index, pred, behavior, announced_at, complete_at, plan)
            return
        if isinstance(pred, HandAt):
            self._plan_hand_at(
                step_index, pred, behavior, announced_at, complete_at, plan
            )
            return
        if isinstance(pred, ObjectAt):
            self._plan_carry(
                step_index, pred, behavior, announced_at, complete_at, plan
            )
            return
        if isinstance(pred, Grasp):
            self._plan_grip(
                step_index, pred.obj, False, behavior, announced_at, complete_at, plan
            )
            return
        if isinstance(pred, Release):
            self._plan_grip(
                step_index, pred.obj, True, behavior, announced_at, complete_at, plan
            )
            return
        raise InfeasibleStepError(step_index, f"cannot plan {type(pred).__name__}")

    def _satisfying_band(
        self, step_index: int, atom: JointAngle
    ) -> tuple[float, float]:
        rom_lo, rom_hi = self.profile.rom(atom.joint)
        lo = max(atom.min_deg, rom_lo)
        hi = min(atom.max_deg, rom_hi)
        if lo > hi:
            raise InfeasibleStepError(
                step_index,
                f"band ({atom.min_deg}, {atom.max_deg}) for {atom.joint} lies "
                f"outside range of motion ({rom_lo}, {rom_hi})",
            )
        return lo, hi

    def _plan_joint_band(
        self,
        step_index: int,
        atom: JointAngle,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        joint = atom.joint
        rest = self.profile.rest_angle(joint)
        if isinstance(behavior, CompleteAt):
            lo, hi = self._satisfying_band(step_index, atom)
            mid = (lo + hi) / 2.0
            plan.sat_joints[joint] = mid
            if lo <= rest <= hi:
                # Already satisfying at rest: nothing to move, the other
                # channels (if any) gate the completion time.
                plan.joint_tracks[joint] = lambda k, ts: rest
                return
            edge = lo if rest < lo else hi
            span = mid - rest
            crossing_f = (edge - rest) / span if span else 1.0
            crossing_u = _inverse_smoothstep(crossing_f)
            assert complete_at is not None
            t0, dur = self._move_window(announced_at, complete_at, crossing_u)
            plan.joint_tracks[joint] = _ease(rest, rest, mid, t0, dur)
            return
        rom_lo, rom_hi = self.profile.rom(joint)
        lo = max(atom.min_deg, rom_lo)
        hi = min(atom.max_deg, rom_hi)
        mid = (lo + hi) / 2.0 if lo <= hi else rest
        plan.sat_joints[joint] = mid
        if isinstance(behavior, PartialAttempt):
            if rest < atom.min_deg:
                stop = self.profile.clamp(
                    joint, atom.min_deg - PARTIAL_BAND_MARGIN_DEG
                )
                stop = min(stop, atom.min_deg - PARTIAL_BAND_MARGIN_DEG)
                if stop <= rest:
                    plan.joint_tracks[joint] = lambda k, ts: rest
                    return
                t0 = announced_at + 0.5
                dur = BASE_MOVE_DURATION_S / self.profile.movement_speed_scale
                plan.joint_tracks[joint] = _ease(rest, rest, stop, t0, dur)
                return
            # Rest already at or above the band floor (or inside): hold
            # still so the step stays unsatisfied via its other channels.
            plan.joint_tracks[joint] = lambda k, ts: rest
            return
        plan.joint_tracks[joint] = lambda k, ts: rest

    def _plan_rest(
        self,
        step_index: int,
        atom: Rest,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        joint = atom.joint
        rest = self.profile.rest_angle(joint)
        cycle = (REST_WIGGLE_DEG, 0.0, -REST_WIGGLE_DEG)

        def wiggle(k: int, ts: float) -> float:
            return rest + cycle[k % 3]

        if isinstance(behavior, CompleteAt):
            assert complete_at is not None
            freeze_at = max(complete_at - atom.seconds, announced_at)

            def track(k: int, ts: float) -> float:
                if ts >= freeze_at - 1e-9:
                    return rest
                return wiggle(k, ts)

            plan.joint_tracks[joint] = track
        else:
            plan.joint_tracks[joint] = wiggle
        # A single frame cannot fake stillness, so there is no satisfying
        # overlay for rest monitors.

    def _plan_hand_at(
        self,
        step_index: int,
        atom: HandAt,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        target = self._scene_targets.get(atom.target)
        if target is None:
            raise InfeasibleStepError(
                step_index, f"target {atom.target!r} has no scene position"
            )
        rest = HAND_REST[self.side]
        span = _dist3(rest, target)
        plan.sat_hands[self.side] = target
        if isinstance(behavior, CompleteAt):
            if span <= atom.radius_cm:
                plan.hand_tracks[self.side] = lambda k, ts: rest
                return
            crossing_f = (span - atom.radius_cm) / span
            crossing_u = _inverse_smoothstep(crossing_f)
            assert complete_at is not None
            t0, dur = self._move_window(announced_at, complete_at, crossing_u)
            plan.hand_tracks[self.side] = _ease3(rest, target, t0, dur)
            return
        if isinstance(behavior, PartialAttempt):
            stop_dist = (1.0 + behavior.fraction) * atom.radius_cm
            if span <= stop_dist:
                plan.hand_tracks[self.side] = lambda k, ts: rest
                return
            stop = _lerp3(rest, target, (span - stop_dist) / span)
            t0 = announced_at + 0.5
            dur = BASE_MOVE_DURATION_S / self.profile.movement_speed_scale
            plan.hand_tracks[self.side] = _ease3(rest, stop, t0, dur)
            return
        plan.hand_tracks[self.side] = lambda k, ts: rest

    def _plan_carry(
        self,
        step_index: int,
        atom: ObjectAt,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        target = self._scene_targets.get(atom.target)
        origin = self._scene_objects.get(atom.obj)
        if target is None or origin is None:
            raise InfeasibleStepError(
                step_index,
                f"object {atom.obj!r} or target {atom.target!r} missing a position",
            )
        side = self.side
        plan.sat_objects[atom.obj] = ObjectState(target, side)
        plan.sat_hands[side] = target
        span = _dist3(origin, target)
        if isinstance(behavior, CompleteAt):
            if span <= atom.radius_cm:
                path: Callable[[int, float], Vec3] = lambda k, ts: origin
            else:
                crossing_f = (span - atom.radius_cm) / span
                crossing_u = _inverse_smoothstep(crossing_f)
                assert complete_at is not None
                t0, dur = self._move_window(announced_at, complete_at, crossing_u)
                path = _ease3(origin, target, t0, dur)
            plan.object_tracks[atom.obj] = lambda k, ts: ObjectState(
                path(k, ts), side
            )
            plan.hand_tracks[side] = path
            return
        if isinstance(behavior, PartialAttempt):
            stop_dist = (1.0 + behavior.fraction) * atom.radius_cm
            if span > stop_dist:
                stop = _lerp3(origin, target, (span - stop_dist) / span)
                t0 = announced_at + 0.5
                dur = BASE_MOVE_DURATION_S / self.profile.movement_speed_scale
                path = _ease3(origin, stop, t0, dur)
                plan.object_tracks[atom.obj] = lambda k, ts: ObjectState(
                    path(k, ts), side
                )
                plan.hand_tracks[side] = path
                return
        plan.object_tracks[atom.obj] = lambda k, ts: ObjectState(origin, "none")

    def _plan_grip(
        self,
        step_index: int,
        obj: str,
        releasing: bool,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        origin = self._scene_objects.get(obj)
        if origin is None:
            raise InfeasibleStepError(step_index, f"object {obj!r} has no position")
        side = self.side
        held_before = side if releasing else "none"
        held_after = "none" if releasing else side
        plan.sat_objects[obj] = ObjectState(origin, held_after)
        if isinstance(behavior, CompleteAt):
            assert complete_at is not None
            flip_at = complete_at

            def track(k: int, ts: float) -> ObjectState:
                held = held_after if ts >= flip_at - 1e-9 else held_before
                return ObjectState(origin, held)

            plan.object_tracks[obj] = track
            if not releasing:
                rest = HAND_REST[side]
                crossing_u = 1.0
                t0, dur = self._move_window(announced_at, flip_at, crossing_u)
                plan.hand_tracks[side] = _ease3(rest, origin, t0, dur)
            else:
                plan.hand_tracks[side] = lambda k, ts: origin
            return
        # NoAttempt and PartialAttempt never flip the grip.
        plan.object_tracks[obj] = lambda k, ts: ObjectState(origin, held_before)
        if releasing:
            plan.hand_tracks[side] = lambda k, ts: origin
        elif isinstance(behavior, PartialAttempt):
            rest = HAND_REST[side]
            near = _lerp3(rest, origin, 0.8)
            t0 = announced_at + 0.5
            dur = BASE_MOVE_DURATION_S / self.profile.movement_speed_scale
            plan.hand_tracks[side] = _ease3(rest, near, t0, dur)

    def _plan_count(
        self,
        step_index: int,
        pred: Count,
        behavior: Behavior,
        announced_at: float,
        complete_at: float | None,
        plan: _Plan,
    ) -> None:
        atom = pred.atom
        n = pred.times
        period = 1.0
        if isinstance(behavior, CompleteAt):
            assert complete_at is not None
            window = complete_at - announced_at
            period = min(1.0, max((window - 0.2) / n, 0.3))
            edges = [complete_at - (n - 1 - i) * period for i in range(n)]
        elif isinstance(behavior, PartialAttempt) and n > 1:
            horizon = announced_at + 6.0
            period = 1.0
            edges = [horizon - (n - 2 - i) * period for i in range(n - 1)]
        else:
            edges = []
        if isinstance(atom, (Grasp, Release)):
            obj = atom.obj
            origin = self._scene_objects.get(obj)
            if origin is None:
                raise InfeasibleStepError(step_index, f"object {obj!r} has no position")
            side = self.side
            releasing = isinstance(atom, Release)
            resting_state = side if releasing else "none"
            pulsed_state = "none" if releasing else side

            def track(k: int, ts: float) -> ObjectState:
                held = resting_state
                for i, edge in enumerate(edges):
                    if ts >= edge - 1e-9:
                        is_last = i == len(edges) - 1
                        within_pulse = ts < edge + period / 2.0 - 1e-9
                        if is_last or within_pulse:
                            held = pulsed_state
                        else:
                            held = resting_state
                return ObjectState(origin, held)

            plan.object_tracks[obj] = track
            plan.sat_objects[obj] = ObjectState(origin, pulsed_state)
            plan.hand_tracks[side] = lambda k, ts: origin
            return
        if isinstance(atom, JointAngle):
            joint = atom.joint
            rest = self.profile.rest_angle(joint)
            lo, hi = self._satisfying_band(step_index, atom)
            mid = (lo + hi) / 2.0
            plan.sat_joints[joint] = mid
            rom_lo, rom_hi = self.profile.rom(joint)
            out_value = lo - PARTIAL_BAND_MARGIN_DEG
            if out_value < rom_lo:
                out_value = hi + PARTIAL_BAND_MARGIN_DEG
                if out_value > rom_hi:
                    raise InfeasibleStepError(
                        step_index,
                        f"{joint} cannot leave the band within its range of motion",
                    )

            def jtrack(k: int, ts: float) -> float:
                value = out_value
                for i, edge in enumerate(edges):
                    if ts >= edge - 1e-9:
                        is_last = i == len(edges) - 1
                        within_pulse = ts < edge + period / 2.0 - 1e-9
                        value = mid if (is_last or within_pulse) else out_value
                return value

            plan.joint_tracks[joint] = jtrack
            return
        raise InfeasibleStepError(
            step_index, f"count over {type(atom).__name__} is not supported"
        )


def frames_to_csv(frames: Iterable[PoseFrame]) -> str:
    """Flatten frames into CSV with one column per channel component."""
    frames = list(frames)
    if not frames:
        return ""
    first = frames[0]
    joints = sorted(first.joints)
    hands = sorted(first.hands)
    objects = sorted(first.objects)
    header = ["ts"]
    header += [joint_channel(j) for j in joints]
    for side in hands:
        header += [f"{hand_channel(side)}.{axis}" for axis in "xyz"]
    for obj in objects:
        header += [f"{object_channel(obj)}.{axis}" for axis in "xyz"]
        header.append(f"{object_channel(obj)}.held_by")
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    for frame in frames:
        row: list[object] = [f"{frame.ts:.6f}"]
        row += [f"{frame.joints[j]:.4f}" for j in joints]
        for side in hands:
            row += [f"{c:.4f}" for c in frame.hands[side]]
        for obj in objects:
            state = frame.objects[obj]
            row += [f"{c:.4f}" for c in state.position]
            row.append(state.held_by)
        writer.writerow(row)
    return buffer.getvalue()
