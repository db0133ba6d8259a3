"""Program execution runtime: clocks, frames, evaluators, sessions."""

from hepkit.runtime.clock import ClockError, PacedClock, VirtualClock
from hepkit.runtime.evaluate import (
    REST_TRAVEL_DEG,
    ChannelMissingError,
    build_evaluator,
    eval_predicate,
)
from hepkit.runtime.frames import (
    FrameSource,
    ListFrameSource,
    ObjectState,
    PoseFrame,
    Vec3,
    distance,
    hand_channel,
    joint_channel,
    object_channel,
)
from hepkit.runtime.pacing import (
    ADEQUATE,
    DELAYED,
    PACING_THRESHOLD_S,
    PREMATURE,
    PacingError,
    PacingVerdict,
    pacing_of,
)
from hepkit.runtime.session import (
    ADVANCED,
    ANNOUNCE_DWELL_S,
    ANNOUNCED,
    COMPLETED,
    FALLBACK_MONITORING,
    MONITORING,
    TIMED_OUT,
    InvalidProgramError,
    SessionError,
    SessionEvent,
    SessionLog,
    StepRecord,
    TruncatedSessionError,
    run_session,
)

__all__ = [
    "ADEQUATE",
    "ADVANCED",
    "ANNOUNCED",
    "ANNOUNCE_DWELL_S",
    "COMPLETED",
    "DELAYED",
    "FALLBACK_MONITORING",
    "MONITORING",
    "PACING_THRESHOLD_S",
    "PREMATURE",
    "REST_TRAVEL_DEG",
    "TIMED_OUT",
    "ChannelMissingError",
    "ClockError",
    "FrameSource",
    "InvalidProgramError",
    "ListFrameSource",
    "ObjectState",
    "PacedClock",
    "PacingError",
    "PacingVerdict",
    "PoseFrame",
    "SessionError",
    "SessionEvent",
    "SessionLog",
    "StepRecord",
    "TruncatedSessionError",
    "Vec3",
    "VirtualClock",
    "build_evaluator",
    "distance",
    "eval_predicate",
    "hand_channel",
    "joint_channel",
    "object_channel",
    "pacing_of",
    "run_session",
]
