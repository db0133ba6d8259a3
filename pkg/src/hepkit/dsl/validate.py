"""Semantic validation of parsed or programmatically built programs.

Each violated rule produces a :class:`Diagnostic` whose ``code`` names the
rule and whose ``step_index`` points at the offending step where one
exists.  Line and column are zero for AST-level checks.
"""
from __future__ import annotations

from .ast import (
    All,
    Any,
    CANONICAL_JOINTS,
    Count,
    Grasp,
    HandAt,
    Hold,
    JointAngle,
    MAX_PREDICATE_DEPTH,
    ObjectAt,
    Predicate,
    Program,
    Release,
    Rest,
    SCENE_KINDS,
    Step,
    iter_atoms,
    predicate_depth,
)
from .parser import Diagnostic


def _diag(code: str, message: str, step: int | None = None) -> Diagnostic:
    return Diagnostic(code, message, 0, 0, step_index=step)


def _check_predicate(
    pred: Predicate,
    step: Step,
    timeout: float | None,
    declared: dict[str, str],
    referenced_targets: set[str],
    out: list[Diagnostic],
) -> None:
    idx = step.index
    depth = predicate_depth(pred)
    if depth > MAX_PREDICATE_DEPTH:
        out.append(_diag("DEPTH_EXCEEDED",
                         f"predicate depth {depth} exceeds {MAX_PREDICATE_DEPTH}", idx))

    def visit(p: Predicate) -> None:
        if isinstance(p, (All, Any)):
            for item in p.items:
                visit(item)
            return
        if isinstance(p, Hold):
            if p.seconds <= 0:
                out.append(_diag("BAD_HOLD_DURATION", "hold duration must be positive", idx))
            elif timeout is not None and p.seconds >= timeout:
                out.append(_diag(
                    "HOLD_EXCEEDS_TIMEOUT",
                    f"hold of {p.seconds:g}s cannot fit inside a {timeout:g}s timeout", idx))
            visit(p.atom)
            return
        if isinstance(p, Count):
            if p.times < 1:
                out.append(_diag("BAD_COUNT", "count requires at least one repetition", idx))
            visit(p.atom)
            return
        # atoms
        if isinstance(p, JointAngle):
            _require(p.joint, "joint", declared, idx, out)
            if not (0 <= p.min_deg < p.max_deg < 360):
                out.append(_diag(
                    "BAD_ANGLE_RANGE",
                    f"angle range ({p.min_deg:g}, {p.max_deg:g}) must satisfy "
                    "0 <= min < max < 360", idx))
        elif isinstance(p, HandAt):
            _require(p.target, "target", declared, idx, out)
            referenced_targets.add(p.target)
            if p.radius_cm <= 0:
                out.append(_diag("BAD_RADIUS", "radius must be positive", idx))
        elif isinstance(p, (Grasp, Release)):
            _require(p.obj, "object", declared, idx, out)
        elif isinstance(p, ObjectAt):
            _require(p.obj, "object", declared, idx, out)
            _require(p.target, "target", declared, idx, out)
            referenced_targets.add(p.target)
            if p.radius_cm <= 0:
                out.append(_diag("BAD_RADIUS", "radius must be positive", idx))
        elif isinstance(p, Rest):
            _require(p.joint, "joint", declared, idx, out)
            if p.seconds <= 0:
                out.append(_diag("BAD_REST_DURATION", "rest duration must be positive", idx))

    visit(pred)


def _require(ident: str, kind: str, declared: dict[str, str],
             idx: int, out: list[Diagnostic]) -> None:
    got = declared.get(ident)
    if got is None:
        out.append(_diag("UNDECLARED_ID", f"{kind} '{ident}' is not declared in scene", idx))
    elif got != kind:
        out.append(_diag("WRONG_KIND",
                         f"'{ident}' is declared as {got}, used as {kind}", idx))


def validate_semantics(program: Program) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    declared: dict[str, str] = {}
    positioned: set[str] = set()
    for decl in program.scene:
        if decl.kind not in SCENE_KINDS:
            out.append(_diag("BAD_SCENE_KIND", f"unknown scene kind '{decl.kind}'"))
            continue
        if decl.ident in declared:
            out.append(_diag("DUPLICATE_SCENE_ID", f"'{decl.ident}' declared twice"))
        declared[decl.ident] = decl.kind
        if decl.position is not None:
            positioned.add(decl.ident)
        if decl.kind == "joint" and decl.ident not in CANONICAL_JOINTS:
            out.append(_diag("UNKNOWN_JOINT", f"'{decl.ident}' is not a trackable joint"))
        if decl.kind == "joint" and decl.position is not None:
            out.append(_diag("JOINT_POSITION", "joint declarations take no position"))

    if not program.steps:
        out.append(_diag("EMPTY_PROGRAM", "program has no steps"))

    referenced_targets: set[str] = set()
    for i, step in enumerate(program.steps, start=1):
        if step.index != i:
            out.append(_diag(
                "NONCONTIGUOUS_STEPS",
                f"step indices must run 1..{len(program.steps)}; found {step.index} "
                f"in position {i}", step.index))
        if not step.utterance.strip():
            out.append(_diag("EMPTY_UTTERANCE", "utterance must be nonempty", step.index))
        if step.monitor is not None:
            if step.timeout is None:
                out.append(_diag("MISSING_TIMEOUT",
                                 "a monitored step requires a timeout", step.index))
            elif step.timeout <= 0:
                out.append(_diag("BAD_TIMEOUT", "timeout must be positive", step.index))
            _check_predicate(step.monitor, step, step.timeout, declared,
                             referenced_targets, out)
        elif step.timeout is not None:
            out.append(_diag("TIMEOUT_WITHOUT_MONITOR",
                             "timeout requires a monitor", step.index))
        if step.fallback is not None:
            if step.monitor is None:
                out.append(_diag("FALLBACK_WITHOUT_MONITOR",
                                 "fallback requires a primary expectation", step.index))
            fb = step.fallback
            if not fb.utterance.strip():
                out.append(_diag("EMPTY_UTTERANCE",
                                 "fallback utterance must be nonempty", step.index))
            if fb.timeout <= 0:
                out.append(_diag("BAD_TIMEOUT", "fallback timeout must be positive",
                                 step.index))
            _check_predicate(fb.monitor, step, fb.timeout, declared,
                             referenced_targets, out)

    for ident in sorted(referenced_targets):
        if declared.get(ident) == "target" and ident not in positioned:
            out.append(_diag("TARGET_POSITION_REQUIRED",
                             f"target '{ident}' is referenced by a monitor and needs "
                             "a declared position"))
    return out
