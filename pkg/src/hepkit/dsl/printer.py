"""Canonical source formatting.

``parse_program(print_program(p)) == p`` for every valid program, and the
output of ``print_program`` is a fixed point of parse-then-print, so a
single canonical form exists per AST and can be frozen in golden files.
"""
from __future__ import annotations

from .ast import (
    All,
    Any,
    Atom,
    Count,
    Fallback,
    Grasp,
    HandAt,
    Hold,
    JointAngle,
    ObjectAt,
    Predicate,
    Program,
    Release,
    Rest,
)

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def fmt_num(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def fmt_dur(seconds: float) -> str:
    return fmt_num(seconds) + "s"


def fmt_string(text: str) -> str:
    return '"' + "".join(_STRING_ESCAPES.get(ch, ch) for ch in text) + '"'


def fmt_atom(atom: Atom) -> str:
    if isinstance(atom, JointAngle):
        return f"joint_angle({atom.joint}, {fmt_num(atom.min_deg)}, {fmt_num(atom.max_deg)})"
    if isinstance(atom, HandAt):
        return f"hand_at({atom.target}, {fmt_num(atom.radius_cm)})"
    if isinstance(atom, Grasp):
        return f"grasp({atom.obj})"
    if isinstance(atom, Release):
        return f"release({atom.obj})"
    if isinstance(atom, ObjectAt):
        return f"object_at({atom.obj}, {atom.target}, {fmt_num(atom.radius_cm)})"
    if isinstance(atom, Rest):
        return f"rest({atom.joint}, {fmt_dur(atom.seconds)})"
    raise TypeError(f"not an atom: {atom!r}")


def fmt_predicate(pred: Predicate) -> str:
    if isinstance(pred, All):
        return "all(" + ", ".join(fmt_predicate(p) for p in pred.items) + ")"
    if isinstance(pred, Any):
        return "any(" + ", ".join(fmt_predicate(p) for p in pred.items) + ")"
    if isinstance(pred, Hold):
        return f"hold({fmt_atom(pred.atom)}, {fmt_dur(pred.seconds)})"
    if isinstance(pred, Count):
        return f"count({fmt_atom(pred.atom)}, {pred.times})"
    return fmt_atom(pred)


def _fmt_fallback(fb: Fallback) -> str:
    return (f"  on timeout: say {fmt_string(fb.utterance)} "
            f"expect within {fmt_dur(fb.timeout)}: {fmt_predicate(fb.monitor)}")


def print_program(program: Program) -> str:
    lines: list[str] = [f"program {fmt_string(program.name)}"]
    for decl in program.scene:
        if decl.position is not None:
            x, y, z = decl.position
            lines.append(f"scene {decl.kind} {decl.ident} "
                         f"at ({fmt_num(x)}, {fmt_num(y)}, {fmt_num(z)})")
        else:
            lines.append(f"scene {decl.kind} {decl.ident}")
    for step in program.steps:
        lines.append(f"step {step.index}: say {fmt_string(step.utterance)}")
        if step.monitor is not None and step.timeout is not None:
            lines.append(f"  expect within {fmt_dur(step.timeout)}: "
                         f"{fmt_predicate(step.monitor)}")
        if step.fallback is not None:
            lines.append(_fmt_fallback(step.fallback))
    return "\n".join(lines) + "\n"
