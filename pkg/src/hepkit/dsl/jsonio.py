"""JSON encoding of program ASTs for the HTTP service and stored records."""
from __future__ import annotations

from typing import Any as AnyType

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
    SceneDecl,
    Step,
)


def predicate_to_json(pred: Predicate) -> dict[str, AnyType]:
    if isinstance(pred, All):
        return {"op": "all", "items": [predicate_to_json(p) for p in pred.items]}
    if isinstance(pred, Any):
        return {"op": "any", "items": [predicate_to_json(p) for p in pred.items]}
    if isinstance(pred, Hold):
        return {"op": "hold", "atom": predicate_to_json(pred.atom), "seconds": pred.seconds}
    if isinstance(pred, Count):
        return {"op": "count", "atom": predicate_to_json(pred.atom), "times": pred.times}
    if isinstance(pred, JointAngle):
        return {"op": "joint_angle", "joint": pred.joint,
                "min_deg": pred.min_deg, "max_deg": pred.max_deg}
    if isinstance(pred, HandAt):
        return {"op": "hand_at", "target": pred.target, "radius_cm": pred.radius_cm}
    if isinstance(pred, Grasp):
        return {"op": "grasp", "object": pred.obj}
    if isinstance(pred, Release):
        return {"op": "release", "object": pred.obj}
    if isinstance(pred, ObjectAt):
        return {"op": "object_at", "object": pred.obj, "target": pred.target,
                "radius_cm": pred.radius_cm}
    if isinstance(pred, Rest):
        return {"op": "rest", "joint": pred.joint, "seconds": pred.seconds}
    raise TypeError(f"not a predicate: {pred!r}")


def predicate_from_json(doc: dict[str, AnyType]) -> Predicate:
    op = doc["op"]
    if op == "all":
        return All(tuple(predicate_from_json(p) for p in doc["items"]))
    if op == "any":
        return Any(tuple(predicate_from_json(p) for p in doc["items"]))
    if op == "hold":
        atom = predicate_from_json(doc["atom"])
        return Hold(atom=_as_atom(atom), seconds=float(doc["seconds"]))
    if op == "count":
        atom = predicate_from_json(doc["atom"])
        return Count(atom=_as_atom(atom), times=int(doc["times"]))
    if op == "joint_angle":
        return JointAngle(doc["joint"], float(doc["min_deg"]), float(doc["max_deg"]))
    if op == "hand_at":
        return HandAt(doc["target"], float(doc["radius_cm"]))
    if op == "grasp":
        return Grasp(doc["object"])
    if op == "release":
        return Release(doc["object"])
    if op == "object_at":
        return ObjectAt(doc["object"], doc["target"], float(doc["radius_cm"]))
    if op == "rest":
        return Rest(doc["joint"], float(doc["seconds"]))
    raise ValueError(f"unknown predicate op {op!r}")


def _as_atom(pred: Predicate) -> Atom:
    if isinstance(pred, (All, Any, Hold, Count)):
        raise ValueError("hold/count take a bare atom")
    return pred


def program_to_json(program: Program) -> dict[str, AnyType]:
    return {
        "name": program.name,
        "scene": [
            {"kind": d.kind, "id": d.ident,
             "position": list(d.position) if d.position is not None else None}
            for d in program.scene
        ],
        "steps": [
            {
                "index": s.index,
                "utterance": s.utterance,
                "monitor": predicate_to_json(s.monitor) if s.monitor is not None else None,
                "timeout": s.timeout,
                "fallback": (
                    {"utterance": s.fallback.utterance,
                     "monitor": predicate_to_json(s.fallback.monitor),
                     "timeout": s.fallback.timeout}
                    if s.fallback is not None else None
                ),
            }
            for s in program.steps
        ],
    }


def program_from_json(doc: dict[str, AnyType]) -> Program:
    scene = tuple(
        SceneDecl(
            kind=d["kind"],
            ident=d["id"],
            position=tuple(float(v) for v in d["position"]) if d.get("position") else None,
        )
        for d in doc.get("scene", [])
    )
    steps = []
    for s in doc.get("steps", []):
        fallback = None
        if s.get("fallback"):
            fb = s["fallback"]
            fallback = Fallback(
                utterance=fb["utterance"],
                monitor=predicate_from_json(fb["monitor"]),
                timeout=float(fb["timeout"]),
            )
        steps.append(Step(
            index=int(s["index"]),
            utterance=s["utterance"],
            monitor=predicate_from_json(s["monitor"]) if s.get("monitor") else None,
            timeout=float(s["timeout"]) if s.get("timeout") is not None else None,
            fallback=fallback,
        ))
    return Program(name=doc.get("name", ""), scene=scene, steps=tuple(steps))
