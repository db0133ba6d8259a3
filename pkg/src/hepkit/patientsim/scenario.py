"""Serializable bundles of patient profile, behavior script, and noise."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from hepkit.dsl import Program
from hepkit.patientsim.noise import NoiseModel
from hepkit.patientsim.profile import PatientProfile
from hepkit.patientsim.script import (
    Behavior,
    behavior_from_json,
    behavior_to_json,
    prelabel_of,
)


class ScenarioError(ValueError):
    """Raised when a scenario document cannot be decoded."""


@dataclass(frozen=True)
class Scenario:
    """Everything needed to replay one simulated session.

    The script is keyed by program step index and must cover every
    monitored step of the program it is paired with at run time.
    """

    profile: PatientProfile = field(default_factory=PatientProfile)
    script: dict[int, Behavior] = field(default_factory=dict)
    noise: NoiseModel = field(default_factory=NoiseModel)
    hz: float = 10.0

    def prelabels(self) -> dict[int, str]:
        return {index: prelabel_of(b) for index, b in self.script.items()}

    def to_json(self) -> dict:
        return {
            "profile": {
                "rom_limits": {
                    joint: list(span) for joint, span in self.profile.rom_limits.items()
                },
                "movement_speed_scale": self.profile.movement_speed_scale,
                "affected_side": self.profile.affected_side,
            },
            "script": [
                {"step": index, **behavior_to_json(behavior)}
                for index, behavior in sorted(self.script.items())
            ],
            "noise": {
                "fp_rate": self.noise.fp_rate,
                "fn_rate": self.noise.fn_rate,
                "dropout_rate": self.noise.dropout_rate,
                "seed": self.noise.seed,
            },
            "hz": self.hz,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Scenario":
        try:
            raw_profile = doc.get("profile", {})
            rom = {
                joint: (float(span[0]), float(span[1]))
                for joint, span in raw_profile.get("rom_limits", {}).items()
            }
            profile_kwargs = {}
            if rom:
                profile_kwargs["rom_limits"] = rom
            if "movement_speed_scale" in raw_profile:
                profile_kwargs["movement_speed_scale"] = float(
                    raw_profile["movement_speed_scale"]
                )
            if "affected_side" in raw_profile:
                profile_kwargs["affected_side"] = raw_profile["affected_side"]
            profile = PatientProfile(**profile_kwargs)
            script = {
                int(entry["step"]): behavior_from_json(entry)
                for entry in doc.get("script", [])
            }
            raw_noise = doc.get("noise", {})
            noise = NoiseModel(
                fp_rate=float(raw_noise.get("fp_rate", 0.0)),
                fn_rate=float(raw_noise.get("fn_rate", 0.0)),
                dropout_rate=float(raw_noise.get("dropout_rate", 0.0)),
                seed=int(raw_noise.get("seed", 0)),
            )
            hz = float(doc.get("hz", 10.0))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ScenarioError(f"bad scenario document: {exc}") from exc
        return cls(profile=profile, script=script, noise=noise, hz=hz)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Scenario":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ScenarioError("scenario document must be a JSON object")
        return cls.from_json(doc)


def script_for_program(
    program: Program, behaviors: list[Behavior]
) -> dict[int, Behavior]:
    """Assign behaviors to the program's monitored steps in order."""
    monitored = [step.index for step in program.steps if step.monitor is not None]
    if len(behaviors) != len(monitored):
        raise ScenarioError(
            f"{len(behaviors)} behaviors for {len(monitored)} monitored steps"
        )
    return dict(zip(monitored, behaviors))
