"""Simulated standardized patient: profiles, scripts, noise, frames."""

from hepkit.patientsim.noise import NoiseError, NoiseModel, ZERO_NOISE
from hepkit.patientsim.profile import (
    DEFAULT_ROM,
    PatientProfile,
    ProfileError,
    REST_ANGLE_DEG,
    mrc_speed_scale,
    standard_patient,
)
from hepkit.patientsim.scenario import Scenario, ScenarioError, script_for_program
from hepkit.patientsim.script import (
    Behavior,
    CompleteAt,
    NoAttempt,
    PartialAttempt,
    PRELABEL_COMPLETE,
    PRELABEL_INCOMPLETE,
    ScriptError,
    behavior_from_json,
    behavior_to_json,
    make_prelabel_mix,
    prelabel_of,
)
from hepkit.patientsim.simulate import (
    HAND_REST,
    InfeasibleStepError,
    ScenarioMismatchError,
    SimulatedPatient,
    frames_to_csv,
)

__all__ = [
    "Behavior",
    "CompleteAt",
    "DEFAULT_ROM",
    "HAND_REST",
    "InfeasibleStepError",
    "NoAttempt",
    "NoiseError",
    "NoiseModel",
    "PRELABEL_COMPLETE",
    "PRELABEL_INCOMPLETE",
    "PartialAttempt",
    "PatientProfile",
    "ProfileError",
    "REST_ANGLE_DEG",
    "Scenario",
    "ScenarioError",
    "ScenarioMismatchError",
    "ScriptError",
    "SimulatedPatient",
    "ZERO_NOISE",
    "behavior_from_json",
    "behavior_to_json",
    "frames_to_csv",
    "make_prelabel_mix",
    "mrc_speed_scale",
    "prelabel_of",
    "script_for_program",
    "standard_patient",
]
