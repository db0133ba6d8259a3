"""Assembly of the four-part generation prompt.

The prompt hands a generator everything it needs to write a monitored
exercise program: the language reference, the monitoring API library, a
coding guideline, worked examples, and finally the prescription itself.
Assembly is a pure function so identical inputs always produce identical
prompts, which is what makes transcript replay possible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from hepkit.genpipe.prescription import Prescription, prescription_to_json


class PromptConfigError(ValueError):
    """A prompt component is missing or unusable."""


@dataclass(frozen=True)
class PromptConfig:
    """The four reusable prompt components, supplied by the caller."""

    language_doc: str
    api_library: str
    coding_guideline: str
    example_programs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class PromptBundle:
    """A fully assembled prompt: the four components plus the payload."""

    language_doc: str
    api_library: str
    coding_guideline: str
    example_programs: tuple[tuple[str, str], ...]
    prescription_payload: str

    @property
    def system_text(self) -> str:
        """Everything except the prescription, as one system message."""
        parts = [
            "## Language reference\n\n" + self.language_doc.strip(),
            "## Monitoring API library\n\n" + self.api_library.strip(),
            "## Coding guideline\n\n" + self.coding_guideline.strip(),
        ]
        examples = []
        for i, (rx_text, program_text) in enumerate(self.example_programs, 1):
            examples.append(
                f"### Example {i}\n\nPrescription:\n{rx_text.strip()}\n\n"
                f"Program:\n```\n{program_text.strip()}\n```"
            )
        parts.append("## Example programs\n\n" + "\n\n".join(examples))
        return "\n\n".join(parts) + "\n"

    @property
    def text(self) -> str:
        """The complete prompt in component order, payload last."""
        return (
            self.system_text
            + "\n## Prescription\n\n"
            + self.prescription_payload.strip()
            + "\n"
        )

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


def assemble_prompt(rx: Prescription, config: PromptConfig) -> PromptBundle:
    """Build the prompt bundle for one prescription.

    Raises :class:`PromptConfigError` when any component is empty, and
    otherwise returns a bundle that is byte-identical across calls with
    the same inputs.
    """
    for name in ("language_doc", "api_library", "coding_guideline"):
        if not getattr(config, name).strip():
            raise PromptConfigError(f"prompt component {name!r} is empty")
    if not config.example_programs:
        raise PromptConfigError("prompt component 'example_programs' is empty")
    payload = json.dumps(
        prescription_to_json(rx), indent=2, sort_keys=True, ensure_ascii=False
    )
    return PromptBundle(
        language_doc=config.language_doc,
        api_library=config.api_library,
        coding_guideline=config.coding_guideline,
        example_programs=tuple(config.example_programs),
        prescription_payload=payload,
    )


_LANGUAGE_DOC = """\
A program begins with `program "<name>"`, followed by scene declarations
and then numbered steps.  Scene declarations introduce every identifier a
monitor may reference: `scene target <id> at (x, y, z)` for reachable
locations, `scene object <id> at (x, y, z)` for graspable items, and
`scene joint <id>` for tracked joints.  Steps are numbered contiguously
from 1: `step <n>: say "<utterance>"`, optionally followed by an indented
`expect within <T>s: <predicate>` line and an indented
`on timeout: say "<utterance>" expect within <T>s: <predicate>` line.
Predicates combine atoms with `all(...)`, `any(...)`, `hold(<atom>, <T>s)`
and `count(<atom>, <n>)`, nested at most four levels deep.  Comments run
from `#` to end of line.  Durations are numbers suffixed with `s`.
"""

_API_LIBRARY = """\
joint_angle(joint, min_deg, max_deg) - the joint's angle is inside the
  inclusive band; 0 <= min < max < 360.
hand_at(target, radius_cm) - the exercising hand is within the radius of
  the declared target position.
grasp(object) - the tracked object transitions into the patient's hand.
release(object) - the tracked object transitions out of the hand.
object_at(object, target, radius_cm) - the object is within the radius of
  the target position.
rest(joint, seconds) - the joint barely moves for the given duration.
hold(atom, seconds) - the atom stays satisfied for the duration.
count(atom, times) - the atom becomes satisfied that many separate times.
Tracked joints are left/right shoulder_abduction, shoulder_flexion,
elbow_flexion, forearm_rotation, wrist_flexion, finger_spread and
thumb_opposition.
"""

_CODING_GUIDELINE = """\
1. Produce one `say` step per prescription step, in order, with the
   instruction text verbatim.
2. Monitor only what the prescription asks for: never invent joints,
   objects, targets or thresholds that the prescription does not mention.
3. Declare every identifier you reference in the scene section, and give
   targets used by monitors an explicit position.
4. Use `expect within 20s` unless the prescription states a duration, and
   leave purely verbal steps (setup, encouragement, final rest) without a
   monitor.
5. Keep hold times inside the step timeout and keep steps numbered 1..N
   with no gaps.
"""


def default_prompt_config() -> PromptConfig:
    """The shipped prompt components, with worked examples from fixtures."""
    from hepkit.fixtures import load_worksheet
    from hepkit.genpipe.generate import compile_prescription
    from hepkit.dsl import print_program

    examples = []
    for goal_id in (3, 6):
        rx = load_worksheet(goal_id).instantiate()
        rx_text = "\n".join(
            f"{i}. {step.text}" for i, step in enumerate(rx.steps, 1)
        )
        examples.append((rx_text, print_program(compile_prescription(rx))))
    return PromptConfig(
        language_doc=_LANGUAGE_DOC,
        api_library=_API_LIBRARY,
        coding_guideline=_CODING_GUIDELINE,
        example_programs=tuple(examples),
    )
