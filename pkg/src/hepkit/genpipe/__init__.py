"""Program generation from prescriptions, with fidelity and safety checks."""

from hepkit.genpipe.backends import (
    GenerationError,
    GeneratorBackend,
    Provenance,
    RemoteBackend,
    ReplayBackend,
    ReplayMissingError,
    TemplateBackend,
    TransportError,
    backend_from_env,
    generate_program,
)
from hepkit.genpipe.fidelity import (
    EXTRANEOUS,
    MATCH,
    OMITTED,
    REORDERED,
    SUBSTITUTED,
    SUBSTITUTION_BAND,
    FidelityReport,
    StepVerdict,
    levenshtein,
    normalize_utterance,
    similarity,
    validate_fidelity,
)
from hepkit.genpipe.generate import (
    DEFAULT_BAND_DEG,
    DEFAULT_HOLD_S,
    DEFAULT_RADIUS_CM,
    DEFAULT_REST_S,
    DEFAULT_TIMEOUT_S,
    RETRY_UTTERANCE,
    compile_prescription,
)
from hepkit.genpipe.hallucination import (
    SYMBOL_NOT_PRESCRIBED,
    THRESHOLD_TOLERANCE,
    THRESHOLD_UNPRESCRIBED,
    HallucinationFinding,
    detect_hallucinated_monitors,
)
from hepkit.genpipe.mutate import (
    MUTATION_KINDS,
    MutationError,
    MutationLabel,
    mutate_program,
)
from hepkit.genpipe.prompt import (
    PromptBundle,
    PromptConfig,
    PromptConfigError,
    assemble_prompt,
    default_prompt_config,
)
from hepkit.genpipe.prescription import (
    EntityAnnotation,
    Prescription,
    PrescriptionError,
    PrescriptionStep,
    Threshold,
    annotation_from_json,
    annotation_to_json,
    prescription_from_json,
    prescription_to_json,
)

__all__ = [
    "DEFAULT_BAND_DEG",
    "DEFAULT_HOLD_S",
    "DEFAULT_RADIUS_CM",
    "DEFAULT_REST_S",
    "DEFAULT_TIMEOUT_S",
    "EXTRANEOUS",
    "MATCH",
    "MUTATION_KINDS",
    "OMITTED",
    "REORDERED",
    "RETRY_UTTERANCE",
    "SUBSTITUTED",
    "SUBSTITUTION_BAND",
    "SYMBOL_NOT_PRESCRIBED",
    "THRESHOLD_TOLERANCE",
    "THRESHOLD_UNPRESCRIBED",
    "EntityAnnotation",
    "FidelityReport",
    "GenerationError",
    "GeneratorBackend",
    "HallucinationFinding",
    "MutationError",
    "MutationLabel",
    "Prescription",
    "PrescriptionError",
    "PrescriptionStep",
    "PromptBundle",
    "PromptConfig",
    "PromptConfigError",
    "Provenance",
    "RemoteBackend",
    "ReplayBackend",
    "ReplayMissingError",
    "StepVerdict",
    "TemplateBackend",
    "Threshold",
    "TransportError",
    "annotation_from_json",
    "annotation_to_json",
    "assemble_prompt",
    "backend_from_env",
    "compile_prescription",
    "default_prompt_config",
    "detect_hallucinated_monitors",
    "generate_program",
    "levenshtein",
    "mutate_program",
    "normalize_utterance",
    "prescription_from_json",
    "prescription_to_json",
    "similarity",
    "validate_fidelity",
]
