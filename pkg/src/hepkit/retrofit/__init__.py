"""Retrofit analysis: can fixed templates express what clinicians write?

Checks prescriptions against parameterised goal templates, classifies what
falls outside the template knobs, and benchmarks the fixed paradigm against
direct program generation over a bundled 40-prescription corpus.
"""

from .benchmark import (
    BenchmarkReport,
    BenchmarkRow,
    ParadigmComparison,
    generated_program_parses,
    paradigm_comparison,
    run_benchmark,
)
from .check import (
    COMPENSATORY_STRATEGY_OPTIONS,
    CONTINGENCY,
    MOTOR_PRIMING,
    NEW_EQUIPMENT_USE,
    PROCEDURAL_VARIATION,
    TRANSLATION_CATEGORIES,
    RetrofitVerdict,
    VerdictError,
    classify_incompatibility,
    retrofit_check,
)
from .corpus import (
    AUTHORED,
    CORPUS_SIZE,
    SYNTHETIC,
    CorpusEntry,
    CorpusError,
    load_corpus,
    load_manifest,
)
from .match import MatchOutcome, StepKey, match_against_template, step_key
from .schema import (
    SIDE_DOMAIN,
    TemplateError,
    TemplateParameters,
    TemplateSchema,
    bundled_templates,
    template_for_goal,
    template_from_worksheet,
)

__all__ = [
    "AUTHORED",
    "BenchmarkReport",
    "BenchmarkRow",
    "COMPENSATORY_STRATEGY_OPTIONS",
    "CONTINGENCY",
    "CORPUS_SIZE",
    "CorpusEntry",
    "CorpusError",
    "MOTOR_PRIMING",
    "MatchOutcome",
    "NEW_EQUIPMENT_USE",
    "PROCEDURAL_VARIATION",
    "ParadigmComparison",
    "RetrofitVerdict",
    "SIDE_DOMAIN",
    "SYNTHETIC",
    "StepKey",
    "TRANSLATION_CATEGORIES",
    "TemplateError",
    "TemplateParameters",
    "TemplateSchema",
    "VerdictError",
    "bundled_templates",
    "classify_incompatibility",
    "generated_program_parses",
    "load_corpus",
    "load_manifest",
    "match_against_template",
    "paradigm_comparison",
    "retrofit_check",
    "run_benchmark",
    "step_key",
    "template_for_goal",
    "template_from_worksheet",
]
