"""Language core: AST, parser, canonical printer, semantic checks, JSON IO."""
from .ast import (
    All,
    Any,
    Atom,
    CANONICAL_JOINTS,
    Count,
    Fallback,
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
    SceneDecl,
    Step,
    iter_atoms,
    predicate_depth,
)
from .jsonio import (
    predicate_from_json,
    predicate_to_json,
    program_from_json,
    program_to_json,
)
from .parser import Diagnostic, ProgramSyntaxError, parse_program, parse_source
from .printer import fmt_predicate, print_program
from .validate import validate_semantics

__all__ = [
    "All",
    "Any",
    "Atom",
    "CANONICAL_JOINTS",
    "Count",
    "Diagnostic",
    "Fallback",
    "Grasp",
    "HandAt",
    "Hold",
    "JointAngle",
    "MAX_PREDICATE_DEPTH",
    "ObjectAt",
    "Predicate",
    "Program",
    "ProgramSyntaxError",
    "Release",
    "Rest",
    "SceneDecl",
    "Step",
    "fmt_predicate",
    "iter_atoms",
    "parse_program",
    "parse_source",
    "predicate_depth",
    "predicate_from_json",
    "predicate_to_json",
    "print_program",
    "program_from_json",
    "program_to_json",
    "validate_semantics",
]
