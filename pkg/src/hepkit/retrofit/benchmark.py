"""Paradigm comparison: fixed templates versus generated programs.

For each corpus prescription the fixed paradigm either reproduces it (a
translatable verdict) or cannot; the generative paradigm succeeds when the
compiled program survives a print, reparse, and semantic validation round
trip. The two success columns form a 2x2 table whose one-sided exact test
says whether the generative paradigm's coverage advantage is real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from hepkit.dsl import parse_program, print_program, validate_semantics
from hepkit.evalstats import fisher_exact_2x2
from hepkit.genpipe import compile_prescription
from hepkit.genpipe.prescription import Prescription

from .check import TRANSLATION_CATEGORIES, RetrofitVerdict, retrofit_check
from .corpus import CorpusEntry, load_corpus
from .schema import template_for_goal


def generated_program_parses(rx: Prescription) -> bool:
    """Whether the generative route yields a valid program for ``rx``."""
    try:
        program = compile_prescription(rx)
        reparsed = parse_program(print_program(program))
    except ValueError:
        return False
    return not validate_semantics(reparsed)


@dataclass(frozen=True)
class ParadigmComparison:
    """Coverage of both authoring paradigms over one corpus."""

    fixed_translatable: int
    generative_translatable: int
    total: int
    p_value: float

    @property
    def table(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (
            (self.generative_translatable, self.total - self.generative_translatable),
            (self.fixed_translatable, self.total - self.fixed_translatable),
        )


def paradigm_comparison(
    corpus: Sequence[tuple[Prescription, RetrofitVerdict]],
) -> ParadigmComparison:
    """Compare paradigm coverage over pre-checked prescriptions.

    Degenerate corpora (for example a single prescription both paradigms
    handle) leave a zero margin in the table, and the underlying exact
    test raises rather than inventing a p-value.
    """
    total = len(corpus)
    fixed = sum(1 for _, verdict in corpus if verdict.translatable)
    generative = sum(1 for rx, _ in corpus if generated_program_parses(rx))
    p_value = fisher_exact_2x2(
        generative, total - generative, fixed, total - fixed
    )
    return ParadigmComparison(
        fixed_translatable=fixed,
        generative_translatable=generative,
        total=total,
        p_value=p_value,
    )


@dataclass(frozen=True)
class BenchmarkRow:
    rx_id: str
    goal_id: int
    provenance: str
    translatable: bool
    categories: tuple[str, ...]


@dataclass(frozen=True)
class BenchmarkReport:
    """Corpus-wide verdicts plus the paradigm comparison."""

    rows: tuple[BenchmarkRow, ...]
    category_counts: Mapping[str, int]
    comparison: ParadigmComparison

    @property
    def translatable_count(self) -> int:
        return sum(1 for row in self.rows if row.translatable)

    def to_json(self) -> dict[str, object]:
        return {
            "rows": [
                {
                    "rx_id": row.rx_id,
                    "goal_id": row.goal_id,
                    "provenance": row.provenance,
                    "translatable": row.translatable,
                    "categories": list(row.categories),
                }
                for row in self.rows
            ],
            "translatable": self.translatable_count,
            "total": len(self.rows),
            "category_counts": dict(self.category_counts),
            "comparison": {
                "table": [list(r) for r in self.comparison.table],
                "p_value": self.comparison.p_value,
            },
        }


def run_benchmark(
    entries: Sequence[CorpusEntry] | None = None,
) -> BenchmarkReport:
    """Check every corpus prescription against its goal's template."""
    if entries is None:
        entries = load_corpus()
    rows: list[BenchmarkRow] = []
    checked: list[tuple[Prescription, RetrofitVerdict]] = []
    counts = {name: 0 for name in sorted(TRANSLATION_CATEGORIES)}
    for entry in entries:
        verdict = retrofit_check(entry.rx, template_for_goal(entry.goal_id))
        checked.append((entry.rx, verdict))
        for name in verdict.categories:
            counts[name] += 1
        rows.append(
            BenchmarkRow(
                rx_id=entry.rx.id,
                goal_id=entry.goal_id,
                provenance=entry.provenance,
                translatable=verdict.translatable,
                categories=tuple(sorted(verdict.categories)),
            )
        )
    return BenchmarkReport(
        rows=tuple(rows),
        category_counts=counts,
        comparison=paradigm_comparison(checked),
    )
