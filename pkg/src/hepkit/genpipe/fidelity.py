"""Instruction fidelity checking between a prescription and a program.

The program's spoken lines are aligned against the prescription's steps
by longest common subsequence over normalized texts.  Whatever the LCS
leaves unmatched is explained in decreasing order of charity: identical
text in the wrong position (Reordered), near-identical text in place
(Substituted), and finally plain Omitted or Extraneous.
"""

from __future__ import annotations

from dataclasses import dataclass

from hepkit.dsl import Program
from hepkit.genpipe.prescription import Prescription

SUBSTITUTION_BAND = 0.85

MATCH = "match"
OMITTED = "omitted"
EXTRANEOUS = "extraneous"
SUBSTITUTED = "substituted"
REORDERED = "reordered"


def normalize_utterance(text: str) -> str:
    """Lowercase, collapse whitespace, and drop terminal punctuation."""
    collapsed = " ".join(text.lower().split())
    return collapsed.rstrip(".!?")


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a or not b:
        return len(a) + len(b)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    """Levenshtein similarity ratio in [0, 1]; 1.0 means equal."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class StepVerdict:
    """The fate of one prescription step (or one extra program step)."""

    kind: str
    rx_index: int | None
    program_index: int | None
    rx_text: str | None = None
    program_text: str | None = None
    similarity: float | None = None


@dataclass(frozen=True)
class FidelityReport:
    verdicts: tuple[StepVerdict, ...]
    correct: bool
    complete: bool

    def kinds(self) -> tuple[str, ...]:
        return tuple(v.kind for v in self.verdicts)


def _lcs_pairs(left: list[str], right: list[str]) -> list[tuple[int, int]]:
    """Index pairs of one longest common subsequence (0-based)."""
    n, m = len(left), len(right)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if left[i] == right[j]:
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < n and j < m:
        if left[i] == right[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def validate_fidelity(rx: Prescription, program: Program) -> FidelityReport:
    """Align program utterances with prescription steps and judge each.

    ``correct`` demands every prescription step be an in-order exact
    match with nothing extra; ``complete`` only demands that nothing is
    omitted and nothing extraneous appears.
    """
    rx_norm = [normalize_utterance(s.text) for s in rx.steps]
    prog_norm = [normalize_utterance(s.utterance) for s in program.steps]

    matched = _lcs_pairs(rx_norm, prog_norm)
    rx_fate: dict[int, StepVerdict] = {}
    prog_used: set[int] = set()
    for i, j in matched:
        rx_fate[i] = StepVerdict(
            kind=MATCH,
            rx_index=i + 1,
            program_index=j + 1,
            rx_text=rx.steps[i].text,
            program_text=program.steps[j].utterance,
            similarity=1.0,
        )
        prog_used.add(j)

    rx_left = [i for i in range(len(rx_norm)) if i not in rx_fate]
    prog_left = [j for j in range(len(prog_norm)) if j not in prog_used]

    # Identical text stranded by the LCS means the step exists but moved.
    for i in list(rx_left):
        for j in prog_left:
            if rx_norm[i] == prog_norm[j]:
                rx_fate[i] = StepVerdict(
                    kind=REORDERED,
                    rx_index=i + 1,
                    program_index=j + 1,
                    rx_text=rx.steps[i].text,
                    program_text=program.steps[j].utterance,
                    similarity=1.0,
                )
                rx_left.remove(i)
                prog_left.remove(j)
                break

    # Near-identical text in relative order is a substitution, not a
    # missing step; anything below the band stays unexplained.
    for i in list(rx_left):
        for j in list(prog_left):
            ratio = similarity(rx_norm[i], prog_norm[j])
            if ratio >= SUBSTITUTION_BAND:
                rx_fate[i] = StepVerdict(
                    kind=SUBSTITUTED,
                    rx_index=i + 1,
                    program_index=j + 1,
                    rx_text=rx.steps[i].text,
                    program_text=program.steps[j].utterance,
                    similarity=ratio,
                )
                rx_left.remove(i)
                prog_left.remove(j)
                break

    for i in rx_left:
        rx_fate[i] = StepVerdict(
            kind=OMITTED, rx_index=i + 1, program_index=None, rx_text=rx.steps[i].text
        )

    verdicts = [rx_fate[i] for i in range(len(rx_norm))]
    for j in prog_left:
        verdicts.append(
            StepVerdict(
                kind=EXTRANEOUS,
                rx_index=None,
                program_index=j + 1,
                program_text=program.steps[j].utterance,
            )
        )

    in_order = all(rx_fate[i].kind == MATCH for i in range(len(rx_norm)))
    correct = in_order and not prog_left
    complete = not any(v.kind in (OMITTED, EXTRANEOUS) for v in verdicts)
    return FidelityReport(
        verdicts=tuple(verdicts), correct=correct, complete=complete
    )
