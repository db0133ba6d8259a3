"""The bundled 40-prescription benchmark corpus.

Eighteen authored fixtures capture clinician edits that fall outside the
fixed-template knobs; twenty-two synthetic fixtures are legal knob settings
and exist to anchor the translatable side of the comparison. Authored
prescriptions ship as full JSON documents; synthetic ones are recorded as
their generating parameters and instantiated on load, so the corpus cannot
drift from the worksheets it claims to vary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from hepkit.fixtures import load_worksheet
from hepkit.genpipe.prescription import (
    Prescription,
    PrescriptionError,
    prescription_from_json,
)

AUTHORED = "authored"
SYNTHETIC = "synthetic"

CORPUS_SIZE = 40


class CorpusError(ValueError):
    """The bundled corpus data is missing or malformed."""


@dataclass(frozen=True)
class CorpusEntry:
    """One benchmark prescription plus its provenance."""

    rx: Prescription
    goal_id: int
    provenance: str
    note: str = ""


def _data_dir():
    return resources.files("hepkit.retrofit") / "data" / "corpus"


def load_manifest() -> Mapping[str, object]:
    try:
        text = (_data_dir() / "manifest.json").read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise CorpusError("corpus manifest is not bundled") from exc
    return json.loads(text)


def load_corpus() -> tuple[CorpusEntry, ...]:
    """All forty benchmark prescriptions, authored first."""
    manifest = load_manifest()
    entries: list[CorpusEntry] = []
    for item in manifest.get(AUTHORED, ()):
        raw = (_data_dir() / str(item["file"])).read_text(encoding="utf-8")
        try:
            rx = prescription_from_json(json.loads(raw))
        except (PrescriptionError, json.JSONDecodeError) as exc:
            raise CorpusError(f"fixture {item['file']} is malformed: {exc}") from exc
        entries.append(
            CorpusEntry(
                rx=rx,
                goal_id=int(item["goal_id"]),
                provenance=AUTHORED,
                note=str(item.get("note", "")),
            )
        )
    for item in manifest.get(SYNTHETIC, ()):
        goal_id = int(item["goal_id"])
        worksheet = load_worksheet(goal_id)
        rx = worksheet.instantiate(
            side=str(item["side"]),
            repeats=int(item["repeats"]),
            difficulty=item.get("difficulty"),
            rx_id=str(item["id"]),
        )
        entries.append(
            CorpusEntry(rx=rx, goal_id=goal_id, provenance=SYNTHETIC)
        )
    if len(entries) != CORPUS_SIZE:
        raise CorpusError(
            f"expected {CORPUS_SIZE} corpus entries, found {len(entries)}"
        )
    return tuple(entries)
