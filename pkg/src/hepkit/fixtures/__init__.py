"""Bundled worksheets, prescriptions, and reference programs."""

from hepkit.fixtures.worksheets import (
    GOAL_IDS,
    Worksheet,
    WorksheetStep,
    default_prescriptions,
    load_all_worksheets,
    load_worksheet,
    worksheet_from_json,
)

__all__ = [
    "GOAL_IDS",
    "Worksheet",
    "WorksheetStep",
    "default_prescriptions",
    "load_all_worksheets",
    "load_worksheet",
    "worksheet_from_json",
]
