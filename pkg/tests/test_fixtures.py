"""Bundled goal worksheets and their resolution into prescriptions."""
from __future__ import annotations

import pytest

from hepkit.dsl import CANONICAL_JOINTS
from hepkit.fixtures import (
    GOAL_IDS,
    Worksheet,
    WorksheetStep,
    default_prescriptions,
    load_all_worksheets,
    load_worksheet,
    worksheet_from_json,
)
from hepkit.genpipe import PrescriptionError

EQUIPMENT = {
    1: {"pink_postit", "blue_postit", "yellow_postit"},
    2: {"pink_postit", "yellow_postit"},
    3: {"scoop"},
    4: set(),
    5: set(),
    6: {"bowl", "apple", "lemon", "banana"},
    7: {"spoon", "chopsticks", "fork", "container", "utensil_area"},
    8: {"wallet", "coin", "wallet_area", "coin_pocket"},
    9: {"orange_cube", "blue_cube", "green_cube", "stack_base"},
    10: {"tongs", "yellow_bead", "red_bead", "blue_bead", "towel", "bowl"},
}

DEFAULT_STEP_COUNTS = {1: 11, 2: 10, 3: 10, 4: 11, 5: 10,
                       6: 10, 7: 11, 8: 11, 9: 12, 10: 10}


class TestLoading:
    def test_goal_inventory(self):
        assert list(GOAL_IDS) == list(range(1, 11))
        assert len(load_all_worksheets()) == 10

    @pytest.mark.parametrize("goal_id", list(GOAL_IDS))
    def test_equipment_lists(self, goal_id):
        assert load_worksheet(goal_id).equipment == frozenset(EQUIPMENT[goal_id])

    @pytest.mark.parametrize("goal_id", [0, 11, -3])
    def test_unknown_goal_is_rejected(self, goal_id):
        with pytest.raises(PrescriptionError):
            load_worksheet(goal_id)

    def test_worksheets_are_cached_per_load(self):
        first = load_worksheet(3)
        second = load_worksheet(3)
        assert first == second


class TestDefaultInstantiation:
    def test_published_step_total(self, worksheet_rxs):
        assert sum(len(rx.steps) for rx in worksheet_rxs) == 106

    @pytest.mark.parametrize("goal_id", list(GOAL_IDS))
    def test_default_lengths(self, goal_id):
        rx = load_worksheet(goal_id).instantiate()
        assert len(rx.steps) == DEFAULT_STEP_COUNTS[goal_id]

    def test_no_unresolved_placeholders(self, worksheet_rxs):
        for rx in worksheet_rxs:
            for step in rx.steps:
                assert "{" not in step.text and "}" not in step.text

    def test_authors_and_ids(self, worksheet_rxs):
        assert all(rx.author == "worksheet" for rx in worksheet_rxs)
        assert worksheet_rxs[0].id == "wks-g01-right-x2-d10"
        assert worksheet_rxs[1].id == "wks-g02-right-x2"
        assert worksheet_rxs[2].id == "wks-g03-right-x1"

    def test_joints_resolve_to_canonical_sided_names(self, worksheet_rxs):
        seen = set()
        for rx in worksheet_rxs:
            for step in rx.steps:
                seen.update(step.entities.joints)
        assert seen
        assert seen <= set(CANONICAL_JOINTS)

    def test_default_prescriptions_match_worksheet_defaults(self):
        assert default_prescriptions() == tuple(
            load_worksheet(g).instantiate() for g in GOAL_IDS
        )


class TestKnobs:
    def test_side_swap_rewrites_text_and_joints(self):
        ws = load_worksheet(1)
        right = ws.instantiate(side="right")
        left = ws.instantiate(side="left")
        assert right.id.endswith("right-x2-d10")
        assert left.id == "wks-g01-left-x2-d10"
        assert left.steps[0].text == right.steps[0].text
        paired = [
            (r.text, l.text)
            for r, l in zip(right.steps, left.steps)
            if r.text != l.text
        ]
        assert paired, "side placeholder never used"
        for r_text, l_text in paired:
            swapped = (
                r_text.replace("right", "\0")
                .replace("left", "right")
                .replace("\0", "left")
            )
            assert l_text == swapped
        for r_step, l_step in zip(right.steps, left.steps):
            for r_joint, l_joint in zip(
                r_step.entities.joints, l_step.entities.joints
            ):
                assert r_joint.removeprefix("right_") == l_joint.removeprefix(
                    "left_"
                )

    @pytest.mark.parametrize("goal_id", list(GOAL_IDS))
    @pytest.mark.parametrize("repeats", [1, 3, 4])
    def test_repeat_expansion_arithmetic(self, goal_id, repeats):
        ws = load_worksheet(goal_id)
        rx = ws.instantiate(repeats=repeats)
        expected = (
            DEFAULT_STEP_COUNTS[goal_id]
            + (repeats - ws.base_repeats) * ws.repeat_length
        )
        assert len(rx.steps) == expected

    def test_repeat_block_is_contiguous_copies(self):
        ws = load_worksheet(5)
        rx = ws.instantiate(repeats=3)
        lo = ws.repeat_start - 1
        block = [s.text for s in rx.steps[lo : lo + ws.repeat_length]]
        again = [
            s.text
            for s in rx.steps[lo + ws.repeat_length : lo + 2 * ws.repeat_length]
        ]
        assert block == again

    def test_difficulty_changes_distance_text(self):
        ws = load_worksheet(1)
        near = ws.instantiate(difficulty={"distance_in": 8})
        far = ws.instantiate(difficulty={"distance_in": 12})
        assert near.id == "wks-g01-right-x2-d8"
        assert any("8 inches" in s.text for s in near.steps)
        assert any("12 inches" in s.text for s in far.steps)
        near_thresholds = [
            t for s in near.steps for t in s.entities.thresholds if t.unit == "in"
        ]
        assert any(t.quantity == 8.0 for t in near_thresholds)

    def test_custom_rx_id_overrides_derived_one(self):
        rx = load_worksheet(2).instantiate(rx_id="custom-id")
        assert rx.id == "custom-id"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"side": "upward"},
            {"repeats": 0},
            {"difficulty": {"grip_width": 3}},
            {"difficulty": {"distance_in": 9}},
        ],
    )
    def test_bad_knob_values_are_rejected(self, kwargs):
        with pytest.raises(PrescriptionError):
            load_worksheet(1).instantiate(**kwargs)


class TestWorksheetFromJson:
    def test_minimal_document(self):
        ws = worksheet_from_json(
            {
                "goal_id": 42,
                "title": "toy",
                "side": "right",
                "side_options": ["left", "right"],
                "repeat_block": {"start": 1, "length": 1, "base_repeats": 2},
                "difficulty_options": {},
                "difficulty_defaults": {},
                "equipment": ["ball"],
                "steps": [
                    {"text": "Squeeze the ball with your {side} hand.",
                     "objects": ["ball"],
                     "joints": ["finger_spread"]},
                    {"text": "Squeeze the ball with your {side} hand.",
                     "objects": ["ball"],
                     "joints": ["finger_spread"]},
                    {"text": "Rest."},
                ],
            }
        )
        assert isinstance(ws, Worksheet)
        assert isinstance(ws.steps[0], WorksheetStep)
        rx = ws.instantiate(side="left", repeats=3)
        assert len(rx.steps) == 4
        assert rx.steps[0].text == "Squeeze the ball with your left hand."
        assert rx.steps[0].entities.joints == ("left_finger_spread",)
