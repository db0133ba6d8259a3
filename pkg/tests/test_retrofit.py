"""Template schemas, alignment, incompatibility categories, benchmark."""
from __future__ import annotations

import pytest

from hepkit.evalstats import ContingencyError
from hepkit.fixtures import GOAL_IDS, WorksheetStep, load_worksheet
from hepkit.genpipe import (
    EntityAnnotation,
    Prescription,
    PrescriptionStep,
    Threshold,
)
from hepkit.retrofit import (
    AUTHORED,
    COMPENSATORY_STRATEGY_OPTIONS,
    CONTINGENCY,
    CORPUS_SIZE,
    MOTOR_PRIMING,
    NEW_EQUIPMENT_USE,
    PROCEDURAL_VARIATION,
    RetrofitVerdict,
    SIDE_DOMAIN,
    SYNTHETIC,
    TemplateError,
    TemplateParameters,
    TemplateSchema,
    TRANSLATION_CATEGORIES,
    VerdictError,
    bundled_templates,
    generated_program_parses,
    load_corpus,
    load_manifest,
    match_against_template,
    paradigm_comparison,
    retrofit_check,
    run_benchmark,
    step_key,
    template_for_goal,
    template_from_worksheet,
)

EXPECTED_CATEGORY_COUNTS = {
    PROCEDURAL_VARIATION: 15,
    NEW_EQUIPMENT_USE: 6,
    CONTINGENCY: 6,
    COMPENSATORY_STRATEGY_OPTIONS: 4,
    MOTOR_PRIMING: 3,
}


def plain_step(text, **kwargs):
    return PrescriptionStep(text, EntityAnnotation(**kwargs))


def edited(rx: Prescription, index0: int, step: PrescriptionStep) -> Prescription:
    steps = list(rx.steps)
    steps[index0] = step
    return Prescription(
        id=f"{rx.id}-edited", goal_id=rx.goal_id, steps=tuple(steps),
        author="clinician",
    )


def inserted(rx: Prescription, after0: int, step: PrescriptionStep) -> Prescription:
    steps = list(rx.steps)
    steps.insert(after0 + 1, step)
    return Prescription(
        id=f"{rx.id}-inserted", goal_id=rx.goal_id, steps=tuple(steps),
        author="clinician",
    )


class TestTemplateSchema:
    def test_side_domain(self):
        assert SIDE_DOMAIN == frozenset({"left", "right", "bilateral"})

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"side": "upward"},
            {"side": "left", "side_options": ("right",)},
            {"repetitions": 0},
            {"hold_time_s": -1.0},
            {"side_options": ()},
        ],
    )
    def test_bad_parameters(self, kwargs):
        base = dict(
            side="right",
            side_options=("left", "right"),
            repetitions=2,
        )
        base.update(kwargs)
        with pytest.raises(TemplateError):
            TemplateParameters(**base)

    def test_repeat_block_must_fit_the_steps(self):
        params = TemplateParameters(
            side="right", side_options=("left", "right"), repetitions=3
        )
        with pytest.raises(TemplateError):
            TemplateSchema(
                goal_id=1,
                title="toy",
                fixed_steps=("a", "b", "c"),
                equipment=frozenset(),
                parameters=params,
                repeat_start=2,
                repeat_length=1,
            )

    @pytest.mark.parametrize("goal_id", list(GOAL_IDS))
    def test_templates_mirror_the_worksheets(self, goal_id):
        template = template_for_goal(goal_id)
        worksheet = load_worksheet(goal_id)
        assert template.goal_id == goal_id
        assert template.equipment == worksheet.equipment
        mine = template.instantiate(
            side=worksheet.default_side, repeats=worksheet.base_repeats
        )
        theirs = worksheet.instantiate()
        assert [s.text for s in mine.steps] == [s.text for s in theirs.steps]

    def test_bilateral_requests_are_rejected(self):
        template = template_for_goal(1)
        with pytest.raises(TemplateError):
            template.instantiate(side="bilateral", repeats=2)

    def test_bundled_templates_cover_every_goal(self):
        templates = bundled_templates()
        assert sorted(t.goal_id for t in templates) == list(GOAL_IDS)

    def test_template_from_worksheet_round_trips_equipment(self):
        worksheet = load_worksheet(7)
        template = template_from_worksheet(worksheet)
        assert template.equipment == worksheet.equipment
        assert template.parameters.side == worksheet.default_side


class TestMatching:
    def test_default_instantiation_is_exact(self):
        rx = load_worksheet(2).instantiate()
        outcome = match_against_template(rx, template_for_goal(2))
        assert outcome.exact
        assert outcome.side == "right"
        assert outcome.repeats == 2
        assert not outcome.unmatched_prescription
        assert not outcome.unmatched_template

    @pytest.mark.parametrize(
        "goal_id, side, repeats, difficulty",
        [
            (1, "left", 2, None),
            (1, "right", 4, {"distance_in": 12}),
            (3, "left", 3, None),
            (9, "right", 2, None),
            (10, "left", 1, None),
        ],
    )
    def test_knob_settings_are_recovered(self, goal_id, side, repeats,
                                         difficulty):
        rx = load_worksheet(goal_id).instantiate(
            side=side, repeats=repeats, difficulty=difficulty
        )
        outcome = match_against_template(rx, template_for_goal(goal_id))
        assert outcome.exact
        assert outcome.side == side
        assert outcome.repeats == repeats
        if difficulty:
            for name, value in difficulty.items():
                assert outcome.difficulty[name] == value

    def test_replacement_strands_both_sides(self):
        rx = load_worksheet(4).instantiate()
        modified = edited(rx, 5, plain_step("March your fingers up the wall."))
        outcome = match_against_template(modified, template_for_goal(4))
        assert not outcome.exact
        assert outcome.unmatched_prescription == (6,)
        assert len(outcome.unmatched_template) == 1

    def test_insertion_strands_only_the_prescription_side(self):
        rx = load_worksheet(4).instantiate()
        modified = inserted(rx, 5, plain_step("Shake out your hands."))
        outcome = match_against_template(modified, template_for_goal(4))
        assert not outcome.exact
        assert outcome.unmatched_prescription == (7,)
        assert outcome.unmatched_template == ()

    def test_text_comparison_ignores_case_and_terminal_punctuation(self):
        rx = load_worksheet(5).instantiate()
        steps = tuple(
            PrescriptionStep(s.text.upper().rstrip("."), s.entities)
            for s in rx.steps
        )
        shouty = Prescription(
            id="shout", goal_id=5, steps=steps, author="clinician"
        )
        assert match_against_template(shouty, template_for_goal(5)).exact

    def test_differing_flags_break_the_match(self):
        rx = load_worksheet(5).instantiate()
        step = rx.steps[3]
        flagged = edited(
            rx,
            3,
            PrescriptionStep(
                step.text,
                EntityAnnotation(
                    joints=step.entities.joints,
                    objects=step.entities.objects,
                    targets=step.entities.targets,
                    thresholds=step.entities.thresholds,
                    conditional=True,
                ),
            ),
        )
        assert not match_against_template(flagged, template_for_goal(5)).exact

    def test_step_keys_blank_durations_and_merge_novel_objects(self):
        a = plain_step("Hold the stretch for 5 seconds.", novel=("strap",))
        b = plain_step("Hold the stretch for 12 seconds.", objects=("strap",))
        assert step_key(a) == step_key(b)
        c = plain_step("Hold the stretch for 5 reps.", objects=("strap",))
        assert step_key(a) != step_key(c)

    def test_seconds_thresholds_compare_by_unit_only(self):
        a = plain_step("Pause.", thresholds=(Threshold(5.0, "s"),))
        b = plain_step("Pause.", thresholds=(Threshold(9.0, "s"),))
        c = plain_step("Pause.", thresholds=(Threshold(9.0, "deg"),))
        assert step_key(a) == step_key(b)
        assert step_key(a) != step_key(c)

    def test_hold_time_edits_are_absorbed(self):
        params = TemplateParameters(
            side="right",
            side_options=("left", "right"),
            repetitions=1,
            hold_time_s=5.0,
        )
        template = TemplateSchema(
            goal_id=99,
            title="isometric hold",
            fixed_steps=(
                WorksheetStep(
                    text="Press your palm into the table and hold for 5 seconds.",
                    thresholds=({"quantity": 5.0, "unit": "s"},),
                ),
                WorksheetStep(text="Relax your hand."),
            ),
            equipment=frozenset(),
            parameters=params,
            repeat_start=1,
            repeat_length=1,
        )
        rx = Prescription(
            id="longer-hold",
            goal_id="custom",
            steps=(
                plain_step(
                    "Press your palm into the table and hold for 20 seconds.",
                    thresholds=(Threshold(20.0, "s"),),
                ),
                plain_step("Relax your hand."),
            ),
            author="clinician",
        )
        verdict = retrofit_check(rx, template)
        assert verdict.translatable


class TestClassification:
    def check(self, rx, goal_id):
        return retrofit_check(rx, template_for_goal(goal_id))

    def test_translatable_verdicts_have_no_categories(self):
        rx = load_worksheet(6).instantiate(side="left")
        verdict = self.check(rx, 6)
        assert verdict.translatable
        assert verdict.categories == frozenset()
        assert verdict.side == "left"

    def test_inserted_conditional_step_is_contingency(self):
        rx = load_worksheet(6).instantiate()
        modified = inserted(
            rx,
            2,
            plain_step(
                "If the apple feels heavy, support your elbow on the table.",
                objects=("apple",),
                conditional=True,
            ),
        )
        verdict = self.check(modified, 6)
        assert not verdict.translatable
        assert verdict.categories == frozenset({CONTINGENCY})

    def test_inserted_alternative_route_is_compensatory(self):
        rx = load_worksheet(6).instantiate()
        modified = inserted(
            rx,
            2,
            plain_step(
                "You may steady the bowl with your left hand instead.",
                objects=("bowl",),
                alternatives=("left_hand",),
            ),
        )
        verdict = self.check(modified, 6)
        assert verdict.categories == frozenset(
            {COMPENSATORY_STRATEGY_OPTIONS}
        )

    def test_inserted_warm_up_is_motor_priming(self):
        rx = load_worksheet(8).instantiate()
        modified = inserted(
            rx,
            2,
            plain_step(
                "Warm up by tapping each finger to your thumb.",
                joints=("right_thumb_opposition",),
                preparatory=True,
            ),
        )
        verdict = self.check(modified, 8)
        assert verdict.categories == frozenset({MOTOR_PRIMING})

    def test_object_outside_the_kit_is_new_equipment(self):
        rx = load_worksheet(3).instantiate()
        modified = inserted(
            rx,
            4,
            plain_step(
                "Wipe the table with the towel.",
                objects=("towel",),
            ),
        )
        verdict = self.check(modified, 3)
        assert verdict.categories == frozenset({NEW_EQUIPMENT_USE})

    def test_plain_new_step_is_procedural_variation(self):
        rx = load_worksheet(4).instantiate()
        modified = inserted(
            rx, 5, plain_step("Shake out your hands and breathe.")
        )
        verdict = self.check(modified, 4)
        assert verdict.categories == frozenset({PROCEDURAL_VARIATION})

    def test_dropped_template_step_is_procedural_variation(self):
        rx = load_worksheet(4).instantiate()
        steps = rx.steps[:5] + rx.steps[6:]
        shorter = Prescription(
            id="dropped", goal_id=4, steps=steps, author="clinician"
        )
        verdict = self.check(shorter, 4)
        assert not verdict.translatable
        assert PROCEDURAL_VARIATION in verdict.categories
        assert verdict.dropped_template_steps

    def test_one_step_can_carry_several_categories(self):
        rx = load_worksheet(6).instantiate()
        modified = inserted(
            rx,
            2,
            plain_step(
                "If gripping hurts, squeeze the putty with both hands instead.",
                objects=("putty",),
                novel=("putty",),
                conditional=True,
                alternatives=("both_hands",),
            ),
        )
        verdict = self.check(modified, 6)
        assert verdict.categories == frozenset(
            {CONTINGENCY, COMPENSATORY_STRATEGY_OPTIONS, NEW_EQUIPMENT_USE}
        )

    def test_replacement_adds_procedural_variation(self):
        rx = load_worksheet(6).instantiate()
        modified = edited(
            rx,
            4,
            plain_step(
                "If the lemon slips, cradle it with both hands.",
                objects=("lemon",),
                conditional=True,
            ),
        )
        verdict = self.check(modified, 6)
        assert CONTINGENCY in verdict.categories
        assert PROCEDURAL_VARIATION in verdict.categories

    def test_evidence_points_at_the_offending_steps(self):
        rx = load_worksheet(4).instantiate()
        modified = inserted(
            rx, 5, plain_step("Shake out your hands and breathe.")
        )
        verdict = self.check(modified, 4)
        assert set(verdict.evidence) == {7}
        assert verdict.evidence[7] == (PROCEDURAL_VARIATION,)

    def test_verdict_requires_consistency(self):
        with pytest.raises(VerdictError):
            RetrofitVerdict(
                translatable=True,
                categories=frozenset({CONTINGENCY}),
                evidence={},
                dropped_template_steps=(),
                side="right",
                repeats=1,
                difficulty={},
            )
        with pytest.raises(VerdictError):
            RetrofitVerdict(
                translatable=False,
                categories=frozenset({"Whimsy"}),
                evidence={},
                dropped_template_steps=(),
                side="right",
                repeats=1,
                difficulty={},
            )

    def test_verdict_serializes_sorted_categories(self):
        rx = load_worksheet(4).instantiate()
        modified = inserted(rx, 5, plain_step("Shake out your hands."))
        doc = self.check(modified, 4).to_json()
        assert doc["translatable"] is False
        assert doc["categories"] == sorted(doc["categories"])
        assert all(isinstance(k, str) for k in doc["evidence"])


class TestCorpus:
    def test_manifest_and_corpus_sizes(self):
        manifest = load_manifest()
        entries = load_corpus()
        assert len(entries) == CORPUS_SIZE == 40
        authored = [e for e in entries if e.provenance == AUTHORED]
        synthetic = [e for e in entries if e.provenance == SYNTHETIC]
        assert len(authored) == 18
        assert len(synthetic) == 22
        assert len({e.rx.id for e in entries}) == 40
        assert set(manifest) >= {"authored", "synthetic"}

    def test_every_entry_targets_a_bundled_goal(self):
        for entry in load_corpus():
            assert entry.goal_id in GOAL_IDS
            assert entry.rx.steps

    def test_generated_programs_parse_for_the_whole_corpus(self):
        assert all(generated_program_parses(e.rx) for e in load_corpus())


@pytest.fixture(scope="module")
def report():
    return run_benchmark()


class TestBenchmark:
    def test_translatable_split(self, report):
        assert len(report.rows) == 40
        assert report.translatable_count == 22
        synthetic_rows = [r for r in report.rows if r.provenance == SYNTHETIC]
        assert all(r.translatable for r in synthetic_rows)
        authored_rows = [r for r in report.rows if r.provenance == AUTHORED]
        assert not any(r.translatable for r in authored_rows)

    def test_category_counts(self, report):
        assert report.category_counts == EXPECTED_CATEGORY_COUNTS
        assert set(EXPECTED_CATEGORY_COUNTS) == TRANSLATION_CATEGORIES

    def test_paradigm_comparison(self, report):
        comparison = report.comparison
        assert comparison.total == 40
        assert comparison.generative_translatable == 40
        assert comparison.fixed_translatable == 22
        assert comparison.table == ((40, 0), (22, 18))
        assert comparison.p_value == pytest.approx(
            6.383768402188211e-07, rel=1e-10
        )
        assert comparison.p_value < 0.01

    def test_report_serializes(self, report):
        import json

        doc = json.loads(json.dumps(report.to_json()))
        assert doc["comparison"]["p_value"] == pytest.approx(
            6.383768402188211e-07
        )
        assert len(doc["rows"]) == 40

    def test_degenerate_comparison_is_an_error(self):
        rx = load_worksheet(1).instantiate()
        verdict = retrofit_check(rx, template_for_goal(1))
        with pytest.raises(ContingencyError):
            paradigm_comparison([(rx, verdict)])
