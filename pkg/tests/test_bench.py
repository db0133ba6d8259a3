"""Batch assembly, seeded execution, and noise calibration constants."""
from __future__ import annotations

import pytest

from hepkit.bench import (
    BATCH_TOTAL_MONITORED,
    BRACED_JOINTS,
    BatchError,
    CALIBRATED_NOISE,
    DEFAULT_INCOMPLETE_FRACTION,
    SweepPoint,
    TARGET_ACCURACY,
    build_batch,
    measure_accuracy,
    run_batch,
)
from hepkit.genpipe import SYMBOL_NOT_PRESCRIBED, detect_hallucinated_monitors
from hepkit.patientsim import (
    NoiseModel,
    PRELABEL_COMPLETE,
    PRELABEL_INCOMPLETE,
    ZERO_NOISE,
)
from hepkit.runtime import ADEQUATE

MONITORED_PER_GOAL = (8, 6, 7, 9, 9, 8, 9, 8, 10, 8)


@pytest.fixture(scope="module")
def clean_batch():
    return build_batch()


@pytest.fixture(scope="module")
def injected_batch():
    return build_batch(hallucinate=True)


class TestConstants:
    def test_noise_calibration_point(self):
        assert CALIBRATED_NOISE == NoiseModel(
            fp_rate=0.0022, fn_rate=0.1, dropout_rate=0.0, seed=0
        )

    def test_targets(self):
        assert TARGET_ACCURACY == 0.884
        assert DEFAULT_INCOMPLETE_FRACTION == 0.363
        assert BATCH_TOTAL_MONITORED == 398

    def test_braced_joints(self):
        assert BRACED_JOINTS == frozenset({"right_elbow_flexion"})

    def test_batch_error_is_a_value_error(self):
        assert issubclass(BatchError, ValueError)


class TestBatchConstruction:
    def test_entry_count_and_monitored_total(self, clean_batch):
        assert len(clean_batch) == 49
        total = sum(len(e.monitored_indices) for e in clean_batch)
        assert total == BATCH_TOTAL_MONITORED

    def test_pass_structure(self, clean_batch):
        tags = [e.run_id.split("-", 1)[0] for e in clean_batch]
        assert tags == ["p1"] * 10 + ["p2"] * 10 + ["p3"] * 10 + ["p4"] * 10 + [
            "p5"
        ] * 8 + ["p6"]

    def test_full_passes_cover_every_goal_in_order(self, clean_batch):
        for offset in (0, 10, 20, 30):
            goals = [e.rx.goal_id for e in clean_batch[offset : offset + 10]]
            assert goals == list(range(1, 11))
        assert [e.rx.goal_id for e in clean_batch[40:48]] == list(range(1, 9))

    def test_monitored_counts_per_goal(self, clean_batch):
        counts = tuple(len(e.monitored_indices) for e in clean_batch[:10])
        assert counts == MONITORED_PER_GOAL

    def test_run_ids_are_unique(self, clean_batch):
        ids = [e.run_id for e in clean_batch]
        assert len(set(ids)) == len(ids)

    def test_clean_entries_run_their_own_program(self, clean_batch):
        for entry in clean_batch:
            assert entry.injected_step is None
            assert entry.session_program is entry.program

    def test_partial_entry_is_a_six_step_prefix_of_goal_one(self, clean_batch):
        partial = clean_batch[-1]
        full = clean_batch[0]
        assert partial.run_id == "p6-wks-g01-right-x2-d10-part6"
        assert partial.rx.id == "wks-g01-right-x2-d10-part6"
        assert len(partial.monitored_indices) == 6
        short = [s.utterance for s in partial.program.steps]
        long = [s.utterance for s in full.program.steps]
        assert long[: len(short)] == short
        assert partial.program.steps[-1].monitor is not None

    def test_rebuilding_gives_an_equal_batch(self, clean_batch):
        again = build_batch()
        assert [e.run_id for e in again] == [e.run_id for e in clean_batch]
        assert [e.program for e in again] == [e.program for e in clean_batch]


class TestInjection:
    def test_exactly_ten_entries_carry_an_injection(self, injected_batch):
        marked = [e for e in injected_batch if e.injected_step is not None]
        assert len(marked) == 10
        assert all(e.run_id.startswith("p1-") for e in marked)

    def test_later_passes_stay_clean(self, injected_batch):
        for entry in injected_batch[10:]:
            assert entry.injected_step is None
            assert entry.session_program is entry.program

    def test_injected_step_is_a_monitored_step(self, injected_batch):
        for entry in injected_batch[:10]:
            assert entry.injected_step in entry.monitored_indices

    def test_prescribed_program_is_left_untouched(
        self, clean_batch, injected_batch
    ):
        for clean, injected in zip(clean_batch[:10], injected_batch[:10]):
            assert injected.program == clean.program
            assert injected.session_program != injected.program

    def test_detector_pins_each_injection(self, injected_batch):
        for entry in injected_batch[:10]:
            findings = detect_hallucinated_monitors(
                entry.rx, entry.session_program
            )
            assert len(findings) == 1
            finding = findings[0]
            assert finding.step_index == entry.injected_step
            assert finding.reason == SYMBOL_NOT_PRESCRIBED
            assert finding.symbol not in BRACED_JOINTS

    def test_injection_respects_custom_seeds(self):
        first = build_batch(hallucinate=True, mutation_seeds=(3,))
        second = build_batch(hallucinate=True, mutation_seeds=(3,))
        assert [e.injected_step for e in first[:10]] == [
            e.injected_step for e in second[:10]
        ]
        assert any(
            a.injected_step != b.injected_step
            for a, b in zip(first[:10], build_batch(hallucinate=True)[:10])
        )


class TestRunBatch:
    def test_zero_noise_is_perfect_and_adequate(self, clean_batch):
        run = run_batch(clean_batch[:3], noise=ZERO_NOISE, seed=0)
        assert len(run.logs) == 3
        assert len(run.scenarios) == 3
        assert run.findings == ()
        assert all(o.truth == PRELABEL_COMPLETE for o in run.outcomes)
        assert all(o.detected for o in run.outcomes)
        assert all(v.verdict == ADEQUATE for v in run.pacing)
        assert run.report().accuracy == 1.0

    def test_outcomes_pair_every_monitored_step(self, clean_batch):
        entries = clean_batch[:3]
        run = run_batch(entries, noise=ZERO_NOISE, seed=0)
        expected = [
            (e.run_id, idx) for e in entries for idx in e.monitored_indices
        ]
        assert [(o.rx_id, o.step_index) for o in run.outcomes] == expected

    def test_incomplete_fraction_sets_exact_truth_counts(self, clean_batch):
        entries = clean_batch[:3]
        run = run_batch(
            entries, noise=ZERO_NOISE, seed=1, incomplete_fraction=0.363
        )
        per_entry = {e.run_id: 0 for e in entries}
        for outcome in run.outcomes:
            if outcome.truth == PRELABEL_INCOMPLETE:
                per_entry[outcome.rx_id] += 1
        assert per_entry == {
            entries[0].run_id: round(8 * 0.363),
            entries[1].run_id: round(6 * 0.363),
            entries[2].run_id: round(7 * 0.363),
        }

    def test_zero_noise_tracks_scripted_truth_exactly(self, clean_batch):
        run = run_batch(
            clean_batch[:3], noise=ZERO_NOISE, seed=2, incomplete_fraction=0.363
        )
        for outcome in run.outcomes:
            assert outcome.detected == (outcome.truth == PRELABEL_COMPLETE)
        assert run.report().accuracy == 1.0

    def test_same_seed_is_bit_identical(self, clean_batch):
        entries = clean_batch[:2]
        kwargs = dict(
            noise=CALIBRATED_NOISE, seed=5, incomplete_fraction=0.363
        )
        first = run_batch(entries, **kwargs)
        second = run_batch(entries, **kwargs)
        assert first.outcomes == second.outcomes
        assert [log.dumps() for log in first.logs] == [
            log.dumps() for log in second.logs
        ]

    def test_different_seeds_shuffle_the_truth_mix(self, clean_batch):
        entries = clean_batch[:2]
        truths = lambda seed: [
            o.truth
            for o in run_batch(
                entries, noise=ZERO_NOISE, seed=seed, incomplete_fraction=0.363
            ).outcomes
        ]
        assert truths(0) != truths(1)

    def test_injected_entries_surface_findings_and_errors(self, injected_batch):
        entries = injected_batch[:2]
        run = run_batch(entries, noise=ZERO_NOISE, seed=0)
        assert len(run.findings) == 2
        assert {f.step_index for f in run.findings} == {
            e.injected_step for e in entries
        }
        flagged = [o for o in run.outcomes if o.hallucinated]
        assert [(o.rx_id, o.step_index) for o in flagged] == [
            (e.run_id, e.injected_step) for e in entries
        ]
        report = run.report()
        assert report.errors_with_hallucination == 2
        assert report.errors_noise_only == 0


class TestCalibration:
    def test_measure_accuracy_on_a_clean_slice(self, clean_batch):
        accs = measure_accuracy(
            ZERO_NOISE,
            seeds=range(2),
            entries=clean_batch[:2],
            incomplete_fraction=0.0,
        )
        assert accs == [1.0, 1.0]

    def test_sweep_point_distance(self):
        point = SweepPoint(
            fp_rate=0.002,
            fn_rate=0.1,
            mean_accuracy=0.9,
            min_accuracy=0.88,
            max_accuracy=0.92,
        )
        assert point.distance == pytest.approx(abs(0.9 - TARGET_ACCURACY))
