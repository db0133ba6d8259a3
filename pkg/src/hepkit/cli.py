"""Command-line entry points over the pipeline.

Subcommands mirror the service endpoints for offline use: generate and
validate programs, run simulated sessions, evaluate logs, check
prescriptions against templates, reproduce the statistics suite, and serve
the HTTP API. ``bench`` exits zero only when every reproduction check
passes, and prints a machine-readable failure list otherwise.
"""

from __future__ import annotations

import json
import statistics
import sys
import time
from pathlib import Path

import click

from hepkit.bench import (
    BATCH_TOTAL_MONITORED,
    CALIBRATED_NOISE,
    DEFAULT_INCOMPLETE_FRACTION,
    TARGET_ACCURACY,
    build_batch,
    measure_accuracy,
    run_batch,
)
from hepkit.dsl import parse_program, print_program, validate_semantics
from hepkit.evalstats import (
    StepOutcome,
    build_report,
    fisher_exact_2x2,
    wilson_interval,
)
from hepkit.fixtures import GOAL_IDS, default_prescriptions, load_worksheet
from hepkit.genpipe import (
    ReplayBackend,
    RemoteBackend,
    TemplateBackend,
    backend_from_env,
    compile_prescription,
    detect_hallucinated_monitors,
    generate_program,
    prescription_from_json,
    validate_fidelity,
)
from hepkit.patientsim import Scenario, SimulatedPatient
from hepkit.retrofit import retrofit_check, run_benchmark, template_for_goal
from hepkit.runtime import PacedClock, SessionLog, pacing_of, run_session
from hepkit.runtime.pacing import ADEQUATE, PREMATURE

WILSON_EXPECTED = (0.8493, 0.9122)
REFERENCE_CI = (0.843, 0.915)
RETROFIT_P_EXPECTED = 6.383768402188211e-07


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _load_rx(path: str):
    try:
        return prescription_from_json(_read_json(path))
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot load prescription: {exc}")


def _load_program(path: str):
    try:
        return parse_program(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot load program: {exc}")


def _load_scenario(path: str) -> Scenario:
    try:
        return Scenario.from_json(_read_json(path))
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot load scenario: {exc}")


@click.group()
def main() -> None:
    """Exercise-program toolkit."""


@main.command()
@click.option("--prescription", "rx_path", required=True, type=click.Path(exists=True))
@click.option(
    "--backend",
    "backend_name",
    type=click.Choice(["env", "template", "replay", "remote"]),
    default="template",
    show_default=True,
)
@click.option("--replay-dir", type=click.Path(), default=None)
@click.option("--url", default=None, help="Remote backend base URL.")
@click.option("--model", default=None)
@click.option("--key", default=None)
@click.option("--out", type=click.Path(), default=None, help="Write program text here.")
def generate(rx_path, backend_name, replay_dir, url, model, key, out) -> None:
    """Generate a program from a prescription and validate it."""
    import os

    rx = _load_rx(rx_path)
    if backend_name == "template":
        backend = TemplateBackend()
    elif backend_name == "replay":
        if not replay_dir:
            raise click.ClickException("--replay-dir is required with --backend replay")
        backend = ReplayBackend(replay_dir)
    elif backend_name == "remote":
        resolved = url or os.environ.get("GENERATOR_URL", "")
        if not resolved:
            raise click.ClickException("remote backend needs --url or GENERATOR_URL")
        backend = RemoteBackend(
            base_url=resolved,
            model=model or os.environ.get("GENERATOR_MODEL", "default"),
            api_key=key or os.environ.get("GENERATOR_KEY", ""),
        )
    else:
        backend = backend_from_env()
    text, provenance = generate_program(rx, backend)
    try:
        program = parse_program(text)
    except ValueError as exc:
        click.echo(json.dumps({"error": "parse_failed", "message": str(exc)}))
        sys.exit(1)
    diagnostics = validate_semantics(program)
    fidelity = validate_fidelity(rx, program)
    findings = detect_hallucinated_monitors(rx, program)
    canonical = print_program(program)
    if out:
        Path(out).write_text(canonical, encoding="utf-8")
    else:
        click.echo(canonical)
    summary = {
        "backend": provenance.backend,
        "valid": not diagnostics,
        "correct": fidelity.correct,
        "complete": fidelity.complete,
        "hallucinations": len(findings),
    }
    click.echo(json.dumps(summary), err=True)
    ok = not diagnostics and fidelity.correct and fidelity.complete and not findings
    sys.exit(0 if ok else 1)


@main.command()
@click.option("--prescription", "rx_path", required=True, type=click.Path(exists=True))
@click.option("--program", "program_path", required=True, type=click.Path(exists=True))
def validate(rx_path, program_path) -> None:
    """Check a program against its prescription; exit 0 when faithful."""
    rx = _load_rx(rx_path)
    program = _load_program(program_path)
    diagnostics = validate_semantics(program)
    fidelity = validate_fidelity(rx, program)
    findings = detect_hallucinated_monitors(rx, program)
    failures = []
    for d in diagnostics:
        failures.append({"check": "semantics", "code": d.code, "message": d.message})
    for v in fidelity.verdicts:
        if v.kind != "match":
            failures.append(
                {
                    "check": "fidelity",
                    "kind": v.kind,
                    "rx_index": v.rx_index,
                    "program_index": v.program_index,
                }
            )
    for f in findings:
        failures.append(
            {
                "check": "hallucination",
                "step_index": f.step_index,
                "symbol": f.symbol,
                "reason": f.reason,
            }
        )
    click.echo(
        json.dumps(
            {
                "valid": not diagnostics,
                "correct": fidelity.correct,
                "complete": fidelity.complete,
                "hallucinations": len(findings),
                "failures": failures,
            },
            indent=2,
        )
    )
    sys.exit(0 if not failures else 1)


@main.command()
@click.option("--program", "program_path", required=True, type=click.Path(exists=True))
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write the session log here.")
@click.option(
    "--rt-factor",
    type=float,
    default=0.0,
    show_default=True,
    help="Real-time factor; 0 runs on the virtual clock without pacing.",
)
def run(program_path, scenario_path, out, rt_factor) -> None:
    """Run a simulated session and report per-step detections."""
    program = _load_program(program_path)
    diagnostics = validate_semantics(program)
    if diagnostics:
        raise click.ClickException(
            "program is invalid: " + "; ".join(d.message for d in diagnostics)
        )
    scenario = _load_scenario(scenario_path)
    try:
        sim = SimulatedPatient(
            program, scenario.profile, scenario.script, scenario.noise, hz=scenario.hz
        )
    except ValueError as exc:
        raise click.ClickException(f"scenario cannot play this program: {exc}")
    clock = PacedClock(rt_factor=rt_factor) if rt_factor > 0 else None
    log = run_session(
        program,
        sim,
        clock=clock,
        poll_hz=scenario.hz,
        active_side=scenario.profile.affected_side,
    )
    if out:
        Path(out).write_text(log.dumps(), encoding="utf-8")
    monitored = [s for s in log.steps if s.monitored]
    detected = sum(1 for s in monitored if s.detected_complete)
    click.echo(
        json.dumps(
            {
                "steps": len(log.steps),
                "monitored": len(monitored),
                "detected_complete": detected,
                "timed_out": sum(1 for s in monitored if s.timed_out),
            }
        )
    )


@main.command("eval")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--confidence", type=float, default=0.95, show_default=True)
def eval_command(log_path, scenario_path, confidence) -> None:
    """Score a session log against the scenario's pre-labels."""
    log = SessionLog.from_json(_read_json(log_path))
    scenario = _load_scenario(scenario_path)
    labels = scenario.prelabels()
    outcomes = []
    for rec in log.steps:
        if not rec.monitored:
            continue
        if rec.index not in labels:
            raise click.ClickException(f"no pre-label for monitored step {rec.index}")
        outcomes.append(
            StepOutcome(
                rx_id=log.program_name,
                step_index=rec.index,
                truth=labels[rec.index],
                detected=rec.detected_complete,
            )
        )
    report = build_report(outcomes, confidence=confidence)
    click.echo(json.dumps(report.to_json(), indent=2))


@main.command()
@click.option("--prescription", "rx_path", required=True, type=click.Path(exists=True))
@click.option("--goal", type=int, required=True, help="Template goal number (1-10).")
def retrofit(rx_path, goal) -> None:
    """Check whether a prescription fits a goal's fixed template."""
    if goal not in GOAL_IDS:
        raise click.ClickException(f"--goal must be one of {list(GOAL_IDS)}")
    rx = _load_rx(rx_path)
    verdict = retrofit_check(rx, template_for_goal(goal))
    click.echo(json.dumps(verdict.to_json(), indent=2))


@main.command()
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None)
def serve(data_dir, host, port) -> None:
    """Run the HTTP service."""
    from hepkit.service import serve as run_service

    run_service(data_dir=data_dir, host=host, port=port)


def _bench_checks(seed: int) -> tuple[list[dict], dict]:
    """All reproduction checks plus the artifacts worth writing out."""
    checks: list[dict] = []
    artifacts: dict = {}

    def check(name: str, passed: bool, **details) -> None:
        checks.append({"name": name, "passed": bool(passed), **details})

    started = time.monotonic()
    bad_fidelity = 0
    total_steps = 0
    for rx in default_prescriptions():
        program = parse_program(print_program(compile_prescription(rx)))
        report = validate_fidelity(rx, program)
        findings = detect_hallucinated_monitors(rx, program)
        total_steps += len(rx.steps)
        if not (report.correct and report.complete) or findings:
            bad_fidelity += 1
    check(
        "fidelity_all_steps",
        bad_fidelity == 0 and total_steps == 106,
        steps=total_steps,
        unfaithful_programs=bad_fidelity,
        seconds=round(time.monotonic() - started, 2),
    )

    started = time.monotonic()
    entries = build_batch(hallucinate=True)
    hallu_run = run_batch(entries, seed=seed)
    injected = {
        (e.run_id, e.injected_step) for e in entries if e.injected_step is not None
    }
    found = {
        (entry.run_id, finding.step_index)
        for entry in entries
        if entry.injected_step is not None
        for finding in detect_hallucinated_monitors(entry.rx, entry.session_program)
    }
    hallu_report = hallu_run.report()
    share = hallu_report.hallucination_share
    check(
        "hallucination_exact",
        found == injected
        and len(found) == 10
        and round(share, 3) == 0.025
        and hallu_report.errors_with_hallucination == 10
        and hallu_report.errors_noise_only == 0,
        injected=len(injected),
        found=len(found),
        share=share,
        errors_with_hallucination=hallu_report.errors_with_hallucination,
        seconds=round(time.monotonic() - started, 2),
    )

    started = time.monotonic()
    accuracies = measure_accuracy(CALIBRATED_NOISE, seeds=range(20))
    mean_accuracy = statistics.mean(accuracies)
    check(
        "accuracy_band",
        abs(mean_accuracy - TARGET_ACCURACY) <= 0.02,
        mean=round(mean_accuracy, 4),
        target=TARGET_ACCURACY,
        seconds=round(time.monotonic() - started, 2),
    )
    artifacts["accuracy"] = {
        "per_seed": [round(a, 6) for a in accuracies],
        "mean": mean_accuracy,
        "target": TARGET_ACCURACY,
        "noise": {
            "fp_rate": CALIBRATED_NOISE.fp_rate,
            "fn_rate": CALIBRATED_NOISE.fn_rate,
            "dropout_rate": CALIBRATED_NOISE.dropout_rate,
        },
    }

    low, high = wilson_interval(352, 398, 0.95)
    check(
        "wilson_interval",
        abs(low - WILSON_EXPECTED[0]) <= 5e-4
        and abs(high - WILSON_EXPECTED[1]) <= 5e-4
        and abs(low - REFERENCE_CI[0]) <= 0.01
        and abs(high - REFERENCE_CI[1]) <= 0.01,
        interval=[low, high],
        expected=list(WILSON_EXPECTED),
        reference=list(REFERENCE_CI),
    )

    started = time.monotonic()
    retro = run_benchmark()
    counts = dict(retro.category_counts)
    expected_counts = {
        "ProceduralVariation": 15,
        "NewEquipmentUse": 6,
        "Contingency": 6,
        "CompensatoryStrategyOptions": 4,
        "MotorPriming": 3,
    }
    p_value = retro.comparison.p_value
    check(
        "retrofit_corpus",
        retro.translatable_count == 22
        and counts == expected_counts
        and p_value < 0.01
        and abs(p_value - RETROFIT_P_EXPECTED) <= RETROFIT_P_EXPECTED * 1e-10,
        translatable=retro.translatable_count,
        counts=counts,
        p_value=p_value,
        seconds=round(time.monotonic() - started, 2),
    )
    artifacts["retrofit"] = retro.to_json()

    started = time.monotonic()
    clean_entries = build_batch()
    clean_run = run_batch(clean_entries, seed=seed)
    clean_verdicts = [v.verdict for v in clean_run.pacing if v.verdict]
    check(
        "pacing_zero_noise",
        bool(clean_verdicts) and all(v == ADEQUATE for v in clean_verdicts),
        verdicts=len(clean_verdicts),
        seconds=round(time.monotonic() - started, 2),
    )

    started = time.monotonic()
    noisy_run = run_batch(
        clean_entries,
        noise=CALIBRATED_NOISE,
        seed=seed,
        incomplete_fraction=DEFAULT_INCOMPLETE_FRACTION,
    )
    noisy_report = noisy_run.report()
    premature = sum(1 for v in noisy_run.pacing if v.verdict == PREMATURE)
    false_positives = noisy_report.counts.false_positive
    judged = [v for v in noisy_run.pacing if v.verdict]
    adequacy = sum(1 for v in judged if v.verdict == ADEQUATE) / len(judged)
    check(
        "pacing_premature_matches_false_positives",
        premature == false_positives,
        premature=premature,
        false_positives=false_positives,
        adequacy=round(adequacy, 4),
        seconds=round(time.monotonic() - started, 2),
    )
    artifacts["pacing"] = {
        "adequacy": adequacy,
        "premature": premature,
        "false_positives": false_positives,
        "accuracy_table": noisy_report.to_json(),
        "total_monitored": BATCH_TOTAL_MONITORED,
    }
    return checks, artifacts


@main.command()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the noisy demonstration runs; the accuracy "
                   "protocol window is fixed by the calibration recipe.")
@click.option("--out", "out_dir", type=click.Path(), default="report",
              show_default=True)
def bench(seed, out_dir) -> None:
    """Reproduce the statistics suite; exit 0 only if every check passes."""
    checks, artifacts = _bench_checks(seed)
    passed = all(c["passed"] for c in checks)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps({"seed": seed, "passed": passed, "checks": checks}, indent=2)
        + "\n",
        encoding="utf-8",
    )
    (out / "accuracy_table.json").write_text(
        json.dumps(
            {"accuracy": artifacts["accuracy"], "pacing": artifacts["pacing"]},
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    (out / "category_counts.json").write_text(
        json.dumps(artifacts["retrofit"], indent=2) + "\n", encoding="utf-8"
    )
    if passed:
        click.echo(json.dumps({"passed": True, "checks": len(checks)}))
        sys.exit(0)
    failures = [c for c in checks if not c["passed"]]
    click.echo(json.dumps({"passed": False, "failures": failures}, indent=2))
    sys.exit(1)


if __name__ == "__main__":
    main()
