/**
 * Full console round-trip against a live service process.
 *
 * The suite spawns `hepkit serve` on a scratch data directory and drives
 * the whole clinician flow through the console modules: author the
 * prescription form, generate, review the fidelity diff, pre-label the
 * monitored steps, run a simulated session at rt_factor 10 while watching
 * the badge stream (with one injected connection drop), flag a step, and
 * read the report and evaluation. The badge timeline and the event
 * projection are compared against the recorded fixtures, which froze the
 * same session at a different real-time factor.
 */

import assert from "node:assert/strict";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, test } from "vitest";

import { ConsoleApi, type FetchLike } from "../src/api.js";
import { formFromDoc, submitPrescription } from "../src/authoring.js";
import { badgeSequence, reduceBadges, type SessionTimeline } from "../src/badges.js";
import { buildDiffView } from "../src/diff.js";
import {
  allCompleteDefault,
  buildPrelabelGrid,
  presetFromScenario,
  submitLabels,
  PrelabelGridError,
  type PreLabel,
} from "../src/prelabel.js";
import { buildEvalView } from "../src/report.js";
import { watchEvents, type WatchResult } from "../src/sse.js";
import { SessionWatcher } from "../src/watch.js";
import type {
  EvalReportDoc,
  PrescriptionDoc,
  ProgramPayload,
  ScenarioDoc,
  SessionEvent,
} from "../src/types.js";
import { loadFixture, range } from "./helpers.js";

const prescriptionDoc = loadFixture<PrescriptionDoc>("prescription.goal1.json");
const programFixture = loadFixture<{ id: string } & ProgramPayload>("program.goal1.json");
const scenarioDoc = loadFixture<ScenarioDoc>("scenario.goal1.json");
const recordedEvents = loadFixture<SessionEvent[]>("events.goal1.json");
const recordedTimeline = loadFixture<SessionTimeline>("badges.goal1.json");
const evalFixture = loadFixture<EvalReportDoc>("eval.goal1.json");

const STEPS = range(1, 12);
const FAST_BACKOFF = { initialMs: 50, maxMs: 500, factor: 2 };
const projection = (event: SessionEvent) =>
  [event.seq, event.kind, event.step_index, event.at] as const;

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

let child: ChildProcess | null = null;
let childStderr = "";
let dataDir = "";
let api: ConsoleApi;

let prescriptionId = "";
let programId = "";
let scenarioId = "";
let sessionId = "";
let generateVerdicts: ReturnType<typeof buildDiffView> | null = null;
let labels: Record<string, PreLabel> = {};
let watcher: SessionWatcher;
let live: WatchResult | null = null;

async function waitForHealth(deadlineMs: number): Promise<void> {
  const deadline = Date.now() + deadlineMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (child?.exitCode !== null) {
      break;
    }
    try {
      const health = await api.health();
      if (health.status === "ok") {
        return;
      }
    } catch (error) {
      lastError = error;
    }
    await sleep(250);
  }
  throw new Error(
    `service never became healthy: ${String(lastError)}\n${childStderr}`,
  );
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  const port = 18000 + Math.floor(Math.random() * 2000);
  api = new ConsoleApi(`http://127.0.0.1:${port}`);
  child = spawn(
    "hepkit",
    ["serve", "--data-dir", dataDir, "--port", String(port)],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  child.stderr?.on("data", (chunk: Buffer) => {
    childStderr += chunk.toString();
  });
  await waitForHealth(30_000);
}, 60_000);

afterAll(async () => {
  if (child !== null) {
    const exited = new Promise<void>((resolve) => child?.once("exit", () => resolve()));
    if (child.exitCode === null) {
      child.kill("SIGTERM");
      await Promise.race([exited, sleep(5000)]);
      if (child.exitCode === null) {
        child.kill("SIGKILL");
        await exited;
      }
    }
  }
  if (dataDir !== "") {
    rmSync(dataDir, { recursive: true, force: true });
  }
});

describe("console round-trip against a live service", () => {
  test("authoring: the form round-trips through the service verbatim", async () => {
    const form = formFromDoc(prescriptionDoc);
    const saved = await submitPrescription(api, form);
    assert.ok(saved.id.length > 0);
    assert.ok(saved.digest.length > 0);
    prescriptionId = saved.id;

    const stored = await api.getPrescription(prescriptionId);
    assert.deepStrictEqual(stored.payload, prescriptionDoc);
  });

  test("generation: the template backend reproduces the frozen program", async () => {
    const generated = await api.generateProgram(prescriptionId, {
      backend: "template",
    });
    programId = generated.id;
    assert.equal(generated.text, programFixture.text);
    assert.equal(generated.provenance.backend, "template");
    assert.deepStrictEqual(generated.hallucinations, []);

    generateVerdicts = buildDiffView(generated.fidelity);
    assert.equal(generateVerdicts.rows.length, 11);
    assert.ok(generateVerdicts.rows.every((row) => row.chip === "Match"));
    assert.ok(generateVerdicts.correct);
    assert.ok(generateVerdicts.complete);
  });

  test("validation: the diff view matches the generation-time fidelity", async () => {
    const validated = await api.validateProgram(programId);
    assert.ok(validated.valid);
    assert.ok(validated.faithful);
    assert.deepStrictEqual(validated.diagnostics, []);
    assert.ok(validated.fidelity !== null);

    const diff = buildDiffView(validated.fidelity!);
    assert.deepStrictEqual(diff.rows, generateVerdicts!.rows);
    assert.deepStrictEqual(diff.chipCounts, generateVerdicts!.chipCounts);
  });

  test("pre-labeling: blocked while unlabeled, preset fills every row", async () => {
    scenarioId = (await api.postScenario(scenarioDoc)).id;

    const grid = buildPrelabelGrid(programId, scenarioDoc);
    assert.deepStrictEqual(
      grid.rows.map((row) => row.stepIndex),
      range(3, 11),
    );
    assert.throws(
      () => submitLabels(grid),
      (error: unknown) =>
        error instanceof PrelabelGridError &&
        /unlabeled monitored steps: 3, 4, 5, 6, 7, 8, 9, 10/.test(error.message),
    );

    const preset = presetFromScenario(grid, scenarioDoc);
    assert.deepStrictEqual(preset, allCompleteDefault(grid));
    labels = submitLabels(preset);
    assert.equal(Object.keys(labels).length, 8);
  });

  test(
    "live run at rt_factor 10: badge sequence mirrors the event log across a drop",
    async () => {
      const handle = await api.createSession(programId, scenarioId, 10);
      sessionId = handle.session_id;
      assert.equal(handle.state, "created");
      assert.equal(handle.rt_factor, 10);
      assert.deepStrictEqual(handle.flags, {});

      const started = await api.startSession(sessionId);
      assert.ok(started.state === "running" || started.state === "done");

      let controller: AbortController | null = null;
      const droppingFetch: FetchLike = (url, init) => {
        controller = new AbortController();
        return fetch(url, { ...init, signal: controller.signal });
      };
      let dropped = false;
      let reconnects = 0;

      watcher = new SessionWatcher(api, sessionId, STEPS);
      live = await watcher.watch({
        fetchImpl: droppingFetch,
        backoff: FAST_BACKOFF,
        onReconnect: () => {
          reconnects += 1;
        },
        onUpdate: (view) => {
          if (!dropped && view.timeline.lastSeq === 20) {
            dropped = true;
            controller?.abort();
          }
        },
      });

      assert.ok(dropped, "the injected drop never fired");
      assert.ok(reconnects >= 1);
      assert.ok(live.connections >= 2);

      // Zero gaps, zero duplicates, in order.
      assert.deepStrictEqual(
        live.events.map((event) => event.seq),
        range(1, recordedEvents.length + 1),
      );
      // The virtual timeline is identical to the recorded run.
      assert.deepStrictEqual(
        live.events.map(projection),
        recordedEvents.map(projection),
      );
      // The rendered timeline equals the one derived from the recording.
      assert.deepStrictEqual(watcher.view.timeline, recordedTimeline);
      assert.deepStrictEqual(
        badgeSequence(watcher.view.timeline),
        badgeSequence(reduceBadges(recordedEvents, STEPS)),
      );
    },
    90_000,
  );

  test("the backlog refetch delivers the same events the live watch saw", async () => {
    const backlog = await watchEvents(
      (after) => api.eventsUrl(sessionId, after),
      { backoff: FAST_BACKOFF },
    );
    assert.equal(backlog.connections, 1);
    assert.deepStrictEqual(backlog.events, live!.events);
    assert.deepStrictEqual(
      badgeSequence(reduceBadges(backlog.events, STEPS)),
      badgeSequence(watcher.view.timeline),
    );
  });

  test("reporting: the pacing flag on step 9 is visible in the final report", async () => {
    await watcher.flagStep(9, "pacing: too fast");
    assert.equal(watcher.view.flags["9"], "pacing: too fast");

    const report = await watcher.loadReport();
    assert.equal(report.sessionId, sessionId);
    assert.equal(report.adequacy, 1.0);
    const row9 = report.steps.find((row) => row.index === 9);
    assert.equal(row9?.flag, "pacing: too fast");
    assert.ok(report.steps.every((row) => row.pacing === "Adequate"));
    assert.deepStrictEqual(
      Object.keys(report.groundTruth).map(Number).sort((a, b) => a - b),
      range(3, 11),
    );
    assert.ok(Object.values(report.groundTruth).every((v) => v === "complete"));
  });

  test("evaluation: all-complete pre-labels score a perfect confusion matrix", async () => {
    const evaluated = await api.postEval([sessionId], [labels]);
    assert.equal(evaluated.accuracy, 1.0);
    assert.deepStrictEqual(evaluated.counts, evalFixture.counts);
    assert.deepStrictEqual(evaluated.accuracy_ci, evalFixture.accuracy_ci);
    assert.deepStrictEqual(evaluated.attribution, evalFixture.attribution);

    const view = buildEvalView(evaluated);
    assert.equal(view.accuracy, "100.0%");
    assert.equal(view.counts.total, 8);
    assert.equal(view.counts.truePositive, 8);
  });

  test("health reflects everything the round-trip stored", async () => {
    const health = await api.health();
    assert.equal(health.status, "ok");
    assert.equal(health.counts.prescription, 1);
    assert.equal(health.counts.program, 1);
    assert.equal(health.counts.scenario, 1);
    assert.equal(health.counts.session_log, 1);
    assert.equal(health.counts.eval_report, 1);
    assert.deepStrictEqual(health.quarantined, []);
    assert.ok((health.sessions.done ?? 0) >= 1);
  });
});
