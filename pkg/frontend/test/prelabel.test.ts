import assert from "node:assert/strict";
import { describe, test } from "vitest";

import {
  allCompleteDefault,
  buildPrelabelGrid,
  presetFromScenario,
  PrelabelGridError,
  setLabel,
  submitLabels,
} from "../src/prelabel.js";
import type { ScenarioDoc } from "../src/types.js";
import { loadFixture } from "./helpers.js";

const scenario = loadFixture<ScenarioDoc>("scenario.goal1.json");
const mix = loadFixture<{
  seed: number;
  incomplete_fraction: number;
  monitored: number[];
  scenario: ScenarioDoc;
  expected: Record<string, string>;
}>("prelabel.mix.json");

describe("pre-label grid", () => {
  test("rows are the scenario's monitored steps, unlabeled", () => {
    const grid = buildPrelabelGrid("prog-1", scenario);
    assert.deepStrictEqual(
      grid.rows.map((row) => row.stepIndex),
      [3, 4, 5, 6, 7, 8, 9, 10],
    );
    assert.ok(grid.rows.every((row) => row.label === null));
    assert.equal(grid.programId, "prog-1");
  });

  test("an unlabeled monitored step blocks submission, by name", () => {
    const grid = buildPrelabelGrid("prog-1", scenario);
    assert.throws(
      () => submitLabels(grid),
      (error: unknown) =>
        error instanceof PrelabelGridError &&
        /unlabeled monitored steps: 3, 4, 5, 6, 7, 8, 9, 10/.test(error.message),
    );
    const partial = setLabel(grid, 3, "complete");
    assert.throws(() => submitLabels(partial), /4, 5, 6, 7, 8, 9, 10/);
  });

  test("the all-complete default submits cleanly", () => {
    const labels = submitLabels(allCompleteDefault(buildPrelabelGrid("p", scenario)));
    assert.deepStrictEqual(labels, {
      "3": "complete",
      "4": "complete",
      "5": "complete",
      "6": "complete",
      "7": "complete",
      "8": "complete",
      "9": "complete",
      "10": "complete",
    });
  });

  test("toggles land in the submitted mapping, untouched rows keep theirs", () => {
    let grid = allCompleteDefault(buildPrelabelGrid("p", scenario));
    grid = setLabel(grid, 5, "incomplete");
    const labels = submitLabels(grid);
    assert.equal(labels["5"], "incomplete");
    assert.equal(labels["3"], "complete");
    assert.equal(Object.values(labels).filter((l) => l === "incomplete").length, 1);
  });

  test("labeling a step the grid does not show is rejected", () => {
    const grid = buildPrelabelGrid("p", scenario);
    assert.throws(() => setLabel(grid, 1, "complete"), /step 1 is not in the grid/);
  });

  test("the incomplete-mix preset reproduces the recorded server-side mix", () => {
    const grid = buildPrelabelGrid("p", mix.scenario);
    const preset = presetFromScenario(grid, mix.scenario);
    assert.deepStrictEqual(submitLabels(preset), mix.expected);
  });

  test("the recorded mix holds the advertised incomplete share", () => {
    const incomplete = Object.values(mix.expected).filter(
      (label) => label === "incomplete",
    ).length;
    assert.equal(
      incomplete,
      Math.round(mix.monitored.length * mix.incomplete_fraction),
    );
  });

  test("a scenario without monitored steps cannot seed a grid", () => {
    const empty = { ...scenario, script: [] };
    assert.throws(() => buildPrelabelGrid("p", empty), /no monitored steps/);
  });
});
