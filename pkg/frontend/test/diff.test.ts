import assert from "node:assert/strict";
import { describe, test } from "vitest";

import { buildDiffView } from "../src/diff.js";
import type { FidelityReport, ValidateResponse } from "../src/types.js";
import { loadFixture } from "./helpers.js";

const validates = loadFixture<Record<string, ValidateResponse>>("validate.goal1.json");

const fidelityOf = (name: string): FidelityReport => {
  const doc = validates[name];
  assert.ok(doc, `fixture missing validate payload '${name}'`);
  assert.ok(doc.fidelity, `validate payload '${name}' carries no fidelity report`);
  return doc.fidelity;
};

describe("fidelity diff view", () => {
  test("chips derive solely from the service's verdicts, one row each", () => {
    for (const name of Object.keys(validates)) {
      const fidelity = fidelityOf(name);
      const view = buildDiffView(fidelity);
      assert.equal(view.rows.length, fidelity.verdicts.length);
      assert.deepStrictEqual(
        view.rows.map((row) => row.chip.toLowerCase()),
        fidelity.verdicts.map((v) => v.kind),
      );
      assert.deepStrictEqual(
        view.rows.map((row) => [row.rxIndex, row.programIndex, row.rxText, row.programText]),
        fidelity.verdicts.map((v) => [v.rx_index, v.program_index, v.rx_text, v.program_text]),
      );
      assert.equal(view.correct, fidelity.correct);
      assert.equal(view.complete, fidelity.complete);
    }
  });

  test("a faithful program renders all Match", () => {
    const view = buildDiffView(fidelityOf("clean"));
    assert.equal(view.rows.length, 11);
    assert.deepStrictEqual(view.chipCounts, {
      Match: 11,
      Omitted: 0,
      Extraneous: 0,
      Substituted: 0,
      Reordered: 0,
    });
    assert.ok(view.correct && view.complete);
  });

  test("an omitted step renders one Omitted chip with no program column", () => {
    const view = buildDiffView(fidelityOf("omit"));
    assert.equal(view.chipCounts.Omitted, 1);
    const row = view.rows.find((r) => r.chip === "Omitted");
    assert.ok(row);
    assert.equal(row.programIndex, null);
    assert.equal(row.programText, null);
    assert.ok(row.rxText);
    assert.equal(view.complete, false);
  });

  test("a duplicated step renders one Extraneous chip with no prescription column", () => {
    const view = buildDiffView(fidelityOf("duplicate"));
    assert.equal(view.chipCounts.Extraneous, 1);
    const row = view.rows.find((r) => r.chip === "Extraneous");
    assert.ok(row);
    assert.equal(row.rxIndex, null);
    assert.ok(row.programText);
  });

  test("a substituted step keeps both texts and a similarity below 1", () => {
    const view = buildDiffView(fidelityOf("substitute"));
    assert.equal(view.chipCounts.Substituted, 1);
    const row = view.rows.find((r) => r.chip === "Substituted");
    assert.ok(row);
    assert.ok(row.rxText && row.programText);
    assert.ok(row.similarity !== null && row.similarity < 1);
    assert.equal(view.correct, false);
  });

  test("a reordered program flags reordering and loses correctness", () => {
    const view = buildDiffView(fidelityOf("reorder"));
    assert.ok(view.chipCounts.Reordered >= 1);
    assert.equal(view.correct, false);
  });

  test("hallucinated monitors do not disturb the diff", () => {
    const doc = validates["hallucinate-atom"];
    assert.ok(doc);
    assert.equal(doc.hallucinations.length, 1);
    const view = buildDiffView(fidelityOf("hallucinate-atom"));
    assert.equal(view.chipCounts.Match, view.rows.length);
  });

  test("unknown verdict kinds are rejected", () => {
    const bogus = {
      correct: true,
      complete: true,
      verdicts: [
        {
          kind: "mangled",
          rx_index: 1,
          program_index: 1,
          rx_text: "a",
          program_text: "a",
          similarity: 1,
        },
      ],
    } as unknown as FidelityReport;
    assert.throws(() => buildDiffView(bogus), /unknown fidelity verdict kind/);
  });
});
