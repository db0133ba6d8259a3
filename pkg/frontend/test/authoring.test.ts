import assert from "node:assert/strict";
import { describe, test } from "vitest";

import { ConsoleApi, ServiceError } from "../src/api.js";
import {
  CANONICAL_JOINTS,
  emptyStep,
  formFromDoc,
  FormValidationError,
  renderServiceError,
  submitPrescription,
  toPrescriptionDoc,
  validateForm,
} from "../src/authoring.js";
import type { ApiErrorBody, PrescriptionDoc } from "../src/types.js";
import { loadFixture } from "./helpers.js";

const rxDoc = loadFixture<PrescriptionDoc>("prescription.goal1.json");
const serviceErrors = loadFixture<Record<string, ApiErrorBody>>("authoring.errors.json");

/** An API whose fetch records calls and refuses to answer. */
function recordingApi(): { api: ConsoleApi; calls: string[] } {
  const calls: string[] = [];
  const api = new ConsoleApi("http://service.invalid", async (url) => {
    calls.push(url);
    throw new Error("the form must not reach the network");
  });
  return { api, calls };
}

describe("prescription form wizard", () => {
  test("a stored prescription round-trips through the form unchanged", () => {
    const form = formFromDoc(rxDoc);
    assert.deepStrictEqual(toPrescriptionDoc(form), rxDoc);
    assert.deepStrictEqual(validateForm(form), []);
  });

  test("the recorded goal-1 entry is an 11-step form", () => {
    const form = formFromDoc(rxDoc);
    assert.equal(form.steps.length, 11);
    assert.equal(form.goalId, 1);
  });

  test("empty step text is an inline error and no request is sent", async () => {
    const form = formFromDoc(rxDoc);
    const second = form.steps[1];
    assert.ok(second);
    second.text = "   ";
    assert.deepStrictEqual(validateForm(form), [
      { step: 2, field: "text", message: "step text is empty" },
    ]);

    const { api, calls } = recordingApi();
    await assert.rejects(
      submitPrescription(api, form),
      (error: unknown) =>
        error instanceof FormValidationError && error.errors[0]?.step === 2,
    );
    assert.equal(calls.length, 0);
  });

  test("joints must come from the picker vocabulary unless marked novel", () => {
    const form = formFromDoc(rxDoc);
    const step = form.steps[0];
    assert.ok(step);
    step.joints = [...step.joints, "left_hip_flexion"];
    const errors = validateForm(form);
    assert.equal(errors.length, 1);
    assert.match(errors[0]?.message ?? "", /neither canonical nor marked novel/);

    step.novel = [...step.novel, "left_hip_flexion"];
    assert.deepStrictEqual(validateForm(form), []);
  });

  test("a novel object round-trips into the entity annotations", () => {
    const step = emptyStep();
    step.text = "Stretch the rubber band between both hands.";
    step.objects = ["rubber_band"];
    step.novel = ["rubber_band"];
    const form = {
      id: "rx-novel",
      goalId: "custom" as const,
      author: "console",
      steps: [step],
    };
    assert.deepStrictEqual(validateForm(form), []);
    const doc = toPrescriptionDoc(form);
    assert.deepStrictEqual(doc.steps[0]?.entities.objects, ["rubber_band"]);
    assert.deepStrictEqual(doc.steps[0]?.entities.novel, ["rubber_band"]);
    assert.deepStrictEqual(formFromDoc(doc), form);
  });

  test("compiled documents omit empty annotation fields", () => {
    const step = emptyStep();
    step.text = "Rest your arm.";
    const doc = toPrescriptionDoc({
      id: "rx-bare",
      goalId: "custom",
      author: "",
      steps: [step],
    });
    assert.deepStrictEqual(doc.steps[0]?.entities, {});
  });

  test("the picker vocabulary covers every joint the fixtures prescribe", () => {
    assert.equal(CANONICAL_JOINTS.length, 14);
    for (const step of rxDoc.steps) {
      for (const joint of step.entities.joints ?? []) {
        assert.ok(CANONICAL_JOINTS.includes(joint), joint);
      }
    }
  });

  test("service rejections map onto the offending step", () => {
    const emptyText = serviceErrors.empty_step_text;
    const unknownJoint = serviceErrors.unknown_joint;
    assert.ok(emptyText && unknownJoint);

    assert.deepStrictEqual(renderServiceError(new ServiceError(422, emptyText)), [
      { step: 1, field: "entities", message: "missing text" },
    ]);
    const joint = renderServiceError(new ServiceError(422, unknownJoint));
    assert.equal(joint[0]?.step, 1);
    assert.match(joint[0]?.message ?? "", /neither canonical nor marked novel/);

    const whole = renderServiceError(
      new ServiceError(422, { code: "invalid", message: "prescription needs 'id' and 'steps'", detail: {} }),
    );
    assert.deepStrictEqual(whole[0], {
      step: null,
      field: "form",
      message: "prescription needs 'id' and 'steps'",
    });
  });
});
