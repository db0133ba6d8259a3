/**
 * Prescription authoring: a step-by-step form that compiles to the JSON
 * document the service stores verbatim.
 *
 * The form enforces only what the pickers enforce structurally (step text
 * present, joints chosen from the canonical list unless explicitly marked
 * novel). Everything else is the service's call; its validation errors
 * come back as {code, message, detail} and are mapped onto the offending
 * step so the wizard can render them inline.
 */

import type { ConsoleApi } from "./api.js";
import { ServiceError } from "./api.js";
import type { EntityAnnotation, PrescriptionDoc, Threshold } from "./types.js";

/** Joint vocabulary the entity picker offers (mirrors the service's). */
export const CANONICAL_JOINTS: readonly string[] = [
  "left_shoulder_abduction",
  "left_shoulder_flexion",
  "left_elbow_flexion",
  "left_forearm_rotation",
  "left_wrist_flexion",
  "left_finger_spread",
  "left_thumb_opposition",
  "right_shoulder_abduction",
  "right_shoulder_flexion",
  "right_elbow_flexion",
  "right_forearm_rotation",
  "right_wrist_flexion",
  "right_finger_spread",
  "right_thumb_opposition",
];

export interface StepForm {
  text: string;
  joints: string[];
  objects: string[];
  targets: string[];
  thresholds: Threshold[];
  conditional: boolean;
  preparatory: boolean;
  alternatives: string[];
  /** Entity names deliberately outside the canonical vocabularies. */
  novel: string[];
}

export interface PrescriptionForm {
  id: string;
  goalId: number | "custom";
  author: string;
  steps: StepForm[];
}

export interface FieldError {
  /** 1-based step the error belongs to, or null for the whole form. */
  step: number | null;
  field: string;
  message: string;
}

export class FormValidationError extends Error {
  readonly errors: FieldError[];

  constructor(errors: FieldError[]) {
    super(errors.map((e) => e.message).join("; "));
    this.name = "FormValidationError";
    this.errors = errors;
  }
}

export function emptyStep(): StepForm {
  return {
    text: "",
    joints: [],
    objects: [],
    targets: [],
    thresholds: [],
    conditional: false,
    preparatory: false,
    alternatives: [],
    novel: [],
  };
}

export function validateForm(form: PrescriptionForm): FieldError[] {
  const errors: FieldError[] = [];
  if (form.id.trim() === "") {
    errors.push({ step: null, field: "id", message: "prescription id is required" });
  }
  if (form.steps.length === 0) {
    errors.push({ step: null, field: "steps", message: "at least one step is required" });
  }
  form.steps.forEach((step, i) => {
    const index = i + 1;
    if (step.text.trim() === "") {
      errors.push({ step: index, field: "text", message: "step text is empty" });
    }
    for (const joint of step.joints) {
      if (!CANONICAL_JOINTS.includes(joint) && !step.novel.includes(joint)) {
        errors.push({
          step: index,
          field: "joints",
          message: `joint '${joint}' is neither canonical nor marked novel`,
        });
      }
    }
  });
  return errors;
}

function annotationOf(step: StepForm): EntityAnnotation {
  const entities: EntityAnnotation = {};
  if (step.joints.length > 0) entities.joints = [...step.joints];
  if (step.objects.length > 0) entities.objects = [...step.objects];
  if (step.targets.length > 0) entities.targets = [...step.targets];
  if (step.thresholds.length > 0) {
    entities.thresholds = step.thresholds.map((t) => ({ ...t }));
  }
  if (step.conditional) entities.conditional = true;
  if (step.preparatory) entities.preparatory = true;
  if (step.alternatives.length > 0) entities.alternatives = [...step.alternatives];
  if (step.novel.length > 0) entities.novel = [...step.novel];
  return entities;
}

export function toPrescriptionDoc(form: PrescriptionForm): PrescriptionDoc {
  return {
    id: form.id,
    goal_id: form.goalId,
    author: form.author,
    steps: form.steps.map((step) => ({
      text: step.text,
      entities: annotationOf(step),
    })),
  };
}

/** Rebuild an editable form from a stored prescription document. */
export function formFromDoc(doc: PrescriptionDoc): PrescriptionForm {
  return {
    id: doc.id,
    goalId: doc.goal_id,
    author: doc.author,
    steps: doc.steps.map((step) => ({
      text: step.text,
      joints: [...(step.entities.joints ?? [])],
      objects: [...(step.entities.objects ?? [])],
      targets: [...(step.entities.targets ?? [])],
      thresholds: (step.entities.thresholds ?? []).map((t) => ({ ...t })),
      conditional: step.entities.conditional ?? false,
      preparatory: step.entities.preparatory ?? false,
      alternatives: [...(step.entities.alternatives ?? [])],
      novel: [...(step.entities.novel ?? [])],
    })),
  };
}

/**
 * Map a service validation error onto the step it names.
 *
 * The service prefixes per-step messages with "step N:"; anything else
 * lands on the form as a whole.
 */
export function renderServiceError(error: ServiceError): FieldError[] {
  const match = /^step (\d+): (.*)$/.exec(error.message);
  if (match) {
    return [
      { step: Number(match[1]), field: "entities", message: match[2] as string },
    ];
  }
  return [{ step: null, field: "form", message: error.message }];
}

/**
 * Validate locally, then persist. No request is sent while the form has
 * errors; service-side rejections are rethrown untouched for the wizard
 * to render via renderServiceError.
 */
export async function submitPrescription(
  api: ConsoleApi,
  form: PrescriptionForm,
): Promise<{ id: string; digest: string }> {
  const errors = validateForm(form);
  if (errors.length > 0) {
    throw new FormValidationError(errors);
  }
  return api.postPrescription(toPrescriptionDoc(form));
}
