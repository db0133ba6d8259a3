/**
 * Pre-label grid: expected outcomes for a session, entered before it runs.
 *
 * The grid's rows are the monitored steps of the scenario the clinician is
 * about to launch (the scenario's script lists exactly those). Labels stay
 * client-side until submission, which produces the prelabel mapping the
 * evaluation endpoint consumes. Submission refuses to proceed while any
 * monitored step is unlabeled.
 *
 * The preset fill also reads the scenario: a step scripted to complete is
 * preset "complete", anything else "incomplete". All mixing and statistics
 * stay server-side; the grid only mirrors what the scenario already says.
 */

import type { ScenarioDoc } from "./types.js";

export type PreLabel = "complete" | "incomplete";

export interface PrelabelRow {
  stepIndex: number;
  label: PreLabel | null;
}

export interface PrelabelGrid {
  programId: string;
  rows: PrelabelRow[];
}

export class PrelabelGridError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PrelabelGridError";
  }
}

export function buildPrelabelGrid(
  programId: string,
  scenario: ScenarioDoc,
): PrelabelGrid {
  const rows = [...scenario.script]
    .sort((a, b) => a.step - b.step)
    .map((entry) => ({ stepIndex: entry.step, label: null }));
  if (rows.length === 0) {
    throw new PrelabelGridError("scenario script has no monitored steps");
  }
  return { programId, rows };
}

export function setLabel(
  grid: PrelabelGrid,
  stepIndex: number,
  label: PreLabel,
): PrelabelGrid {
  if (!grid.rows.some((row) => row.stepIndex === stepIndex)) {
    throw new PrelabelGridError(`step ${stepIndex} is not in the grid`);
  }
  return {
    programId: grid.programId,
    rows: grid.rows.map((row) =>
      row.stepIndex === stepIndex ? { stepIndex, label } : row,
    ),
  };
}

export function allCompleteDefault(grid: PrelabelGrid): PrelabelGrid {
  return {
    programId: grid.programId,
    rows: grid.rows.map((row) => ({ stepIndex: row.stepIndex, label: "complete" as const })),
  };
}

/** Preset every row from the scenario's scripted behavior. */
export function presetFromScenario(
  grid: PrelabelGrid,
  scenario: ScenarioDoc,
): PrelabelGrid {
  const byStep = new Map(scenario.script.map((entry) => [entry.step, entry.kind]));
  return {
    programId: grid.programId,
    rows: grid.rows.map((row) => {
      const kind = byStep.get(row.stepIndex);
      if (kind === undefined) {
        throw new PrelabelGridError(
          `scenario has no behavior for step ${row.stepIndex}`,
        );
      }
      return {
        stepIndex: row.stepIndex,
        label: (kind === "complete_at" ? "complete" : "incomplete") as PreLabel,
      };
    }),
  };
}

/**
 * The {step index: label} mapping for the evaluation endpoint.
 *
 * Raises with every unlabeled step named, so the form can highlight them.
 */
export function submitLabels(grid: PrelabelGrid): Record<string, PreLabel> {
  const missing = grid.rows.filter((row) => row.label === null);
  if (missing.length > 0) {
    const steps = missing.map((row) => row.stepIndex).join(", ");
    throw new PrelabelGridError(`unlabeled monitored steps: ${steps}`);
  }
  const labels: Record<string, PreLabel> = {};
  for (const row of grid.rows) {
    labels[String(row.stepIndex)] = row.label as PreLabel;
  }
  return labels;
}
