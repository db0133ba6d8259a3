/**
 * Side-by-side fidelity diff rows.
 *
 * Chips come straight from the service's fidelity verdicts; this module
 * only renames the wire kinds to their display labels and counts them.
 */

import type { FidelityReport, VerdictKind } from "./types.js";

export type Chip = "Match" | "Omitted" | "Extraneous" | "Substituted" | "Reordered";

const CHIP_OF: Record<VerdictKind, Chip> = {
  match: "Match",
  omitted: "Omitted",
  extraneous: "Extraneous",
  substituted: "Substituted",
  reordered: "Reordered",
};

export interface DiffRow {
  chip: Chip;
  rxIndex: number | null;
  programIndex: number | null;
  rxText: string | null;
  programText: string | null;
  similarity: number | null;
}

export interface DiffView {
  correct: boolean;
  complete: boolean;
  rows: DiffRow[];
  chipCounts: Record<Chip, number>;
}

export function buildDiffView(fidelity: FidelityReport): DiffView {
  const rows: DiffRow[] = [];
  const chipCounts: Record<Chip, number> = {
    Match: 0,
    Omitted: 0,
    Extraneous: 0,
    Substituted: 0,
    Reordered: 0,
  };
  for (const verdict of fidelity.verdicts) {
    const chip = CHIP_OF[verdict.kind];
    if (chip === undefined) {
      throw new Error(`unknown fidelity verdict kind: ${String(verdict.kind)}`);
    }
    chipCounts[chip] += 1;
    rows.push({
      chip,
      rxIndex: verdict.rx_index,
      programIndex: verdict.program_index,
      rxText: verdict.rx_text,
      programText: verdict.program_text,
      similarity: verdict.similarity,
    });
  }
  return {
    correct: fidelity.correct,
    complete: fidelity.complete,
    rows,
    chipCounts,
  };
}
