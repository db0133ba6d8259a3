/**
 * Report panel view models.
 *
 * Pure joins over the service's report and evaluation payloads: step rows
 * merge the session log with pacing verdicts and reviewer flags by step
 * index, and the evaluation summary formats the service's numbers for
 * display. Nothing is computed that the service did not already report.
 */

import type { EvalReportDoc, SessionReportDoc } from "./types.js";

export interface ReportStepRow {
  index: number;
  monitored: boolean;
  announcedAt: number;
  detectedComplete: boolean;
  detectionAt: number | null;
  timedOut: boolean;
  fallbackEngaged: boolean;
  advancedAt: number;
  pacing: string | null;
  trueCompletionAt: number | null;
  flag: string | null;
}

export interface ReportView {
  sessionId: string;
  programId: string;
  scenarioId: string;
  adequacy: number;
  groundTruth: Record<string, number | null>;
  steps: ReportStepRow[];
}

export function buildReportView(report: SessionReportDoc): ReportView {
  const pacingByStep = new Map(report.pacing.map((row) => [row.step_index, row]));
  const steps = report.log.steps.map((record) => {
    const pacing = pacingByStep.get(record.index);
    return {
      index: record.index,
      monitored: record.monitored,
      announcedAt: record.announced_at,
      detectedComplete: record.detected_complete,
      detectionAt: record.detection_at,
      timedOut: record.timed_out,
      fallbackEngaged: record.fallback_engaged,
      advancedAt: record.advanced_at,
      pacing: pacing && pacing.verdict !== "" ? pacing.verdict : null,
      trueCompletionAt: pacing ? pacing.true_completion_at : null,
      flag: report.flags[String(record.index)] ?? null,
    };
  });
  return {
    sessionId: report.session_id,
    programId: report.program_id,
    scenarioId: report.scenario_id,
    adequacy: report.adequacy,
    groundTruth: report.ground_truth,
    steps,
  };
}

export interface EvalView {
  accuracy: string;
  interval: string;
  confidence: number;
  counts: {
    truePositive: number;
    falsePositive: number;
    falseNegative: number;
    trueNegative: number;
    total: number;
  };
  hallucinationShare: string;
  errorsWithHallucination: number;
  errorsNoiseOnly: number;
}

const pct = (value: number) => `${(value * 100).toFixed(1)}%`;

export function buildEvalView(doc: EvalReportDoc): EvalView {
  return {
    accuracy: pct(doc.accuracy),
    interval: `${pct(doc.accuracy_ci[0])} - ${pct(doc.accuracy_ci[1])}`,
    confidence: doc.confidence,
    counts: {
      truePositive: doc.counts.true_positive,
      falsePositive: doc.counts.false_positive,
      falseNegative: doc.counts.false_negative,
      trueNegative: doc.counts.true_negative,
      total: doc.counts.total,
    },
    hallucinationShare: pct(doc.attribution.hallucination_share),
    errorsWithHallucination: doc.attribution.errors_with_hallucination,
    errorsNoiseOnly: doc.attribution.errors_noise_only,
  };
}
