/**
 * Wire types for the exercise service.
 *
 * Every interface here mirrors a JSON document the service emits or
 * accepts, field for field. The console never reshapes these beyond
 * display joins, so they are the single vocabulary shared by the API
 * client, the view builders, and the snapshot fixtures.
 */

export type EventKind =
  | "Announced"
  | "DetectionTick"
  | "Completed"
  | "TimedOut"
  | "FallbackEngaged"
  | "Advanced"
  | "SessionDone";

export const EVENT_KINDS: readonly EventKind[] = [
  "Announced",
  "DetectionTick",
  "Completed",
  "TimedOut",
  "FallbackEngaged",
  "Advanced",
  "SessionDone",
];

export interface SessionEvent {
  session_id: string;
  seq: number;
  kind: EventKind;
  at: number;
  step_index: number | null;
  detail: Record<string, unknown>;
}

export type VerdictKind =
  | "match"
  | "omitted"
  | "extraneous"
  | "substituted"
  | "reordered";

export interface StepVerdict {
  kind: VerdictKind;
  rx_index: number | null;
  program_index: number | null;
  rx_text: string | null;
  program_text: string | null;
  similarity: number | null;
}

export interface FidelityReport {
  correct: boolean;
  complete: boolean;
  verdicts: StepVerdict[];
}

export interface HallucinationFinding {
  step_index: number;
  atom: string;
  symbol: string;
  reason: string;
  quantity: number | null;
}

export interface Threshold {
  quantity: number;
  unit: string;
}

export interface EntityAnnotation {
  joints?: string[];
  objects?: string[];
  targets?: string[];
  thresholds?: Threshold[];
  conditional?: boolean;
  preparatory?: boolean;
  alternatives?: string[];
  novel?: string[];
}

export interface PrescriptionStepDoc {
  text: string;
  entities: EntityAnnotation;
}

export interface PrescriptionDoc {
  id: string;
  goal_id: number | "custom";
  author: string;
  steps: PrescriptionStepDoc[];
}

export interface Provenance {
  backend: string;
  timestamp: string;
  prompt_digest: string;
}

export interface ProgramPayload {
  prescription_id: string;
  text: string;
  provenance: Provenance;
  fidelity: FidelityReport;
  hallucinations: HallucinationFinding[];
}

export interface Diagnostic {
  code: string;
  message: string;
  line?: number | null;
}

export interface ValidateResponse {
  valid: boolean;
  faithful: boolean;
  diagnostics: Diagnostic[];
  fidelity: FidelityReport | null;
  hallucinations: HallucinationFinding[];
}

export type BehaviorKind = "complete_at" | "no_attempt" | "partial_attempt";

export interface ScriptEntry {
  step: number;
  kind: BehaviorKind;
  offset_s?: number;
  fraction?: number;
}

export interface ScenarioDoc {
  profile: {
    rom_limits: Record<string, [number, number] | number[]>;
    movement_speed_scale: number;
    affected_side: string;
  };
  script: ScriptEntry[];
  noise: {
    fp_rate: number;
    fn_rate: number;
    dropout_rate: number;
    seed: number;
  };
  hz: number;
}

export type SessionState = "created" | "running" | "done" | "failed";

export interface SessionHandle {
  session_id: string;
  program_id: string;
  scenario_id: string;
  rt_factor: number;
  state: SessionState;
  error: string | null;
  flags: Record<string, string>;
}

export interface StepRecordDoc {
  index: number;
  monitored: boolean;
  announced_at: number;
  detected_complete: boolean;
  detection_at: number | null;
  timed_out: boolean;
  fallback_engaged: boolean;
  advanced_at: number;
}

export interface SessionLogDoc {
  program_name: string;
  poll_hz: number;
  clock_profile: string;
  active_side: string;
  seed: number;
  steps: StepRecordDoc[];
}

export interface PacingRow {
  step_index: number;
  verdict: string;
  advanced_at: number;
  true_completion_at: number | null;
}

export interface SessionReportDoc {
  session_id: string;
  program_id: string;
  scenario_id: string;
  log: SessionLogDoc;
  /** Monitored step index to true completion time (null: never completed). */
  ground_truth: Record<string, number | null>;
  pacing: PacingRow[];
  adequacy: number;
  flags: Record<string, string>;
}

export interface ConfusionCounts {
  true_positive: number;
  false_positive: number;
  false_negative: number;
  true_negative: number;
  total: number;
}

export interface EvalReportDoc {
  id?: string;
  session_ids: string[];
  counts: ConfusionCounts;
  accuracy: number;
  accuracy_ci: [number, number];
  confidence: number;
  attribution: {
    hallucination_step_count: number;
    hallucination_share: number;
    errors_with_hallucination: number;
    errors_noise_only: number;
  };
}

export interface RetrofitResponse {
  id: string;
  prescription_id: string;
  template_id: number;
  translatable: boolean;
  categories: string[];
  evidence: Record<string, string[]>;
  dropped_template_steps: number[];
  side: string | null;
  repeats: number | null;
  difficulty: Record<string, unknown>;
}

export interface HealthResponse {
  status: string;
  counts: Record<string, number>;
  quarantined: string[];
  sessions: Record<string, number>;
}

export interface StoredRecord<T> {
  id: string;
  digest: string;
  created_at: number;
  payload: T;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}
