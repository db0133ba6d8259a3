/**
 * Typed fetch client for the exercise service.
 *
 * One method per endpoint, no caching, no retries: callers that need
 * resilience (the event stream) layer it on top. Errors surface as
 * ServiceError carrying the service's own {code, message, detail} body
 * so views can render them without guessing.
 */

import type {
  ApiErrorBody,
  EvalReportDoc,
  HealthResponse,
  PrescriptionDoc,
  ProgramPayload,
  RetrofitResponse,
  ScenarioDoc,
  SessionHandle,
  SessionReportDoc,
  StoredRecord,
  ValidateResponse,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ServiceError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ServiceError";
    this.status = status;
    this.code = body.code;
    this.detail = body.detail;
  }
}

export interface GenerateOptions {
  backend?: "template" | "replay" | "remote";
  replay_dir?: string;
  url?: string;
  model?: string;
  key?: string;
}

export class ConsoleApi {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = {
          code: "http_error",
          message: `HTTP ${response.status}`,
          detail: {},
        };
      }
      throw new ServiceError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  postPrescription(doc: PrescriptionDoc): Promise<{ id: string; digest: string }> {
    return this.request("POST", "/prescriptions", doc);
  }

  getPrescription(id: string): Promise<StoredRecord<PrescriptionDoc>> {
    return this.request("GET", `/prescriptions/${id}`);
  }

  generateProgram(
    prescriptionId: string,
    options: GenerateOptions = {},
  ): Promise<{ id: string } & ProgramPayload> {
    return this.request(
      "POST",
      `/prescriptions/${prescriptionId}/generate`,
      options,
    );
  }

  getProgram(id: string): Promise<StoredRecord<ProgramPayload>> {
    return this.request("GET", `/programs/${id}`);
  }

  validateProgram(
    programId: string,
    prescriptionId?: string,
  ): Promise<ValidateResponse> {
    const body = prescriptionId ? { prescription_id: prescriptionId } : {};
    return this.request("POST", `/programs/${programId}/validate`, body);
  }

  postScenario(doc: ScenarioDoc): Promise<{ id: string; digest: string }> {
    return this.request("POST", "/scenarios", doc);
  }

  getScenario(id: string): Promise<StoredRecord<ScenarioDoc>> {
    return this.request("GET", `/scenarios/${id}`);
  }

  createSession(
    programId: string,
    scenarioId: string,
    rtFactor = 1.0,
  ): Promise<SessionHandle> {
    return this.request("POST", "/sessions", {
      program_id: programId,
      scenario_id: scenarioId,
      rt_factor: rtFactor,
    });
  }

  getSession(id: string): Promise<SessionHandle> {
    return this.request("GET", `/sessions/${id}`);
  }

  startSession(id: string): Promise<SessionHandle> {
    return this.request("POST", `/sessions/${id}/start`);
  }

  flagStep(
    sessionId: string,
    stepIndex: number,
    flag: string,
  ): Promise<SessionHandle> {
    return this.request("POST", `/sessions/${sessionId}/flags`, {
      step_index: stepIndex,
      flag,
    });
  }

  getReport(sessionId: string): Promise<SessionReportDoc> {
    return this.request("GET", `/sessions/${sessionId}/report`);
  }

  postEval(
    sessionIds: string[],
    prelabels?: Array<Record<string, string>>,
    confidence = 0.95,
  ): Promise<EvalReportDoc> {
    const body: Record<string, unknown> = {
      session_ids: sessionIds,
      confidence,
    };
    if (prelabels !== undefined) {
      body.prelabels = prelabels;
    }
    return this.request("POST", "/eval", body);
  }

  postRetrofit(
    prescriptionId: string,
    templateId: number,
  ): Promise<RetrofitResponse> {
    return this.request("POST", "/retrofit", {
      prescription_id: prescriptionId,
      template_id: templateId,
    });
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  eventsUrl(sessionId: string, after = 0): string {
    const suffix = after > 0 ? `?after=${after}` : "";
    return `${this.baseUrl}/sessions/${sessionId}/events${suffix}`;
  }
}
