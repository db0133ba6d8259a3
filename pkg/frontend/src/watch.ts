/**
 * Live session view: one streaming subscription driving the badge
 * timeline, plus pacing flags and the final report.
 *
 * Flags go straight to the service and the local copy is replaced by the
 * service's response, so what the view shows is always a server state.
 */

import type { ConsoleApi } from "./api.js";
import {
  applyEvent,
  emptyTimeline,
  type SessionTimeline,
} from "./badges.js";
import { watchEvents, type WatchOptions, type WatchResult } from "./sse.js";
import { buildReportView, type ReportView } from "./report.js";
import type { SessionEvent } from "./types.js";

export interface ConsoleSessionView {
  sessionId: string;
  timeline: SessionTimeline;
  flags: Record<string, string>;
  report: ReportView | null;
}

export class SessionWatcher {
  readonly api: ConsoleApi;
  readonly view: ConsoleSessionView;

  constructor(api: ConsoleApi, sessionId: string, stepIndices: Iterable<number> = []) {
    this.api = api;
    this.view = {
      sessionId,
      timeline: emptyTimeline(stepIndices),
      flags: {},
      report: null,
    };
  }

  /** Stream events until SessionDone, folding each into the timeline. */
  async watch(options: Omit<WatchOptions, "afterSeq" | "onEvent"> & {
    onUpdate?: (view: ConsoleSessionView) => void;
  } = {}): Promise<WatchResult> {
    const { onUpdate, ...watchOptions } = options;
    return watchEvents(
      (after) => this.api.eventsUrl(this.view.sessionId, after),
      {
        ...watchOptions,
        afterSeq: this.view.timeline.lastSeq,
        onEvent: (event: SessionEvent) => {
          this.view.timeline = applyEvent(this.view.timeline, event);
          onUpdate?.(this.view);
        },
      },
    );
  }

  async flagStep(stepIndex: number, flag: string): Promise<void> {
    const handle = await this.api.flagStep(this.view.sessionId, stepIndex, flag);
    this.view.flags = handle.flags;
  }

  async loadReport(): Promise<ReportView> {
    const report = buildReportView(await this.api.getReport(this.view.sessionId));
    this.view.report = report;
    this.view.flags = { ...report.steps.reduce((acc, row) => {
      if (row.flag !== null) {
        acc[String(row.index)] = row.flag;
      }
      return acc;
    }, {} as Record<string, string>) };
    return report;
  }
}
