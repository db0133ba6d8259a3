/**
 * Server-sent event consumption with resume-on-drop.
 *
 * The service frames each session event as
 *
 *   id: <seq>
 *   event: <kind>
 *   data: <json>
 *
 * and guarantees gapless sequence numbers from 1, with backlog replay for
 * any `?after=` or `Last-Event-ID` cursor. That makes resumption purely
 * mechanical: remember the last sequence seen, reconnect with it, and drop
 * anything already delivered.
 */

import { ServiceError, type FetchLike } from "./api.js";
import type { ApiErrorBody, SessionEvent } from "./types.js";

export interface SseFrame {
  id: string | null;
  event: string | null;
  data: string;
}

/** Incremental parser for one text/event-stream connection. */
export class SseParser {
  private buffer = "";
  private id: string | null = null;
  private event: string | null = null;
  private data: string[] = [];

  /** Feed a decoded chunk; returns every frame completed by it. */
  feed(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    for (;;) {
      const newline = this.buffer.indexOf("\n");
      if (newline < 0) {
        break;
      }
      let line = this.buffer.slice(0, newline);
      this.buffer = this.buffer.slice(newline + 1);
      if (line.endsWith("\r")) {
        line = line.slice(0, -1);
      }
      const frame = this.takeLine(line);
      if (frame) {
        frames.push(frame);
      }
    }
    return frames;
  }

  private takeLine(line: string): SseFrame | null {
    if (line === "") {
      if (this.data.length === 0 && this.id === null && this.event === null) {
        return null;
      }
      const frame: SseFrame = {
        id: this.id,
        event: this.event,
        data: this.data.join("\n"),
      };
      this.id = null;
      this.event = null;
      this.data = [];
      return frame;
    }
    if (line.startsWith(":")) {
      return null;
    }
    const colon = line.indexOf(":");
    const field = colon < 0 ? line : line.slice(0, colon);
    let value = colon < 0 ? "" : line.slice(colon + 1);
    if (value.startsWith(" ")) {
      value = value.slice(1);
    }
    if (field === "id") {
      this.id = value;
    } else if (field === "event") {
      this.event = value;
    } else if (field === "data") {
      this.data.push(value);
    }
    return null;
  }
}

export class StreamDroppedError extends Error {
  constructor(cause: unknown) {
    super(`event stream dropped: ${String(cause)}`);
    this.name = "StreamDroppedError";
  }
}

export interface ReadOptions {
  lastEventId?: number;
  signal?: AbortSignal;
  fetchImpl?: FetchLike;
  onEvent: (event: SessionEvent) => void;
}

/**
 * Read one connection until the server closes it.
 *
 * Resolves with the terminal flag (a SessionDone frame was seen). Network
 * failures mid-body raise StreamDroppedError so callers can resume;
 * service errors (unknown session and friends) raise ServiceError and
 * should not be retried.
 */
export async function readEvents(
  url: string,
  options: ReadOptions,
): Promise<{ sawTerminal: boolean }> {
  const fetchImpl = options.fetchImpl ?? fetch;
  const headers: Record<string, string> = {
    Accept: "text/event-stream",
  };
  if (options.lastEventId !== undefined && options.lastEventId > 0) {
    headers["Last-Event-ID"] = String(options.lastEventId);
  }
  let response: Response;
  try {
    response = await fetchImpl(url, { headers, signal: options.signal });
  } catch (cause) {
    throw new StreamDroppedError(cause);
  }
  if (!response.ok) {
    let parsed: ApiErrorBody;
    try {
      parsed = (await response.json()) as ApiErrorBody;
    } catch {
      parsed = { code: "http_error", message: `HTTP ${response.status}`, detail: {} };
    }
    throw new ServiceError(response.status, parsed);
  }
  if (!response.body) {
    throw new StreamDroppedError("response had no body");
  }

  const parser = new SseParser();
  const decoder = new TextDecoder();
  const reader = response.body.getReader();
  let sawTerminal = false;
  for (;;) {
    let result: { done: boolean; value?: Uint8Array };
    try {
      result = await reader.read();
    } catch (cause) {
      throw new StreamDroppedError(cause);
    }
    if (result.done) {
      break;
    }
    for (const frame of parser.feed(decoder.decode(result.value, { stream: true }))) {
      const event = JSON.parse(frame.data) as SessionEvent;
      options.onEvent(event);
      if (event.kind === "SessionDone") {
        sawTerminal = true;
      }
    }
    if (sawTerminal) {
      try {
        await reader.cancel();
      } catch {
        // the stream is finished either way
      }
      break;
    }
  }
  return { sawTerminal };
}

export interface Backoff {
  initialMs: number;
  maxMs: number;
  factor: number;
}

export const DEFAULT_BACKOFF: Backoff = {
  initialMs: 250,
  maxMs: 4000,
  factor: 2,
};

export interface WatchOptions {
  afterSeq?: number;
  backoff?: Backoff;
  signal?: AbortSignal;
  fetchImpl?: FetchLike;
  onEvent?: (event: SessionEvent) => void;
  onReconnect?: (attempt: number, delayMs: number) => void;
}

export interface WatchResult {
  events: SessionEvent[];
  lastSeq: number;
  connections: number;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Subscribe to a session's events until SessionDone, resuming after drops.
 *
 * `urlFor(after)` must produce the stream URL with the given cursor; the
 * cursor is also sent as Last-Event-ID. Events are delivered exactly once
 * and in order: anything at or below the cursor is discarded, so overlap
 * in a resumed backlog is harmless.
 */
export async function watchEvents(
  urlFor: (after: number) => string,
  options: WatchOptions = {},
): Promise<WatchResult> {
  const backoff = options.backoff ?? DEFAULT_BACKOFF;
  const events: SessionEvent[] = [];
  let lastSeq = options.afterSeq ?? 0;
  let connections = 0;
  let delayMs = backoff.initialMs;

  for (;;) {
    connections += 1;
    let outcome: { sawTerminal: boolean };
    try {
      outcome = await readEvents(urlFor(lastSeq), {
        lastEventId: lastSeq,
        signal: options.signal,
        fetchImpl: options.fetchImpl,
        onEvent: (event) => {
          if (event.seq <= lastSeq) {
            return;
          }
          if (event.seq !== lastSeq + 1) {
            throw new Error(
              `event stream gap: expected seq ${lastSeq + 1}, got ${event.seq}`,
            );
          }
          lastSeq = event.seq;
          events.push(event);
          delayMs = backoff.initialMs;
          options.onEvent?.(event);
        },
      });
    } catch (error) {
      if (options.signal?.aborted) {
        return { events, lastSeq, connections };
      }
      if (error instanceof StreamDroppedError) {
        options.onReconnect?.(connections, delayMs);
        await sleep(delayMs);
        delayMs = Math.min(delayMs * backoff.factor, backoff.maxMs);
        continue;
      }
      throw error;
    }
    if (outcome.sawTerminal) {
      return { events, lastSeq, connections };
    }
    if (options.signal?.aborted) {
      return { events, lastSeq, connections };
    }
    // The server closed a healthy stream without a terminal event (idle
    // timeout before the session started); reconnect from the cursor.
    options.onReconnect?.(connections, delayMs);
    await sleep(delayMs);
    delayMs = Math.min(delayMs * backoff.factor, backoff.maxMs);
  }
}
