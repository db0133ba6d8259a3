import { readFileSync } from "node:fs";
import { createServer, type Server } from "node:http";
import { AddressInfo } from "node:net";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { SessionEvent } from "../src/types.js";

const fixturesDir = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(fixturesDir, name), "utf8")) as T;
}

export interface FixtureServerOptions {
  /**
   * Frame budget per connection: connection i delivers at most budget[i]
   * events and then destroys the socket mid-stream. Connections past the
   * end of the list are served to completion.
   */
  budgets?: number[];
  /** Resend this many already-delivered events on resume (overlap test). */
  rewind?: number;
  /** Sequence numbers to silently skip (gap-detection test). */
  skipSeqs?: number[];
  /** End the listed connections cleanly (no terminal event, no destroy). */
  cleanCloseAfter?: Record<number, number>;
}

export interface FixtureServer {
  baseUrl: string;
  urlFor: (after: number) => string;
  connectionCount: () => number;
  close: () => Promise<void>;
}

/** Serve a recorded event log over SSE with scripted failure modes. */
export function serveEventLog(
  events: SessionEvent[],
  options: FixtureServerOptions = {},
): Promise<FixtureServer> {
  let connections = 0;
  const server: Server = createServer((req, res) => {
    const url = new URL(req.url ?? "/", "http://localhost");
    let after = Number(url.searchParams.get("after") ?? "0");
    const lastId = req.headers["last-event-id"];
    if (typeof lastId === "string" && lastId !== "") {
      after = Math.max(after, Number(lastId));
    }
    const connection = connections;
    connections += 1;
    if (options.rewind) {
      after = Math.max(0, after - options.rewind);
    }
    res.writeHead(200, {
      "Content-Type": "text/event-stream",
      "Cache-Control": "no-cache",
    });
    const budget = options.budgets?.[connection] ?? Infinity;
    const cleanAfter = options.cleanCloseAfter?.[connection] ?? Infinity;
    let sent = 0;
    for (const event of events) {
      if (event.seq <= after) {
        continue;
      }
      if (options.skipSeqs?.includes(event.seq)) {
        continue;
      }
      if (sent >= budget) {
        res.destroy();
        return;
      }
      if (sent >= cleanAfter) {
        res.end();
        return;
      }
      res.write(
        `id: ${event.seq}\nevent: ${event.kind}\ndata: ${JSON.stringify(event)}\n\n`,
      );
      sent += 1;
    }
    res.end();
  });
  return new Promise((resolve) => {
    server.listen(0, "127.0.0.1", () => {
      const { port } = server.address() as AddressInfo;
      const baseUrl = `http://127.0.0.1:${port}`;
      resolve({
        baseUrl,
        urlFor: (after: number) =>
          `${baseUrl}/events${after > 0 ? `?after=${after}` : ""}`,
        connectionCount: () => connections,
        close: () =>
          new Promise<void>((done) => {
            server.closeAllConnections();
            server.close(() => done());
          }),
      });
    });
  });
}

export const range = (start: number, stop: number): number[] =>
  Array.from({ length: stop - start }, (_, i) => start + i);
