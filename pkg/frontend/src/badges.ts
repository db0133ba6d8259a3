/**
 * Step badges as a pure fold over the event stream.
 *
 * A step's badge is exactly the kind of the last event that carried its
 * index, or "Pending" before any does. No state is invented client-side:
 * the timeline records one transition per step-bearing event, so the
 * rendered badge sequence is a deterministic projection of the event log
 * and can be replayed from a recording byte for byte.
 */

import { EVENT_KINDS, type EventKind, type SessionEvent } from "./types.js";

export type Badge = "Pending" | EventKind;

export interface BadgeTransition {
  seq: number;
  at: number;
  stepIndex: number;
  badge: EventKind;
}

export interface SessionTimeline {
  badges: Record<number, Badge>;
  transitions: BadgeTransition[];
  clock: number;
  done: boolean;
  lastSeq: number;
}

export function emptyTimeline(stepIndices: Iterable<number> = []): SessionTimeline {
  const badges: Record<number, Badge> = {};
  for (const index of stepIndices) {
    badges[index] = "Pending";
  }
  return { badges, transitions: [], clock: 0, done: false, lastSeq: 0 };
}

export function applyEvent(
  timeline: SessionTimeline,
  event: SessionEvent,
): SessionTimeline {
  if (!EVENT_KINDS.includes(event.kind)) {
    throw new Error(`unknown event kind: ${String(event.kind)}`);
  }
  const next: SessionTimeline = {
    badges: { ...timeline.badges },
    transitions: timeline.transitions,
    clock: event.at,
    done: timeline.done || event.kind === "SessionDone",
    lastSeq: event.seq,
  };
  if (event.step_index !== null) {
    next.badges[event.step_index] = event.kind;
    next.transitions = [
      ...timeline.transitions,
      {
        seq: event.seq,
        at: event.at,
        stepIndex: event.step_index,
        badge: event.kind,
      },
    ];
  }
  return next;
}

export function reduceBadges(
  events: Iterable<SessionEvent>,
  stepIndices: Iterable<number> = [],
): SessionTimeline {
  let timeline = emptyTimeline(stepIndices);
  for (const event of events) {
    timeline = applyEvent(timeline, event);
  }
  return timeline;
}

/** The comparison key for "badge sequence equals the recorded event log". */
export function badgeSequence(
  timeline: SessionTimeline,
): Array<[number, number, EventKind]> {
  return timeline.transitions.map((t) => [t.seq, t.stepIndex, t.badge]);
}
