import assert from "node:assert/strict";
import { describe, test } from "vitest";

import {
  applyEvent,
  badgeSequence,
  emptyTimeline,
  reduceBadges,
  type SessionTimeline,
} from "../src/badges.js";
import type { SessionEvent } from "../src/types.js";
import { loadFixture, range } from "./helpers.js";

const events = loadFixture<SessionEvent[]>("events.goal1.json");
const expected = loadFixture<SessionTimeline>("badges.goal1.json");
const STEPS = range(1, 12);

describe("badge reducer", () => {
  test("replaying the recorded event log reproduces the recorded timeline", () => {
    const timeline = reduceBadges(events, STEPS);
    assert.deepStrictEqual(timeline, expected);
  });

  test("incremental application equals batch replay", () => {
    let timeline = emptyTimeline(STEPS);
    for (const event of events) {
      timeline = applyEvent(timeline, event);
    }
    assert.deepStrictEqual(timeline, reduceBadges(events, STEPS));
  });

  test("every step starts Pending and every step-bearing event is one transition", () => {
    const fresh = emptyTimeline(STEPS);
    for (const step of STEPS) {
      assert.equal(fresh.badges[step], "Pending");
    }
    assert.equal(fresh.transitions.length, 0);

    const stepEvents = events.filter((e) => e.step_index !== null);
    const timeline = reduceBadges(events, STEPS);
    assert.equal(timeline.transitions.length, stepEvents.length);
    for (const [i, event] of stepEvents.entries()) {
      const transition = timeline.transitions[i];
      assert.ok(transition);
      assert.equal(transition.seq, event.seq);
      assert.equal(transition.stepIndex, event.step_index);
      assert.equal(transition.badge, event.kind);
    }
  });

  test("the terminal event flips done without inventing a step transition", () => {
    const terminal = events[events.length - 1];
    assert.ok(terminal);
    assert.equal(terminal.kind, "SessionDone");
    assert.equal(terminal.step_index, null);

    const before = reduceBadges(events.slice(0, -1), STEPS);
    assert.equal(before.done, false);
    const after = applyEvent(before, terminal);
    assert.equal(after.done, true);
    assert.equal(after.lastSeq, terminal.seq);
    assert.equal(after.clock, terminal.at);
    assert.deepStrictEqual(after.transitions, before.transitions);
    assert.deepStrictEqual(after.badges, before.badges);
  });

  test("a step's badge is the kind of its latest event", () => {
    const timeline = reduceBadges(events, STEPS);
    for (const step of STEPS) {
      const latest = [...events]
        .reverse()
        .find((e) => e.step_index === step);
      assert.ok(latest, `no events for step ${step}`);
      assert.equal(timeline.badges[step], latest.kind);
    }
  });

  test("unknown event kinds are rejected", () => {
    const bogus = {
      session_id: "s",
      seq: 1,
      kind: "Exploded",
      at: 0,
      step_index: 1,
      detail: {},
    } as unknown as SessionEvent;
    assert.throws(() => applyEvent(emptyTimeline(), bogus), /unknown event kind/);
  });

  test("badgeSequence is exactly the event log's step projection", () => {
    const timeline = reduceBadges(events, STEPS);
    assert.deepStrictEqual(
      badgeSequence(timeline),
      events
        .filter((e) => e.step_index !== null)
        .map((e) => [e.seq, e.step_index, e.kind]),
    );
  });
});
