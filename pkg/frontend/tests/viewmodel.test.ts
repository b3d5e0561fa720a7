import { describe, expect, it } from "vitest";

import type { StreamRecord } from "../src/records.js";
import { applyRecord, initialView, replay } from "../src/viewmodel.js";
import { deepFreeze, loadJson, loadStream } from "./helpers.js";

const GODAI = "godai-bo3-seed42.stream.json";
const EPTA = "epta-seed7.stream.json";
const IDIO = "idio-seed11.stream.json";

function synthetic(partial: Partial<StreamRecord> & { kind: string; detail: unknown }): StreamRecord {
  return { seq: 1, t_ms: 0, session_id: "s", ...partial } as StreamRecord;
}

describe("stream replay", () => {
  it("replaying the recorded godai stream reproduces the snapshot fixture", () => {
    const view = replay(loadStream(GODAI));
    expect(JSON.parse(JSON.stringify(view))).toEqual(loadJson("godai-bo3-seed42.view.json"));
  });

  it("replaying the recorded epta stream reproduces the snapshot fixture", () => {
    const view = replay(loadStream(EPTA));
    expect(JSON.parse(JSON.stringify(view))).toEqual(loadJson("epta-seed7.view.json"));
  });

  it("replaying the recorded idio stream reproduces the snapshot fixture", () => {
    const view = replay(loadStream(IDIO));
    expect(JSON.parse(JSON.stringify(view))).toEqual(loadJson("idio-seed11.view.json"));
  });

  it("final godai view carries the stream-announced outcome verbatim", () => {
    const view = replay(loadStream(GODAI));
    expect(view.phase).toBe("completed");
    expect(view.scoreboard.winner).toBe("right");
    expect(view.scoreboard.godaiScores).toEqual({ left: 1, right: 2 });
    expect(view.scoreboard.finished).toBe(true);
    expect(view.round).toBe(3);
    expect(view.reveal.visible).toBe(false);
    expect(view.reveal.usedInRound).toBe(3);
    expect(view.ended).toEqual({ reason: "completed", durationMs: 51000 });
    expect(view.lastSeq).toBe(83);
  });

  it("final epta view mirrors the bust exactly as streamed", () => {
    const view = replay(loadStream(EPTA));
    expect(view.scoreboard.eptaSums).toEqual({ left: 3, right: 9 });
    expect(view.scoreboard.outcome).toBe("lost");
    expect(view.scoreboard.decidedBy).toBe("right");
    expect(view.scoreboard.finished).toBe(true);
  });

  it("final idio view holds all five struck gestures", () => {
    const view = replay(loadStream(IDIO));
    expect(view.scoreboard.struck).toEqual([
      "middle_finger", "open_palm", "three_finger", "wrist_inward", "wrist_outward",
    ]);
    expect(view.scoreboard.finished).toBe(true);
  });

  it("replay is deterministic: two runs agree byte for byte", () => {
    const records = loadStream(GODAI);
    const a = JSON.stringify(replay(records));
    const b = JSON.stringify(replay(records));
    expect(a).toBe(b);
  });

  it("applyRecord never mutates its inputs", () => {
    let view = deepFreeze(initialView());
    for (const record of loadStream(GODAI)) {
      view = deepFreeze(applyRecord(view, deepFreeze(record)));
    }
    expect(view.phase).toBe("completed");
  });
});

describe("reveal projection", () => {
  it("results stay hidden until shown and hide again on the stream's say-so", () => {
    let view = initialView();
    let everVisibleOutsideReveal = false;
    let shown = 0;
    for (const record of loadStream(GODAI)) {
      view = applyRecord(view, record);
      if (record.kind === "effect" && record.detail.effect === "show_result") {
        shown += 1;
        expect(view.reveal.visible).toBe(true);
        expect(view.reveal.durationMs).toBe(2000);
      }
      if (record.kind === "effect" && record.detail.effect === "hide_result") {
        expect(view.reveal.visible).toBe(false);
      }
      if (record.kind === "round_resolved" && view.reveal.usedInRound !== record.detail.round) {
        everVisibleOutsideReveal ||= view.reveal.visible;
      }
    }
    expect(shown).toBe(3);
    expect(everVisibleOutsideReveal).toBe(false);
  });

  it("visible spans equal the announced duration in stream time", () => {
    let view = initialView();
    let shownAt: number | null = null;
    const spans: number[] = [];
    for (const record of loadStream(GODAI)) {
      const before = view.reveal.visible;
      view = applyRecord(view, record);
      if (!before && view.reveal.visible) shownAt = record.t_ms;
      if (before && !view.reveal.visible && shownAt !== null) {
        spans.push(record.t_ms - shownAt);
        expect(record.t_ms - shownAt).toBe(view.reveal.durationMs);
      }
    }
    expect(spans).toEqual([2000, 2000, 2000]);
  });
});

describe("struck tracker", () => {
  it("struck gestures only ever accumulate", () => {
    let view = initialView();
    let previous: string[] = [];
    for (const record of loadStream(IDIO)) {
      view = applyRecord(view, record);
      for (const gesture of previous) {
        expect(view.scoreboard.struck).toContain(gesture);
      }
      previous = view.scoreboard.struck;
    }
    expect(previous).toHaveLength(5);
  });
});

describe("stream-fact bookkeeping", () => {
  it("usage limit latches a persistent banner", () => {
    let view = initialView();
    view = applyRecord(view, synthetic({ kind: "usage_limit", detail: { device: "left" } }));
    expect(view.usageBanner).toEqual(["left"]);
    expect(view.hands.left.usageNoticed).toBe(true);
    view = applyRecord(view, synthetic({
      seq: 2, kind: "phase_changed", detail: { from: "actuating", to: "interpret_window" },
    }));
    view = applyRecord(view, synthetic({ seq: 3, kind: "usage_limit", detail: { device: "left" } }));
    expect(view.usageBanner).toEqual(["left"]);
  });

  it("kill switch marks the struck hand", () => {
    let view = initialView();
    view = applyRecord(view, synthetic({ kind: "kill_switch", detail: { side: "right" } }));
    expect(view.hands.right.killed).toBe(true);
    expect(view.hands.left.killed).toBe(false);
  });

  it("pause and resume mirror the loop", () => {
    let view = initialView();
    view = applyRecord(view, synthetic({ kind: "paused", detail: { resume_to: "breathing" } }));
    expect(view.paused).toBe(true);
    expect(view.resumeTo).toBe("breathing");
    view = applyRecord(view, synthetic({ seq: 2, kind: "resumed", detail: {} }));
    expect(view.paused).toBe(false);
  });

  it("rejected inputs are counted but change nothing else", () => {
    let view = replay(loadStream(GODAI).slice(0, 10));
    const before = JSON.stringify({ ...view, lastRejected: null, rejectedCount: 0, lastSeq: 0, lastTms: 0 });
    view = applyRecord(view, synthetic({
      seq: 99, t_ms: 5000, kind: "invalid_event",
      detail: { phase: "breathing", event: "reveal_pressed" },
    }));
    expect(view.rejectedCount).toBe(1);
    expect(view.lastRejected).toEqual({ phase: "breathing", event: "reveal_pressed" });
    const after = JSON.stringify({ ...view, lastRejected: null, rejectedCount: 0, lastSeq: 0, lastTms: 0 });
    expect(after).toBe(before);
  });

  it("unrecognized kinds are absorbed without damage", () => {
    let view = initialView();
    view = applyRecord(view, synthetic({ kind: "something_new", detail: { x: 1 } } as any));
    expect(view.lastSeq).toBe(1);
    expect(view.phase).toBe("idle");
  });

  it("per-hand gesture and completeness follow gesture_shown records", () => {
    const view = replay(loadStream(GODAI));
    expect(view.hands.left.wearer).toBe("ayu");
    expect(view.hands.right.wearer).toBe("bren");
    expect(view.hands.left.lastGesture).toBe("three_finger");
    expect(view.hands.right.lastGesture).toBe("open_palm");
    expect(view.hands.left.completeness).toBe("complete");
    expect(view.hands.right.completeness).toBe("complete");
  });
});
