import { describe, expect, it } from "vitest";

import type { FrameClock } from "../src/reveal.js";
import { RevealPresenter } from "../src/reveal.js";

const FRAME_MS = 1000 / 60;

// Deterministic 60 fps frame source: time only moves when a frame runs.
class FakeFrameClock implements FrameClock {
  t = 0;
  private queue = new Map<number, () => void>();
  private nextId = 1;

  now(): number {
    return this.t;
  }

  requestFrame(cb: () => void): number {
    const id = this.nextId++;
    this.queue.set(id, cb);
    return id;
  }

  cancelFrame(id: number): void {
    this.queue.delete(id);
  }

  step(): boolean {
    this.t += FRAME_MS;
    const pending = [...this.queue.entries()];
    this.queue.clear();
    for (const [, cb] of pending) cb();
    return pending.length > 0;
  }

  run(maxFrames = 1000): number {
    let frames = 0;
    while (frames < maxFrames && this.step()) frames += 1;
    return frames;
  }
}

describe("reveal presenter", () => {
  it("auto-hides within one animation frame of the announced 2 s", () => {
    const clock = new FakeFrameClock();
    const presenter = new RevealPresenter(clock);
    presenter.show(2000);
    clock.run();
    expect(presenter.visible).toBe(false);
    const span = presenter.lastVisibleSpan();
    expect(span).not.toBeNull();
    expect(span!).toBeGreaterThanOrEqual(2000);
    expect(span!).toBeLessThan(2000 + FRAME_MS);
  });

  it("honors whatever duration the stream announces", () => {
    for (const duration of [500, 1000, 3000]) {
      const clock = new FakeFrameClock();
      const presenter = new RevealPresenter(clock);
      presenter.show(duration);
      clock.run();
      const span = presenter.lastVisibleSpan()!;
      expect(span).toBeGreaterThanOrEqual(duration);
      expect(span).toBeLessThan(duration + FRAME_MS);
    }
  });

  it("reports visibility transitions in order", () => {
    const clock = new FakeFrameClock();
    const seen: boolean[] = [];
    const presenter = new RevealPresenter(clock, (visible) => seen.push(visible));
    presenter.show(2000);
    clock.run();
    expect(seen).toEqual([true, false]);
  });

  it("an early stream hide wins over the local deadline", () => {
    const clock = new FakeFrameClock();
    const presenter = new RevealPresenter(clock);
    presenter.show(2000);
    clock.step();
    presenter.hide();
    expect(presenter.visible).toBe(false);
    // No pending frame should flip anything back.
    expect(clock.run()).toBe(0);
  });

  it("re-showing restarts the deadline", () => {
    const clock = new FakeFrameClock();
    const presenter = new RevealPresenter(clock);
    presenter.show(2000);
    for (let i = 0; i < 30; i += 1) clock.step();
    presenter.show(2000);
    clock.run();
    const span = presenter.lastVisibleSpan()!;
    expect(span).toBeGreaterThanOrEqual(2000);
    expect(span).toBeLessThan(2000 + FRAME_MS);
  });
});
