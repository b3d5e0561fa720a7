// Reveal visibility timing.
//
// A result stays on screen for exactly the duration announced in the
// show_result effect, then hides itself. The hide lands on the first
// animation frame at or past the deadline, so measured visibility is
// within one frame of the announced duration.

export interface FrameClock {
  now(): number;
  requestFrame(cb: () => void): number;
  cancelFrame(id: number): void;
}

export function browserFrameClock(): FrameClock {
  return {
    now: () => performance.now(),
    requestFrame: (cb) => requestAnimationFrame(() => cb()),
    cancelFrame: (id) => cancelAnimationFrame(id),
  };
}

export class RevealPresenter {
  visible = false;
  shownAt: number | null = null;
  hiddenAt: number | null = null;
  private clock: FrameClock;
  private frameId: number | null = null;
  private onChange: (visible: boolean) => void;

  constructor(clock: FrameClock, onChange: (visible: boolean) => void = () => undefined) {
    this.clock = clock;
    this.onChange = onChange;
  }

  show(durationMs: number): void {
    this.cancel();
    this.visible = true;
    this.shownAt = this.clock.now();
    this.hiddenAt = null;
    this.onChange(true);
    const deadline = this.shownAt + durationMs;
    const tick = () => {
      if (this.clock.now() >= deadline) {
        this.frameId = null;
        this.hide();
      } else {
        this.frameId = this.clock.requestFrame(tick);
      }
    };
    this.frameId = this.clock.requestFrame(tick);
  }

  hide(): void {
    this.cancel();
    if (!this.visible) return;
    this.visible = false;
    this.hiddenAt = this.clock.now();
    this.onChange(false);
  }

  // Visible span of the last completed reveal, in ms.
  lastVisibleSpan(): number | null {
    if (this.shownAt === null || this.hiddenAt === null) return null;
    return this.hiddenAt - this.shownAt;
  }

  private cancel(): void {
    if (this.frameId !== null) {
      this.clock.cancelFrame(this.frameId);
      this.frameId = null;
    }
  }
}
