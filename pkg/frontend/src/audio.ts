// Tone synthesis for session audio cues.
//
// The stream already reflects the session's server-side sound mode (an
// "off" session emits no pitch effects at all); the local selector is a
// second filter so a spectator can mute or thin out audio without
// touching the session. Off schedules nothing, ever.

import type { Gesture, StreamRecord } from "./records.js";
import { GESTURES } from "./records.js";
import type { SoundMode } from "./viewmodel.js";

export type ToneKind = "first_pitch" | "second_pitch" | "countdown";

export interface Tone {
  kind: ToneKind;
  frequencyHz: number;
  durationMs: number;
  gesture?: Gesture;
  tick?: number;
}

export interface ToneSink {
  play(tone: Tone): void;
}

// One fixed warning pitch, then a gesture-specific pitch as the hand moves.
// The five second pitches are the notes of an A minor pentatonic scale:
// maximally distinct to the ear while staying consonant back to back.
export const FIRST_PITCH_HZ = 329.63;
export const COUNTDOWN_HZ = 880.0;

export const SECOND_PITCH_HZ: Record<Gesture, number> = {
  open_palm: 440.0,
  three_finger: 523.25,
  middle_finger: 587.33,
  wrist_inward: 659.25,
  wrist_outward: 783.99,
};

export class ToneScheduler {
  mode: SoundMode;
  private sink: ToneSink;

  constructor(sink: ToneSink, mode: SoundMode = "two_pitch") {
    this.sink = sink;
    this.mode = mode;
  }

  setMode(mode: SoundMode): void {
    this.mode = mode;
  }

  onRecord(record: StreamRecord): void {
    if (this.mode === "off") return;
    if (record.kind !== "effect") return;
    const eff = record.detail;
    if (eff.effect === "play_countdown_sound") {
      this.sink.play({ kind: "countdown", frequencyHz: COUNTDOWN_HZ, durationMs: 150, tick: eff.tick });
    } else if (eff.effect === "play_first_pitch") {
      this.sink.play({ kind: "first_pitch", frequencyHz: FIRST_PITCH_HZ, durationMs: 300 });
    } else if (eff.effect === "play_second_pitch" && this.mode === "two_pitch") {
      this.sink.play({
        kind: "second_pitch",
        frequencyHz: SECOND_PITCH_HZ[eff.gesture],
        durationMs: 500,
        gesture: eff.gesture,
      });
    }
  }
}

declare global {
  interface Window {
    webkitAudioContext: typeof AudioContext;
  }
}

class WebAudioSink implements ToneSink {
  private ctx: AudioContext;

  constructor(ctx: AudioContext) {
    this.ctx = ctx;
  }

  play(tone: Tone): void {
    const now = this.ctx.currentTime;
    const osc = this.ctx.createOscillator();
    const gain = this.ctx.createGain();
    osc.type = "sine";
    osc.frequency.value = tone.frequencyHz;
    gain.gain.setValueAtTime(0.25, now);
    gain.gain.exponentialRampToValueAtTime(0.001, now + tone.durationMs / 1000);
    osc.connect(gain);
    gain.connect(this.ctx.destination);
    osc.start(now);
    osc.stop(now + tone.durationMs / 1000);
  }
}

const SILENT_SINK: ToneSink = { play: () => undefined };

// Silent fallback: a missing or failing AudioContext must never take the
// companion down with it.
export function createAudioSink(): ToneSink {
  try {
    const Ctx = window.AudioContext ?? window.webkitAudioContext;
    if (!Ctx) return SILENT_SINK;
    return new WebAudioSink(new Ctx());
  } catch {
    return SILENT_SINK;
  }
}

export function distinctSecondPitches(): number[] {
  return GESTURES.map((g) => SECOND_PITCH_HZ[g]);
}
