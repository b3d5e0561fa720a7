// Stream record vocabulary. One session log record per WebSocket message;
// field names mirror the wire JSON exactly (snake_case, sorted-key source).

export type Side = "left" | "right";

export type Gesture =
  | "open_palm"
  | "three_finger"
  | "middle_finger"
  | "wrist_inward"
  | "wrist_outward";

export type GameName = "godai" | "epta" | "idio";
export type GameMode = "bo3" | "bo5" | "free";
export type Completeness = "complete" | "partial" | "none";

export const GESTURES: readonly Gesture[] = [
  "open_palm", "three_finger", "middle_finger", "wrist_inward", "wrist_outward",
];

// Phase labels as emitted by phase_changed: countdown carries its tick
// ("countdown_3"), paused wraps the phase it resumes to ("paused[breathing]").
export type PhaseLabel = string;

export interface HandDealt {
  side: Side;
  gesture: Gesture;
  channel: number | null;
}

export interface HandShown {
  side: Side;
  wearer: string;
  gesture: Gesture;
  meaning: string | number;
}

// Per-game round outcomes, copied verbatim from the service. The companion
// renders these; it never recomputes them.
export interface GodaiRoundDetail {
  outcome: "left_wins" | "right_wins" | "tie";
  scores: Record<Side, number>;
  match_over: boolean;
  winner?: Side;
}

export interface EptaRoundDetail {
  outcome: "ongoing" | "won" | "lost";
  sums: Record<Side, number>;
  decided_by?: Side;
}

export interface IdioRoundDetail {
  complete: boolean;
  struck_now: Gesture[];
  struck_total: Gesture[];
}

export type RoundDetail = GodaiRoundDetail | EptaRoundDetail | IdioRoundDetail;

export interface RoundResult {
  round: number;
  hands: HandShown[];
  detail: RoundDetail;
  summary: string;
}

export type EffectDetail =
  | { effect: "arm_timer"; deadline_id: number; delay_ms: number }
  | { effect: "send_actuate"; side: Side; channel: number; duration_ms: number }
  | { effect: "send_stop_all" }
  | { effect: "show_breathing" }
  | { effect: "show_countdown"; tick: number }
  | { effect: "play_countdown_sound"; tick: number }
  | { effect: "play_first_pitch" }
  | { effect: "play_second_pitch"; gesture: Gesture }
  | { effect: "show_result"; duration_ms: number; result: RoundResult }
  | { effect: "hide_result" }
  | { effect: "notify_usage_limit"; device: string }
  | { effect: "frame_received"; device: string; kind: string };

export type RecordDetail =
  | { kind: "session_started"; detail: { nicknames: string[]; game: GameName; mode: GameMode; assignment: string } }
  | { kind: "phase_changed"; detail: { from: PhaseLabel; to: PhaseLabel } }
  | { kind: "round_started"; detail: { round: number; hands: HandDealt[] } }
  | { kind: "gesture_shown"; detail: { side: Side; wearer: string; gesture: Gesture; completeness: Completeness } }
  | { kind: "round_resolved"; detail: RoundResult }
  | { kind: "reveal_used"; detail: { round: number } }
  | { kind: "paused"; detail: { resume_to: PhaseLabel } }
  | { kind: "resumed"; detail: Record<string, never> }
  | { kind: "kill_switch"; detail: { side: Side } }
  | { kind: "usage_limit"; detail: { device: string } }
  | { kind: "intensity_set"; detail: { side: Side; level: number } }
  | { kind: "invalid_event"; detail: { phase: PhaseLabel; event: string } }
  | { kind: "game_completed"; detail: GameCompletedDetail }
  | { kind: "session_ended"; detail: { duration_ms: number; reason: string } }
  | { kind: "effect"; detail: EffectDetail };

export type GameCompletedDetail =
  | { game: "godai"; rounds: number; scores: Record<Side, number>; winner: Side }
  | { game: "epta"; turns: number; sums: Record<Side, number>; outcome: "won" | "lost"; decided_by: Side }
  | { game: "idio"; rounds: number; struck: Gesture[]; complete: boolean };

export type StreamRecord = RecordDetail & {
  seq: number;
  t_ms: number;
  session_id: string;
};

export function parseRecord(raw: string): StreamRecord {
  return JSON.parse(raw) as StreamRecord;
}
