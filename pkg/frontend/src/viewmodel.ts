// Pure projection of the session event stream into a renderable view.
//
// Invariant: every field below is copied from received stream records or
// from local command echoes (sound mode, connection status, device
// snapshots). No game rule runs here; scores, sums and struck gestures
// arrive precomputed from the service and are stored verbatim.

import type {
  Completeness,
  GameMode,
  GameName,
  Gesture,
  PhaseLabel,
  RoundResult,
  Side,
  StreamRecord,
} from "./records.js";

export type SoundMode = "two_pitch" | "first_pitch_only" | "off";
export type ConnectionStatus = "connecting" | "open" | "closed";

export interface HandView {
  wearer: string | null;
  dealtGesture: Gesture | null;
  dealtChannel: number | null;
  lastGesture: Gesture | null;
  completeness: Completeness | null;
  intensity: number | null;
  killed: boolean;
  usageNoticed: boolean;
}

export interface ScoreboardView {
  game: GameName | null;
  mode: GameMode | null;
  godaiScores: Record<Side, number> | null;
  eptaSums: Record<Side, number> | null;
  struck: Gesture[];
  finished: boolean;
  winner: Side | null;
  outcome: string | null;
  decidedBy: Side | null;
}

export interface RevealView {
  visible: boolean;
  shownAtMs: number | null;
  durationMs: number | null;
  result: RoundResult | null;
  usedInRound: number | null;
}

export interface DeviceSnapshot {
  calibratedChannels: number[];
  fidelity: Record<string, number>;
  killSwitchOn: boolean;
  intensity: number | null;
}

export interface ViewState {
  sessionId: string | null;
  nicknames: string[];
  assignment: string | null;
  phase: PhaseLabel;
  countdownTick: number | null;
  breathingShown: boolean;
  round: number | null;
  hands: Record<Side, HandView>;
  scoreboard: ScoreboardView;
  reveal: RevealView;
  usageBanner: string[];
  paused: boolean;
  resumeTo: PhaseLabel | null;
  lastRejected: { phase: PhaseLabel; event: string } | null;
  rejectedCount: number;
  ended: { reason: string; durationMs: number } | null;
  soundMode: SoundMode;
  connection: ConnectionStatus;
  devices: Record<string, DeviceSnapshot>;
  lastSeq: number;
  lastTms: number;
}

function emptyHand(): HandView {
  return {
    wearer: null,
    dealtGesture: null,
    dealtChannel: null,
    lastGesture: null,
    completeness: null,
    intensity: null,
    killed: false,
    usageNoticed: false,
  };
}

export function initialView(): ViewState {
  return {
    sessionId: null,
    nicknames: [],
    assignment: null,
    phase: "idle",
    countdownTick: null,
    breathingShown: false,
    round: null,
    hands: { left: emptyHand(), right: emptyHand() },
    scoreboard: {
      game: null,
      mode: null,
      godaiScores: null,
      eptaSums: null,
      struck: [],
      finished: false,
      winner: null,
      outcome: null,
      decidedBy: null,
    },
    reveal: {
      visible: false,
      shownAtMs: null,
      durationMs: null,
      result: null,
      usedInRound: null,
    },
    usageBanner: [],
    paused: false,
    resumeTo: null,
    lastRejected: null,
    rejectedCount: 0,
    ended: null,
    soundMode: "two_pitch",
    connection: "connecting",
    devices: {},
    lastSeq: 0,
    lastTms: 0,
  };
}

function cloneHands(hands: ViewState["hands"]): ViewState["hands"] {
  return { left: { ...hands.left }, right: { ...hands.right } };
}

// The round outcome carries the per-game tallies; store whichever shape
// arrived and leave the others untouched.
function foldOutcome(board: ScoreboardView, detail: RoundResult["detail"]): ScoreboardView {
  const next = { ...board, struck: board.struck.slice() };
  if ("scores" in detail) {
    next.godaiScores = { ...detail.scores };
    if (detail.match_over) {
      next.finished = true;
      if (detail.winner) next.winner = detail.winner;
    }
  } else if ("sums" in detail) {
    next.eptaSums = { ...detail.sums };
    if (detail.outcome !== "ongoing") {
      next.finished = true;
      next.outcome = detail.outcome;
      next.decidedBy = detail.decided_by ?? null;
    }
  } else if ("struck_total" in detail) {
    next.struck = detail.struck_total.slice();
    if (detail.complete) next.finished = true;
  }
  return next;
}

export function applyRecord(view: ViewState, record: StreamRecord): ViewState {
  const next: ViewState = {
    ...view,
    hands: cloneHands(view.hands),
    scoreboard: { ...view.scoreboard, struck: view.scoreboard.struck.slice() },
    reveal: { ...view.reveal },
    usageBanner: view.usageBanner.slice(),
    lastSeq: record.seq,
    lastTms: record.t_ms,
  };

  switch (record.kind) {
    case "session_started": {
      next.sessionId = record.session_id;
      next.nicknames = record.detail.nicknames.slice();
      next.assignment = record.detail.assignment;
      next.scoreboard.game = record.detail.game;
      next.scoreboard.mode = record.detail.mode;
      break;
    }
    case "phase_changed": {
      next.phase = record.detail.to;
      if (!record.detail.to.startsWith("countdown_")) next.countdownTick = null;
      break;
    }
    case "round_started": {
      next.round = record.detail.round;
      next.hands.left.dealtGesture = null;
      next.hands.left.dealtChannel = null;
      next.hands.right.dealtGesture = null;
      next.hands.right.dealtChannel = null;
      for (const hand of record.detail.hands) {
        next.hands[hand.side].dealtGesture = hand.gesture;
        next.hands[hand.side].dealtChannel = hand.channel;
      }
      break;
    }
    case "gesture_shown": {
      const hand = next.hands[record.detail.side];
      hand.wearer = record.detail.wearer;
      hand.lastGesture = record.detail.gesture;
      hand.completeness = record.detail.completeness;
      break;
    }
    case "round_resolved": {
      next.scoreboard = foldOutcome(next.scoreboard, record.detail.detail);
      for (const hand of record.detail.hands) {
        next.hands[hand.side].wearer = hand.wearer;
        next.hands[hand.side].lastGesture = hand.gesture;
      }
      break;
    }
    case "reveal_used": {
      next.reveal.usedInRound = record.detail.round;
      break;
    }
    case "paused": {
      next.paused = true;
      next.resumeTo = record.detail.resume_to;
      break;
    }
    case "resumed": {
      next.paused = false;
      next.resumeTo = null;
      break;
    }
    case "kill_switch": {
      next.hands[record.detail.side].killed = true;
      break;
    }
    case "usage_limit": {
      if (!next.usageBanner.includes(record.detail.device)) {
        next.usageBanner.push(record.detail.device);
      }
      const side = record.detail.device as Side;
      if (next.hands[side]) next.hands[side].usageNoticed = true;
      break;
    }
    case "intensity_set": {
      next.hands[record.detail.side].intensity = record.detail.level;
      break;
    }
    case "invalid_event": {
      next.lastRejected = { ...record.detail };
      next.rejectedCount = view.rejectedCount + 1;
      break;
    }
    case "game_completed": {
      next.scoreboard.finished = true;
      const detail = record.detail;
      if (detail.game === "godai") {
        next.scoreboard.godaiScores = { ...detail.scores };
        next.scoreboard.winner = detail.winner;
      } else if (detail.game === "epta") {
        next.scoreboard.eptaSums = { ...detail.sums };
        next.scoreboard.outcome = detail.outcome;
        next.scoreboard.decidedBy = detail.decided_by;
      } else {
        next.scoreboard.struck = detail.struck.slice();
      }
      break;
    }
    case "session_ended": {
      next.ended = { reason: record.detail.reason, durationMs: record.detail.duration_ms };
      break;
    }
    case "effect": {
      const eff = record.detail;
      if (eff.effect === "show_breathing") {
        next.breathingShown = true;
      } else if (eff.effect === "show_countdown") {
        next.countdownTick = eff.tick;
      } else if (eff.effect === "show_result") {
        next.reveal.visible = true;
        next.reveal.shownAtMs = record.t_ms;
        next.reveal.durationMs = eff.duration_ms;
        next.reveal.result = eff.result;
      } else if (eff.effect === "hide_result") {
        next.reveal.visible = false;
      } else if (eff.effect === "notify_usage_limit") {
        if (!next.usageBanner.includes(eff.device)) next.usageBanner.push(eff.device);
      }
      break;
    }
    default:
      break;
  }
  return next;
}

export function replay(records: Iterable<StreamRecord>, from?: ViewState): ViewState {
  let view = from ?? initialView();
  for (const record of records) view = applyRecord(view, record);
  return view;
}

// -- local command echoes ---------------------------------------------------

export function setSoundMode(view: ViewState, mode: SoundMode): ViewState {
  return { ...view, soundMode: mode };
}

export function setConnection(view: ViewState, status: ConnectionStatus): ViewState {
  return { ...view, connection: status };
}

export function setDevices(view: ViewState, raw: Record<string, any>): ViewState {
  const devices: Record<string, DeviceSnapshot> = {};
  for (const [id, status] of Object.entries(raw)) {
    devices[id] = {
      calibratedChannels: (status.calibrated_channels ?? []).slice(),
      fidelity: { ...(status.fidelity ?? {}) },
      killSwitchOn: !!status.kill_switch_on,
      intensity: status.intensity ?? null,
    };
  }
  return { ...view, devices };
}
