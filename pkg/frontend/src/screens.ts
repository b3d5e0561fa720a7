// Screen rendering. The view state decides everything; these functions
// only translate it to DOM. Routing follows the session phase:
// calibration (idle), breathing, countdown, in-game, results.

import type { Gesture, PhaseLabel, Side } from "./records.js";
import { GESTURES } from "./records.js";
import type { HandView, ViewState } from "./viewmodel.js";

export type Screen =
  | "calibration"
  | "breathing"
  | "countdown"
  | "in_game"
  | "results"
  | "safe_off";

const IN_GAME: readonly PhaseLabel[] = [
  "await_round", "first_pitch", "actuating", "interpret_window", "revealed",
];

export function screenFor(phase: PhaseLabel): Screen {
  const inner = phase.startsWith("paused[")
    ? phase.slice("paused[".length, -1)
    : phase;
  if (inner === "idle") return "calibration";
  if (inner === "breathing") return "breathing";
  if (inner.startsWith("countdown_")) return "countdown";
  if (inner === "completed") return "results";
  if (inner === "safe_off") return "safe_off";
  if (IN_GAME.includes(inner)) return "in_game";
  return "calibration";
}

// Electrode diagram colours, one per gesture; open palm needs no channel
// and renders in the resting colour.
export const GESTURE_COLORS: Record<Gesture, string> = {
  open_palm: "#3b82d6",
  three_finger: "#d6483b",
  middle_finger: "#3bd65f",
  wrist_inward: "#a06a3b",
  wrist_outward: "#9aa4ad",
};

export const GESTURE_LABELS: Record<Gesture, string> = {
  open_palm: "Open palm",
  three_finger: "Three fingers",
  middle_finger: "Middle finger",
  wrist_inward: "Wrist inward",
  wrist_outward: "Wrist outward",
};

function el(tag: string, cls: string, text = ""): HTMLElement {
  const node = document.createElement(tag);
  node.className = cls;
  if (text) node.textContent = text;
  return node;
}

function renderBanners(view: ViewState, root: HTMLElement): void {
  if (view.connection !== "open") {
    root.appendChild(el("div", "banner banner-disconnect",
      view.connection === "connecting"
        ? "Reconnecting to the session stream..."
        : "Stream disconnected."));
  }
  for (const device of view.usageBanner) {
    root.appendChild(el("div", "banner banner-usage",
      `The ${device} hand has been under stimulation for 30 minutes. ` +
      "Consider taking a break."));
  }
  for (const side of ["left", "right"] as Side[]) {
    if (view.hands[side].killed) {
      root.appendChild(el("div", "banner banner-kill",
        `Kill switch thrown on the ${side} hand.`));
    }
  }
  if (view.paused) {
    root.appendChild(el("div", "banner banner-paused",
      `Paused. Resumes to ${view.resumeTo ?? "?"}.`));
  }
}

function renderCalibration(view: ViewState, root: HTMLElement): void {
  root.appendChild(el("h2", "screen-title", "Electrode calibration"));
  const diagram = el("div", "electrode-diagram");
  for (const gesture of GESTURES) {
    const pad = el("div", "electrode-pad", GESTURE_LABELS[gesture]);
    pad.style.borderColor = GESTURE_COLORS[gesture];
    diagram.appendChild(pad);
  }
  root.appendChild(diagram);
  for (const [id, device] of Object.entries(view.devices)) {
    const row = el("div", "device-row");
    row.appendChild(el("span", "device-name", id));
    row.appendChild(el("span", "device-channels",
      `calibrated channels: ${device.calibratedChannels.join(", ") || "none"}`));
    if (device.killSwitchOn) row.appendChild(el("span", "device-kill", "KILL ON"));
    root.appendChild(row);
  }
}

function renderBreathing(view: ViewState, root: HTMLElement): void {
  const flower = el("div", "breathing-flower");
  flower.classList.add(view.breathingShown ? "breathing-live" : "breathing-idle");
  root.appendChild(flower);
  root.appendChild(el("p", "breathing-hint", "Breathe with the circle."));
}

function renderCountdown(view: ViewState, root: HTMLElement): void {
  const tick = view.countdownTick ?? Number(view.phase.split("_")[1] ?? "");
  root.appendChild(el("div", "countdown-number", String(tick)));
}

function handPanel(side: Side, hand: HandView, view: ViewState): HTMLElement {
  const panel = el("div", `hand-panel hand-${side}`);
  panel.appendChild(el("h3", "hand-wearer", hand.wearer ?? side));
  const gesture = hand.lastGesture;
  const face = el("div", "hand-gesture", gesture ? GESTURE_LABELS[gesture] : "-");
  if (gesture) face.style.color = GESTURE_COLORS[gesture];
  // Results hide behind the reveal button until the service says otherwise.
  if (!view.reveal.visible && !view.scoreboard.finished) {
    face.classList.add("gesture-hidden");
    face.textContent = "? ? ?";
  }
  panel.appendChild(face);
  if (hand.completeness && hand.completeness !== "complete") {
    panel.appendChild(el("span", "hand-completeness", `(${hand.completeness})`));
  }
  if (hand.intensity !== null) {
    panel.appendChild(el("span", "hand-intensity", `intensity ${hand.intensity}`));
  }
  return panel;
}

function renderScoreboard(view: ViewState, root: HTMLElement): void {
  const board = view.scoreboard;
  const box = el("div", "scoreboard");
  if (board.godaiScores) {
    box.appendChild(el("span", "score",
      `left ${board.godaiScores.left} : ${board.godaiScores.right} right`));
  }
  if (board.eptaSums) {
    box.appendChild(el("span", "score",
      `sums left ${board.eptaSums.left} / right ${board.eptaSums.right}`));
  }
  if (board.game === "idio") {
    const strip = el("div", "struck-strip");
    for (const gesture of GESTURES) {
      const chip = el("span", "struck-chip", GESTURE_LABELS[gesture]);
      chip.style.borderColor = GESTURE_COLORS[gesture];
      // A struck gesture stays greyed out for the rest of the game.
      if (board.struck.includes(gesture)) chip.classList.add("struck");
      strip.appendChild(chip);
    }
    box.appendChild(strip);
  }
  root.appendChild(box);
}

function renderInGame(view: ViewState, root: HTMLElement): void {
  root.appendChild(el("h2", "screen-title",
    `${view.scoreboard.game ?? "?"} round ${view.round ?? "-"}`));
  const panels = el("div", "hand-panels");
  panels.appendChild(handPanel("left", view.hands.left, view));
  panels.appendChild(handPanel("right", view.hands.right, view));
  root.appendChild(panels);
  renderScoreboard(view, root);
  if (view.reveal.visible && view.reveal.result) {
    root.appendChild(el("div", "reveal-result", view.reveal.result.summary));
  }
}

function renderResults(view: ViewState, root: HTMLElement): void {
  root.appendChild(el("h2", "screen-title", "Session complete"));
  renderScoreboard(view, root);
  const board = view.scoreboard;
  if (board.winner) {
    root.appendChild(el("p", "final-line", `${board.winner} hand takes the match.`));
  } else if (board.outcome) {
    root.appendChild(el("p", "final-line",
      `${board.decidedBy ?? "?"} hand ${board.outcome} the game.`));
  } else if (board.game === "idio" && board.finished) {
    root.appendChild(el("p", "final-line", "All five gestures struck."));
  }
  if (view.ended) {
    root.appendChild(el("p", "final-detail",
      `Ended (${view.ended.reason}) after ${view.ended.durationMs} ms.`));
  }
}

function renderSafeOff(view: ViewState, root: HTMLElement): void {
  root.appendChild(el("h2", "screen-title screen-safe-off", "Safe off"));
  root.appendChild(el("p", "final-line",
    "A kill switch ended stimulation. Recalibrate to start again."));
}

export function render(view: ViewState, root: HTMLElement): void {
  root.textContent = "";
  renderBanners(view, root);
  const body = el("div", "screen-body");
  switch (screenFor(view.phase)) {
    case "calibration":
      renderCalibration(view, body);
      break;
    case "breathing":
      renderBreathing(view, body);
      break;
    case "countdown":
      renderCountdown(view, body);
      break;
    case "in_game":
      renderInGame(view, body);
      break;
    case "results":
      renderResults(view, body);
      break;
    case "safe_off":
      renderSafeOff(view, body);
      break;
  }
  root.appendChild(body);
}
