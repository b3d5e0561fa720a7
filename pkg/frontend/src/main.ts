// Companion app wiring: one client, one stream subscription, one view.
//
// Everything rendered comes from the view state; the stream mutates it
// through applyRecord and commands echo back only connection-level facts.
// Game outcomes are never computed here.

import { createAudioSink, ToneScheduler } from "./audio.js";
import { StreamConnection, TheaClient } from "./client.js";
import type { ApiEvent } from "./client.js";
import { browserFrameClock, RevealPresenter } from "./reveal.js";
import { render } from "./screens.js";
import type { SoundMode, ViewState } from "./viewmodel.js";
import {
  applyRecord,
  initialView,
  setConnection,
  setDevices,
  setSoundMode,
} from "./viewmodel.js";

interface AppElements {
  screen: HTMLElement;
  controls: HTMLElement;
  status: HTMLElement;
}

class CompanionApp {
  private client: TheaClient;
  private view: ViewState = initialView();
  private stream: StreamConnection | null = null;
  private tones: ToneScheduler;
  private reveal: RevealPresenter;
  private els: AppElements;

  constructor(baseUrl: string, els: AppElements) {
    this.client = new TheaClient(baseUrl);
    this.els = els;
    this.tones = new ToneScheduler(createAudioSink(), this.view.soundMode);
    this.reveal = new RevealPresenter(browserFrameClock(), (visible) => {
      if (!visible && this.view.reveal.visible) {
        this.view = { ...this.view, reveal: { ...this.view.reveal, visible: false } };
        this.paint();
      }
    });
  }

  async boot(): Promise<void> {
    this.buildControls();
    await this.refreshDevices();
    this.paint();
  }

  private paint(): void {
    render(this.view, this.els.screen);
    this.els.status.textContent =
      `phase ${this.view.phase} | seq ${this.view.lastSeq} | ${this.view.connection}`;
  }

  private async refreshDevices(): Promise<void> {
    try {
      this.view = setDevices(this.view, await this.client.getDevices());
    } catch (err) {
      this.els.status.textContent = `device query failed: ${err}`;
    }
  }

  private async startSession(form: HTMLFormElement): Promise<void> {
    const data = new FormData(form);
    const nicknames = String(data.get("nicknames") ?? "")
      .split(",").map((s) => s.trim()).filter(Boolean);
    const config = {
      nicknames,
      game: String(data.get("game")),
      mode: String(data.get("mode")),
      sound: String(data.get("sound")),
      seed: Number(data.get("seed") ?? 0),
      assignment: nicknames.length === 2 ? "shared_one_hand_each" : "solo_two_hands",
    };
    const snap = await this.client.createSession(config);
    this.subscribe(snap.session_id);
  }

  private subscribe(sessionId: string): void {
    this.stream?.close();
    this.view = initialView();
    this.view = setSoundMode(this.view, this.tones.mode);
    this.stream = new StreamConnection(this.client, sessionId, {
      onRecord: (record) => {
        this.view = applyRecord(this.view, record);
        this.tones.onRecord(record);
        if (record.kind === "effect" && record.detail.effect === "show_result") {
          this.reveal.show(record.detail.duration_ms);
        }
        if (record.kind === "effect" && record.detail.effect === "hide_result") {
          this.reveal.hide();
        }
        this.paint();
      },
      onStatus: (status) => {
        this.view = setConnection(this.view, status);
        this.paint();
      },
    });
    this.stream.open();
  }

  private send(event: ApiEvent): void {
    const id = this.view.sessionId;
    if (!id) return;
    this.client.sendEvent(id, event).catch((err) => {
      this.els.status.textContent = `command refused: ${err}`;
    });
  }

  private buildControls(): void {
    const c = this.els.controls;
    c.innerHTML = `
      <form id="session-form" class="session-form">
        <input name="nicknames" placeholder="nicknames (comma separated)" value="ayu, bren">
        <select name="game">
          <option value="godai">godai</option>
          <option value="epta">epta</option>
          <option value="idio">idio</option>
        </select>
        <select name="mode">
          <option value="bo3">best of 3</option>
          <option value="bo5">best of 5</option>
          <option value="free">free play</option>
        </select>
        <select name="sound">
          <option value="two_pitch">two pitch</option>
          <option value="first_pitch_only">first pitch only</option>
          <option value="off">off</option>
        </select>
        <input name="seed" type="number" value="42">
        <button type="submit">new session</button>
      </form>
      <div class="command-row">
        <button data-ev="start">start</button>
        <button data-ev="skip_breathing">skip</button>
        <button data-ev="reveal">reveal</button>
        <button data-voice="pause">pause</button>
        <button data-voice="resume">resume</button>
        <button data-voice="stop">stop</button>
        <button data-kill="left">kill left</button>
        <button data-kill="right">kill right</button>
      </div>
      <div class="command-row">
        <label>companion sound
          <select id="sound-mode">
            <option value="two_pitch">two pitch</option>
            <option value="first_pitch_only">first pitch only</option>
            <option value="off">off</option>
          </select>
        </label>
        <button id="calibrate-all">calibrate both hands</button>
      </div>`;

    const form = c.querySelector<HTMLFormElement>("#session-form")!;
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.startSession(form).catch((err) => {
        this.els.status.textContent = `session refused: ${err}`;
      });
    });
    for (const btn of c.querySelectorAll<HTMLButtonElement>("[data-ev]")) {
      btn.addEventListener("click", () =>
        this.send({ event: btn.dataset.ev } as ApiEvent));
    }
    for (const btn of c.querySelectorAll<HTMLButtonElement>("[data-voice]")) {
      btn.addEventListener("click", () =>
        this.send({ event: "voice", command: btn.dataset.voice as "stop" | "pause" | "resume" }));
    }
    for (const btn of c.querySelectorAll<HTMLButtonElement>("[data-kill]")) {
      btn.addEventListener("click", () => {
        this.client.kill(btn.dataset.kill!).then(() => this.refreshDevices());
      });
    }
    c.querySelector<HTMLSelectElement>("#sound-mode")!
      .addEventListener("change", (ev) => {
        const mode = (ev.target as HTMLSelectElement).value as SoundMode;
        this.tones.setMode(mode);
        this.view = setSoundMode(this.view, mode);
        this.paint();
      });
    c.querySelector<HTMLButtonElement>("#calibrate-all")!
      .addEventListener("click", async () => {
        const channels = { "1": 0.9, "2": 0.9, "3": 0.9, "4": 0.9 };
        await this.client.calibrate("left", channels);
        await this.client.calibrate("right", channels);
        await this.refreshDevices();
        this.paint();
      });
  }
}

function boot(): void {
  const els: AppElements = {
    screen: document.getElementById("screen")!,
    controls: document.getElementById("controls")!,
    status: document.getElementById("status")!,
  };
  const app = new CompanionApp(window.location.origin, els);
  app.boot();
}

if (typeof document !== "undefined" && document.getElementById("screen")) {
  boot();
}
