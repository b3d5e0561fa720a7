// Service client: commands over HTTP, records over a WebSocket stream.
//
// Commands are fire-and-confirm (the response echoes the session snapshot);
// rendering never reads those echoes for game state, only the stream.
// On reconnect the stream resumes from the last seen sequence number, so a
// dropped connection replays exactly the missed records.

import type { StreamRecord } from "./records.js";
import { parseRecord } from "./records.js";

export type ApiEvent =
  | { event: "start" }
  | { event: "skip_breathing" }
  | { event: "reveal" }
  | { event: "voice"; command: "stop" | "pause" | "resume" };

async function request(url: string, init?: RequestInit): Promise<any> {
  const res = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await res.text();
  if (!res.ok) {
    let detail = body;
    try {
      detail = JSON.parse(body).detail ?? body;
    } catch {
      // plain-text error body
    }
    throw new Error(`${res.status}: ${detail}`);
  }
  return body ? JSON.parse(body) : null;
}

export class TheaClient {
  baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  createSession(config: Record<string, unknown>): Promise<any> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(config),
    });
  }

  sendEvent(sessionId: string, event: ApiEvent): Promise<any> {
    return request(`${this.baseUrl}/sessions/${sessionId}/events`, {
      method: "POST",
      body: JSON.stringify(event),
    });
  }

  getSession(sessionId: string): Promise<any> {
    return request(`${this.baseUrl}/sessions/${sessionId}`);
  }

  closeSession(sessionId: string): Promise<any> {
    return request(`${this.baseUrl}/sessions/${sessionId}`, { method: "DELETE" });
  }

  getDevices(): Promise<Record<string, any>> {
    return request(`${this.baseUrl}/devices`);
  }

  calibrate(deviceId: string, channels: Record<string, number>): Promise<any> {
    return request(`${this.baseUrl}/devices/${deviceId}/calibrate`, {
      method: "POST",
      body: JSON.stringify({ channels }),
    });
  }

  kill(deviceId: string): Promise<any> {
    return request(`${this.baseUrl}/devices/${deviceId}/kill`, { method: "POST" });
  }

  getStats(player: string): Promise<any> {
    return request(`${this.baseUrl}/stats?player=${encodeURIComponent(player)}`);
  }

  streamUrl(sessionId: string, since: number): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/sessions/${sessionId}/stream?since=${since}`;
  }
}

// Minimal WebSocket surface, injectable so tests can drive the stream.
export interface WsLike {
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  close(): void;
}

export type WsFactory = (url: string) => WsLike;

export interface StreamHandlers {
  onRecord: (record: StreamRecord) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
}

export class StreamConnection {
  lastSeq = 0;
  attempts = 0;
  private client: TheaClient;
  private sessionId: string;
  private handlers: StreamHandlers;
  private factory: WsFactory;
  private ws: WsLike | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(client: TheaClient, sessionId: string, handlers: StreamHandlers,
              factory?: WsFactory) {
    this.client = client;
    this.sessionId = sessionId;
    this.handlers = handlers;
    this.factory = factory ?? ((url) => new WebSocket(url) as unknown as WsLike);
  }

  open(): void {
    if (this.stopped) return;
    this.handlers.onStatus?.("connecting");
    const ws = this.factory(this.client.streamUrl(this.sessionId, this.lastSeq));
    this.ws = ws;
    ws.onopen = () => {
      this.attempts = 0;
      this.handlers.onStatus?.("open");
    };
    ws.onmessage = (ev) => {
      const record = parseRecord(ev.data);
      if (record.seq <= this.lastSeq) return;
      this.lastSeq = record.seq;
      this.handlers.onRecord(record);
    };
    ws.onerror = () => undefined;
    ws.onclose = () => {
      this.ws = null;
      this.handlers.onStatus?.("closed");
      this.scheduleReconnect();
    };
  }

  close(): void {
    this.stopped = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.ws?.close();
    this.ws = null;
  }

  // Exponential backoff, capped at 30 s; resumes from lastSeq so the gap
  // replays in order.
  private scheduleReconnect(): void {
    if (this.stopped) return;
    const delay = Math.min(1000 * 2 ** this.attempts, 30000);
    this.attempts += 1;
    this.timer = setTimeout(() => this.open(), delay);
  }
}
