"""HTTP command API and WebSocket event stream.

Commands travel over plain HTTP; session records stream one way over a
WebSocket.  The two never mix: a UI issues commands on the command API
and renders purely from the stream, which can be replayed from any
sequence number after a reconnect (`?since=SEQ`).
"""

from __future__ import annotations

import asyncio
import queue

from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect

from thea.errors import (
    DeviceInUse,
    DevicesNotCalibrated,
    InvalidConfig,
    KillSwitchEngaged,
    ServiceError,
    TheaError,
    UnknownDevice,
    UnknownSession,
)
from thea.service import SessionService
from thea.sessions import SessionConfig

_STATUS: tuple[tuple[type, int], ...] = (
    (UnknownSession, 404),
    (UnknownDevice, 404),
    (DeviceInUse, 409),
    (DevicesNotCalibrated, 409),
    (KillSwitchEngaged, 409),
    (InvalidConfig, 400),
)


def _http_error(exc: TheaError) -> HTTPException:
    for etype, code in _STATUS:
        if isinstance(exc, etype):
            return HTTPException(status_code=code, detail=str(exc))
    return HTTPException(status_code=400, detail=str(exc))


def create_app(service: SessionService) -> FastAPI:
    app = FastAPI(title="thea", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(TheaError)
    async def _on_thea_error(request, exc: TheaError):  # pragma: no cover
        raise _http_error(exc)

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        try:
            cfg = SessionConfig.from_dict(body)
            return service.create_session(cfg)
        except TheaError as exc:
            raise _http_error(exc)

    @app.post("/sessions/{session_id}/events")
    def dispatch(session_id: str, body: dict):
        try:
            return service.dispatch(session_id, body)
        except TheaError as exc:
            raise _http_error(exc)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return service.snapshot(session_id)
        except TheaError as exc:
            raise _http_error(exc)

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str):
        try:
            return service.close_session(session_id)
        except TheaError as exc:
            raise _http_error(exc)

    @app.get("/stats")
    def stats(player: str = Query(...)):
        return service.stats(player)

    @app.get("/devices")
    def devices():
        return {did: service.device_status(did) for did in sorted(service.devices)}

    @app.post("/devices/{device_id}/calibrate")
    def calibrate(device_id: str, body: dict):
        try:
            if "channels" in body:  # whole-hand calibration in one call
                status = None
                for ch, fid in body["channels"].items():
                    status = service.calibrate(device_id, int(ch), float(fid))
                return status
            return service.calibrate(device_id, int(body["channel"]),
                                     float(body["fidelity"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"bad calibration body: {exc}")
        except TheaError as exc:
            raise _http_error(exc)

    @app.post("/devices/{device_id}/kill")
    def kill(device_id: str):
        try:
            return service.kill(device_id)
        except TheaError as exc:
            raise _http_error(exc)

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(ws: WebSocket, session_id: str,
                     since: int = Query(default=0)):
        await ws.accept()
        try:
            live = service._session(session_id)
        except ServiceError:
            await ws.close(code=4404)
            return
        feed: "queue.Queue[dict]" = queue.Queue()
        live.subscribe(feed.put)
        try:
            # Replay history past `since`, then hand over to the live feed;
            # records queued during the replay are filtered by seq below.
            last = since
            for record in service.records_since(session_id, since):
                await ws.send_json(record)
                last = record["seq"]
            while True:
                record = await asyncio.to_thread(_next_record, feed)
                if record is None:
                    if ws.client_state.name != "CONNECTED":
                        break
                    continue
                if record["seq"] <= last:
                    continue
                await ws.send_json(record)
                last = record["seq"]
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            live.unsubscribe(feed.put)

    return app


def _next_record(feed: "queue.Queue[dict]"):
    try:
        return feed.get(timeout=0.25)
    except queue.Empty:
        return None
