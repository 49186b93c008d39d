"""HTTP front door: one simulation instance behind a small JSON API.

All state changes funnel through a single lock (single-writer), so two
concurrent key posts can never interleave half-decoded state. Interactive
pacing runs on a background thread that advances the virtual clock to track
wall time; script runs execute at full virtual speed inside the request.

Endpoints (see README for bodies):
  GET  /api/state          POST /api/key           POST /api/port/write
  POST /api/script         GET  /api/trace         GET/PUT /api/config
  POST /api/reset          GET  /api/stream        GET  /api/trajectory
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
import threading
import time
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel, Field

from .command_codec import ScriptError, UnknownKeyError, parse_script
from .lpt_port import AddressDecodeError, EppMode, EppStallError, PortError
from .session import DriveSession, SessionConfig, SessionEndedError


@dataclasses.dataclass
class PaceConfig:
    """How fast virtual time runs relative to the wall clock."""

    mode: str = "realtime"  # "realtime" or "max"
    factor: float = 1.0  # sim seconds per wall second, realtime mode
    snapshot_rate_hz: float = 20.0

    def validate(self) -> None:
        if self.mode not in ("realtime", "max"):
            raise ValueError(f"pace mode must be realtime or max, got {self.mode!r}")
        if not self.factor > 0:
            raise ValueError("pace factor must be positive")
        if not self.snapshot_rate_hz > 0:
            raise ValueError("snapshot rate must be positive")


class Runner:
    """Owns the session, the lock, and the wall-clock pacing thread."""

    def __init__(
        self,
        session_config: Optional[SessionConfig] = None,
        pace: Optional[PaceConfig] = None,
        run_dir: Optional[str] = None,
    ):
        self.lock = threading.Lock()
        self.session_config = session_config or SessionConfig()
        self.pace = pace or PaceConfig()
        self.pace.validate()
        self.run_dir = run_dir
        self.session = DriveSession(self.session_config)
        self.run_count = 0
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._anchor_wall = time.monotonic()
        self._anchor_sim = 0

    # --- pacing -------------------------------------------------------------

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._rebase()
        self._thread = threading.Thread(
            target=self._pace_loop, name="lptvehicle-pacer", daemon=True
        )
        self._thread.start()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=2.0)
        self._thread = None

    def _rebase(self) -> None:
        self._anchor_wall = time.monotonic()
        self._anchor_sim = self.session.sim.now()

    def _pace_loop(self) -> None:
        while not self._stop.wait(0.01):
            if self.pace.mode != "realtime":
                continue
            with self.lock:
                if self.session.ended:
                    continue
                wall = time.monotonic() - self._anchor_wall
                target = self._anchor_sim + int(wall * self.pace.factor * 1_000_000)
                if target > self.session.sim.now():
                    self.session.sim.advance_until(target)

    # --- session lifecycle ----------------------------------------------------

    def reset(self) -> None:
        with self.lock:
            self.session = DriveSession(self.session_config)
            self._rebase()

    def run_script_text(self, text: str):
        """Fresh session, full-speed run; returns (report, csv, path)."""
        program = parse_script(text)
        with self.lock:
            self.session = DriveSession(self.session_config)
            report = self.session.run_script(program)
            csv = self.session.trajectory.to_csv()
            self._rebase()
            self.run_count += 1
            path = None
            if self.run_dir is None:
                self.run_dir = tempfile.mkdtemp(prefix="lptvehicle-runs-")
            os.makedirs(self.run_dir, exist_ok=True)
            path = os.path.join(self.run_dir, f"run-{self.run_count:04d}.csv")
            with open(path, "w", newline="\n") as f:
                f.write(csv)
        return report, csv, path


class KeyRequest(BaseModel):
    key: str
    action: str = "press"


class PortWriteRequest(BaseModel):
    offset: int = Field(ge=0, le=7)
    value: int = Field(ge=0, le=255)


def _config_dict(runner: Runner) -> dict:
    cfg = runner.session_config
    return {
        "pace": {
            "mode": runner.pace.mode,
            "factor": runner.pace.factor,
            "snapshot_rate_hz": runner.pace.snapshot_rate_hz,
        },
        "epp_mode": cfg.port.epp_mode.value,
        "base_address": cfg.port.base_address,
        "timing": {
            "t_host_setup": cfg.port.t_host_setup,
            "t_timeout": cfg.port.t_timeout,
            "t_stall_budget": cfg.port.t_stall_budget,
            "ack_delay_us": cfg.ack_delay_us,
            "release_delay_us": cfg.release_delay_us,
        },
        "ne555_hz": cfg.ne555_hz,
        "wheelbase_cm": cfg.wheelbase_cm,
        "speed_cm_s": cfg.speed_cm_s,
        "step_angle_deg": cfg.step_angle_deg,
        "max_angle_deg": cfg.max_angle_deg,
        "sample_interval_us": cfg.sample_interval_us,
    }


def _apply_config(runner: Runner, body: dict) -> None:
    """Apply a partial config update; raises ValueError on bad values."""
    cfg = runner.session_config
    session = runner.session
    if "pace" in body:
        p = body["pace"]
        pace = PaceConfig(
            mode=p.get("mode", runner.pace.mode),
            factor=p.get("factor", runner.pace.factor),
            snapshot_rate_hz=p.get("snapshot_rate_hz", runner.pace.snapshot_rate_hz),
        )
        pace.validate()
        runner.pace = pace
        runner._rebase()
    if "epp_mode" in body:
        try:
            cfg.port.epp_mode = EppMode(body["epp_mode"])
        except ValueError:
            raise ValueError("epp_mode must be EPP_1_7 or EPP_1_9")
    if "base_address" in body:
        cfg.port.base_address = int(body["base_address"])
    timing = body.get("timing", {})
    for name in ("t_host_setup", "t_timeout", "t_stall_budget"):
        if name in timing:
            value = int(timing[name])
            if value < 0:
                raise ValueError(f"{name} must be >= 0")
            setattr(cfg.port, name, value)
    for name in ("ack_delay_us", "release_delay_us"):
        if name in timing:
            value = int(timing[name])
            if value < 0:
                raise ValueError(f"{name} must be >= 0")
            setattr(cfg, name, value)
            setattr(session.vehicle, name, value)
    if "ne555_hz" in body:
        hz = float(body["ne555_hz"])
        session.vehicle.set_frequency(hz)  # validates
        cfg.ne555_hz = hz
    if "wheelbase_cm" in body:
        wb = float(body["wheelbase_cm"])
        if not wb > 0:
            raise ValueError("wheelbase_cm must be positive")
        session._sync_pose()
        cfg.wheelbase_cm = wb
        session.model.wheelbase_cm = wb
    if "speed_cm_s" in body:
        v = float(body["speed_cm_s"])
        if v < 0:
            raise ValueError("speed_cm_s must be >= 0")
        session._sync_pose()
        cfg.speed_cm_s = v
        session.vehicle.speed_cm_s = v
    if "sample_interval_us" in body:
        si = int(body["sample_interval_us"])
        if si < 1:
            raise ValueError("sample_interval_us must be >= 1")
        cfg.sample_interval_us = si
    for name in ("step_angle_deg", "max_angle_deg"):
        if name in body:
            value = float(body[name])
            if not value > 0:
                raise ValueError(f"{name} must be positive")
            setattr(cfg, name, value)  # takes effect on next reset


def create_app(
    session_config: Optional[SessionConfig] = None,
    pace: Optional[PaceConfig] = None,
    static_dir: Optional[str] = None,
    run_dir: Optional[str] = None,
) -> FastAPI:
    runner = Runner(session_config, pace, run_dir=run_dir)

    @asynccontextmanager
    async def lifespan(_app):
        runner.start()
        yield
        runner.stop()

    app = FastAPI(title="lptvehicle", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.runner = runner

    @app.get("/api/state")
    def get_state():
        with runner.lock:
            return runner.session.snapshot()

    @app.post("/api/key")
    def post_key(req: KeyRequest):
        if req.action not in ("press", "release"):
            raise HTTPException(422, "action must be press or release")
        with runner.lock:
            try:
                if req.action == "press":
                    runner.session.press(req.key)
                else:
                    runner.session.release(req.key)
            except UnknownKeyError as err:
                raise HTTPException(422, str(err))
            except SessionEndedError:
                raise HTTPException(409, "session ended; POST /api/reset to start over")
            except EppStallError as err:
                raise HTTPException(504, str(err))
            return {"ok": True, "snapshot": runner.session.snapshot()}

    @app.post("/api/port/write")
    def post_port_write(req: PortWriteRequest):
        with runner.lock:
            try:
                trace = runner.session.port_write(req.offset, req.value)
            except EppStallError as err:
                raise HTTPException(504, str(err))
            except (AddressDecodeError, PortError) as err:
                raise HTTPException(422, str(err))
            events = None
            if trace is not None:
                events = [
                    {"t_us": t, "event": name, "value": trace.value}
                    for t, name in trace.events
                ]
            return {"ok": True, "trace": events}

    @app.post("/api/script")
    async def post_script(request: Request):
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            report, csv, path = runner.run_script_text(text)
        except ScriptError as err:
            raise HTTPException(400, str(err))
        status = 200 if not report.aborted else 409
        return Response(
            content=json.dumps(
                {
                    "report": dataclasses.asdict(report),
                    "trajectory_path": path,
                    "trajectory_csv": csv,
                }
            ),
            status_code=status,
            media_type="application/json",
        )

    @app.get("/api/trace")
    def get_trace(since: int = Query(default=-1)):
        with runner.lock:
            return {"events": runner.session.trace_events_since(since)}

    @app.get("/api/trajectory")
    def get_trajectory():
        with runner.lock:
            return PlainTextResponse(
                runner.session.trajectory.to_csv(), media_type="text/csv"
            )

    @app.get("/api/config")
    def get_config():
        with runner.lock:
            return _config_dict(runner)

    @app.put("/api/config")
    async def put_config(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise HTTPException(422, "config body must be an object")
        with runner.lock:
            try:
                _apply_config(runner, body)
            except (ValueError, TypeError) as err:
                raise HTTPException(422, str(err))
            return _config_dict(runner)

    @app.post("/api/reset")
    def post_reset():
        runner.reset()
        with runner.lock:
            return {"ok": True, "snapshot": runner.session.snapshot()}

    @app.get("/api/stream")
    def get_stream(limit: int = Query(default=0), interval_ms: int = Query(default=0)):
        """NDJSON snapshot stream: latest state wins, t strictly increases."""
        interval = (
            interval_ms / 1000.0
            if interval_ms > 0
            else 1.0 / runner.pace.snapshot_rate_hz
        )

        def gen():
            # limit bounds polls, not lines: with virtual time frozen the
            # latest-wins filter can legitimately emit nothing new, and the
            # stream must still terminate for bounded consumers.
            last_t = -1
            polls = 0
            while limit <= 0 or polls < limit:
                polls += 1
                with runner.lock:
                    snap = runner.session.snapshot()
                if snap["t_us"] > last_t:
                    last_t = snap["t_us"]
                    yield json.dumps(snap, separators=(",", ":")) + "\n"
                time.sleep(interval)

        return StreamingResponse(gen(), media_type="application/x-ndjson")

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
