"""One driveable vehicle session: port + vehicle + pose, one code path.

Interactive keys and path scripts converge on press_command/release_command,
so a script run is equivalent, sample for sample, to issuing the same
commands at the same virtual times by hand. Every control byte travels
through the EPP data-write handshake; nothing pokes the vehicle directly.

Pose bookkeeping is lazy: the vehicle calls back just before anything
changes its velocity or steering, and the session integrates the pose over
the elapsed interval at the old settings first.
"""

from __future__ import annotations

import collections
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .command_codec import Command, PathProgram, command_to_control_word, key_to_command
from .kinematics import BicycleModel, Pose, Trajectory
from .lpt_port import (
    CONTROL_OFFSET,
    DATA_OFFSET,
    DATASTROBE_ASSERTED,
    EPP_DATA_OFFSETS,
    CYCLE_END,
    EppCycleTrace,
    EppStallError,
    LptPort,
    PortConfig,
    STATUS_OFFSET,
)
from .sim_core import Simulator
from .vehicle_unit import VehicleGeometry, VehicleUnit, format_pattern

TRACE_RING_SIZE = 4096


class SessionEndedError(RuntimeError):
    """Command arrived after END closed the session."""


@dataclass
class SessionConfig:
    """Everything needed to reconstruct an identical session."""

    port: PortConfig = field(default_factory=PortConfig)
    ne555_hz: float = 25.0
    step_angle_deg: float = 1.8
    max_angle_deg: float = 45.0
    speed_cm_s: float = 14.0
    wheelbase_cm: float = 20.0
    ack_delay_us: int = 1
    release_delay_us: int = 0
    sample_interval_us: int = 50_000


@dataclass
class RunReport:
    """Exit report for a script run."""

    total_time_us: int
    bytes_written: int
    cycle_end_count: int
    timeouts: int
    samples: int
    aborted: bool = False
    reason: str = ""


def _seconds_to_us(seconds: float) -> int:
    return int(round(seconds * 1_000_000))


def _effect_time(trace: EppCycleTrace) -> int:
    """When the peripheral latched the byte (strobe edge), else cycle end."""
    for t, name in trace.events:
        if name == DATASTROBE_ASSERTED:
            return t
    return trace.end_time()


class DriveSession:
    """A single vehicle behind a single port, driven to an END."""

    def __init__(self, config: Optional[SessionConfig] = None):
        self.config = config or SessionConfig()
        cfg = self.config
        self.sim = Simulator()
        self.port = LptPort(self.sim, cfg.port)
        self.vehicle = VehicleUnit(
            self.sim,
            ne555_hz=cfg.ne555_hz,
            step_angle_deg=cfg.step_angle_deg,
            max_angle_deg=cfg.max_angle_deg,
            speed_cm_s=cfg.speed_cm_s,
            geometry=VehicleGeometry(wheelbase_cm=cfg.wheelbase_cm),
            ack_delay_us=cfg.ack_delay_us,
            release_delay_us=cfg.release_delay_us,
        )
        self.port.attach(self.vehicle)
        self.vehicle.on_motion_change = self._sync_pose
        self.model = BicycleModel(
            wheelbase_cm=cfg.wheelbase_cm, max_steering_deg=cfg.max_angle_deg
        )
        self.trajectory = Trajectory()
        self.traces: collections.deque = collections.deque(maxlen=TRACE_RING_SIZE)

        self.bytes_written = 0
        self.cycle_end_count = 0
        self.timeout_count = 0
        self.ended = False

        self._pose = Pose()
        self._pose_t_us = 0
        self._drive_word = 0x00
        self._held_steer: Optional[Command] = None

        self._record_sample()
        self._sampler_id: Optional[int] = self.sim.schedule(
            cfg.sample_interval_us, self._on_sample
        )

    # --- pose bookkeeping ---------------------------------------------------

    def _sync_pose(self, _=None) -> None:
        """Integrate the pose up to now at the still-current settings."""
        now = self.sim.now()
        dt = now - self._pose_t_us
        if dt <= 0:
            return
        v = self.vehicle.velocity_cm_s
        if v != 0.0:
            self._pose = self.model.integrate(
                self._pose, self.vehicle.steering_deg, v, dt
            )
        self._pose_t_us = now

    @property
    def pose(self) -> Pose:
        self._sync_pose()
        return self._pose

    def _record_sample(self) -> None:
        t = self.sim.now()
        if self.trajectory.samples and t <= self.trajectory.samples[-1].t_us:
            return
        self.trajectory.record(
            t, self._pose, self.vehicle.steering_deg, self.vehicle.drive.code
        )

    def _on_sample(self, _=None) -> None:
        if self.ended:
            return
        self._sync_pose()
        self._record_sample()
        self._sampler_id = self.sim.schedule(
            self.config.sample_interval_us, self._on_sample
        )

    # --- command path (shared by keys and scripts) ---------------------------

    def press_command(self, cmd: Command) -> Optional[EppCycleTrace]:
        if self.ended:
            raise SessionEndedError("session already ended")
        if cmd is Command.END:
            self.end()
            return None
        if cmd in (Command.FORWARD, Command.BACKWARD, Command.STOP):
            self._drive_word = command_to_control_word(cmd)
        else:
            self._held_steer = cmd
        return self._send_current()

    def release_command(self, cmd: Command) -> Optional[EppCycleTrace]:
        if self.ended:
            raise SessionEndedError("session already ended")
        if cmd is not self._held_steer:
            return None  # drive keys latch; stale steer releases are no-ops
        self._held_steer = None
        return self._send_current()

    def press(self, token: str) -> Optional[EppCycleTrace]:
        return self.press_command(key_to_command(token))

    def release(self, token: str) -> Optional[EppCycleTrace]:
        return self.release_command(key_to_command(token))

    def _send_current(self) -> EppCycleTrace:
        word = self._drive_word
        if self._held_steer is not None:
            word |= command_to_control_word(self._held_steer, held=True)
        return self._write_byte(word)

    def _write_byte(self, value: int) -> EppCycleTrace:
        trace = self.port.epp_data_write(value)
        self.bytes_written += 1
        if CYCLE_END in trace.names:
            self.cycle_end_count += 1
        if trace.timed_out:
            self.timeout_count += 1
        self.traces.append(trace)
        return trace

    def port_write(self, offset: int, value: int) -> Optional[EppCycleTrace]:
        """Raw register write. EPP data offsets go through the counted path."""
        if offset in EPP_DATA_OFFSETS:
            return self._write_byte(value)
        return self.port.port_write(offset, value)

    def end(self) -> None:
        """Close the session: final trajectory sample, no byte on the wire."""
        if self.ended:
            return
        self._sync_pose()
        self._record_sample()
        self.ended = True
        if self._sampler_id is not None:
            self.sim.cancel(self._sampler_id)
            self._sampler_id = None

    # --- script execution -----------------------------------------------------

    def run_script(
        self,
        program: PathProgram,
        pacer: Optional[Callable[[int], None]] = None,
    ) -> RunReport:
        """Execute a parsed program to its END at full virtual speed.

        Each step holds its command for its duration, anchored at the
        instant the vehicle latched the byte. ``pacer``, when given, is
        called with the next target virtual time before each advance and
        may sleep to rate-limit wall-clock progress.
        """
        if self.ended:
            raise SessionEndedError("session already ended")
        start_t = self.sim.now()
        for step in program.steps:
            try:
                trace = self.press_command(step.command)
            except EppStallError as err:
                return self._abort_report(start_t, str(err))
            if trace is not None and trace.timed_out:
                return self._abort_report(
                    start_t, f"EPP timeout writing {trace.value:#04x}"
                )
            hold_until = _effect_time(trace) + _seconds_to_us(step.seconds)
            self._advance_paced(hold_until, pacer)
            if step.command in (Command.LEFT, Command.RIGHT):
                try:
                    trace = self.release_command(step.command)
                except EppStallError as err:
                    return self._abort_report(start_t, str(err))
                if trace is not None and trace.timed_out:
                    return self._abort_report(
                        start_t, f"EPP timeout writing {trace.value:#04x}"
                    )
        self.end()
        return self._report(start_t)

    def _advance_paced(self, t_us: int, pacer: Optional[Callable[[int], None]]) -> None:
        if pacer is None:
            if t_us > self.sim.now():
                self.sim.advance_until(t_us)
            return
        chunk = self.config.sample_interval_us
        while self.sim.now() < t_us:
            target = min(self.sim.now() + chunk, t_us)
            pacer(target)
            self.sim.advance_until(target)

    def _report(self, start_t: int, aborted: bool = False, reason: str = "") -> RunReport:
        return RunReport(
            total_time_us=self.sim.now() - start_t,
            bytes_written=self.bytes_written,
            cycle_end_count=self.cycle_end_count,
            timeouts=self.timeout_count,
            samples=len(self.trajectory),
            aborted=aborted,
            reason=reason,
        )

    def _abort_report(self, start_t: int, reason: str) -> RunReport:
        self.end()
        return self._report(start_t, aborted=True, reason=reason)

    # --- observable state -------------------------------------------------------

    def snapshot(self) -> dict:
        """Consistent view of the whole rig at the current instant."""
        self._sync_pose()
        tail = []
        if self.traces:
            last = self.traces[-1]
            tail = [
                {"t_us": t, "event": name, "value": last.value}
                for t, name in last.events
            ]
        return {
            "t_us": self.sim.now(),
            "pose": {
                "x_cm": self._pose.x_cm,
                "y_cm": self._pose.y_cm,
                "heading_deg": math.degrees(self._pose.heading_rad),
            },
            "steering_deg": self.vehicle.steering_deg,
            "drive": self.vehicle.drive.name.capitalize(),
            "phases": format_pattern(self.vehicle.phases),
            "registers": {
                "data": f"{self.port.port_read(DATA_OFFSET):#04x}",
                "status": f"{self.port.port_read(STATUS_OFFSET):#04x}",
                "control": f"{self.port.port_read(CONTROL_OFFSET):#04x}",
            },
            "trace_tail": tail,
            "timeout_flag": self.port.epp_timeout_flag,
            "bytes_written": self.bytes_written,
            "cycle_end_count": self.cycle_end_count,
            "timeouts": self.timeout_count,
            "ended": self.ended,
        }

    def trace_events_since(self, t_us: int) -> list:
        """Flattened EPP events strictly after t_us, oldest first."""
        out = []
        for trace in self.traces:
            for t, name in trace.events:
                if t > t_us:
                    out.append({"t_us": t, "event": name, "value": trace.value})
        return out
