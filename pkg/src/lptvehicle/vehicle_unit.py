"""Vehicle-side controller: byte latch, drive/steer decode, clock, counter, motors.

The received control word is decoded into two independent circuits:

    bit 0  DRIVE_FWD   DC motor forward
    bit 1  DRIVE_REV   DC motor reverse (both set = interlock, Stopped)
    bit 2  STEP_EN     gates the astable clock feeding the counter
    bit 3  STEP_DIR    counter direction, 1 = clockwise
    bits 4..7          reserved, ignored

While STEP_EN is high the free-running clock (default 25 Hz) ticks a 2-bit
up/down counter whose outputs A and C, with their complements B and D, excite
the steering stepper one full step (1.8 deg) per edge. Consecutive patterns
differ in exactly one of A, C; four edges in a fixed direction return to the
start. The steering linkage clamps at +/-45 deg: edges against the stop slip
and are lost, they never wind up.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .lpt_port import EppPeripheral, PinBus
from .sim_core import Simulator

DRIVE_FWD = 0x01
DRIVE_REV = 0x02
STEP_EN = 0x04
STEP_DIR = 0x08

# (A, C) ring of the 2-bit counter; index+1 is one clockwise step.
# Full patterns are (A, B, C, D) with B = NOT A, D = NOT C.
_AC_RING = ((1, 1), (0, 1), (0, 0), (1, 0))

PhasePattern = tuple[int, int, int, int]


class Drive(Enum):
    FORWARD = "F"
    BACKWARD = "B"
    STOPPED = "S"

    @property
    def code(self) -> str:
        return self.value


@dataclass
class VehicleGeometry:
    length_cm: float = 35.5
    width_cm: float = 14.1
    weight_kg: float = 1.0  # metadata only, no dynamics
    wheelbase_cm: float = 20.0

    def __post_init__(self):
        if not 0 < self.wheelbase_cm < self.length_cm:
            raise ValueError(
                f"wheelbase {self.wheelbase_cm} must lie in (0, {self.length_cm})"
            )


def pattern_for_ac(a: int, c: int) -> PhasePattern:
    return (a, 1 - a, c, 1 - c)


def format_pattern(pattern: PhasePattern) -> str:
    return "".join(str(b) for b in pattern)


def _ring_index(pattern: PhasePattern) -> int:
    a, b, c, d = pattern
    if b != 1 - a or d != 1 - c:
        raise ValueError(f"not a valid phase pattern (B!=NOT A or D!=NOT C): {pattern}")
    return _AC_RING.index((a, c))


def step_sequence(clockwise: bool, n: int, start: PhasePattern = (1, 0, 1, 0)) -> list[PhasePattern]:
    """The n phase patterns following ``start`` in the given direction."""
    if n < 0:
        raise ValueError("n must be >= 0")
    idx = _ring_index(start)
    delta = 1 if clockwise else -1
    out = []
    for _ in range(n):
        idx = (idx + delta) % 4
        out.append(pattern_for_ac(*_AC_RING[idx]))
    return out


def steering_angle_after(cw_steps: int, ccw_steps: int,
                         step_angle_deg: float = 1.8,
                         max_angle_deg: float = 45.0) -> float:
    """Angle from center after cw_steps clockwise then ccw_steps counter-clockwise.

    Steps taken against a mechanical stop slip and are lost.
    """
    max_steps = int(max_angle_deg / step_angle_deg + 1e-9)
    steps = 0
    for _ in range(cw_steps):
        if steps < max_steps:
            steps += 1
    for _ in range(ccw_steps):
        if steps > -max_steps:
            steps -= 1
    return steps * step_angle_deg


class VehicleUnit(EppPeripheral):
    """The remote unit: EPP handshake partner, decoder, clock, counter, motors.

    As a handshake partner it latches the data byte on the nDataStrobe edge,
    answers on the nWait line after ``ack_delay_us``, and drops nWait again
    ``release_delay_us`` after the strobe is released.

    ``on_motion_change`` (when set) is called with no arguments immediately
    before anything that alters drive velocity or steering angle; the owner
    uses it to integrate the pose up to the current instant first.
    """

    def __init__(self, sim: Simulator,
                 ne555_hz: float = 25.0,
                 step_angle_deg: float = 1.8,
                 max_angle_deg: float = 45.0,
                 speed_cm_s: float = 14.0,
                 geometry: Optional[VehicleGeometry] = None,
                 ack_delay_us: int = 1,
                 release_delay_us: int = 0):
        self.sim = sim
        self.geometry = geometry or VehicleGeometry()
        self.step_angle_deg = step_angle_deg
        self.max_angle_deg = max_angle_deg
        self.max_steps = int(max_angle_deg / step_angle_deg + 1e-9)
        self.speed_cm_s = speed_cm_s
        self.ack_delay_us = ack_delay_us
        self.release_delay_us = release_delay_us
        self.on_motion_change: Optional[Callable[[], None]] = None

        self.control_word = 0x00
        self.drive = Drive.STOPPED
        self.clock_enabled = False
        self.clock_dir_cw = False
        self._period_us = self._period_from_hz(ne555_hz)
        self._ne555_hz = ne555_hz
        self._edge_event: Optional[int] = None

        self._ring_idx = 0  # (1,1) -> pattern 1010, first row of both sequences
        self.net_steps = 0  # signed counter edges since start
        self.steer_steps = 0  # effective steps, clamped at the stops

        self._bus: Optional[PinBus] = None

    # --- configuration ---------------------------------------------------

    @staticmethod
    def _period_from_hz(hz: float) -> int:
        if hz <= 0:
            raise ValueError("clock frequency must be positive")
        period = round(1_000_000 / hz)
        if period < 1:
            raise ValueError(f"clock frequency {hz} Hz is above the 1 us resolution")
        return period

    @property
    def ne555_hz(self) -> float:
        return self._ne555_hz

    def set_frequency(self, hz: float) -> None:
        """Retune the astable. A pending edge is rescheduled a full new period out."""
        period = self._period_from_hz(hz)
        self._ne555_hz = hz
        self._period_us = period
        if self.clock_enabled:
            self._cancel_edge()
            self._edge_event = self.sim.schedule(self._period_us, self._on_edge_event)

    # --- EPP handshake partner -------------------------------------------

    def on_attach(self, sim: Simulator, bus: PinBus) -> None:
        self._bus = bus

    def on_data_strobe(self, value: int) -> None:
        self.on_byte_received(value)
        if self._bus is not None:
            self.sim.schedule(self.ack_delay_us, lambda _: self._bus.set_input("busy", 1))

    def on_strobe_released(self) -> None:
        if self._bus is not None:
            self.sim.schedule(self.release_delay_us, lambda _: self._bus.set_input("busy", 0))

    # --- control word ------------------------------------------------------

    def on_byte_received(self, value: int) -> None:
        """Latch and decode a control word; reserved high bits are ignored."""
        value &= 0xFF
        if self.on_motion_change is not None:
            self.on_motion_change()
        self.control_word = value
        fwd = bool(value & DRIVE_FWD)
        rev = bool(value & DRIVE_REV)
        if fwd and not rev:
            self.drive = Drive.FORWARD
        elif rev and not fwd:
            self.drive = Drive.BACKWARD
        else:
            self.drive = Drive.STOPPED  # includes the FWD+REV interlock
        self.clock_dir_cw = bool(value & STEP_DIR)
        enable = bool(value & STEP_EN)
        if enable and not self.clock_enabled:
            self.clock_enabled = True
            self._edge_event = self.sim.schedule(self._period_us, self._on_edge_event)
        elif not enable and self.clock_enabled:
            self.clock_enabled = False
            self._cancel_edge()

    # --- stepper ------------------------------------------------------------

    def clock_edge(self) -> PhasePattern:
        """One counter edge in the latched direction; returns the new pattern."""
        if not self.clock_enabled:
            raise ValueError("clock edge with STEP_EN low (astable is gated off)")
        if self.on_motion_change is not None:
            self.on_motion_change()
        if self.clock_dir_cw:
            self._ring_idx = (self._ring_idx + 1) % 4
            self.net_steps += 1
            if self.steer_steps < self.max_steps:
                self.steer_steps += 1
        else:
            self._ring_idx = (self._ring_idx - 1) % 4
            self.net_steps -= 1
            if self.steer_steps > -self.max_steps:
                self.steer_steps -= 1
        return self.phases

    def _on_edge_event(self, _=None) -> None:
        if not self.clock_enabled:
            return
        self.clock_edge()
        self._edge_event = self.sim.schedule(self._period_us, self._on_edge_event)

    def _cancel_edge(self) -> None:
        if self._edge_event is not None:
            self.sim.cancel(self._edge_event)
            self._edge_event = None

    # --- observable state --------------------------------------------------

    @property
    def phases(self) -> PhasePattern:
        return pattern_for_ac(*_AC_RING[self._ring_idx])

    @property
    def steering_deg(self) -> float:
        return self.steer_steps * self.step_angle_deg

    @property
    def velocity_cm_s(self) -> float:
        if self.drive is Drive.FORWARD:
            return self.speed_cm_s
        if self.drive is Drive.BACKWARD:
            return -self.speed_cm_s
        return 0.0
