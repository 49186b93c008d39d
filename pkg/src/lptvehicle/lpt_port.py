"""PC-side parallel printer port: SPP register file plus the EPP data-write engine.

Models the LPT1 window (base 0x378, offsets 0..7):

    +0  data register      read/write latch, drives pins D0..D7
    +1  status register    read-only, assembled from the 5 input pins
    +2  control register   6-bit latch; bits 0..3 drive the control pins
    +3  EPP address reg    stored but inert (no address cycle is modeled)
    +4..+7  EPP data reg   a write runs one EPP data-write handshake cycle

Electrical polarity follows the standard convention: control bits 0, 1, 3
(nStrobe, nAutoFeed, nSelectIn) appear inverted on the connector, bit 2
(nInit) does not, and status bit 7 is the complement of the Busy pin. In EPP
mode the same wires carry the handshake: nWrite rides the nStrobe pin,
nDataStrobe the nAutoFeed pin, and nWait the Busy pin.

A write to the EPP data register executes the whole cycle in virtual time
and returns an ordered, timestamped :class:`EppCycleTrace`. EPP 1.9 arms a
watchdog per wait phase (timeout sets status bit 0); EPP 1.7 has no watchdog
and instead stalls until a caller-supplied virtual-time budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .sim_core import Simulator

# register offsets inside the port window
DATA_OFFSET = 0
STATUS_OFFSET = 1
CONTROL_OFFSET = 2
EPP_ADDRESS_OFFSET = 3
EPP_DATA_OFFSETS = (4, 5, 6, 7)
WINDOW_SIZE = 8

# control register: writable latch bits; 0,1,3 are inverted on the wire
CONTROL_LATCH_MASK = 0x3F
CONTROL_PIN_INVERT = 0b1011
CONTROL_PIN_NAMES = ("nStrobe", "nAutoFeed", "nInit", "nSelectIn")

# status register bit positions
STATUS_TIMEOUT = 0x01  # EPP 1.9 watchdog flag
STATUS_ERROR = 0x08
STATUS_SELECT = 0x10
STATUS_PAPER_OUT = 0x20
STATUS_ACK = 0x40
STATUS_BUSY = 0x80  # inverted: register bit = NOT(busy pin)

# EPP cycle trace events, in the order they appear on a successful cycle
WRITE_ISSUED = "WRITE_ISSUED"
NWRITE_LOW = "NWRITE_LOW"
DATA_PLACED = "DATA_PLACED"
DATASTROBE_ASSERTED = "DATASTROBE_ASSERTED"
WAIT_WENT_HIGH = "WAIT_WENT_HIGH"
DATASTROBE_DEASSERTED = "DATASTROBE_DEASSERTED"
CYCLE_END = "CYCLE_END"
TIMEOUT = "TIMEOUT"

EPP_SUCCESS_EVENTS = (
    WRITE_ISSUED,
    NWRITE_LOW,
    DATA_PLACED,
    DATASTROBE_ASSERTED,
    WAIT_WENT_HIGH,
    DATASTROBE_DEASSERTED,
    CYCLE_END,
)


class EppMode(Enum):
    EPP_1_7 = "EPP_1_7"
    EPP_1_9 = "EPP_1_9"


class PortError(Exception):
    pass


class AddressDecodeError(PortError):
    """Offset outside the port window: no device select pulse, nothing responds."""


class UnsupportedCycleError(PortError):
    """Bus transaction the emulator deliberately does not model (EPP reads)."""


class EppStallError(PortError):
    """EPP 1.7 cycle exceeded its virtual-time budget (no watchdog in 1.7)."""

    def __init__(self, message: str, trace: "EppCycleTrace"):
        super().__init__(message)
        self.trace = trace


class ThroughputError(PortError):
    """A cycle inside measure_throughput timed out; carries the partial count."""

    def __init__(self, message: str, bytes_completed: int, trace: "EppCycleTrace"):
        super().__init__(message)
        self.bytes_completed = bytes_completed
        self.trace = trace


@dataclass
class PortConfig:
    base_address: int = 0x378
    epp_mode: EppMode = EppMode.EPP_1_9
    t_host_setup: int = 0  # us from write issue to nWrite/data valid
    t_timeout: int = 10  # us, EPP 1.9 watchdog per wait phase
    t_stall_budget: int = 1_000_000  # us, default EPP 1.7 budget for port_write


@dataclass
class EppCycleTrace:
    """Ordered (t_us, event) log of one EPP data-write cycle."""

    value: int
    events: list[tuple[int, str]] = field(default_factory=list)

    def record(self, t_us: int, event: str) -> None:
        self.events.append((t_us, event))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e for _, e in self.events)

    @property
    def ok(self) -> bool:
        return self.names == EPP_SUCCESS_EVENTS

    @property
    def timed_out(self) -> bool:
        return TIMEOUT in self.names

    def end_time(self) -> int:
        return self.events[-1][0]

    def format_text(self) -> str:
        """One event per line: ``<t_us> <EVENT_NAME>``."""
        return "\n".join(f"{t} {name}" for t, name in self.events)


class PinBus:
    """The D-25 connector as seen by both ends: 12 outputs, 5 inputs.

    Outputs (host-driven): D0..D7 plus the four control pins. Inputs
    (peripheral-driven): nAck, Busy, PaperOut, Select, nError. Input levels
    are set with :meth:`set_input`; every level change is reported to
    watchers, which is how the EPP engine notices nWait edges.
    """

    OUTPUT_PINS = tuple(f"d{i}" for i in range(8)) + CONTROL_PIN_NAMES
    INPUT_PINS = ("nError", "select", "paperOut", "nAck", "busy")

    def __init__(self):
        self.data = 0x00
        # control register 0x00 idle: inverted pins rest high
        self.nStrobe = 1
        self.nAutoFeed = 1
        self.nInit = 0
        self.nSelectIn = 1
        # idle peripheral: ready (busy low), no error
        self.nError = 1
        self.select = 1
        self.paperOut = 0
        self.nAck = 1
        self.busy = 0
        self._watchers: list[Callable[[str, int], None]] = []

    def watch(self, fn: Callable[[str, int], None]) -> None:
        """Register fn(pin_name, new_level), called on every pin change."""
        self._watchers.append(fn)

    def unwatch(self, fn: Callable[[str, int], None]) -> None:
        self._watchers.remove(fn)

    def set_input(self, name: str, level: int) -> None:
        if name not in self.INPUT_PINS:
            raise ValueError(f"not an input pin: {name}")
        self._set(name, 1 if level else 0)

    def data_levels(self) -> list[int]:
        return [(self.data >> i) & 1 for i in range(8)]

    def as_dict(self) -> dict:
        d = {name: getattr(self, name) for name in CONTROL_PIN_NAMES + self.INPUT_PINS}
        d["data"] = self.data_levels()
        return d

    # host side (port internals) drives outputs through these
    def _drive_data(self, value: int) -> None:
        if self.data != value:
            self.data = value
            self._notify("data", value)

    def _set(self, name: str, level: int) -> None:
        if getattr(self, name) != level:
            setattr(self, name, level)
            self._notify(name, level)

    def _notify(self, name: str, level: int) -> None:
        for fn in list(self._watchers):
            fn(name, level)


class EppPeripheral:
    """Handshake partner contract for the vehicle side of the cable.

    The port calls :meth:`on_attach` once, :meth:`on_data_strobe` at the
    assertion edge of nDataStrobe (the byte is valid then), and
    :meth:`on_strobe_released` at deassertion. The peripheral answers by
    driving the Busy/nWait input pin through the bus, in virtual time.
    """

    def on_attach(self, sim: Simulator, bus: PinBus) -> None:
        raise NotImplementedError

    def on_data_strobe(self, value: int) -> None:
        raise NotImplementedError

    def on_strobe_released(self) -> None:
        raise NotImplementedError


class StubPeripheral(EppPeripheral):
    """Configurable test partner: acks after ack_delay_us, or never."""

    def __init__(self, ack_delay_us: int = 1, release_delay_us: int = 0, respond: bool = True):
        self.ack_delay_us = ack_delay_us
        self.release_delay_us = release_delay_us
        self.respond = respond
        self.latched: list[int] = []
        self._sim: Optional[Simulator] = None
        self._bus: Optional[PinBus] = None

    def on_attach(self, sim: Simulator, bus: PinBus) -> None:
        self._sim = sim
        self._bus = bus

    def on_data_strobe(self, value: int) -> None:
        self.latched.append(value)
        if self.respond:
            self._sim.schedule(self.ack_delay_us, lambda _: self._bus.set_input("busy", 1))

    def on_strobe_released(self) -> None:
        if self.respond:
            self._sim.schedule(self.release_delay_us, lambda _: self._bus.set_input("busy", 0))


class _EppDataWriteCycle:
    """State machine for one Fig-6 style data-write handshake.

    Both wait phases (nWait low before strobing, nWait high to end) share the
    same watchdog treatment; strobe assertion is gated on nWait being low.
    """

    def __init__(self, port: "LptPort", value: int, budget_us: Optional[int]):
        self.port = port
        self.sim = port.sim
        self.bus = port.pins
        self.value = value
        self.trace = EppCycleTrace(value=value)
        self.done = False
        self.stalled = False
        self._watchdog_id: Optional[int] = None
        self._budget_id: Optional[int] = None
        self._waiting_for: Optional[int] = None  # busy level that resumes us
        self._resume: Optional[Callable[[], None]] = None
        self.bus.watch(self._on_pin)
        if budget_us is not None:
            self._budget_id = self.sim.schedule(budget_us, self._on_budget_expired)

    def start(self) -> None:
        self._record(WRITE_ISSUED)
        self.sim.schedule(self.port.config.t_host_setup, self._host_setup)

    # --- phases -----------------------------------------------------------

    def _host_setup(self, _=None) -> None:
        self.bus._set("nStrobe", 0)  # nWrite low: write cycle
        self._record(NWRITE_LOW)
        self.bus._drive_data(self.value)
        self.port.data_latch = self.value  # EPP shares the SPP output latch
        self._record(DATA_PLACED)
        self._await_busy(0, self._assert_strobe)

    def _assert_strobe(self) -> None:
        # gated: only reached with nWait low ("O.K. to start cycle")
        self.bus._set("nAutoFeed", 0)
        self._record(DATASTROBE_ASSERTED)
        peripheral = self.port.peripheral
        if peripheral is not None:
            peripheral.on_data_strobe(self.value)
        self._await_busy(1, self._end_cycle)

    def _end_cycle(self) -> None:
        self._record(WAIT_WENT_HIGH)
        self.bus._set("nAutoFeed", 1)
        self._record(DATASTROBE_DEASSERTED)
        peripheral = self.port.peripheral
        if peripheral is not None:
            peripheral.on_strobe_released()
        self.bus._set("nStrobe", 1)
        self._record(CYCLE_END)
        self._finish()

    # --- waiting machinery --------------------------------------------------

    def _await_busy(self, level: int, then: Callable[[], None]) -> None:
        if self.bus.busy == level:
            then()
            return
        self._waiting_for = level
        self._resume = then
        if self.port.config.epp_mode is EppMode.EPP_1_9:
            self._watchdog_id = self.sim.schedule(self.port.config.t_timeout, self._on_watchdog)

    def _on_pin(self, name: str, new_level: int) -> None:
        if self.done or name != "busy" or self._waiting_for is None:
            return
        if new_level == self._waiting_for:
            self._disarm_watchdog()
            self._waiting_for = None
            resume = self._resume
            self._resume = None
            resume()

    def _on_watchdog(self, _=None) -> None:
        if self.done:
            return
        self._record(TIMEOUT)
        self.port.epp_timeout_flag = 1
        self._restore_pins()
        self._finish()

    def _on_budget_expired(self, _=None) -> None:
        if self.done:
            return
        self.stalled = True
        self._restore_pins()
        self._finish()

    # --- teardown -----------------------------------------------------------

    def _restore_pins(self) -> None:
        self.bus._set("nAutoFeed", 1)
        self.bus._set("nStrobe", 1)

    def _finish(self) -> None:
        self.done = True
        self._disarm_watchdog()
        if self._budget_id is not None:
            self.sim.cancel(self._budget_id)
            self._budget_id = None
        self.bus.unwatch(self._on_pin)

    def _disarm_watchdog(self) -> None:
        if self._watchdog_id is not None:
            self.sim.cancel(self._watchdog_id)
            self._watchdog_id = None

    def _record(self, event: str) -> None:
        self.trace.record(self.sim.now(), event)


class LptPort:
    """The register file, pin bus and EPP engine behind one base address."""

    def __init__(self, sim: Simulator, config: Optional[PortConfig] = None):
        self.sim = sim
        self.config = config or PortConfig()
        self.pins = PinBus()
        self.data_latch = 0x00
        self.control_latch = 0x00
        self.epp_address = 0x00
        self.epp_timeout_flag = 0
        self.peripheral: Optional[EppPeripheral] = None

    def attach(self, peripheral: EppPeripheral) -> None:
        self.peripheral = peripheral
        peripheral.on_attach(self.sim, self.pins)

    # --- register window ----------------------------------------------------

    def port_write(self, offset: int, value: int) -> Optional[EppCycleTrace]:
        """OUT instruction to base+offset. EPP data offsets return the cycle trace."""
        self._decode(offset)
        value &= 0xFF
        if offset == DATA_OFFSET:
            self.data_latch = value
            self.pins._drive_data(value)
            return None
        if offset == STATUS_OFFSET:
            return None  # read-only register, write strobed into nothing
        if offset == CONTROL_OFFSET:
            self.control_latch = value & CONTROL_LATCH_MASK
            self._drive_control_pins()
            return None
        if offset == EPP_ADDRESS_OFFSET:
            self.epp_address = value
            return None
        return self.epp_data_write(value)

    def port_read(self, offset: int) -> int:
        """IN instruction from base+offset."""
        self._decode(offset)
        if offset == DATA_OFFSET:
            return self.data_latch
        if offset == STATUS_OFFSET:
            return self._status_byte()
        if offset == CONTROL_OFFSET:
            return self.control_latch
        if offset == EPP_ADDRESS_OFFSET:
            return self.epp_address
        raise UnsupportedCycleError(
            f"EPP data-read cycle (offset {offset}) is not modeled"
        )

    def _decode(self, offset: int) -> None:
        if not 0 <= offset < WINDOW_SIZE:
            raise AddressDecodeError(
                f"offset {offset} outside 0..7: no device select pulse at base "
                f"{self.config.base_address:#x}"
            )

    def _drive_control_pins(self) -> None:
        wire = (self.control_latch & 0x0F) ^ CONTROL_PIN_INVERT
        for bit, name in enumerate(CONTROL_PIN_NAMES):
            self.pins._set(name, (wire >> bit) & 1)

    def _status_byte(self) -> int:
        p = self.pins
        byte = 0
        if self.config.epp_mode is EppMode.EPP_1_9 and self.epp_timeout_flag:
            byte |= STATUS_TIMEOUT
        if p.nError:
            byte |= STATUS_ERROR
        if p.select:
            byte |= STATUS_SELECT
        if p.paperOut:
            byte |= STATUS_PAPER_OUT
        if p.nAck:
            byte |= STATUS_ACK
        if not p.busy:
            byte |= STATUS_BUSY
        return byte

    # --- EPP engine -----------------------------------------------------------

    def epp_data_write(self, value: int, budget_us: Optional[int] = None) -> EppCycleTrace:
        """Run one EPP data-write cycle to completion in virtual time.

        EPP 1.9: a wait phase exceeding t_timeout aborts the cycle with a
        TIMEOUT trace event and sets the status-bit-0 flag. EPP 1.7: the
        cycle stalls until ``budget_us`` (default config.t_stall_budget) of
        virtual time passes, then raises :class:`EppStallError`; the flag is
        never touched.
        """
        value &= 0xFF
        if self.config.epp_mode is EppMode.EPP_1_7:
            budget = budget_us if budget_us is not None else self.config.t_stall_budget
        else:
            budget = None
        cycle = _EppDataWriteCycle(self, value, budget)
        cycle.start()
        while not cycle.done:
            if not self.sim.run_next():
                raise PortError("EPP cycle wedged with an empty event queue")
        # Settle same-instant trailing edges (the peripheral's nWait release
        # is scheduled for this very microsecond) so a status read right
        # after the call sees the bus idle again.
        self.sim.advance_until(self.sim.now())
        if cycle.stalled:
            raise EppStallError(
                f"EPP 1.7 data-write cycle stalled past {budget} us budget", cycle.trace
            )
        return cycle.trace

    def measure_throughput(self, n_bytes: int) -> float:
        """Back-to-back EPP data-write cycles; bytes per second of virtual time."""
        if n_bytes < 1:
            raise ValueError("n_bytes must be >= 1")
        start = self.sim.now()
        for i in range(n_bytes):
            trace = self.epp_data_write(i & 0xFF)
            if trace.timed_out:
                raise ThroughputError(
                    f"cycle {i} timed out after {i} completed bytes", i, trace
                )
        elapsed_us = self.sim.now() - start
        if elapsed_us <= 0:
            raise PortError("zero elapsed virtual time over a whole transfer")
        return n_bytes / (elapsed_us / 1_000_000.0)
