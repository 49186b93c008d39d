"""Deterministic simulator of a parallel-port guided vehicle.

The package models the full chain: an ISA-style register window for an EPP
parallel port, the byte handshake on its pins, the receiving control box
(decoder, NE555 clock, gray-code counter, stepper and drive motors), and the
resulting planar motion of the vehicle, all on one integer-microsecond
virtual clock.

The HTTP layer lives in :mod:`lptvehicle.service` (imported on demand so the
core stays dependency-light).
"""

from .sim_core import SimTimeError, Simulator
from .lpt_port import (
    EppCycleTrace,
    EppMode,
    EppStallError,
    LptPort,
    PinBus,
    PortConfig,
    StubPeripheral,
    ThroughputError,
)
from .vehicle_unit import (
    Drive,
    VehicleGeometry,
    VehicleUnit,
    step_sequence,
    steering_angle_after,
)
from .kinematics import KERNEL_BACKEND, BicycleModel, Pose, Trajectory
from .command_codec import (
    Command,
    PathProgram,
    PathStep,
    ScriptError,
    UnknownKeyError,
    command_to_control_word,
    key_to_command,
    parse_script,
)
from .session import DriveSession, RunReport, SessionConfig, SessionEndedError

__version__ = "0.1.0"

__all__ = [
    "BicycleModel",
    "Command",
    "Drive",
    "DriveSession",
    "EppCycleTrace",
    "EppMode",
    "EppStallError",
    "KERNEL_BACKEND",
    "LptPort",
    "PathProgram",
    "PathStep",
    "PinBus",
    "PortConfig",
    "Pose",
    "RunReport",
    "ScriptError",
    "SessionConfig",
    "SessionEndedError",
    "SimTimeError",
    "Simulator",
    "StubPeripheral",
    "ThroughputError",
    "Trajectory",
    "UnknownKeyError",
    "VehicleGeometry",
    "VehicleUnit",
    "command_to_control_word",
    "key_to_command",
    "parse_script",
    "step_sequence",
    "steering_angle_after",
    "__version__",
]
