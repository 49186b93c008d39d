"""Rear-axle bicycle model and trajectory recording.

Pose rates for constant steering delta and signed speed v:

    x' = v cos(h)        y' = v sin(h)        h' = (v / wheelbase) tan(delta)

integrated with a fixed 1 ms fourth-order step (trailing partial step for
odd segment lengths). The hot kernel lives in a compiled extension when the
build produced one, with a bit-identical pure-Python fallback; set
LPTVEHICLE_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

if os.environ.get("LPTVEHICLE_PURE_PYTHON") == "1":
    from . import _kinematics_py as _kernel
    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kinematics_cy as _kernel
        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _kinematics_py as _kernel
        KERNEL_BACKEND = "python"

STEP_US = 1000  # internal integration step


def wrap_heading(h: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    while h > math.pi:
        h -= 2.0 * math.pi
    while h <= -math.pi:
        h += 2.0 * math.pi
    return h


@dataclass(frozen=True)
class Pose:
    x_cm: float = 0.0
    y_cm: float = 0.0
    heading_rad: float = 0.0


class BicycleModel:
    def __init__(self, wheelbase_cm: float = 20.0, max_steering_deg: float = 45.0):
        if not wheelbase_cm > 0:
            raise ValueError("wheelbase must be positive")
        self.wheelbase_cm = wheelbase_cm
        self.max_steering_deg = max_steering_deg

    def integrate(self, pose: Pose, steering_deg: float, v_cm_s: float, dt_us: int) -> Pose:
        """Pose after dt_us of constant steering and speed."""
        if not (math.isfinite(steering_deg) and math.isfinite(v_cm_s)):
            raise ValueError("non-finite steering or velocity")
        if not (math.isfinite(pose.x_cm) and math.isfinite(pose.y_cm)
                and math.isfinite(pose.heading_rad)):
            raise ValueError("non-finite pose")
        if abs(steering_deg) > self.max_steering_deg:
            raise ValueError(
                f"steering {steering_deg} exceeds +/-{self.max_steering_deg} deg"
            )
        if dt_us <= 0:
            raise ValueError("dt must be positive")
        omega = v_cm_s / self.wheelbase_cm * math.tan(math.radians(steering_deg))
        x, y, h = _kernel.advance(
            pose.x_cm, pose.y_cm, pose.heading_rad, v_cm_s, omega, int(dt_us), STEP_US
        )
        return Pose(x, y, h)


@dataclass(frozen=True)
class TrajectorySample:
    t_us: int
    pose: Pose
    steering_deg: float
    drive: str  # F / B / S


CSV_HEADER = "t_us,x_cm,y_cm,heading_deg,steering_deg,drive"


class Trajectory:
    """Append-only, strictly time-ordered pose record with a stable CSV form."""

    def __init__(self):
        self.samples: list[TrajectorySample] = []

    def record(self, t_us: int, pose: Pose, steering_deg: float, drive: str) -> None:
        if self.samples and t_us <= self.samples[-1].t_us:
            raise ValueError(
                f"out-of-order sample: t={t_us} after t={self.samples[-1].t_us}"
            )
        if drive not in ("F", "B", "S"):
            raise ValueError(f"drive must be F/B/S, got {drive!r}")
        self.samples.append(TrajectorySample(t_us, pose, steering_deg, drive))

    def __len__(self) -> int:
        return len(self.samples)

    def to_csv(self) -> str:
        # repr() gives the shortest round-trip float form, so identical runs
        # serialize to identical bytes.
        lines = [CSV_HEADER]
        for s in self.samples:
            lines.append(
                f"{s.t_us},{s.pose.x_cm!r},{s.pose.y_cm!r},"
                f"{math.degrees(s.pose.heading_rad)!r},{s.steering_deg!r},{s.drive}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as f:
            f.write(self.to_csv())

    def final_pose(self) -> Optional[Pose]:
        return self.samples[-1].pose if self.samples else None
