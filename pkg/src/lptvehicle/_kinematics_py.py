"""Pure-Python integration kernel; bit-compatible twin of _kinematics_cy.

Fourth-order fixed-step advance of the rear-axle bicycle model with constant
velocity v and heading rate omega over a segment. Because the heading evolves
linearly, classic RK4 collapses to Simpson weights on cos/sin of the heading;
the local error stays O(dt^5). Expressions here must match the Cython kernel
token for token: the two backends are required to produce identical doubles.
"""

from math import cos, sin

PI = 3.141592653589793
TWO_PI = 6.283185307179586


def advance(x: float, y: float, heading: float, v: float, omega: float,
            dt_us: int, step_us: int = 1000) -> tuple[float, float, float]:
    """Advance (x, y, heading) by dt_us using fixed step_us internal steps.

    The trailing partial step covers dt_us % step_us. Heading is wrapped to
    (-pi, pi] after every step.
    """
    n = dt_us // step_us
    rem = dt_us - n * step_us
    dt = step_us / 1000000.0
    for _ in range(n):
        x, y, heading = _step(x, y, heading, v, omega, dt)
    if rem > 0:
        dt = rem / 1000000.0
        x, y, heading = _step(x, y, heading, v, omega, dt)
    return (x, y, heading)


def _step(x, y, h, v, w, dt):
    h_mid = h + 0.5 * (w * dt)
    h_end = h + w * dt
    sx = cos(h) + 4.0 * cos(h_mid) + cos(h_end)
    sy = sin(h) + 4.0 * sin(h_mid) + sin(h_end)
    x = x + v * dt * (sx / 6.0)
    y = y + v * dt * (sy / 6.0)
    h = h_end
    while h > PI:
        h = h - TWO_PI
    while h <= -PI:
        h = h + TWO_PI
    return (x, y, h)
