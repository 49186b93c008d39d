# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled integration kernel; bit-compatible twin of _kinematics_py.

Same fixed-step fourth-order scheme, same expression order; compiled with
contraction off so results match the pure-Python kernel double for double.
"""

from libc.math cimport cos, sin

cdef double PI = 3.141592653589793
cdef double TWO_PI = 6.283185307179586


cpdef tuple advance(double x, double y, double heading, double v, double omega,
                    long long dt_us, long long step_us=1000):
    """Advance (x, y, heading) by dt_us using fixed step_us internal steps."""
    cdef long long n = dt_us // step_us
    cdef long long rem = dt_us - n * step_us
    cdef double dt = step_us / 1000000.0
    cdef long long i
    cdef double h_mid, h_end, sx, sy
    for i in range(n):
        h_mid = heading + 0.5 * (omega * dt)
        h_end = heading + omega * dt
        sx = cos(heading) + 4.0 * cos(h_mid) + cos(h_end)
        sy = sin(heading) + 4.0 * sin(h_mid) + sin(h_end)
        x = x + v * dt * (sx / 6.0)
        y = y + v * dt * (sy / 6.0)
        heading = h_end
        while heading > PI:
            heading = heading - TWO_PI
        while heading <= -PI:
            heading = heading + TWO_PI
    if rem > 0:
        dt = rem / 1000000.0
        h_mid = heading + 0.5 * (omega * dt)
        h_end = heading + omega * dt
        sx = cos(heading) + 4.0 * cos(h_mid) + cos(h_end)
        sy = sin(heading) + 4.0 * sin(h_mid) + sin(h_end)
        x = x + v * dt * (sx / 6.0)
        y = y + v * dt * (sy / 6.0)
        heading = h_end
        while heading > PI:
            heading = heading - TWO_PI
        while heading <= -PI:
            heading = heading + TWO_PI
    return (x, y, heading)
