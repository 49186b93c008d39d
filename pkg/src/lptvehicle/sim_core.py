"""Deterministic discrete-event core: an integer-microsecond virtual clock.

Every other part of the simulator advances only through a :class:`Simulator`.
Time is purely virtual; wall-clock pacing, when wanted, is layered on top by
the service and never leaks in here. Events due at the same microsecond fire
in insertion order, which makes runs reproducible.
"""

from __future__ import annotations

import heapq
from typing import Any, Callable


class SimTimeError(ValueError):
    """Raised for negative delays or attempts to move the clock backwards."""


class Simulator:
    """Virtual clock plus event queue, 1 us resolution.

    Handlers are plain callables invoked as ``target(payload)`` with the
    clock already set to the event's due time. The instance has a single
    logical owner; it is not safe for concurrent mutation.
    """

    def __init__(self):
        self._now = 0
        self._heap: list[tuple[int, int, Callable[[Any], None], Any]] = []
        self._next_seq = 0
        self._cancelled: set[int] = set()

    def now(self) -> int:
        """Current virtual time in microseconds."""
        return self._now

    def schedule(self, delay_us: int, target: Callable[[Any], None], payload: Any = None) -> int:
        """Queue ``target(payload)`` to fire ``delay_us`` from now.

        Returns an event id usable with :meth:`cancel` until the event fires.
        """
        delay_us = int(delay_us)
        if delay_us < 0:
            raise SimTimeError(f"negative delay: {delay_us}")
        seq = self._next_seq
        self._next_seq += 1
        heapq.heappush(self._heap, (self._now + delay_us, seq, target, payload))
        return seq

    def cancel(self, event_id: int) -> None:
        """Prevent a pending event from firing. Cancelling twice, or after
        the event fired, is a no-op."""
        self._cancelled.add(event_id)

    def advance_until(self, t_us: int) -> int:
        """Fire every event with due <= t_us in (due, seq) order.

        The clock ends exactly at ``t_us`` even if no event was due. Events
        scheduled by handlers are fired too when they fall inside the window.
        Returns the number of events fired.
        """
        t_us = int(t_us)
        if t_us < self._now:
            raise SimTimeError(f"cannot rewind clock: {t_us} < {self._now}")
        fired = 0
        while self._heap and self._heap[0][0] <= t_us:
            if self._fire_next():
                fired += 1
        self._now = t_us
        return fired

    def advance_by(self, dt_us: int) -> int:
        """Convenience wrapper: ``advance_until(now() + dt_us)``."""
        if dt_us < 0:
            raise SimTimeError(f"negative advance: {dt_us}")
        return self.advance_until(self._now + int(dt_us))

    def run_next(self) -> bool:
        """Fire the single earliest pending event, jumping the clock to its
        due time. Returns False when the queue is empty. Used by code that
        must block in virtual time until some state change (the EPP engine).
        """
        while self._heap:
            if self._fire_next():
                return True
        return False

    def pending(self) -> int:
        """Number of queued, not-yet-cancelled events."""
        return sum(1 for (_, seq, _, _) in self._heap if seq not in self._cancelled)

    def _fire_next(self) -> bool:
        due, seq, target, payload = heapq.heappop(self._heap)
        if seq in self._cancelled:
            self._cancelled.discard(seq)
            return False
        self._now = due
        target(payload)
        return True
