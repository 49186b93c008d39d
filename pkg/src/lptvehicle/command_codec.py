"""Keyboard-command mapping and path-script parsing.

Key tokens arrive pre-named (UP, DOWN, LEFT, RIGHT, S, END); scan-code
handling is the front end's problem. Scripts are line oriented:

    # comment
    FORWARD 2.0
    LEFT 0.5
    STOP 0.25
    END

one ``VERB seconds`` step per line, verbs case-insensitive, durations
strictly positive, terminated by exactly one END.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .vehicle_unit import DRIVE_FWD, DRIVE_REV, STEP_DIR, STEP_EN


class Command(Enum):
    FORWARD = "FORWARD"
    BACKWARD = "BACKWARD"
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    STOP = "STOP"
    END = "END"


_ARROW_KEYS = {
    "UP": Command.FORWARD,
    "DOWN": Command.BACKWARD,
    "LEFT": Command.LEFT,
    "RIGHT": Command.RIGHT,
}


class UnknownKeyError(ValueError):
    def __init__(self, token: str):
        super().__init__(f"unknown key token: {token!r}")
        self.token = token


def key_to_command(token: str) -> Command:
    """UP/DOWN/LEFT/RIGHT plus S and END (the latter two case-insensitive)."""
    if token in _ARROW_KEYS:
        return _ARROW_KEYS[token]
    upper = token.upper()
    if upper == "S":
        return Command.STOP
    if upper == "END":
        return Command.END
    raise UnknownKeyError(token)


def command_to_control_word(cmd: Command, held: bool = True) -> int:
    """The wire byte a command contributes.

    LEFT/RIGHT are press-and-hold: held=True enables the stepper clock with
    the matching direction, held=False contributes nothing (the caller keeps
    its drive bits). END never goes on the wire.
    """
    if cmd is Command.END:
        raise ValueError("END is session control, not a wire byte")
    if cmd is Command.FORWARD:
        return DRIVE_FWD
    if cmd is Command.BACKWARD:
        return DRIVE_REV
    if cmd is Command.STOP:
        return 0x00
    if not held:
        return 0x00
    if cmd is Command.LEFT:
        return STEP_EN
    return STEP_EN | STEP_DIR  # RIGHT: clockwise


class ScriptError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class PathStep:
    command: Command
    seconds: float


@dataclass(frozen=True)
class PathProgram:
    steps: tuple[PathStep, ...]

    def render(self) -> str:
        lines = [f"{s.command.value} {s.seconds!r}" for s in self.steps]
        lines.append("END")
        return "\n".join(lines) + "\n"

    @property
    def duration_s(self) -> float:
        return sum(s.seconds for s in self.steps)


_STEP_VERBS = {c.value: c for c in Command if c is not Command.END}
_LINE_RE = re.compile(r"^(\s*)(\S+)(?:(\s+)(\S+))?\s*(\S.*)?$")


def parse_script(text: str) -> PathProgram:
    """Parse script text into a PathProgram; raises ScriptError with position."""
    steps: list[PathStep] = []
    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE_RE.match(raw)
        indent, word, _, arg, extra = m.groups()
        col = len(indent) + 1
        if ended:
            raise ScriptError("content after END", lineno, col)
        verb = word.upper()
        if verb == "END":
            if arg is not None:
                raise ScriptError("END takes no argument", lineno, col + len(word) + 1)
            ended = True
            continue
        if verb not in _STEP_VERBS:
            raise ScriptError(f"unknown verb {word!r}", lineno, col)
        if arg is None:
            raise ScriptError(f"{verb} needs a duration in seconds", lineno, col)
        arg_col = raw.index(arg, len(indent) + len(word)) + 1
        try:
            seconds = float(arg)
        except ValueError:
            raise ScriptError(f"bad duration {arg!r}", lineno, arg_col) from None
        if not math.isfinite(seconds) or seconds <= 0:
            raise ScriptError(f"duration must be > 0, got {arg}", lineno, arg_col)
        if extra is not None:
            extra_col = raw.index(extra, arg_col + len(arg) - 1) + 1
            raise ScriptError(f"unexpected trailing text {extra!r}", lineno, extra_col)
        steps.append(PathStep(_STEP_VERBS[verb], seconds))
    if not ended:
        raise ScriptError("missing END", lineno if text.splitlines() else 1)
    return PathProgram(tuple(steps))
