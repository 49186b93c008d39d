"""Command-line front end: script runs, the HTTP server, and hardware checks."""

from __future__ import annotations

import argparse
import sys
import time

from .command_codec import ScriptError, parse_script
from .lpt_port import EppMode, EppStallError, LptPort, PortConfig, StubPeripheral
from .session import DriveSession, SessionConfig
from .sim_core import Simulator
from .vehicle_unit import format_pattern, step_sequence


def _cmd_run(args) -> int:
    try:
        with open(args.script) as f:
            text = f.read()
    except OSError as err:
        print(f"cannot read script: {err}", file=sys.stderr)
        return 2
    try:
        program = parse_script(text)
    except ScriptError as err:
        print(f"script error: {err}", file=sys.stderr)
        return 2

    session = DriveSession(SessionConfig())
    pacer = None
    if args.pace != "max":
        try:
            factor = float(args.pace)
        except ValueError:
            print(f"--pace must be 'max' or a positive number, got {args.pace!r}",
                  file=sys.stderr)
            return 2
        if factor <= 0:
            print("--pace factor must be positive", file=sys.stderr)
            return 2
        anchor_wall = time.monotonic()
        anchor_sim = session.sim.now()

        def pacer(target_us: int) -> None:
            wall_target = anchor_wall + (target_us - anchor_sim) / 1_000_000 / factor
            delay = wall_target - time.monotonic()
            if delay > 0:
                time.sleep(delay)

    report = session.run_script(program, pacer=pacer)
    session.trajectory.write_csv(args.out)
    print(f"virtual time: {report.total_time_us} us")
    print(f"bytes written: {report.bytes_written}")
    print(f"epp cycles completed: {report.cycle_end_count}")
    print(f"timeouts: {report.timeouts}")
    print(f"samples: {report.samples}")
    print(f"trajectory: {args.out}")
    if report.aborted:
        print(f"aborted: {report.reason}", file=sys.stderr)
        return 1
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import PaceConfig, create_app

    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"--listen must be HOST:PORT, got {args.listen!r}", file=sys.stderr)
        return 2
    pace = PaceConfig()
    if args.pace == "max":
        pace.mode = "max"
    elif args.pace is not None:
        try:
            pace.factor = float(args.pace)
            pace.validate()
        except ValueError as err:
            print(f"--pace: {err}", file=sys.stderr)
            return 2
    app = create_app(pace=pace, static_dir=args.static)
    uvicorn.run(app, host=host, port=int(port_text), log_level="info")
    return 0


def _cmd_steps(args) -> int:
    try:
        start = tuple(int(c) for c in args.start)
        patterns = step_sequence(args.dir == "cw", args.count, start)  # type: ignore[arg-type]
    except ValueError as err:
        print(f"steps: {err}", file=sys.stderr)
        return 2
    for pattern in patterns:
        print(format_pattern(pattern))
    return 0


def _cmd_conformance(args) -> int:
    mode = EppMode.EPP_1_7 if args.mode == "epp17" else EppMode.EPP_1_9
    sim = Simulator()
    port = LptPort(sim, PortConfig(epp_mode=mode))
    port.attach(StubPeripheral(respond=not args.stuck_peripheral))

    if args.stuck_peripheral and mode is EppMode.EPP_1_7:
        try:
            port.epp_data_write(0xA5, budget_us=100)
            print("FAIL")  # a stuck 1.7 cycle must stall, not complete
            return 1
        except EppStallError as err:
            print(err.trace.format_text())
            conformant = port.epp_timeout_flag == 0  # 1.7 has no status flag
    else:
        trace = port.epp_data_write(0xA5)
        print(trace.format_text())
        if args.stuck_peripheral:
            conformant = trace.timed_out and port.epp_timeout_flag == 1
        else:
            conformant = trace.ok and port.epp_timeout_flag == 0

    print("PASS" if conformant else "FAIL")
    return 0 if conformant else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lptvehicle",
        description="Parallel-port guided vehicle simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a path script and write the trajectory")
    p_run.add_argument("--script", required=True, help="path script file")
    p_run.add_argument("--out", required=True, help="trajectory CSV output path")
    p_run.add_argument("--pace", default="max",
                       help="'max' (default) or real-time factor, e.g. 1.0")
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--listen", default="127.0.0.1:8000", help="HOST:PORT")
    p_serve.add_argument("--pace", default=None,
                         help="'max' or real-time factor (default 1.0)")
    p_serve.add_argument("--static", default=None,
                         help="directory of UI files to serve at /")
    p_serve.set_defaults(func=_cmd_serve)

    p_steps = sub.add_parser("steps", help="print stepper phase patterns")
    p_steps.add_argument("--dir", choices=("cw", "ccw"), required=True)
    p_steps.add_argument("--count", type=int, required=True)
    p_steps.add_argument("--start", default="1010", help="ABCD start pattern")
    p_steps.set_defaults(func=_cmd_steps)

    p_conf = sub.add_parser("conformance", help="run an EPP handshake check")
    p_conf.add_argument("--mode", choices=("epp17", "epp19"), required=True)
    p_conf.add_argument("--stuck-peripheral", action="store_true",
                        help="peripheral never answers on nWait")
    p_conf.set_defaults(func=_cmd_conformance)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
