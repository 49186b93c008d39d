// Wire types for the teleoperation service. The console renders snapshots
// verbatim; it never simulates vehicle or port behaviour on its own.

export type DriveState = "Forward" | "Backward" | "Stopped";

export type ApiKey = "UP" | "DOWN" | "LEFT" | "RIGHT" | "S" | "END";

export type KeyAction = "press" | "release";

export interface Pose {
  x_cm: number;
  y_cm: number;
  heading_deg: number;
}

export interface TraceRow {
  t_us: number;
  event: string;
  value: number;
}

export interface Snapshot {
  t_us: number;
  pose: Pose;
  steering_deg: number;
  drive: DriveState;
  phases: string;
  registers: { data: string; status: string; control: string };
  trace_tail: TraceRow[];
  timeout_flag: number;
  bytes_written: number;
  cycle_end_count: number;
  timeouts: number;
  ended: boolean;
}

export type ConnectionState = "connecting" | "live" | "down";

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null;
}

function isHexByte(v: unknown): boolean {
  return typeof v === "string" && /^0x[0-9a-fA-F]{1,2}$/.test(v);
}

/** Structural check for stream frames; anything failing it is a bad frame. */
export function isSnapshot(v: unknown): v is Snapshot {
  if (!isRecord(v)) return false;
  const pose = v["pose"];
  const regs = v["registers"];
  return (
    typeof v["t_us"] === "number" &&
    isRecord(pose) &&
    typeof pose["x_cm"] === "number" &&
    typeof pose["y_cm"] === "number" &&
    typeof pose["heading_deg"] === "number" &&
    typeof v["steering_deg"] === "number" &&
    (v["drive"] === "Forward" || v["drive"] === "Backward" || v["drive"] === "Stopped") &&
    typeof v["phases"] === "string" &&
    /^[01]{4}$/.test(v["phases"]) &&
    isRecord(regs) &&
    isHexByte(regs["data"]) &&
    isHexByte(regs["status"]) &&
    isHexByte(regs["control"]) &&
    Array.isArray(v["trace_tail"]) &&
    typeof v["timeout_flag"] === "number" &&
    typeof v["ended"] === "boolean"
  );
}
