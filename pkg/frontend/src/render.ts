// DOM rendering. Everything shown is read from the latest snapshot in the
// view model; the only computation here is presentation (hex to bits, pin
// inversion legend, world-to-screen transform for the track plot).

import type { Snapshot, TraceRow } from "./types";
import type { ConsoleViewModel } from "./viewmodel";

export const PX_PER_CM = 2;
export const VEHICLE_LENGTH_CM = 35.5;
export const VEHICLE_WIDTH_CM = 14.1;

interface PinSpec {
  bit: number;
  label: string;
  inverted: boolean; // register bit is the complement of the wire level
}

// Control register: bits 0, 1 and 3 appear inverted on the connector.
export const CONTROL_PINS: PinSpec[] = [
  { bit: 0, label: "nStrobe", inverted: true },
  { bit: 1, label: "nAutoFeed", inverted: true },
  { bit: 2, label: "nInit", inverted: false },
  { bit: 3, label: "nSelectIn", inverted: true },
];

// Status register: busy is the one inverted input; bit 0 is the EPP 1.9
// timeout flag, not a pin.
export const STATUS_PINS: PinSpec[] = [
  { bit: 0, label: "TMOUT", inverted: false },
  { bit: 3, label: "nError", inverted: false },
  { bit: 4, label: "select", inverted: false },
  { bit: 5, label: "paperOut", inverted: false },
  { bit: 6, label: "nAck", inverted: false },
  { bit: 7, label: "busy", inverted: true },
];

export const DATA_PINS: PinSpec[] = Array.from({ length: 8 }, (_, i) => ({
  bit: 7 - i,
  label: `D${7 - i}`,
  inverted: false,
}));

export interface ConsoleElements {
  connection: HTMLElement;
  banner: HTMLElement;
  badge: HTMLElement;
  clock: HTMLElement;
  drive: HTMLElement;
  poseX: HTMLElement;
  poseY: HTMLElement;
  poseHeading: HTMLElement;
  steeringNeedle: HTMLElement;
  steeringReadout: HTMLElement;
  lamps: HTMLElement[]; // A, B, C, D
  regData: HTMLElement;
  regStatus: HTMLElement;
  regControl: HTMLElement;
  pinRows: Array<{ spec: PinSpec; node: HTMLElement; from: "data" | "status" | "control" }>;
  trace: HTMLElement;
  counters: HTMLElement;
  track: HTMLCanvasElement | null;
}

function need(root: Document, id: string): HTMLElement {
  const el = root.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function buildPinRow(
  root: Document,
  host: HTMLElement,
  specs: PinSpec[],
  from: "data" | "status" | "control",
): ConsoleElements["pinRows"] {
  const rows: ConsoleElements["pinRows"] = [];
  for (const spec of specs) {
    const node = root.createElement("span");
    node.className = "pin" + (spec.inverted ? " inv" : "");
    node.dataset["pin"] = spec.label;
    node.textContent = (spec.inverted ? "¬" : "") + spec.label;
    host.appendChild(node);
    rows.push({ spec, node, from });
  }
  return rows;
}

/** Resolve all console elements and build the per-pin lamp nodes. */
export function initConsoleDom(root: Document): ConsoleElements {
  const lamps = ["lamp-a", "lamp-b", "lamp-c", "lamp-d"].map((id) => need(root, id));
  const pinRows = [
    ...buildPinRow(root, need(root, "pins-data"), DATA_PINS, "data"),
    ...buildPinRow(root, need(root, "pins-status"), STATUS_PINS, "status"),
    ...buildPinRow(root, need(root, "pins-control"), CONTROL_PINS, "control"),
  ];
  const track = root.getElementById("track");
  return {
    connection: need(root, "connection"),
    banner: need(root, "banner"),
    badge: need(root, "badge"),
    clock: need(root, "clock"),
    drive: need(root, "drive"),
    poseX: need(root, "pose-x"),
    poseY: need(root, "pose-y"),
    poseHeading: need(root, "pose-heading"),
    steeringNeedle: need(root, "steering-needle"),
    steeringReadout: need(root, "steering-readout"),
    lamps,
    regData: need(root, "reg-data"),
    regStatus: need(root, "reg-status"),
    regControl: need(root, "reg-control"),
    pinRows,
    trace: need(root, "trace"),
    counters: need(root, "counters"),
    track: track instanceof HTMLCanvasElement ? track : null,
  };
}

function renderTrace(host: HTMLElement, rows: TraceRow[], doc: Document): void {
  host.textContent = "";
  for (const row of rows) {
    const line = doc.createElement("div");
    line.className = "trace-row" + (row.event === "TIMEOUT" ? " timeout" : "");
    line.textContent = `${row.t_us} ${row.event} 0x${row.value
      .toString(16)
      .padStart(2, "0")}`;
    host.appendChild(line);
  }
  host.scrollTop = host.scrollHeight;
}

function canvas2d(track: HTMLCanvasElement): CanvasRenderingContext2D | null {
  try {
    return track.getContext("2d");
  } catch {
    return null; // test DOM without canvas support
  }
}

function renderTrack(
  track: HTMLCanvasElement,
  snapshot: Snapshot,
  trail: Array<{ x: number; y: number }>,
): void {
  const ctx = canvas2d(track);
  if (!ctx) return;
  const w = track.width;
  const h = track.height;
  const s = PX_PER_CM;
  const vx = snapshot.pose.x_cm;
  const vy = snapshot.pose.y_cm;
  // auto-pan: the vehicle stays at the canvas centre
  const toScreen = (x: number, y: number): [number, number] => [
    w / 2 + (x - vx) * s,
    h / 2 - (y - vy) * s,
  ];
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#4a8";
  ctx.lineWidth = 1;
  ctx.beginPath();
  trail.forEach((p, i) => {
    const [sx, sy] = toScreen(p.x, p.y);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.stroke();

  const heading = (snapshot.pose.heading_deg * Math.PI) / 180;
  ctx.save();
  ctx.translate(w / 2, h / 2);
  ctx.rotate(-heading);
  const lenPx = VEHICLE_LENGTH_CM * s;
  const widPx = VEHICLE_WIDTH_CM * s;
  ctx.strokeStyle = "#dde";
  ctx.lineWidth = 2;
  // pose is the rear axle midpoint; the body extends mostly forward
  ctx.strokeRect(-lenPx * 0.25, -widPx / 2, lenPx, widPx);
  ctx.beginPath();
  ctx.moveTo(0, 0);
  ctx.lineTo(lenPx * 0.6, 0);
  ctx.lineTo(lenPx * 0.5, -widPx * 0.15);
  ctx.moveTo(lenPx * 0.6, 0);
  ctx.lineTo(lenPx * 0.5, widPx * 0.15);
  ctx.stroke();
  ctx.restore();
}

/** Paint the whole console from the view model. */
export function render(vm: ConsoleViewModel, els: ConsoleElements): void {
  els.connection.textContent = vm.connection;
  els.connection.dataset["state"] = vm.connection;
  els.badge.hidden = !vm.badFrame;
  els.banner.hidden = !vm.ended;

  const snap = vm.snapshot;
  if (!snap) return; // nothing received yet: leave the placeholders

  els.clock.textContent = (snap.t_us / 1e6).toFixed(3) + " s";
  els.drive.textContent = snap.drive;
  els.poseX.textContent = snap.pose.x_cm.toFixed(1);
  els.poseY.textContent = snap.pose.y_cm.toFixed(1);
  els.poseHeading.textContent = snap.pose.heading_deg.toFixed(1);
  els.steeringReadout.textContent = snap.steering_deg.toFixed(1) + "°";
  els.steeringNeedle.style.transform = `rotate(${snap.steering_deg}deg)`;

  for (let i = 0; i < 4; i++) {
    els.lamps[i]?.classList.toggle("on", snap.phases[i] === "1");
  }

  els.regData.textContent = snap.registers.data;
  els.regStatus.textContent = snap.registers.status;
  els.regControl.textContent = snap.registers.control;
  for (const { spec, node, from } of els.pinRows) {
    const value = parseInt(snap.registers[from], 16);
    const bit = (value >> spec.bit) & 1;
    const level = spec.inverted ? 1 - bit : bit;
    node.classList.toggle("on", level === 1);
  }

  renderTrace(els.trace, snap.trace_tail, els.trace.ownerDocument);
  els.counters.textContent =
    `bytes ${snap.bytes_written}  cycles ${snap.cycle_end_count}` +
    `  timeouts ${snap.timeouts}`;

  if (els.track) renderTrack(els.track, snap, vm.trail);
}
