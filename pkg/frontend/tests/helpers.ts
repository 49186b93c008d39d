// Shared test fixtures: the real page markup and snapshot builders.

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import type { Snapshot } from "../src/types";

/** Body of the real index.html, scripts stripped, for jsdom injection. */
export function pageBodyHtml(): string {
  const dir = path.dirname(fileURLToPath(import.meta.url));
  const html = readFileSync(path.join(dir, "..", "index.html"), "utf8");
  const match = /<body>([\s\S]*)<\/body>/.exec(html);
  if (!match || !match[1]) throw new Error("index.html has no body");
  return match[1].replace(/<script[\s\S]*?<\/script>/g, "");
}

export function makeSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    t_us: 0,
    pose: { x_cm: 0, y_cm: 0, heading_deg: 0 },
    steering_deg: 0,
    drive: "Stopped",
    phases: "1010",
    registers: { data: "0x00", status: "0xd8", control: "0x04" },
    trace_tail: [],
    timeout_flag: 0,
    bytes_written: 0,
    cycle_end_count: 0,
    timeouts: 0,
    ended: false,
    ...overrides,
  };
}

/** Poll until cond() holds; throws when it never does. */
export async function until(cond: () => boolean, ms = 3000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!cond()) {
    if (Date.now() > deadline) throw new Error("condition never held");
    await new Promise((resolve) => setTimeout(resolve, 2));
  }
}
