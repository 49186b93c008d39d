// View state: the latest good snapshot plus connection, error badge,
// session flag and the breadcrumb trail. No vehicle or port logic lives
// here; frames are either adopted verbatim or rejected whole.

import type { ConnectionState, Snapshot } from "./types";
import { isSnapshot } from "./types";

export const TRAIL_LIMIT = 4000;

export class ConsoleViewModel {
  snapshot: Snapshot | null = null;
  connection: ConnectionState = "connecting";
  badFrame = false;
  ended = false;
  trail: Array<{ x: number; y: number }> = [];

  /**
   * Adopt a frame if it is well formed and not older than the current one.
   * A malformed frame keeps the last good snapshot and raises the badge.
   */
  applyFrame(raw: unknown): boolean {
    if (!isSnapshot(raw)) {
      this.badFrame = true;
      return false;
    }
    if (this.snapshot && raw.t_us < this.snapshot.t_us) return false;
    this.badFrame = false;
    this.snapshot = raw;
    if (raw.ended) this.ended = true;
    const last = this.trail[this.trail.length - 1];
    if (!last || last.x !== raw.pose.x_cm || last.y !== raw.pose.y_cm) {
      this.trail.push({ x: raw.pose.x_cm, y: raw.pose.y_cm });
      if (this.trail.length > TRAIL_LIMIT) this.trail.shift();
    }
    return true;
  }

  /** Connection changes touch nothing but the connection field. */
  setConnection(state: ConnectionState): void {
    this.connection = state;
  }
}
