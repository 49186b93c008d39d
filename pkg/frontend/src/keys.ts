// Keyboard capture: arrows drive and steer, S stops, End ends the session.
// Exactly one press is sent per physical hold; OS auto-repeat is dropped.

import type { ApiKey, KeyAction } from "./types";

export type KeySender = (key: ApiKey, action: KeyAction) => void;

interface KeyEventLike {
  key: string;
  repeat?: boolean;
  preventDefault?: () => void;
}

export function mapKey(event: KeyEventLike): ApiKey | null {
  switch (event.key) {
    case "ArrowUp":
      return "UP";
    case "ArrowDown":
      return "DOWN";
    case "ArrowLeft":
      return "LEFT";
    case "ArrowRight":
      return "RIGHT";
    case "s":
    case "S":
      return "S";
    case "End":
      return "END";
    default:
      return null;
  }
}

export class KeyboardController {
  private held = new Set<ApiKey>();
  private enabled = true;
  private locked = false;

  constructor(private readonly send: KeySender) {}

  /** Keys currently held, in insertion order. */
  heldKeys(): ApiKey[] {
    return [...this.held];
  }

  isEnabled(): boolean {
    return this.enabled && !this.locked;
  }

  /** Disconnected: ignore input until setEnabled(true). */
  setEnabled(on: boolean): void {
    this.enabled = on;
  }

  /** Session ended: drop held state without sending releases, stay off. */
  lock(): void {
    this.locked = true;
    this.held.clear();
  }

  keyDown(event: KeyEventLike): void {
    const key = mapKey(event);
    if (key === null) return;
    event.preventDefault?.();
    if (!this.isEnabled()) return;
    if (event.repeat || this.held.has(key)) return;
    if (key === "END") {
      // momentary: the session is over after the press, no release follows
      this.send(key, "press");
      return;
    }
    this.held.add(key);
    this.send(key, "press");
  }

  keyUp(event: KeyEventLike): void {
    const key = mapKey(event);
    if (key === null) return;
    event.preventDefault?.();
    if (!this.held.delete(key)) return;
    if (!this.isEnabled()) return;
    this.send(key, "release");
  }

  /** Send a release for everything held (stream drop, window blur). */
  releaseAll(): void {
    const held = [...this.held];
    this.held.clear();
    if (this.locked) return;
    for (const key of held) this.send(key, "release");
  }

  /** Bind to a window-like target; blur releases everything held. */
  attach(target: EventTarget): void {
    target.addEventListener("keydown", (e) => this.keyDown(e as KeyboardEvent));
    target.addEventListener("keyup", (e) => this.keyUp(e as KeyboardEvent));
    target.addEventListener("blur", () => this.releaseAll());
  }
}
