// Orchestration: keyboard events out, snapshots in, one render per change.
// Holds no vehicle state of its own; the service is the source of truth.

import { ApiClient, ApiError, StreamController } from "./api";
import { KeyboardController } from "./keys";
import type { ApiKey, ConnectionState, KeyAction } from "./types";
import { isSnapshot } from "./types";
import { ConsoleViewModel } from "./viewmodel";

export class Console {
  readonly vm = new ConsoleViewModel();
  readonly keys: KeyboardController;
  readonly stream: StreamController;

  constructor(
    private readonly api: ApiClient,
    private readonly paint: (vm: ConsoleViewModel) => void,
    streamIntervalMs = 50,
    retryMs = 1000,
    sleep?: (ms: number) => Promise<void>,
  ) {
    this.keys = new KeyboardController((key, action) => {
      void this.sendKey(key, action);
    });
    this.stream = new StreamController(
      api,
      {
        onFrame: (frame, bad) => this.acceptFrame(bad ? undefined : frame),
        onState: (state) => this.connectionChanged(state),
      },
      streamIntervalMs,
      retryMs,
      sleep,
    );
  }

  /** Fetch the current state once, then follow the stream until stopped. */
  async start(): Promise<void> {
    try {
      this.acceptFrame(await this.api.getState());
    } catch {
      // the stream loop will report the connection state
    }
    await this.stream.run();
  }

  stop(): void {
    this.stream.stop();
  }

  private async sendKey(key: ApiKey, action: KeyAction): Promise<void> {
    try {
      const res = await this.api.postKey(key, action);
      if (res && isSnapshot(res.snapshot)) this.acceptFrame(res.snapshot);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // session already over on the service side
        this.vm.ended = true;
        this.keys.lock();
        this.paint(this.vm);
      }
      // other failures: the stream will reflect reality soon enough
    }
  }

  private acceptFrame(frame: unknown): void {
    this.vm.applyFrame(frame);
    if (this.vm.ended) this.keys.lock();
    this.paint(this.vm);
  }

  private connectionChanged(state: ConnectionState): void {
    this.vm.setConnection(state);
    if (state === "down") {
      // stateless across reconnects: held keys are released on disconnect
      this.keys.releaseAll();
    }
    this.keys.setEnabled(state === "live");
    this.paint(this.vm);
  }
}
