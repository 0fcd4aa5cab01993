import type { GazeSamplePayload } from "./types.js";

export interface GazeSink {
  sendGaze(sessionId: string, samples: GazeSamplePayload[]): Promise<number>;
}

export const SAMPLE_INTERVAL_MS = 1000 / 60;
export const FLUSH_INTERVAL_MS = 500;

/**
 * Orders, batches, and ships gaze samples with one batch in flight at a time.
 *
 * Successful sends advance `lastAccepted`; every flush filters the pending
 * buffer to timestamps strictly beyond it, so a rejected or re-flushed batch
 * can never resend a timestamp the service already took.
 */
export class GazeStreamer {
  private pending: GazeSamplePayload[] = [];
  private inFlight = false;
  private lastAccepted = Number.NEGATIVE_INFINITY;
  private acceptedCount = 0;

  constructor(
    private readonly sink: GazeSink,
    private readonly sessionId: string,
  ) {}

  get accepted(): number {
    return this.acceptedCount;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  push(sample: GazeSamplePayload): void {
    const tail = this.pending[this.pending.length - 1];
    if (tail && sample.timestamp_ms < tail.timestamp_ms) {
      throw new Error("gaze samples must be pushed in timestamp order");
    }
    this.pending.push(sample);
  }

  /** Send everything buffered so far; resolves to the number of samples accepted. */
  async flush(): Promise<number> {
    if (this.inFlight) return 0;
    const batch = this.pending.filter((s) => s.timestamp_ms > this.lastAccepted);
    this.pending = [];
    if (batch.length === 0) return 0;
    this.inFlight = true;
    try {
      const accepted = await this.sink.sendGaze(this.sessionId, batch);
      this.lastAccepted = batch[batch.length - 1].timestamp_ms;
      this.acceptedCount += accepted;
      return accepted;
    } catch (err) {
      // resync: keep only samples the service cannot already hold
      this.pending = batch
        .filter((s) => s.timestamp_ms > this.lastAccepted)
        .concat(this.pending);
      throw err;
    } finally {
      this.inFlight = false;
    }
  }
}

/** Samples a cursor position at 60 Hz; `sample` is driven by a timer or a test clock. */
export class MouseGazeSource {
  constructor(
    private readonly streamer: GazeStreamer,
    private readonly position: () => { x: number; y: number },
  ) {}

  sample(timestampMs: number): void {
    const { x, y } = this.position();
    this.streamer.push({ timestamp_ms: timestampMs, x_px: x, y_px: y, valid: true });
  }

  /** Browser wiring: 60 Hz sampling and 500 ms flushing until stopped. */
  start(win: Window): () => void {
    let pos = { x: 0, y: 0 };
    const onMove = (e: MouseEvent) => {
      pos = { x: e.clientX, y: e.clientY };
    };
    const self = new MouseGazeSource(this.streamer, () => pos);
    win.addEventListener("mousemove", onMove);
    const t0 = win.performance.now();
    const sampler = win.setInterval(() => self.sample(win.performance.now() - t0), SAMPLE_INTERVAL_MS);
    const flusher = win.setInterval(() => void this.streamer.flush().catch(() => {}), FLUSH_INTERVAL_MS);
    return () => {
      win.removeEventListener("mousemove", onMove);
      win.clearInterval(sampler);
      win.clearInterval(flusher);
    };
  }
}

/**
 * Timed playback of a recorded gaze log: samples are grouped into windows of
 * `batchMs` of log time and sent sequentially, byte-for-byte as recorded.
 */
export async function replayGazeLog(
  sink: GazeSink,
  sessionId: string,
  samples: GazeSamplePayload[],
  batchMs: number = FLUSH_INTERVAL_MS,
): Promise<number> {
  let accepted = 0;
  let batch: GazeSamplePayload[] = [];
  let windowStart = samples.length ? samples[0].timestamp_ms : 0;
  for (const s of samples) {
    if (s.timestamp_ms < windowStart) {
      throw new Error("gaze log is not in timestamp order");
    }
    if (s.timestamp_ms - windowStart >= batchMs && batch.length > 0) {
      accepted += await sink.sendGaze(sessionId, batch);
      batch = [];
      windowStart = s.timestamp_ms;
    }
    batch.push(s);
  }
  if (batch.length > 0) {
    accepted += await sink.sendGaze(sessionId, batch);
  }
  return accepted;
}
