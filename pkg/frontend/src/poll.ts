/** Polling utilities: at most one request in flight per endpoint, and
 * stale responses (from requests issued before the latest one) dropped. */

/** Wrap an async task so overlapping invocations are skipped: while a call
 * is in flight, further calls resolve immediately to undefined. */
export function singleFlight<T>(task: () => Promise<T>): () => Promise<T | undefined> {
  let inFlight = false;
  return async () => {
    if (inFlight) return undefined;
    inFlight = true;
    try {
      return await task();
    } finally {
      inFlight = false;
    }
  };
}

/** Orders overlapping request/response pairs: responses for anything but
 * the most recently issued token are stale and must be dropped. */
export class LatestGate {
  private issued = 0;

  begin(): number {
    return ++this.issued;
  }

  accept(token: number): boolean {
    return token === this.issued;
  }
}

/** Fixed-period repetition of an async task, with the single-flight guard
 * so a slow response never stacks up behind the next interval. */
export class Poller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly fire: () => Promise<unknown>;

  constructor(
    task: () => Promise<unknown>,
    readonly periodMs: number,
  ) {
    this.fire = singleFlight(task);
  }

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) return;
    void this.fire();
    this.timer = setInterval(() => void this.fire(), this.periodMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
