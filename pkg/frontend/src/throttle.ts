/**
 * Rate limiter for interaction streams (gizmo drags, person moves).
 *
 * Contract: at most maxPerSec sends per second, the first push in a burst
 * goes out immediately, and the newest suppressed payload is always
 * delivered at the next slot boundary (trailing edge). Dropping the final
 * value of a drag would leave the server on a stale pose, so only
 * intermediate values are discarded.
 */

export class RateLimiter {
  private lastSent = -Infinity;
  private trailing: (() => void) | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly maxPerSec = 20,
    private readonly clock: () => number = () => performance.now(),
  ) {}

  private get intervalMs(): number {
    return 1000 / this.maxPerSec;
  }

  push(send: () => void): void {
    const now = this.clock();
    const due = this.lastSent + this.intervalMs;
    if (now >= due) {
      this.lastSent = now;
      send();
      return;
    }
    this.trailing = send;
    if (this.timer === null) {
      this.timer = setTimeout(() => this.fireTrailing(), due - now);
    }
  }

  private fireTrailing(): void {
    this.timer = null;
    const send = this.trailing;
    this.trailing = null;
    if (send) {
      this.lastSent = this.clock();
      send();
    }
  }

  /** Drop any pending trailing send (e.g. gesture cancelled). */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.trailing = null;
  }
}
