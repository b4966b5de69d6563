import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { RateLimiter } from "../src/throttle";

describe("RateLimiter", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  function pushBurst(limiter: RateLimiter, values: number[], gapMs: number): number[] {
    const sent: number[] = [];
    for (const v of values) {
      limiter.push(() => sent.push(v));
      vi.advanceTimersByTime(gapMs);
    }
    return sent;
  }

  it("caps a pointermove flood at 20 per second", () => {
    const limiter = new RateLimiter(20, () => Date.now());
    // 120 moves over one second (8ms apart, a 120 Hz mouse)
    const sent = pushBurst(limiter, Array.from({ length: 120 }, (_, i) => i), 8.34);
    vi.runAllTimers();
    expect(sent.length).toBeLessThanOrEqual(21); // 20/s + the trailing slot
    expect(sent.length).toBeGreaterThanOrEqual(19);
  });

  it("always delivers the newest suppressed value (trailing edge)", () => {
    const limiter = new RateLimiter(20, () => Date.now());
    const sent: number[] = [];
    limiter.push(() => sent.push(1)); // immediate
    limiter.push(() => sent.push(2)); // suppressed
    limiter.push(() => sent.push(3)); // replaces 2
    expect(sent).toEqual([1]);
    vi.advanceTimersByTime(60);
    expect(sent).toEqual([1, 3]); // 2 was dropped, the final pose was not
  });

  it("first push of a fresh burst goes out immediately", () => {
    const limiter = new RateLimiter(20, () => Date.now());
    const sent: number[] = [];
    limiter.push(() => sent.push(1));
    expect(sent).toEqual([1]);
    vi.advanceTimersByTime(1000);
    limiter.push(() => sent.push(2));
    expect(sent).toEqual([1, 2]);
  });

  it("cancel drops the pending trailing send", () => {
    const limiter = new RateLimiter(20, () => Date.now());
    const sent: number[] = [];
    limiter.push(() => sent.push(1));
    limiter.push(() => sent.push(2));
    limiter.cancel();
    vi.advanceTimersByTime(1000);
    expect(sent).toEqual([1]);
  });

  it("spaces consecutive sends by at least the interval", () => {
    const limiter = new RateLimiter(20, () => Date.now());
    const stamps: number[] = [];
    for (let i = 0; i < 40; i++) {
      limiter.push(() => stamps.push(Date.now()));
      vi.advanceTimersByTime(13);
    }
    vi.runAllTimers();
    for (let i = 1; i < stamps.length; i++) {
      expect(stamps[i] - stamps[i - 1]).toBeGreaterThanOrEqual(50);
    }
  });
});
