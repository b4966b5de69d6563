/**
 * Latest-wins state buffer between the socket and the render loop.
 *
 * Broadcasts arrive at 20 Hz; rendering runs on requestAnimationFrame. If a
 * frame is late, intermediate states are dropped rather than queued, so the
 * scene always reflects exactly one whole StateMessage and never lags behind
 * a backlog.
 */

import type { Barrier, StateMessage } from "./protocol";

export class StateStore {
  private applied: StateMessage | null = null;
  private incoming: StateMessage | null = null;
  private appliedAt = 0;

  /** Socket side: stash the newest broadcast. */
  push(msg: StateMessage): void {
    this.incoming = msg;
  }

  /**
   * Render side: adopt the newest pending broadcast, if any. Returns the
   * newly applied state, or null when nothing new arrived since last call.
   */
  applyLatest(now: number = performance.now()): StateMessage | null {
    if (this.incoming === null) return null;
    this.applied = this.incoming;
    this.incoming = null;
    this.appliedAt = now;
    return this.applied;
  }

  get current(): StateMessage | null {
    return this.applied;
  }

  /** Timestamp of the last applyLatest that adopted a message. */
  get lastApplied(): number {
    return this.appliedAt;
  }

  barrier(id: string): Barrier | null {
    const st = this.applied;
    if (!st) return null;
    for (const b of st.barriers.items) if (b.id === id) return b;
    return null;
  }

  get person(): Barrier | null {
    const st = this.applied;
    if (!st) return null;
    for (const b of st.barriers.items) if (b.kind === "person") return b;
    return null;
  }
}
