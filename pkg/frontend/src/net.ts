/**
 * WebSocket client: request-id issuance, response correlation, reconnect.
 *
 * Commands are fire-with-callback; every server response carries our
 * request_id back, so a simple map suffices. State broadcasts bypass this
 * entirely and land in the StateStore.
 */

import {
  isResponse,
  isState,
  parseServerMessage,
  serialize,
  type CommandMessage,
  type RequestId,
  type ResponseMessage,
} from "./protocol";
import type { StateStore } from "./state";

export type ResponseHandler = (resp: ResponseMessage) => void;

export class Gateway {
  private ws: WebSocket | null = null;
  private seq = 0;
  private pending = new Map<RequestId, ResponseHandler>();
  private closed = false;
  private retryMs = 500;

  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  constructor(
    private readonly url: string,
    private readonly store: StateStore,
    private readonly onError: (code: string, detail: string) => void,
  ) {}

  connect(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = 500;
      this.onOpen?.();
    };
    ws.onmessage = (ev) => this.handleFrame(String(ev.data));
    ws.onclose = () => {
      this.pending.clear();
      this.onClose?.();
      if (!this.closed) {
        setTimeout(() => this.connect(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 5000);
      }
    };
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  private handleFrame(text: string): void {
    const msg = parseServerMessage(text);
    if (msg === null) {
      console.warn("unparseable server frame", text.slice(0, 200));
      return;
    }
    if (isState(msg)) {
      this.store.push(msg);
      return;
    }
    if (isResponse(msg) && msg.request_id !== null) {
      const handler = this.pending.get(msg.request_id);
      this.pending.delete(msg.request_id);
      if (handler) {
        handler(msg);
      } else if (msg.error) {
        this.onError(msg.error.code, msg.error.detail);
      }
    }
  }

  /**
   * Send one command. The builder receives a fresh request id; the optional
   * handler sees the matched response. Without a handler, errors fall
   * through to the global toast hook.
   */
  send(
    build: (id: RequestId) => CommandMessage,
    onResponse?: ResponseHandler,
  ): RequestId | null {
    if (!this.connected || this.ws === null) return null;
    const id = `ui-${++this.seq}`;
    const msg = build(id);
    this.pending.set(id, (resp) => {
      if (onResponse) onResponse(resp);
      else if (resp.error) this.onError(resp.error.code, resp.error.detail);
    });
    this.ws.send(serialize(msg));
    return id;
  }
}

/** ws:// or wss:// URL for the gateway that served this page. */
export function gatewayUrl(loc: Location = location): string {
  const scheme = loc.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${loc.host}/ws`;
}
