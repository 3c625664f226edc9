/** Gateway connection: one message channel with exponential-backoff
 * reconnect; subscribes on open so every client sees the snapshot stream.
 */

import { parseServerMessage, type ClientMessage, type ServerMessage } from "./protocol.js";
import type { ConnectionStatus } from "./store.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((event: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionHandlers {
  onMessage(msg: ServerMessage): void;
  onStatus(status: ConnectionStatus): void;
}

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 15_000;

export class GatewayConnection {
  private socket: SocketLike | null = null;
  private backoffMs = BACKOFF_START_MS;
  private stopped = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly handlers: ConnectionHandlers,
    private readonly socketFactory: SocketFactory,
  ) {}

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
  }

  send(msg: ClientMessage): boolean {
    if (!this.socket) {
      return false;
    }
    try {
      this.socket.send(JSON.stringify(msg));
      return true;
    } catch {
      return false;
    }
  }

  private connect(): void {
    this.handlers.onStatus("connecting");
    let socket: SocketLike;
    try {
      socket = this.socketFactory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = BACKOFF_START_MS;
      this.handlers.onStatus("open");
      this.send({ cmd: "subscribe" });
    };
    socket.onmessage = (event) => {
      const msg = parseServerMessage(String(event.data));
      if (msg) {
        this.handlers.onMessage(msg);
      }
    };
    socket.onerror = () => {
      // close always follows; reconnect is handled there
    };
    socket.onclose = () => {
      if (this.socket === socket) {
        this.socket = null;
      }
      this.handlers.onStatus("closed");
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    if (this.stopped || this.reconnectTimer !== null) {
      return;
    }
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      if (!this.stopped) {
        this.connect();
      }
    }, delay);
  }
}
