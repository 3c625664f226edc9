/** Wire types of the gateway protocol: one JSON object per message. */

export interface SnapshotAgent {
  id: number;
  entity: string;
  class: string;
  state: string;
  ai: number;
  pi: number;
  fsf: string;
  acq: [number, number][];
}

export interface SnapshotDoc {
  cycle: number;
  frozen: boolean;
  agents: SnapshotAgent[];
}

export interface SnapshotEvent extends SnapshotDoc {
  type: "snapshot";
  dropped?: number;
}

export interface AckReply {
  type: "ack";
  ok: true;
  cmd: string;
  frozen?: boolean;
  cycle?: number;
  cycles?: number;
  queued?: number;
}

export interface ErrorReply {
  type: "error";
  ok: false;
  message: string;
}

export interface AgentReply {
  type: "agent";
  id: number;
  entity: string;
  class: string;
  state: string;
  ai: number;
  pi: number;
  fsf: string;
  created: number;
  alive: boolean;
  acq: [number, number][];
}

export type ServerMessage = SnapshotEvent | AckReply | ErrorReply | AgentReply;

export type CommandName = "freeze" | "reanimate" | "reset" | "step" | "subscribe" | "inspect" | "inject";

export interface ClientMessage {
  cmd: CommandName;
  n?: number;
  id?: number;
  fsf?: string;
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) {
    return null;
  }
  const type = (data as { type?: unknown }).type;
  if (type === "snapshot" || type === "ack" || type === "error" || type === "agent") {
    return data as ServerMessage;
  }
  return null;
}
