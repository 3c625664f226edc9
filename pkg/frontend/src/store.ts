/** Console state: reducers over incoming server messages and UI intents.
 *
 * The store never mutates anything server-side; it only caches the latest
 * snapshot, accumulates indicator history ring buffers, and tracks the
 * control round-trip in flight.
 */

import { IndicatorHistory } from "./history.js";
import type { AgentReply, ServerMessage, SnapshotDoc } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface ConsoleState {
  connection: ConnectionStatus;
  snapshot: SnapshotDoc | null;
  histories: Map<number, IndicatorHistory>;
  selected: number | null;
  inspected: AgentReply | null;
  frozen: boolean;
  pendingControl: string | null;
  toast: string | null;
  droppedEvents: number;
  historyCapacity: number;
}

export function initialState(historyCapacity = 300): ConsoleState {
  return {
    connection: "connecting",
    snapshot: null,
    histories: new Map(),
    selected: null,
    inspected: null,
    frozen: false,
    pendingControl: null,
    toast: null,
    droppedEvents: 0,
    historyCapacity,
  };
}

export function applyConnection(state: ConsoleState, status: ConnectionStatus): void {
  state.connection = status;
  if (status !== "open") {
    state.pendingControl = null;
  }
}

export function applyServerMessage(state: ConsoleState, msg: ServerMessage): void {
  switch (msg.type) {
    case "snapshot": {
      const { type: _type, dropped, ...doc } = msg;
      state.snapshot = doc;
      state.frozen = doc.frozen;
      if (dropped) {
        state.droppedEvents += dropped;
      }
      for (const agent of doc.agents) {
        let history = state.histories.get(agent.id);
        if (!history) {
          history = new IndicatorHistory(state.historyCapacity);
          state.histories.set(agent.id, history);
        }
        history.push(doc.cycle, agent.ai, agent.pi);
      }
      if (state.selected !== null && !doc.agents.some((a) => a.id === state.selected)) {
        state.selected = null;
        state.inspected = null;
      }
      break;
    }
    case "ack": {
      state.pendingControl = null;
      if (msg.frozen !== undefined) {
        state.frozen = msg.frozen;
      }
      if (msg.cmd === "reset") {
        state.histories = new Map();
        state.selected = null;
        state.inspected = null;
      }
      break;
    }
    case "error": {
      state.pendingControl = null;
      state.toast = msg.message;
      break;
    }
    case "agent": {
      if (state.selected === msg.id) {
        state.inspected = msg;
      }
      break;
    }
  }
}

export function selectAgent(state: ConsoleState, id: number | null): void {
  state.selected = id;
  state.inspected = null;
}

export function dismissToast(state: ConsoleState): void {
  state.toast = null;
}
