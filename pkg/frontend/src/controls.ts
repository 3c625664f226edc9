/** Operator controls: map buttons to protocol messages and gate them on
 * connection, pending round-trips, and the frozen flag (step only while
 * frozen, per the gateway contract).
 */

import type { ClientMessage } from "./protocol.js";
import type { ConsoleState } from "./store.js";

export type ControlButton = "freeze" | "reanimate" | "reset" | "step" | "reload";

export function controlEnabled(state: ConsoleState, button: ControlButton): boolean {
  if (state.connection !== "open" && button !== "reload") {
    return false;
  }
  if (state.pendingControl !== null) {
    return false;
  }
  switch (button) {
    case "freeze":
      return !state.frozen;
    case "reanimate":
    case "step":
      return state.frozen;
    default:
      return true;
  }
}

/** The message for a button press, or null when the press must be ignored.
 * Reload is client-side (a plain snapshot re-fetch) and yields no message. */
export function controlMessage(
  state: ConsoleState,
  button: ControlButton,
  stepCycles = 1,
): ClientMessage | null {
  if (!controlEnabled(state, button) || button === "reload") {
    return null;
  }
  if (button === "step") {
    return { cmd: "step", n: Math.max(1, Math.floor(stepCycles)) };
  }
  return { cmd: button };
}

export function markPending(state: ConsoleState, button: ControlButton): void {
  if (button !== "reload") {
    state.pendingControl = button;
  }
}
