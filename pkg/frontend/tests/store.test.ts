import { describe, expect, it } from "vitest";

import { applyConnection, applyServerMessage, initialState, selectAgent } from "../src/store.js";
import { agent, snapshotEvent } from "./helpers.js";

describe("store", () => {
  it("caches the latest snapshot and the frozen flag", () => {
    const state = initialState();
    applyServerMessage(state, snapshotEvent(3, [agent({ id: 1 })], true));
    expect(state.snapshot?.cycle).toBe(3);
    expect(state.frozen).toBe(true);
  });

  it("appends indicator history once per cycle", () => {
    const state = initialState();
    applyServerMessage(state, snapshotEvent(1, [agent({ id: 1, ai: 1, pi: 2 })]));
    applyServerMessage(state, snapshotEvent(1, [agent({ id: 1, ai: 9, pi: 9 })]));
    applyServerMessage(state, snapshotEvent(2, [agent({ id: 1, ai: 3, pi: 4 })]));
    const series = state.histories.get(1)!.series;
    expect(series.length).toBe(2);
    expect(series[0]).toEqual({ cycle: 1, ai: 1, pi: 2 });
    expect(series[1]).toEqual({ cycle: 2, ai: 3, pi: 4 });
  });

  it("bounds history to the configured window", () => {
    const state = initialState(10);
    for (let cycle = 0; cycle < 50; cycle++) {
      applyServerMessage(state, snapshotEvent(cycle, [agent({ id: 1, ai: cycle })]));
    }
    const series = state.histories.get(1)!.series;
    expect(series.length).toBe(10);
    expect(series[0].cycle).toBe(40);
  });

  it("clears the selection when the agent vanishes", () => {
    const state = initialState();
    applyServerMessage(state, snapshotEvent(1, [agent({ id: 1 }), agent({ id: 2 })]));
    selectAgent(state, 2);
    applyServerMessage(state, snapshotEvent(2, [agent({ id: 1 })]));
    expect(state.selected).toBeNull();
    expect(state.inspected).toBeNull();
  });

  it("tracks ack round-trips and the server frozen flag", () => {
    const state = initialState();
    state.pendingControl = "freeze";
    applyServerMessage(state, { type: "ack", ok: true, cmd: "freeze", frozen: true });
    expect(state.pendingControl).toBeNull();
    expect(state.frozen).toBe(true);
  });

  it("clears caches on reset ack", () => {
    const state = initialState();
    applyServerMessage(state, snapshotEvent(1, [agent({ id: 1 })]));
    selectAgent(state, 1);
    applyServerMessage(state, { type: "ack", ok: true, cmd: "reset", frozen: false, cycle: 0 });
    expect(state.histories.size).toBe(0);
    expect(state.selected).toBeNull();
  });

  it("turns error replies into toasts without touching state", () => {
    const state = initialState();
    applyServerMessage(state, snapshotEvent(1, [agent({ id: 1 })], true));
    state.pendingControl = "step";
    applyServerMessage(state, { type: "error", ok: false, message: "step requires a frozen engine" });
    expect(state.toast).toContain("frozen");
    expect(state.pendingControl).toBeNull();
    expect(state.frozen).toBe(true);
  });

  it("accumulates the dropped-event count", () => {
    const state = initialState();
    applyServerMessage(state, { ...snapshotEvent(1, []), dropped: 4 });
    applyServerMessage(state, { ...snapshotEvent(2, []), dropped: 2 });
    expect(state.droppedEvents).toBe(6);
  });

  it("keeps inspector replies only for the current selection", () => {
    const state = initialState();
    applyServerMessage(state, snapshotEvent(1, [agent({ id: 1 }), agent({ id: 2 })]));
    selectAgent(state, 1);
    const reply = {
      type: "agent" as const,
      id: 2,
      entity: "fire#2",
      class: "Fire",
      state: "Burning",
      ai: 1,
      pi: 1,
      fsf: "(fire#2, localisation, 0|0, time, 0)",
      created: 0,
      alive: true,
      acq: [] as [number, number][],
    };
    applyServerMessage(state, reply);
    expect(state.inspected).toBeNull();
    applyServerMessage(state, { ...reply, id: 1 });
    expect(state.inspected?.id).toBe(1);
  });

  it("drops the pending control when the connection breaks", () => {
    const state = initialState();
    state.pendingControl = "freeze";
    applyConnection(state, "closed");
    expect(state.pendingControl).toBeNull();
    expect(state.connection).toBe("closed");
  });
});
