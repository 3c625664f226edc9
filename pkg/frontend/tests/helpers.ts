import type { SnapshotAgent, SnapshotDoc, SnapshotEvent } from "../src/protocol.js";

export function agent(partial: Partial<SnapshotAgent> & { id: number }): SnapshotAgent {
  return {
    entity: `fire#${partial.id}`,
    class: "Fire",
    state: "Burning",
    ai: 1.0,
    pi: 0.5,
    fsf: `(fire#${partial.id}, fieriness, 1, localisation, 10|20, time, 0)`,
    acq: [],
    ...partial,
  };
}

export function snapshot(cycle: number, agents: SnapshotAgent[], frozen = false): SnapshotDoc {
  return { cycle, frozen, agents };
}

export function snapshotEvent(cycle: number, agents: SnapshotAgent[], frozen = false): SnapshotEvent {
  return { type: "snapshot", ...snapshot(cycle, agents, frozen) };
}
