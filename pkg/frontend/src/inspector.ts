/** Per-agent inspector view model: the canonical observation text, lifecycle
 * facts, and the acquaintance list ranked by |total| descending.
 */

import type { AgentReply, SnapshotDoc } from "./protocol.js";

export interface AcquaintanceRow {
  id: number;
  name: string;
  total: number;
}

export interface InspectorView {
  kind: "agent";
  name: string;
  fsf: string;
  created: number;
  state: string;
  ai: number;
  pi: number;
  alive: boolean;
  acquaintances: AcquaintanceRow[];
}

export interface InspectorPlaceholder {
  kind: "placeholder";
  message: string;
}

export function buildInspector(
  reply: AgentReply | null,
  snapshot: SnapshotDoc | null,
): InspectorView | InspectorPlaceholder {
  if (reply === null) {
    return { kind: "placeholder", message: "select an agent" };
  }
  const names = new Map<number, string>();
  for (const agent of snapshot?.agents ?? []) {
    names.set(agent.id, agent.entity);
  }
  const acquaintances = reply.acq
    .map(([id, total]) => ({ id, name: names.get(id) ?? `agent#${id}`, total }))
    .sort((a, b) => Math.abs(b.total) - Math.abs(a.total) || a.id - b.id);
  return {
    kind: "agent",
    name: reply.entity,
    fsf: reply.fsf,
    created: reply.created,
    state: reply.state,
    ai: reply.ai,
    pi: reply.pi,
    alive: reply.alive,
    acquaintances,
  };
}
