/** World panel: agent positions scattered over the bounding box of every
 * coordinate seen so far.  Positions come out of the canonical observation
 * text, which always carries "localisation, x|y".
 */

import type { SnapshotDoc } from "./protocol.js";

const LOCALISATION = /localisation, (-?\d+)\|(-?\d+)/;

export interface WorldPoint {
  id: number;
  name: string;
  state: string;
  x: number; // scaled to [0, 1]
  y: number;
}

export function parseLocalisation(fsf: string): [number, number] | null {
  const match = LOCALISATION.exec(fsf);
  return match ? [Number(match[1]), Number(match[2])] : null;
}

export class WorldView {
  private minX = Infinity;
  private minY = Infinity;
  private maxX = -Infinity;
  private maxY = -Infinity;

  /** Scaled positions for the snapshot; the box only ever grows, so the view
   * stays stable while agents move inside it. */
  project(snapshot: SnapshotDoc): WorldPoint[] {
    const raw: { id: number; name: string; state: string; at: [number, number] }[] = [];
    for (const agent of snapshot.agents) {
      const at = parseLocalisation(agent.fsf);
      if (!at) {
        continue;
      }
      raw.push({ id: agent.id, name: agent.entity, state: agent.state, at });
      this.minX = Math.min(this.minX, at[0]);
      this.maxX = Math.max(this.maxX, at[0]);
      this.minY = Math.min(this.minY, at[1]);
      this.maxY = Math.max(this.maxY, at[1]);
    }
    const spanX = this.maxX - this.minX || 1;
    const spanY = this.maxY - this.minY || 1;
    return raw.map((p) => ({
      id: p.id,
      name: p.name,
      state: p.state,
      x: (p.at[0] - this.minX) / spanX,
      y: (p.at[1] - this.minY) / spanY,
    }));
  }
}
