/** Agents table view model: the name column, one marker column per lifecycle
 * state, and a trend cell plotting the AI and PI series in distinct colors
 * with negative PI stretches visually set apart.
 */

import type { IndicatorHistory } from "./history.js";
import type { SnapshotDoc } from "./protocol.js";

// Known lifecycle states in display order; unknown states append after.
const STATE_ORDER = ["Creation", "Burning", "PutOut", "Off", "Active", "Distress", "Dead", "Tracking"];

export interface TrendSegment {
  points: string; // svg polyline points
  negative: boolean;
}

export interface TrendModel {
  width: number;
  height: number;
  aiPoints: string;
  piSegments: TrendSegment[];
  zeroY: number | null;
}

export interface TableRow {
  id: number;
  name: string;
  state: string;
  marks: boolean[];
  trend: TrendModel;
}

export interface AgentsTable {
  columns: string[];
  rows: TableRow[];
}

export function buildAgentsTable(
  snapshot: SnapshotDoc,
  histories: Map<number, IndicatorHistory>,
  trendWidth = 120,
  trendHeight = 28,
): AgentsTable {
  const present = new Set(snapshot.agents.map((a) => a.state));
  const columns = STATE_ORDER.filter((s) => present.has(s));
  for (const agent of snapshot.agents) {
    if (!columns.includes(agent.state)) {
      columns.push(agent.state);
    }
  }
  const rows = snapshot.agents
    .slice()
    .sort((a, b) => a.id - b.id)
    .map((agent) => ({
      id: agent.id,
      name: agent.entity,
      state: agent.state,
      marks: columns.map((c) => c === agent.state),
      trend: buildTrend(histories.get(agent.id)?.series ?? [], trendWidth, trendHeight),
    }));
  return { columns, rows };
}

export function buildTrend(
  series: readonly { cycle: number; ai: number; pi: number }[],
  width = 120,
  height = 28,
): TrendModel {
  if (series.length === 0) {
    return { width, height, aiPoints: "", piSegments: [], zeroY: null };
  }
  const values = series.flatMap((p) => [p.ai, p.pi]);
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (hi === lo) {
    hi = lo + 1;
  }
  const pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
  const x = (i: number) => (series.length === 1 ? width / 2 : (i / (series.length - 1)) * width);
  const y = (v: number) => height - ((v - lo) / (hi - lo)) * height;
  const point = (i: number, v: number) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`;

  const aiPoints = series.map((p, i) => point(i, p.ai)).join(" ");

  // Split the PI polyline wherever the sign class changes so negative
  // stretches can carry their own color; boundary points repeat on both
  // sides to keep the line visually continuous.
  const piSegments: TrendSegment[] = [];
  let current: string[] = [];
  let currentNegative = series[0].pi < 0;
  series.forEach((p, i) => {
    const negative = p.pi < 0;
    if (negative !== currentNegative && current.length > 0) {
      current.push(point(i, p.pi));
      piSegments.push({ points: current.join(" "), negative: currentNegative });
      current = [];
      currentNegative = negative;
    }
    current.push(point(i, p.pi));
  });
  if (current.length > 0) {
    piSegments.push({ points: current.join(" "), negative: currentNegative });
  }

  const zeroY = lo < 0 && hi > 0 ? y(0) : null;
  return { width, height, aiPoints, piSegments, zeroY };
}
