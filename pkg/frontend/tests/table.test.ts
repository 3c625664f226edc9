import { describe, expect, it } from "vitest";

import { IndicatorHistory } from "../src/history.js";
import { buildAgentsTable, buildTrend } from "../src/table.js";
import { renderAgentsTable, renderTrendSvg, PI_NEGATIVE_COLOR, PI_COLOR } from "../src/render.js";
import { agent, snapshot } from "./helpers.js";

describe("agents table", () => {
  it("emits one row per agent, sorted and keyed by id", () => {
    const doc = snapshot(5, [agent({ id: 3 }), agent({ id: 1 }), agent({ id: 2 })]);
    const table = buildAgentsTable(doc, new Map());
    expect(table.rows.map((r) => r.id)).toEqual([1, 2, 3]);
    const ids = new Set(table.rows.map((r) => r.id));
    expect(ids.size).toBe(3);
  });

  it("marks exactly the agent's current state column", () => {
    const doc = snapshot(5, [
      agent({ id: 1, state: "Burning" }),
      agent({ id: 2, state: "PutOut" }),
      agent({ id: 3, state: "Off" }),
    ]);
    const table = buildAgentsTable(doc, new Map());
    expect(table.columns).toEqual(["Burning", "PutOut", "Off"]);
    for (const row of table.rows) {
      expect(row.marks.filter(Boolean).length).toBe(1);
      expect(table.columns[row.marks.indexOf(true)]).toBe(row.state);
    }
  });

  it("orders known lifecycle states canonically and appends strangers", () => {
    const doc = snapshot(1, [
      agent({ id: 1, state: "Off" }),
      agent({ id: 2, state: "Creation" }),
      agent({ id: 3, state: "Wandering" }),
      agent({ id: 4, state: "Active" }),
    ]);
    const table = buildAgentsTable(doc, new Map());
    expect(table.columns).toEqual(["Creation", "Off", "Active", "Wandering"]);
  });

  it("survives reordering between snapshots without dropping rows", () => {
    const first = buildAgentsTable(snapshot(1, [agent({ id: 1 }), agent({ id: 2 })]), new Map());
    const second = buildAgentsTable(snapshot(2, [agent({ id: 2 }), agent({ id: 1 })]), new Map());
    expect(first.rows.map((r) => r.id)).toEqual(second.rows.map((r) => r.id));
  });

  it("renders rows with their agent id for selection", () => {
    const doc = snapshot(1, [agent({ id: 7 })]);
    const html = renderAgentsTable(buildAgentsTable(doc, new Map()), null);
    expect(html).toContain('data-agent-id="7"');
    expect(html).toContain("fire#7");
  });
});

describe("trend plot", () => {
  function history(points: [number, number, number][]): IndicatorHistory {
    const h = new IndicatorHistory();
    for (const [cycle, ai, pi] of points) {
      h.push(cycle, ai, pi);
    }
    return h;
  }

  it("splits the PI line where the sign flips", () => {
    const h = history([
      [0, 1, 2],
      [1, 1, 1],
      [2, 1, -1],
      [3, 1, -2],
      [4, 1, 3],
    ]);
    const trend = buildTrend(h.series);
    expect(trend.piSegments.map((s) => s.negative)).toEqual([false, true, false]);
    expect(trend.zeroY).not.toBeNull();
  });

  it("crosses the zero line with a color change in the svg", () => {
    const h = history([
      [0, 0.5, 2],
      [1, 0.5, -2],
    ]);
    const svg = renderTrendSvg(buildTrend(h.series));
    expect(svg).toContain(PI_NEGATIVE_COLOR);
    expect(svg).toContain(PI_COLOR);
    expect(svg).toContain("<line"); // zero line
  });

  it("handles empty and constant series", () => {
    expect(buildTrend([]).aiPoints).toBe("");
    const flat = buildTrend([{ cycle: 0, ai: 1, pi: 1 }]);
    expect(flat.aiPoints).not.toBe("");
    expect(flat.piSegments.length).toBe(1);
  });

  it("renders an empty table without errors", () => {
    const table = buildAgentsTable(snapshot(0, []), new Map());
    expect(table.rows).toEqual([]);
    const html = renderAgentsTable(table, null);
    expect(html).toContain("<table");
  });
});
