/** HTML/SVG renderers for the view models.  Pure string builders so they are
 * testable without a DOM; main.ts owns injection and event wiring.
 */

import type { InspectorPlaceholder, InspectorView } from "./inspector.js";
import type { AgentsTable, TrendModel } from "./table.js";
import type { ConsoleState } from "./store.js";
import type { WorldPoint } from "./world.js";

export const AI_COLOR = "#d64541";
export const PI_COLOR = "#2e6fd8";
export const PI_NEGATIVE_COLOR = "#8e44ad";

const STATE_COLORS: Record<string, string> = {
  Creation: "#7f8c8d",
  Burning: "#e67e22",
  PutOut: "#2e6fd8",
  Off: "#444a52",
  Active: "#27ae60",
  Distress: "#e6b220",
  Dead: "#444a52",
  Tracking: "#7f8c8d",
};

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderBanner(state: ConsoleState): string {
  const parts: string[] = [];
  if (state.connection !== "open") {
    parts.push(`<span class="banner offline">${state.connection}…</span>`);
  }
  if (state.frozen) {
    parts.push('<span class="banner frozen">FROZEN</span>');
  }
  if (state.snapshot) {
    parts.push(`<span class="banner cycle">cycle ${state.snapshot.cycle}</span>`);
    parts.push(`<span class="banner agents">${state.snapshot.agents.length} agents</span>`);
  }
  if (state.droppedEvents > 0) {
    parts.push(`<span class="banner dropped">${state.droppedEvents} events dropped</span>`);
  }
  return parts.join(" ");
}

export function renderTrendSvg(trend: TrendModel): string {
  const lines: string[] = [];
  if (trend.zeroY !== null) {
    lines.push(
      `<line x1="0" y1="${trend.zeroY.toFixed(1)}" x2="${trend.width}" y2="${trend.zeroY.toFixed(1)}"` +
        ' stroke="#d0d4da" stroke-width="1"/>',
    );
  }
  for (const segment of trend.piSegments) {
    const color = segment.negative ? PI_NEGATIVE_COLOR : PI_COLOR;
    lines.push(`<polyline points="${segment.points}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
  }
  if (trend.aiPoints) {
    lines.push(`<polyline points="${trend.aiPoints}" fill="none" stroke="${AI_COLOR}" stroke-width="1.5"/>`);
  }
  return `<svg width="${trend.width}" height="${trend.height}" class="trend">${lines.join("")}</svg>`;
}

export function renderAgentsTable(table: AgentsTable, selected: number | null): string {
  const head =
    "<tr><th>agent</th>" +
    table.columns.map((c) => `<th class="state-col">${escapeHtml(c)}</th>`).join("") +
    '<th class="trend-col">AI / PI</th></tr>';
  const rows = table.rows
    .map((row) => {
      const marks = row.marks
        .map((on) => `<td class="state-col">${on ? '<span class="mark">●</span>' : ""}</td>`)
        .join("");
      const cls = row.id === selected ? "agent-row selected" : "agent-row";
      return (
        `<tr class="${cls}" data-agent-id="${row.id}">` +
        `<td class="name">${escapeHtml(row.name)}</td>${marks}` +
        `<td class="trend-col">${renderTrendSvg(row.trend)}</td></tr>`
      );
    })
    .join("");
  return `<table class="agents"><thead>${head}</thead><tbody>${rows}</tbody></table>`;
}

export function renderInspector(view: InspectorView | InspectorPlaceholder): string {
  if (view.kind === "placeholder") {
    return `<div class="placeholder">${escapeHtml(view.message)}</div>`;
  }
  const acquaintances =
    view.acquaintances.length === 0
      ? '<li class="none">none</li>'
      : view.acquaintances
          .map(
            (a) =>
              `<li><span class="acq-name">${escapeHtml(a.name)}</span>` +
              ` <span class="acq-total">(${a.total >= 0 ? "+" : ""}${a.total.toFixed(3)})</span></li>`,
          )
          .join("");
  return (
    `<h3>${escapeHtml(view.name)}${view.alive ? "" : " ✝"}</h3>` +
    `<pre class="fsf">${escapeHtml(view.fsf)}</pre>` +
    `<dl><dt>Creation time</dt><dd>${view.created}</dd>` +
    `<dt>State</dt><dd>${escapeHtml(view.state)}</dd>` +
    `<dt>AI</dt><dd>${view.ai}</dd>` +
    `<dt>PI</dt><dd>${view.pi}</dd></dl>` +
    `<h4>Acquaintances</h4><ul class="acq">${acquaintances}</ul>`
  );
}

export function renderWorld(points: WorldPoint[], size = 360): string {
  const dots = points
    .map((p) => {
      const color = STATE_COLORS[p.state] ?? "#7f8c8d";
      const cx = (8 + p.x * (size - 16)).toFixed(1);
      const cy = (size - 8 - p.y * (size - 16)).toFixed(1);
      return (
        `<circle cx="${cx}" cy="${cy}" r="5" fill="${color}" data-agent-id="${p.id}">` +
        `<title>${escapeHtml(p.name)} (${escapeHtml(p.state)})</title></circle>`
      );
    })
    .join("");
  return `<svg viewBox="0 0 ${size} ${size}" class="world">${dots}</svg>`;
}
