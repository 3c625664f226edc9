/** Browser wiring: connect to the gateway, feed the store, paint panels. */

import { GatewayConnection, type SocketLike } from "./connection.js";
import { buildInspector } from "./inspector.js";
import { buildAgentsTable } from "./table.js";
import { controlMessage, controlEnabled, markPending, type ControlButton } from "./controls.js";
import { renderAgentsTable, renderBanner, renderInspector, renderWorld } from "./render.js";
import {
  applyConnection,
  applyServerMessage,
  dismissToast,
  initialState,
  selectAgent,
} from "./store.js";
import { WorldView } from "./world.js";
import type { SnapshotDoc } from "./protocol.js";

const params = new URLSearchParams(location.search);
const gatewayHttp = params.get("gateway") ?? location.origin;
const gatewayWs = gatewayHttp.replace(/^http/, "ws") + "/ws";

const state = initialState();
const world = new WorldView();

const el = (id: string) => document.getElementById(id)!;

const connection = new GatewayConnection(
  gatewayWs,
  {
    onMessage(msg) {
      applyServerMessage(state, msg);
      if (msg.type === "snapshot" && state.selected !== null) {
        connection.send({ cmd: "inspect", id: state.selected });
      }
      schedulePaint();
    },
    onStatus(status) {
      applyConnection(state, status);
      schedulePaint();
    },
  },
  // native handler props take an event argument the adapter ignores
  (url) => new WebSocket(url) as unknown as SocketLike,
);

let paintQueued = false;
function schedulePaint(): void {
  if (paintQueued) {
    return;
  }
  paintQueued = true;
  requestAnimationFrame(() => {
    paintQueued = false;
    paint();
  });
}

function paint(): void {
  el("banner").innerHTML = renderBanner(state);
  for (const button of ["freeze", "reanimate", "reset", "step", "reload"] as ControlButton[]) {
    (el(`btn-${button}`) as HTMLButtonElement).disabled = !controlEnabled(state, button);
  }
  if (state.snapshot) {
    el("table-panel").innerHTML = renderAgentsTable(
      buildAgentsTable(state.snapshot, state.histories),
      state.selected,
    );
    el("world-panel").innerHTML = renderWorld(world.project(state.snapshot));
  }
  el("inspector-panel").innerHTML = renderInspector(buildInspector(state.inspected, state.snapshot));
  const toast = el("toast");
  toast.textContent = state.toast ?? "";
  toast.classList.toggle("visible", state.toast !== null);
}

function pressControl(button: ControlButton): void {
  if (button === "reload") {
    void reloadSnapshot();
    return;
  }
  const stepCycles = Number((el("step-n") as HTMLInputElement).value) || 1;
  const msg = controlMessage(state, button, stepCycles);
  if (msg && connection.send(msg)) {
    markPending(state, button);
    schedulePaint();
  }
}

async function reloadSnapshot(): Promise<void> {
  try {
    const response = await fetch(`${gatewayHttp}/snapshot`);
    if (response.ok) {
      const doc = (await response.json()) as SnapshotDoc;
      applyServerMessage(state, { type: "snapshot", ...doc });
      schedulePaint();
    }
  } catch {
    state.toast = "snapshot fetch failed";
    schedulePaint();
  }
}

for (const button of ["freeze", "reanimate", "reset", "step", "reload"] as ControlButton[]) {
  el(`btn-${button}`).addEventListener("click", () => pressControl(button));
}

document.addEventListener("click", (event) => {
  const target = (event.target as Element).closest("[data-agent-id]");
  if (target) {
    const id = Number(target.getAttribute("data-agent-id"));
    selectAgent(state, id);
    connection.send({ cmd: "inspect", id });
    schedulePaint();
  }
});

el("toast").addEventListener("click", () => {
  dismissToast(state);
  schedulePaint();
});

connection.start();
paint();
