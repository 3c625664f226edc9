"""Command-line entry point and the live control/inspection service.

The service owns the engine as its single writer: a background thread paces
cycles by wall clock and applies queued operator commands only at cycle
boundaries (immediately while frozen).  Clients talk JSON over one WebSocket
(``/ws``) and read-only GETs (``/snapshot``, ``/agents/{id}``); every
subscriber sees the identical snapshot stream, and a slow client only loses
its own oldest events (the drop count is reported to that client).
"""
from __future__ import annotations

import argparse
import asyncio
import concurrent.futures
import json
import queue
import sys
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import Response

from .engine import Engine, engine_config_from_dict, snapshot_to_json
from .fsf import FSF, FsfParseError, parse_fsf
from .ontology import validate_fsf
from .proximity import ProximityConfig
from .scenario import (
    Scenario,
    ScenarioError,
    export_snapshots,
    generate_fire_demo,
    format_scenario,
    load_scenario_path,
    run_scenario,
)

MAX_MESSAGE_BYTES = 1 << 20
_SUBSCRIBER_BUFFER = 64


@dataclass
class _Command:
    kind: str
    args: dict[str, Any]
    reply: concurrent.futures.Future


@dataclass
class _Subscriber:
    loop: asyncio.AbstractEventLoop
    queue: "asyncio.Queue[str]" = field(default_factory=lambda: asyncio.Queue(maxsize=_SUBSCRIBER_BUFFER))
    dropped: int = 0

    def offer(self, text: str) -> None:
        # Runs on the subscriber's event loop.
        while True:
            try:
                self.queue.put_nowait(text)
                return
            except asyncio.QueueFull:
                try:
                    self.queue.get_nowait()
                    self.dropped += 1
                except asyncio.QueueEmpty:
                    pass

    def take_dropped(self) -> int:
        dropped, self.dropped = self.dropped, 0
        return dropped


class GatewayService:
    """Runs the engine on a dedicated thread and publishes immutable snapshots."""

    def __init__(
        self,
        engine: Engine,
        scenario: Optional[Scenario] = None,
        cycle_ms: int = 250,
        export_path: Optional[str] = None,
    ):
        self.engine = engine
        self.cycle_ms = cycle_ms
        self._feed: dict[int, list[FSF]] = {}
        if scenario is not None:
            for cycle, text in scenario.events:
                self._feed.setdefault(cycle, []).append(parse_fsf(text, engine.schema))
        self._commands: "queue.Queue[_Command]" = queue.Queue()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._subscribers: dict[int, _Subscriber] = {}
        self._subscribers_lock = threading.Lock()
        self._next_subscriber = 1
        self._export = open(export_path, "w", encoding="utf-8") if export_path else None
        self._published: tuple[str, dict[int, dict[str, Any]]] = ("", {})
        self._publish()

    # -- public views (safe from any thread) ---------------------------------

    @property
    def latest_snapshot_text(self) -> str:
        return self._published[0]

    def agent_detail(self, agent_id: int) -> Optional[dict[str, Any]]:
        return self._published[1].get(agent_id)

    # -- lifecycle ------------------------------------------------------------

    def start(self) -> None:
        if self._thread is not None:
            return
        self._thread = threading.Thread(target=self._loop, name="sitrep-engine", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
        if self._export is not None:
            self._export.close()
            self._export = None

    # -- client plumbing -------------------------------------------------------

    async def execute(self, kind: str, args: dict[str, Any]) -> dict[str, Any]:
        """Queue a state-mutating command; resolves once the engine applied it."""
        fut: concurrent.futures.Future = concurrent.futures.Future()
        self._commands.put(_Command(kind, args, fut))
        return await asyncio.wrap_future(fut)

    def subscribe(self, loop: asyncio.AbstractEventLoop) -> tuple[int, _Subscriber]:
        sub = _Subscriber(loop=loop)
        with self._subscribers_lock:
            sub_id = self._next_subscriber
            self._next_subscriber += 1
            self._subscribers[sub_id] = sub
        sub.offer(self.latest_snapshot_text)
        return sub_id, sub

    def unsubscribe(self, sub_id: int) -> None:
        with self._subscribers_lock:
            self._subscribers.pop(sub_id, None)

    # -- engine thread ----------------------------------------------------------

    def _loop(self) -> None:
        period = self.cycle_ms / 1000.0
        deadline = time.monotonic() + period
        while not self._stop.is_set():
            if self.engine.frozen:
                wait = 0.05
                deadline = time.monotonic() + period  # restart pacing on reanimate
            else:
                wait = max(0.0, deadline - time.monotonic())
            try:
                command = self._commands.get(timeout=wait if wait > 0 else 0.001)
            except queue.Empty:
                command = None
            if command is not None:
                self._apply(command)
                continue
            if not self.engine.frozen and time.monotonic() >= deadline:
                self._run_one_cycle()
                deadline += period
                if deadline < time.monotonic():  # fell behind; resynchronize
                    deadline = time.monotonic() + period

    def _run_one_cycle(self, force: bool = False) -> None:
        for fsf in self._feed.get(self.engine.cycle, ()):
            self.engine.submit(fsf)
        self.engine.run_cycle(force=force)
        self._publish()

    def _publish(self) -> None:
        text = snapshot_to_json(self.engine.snapshot())
        self._published = (text, self.engine.agent_details())
        if self._export is not None:
            self._export.write(text + "\n")
            self._export.flush()
        with self._subscribers_lock:
            subscribers = list(self._subscribers.values())
        for sub in subscribers:
            sub.loop.call_soon_threadsafe(sub.offer, text)

    def _apply(self, command: _Command) -> None:
        engine = self.engine
        try:
            if command.kind == "freeze":
                engine.freeze()
                self._publish()
                reply = self._ack("freeze", frozen=True, cycle=engine.cycle)
            elif command.kind == "reanimate":
                engine.reanimate()
                self._publish()
                reply = self._ack("reanimate", frozen=False, cycle=engine.cycle)
            elif command.kind == "reset":
                engine.reset()
                self._publish()
                reply = self._ack("reset", frozen=False, cycle=0)
            elif command.kind == "step":
                n = command.args["n"]
                if not engine.frozen:
                    reply = _error("step requires a frozen engine")
                else:
                    for _ in range(n):
                        self._run_one_cycle(force=True)
                    reply = self._ack("step", frozen=True, cycle=engine.cycle, cycles=n)
            elif command.kind == "inject":
                engine.submit(command.args["fsf"])
                reply = self._ack("inject", frozen=engine.frozen, queued=engine.queued_count)
            else:
                reply = _error(f"unknown command {command.kind!r}")
        except Exception as exc:  # defensive: never leave a client hanging
            reply = _error(f"{type(exc).__name__}: {exc}")
        command.reply.set_result(reply)

    @staticmethod
    def _ack(cmd: str, **extra: Any) -> dict[str, Any]:
        return {"type": "ack", "ok": True, "cmd": cmd, **extra}


def _error(message: str) -> dict[str, Any]:
    return {"type": "error", "ok": False, "message": message}


def _snapshot_event(text: str, dropped: int) -> str:
    if dropped:
        return f'{{"type":"snapshot","dropped":{dropped},' + text[1:]
    return '{"type":"snapshot",' + text[1:]


def build_app(service: GatewayService) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        service.start()
        try:
            yield
        finally:
            service.stop()

    app = FastAPI(lifespan=lifespan)

    @app.get("/snapshot")
    def get_snapshot() -> Response:
        return Response(content=service.latest_snapshot_text, media_type="application/json")

    @app.get("/agents/{agent_id}")
    def get_agent(agent_id: int) -> Response:
        detail = service.agent_detail(agent_id)
        if detail is None:
            return Response(
                content=json.dumps({"error": f"no agent {agent_id}"}),
                media_type="application/json",
                status_code=404,
            )
        return Response(content=json.dumps(detail, separators=(",", ":")), media_type="application/json")

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        send_lock = asyncio.Lock()
        sub_id: Optional[int] = None
        pump_task: Optional[asyncio.Task] = None

        async def send(payload: str) -> None:
            async with send_lock:
                await websocket.send_text(payload)

        async def pump(sub: _Subscriber) -> None:
            while True:
                text = await sub.queue.get()
                await send(_snapshot_event(text, sub.take_dropped()))

        try:
            while True:
                raw = await websocket.receive_text()
                reply, wants_subscribe = await _handle_message(service, raw)
                if wants_subscribe and sub_id is None:
                    sub_id, sub = service.subscribe(asyncio.get_running_loop())
                    pump_task = asyncio.create_task(pump(sub))
                if reply is not None:
                    await send(json.dumps(reply, separators=(",", ":")))
        except WebSocketDisconnect:
            pass
        finally:
            if pump_task is not None:
                pump_task.cancel()
            if sub_id is not None:
                service.unsubscribe(sub_id)

    return app


async def _handle_message(
    service: GatewayService, raw: str
) -> tuple[Optional[dict[str, Any]], bool]:
    if len(raw.encode("utf-8")) > MAX_MESSAGE_BYTES:
        return _error("message exceeds 1 MiB"), False
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as exc:
        return _error(f"malformed JSON: {exc}"), False
    if not isinstance(msg, dict):
        return _error("expected a JSON object"), False
    cmd = msg.get("cmd")
    if cmd == "subscribe":
        return {"type": "ack", "ok": True, "cmd": "subscribe"}, True
    if cmd == "inspect":
        agent_id = msg.get("id")
        if not isinstance(agent_id, int):
            return _error("inspect needs an integer 'id'"), False
        detail = service.agent_detail(agent_id)
        if detail is None:
            return _error(f"no agent {agent_id}"), False
        return {"type": "agent", **detail}, False
    if cmd in ("freeze", "reanimate", "reset"):
        return await service.execute(cmd, {}), False
    if cmd == "step":
        n = msg.get("n", 1)
        if not isinstance(n, int) or n < 1:
            return _error("step needs a positive integer 'n'"), False
        return await service.execute("step", {"n": n}), False
    if cmd == "inject":
        text = msg.get("fsf")
        if not isinstance(text, str):
            return _error("inject needs an 'fsf' string"), False
        try:
            fsf = parse_fsf(text, service.engine.schema)
        except FsfParseError as exc:
            return _error(str(exc)), False
        report = validate_fsf(service.engine.schema, fsf)
        if not report.ok:
            return _error("; ".join(report.errors)), False
        return await service.execute("inject", {"fsf": fsf}), False
    return _error(f"unknown cmd {cmd!r}"), False


# ---------------------------------------------------------------------------
# CLI


def _load_config(path: Optional[str], scenario: Optional[Scenario], seed: Optional[int]):
    data: dict[str, Any] = {}
    if path:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    config = engine_config_from_dict(data)
    if scenario is not None:
        # The scenario knows the units it was authored in.
        config = replace(
            config,
            proximity=ProximityConfig(
                temporal_scale=scenario.meta.temporal_scale,
                spatial_scale=scenario.meta.spatial_scale,
                prune_epsilon=config.proximity.prune_epsilon,
            ),
        )
    if seed is not None:
        config = replace(config, seed=seed)
    return config


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario_path(args.scenario)
    except FileNotFoundError:
        print(f"error: scenario not found: {args.scenario}", file=sys.stderr)
        return 1
    except ScenarioError as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return 1
    config = _load_config(args.config, scenario, args.seed)
    engine = Engine(config=config)

    if args.serve and not args.headless:
        import uvicorn

        host, _, port_text = args.serve.rpartition(":")
        if not host or not port_text.isdigit():
            print(f"error: bad --serve address {args.serve!r} (want host:port)", file=sys.stderr)
            return 2
        service = GatewayService(engine, scenario, cycle_ms=args.cycle_ms, export_path=args.export)
        app = build_app(service)
        uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
        return 0

    if args.export:
        with open(args.export, "w", encoding="utf-8") as sink:
            cycles = export_snapshots(engine, scenario, sink)
    else:
        cycles = run_scenario(engine, scenario)
    print(f"cycles: {cycles}, agents: {len(engine.agents)}, fsfs: {engine.fsfs_fed}")
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    scenario = generate_fire_demo(
        seed=args.seed,
        n_buildings=args.buildings,
        n_ignitions=args.ignitions,
        spread_prob=args.spread_prob,
        n_brigades=args.brigades,
        cycles=args.cycles,
        spacing=args.spacing,
    )
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(format_scenario(scenario))
    print(f"wrote {args.output}: {len(scenario.events)} events over {scenario.cycles} cycles")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario_path(args.scenario)
    except FileNotFoundError:
        print(f"error: scenario not found: {args.scenario}", file=sys.stderr)
        return 1
    except ScenarioError as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return 1
    print(f"events: {len(scenario.events)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sitrep", description="situation-representation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a scenario, optionally serving the live console")
    run.add_argument("scenario")
    run.add_argument("--serve", metavar="ADDR", help="serve the gateway on host:port")
    run.add_argument("--export", metavar="PATH", help="write one snapshot document per cycle")
    run.add_argument("--cycle-ms", type=int, default=250, help="wall-clock cycle pacing when serving")
    run.add_argument("--headless", action="store_true", help="run to completion without serving")
    run.add_argument("--config", metavar="PATH", help="engine configuration document (JSON)")
    run.add_argument("--seed", type=int, default=None)
    run.set_defaults(func=_cmd_run)

    gen = sub.add_parser("generate", help="write a synthetic fire-outbreak scenario")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--buildings", type=int, default=100)
    gen.add_argument("--ignitions", type=int, default=3)
    gen.add_argument("--spread-prob", type=float, default=0.3)
    gen.add_argument("--brigades", type=int, default=5)
    gen.add_argument("--cycles", type=int, default=50)
    gen.add_argument("--spacing", type=int, default=20_000)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=_cmd_generate)

    val = sub.add_parser("validate", help="parse and validate a scenario file")
    val.add_argument("scenario")
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
