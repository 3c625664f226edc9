from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from sitrep.engine import Engine
from sitrep.gateway import GatewayService, build_app, main
from sitrep.scenario import bundled_scenario_path, load_scenario_path


@pytest.fixture()
def client():
    scenario = load_scenario_path(bundled_scenario_path())
    service = GatewayService(Engine(), scenario, cycle_ms=15)
    app = build_app(service)
    with TestClient(app) as test_client:
        test_client.service = service
        yield test_client


def send(ws, **msg):
    ws.send_text(json.dumps(msg))


def recv_until(ws, predicate, attempts=50, skippable=("snapshot",)):
    """Next message satisfying the predicate; only streamed event types may be
    skipped over, so a wrong reply fails fast instead of blocking."""
    for _ in range(attempts):
        msg = json.loads(ws.receive_text())
        if predicate(msg):
            return msg
        assert msg.get("type") in skippable, f"unexpected reply: {msg}"
    raise AssertionError("expected message never arrived")


def get_snapshot(client):
    response = client.get("/snapshot")
    assert response.status_code == 200
    return json.loads(response.content)


def wait_for(predicate, timeout=3.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        value = predicate()
        if value:
            return value
        time.sleep(0.01)
    raise AssertionError("condition never became true")


def test_snapshot_endpoint_and_cycling(client):
    first = get_snapshot(client)
    assert {"cycle", "frozen", "agents"} <= set(first)
    later = wait_for(lambda: (s := get_snapshot(client))["cycle"] > first["cycle"] and s)
    assert later["frozen"] is False


def test_freeze_halts_cycle_counter(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, cmd="freeze")
        ack = recv_until(ws, lambda m: m.get("type") == "ack")
        assert ack["ok"] is True and ack["frozen"] is True
    frozen = get_snapshot(client)
    assert frozen["frozen"] is True
    time.sleep(0.1)
    assert get_snapshot(client)["cycle"] == frozen["cycle"]


def test_inject_while_frozen_then_reanimate(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, cmd="freeze")
        recv_until(ws, lambda m: m.get("type") == "ack")
        for t in (100, 101, 102):
            send(ws, cmd="inject", fsf=f"(fire#500, fieriness, 1, localisation, 9000000|9000000, time, {t})")
            ack = recv_until(ws, lambda m: m.get("type") in ("ack", "error"))
            assert ack["type"] == "ack", ack
        send(ws, cmd="reanimate")
        recv_until(ws, lambda m: m.get("type") == "ack")
        wait_for(lambda: any(a["entity"] == "fire#500" for a in get_snapshot(client)["agents"]))
        send(ws, cmd="freeze")  # quiesce before touching the engine directly
        recv_until(ws, lambda m: m.get("type") == "ack")
    engine = client.service.engine
    agent = next(a for a in engine.agents.values() if str(a.entity_id) == "fire#500")
    assert [f.time for f in agent.history] == [100, 101, 102]


def test_step_exactly_n_cycles(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, cmd="step", n=3)
        error = recv_until(ws, lambda m: m.get("type") in ("ack", "error"))
        assert error["type"] == "error"  # stepping is a frozen-only control
        send(ws, cmd="freeze")
        recv_until(ws, lambda m: m.get("type") == "ack")
        before = get_snapshot(client)["cycle"]
        send(ws, cmd="step", n=3)
        ack = recv_until(ws, lambda m: m.get("type") == "ack" and m.get("cmd") == "step")
        assert ack["cycles"] == 3 and ack["frozen"] is True
        after = get_snapshot(client)
        assert after["cycle"] == before + 3
        assert after["frozen"] is True


def test_subscribe_streams_snapshots(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, cmd="subscribe")
        snap = recv_until(ws, lambda m: m.get("type") == "snapshot", skippable=("ack",))
        assert {"cycle", "frozen", "agents"} <= set(snap)
        again = recv_until(ws, lambda m: m.get("type") == "snapshot", skippable=("ack",))
        assert again["cycle"] >= snap["cycle"]


def test_inspect_round_trip(client):
    snap = wait_for(lambda: next((s for s in [get_snapshot(client)] if s["agents"]), None))
    target = snap["agents"][0]
    with client.websocket_connect("/ws") as ws:
        send(ws, cmd="inspect", id=target["id"])
        reply = recv_until(ws, lambda m: m.get("type") in ("agent", "error"))
        assert reply["type"] == "agent"
        assert reply["fsf"].startswith("(")
        assert {"state", "ai", "pi", "created", "acq"} <= set(reply)
        send(ws, cmd="inspect", id=987654)
        assert recv_until(ws, lambda m: m.get("type") in ("agent", "error"))["type"] == "error"


def test_agent_detail_endpoint(client):
    snap = wait_for(lambda: next((s for s in [get_snapshot(client)] if s["agents"]), None))
    agent_id = snap["agents"][0]["id"]
    detail = client.get(f"/agents/{agent_id}")
    assert detail.status_code == 200
    body = json.loads(detail.content)
    assert body["id"] == agent_id and "fsf" in body
    assert client.get("/agents/999999").status_code == 404


def test_malformed_messages_keep_connection_alive(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{not json")
        assert recv_until(ws, lambda m: True)["type"] == "error"
        send(ws, cmd="dance")
        assert recv_until(ws, lambda m: True)["type"] == "error"
        send(ws, cmd="inject", fsf="(dragon#1, localisation, 0|0, time, 0)")
        assert recv_until(ws, lambda m: True)["type"] == "error"
        send(ws, cmd="freeze")  # still serving after three bad requests
        assert recv_until(ws, lambda m: m.get("type") == "ack")["ok"] is True


def test_reset_returns_to_cycle_zero(client):
    wait_for(lambda: get_snapshot(client)["cycle"] > 0)
    with client.websocket_connect("/ws") as ws:
        send(ws, cmd="freeze")
        recv_until(ws, lambda m: m.get("type") == "ack")
        send(ws, cmd="reset")
        ack = recv_until(ws, lambda m: m.get("type") == "ack" and m.get("cmd") == "reset")
        assert ack["cycle"] == 0
        assert get_snapshot(client)["cycle"] == 0
        assert get_snapshot(client)["agents"] == []


# -- CLI --------------------------------------------------------------------------


def test_cli_validate_bundled(capsys):
    assert main(["validate", str(bundled_scenario_path())]) == 0
    assert "events: 63" in capsys.readouterr().out


def test_cli_run_headless_export(tmp_path, capsys):
    out = tmp_path / "run.jsonl"
    code = main(["run", str(bundled_scenario_path()), "--headless", "--export", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 31
    assert json.loads(lines[-1])["cycle"] == 31


def test_cli_run_missing_scenario(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.scenario")]) == 1
    assert "not found" in capsys.readouterr().err


def test_cli_rejects_bad_flags(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["run"]) == 2


def test_cli_generate_then_validate(tmp_path, capsys):
    out = tmp_path / "demo.scenario"
    code = main(
        ["generate", "--seed", "3", "--buildings", "9", "--ignitions", "1",
         "--spread-prob", "0.5", "--brigades", "1", "--cycles", "6", "-o", str(out)]
    )
    assert code == 0
    scenario = load_scenario_path(out)
    assert scenario.cycles == 6
    assert main(["validate", str(out)]) == 0


def test_cli_run_with_config(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"adoption_threshold": 0.9, "proximity": {"spatial_scale": 5000.0}}))
    out = tmp_path / "run.jsonl"
    code = main(
        ["run", str(bundled_scenario_path()), "--headless", "--config", str(config),
         "--seed", "5", "--export", str(out)]
    )
    assert code == 0
    assert len(out.read_text().splitlines()) == 31
