"""Scenario files: newline-delimited observation replays.

Line 1 is a JSON meta document; every following line is ``<cycle> <fsf-text>``
with cycles nondecreasing.  The module also ships a deterministic synthetic
fire-outbreak generator and a small hand-built reference scenario (fig9) used
by the acceptance suite and the demo console.
"""
from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Any, Iterable, Optional

from .engine import Engine, Snapshot, snapshot_to_json
from .fsf import FSF, Coord, EntityId, FsfParseError, format_fsf, parse_fsf
from .ontology import bundled_rcr_schema, validate_fsf

log = logging.getLogger("sitrep.scenario")


@dataclass(frozen=True)
class ScenarioMeta:
    name: str = "scenario"
    spatial_scale: float = 10_000.0
    temporal_scale: float = 1.0
    seed: int = 0
    description: str = ""


@dataclass(frozen=True)
class Scenario:
    meta: ScenarioMeta = field(default_factory=ScenarioMeta)
    events: tuple[tuple[int, str], ...] = ()

    @property
    def cycles(self) -> int:
        """Cycles needed to play everything out (last event cycle + 1)."""
        return self.events[-1][0] + 1 if self.events else 0


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def load_scenario(stream: Iterable[str]) -> Scenario:
    """Parse and validate a scenario; any malformed line rejects the file.

    Every FSF must parse and validate against the bundled schema.  An event
    whose FSF time disagrees with its cycle is kept (the observation's own
    timestamp is authoritative) with a warning.
    """
    schema = bundled_rcr_schema()
    meta: Optional[ScenarioMeta] = None
    events: list[tuple[int, str]] = []
    last_cycle = -1
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if meta is None:
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"bad meta document: {exc}", line_no) from None
            try:
                meta = ScenarioMeta(**doc)
            except TypeError as exc:
                raise ScenarioError(f"bad meta document: {exc}", line_no) from None
            continue
        head, _, fsf_text = line.partition(" ")
        try:
            cycle = int(head)
        except ValueError:
            raise ScenarioError(f"expected '<cycle> <fsf>', got {head!r}", line_no) from None
        if cycle < 0:
            raise ScenarioError(f"negative cycle {cycle}", line_no)
        if cycle < last_cycle:
            raise ScenarioError(f"cycle regression {last_cycle} -> {cycle}", line_no)
        last_cycle = cycle
        if not fsf_text.strip():
            raise ScenarioError("missing FSF text", line_no)
        try:
            fsf = parse_fsf(fsf_text, schema)
        except FsfParseError as exc:
            raise ScenarioError(str(exc), line_no) from None
        report = validate_fsf(schema, fsf)
        if not report.ok:
            raise ScenarioError("; ".join(report.errors), line_no)
        for warning in report.warnings:
            log.warning("line %d: %s", line_no, warning)
        if fsf.time != cycle:
            log.warning(
                "line %d: event cycle %d but FSF time %d; the FSF time stands",
                line_no, cycle, fsf.time,
            )
        events.append((cycle, fsf_text))
    if meta is None:
        raise ScenarioError("missing meta line", 1)
    return Scenario(meta=meta, events=tuple(events))


def load_scenario_path(path: str | Path) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        return load_scenario(handle)


def format_scenario(scenario: Scenario) -> str:
    meta = scenario.meta
    lines = [
        json.dumps(
            {
                "name": meta.name,
                "spatial_scale": meta.spatial_scale,
                "temporal_scale": meta.temporal_scale,
                "seed": meta.seed,
                "description": meta.description,
            },
            separators=(", ", ": "),
        )
    ]
    lines += [f"{cycle} {text}" for cycle, text in scenario.events]
    return "\n".join(lines) + "\n"


def bundled_scenario_path(name: str = "fig9") -> Path:
    return Path(str(resources.files("sitrep").joinpath("data", f"{name}.scenario")))


# ---------------------------------------------------------------------------
# Replay


def run_scenario(engine: Engine, scenario: Scenario, on_cycle=None) -> int:
    """Drive the engine through the whole scenario; returns cycles executed."""
    by_cycle: dict[int, list[FSF]] = {}
    for cycle, text in scenario.events:
        by_cycle.setdefault(cycle, []).append(parse_fsf(text, engine.schema))
    cycles = scenario.cycles
    for cycle in range(cycles):
        for fsf in by_cycle.get(cycle, ()):
            engine.submit(fsf)
        engine.run_cycle()
        if on_cycle is not None:
            on_cycle(engine.snapshot())
    return cycles


def export_snapshots(engine: Engine, scenario: Scenario, sink: IO[str]) -> int:
    """Replay the scenario writing one snapshot document per cycle."""

    def write(snapshot: Snapshot) -> None:
        sink.write(snapshot_to_json(snapshot) + "\n")

    return run_scenario(engine, scenario, on_cycle=write)


# ---------------------------------------------------------------------------
# Synthetic fire-outbreak generator


def generate_fire_demo(
    seed: int,
    n_buildings: int,
    n_ignitions: int,
    spread_prob: float,
    n_brigades: int,
    cycles: int,
    spacing: int = 20_000,
) -> Scenario:
    """Deterministic toy outbreak on a square grid.

    Ignited buildings ramp fieriness 1 -> 2 -> 3 and spread to 4-neighbours
    with ``spread_prob`` per cycle; scripted brigades each pick the hottest
    unattended fire and douse it through 4 -> 7, after which it goes out.
    Ignitions start at the grid centre; randomness drives only the spreading.
    """
    if min(n_buildings, cycles) <= 0 or n_ignitions < 0 or n_brigades < 0:
        raise ValueError("parameters must be positive")
    rng = random.Random(seed)
    side = math.isqrt(n_buildings - 1) + 1
    coords = {i: Coord((i % side) * spacing, (i // side) * spacing) for i in range(n_buildings)}

    def neighbours(i: int) -> list[int]:
        row, col = divmod(i, side)
        out = []
        for r, c in ((row - 1, col), (row + 1, col), (row, col - 1), (row, col + 1)):
            j = r * side + c
            if 0 <= r < side and 0 <= c < side and j < n_buildings:
                out.append(j)
        return out

    centre = ((side - 1) / 2.0, (side - 1) / 2.0)
    by_centrality = sorted(
        range(n_buildings),
        key=lambda i: ((i // side - centre[0]) ** 2 + (i % side - centre[1]) ** 2, i),
    )
    fieriness = {i: 0 for i in range(n_buildings)}
    burned: set[int] = set()
    finished: set[int] = set()
    for i in by_centrality[: min(n_ignitions, n_buildings)]:
        fieriness[i] = 1
        burned.add(i)

    depots = {b: Coord(b * 3 * spacing, -2 * spacing) for b in range(n_brigades)}
    assignment: dict[int, Optional[int]] = {b: None for b in range(n_brigades)}

    events: list[tuple[int, str]] = []

    def emit(cycle: int, fsf: FSF) -> None:
        events.append((cycle, format_fsf(fsf)))

    for cycle in range(cycles):
        active = [i for i in range(n_buildings) if 1 <= fieriness[i] <= 7]
        ending = [i for i in sorted(burned - finished) if fieriness[i] == 0]
        for i in sorted(active) + ending:
            f = fieriness[i]
            idn = sum(1 for j in neighbours(i) if j not in burned)
            bn = sum(1 for j in neighbours(i) if 1 <= fieriness[j] <= 7)
            emit(
                cycle,
                FSF(
                    entity_id=EntityId("fire", i),
                    qualifiers=(
                        ("fieriness", f),
                        ("inDangerNeighbours", idn),
                        ("burningNeighbours", bn),
                    ),
                    localisation=coords[i],
                    time=cycle,
                ),
            )
            if i in ending:
                finished.add(i)
        for b in range(n_brigades):
            target = assignment[b]
            quals: list[tuple[str, Any]] = [
                ("hitPoint", 10_000),
                ("fires", min(100, len(active))),
                ("team", min(100, n_brigades)),
            ]
            if target is not None:
                quals += [("action", "extinguish"), ("target", EntityId("building", target))]
                loc = coords[target]
            else:
                quals += [("action", "patrol")]
                loc = depots[b]
            emit(
                cycle,
                FSF(EntityId("fireBrigade", b + 1), tuple(quals), localisation=loc, time=cycle),
            )

        # Advance world state for the next cycle.
        igniting: set[int] = set()
        for i in sorted(active):
            if fieriness[i] > 3:
                continue
            for j in neighbours(i):
                if j not in burned and rng.random() < spread_prob:
                    igniting.add(j)
        for i in sorted(active):
            f = fieriness[i]
            if 1 <= f <= 2:
                fieriness[i] = f + 1
            elif 4 <= f <= 6:
                fieriness[i] = f + 1
            elif f == 7:
                fieriness[i] = 0  # doused, one closing observation follows
        for j in sorted(igniting):
            fieriness[j] = 1
            burned.add(j)
        # Brigades re-target: hottest fully developed fire first (younger fires
        # have not yet been reported as priority targets).
        burning = [i for i in range(n_buildings) if fieriness[i] == 3]
        proxy = {
            i: (fieriness[i] / 3.0) * (1 + sum(1 for j in neighbours(i) if j not in burned))
            for i in burning
        }
        queue = sorted(burning, key=lambda i: (-proxy[i], i))
        taken: set[int] = set()
        for b in range(n_brigades):
            current = assignment[b]
            if current is not None and 4 <= fieriness[current] <= 7:
                taken.add(current)
                continue  # finish the job first
            assignment[b] = None
            for i in queue:
                if i not in taken:
                    assignment[b] = i
                    taken.add(i)
                    fieriness[i] = 4
                    break

    meta = ScenarioMeta(
        name=f"fire-demo-{seed}",
        seed=seed,
        description=(
            f"synthetic outbreak: {n_buildings} buildings, {n_ignitions} ignitions,"
            f" spread {spread_prob}, {n_brigades} brigades, {cycles} cycles"
        ),
    )
    return Scenario(meta=meta, events=tuple(events))


# ---------------------------------------------------------------------------
# Bundled reference scenario


def fig9_scenario() -> Scenario:
    """Three fires with distinct trajectories plus one dousing brigade.

    By cycle 31: fire#129769672 has been in the dousing stage for six cycles
    (salience decayed near zero, positive outlook), fire#268425221 burns
    boxed-in by burnt neighbours (negative outlook), and fire#266324026 is a
    fresh fire with room to spread (high salience, positive outlook).
    """
    events: list[tuple[int, str]] = []
    loc_a, loc_b, loc_c = Coord(22941200, 3525000), Coord(23041200, 3525000), Coord(22991200, 3525000)

    def fire(cycle: int, num: int, f: int, idn: int, bn: int, loc: Coord) -> None:
        fsf = FSF(
            EntityId("fire", num),
            (("fieriness", f), ("inDangerNeighbours", idn), ("burningNeighbours", bn)),
            localisation=loc,
            time=cycle,
        )
        events.append((cycle, format_fsf(fsf)))

    for cycle in range(5, 31):
        f = {5: 1, 6: 2}.get(cycle, 3)
        if cycle == 25:
            f = 4
        elif cycle >= 26:
            f = 5
        fire(cycle, 129769672, f, 2, 1, loc_a)
    for cycle in range(10, 31):
        idn = max(0, 3 - (cycle - 10) // 2)
        fire(cycle, 268425221, 1, idn, 4 - idn, loc_b)
    for cycle in range(21, 29):
        fire(cycle, 266324026, 1, 5, 3, loc_c)
    # The console sample observation, spelled with qualifier aliases.
    events.append((29, "(fire#266324026, f, 1, bn, 3, idn, 5, l, 22991200|3525000, t, 29)"))

    def brigade(cycle: int, action: str, target: Optional[int], loc: Coord) -> None:
        quals: list[tuple[str, Any]] = [("hitPoint", 10_000), ("fires", 3), ("team", 2), ("action", action)]
        if target is not None:
            quals.append(("target", EntityId("building", target)))
        fsf = FSF(EntityId("fireBrigade", 77), tuple(quals), localisation=loc, time=cycle)
        events.append((cycle, format_fsf(fsf)))

    brigade(24, "move", 129769672, Coord(22946200, 3525000))
    for cycle in range(25, 31):
        brigade(cycle, "extinguish", 129769672, loc_a)

    events.sort(key=lambda ev: ev[0])  # stable: per-cycle emission order preserved
    meta = ScenarioMeta(
        name="fig9",
        seed=0,
        description="three-fire reference situation: dousing, boxed-in, and fresh outbreak",
    )
    return Scenario(meta=meta, events=tuple(events))
