"""The representation-layer multiagent engine.

Incoming FSFs are routed by a generative rule (absorb by identity, adopt by
proximity, else create), each factual agent runs its ATN and accumulates
history, agents exchange inform/support/aggress messages, and the full
pairwise acquaintance graph is recomputed every cycle.  All activity is
serialized in deterministic discrete cycles: identical inputs and config give
byte-identical snapshot streams.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, NamedTuple, Optional

import numpy as np

from . import atn as atn_mod
from .atn import (
    AggressOpposite,
    AtnAction,
    AtnDefinition,
    CeaseActivity,
    InformAll,
    SupportClose,
    action_name,
    fire_atn,
    generic_atn,
    platoon_atn,
)
from .fsf import FSF, EntityId, format_fsf
from .ontology import OntologySchema, bundled_rcr_schema
from .proximity import (
    ProximityBreakdown,
    ProximityConfig,
    sigmoid_bump_array,
    spatial_proximity,
    temporal_proximity,
    total_proximity,
)


@dataclass(frozen=True)
class EngineConfig:
    proximity: ProximityConfig = field(default_factory=ProximityConfig)
    adoption_threshold: float = 0.5
    support_delta: float = 0.5
    aggress_delta: float = 0.5
    putout_decay: float = 0.5
    pi_alpha: float = 1.0
    pi_beta: float = 1.0
    hitpoint_max: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.adoption_threshold <= 1.0:
            raise ValueError(f"adoption_threshold {self.adoption_threshold} outside (0,1]")
        if not 0.0 < self.putout_decay < 1.0:
            raise ValueError(f"putout_decay {self.putout_decay} outside (0,1)")
        if self.hitpoint_max < 10:
            raise ValueError(f"hitpoint_max {self.hitpoint_max} too small")


def engine_config_to_dict(cfg: EngineConfig) -> dict[str, Any]:
    return {
        "proximity": {
            "temporal_scale": cfg.proximity.temporal_scale,
            "spatial_scale": cfg.proximity.spatial_scale,
            "prune_epsilon": cfg.proximity.prune_epsilon,
        },
        "adoption_threshold": cfg.adoption_threshold,
        "support_delta": cfg.support_delta,
        "aggress_delta": cfg.aggress_delta,
        "putout_decay": cfg.putout_decay,
        "pi_alpha": cfg.pi_alpha,
        "pi_beta": cfg.pi_beta,
        "hitpoint_max": cfg.hitpoint_max,
        "seed": cfg.seed,
    }


def engine_config_from_dict(data: dict[str, Any]) -> EngineConfig:
    prox = data.get("proximity", {})
    return EngineConfig(
        proximity=ProximityConfig(
            temporal_scale=prox.get("temporal_scale", 1.0),
            spatial_scale=prox.get("spatial_scale", 10_000.0),
            prune_epsilon=prox.get("prune_epsilon", 0.001),
        ),
        adoption_threshold=data.get("adoption_threshold", 0.5),
        support_delta=data.get("support_delta", 0.5),
        aggress_delta=data.get("aggress_delta", 0.5),
        putout_decay=data.get("putout_decay", 0.5),
        pi_alpha=data.get("pi_alpha", 1.0),
        pi_beta=data.get("pi_beta", 1.0),
        hitpoint_max=data.get("hitpoint_max", 10_000),
        seed=data.get("seed", 0),
    )


@dataclass
class Indicators:
    """Action indicator (salience/strength, >= 0) and probability indicator
    (outlook; negative means a saturated, unsolvable trajectory)."""

    ai: float = 0.0
    pi: float = 0.0
    history: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class FactualAgent:
    id: int
    entity_id: EntityId
    atn: str
    state: str
    history: list[FSF]
    indicators: Indicators = field(default_factory=Indicators)
    acquaintances: dict[int, ProximityBreakdown] = field(default_factory=dict)
    alive: bool = True
    created_cycle: int = 0
    pending_ai_delta: float = 0.0

    @property
    def current_fsf(self) -> FSF:
        return self.history[-1]


class IngestOutcome(NamedTuple):
    kind: str  # created | absorbed | adopted | queued
    agent_id: Optional[int]
    stale: bool = False


@dataclass(frozen=True)
class CycleReport:
    cycle: int
    ingested: int
    created: int
    messages: int


@dataclass(frozen=True)
class SnapshotAgent:
    id: int
    entity: str
    class_name: str
    state: str
    ai: float
    pi: float
    fsf: str
    acq: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class Snapshot:
    cycle: int
    frozen: bool
    agents: tuple[SnapshotAgent, ...]


def round9(x: float) -> float:
    """Canonical 9-significant-digit value used in every exported document."""
    return float(f"{x:.9g}")


def snapshot_to_dict(snap: Snapshot) -> dict[str, Any]:
    return {
        "cycle": snap.cycle,
        "frozen": snap.frozen,
        "agents": [
            {
                "id": a.id,
                "entity": a.entity,
                "class": a.class_name,
                "state": a.state,
                "ai": round9(a.ai),
                "pi": round9(a.pi),
                "fsf": a.fsf,
                "acq": [[other, round9(total)] for other, total in a.acq],
            }
            for a in snap.agents
        ],
    }


def snapshot_to_json(snap: Snapshot) -> str:
    return json.dumps(snapshot_to_dict(snap), separators=(",", ":"))


# ---------------------------------------------------------------------------
# Indicator formulas, keyed by ATN name.

IndicatorFn = Callable[[FactualAgent, EngineConfig], tuple[float, float]]


def _int_qualifier(agent: FactualAgent, name: str) -> int:
    value = agent.current_fsf.get(name)
    return value if isinstance(value, int) and not isinstance(value, bool) else 0


def fire_indicators(agent: FactualAgent, cfg: EngineConfig) -> tuple[float, float]:
    """Burning fires weigh intensity by room to spread; extinguishing fires
    decay geometrically and score outlook by how far the dousing has come."""
    fieriness = _int_qualifier(agent, "fieriness")
    if agent.state == "Burning":
        idn = _int_qualifier(agent, "inDangerNeighbours")
        bn = _int_qualifier(agent, "burningNeighbours")
        return (fieriness / 3.0) * (1.0 + idn), cfg.pi_alpha * idn - cfg.pi_beta * bn
    if agent.state == "PutOut":
        return cfg.putout_decay * agent.indicators.ai, float(8 - fieriness)
    return 0.0, 0.0


def platoon_indicators(agent: FactualAgent, cfg: EngineConfig) -> tuple[float, float]:
    hit_point = _int_qualifier(agent, "hitPoint")
    team = _int_qualifier(agent, "team")
    fires = _int_qualifier(agent, "fires")
    return (hit_point / cfg.hitpoint_max) * (1.0 + team), float(fires)


def zero_indicators(agent: FactualAgent, cfg: EngineConfig) -> tuple[float, float]:
    return 0.0, 0.0


DEFAULT_INDICATOR_FNS: dict[str, IndicatorFn] = {
    "fire": fire_indicators,
    "platoon": platoon_indicators,
}

DEFAULT_ATN_BY_CLASS = {
    "Fire": "fire",
    "FireBrigade": "platoon",
    "PoliceForce": "platoon",
    "AmbulanceTeam": "platoon",
}

# Below this many live agents the vectorized pair prefilter costs more than it
# saves.
_VECTORIZE_MIN_AGENTS = 48

# Sentinel p_s outside [-1,1]: the exact pass must consult the table.
_PS_UNKNOWN = 2.0


@lru_cache(maxsize=4)
def _triu_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


class Engine:
    """Single-writer simulation engine; snapshots are immutable values."""

    def __init__(
        self,
        schema: Optional[OntologySchema] = None,
        config: Optional[EngineConfig] = None,
        atns: Optional[dict[str, AtnDefinition]] = None,
        atn_by_class: Optional[dict[str, str]] = None,
        indicator_fns: Optional[dict[str, IndicatorFn]] = None,
    ):
        self.schema = schema if schema is not None else bundled_rcr_schema()
        self.config = config if config is not None else EngineConfig()
        self.atns = atns if atns is not None else {
            "fire": fire_atn(),
            "platoon": platoon_atn(self.config.hitpoint_max),
            "generic": generic_atn(),
        }
        self.atn_by_class = dict(DEFAULT_ATN_BY_CLASS if atn_by_class is None else atn_by_class)
        self.indicator_fns = dict(DEFAULT_INDICATOR_FNS if indicator_fns is None else indicator_fns)
        self._reset_state()

    def _reset_state(self) -> None:
        self.cycle = 0  # completed cycles
        self.frozen = False
        self.agents: dict[int, FactualAgent] = {}
        self._next_id = 1
        self._by_entity: dict[EntityId, int] = {}
        self._pending: list[FSF] = []
        self._backlog: list[FSF] = []  # received while frozen
        self._queued_actions: list[tuple[int, AtnAction]] = []
        self.action_log: list[tuple[int, int, str]] = []  # (cycle, agent id, action)
        self.fsfs_fed = 0

    # -- feeding ------------------------------------------------------------

    def submit(self, fsf: FSF) -> None:
        """Queue an observation for the next executed cycle."""
        self.fsfs_fed += 1
        (self._backlog if self.frozen else self._pending).append(fsf)

    def ingest(self, fsf: FSF) -> IngestOutcome:
        """Route one observation now (frozen engines queue it instead).

        Never drops anything: same live entity absorbs, otherwise the closest
        live agent above the adoption threshold adopts, otherwise a new agent
        is created and immediately stepped.
        """
        self.fsfs_fed += 1
        if self.frozen:
            self._backlog.append(fsf)
            return IngestOutcome("queued", None)
        return self._route(fsf)

    def _route(self, fsf: FSF) -> IngestOutcome:
        owner = self._by_entity.get(fsf.entity_id)
        if owner is not None:
            stale = self._absorb(self.agents[owner], fsf)
            return IngestOutcome("absorbed", owner, stale)

        best: Optional[FactualAgent] = None
        best_total = -2.0
        theta = self.config.adoption_threshold
        prox = self.config.proximity
        for agent in self.agents.values():  # id order; strict '>' keeps lowest id on ties
            if not agent.alive:
                continue
            other = agent.current_fsf
            # p_t and p_e each bound the total from above (p_s <= 1), so either
            # alone falling under the threshold rules the candidate out cheaply.
            if temporal_proximity(other.time - fsf.time, prox) < theta:
                continue
            if spatial_proximity(other.localisation, fsf.localisation, prox) < theta:
                continue
            pb = total_proximity(other, fsf, self.schema.table, prox)
            if pb.total >= theta and pb.total > best_total:
                best, best_total = agent, pb.total
        if best is not None:
            stale = self._absorb(best, fsf)
            return IngestOutcome("adopted", best.id, stale)

        agent = FactualAgent(
            id=self._next_id,
            entity_id=fsf.entity_id,
            atn=self.atn_by_class.get(fsf.entity_id.name_class, "generic"),
            state=self.atns[self.atn_by_class.get(fsf.entity_id.name_class, "generic")].initial,
            history=[fsf],
            created_cycle=self.cycle,
        )
        self._next_id += 1
        self.agents[agent.id] = agent
        self._by_entity[fsf.entity_id] = agent.id
        self._step_atn(agent, fsf)
        return IngestOutcome("created", agent.id)

    def _absorb(self, agent: FactualAgent, fsf: FSF) -> bool:
        """Append to history (time-ordered); stale observations skip the ATN."""
        stale = fsf.time < agent.current_fsf.time
        if stale:
            idx = len(agent.history)
            while idx > 0 and agent.history[idx - 1].time > fsf.time:
                idx -= 1
            agent.history.insert(idx, fsf)
        else:
            agent.history.append(fsf)
            if agent.alive:
                self._step_atn(agent, fsf)
        return stale

    def _step_atn(self, agent: FactualAgent, fsf: FSF) -> None:
        defn = self.atns[agent.atn]
        next_state, actions = atn_mod.step(defn, agent.state, agent, fsf)
        agent.state = next_state
        for action in actions:
            self._queued_actions.append((agent.id, action))
            self.action_log.append((self.cycle, agent.id, action_name(action)))
        if next_state in defn.terminal and agent.alive:
            agent.alive = False
            agent.acquaintances.clear()
            self._by_entity.pop(agent.entity_id, None)

    # -- cycle --------------------------------------------------------------

    def run_cycle(self, force: bool = False) -> CycleReport:
        """One deterministic cycle: ingest scheduled FSFs, deliver messages,
        rebuild the acquaintance graph, update indicators, advance the clock."""
        if self.frozen and not force:
            raise RuntimeError("engine is frozen")
        executing = self.cycle

        # Observations queued while frozen go first, in arrival order.
        if self._backlog:
            self._pending = self._backlog + self._pending
            self._backlog = []
        batch, self._pending = self._pending, []
        created = 0
        for fsf in batch:
            if self._route(fsf).kind == "created":
                created += 1

        messages = self._deliver_messages()
        self._recompute_acquaintances()
        for agent in self.agents.values():
            self.update_indicators(agent)
        self.cycle = executing + 1
        return CycleReport(cycle=executing, ingested=len(batch), created=created, messages=messages)

    def step_cycles(self, n: int) -> list[CycleReport]:
        """Run exactly n cycles regardless of the frozen flag (which persists)."""
        if n < 1:
            raise ValueError(f"step count {n} must be >= 1")
        return [self.run_cycle(force=True) for _ in range(n)]

    def _deliver_messages(self) -> int:
        queued, self._queued_actions = self._queued_actions, []
        queued.sort(key=lambda pair: pair[0])  # stable: per-sender emission order kept
        live_ids = [a.id for a in self.agents.values() if a.alive]
        messages = 0
        for sender_id, action in queued:
            sender = self.agents[sender_id]
            if isinstance(action, InformAll):
                messages += len(live_ids) - (1 if sender.alive else 0)
            elif isinstance(action, SupportClose):
                for other_id in sorted(sender.acquaintances):
                    pb = sender.acquaintances[other_id]
                    other = self.agents.get(other_id)
                    if pb.total > action.threshold and other is not None and other.alive:
                        other.pending_ai_delta += self.config.support_delta * pb.total
                        messages += 1
            elif isinstance(action, AggressOpposite):
                for other_id in sorted(sender.acquaintances):
                    pb = sender.acquaintances[other_id]
                    other = self.agents.get(other_id)
                    if pb.total < 0.0 and other is not None and other.alive:
                        other.pending_ai_delta -= self.config.aggress_delta * abs(pb.total)
                        messages += 1
            elif isinstance(action, CeaseActivity):
                pass  # death already applied when the terminal state was entered
        return messages

    def _recompute_acquaintances(self) -> None:
        """Full pairwise proximity among live agents at the current cycle,
        pruning |total| <= epsilon; stored symmetrically on both ends.

        The arithmetic below is total_proximity inlined operation for
        operation (bit-identical results); the candidate prefilter only cuts
        pairs that cannot clear the pruning threshold.
        """
        live = [a for a in self.agents.values() if a.alive]
        for agent in live:
            agent.acquaintances.clear()
        if len(live) < 2:
            return
        cfg = self.config.proximity
        eps, t_scale, e_scale = cfg.prune_epsilon, cfg.temporal_scale, cfg.spatial_scale
        at_cycle = self.cycle
        lookup = self.schema.table.lookup
        exp, dist = math.exp, math.dist
        fsfs = [a.current_fsf for a in live]
        times = [f.time for f in fsfs]
        ages = [abs(t - at_cycle) for t in times]
        locs = [f.localisation for f in fsfs]
        for i, j, ps_hint in self._candidate_pairs(live):
            # The prefilter resolves p_s itself for rule-free distinct-entity
            # pairs; the sentinel 2.0 means "ask the table".
            p_s = lookup(fsfs[i], fsfs[j]) if ps_hint > 1.5 else ps_hint
            if p_s == 0.0:
                continue
            dt = max(abs(times[i] - times[j]), ages[i], ages[j])
            u = abs(dt / t_scale)
            p_t = 0.0 if u > 700.0 else 4.0 / (exp(u) + 2.0 + exp(-u))
            u = abs(dist(locs[i], locs[j]) / e_scale)
            p_e = 0.0 if u > 700.0 else 4.0 / (exp(u) + 2.0 + exp(-u))
            total = p_t * p_e * p_s
            if abs(total) > eps:
                pb = ProximityBreakdown(p_t, p_e, p_s, total)
                live[i].acquaintances[live[j].id] = pb
                live[j].acquaintances[live[i].id] = pb

    def _candidate_pairs(self, live: list[FactualAgent]):
        n = len(live)
        if n < _VECTORIZE_MIN_AGENTS:
            return ((i, j, _PS_UNKNOWN) for i in range(n) for j in range(i + 1, n))
        return self._candidate_pairs_vectorized(live)

    def _candidate_pairs_vectorized(self, live: list[FactualAgent]):
        """Upper bound |total| per pair in bulk and keep only pairs that can
        clear the pruning threshold; exact values are recomputed per survivor.

        Where no override rule can apply and the entities differ, p_s is the
        class-pair base value, so it is resolved here and the exact pass skips
        the table walk.
        """
        cfg = self.config.proximity
        iu, ju = _triu_pairs(len(live))
        times = np.array([a.current_fsf.time for a in live], dtype=np.float64)
        xs = np.array([a.current_fsf.localisation.x for a in live], dtype=np.float64)
        ys = np.array([a.current_fsf.localisation.y for a in live], dtype=np.float64)
        age = np.abs(times - float(self.cycle))
        dt = np.maximum(np.abs(times[iu] - times[ju]), np.maximum(age[iu], age[ju]))
        p_t = sigmoid_bump_array(dt / cfg.temporal_scale)
        dist = np.hypot(xs[iu] - xs[ju], ys[iu] - ys[ju])
        p_e = sigmoid_bump_array(dist / cfg.spatial_scale)

        table = self.schema.table
        class_names = sorted({a.entity_id.name_class for a in live})
        class_index = {name: k for k, name in enumerate(class_names)}
        k = len(class_names)
        bound = np.empty((k, k))
        base = np.empty((k, k))
        ruled = np.zeros((k, k), dtype=bool)
        for ca, ia in class_index.items():
            for cb, ib in class_index.items():
                bound[ia, ib] = table.value_bound(ca, cb)
                base[ia, ib] = table.base_value(ca, cb)
                ruled[ia, ib] = table.has_rules(ca, cb)
        ci = np.array([class_index[a.entity_id.name_class] for a in live])
        cap = p_t * p_e * bound[ci[iu], ci[ju]]

        entity_codes: dict[EntityId, int] = {}
        codes = np.array([entity_codes.setdefault(a.entity_id, len(entity_codes)) for a in live])
        same_entity = codes[iu] == codes[ju]

        eps = cfg.prune_epsilon
        keep = np.nonzero((cap > eps * (1.0 - 1e-9)) | same_entity)[0]
        needs_table = ruled[ci[iu[keep]], ci[ju[keep]]] | same_entity[keep]
        ps_hint = np.where(needs_table, _PS_UNKNOWN, base[ci[iu[keep]], ci[ju[keep]]])
        return zip(iu[keep].tolist(), ju[keep].tolist(), ps_hint.tolist())

    def update_indicators(self, agent: FactualAgent) -> Indicators:
        """Apply this cycle's indicator formula plus accumulated message
        deltas; dead agents pin at zero.  Appends to the per-cycle series."""
        if not agent.alive:
            ai, pi = 0.0, 0.0
        else:
            fn = self.indicator_fns.get(agent.atn, zero_indicators)
            ai_base, pi = fn(agent, self.config)
            ai = max(0.0, ai_base + agent.pending_ai_delta)
        agent.pending_ai_delta = 0.0
        agent.indicators.ai = ai
        agent.indicators.pi = pi
        agent.indicators.history.append((ai, pi))
        return agent.indicators

    # -- controls -----------------------------------------------------------

    def freeze(self) -> bool:
        """Stop advancing; observations queue loss-free.  No-op when frozen."""
        changed = not self.frozen
        self.frozen = True
        return changed

    def reanimate(self) -> bool:
        """Resume; queued observations replay in arrival order next cycle."""
        changed = self.frozen
        self.frozen = False
        return changed

    def reset(self) -> None:
        """Back to cycle 0 with no agents; configuration and seed are kept."""
        self._reset_state()

    # -- views --------------------------------------------------------------

    @property
    def queued_count(self) -> int:
        return len(self._pending) + len(self._backlog)

    @property
    def history_total(self) -> int:
        return sum(len(a.history) for a in self.agents.values())

    def snapshot(self) -> Snapshot:
        rows = []
        for agent in sorted(self.agents.values(), key=lambda a: a.id):
            rows.append(
                SnapshotAgent(
                    id=agent.id,
                    entity=str(agent.entity_id),
                    class_name=agent.entity_id.name_class,
                    state=agent.state,
                    ai=agent.indicators.ai,
                    pi=agent.indicators.pi,
                    fsf=format_fsf(agent.current_fsf),
                    acq=tuple(sorted((k, v.total) for k, v in agent.acquaintances.items())),
                )
            )
        return Snapshot(cycle=self.cycle, frozen=self.frozen, agents=tuple(rows))

    def agent_details(self) -> dict[int, dict[str, Any]]:
        """Inspector payloads: the snapshot row plus creation cycle and liveness."""
        details = {}
        for agent in self.agents.values():
            details[agent.id] = {
                "id": agent.id,
                "entity": str(agent.entity_id),
                "class": agent.entity_id.name_class,
                "state": agent.state,
                "ai": round9(agent.indicators.ai),
                "pi": round9(agent.indicators.pi),
                "fsf": format_fsf(agent.current_fsf),
                "created": agent.created_cycle,
                "alive": agent.alive,
                "acq": [[k, round9(v.total)] for k, v in sorted(agent.acquaintances.items())],
            }
        return details
