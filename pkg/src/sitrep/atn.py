"""Augmented Transition Networks: validated state graphs whose guarded
transitions carry action lists, driving factual-agent lifecycles.

Guards over integer intervals of a named qualifier are data (serializable,
checkable for mutual exclusion); arbitrary predicate guards are allowed but
trusted.  Stepping is deterministic: at most one transition fires per input,
no input ever escapes a terminal state, and an unmatched input stays put.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, Union

from .ontology import ValidationReport

if TYPE_CHECKING:  # pragma: no cover
    from .fsf import FSF


@dataclass(frozen=True)
class InformAll:
    """Announce the agent to every live agent (new fact entered the scene)."""


@dataclass(frozen=True)
class SupportClose:
    """Raise the action indicator of acquaintances closer than ``threshold``."""

    threshold: float = 0.3

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside (0,1]")


@dataclass(frozen=True)
class AggressOpposite:
    """Lower the action indicator of acquaintances with negative proximity."""


@dataclass(frozen=True)
class CeaseActivity:
    """The fact ended; the agent dies and leaves the acquaintance graph."""


AtnAction = Union[InformAll, SupportClose, AggressOpposite, CeaseActivity]

_ACTION_NAMES: dict[type, str] = {
    InformAll: "inform_all",
    SupportClose: "support_close",
    AggressOpposite: "aggress_opposite",
    CeaseActivity: "cease_activity",
}


def action_name(action: AtnAction) -> str:
    return _ACTION_NAMES[type(action)]


@dataclass(frozen=True)
class IntervalGuard:
    """Matches when the named qualifier holds an integer inside any interval
    (inclusive bounds)."""

    qualifier: str
    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ValueError(f"guard on {self.qualifier!r} has no intervals")
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"guard on {self.qualifier!r}: empty interval [{lo},{hi}]")

    def admits(self, value: int) -> bool:
        return any(lo <= value <= hi for lo, hi in self.intervals)

    def matches(self, ctx: Any, fsf: "FSF") -> bool:
        value = fsf.get(self.qualifier)
        if not isinstance(value, int) or isinstance(value, bool):
            return False
        return self.admits(value)


@dataclass(frozen=True)
class PredicateGuard:
    fn: Callable[[Any, "FSF"], bool]

    def matches(self, ctx: Any, fsf: "FSF") -> bool:
        return bool(self.fn(ctx, fsf))


Guard = Union[IntervalGuard, PredicateGuard]


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    guard: Guard
    actions: tuple[AtnAction, ...] = ()


@dataclass(frozen=True)
class AtnDefinition:
    name: str
    states: tuple[str, ...]
    initial: str
    terminal: frozenset[str]
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "_from",
            {s: tuple(t for t in self.transitions if t.source == s) for s in self.states},
        )

    def transitions_from(self, state: str) -> tuple[Transition, ...]:
        return self._from.get(state, ())  # type: ignore[attr-defined]


def validate_atn(defn: AtnDefinition) -> ValidationReport:
    """Structural checks: endpoints exist, terminals are sinks, interval
    guards from one state are mutually exclusive, all states reachable."""
    report = ValidationReport()
    states = set(defn.states)
    if defn.initial not in states:
        report.error(f"initial state {defn.initial!r} not among states")
    for term in defn.terminal:
        if term not in states:
            report.error(f"terminal state {term!r} not among states")
    for t in defn.transitions:
        if t.source not in states:
            report.error(f"transition from unknown state {t.source!r}")
        if t.target not in states:
            report.error(f"transition to unknown state {t.target!r}")
        if t.source in defn.terminal:
            report.error(f"terminal state {t.source!r} has an outgoing transition")

    for state in defn.states:
        outgoing = [t for t in defn.transitions if t.source == state]
        intervals = [t for t in outgoing if isinstance(t.guard, IntervalGuard)]
        for i, ta in enumerate(intervals):
            for tb in intervals[i + 1 :]:
                ga, gb = ta.guard, tb.guard
                assert isinstance(ga, IntervalGuard) and isinstance(gb, IntervalGuard)
                if ga.qualifier != gb.qualifier:
                    report.warn(
                        f"state {state!r}: guards on {ga.qualifier!r} and {gb.qualifier!r}"
                        " cannot be proven exclusive"
                    )
                    continue
                overlap = _interval_overlap(ga.intervals, gb.intervals)
                if overlap is not None:
                    report.error(
                        f"state {state!r}: guards on {ga.qualifier!r} overlap at value {overlap}"
                    )

    if defn.initial in states:
        seen = {defn.initial}
        frontier = [defn.initial]
        while frontier:
            here = frontier.pop()
            for t in defn.transitions_from(here):
                if t.target in states and t.target not in seen:
                    seen.add(t.target)
                    frontier.append(t.target)
        for state in defn.states:
            if state not in seen:
                report.warn(f"state {state!r} unreachable from {defn.initial!r}")
    return report


def _interval_overlap(
    a: tuple[tuple[int, int], ...], b: tuple[tuple[int, int], ...]
) -> int | None:
    for lo_a, hi_a in a:
        for lo_b, hi_b in b:
            lo, hi = max(lo_a, lo_b), min(hi_a, hi_b)
            if lo <= hi:
                return lo
    return None


def step(
    defn: AtnDefinition, current: str, ctx: Any, incoming: "FSF"
) -> tuple[str, tuple[AtnAction, ...]]:
    """Advance one observation: the first matching guard wins, no match stays
    put, terminal states never move."""
    if current not in defn.states:
        raise ValueError(f"unknown state {current!r} for ATN {defn.name!r}")
    if current in defn.terminal:
        return current, ()
    for t in defn.transitions_from(current):
        if t.guard.matches(ctx, incoming):
            return t.target, t.actions
    return current, ()


# ---------------------------------------------------------------------------
# Bundled definitions


def _iv(qualifier: str, *intervals: tuple[int, int]) -> IntervalGuard:
    return IntervalGuard(qualifier, intervals)


def fire_atn(support_threshold: float = 0.3) -> AtnDefinition:
    """Fire lifecycle on the fieriness value: low values burn, middle values
    mean extinguishing is underway, 8 means burnt out, 0 after having burned
    means put out for good."""
    burn = _iv("fieriness", (1, 3))
    douse = _iv("fieriness", (4, 7))
    ended = _iv("fieriness", (0, 0))
    burnt = _iv("fieriness", (8, 8))
    off = (CeaseActivity(),)
    return AtnDefinition(
        name="fire",
        states=("Creation", "Burning", "PutOut", "Off"),
        initial="Creation",
        terminal=frozenset({"Off"}),
        transitions=(
            Transition("Creation", "Burning", burn, (InformAll(),)),
            Transition("Creation", "PutOut", douse, (InformAll(),)),
            Transition("Creation", "Off", burnt, off),
            Transition("Burning", "PutOut", douse, (SupportClose(support_threshold), AggressOpposite())),
            Transition("Burning", "Off", burnt, off),
            Transition("Burning", "Off", ended, off),
            Transition("PutOut", "Burning", burn),
            Transition("PutOut", "Off", burnt, off),
            Transition("PutOut", "Off", ended, off),
        ),
    )


def platoon_atn(hitpoint_max: int = 10_000) -> AtnDefinition:
    """Rescue-team lifecycle on the hit-point value: dead at zero, in distress
    below 20% of the configured maximum, active otherwise."""
    threshold = int(0.2 * hitpoint_max)
    if threshold < 2:
        raise ValueError(f"hitpoint_max {hitpoint_max} too small for the 20% threshold")
    dead = _iv("hitPoint", (0, 0))
    low = _iv("hitPoint", (1, threshold - 1))
    healthy = _iv("hitPoint", (threshold, hitpoint_max))
    off = (CeaseActivity(),)
    return AtnDefinition(
        name="platoon",
        states=("Creation", "Active", "Distress", "Dead"),
        initial="Creation",
        terminal=frozenset({"Dead"}),
        transitions=(
            Transition("Creation", "Dead", dead, off),
            Transition("Creation", "Active", healthy, (InformAll(),)),
            Transition("Creation", "Distress", low, (InformAll(),)),
            Transition("Active", "Dead", dead, off),
            Transition("Active", "Distress", low),
            Transition("Distress", "Dead", dead, off),
            Transition("Distress", "Active", healthy),
        ),
    )


def generic_atn() -> AtnDefinition:
    """Fallback for entity classes without a dedicated lifecycle: a single
    non-terminal state absorbing every observation."""
    return AtnDefinition(name="generic", states=("Tracking",), initial="Tracking", terminal=frozenset())


# ---------------------------------------------------------------------------
# Serialization (interval guards and named actions only)


def _action_to_doc(action: AtnAction) -> Any:
    if isinstance(action, SupportClose):
        return {"action": "support_close", "threshold": action.threshold}
    return action_name(action)


def _action_from_doc(doc: Any) -> AtnAction:
    if isinstance(doc, dict):
        name = doc["action"]
        if name == "support_close":
            return SupportClose(doc.get("threshold", 0.3))
    else:
        name = doc
    by_name = {v: k for k, v in _ACTION_NAMES.items()}
    if name not in by_name:
        raise ValueError(f"unknown action {name!r}")
    return by_name[name]()


def atn_to_dict(defn: AtnDefinition) -> dict[str, Any]:
    transitions = []
    for t in defn.transitions:
        if not isinstance(t.guard, IntervalGuard):
            raise ValueError(f"ATN {defn.name!r}: predicate guards are not serializable")
        transitions.append(
            {
                "from": t.source,
                "to": t.target,
                "qualifier": t.guard.qualifier,
                "intervals": [list(iv) for iv in t.guard.intervals],
                "actions": [_action_to_doc(a) for a in t.actions],
            }
        )
    return {
        "name": defn.name,
        "states": list(defn.states),
        "initial": defn.initial,
        "terminal": sorted(defn.terminal),
        "transitions": transitions,
    }


def atn_from_dict(data: dict[str, Any]) -> AtnDefinition:
    return AtnDefinition(
        name=data["name"],
        states=tuple(data["states"]),
        initial=data["initial"],
        terminal=frozenset(data.get("terminal", ())),
        transitions=tuple(
            Transition(
                t["from"],
                t["to"],
                IntervalGuard(t["qualifier"], tuple((lo, hi) for lo, hi in t["intervals"])),
                tuple(_action_from_doc(a) for a in t.get("actions", ())),
            )
            for t in data.get("transitions", ())
        ),
    )
