"""Observation object model, entity class schemas, and the semantic proximity table.

The six abstract observation kinds split into two families (physical
entities vs virtual activities).  A concrete schema instantiates entity
classes with qualifier signatures; the bundled schema covers the rescue
simulation domain (platoon actors plus the four incident phenomena).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, Any, Iterable, Optional

if TYPE_CHECKING:  # pragma: no cover
    from .fsf import FSF


class Family(str, Enum):
    PHYSICAL_ENTITY = "PhysicalEntity"
    VIRTUAL_ACTIVITY = "VirtualActivity"


class Kind(str, Enum):
    PASSIVE = "Passive"
    ACTOR = "Actor"
    MEANS = "Means"
    PHENOMENON = "Phenomenon"
    ACTION = "Action"
    MESSAGE = "Message"


_FAMILY_OF_KIND = {
    Kind.PASSIVE: Family.PHYSICAL_ENTITY,
    Kind.ACTOR: Family.PHYSICAL_ENTITY,
    Kind.MEANS: Family.PHYSICAL_ENTITY,
    Kind.PHENOMENON: Family.VIRTUAL_ACTIVITY,
    Kind.ACTION: Family.VIRTUAL_ACTIVITY,
    Kind.MESSAGE: Family.VIRTUAL_ACTIVITY,
}


@dataclass(frozen=True)
class EntityKind:
    """One of the six observation kinds together with its family."""

    family: Family
    kind: Kind

    def __post_init__(self) -> None:
        expected = _FAMILY_OF_KIND[self.kind]
        if self.family is not expected:
            raise ValueError(f"kind {self.kind.value} belongs to family {expected.value}")

    @classmethod
    def of(cls, kind: Kind | str) -> "EntityKind":
        kind = Kind(kind)
        return cls(_FAMILY_OF_KIND[kind], kind)


class ValueType(str, Enum):
    INTEGER = "Integer"
    REAL = "Real"
    ENUM_TOKEN = "EnumToken"
    ENTITY_REF = "EntityRef"
    COORDINATE = "Coordinate"


@lru_cache(maxsize=4096)
def normalize_key(key: str) -> str:
    """Fold a qualifier key for lookup: case-insensitive, internal spaces dropped."""
    return key.replace(" ", "").lower()


@dataclass(frozen=True)
class QualifierSpec:
    name: str
    value_type: ValueType
    aliases: tuple[str, ...] = ()
    range: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.range is not None:
            lo, hi = self.range
            if lo > hi:
                raise ValueError(f"qualifier {self.name}: empty range {self.range}")

    def matches(self, key: str) -> bool:
        folded = normalize_key(key)
        if folded == normalize_key(self.name):
            return True
        return any(folded == normalize_key(a) for a in self.aliases)


@dataclass(frozen=True)
class EntityClass:
    name: str
    kind: EntityKind
    qualifiers: tuple[QualifierSpec, ...] = ()

    def __post_init__(self) -> None:
        names = [normalize_key(q.name) for q in self.qualifiers]
        if len(set(names)) != len(names):
            raise ValueError(f"class {self.name}: duplicate qualifier names")
        aliases = [normalize_key(a) for q in self.qualifiers for a in q.aliases]
        if len(set(aliases)) != len(aliases):
            raise ValueError(f"class {self.name}: duplicate aliases")

    def resolve(self, key: str) -> Optional[QualifierSpec]:
        for q in self.qualifiers:
            if q.matches(key):
                return q
        return None


@dataclass(frozen=True)
class RuleCondition:
    """One qualifier condition of an override rule, applied to one side of a pair.

    ``on`` names the class whose FSF the condition tests.  ``op`` is either
    ``eq`` (qualifier equals ``value``) or ``targets_other`` (qualifier is an
    entity reference whose number equals the other FSF's entity number).
    """

    on: str
    qualifier: str
    op: str
    value: Any = None

    def __post_init__(self) -> None:
        if self.op not in ("eq", "targets_other"):
            raise ValueError(f"unknown rule condition op {self.op!r}")


@dataclass(frozen=True)
class SemanticRule:
    classes: tuple[str, str]
    value: float
    when: tuple[RuleCondition, ...] = ()

    def __post_init__(self) -> None:
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"rule value {self.value} outside [-1,1]")
        for cond in self.when:
            if cond.on not in self.classes:
                raise ValueError(f"rule condition on {cond.on!r} not in {self.classes}")


def _eval_condition(cond: RuleCondition, subject: "FSF", other: "FSF") -> bool:
    from .fsf import EntityId

    value = subject.get(cond.qualifier)
    if value is None:
        return False
    if cond.op == "eq":
        if isinstance(value, EntityId):
            return str(value) == cond.value
        return value == cond.value
    # targets_other
    return isinstance(value, EntityId) and value.num == other.entity_id.num


@dataclass(frozen=True)
class SemanticTable:
    """Class-pair base values plus ordered override rules; lookup is symmetric."""

    entries: tuple[tuple[tuple[str, str], float], ...] = ()
    rules: tuple[SemanticRule, ...] = ()
    default: float = 0.0

    def __post_init__(self) -> None:
        for _, value in self.entries:
            if not -1.0 <= value <= 1.0:
                raise ValueError(f"table value {value} outside [-1,1]")
        if not -1.0 <= self.default <= 1.0:
            raise ValueError(f"default {self.default} outside [-1,1]")
        base: dict[tuple[str, str], float] = {}
        for (a, b), value in self.entries:
            base[_pair_key(a, b)] = value
        object.__setattr__(self, "_base", base)
        # Largest reachable |value| per class pair, used for cheap pruning bounds.
        bound: dict[tuple[str, str], float] = {k: abs(v) for k, v in base.items()}
        rules_by_pair: dict[tuple[str, str], list[SemanticRule]] = {}
        for rule in self.rules:
            key = _pair_key(*rule.classes)
            bound[key] = max(bound.get(key, abs(self.default)), abs(rule.value))
            rules_by_pair.setdefault(key, []).append(rule)
        object.__setattr__(self, "_bound", bound)
        object.__setattr__(self, "_rules_by_pair", rules_by_pair)

    def base_value(self, class_a: str, class_b: str) -> float:
        return self._base.get(_pair_key(class_a, class_b), self.default)  # type: ignore[attr-defined]

    def value_bound(self, class_a: str, class_b: str) -> float:
        """Upper bound on |lookup| for any FSF pair of these classes (ids distinct)."""
        return self._bound.get(_pair_key(class_a, class_b), abs(self.default))  # type: ignore[attr-defined]

    def has_rules(self, class_a: str, class_b: str) -> bool:
        return _pair_key(class_a, class_b) in self._rules_by_pair  # type: ignore[attr-defined]

    def lookup(self, a: "FSF", b: "FSF") -> float:
        if a.entity_id == b.entity_id:
            return 1.0
        # Evaluate in canonical argument order so ties and rule matching are
        # exactly symmetric.
        if (b.entity_id.name, b.entity_id.num) < (a.entity_id.name, a.entity_id.num):
            a, b = b, a
        ca, cb = a.entity_id.name_class, b.entity_id.name_class
        key = _pair_key(ca, cb)
        for rule in self._rules_by_pair.get(key, ()):  # type: ignore[attr-defined]
            for x, y in ((a, b), (b, a)):
                if (x.entity_id.name_class, y.entity_id.name_class) != rule.classes:
                    continue
                if all(
                    _eval_condition(c, x, y) if c.on == rule.classes[0] else _eval_condition(c, y, x)
                    for c in rule.when
                ):
                    return rule.value
        return self._base.get(key, self.default)  # type: ignore[attr-defined]


def _pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class OntologySchema:
    classes: tuple[EntityClass, ...]
    table: SemanticTable = field(default_factory=SemanticTable)

    def __post_init__(self) -> None:
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate class names in schema")
        object.__setattr__(self, "_by_name", {c.name: c for c in self.classes})

    def entity_class(self, name: str) -> Optional[EntityClass]:
        return self._by_name.get(name)  # type: ignore[attr-defined]

    def resolve_qualifier(self, class_name: str, key: str) -> Optional[QualifierSpec]:
        cls = self.entity_class(class_name)
        return cls.resolve(key) if cls is not None else None


@dataclass
class ValidationReport:
    """Collected issues; errors block use, warnings do not."""

    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def empty(self) -> bool:
        return not self.errors and not self.warnings

    def error(self, message: str) -> None:
        self.errors.append(message)

    def warn(self, message: str) -> None:
        self.warnings.append(message)


# ---------------------------------------------------------------------------
# Bundled rescue-domain schema


_HITPOINT_MAX = 10_000
_TIME_MAX = 10**9


def _count(name: str, aliases: Iterable[str] = (), hi: int = 100) -> QualifierSpec:
    return QualifierSpec(name, ValueType.INTEGER, tuple(aliases), (0, hi))


def _common() -> tuple[QualifierSpec, ...]:
    return (
        QualifierSpec("localisation", ValueType.COORDINATE, ("l",)),
        QualifierSpec("time", ValueType.INTEGER, ("t",), (0, _TIME_MAX)),
    )


def _platoon_class(name: str) -> EntityClass:
    return EntityClass(
        name,
        EntityKind.of(Kind.ACTOR),
        (
            _count("hitPoint", hi=_HITPOINT_MAX),
            _count("fires"),
            _count("team"),
            QualifierSpec("action", ValueType.ENUM_TOKEN),
            QualifierSpec("target", ValueType.ENTITY_REF),
        )
        + _common(),
    )


def bundled_rcr_schema() -> OntologySchema:
    """Schema for the rescue simulation: three platoon actors, four phenomena."""
    phenomenon = EntityKind.of(Kind.PHENOMENON)
    classes = (
        _platoon_class("FireBrigade"),
        _platoon_class("PoliceForce"),
        _platoon_class("AmbulanceTeam"),
        EntityClass(
            "Fire",
            phenomenon,
            (
                QualifierSpec("fieriness", ValueType.INTEGER, ("f",), (0, 8)),
                _count("inDangerNeighbours", ("idn",)),
                _count("burningNeighbours", ("bn",)),
            )
            + _common(),
        ),
        EntityClass(
            "Collapse",
            phenomenon,
            (_count("brokenness"), QualifierSpec("buildingRef", ValueType.ENTITY_REF)) + _common(),
        ),
        EntityClass(
            "Injury",
            phenomenon,
            (
                _count("buriedness"),
                _count("damage"),
                QualifierSpec("civilianRef", ValueType.ENTITY_REF),
            )
            + _common(),
        ),
        EntityClass(
            "Blockade",
            phenomenon,
            (_count("repairCost", hi=10**6), QualifierSpec("roadRef", ValueType.ENTITY_REF)) + _common(),
        ),
    )
    return OntologySchema(classes, default_semantic_table(classes))


def default_semantic_table(classes: tuple[EntityClass, ...]) -> SemanticTable:
    """Default pairwise base values: fires reinforce each other, extinguishers
    oppose their target fire, same-class actors cohere, distinct phenomena
    weakly relate.  Everything else is neutral."""
    entries: list[tuple[tuple[str, str], float]] = [(("Fire", "Fire"), 0.8)]
    entries.append((("Fire", "FireBrigade"), -0.3))
    actors = [c.name for c in classes if c.kind.kind is Kind.ACTOR]
    phenomena = [c.name for c in classes if c.kind.kind is Kind.PHENOMENON]
    for name in actors:
        entries.append(((name, name), 0.6))
    for i, a in enumerate(phenomena):
        for b in phenomena[i + 1 :]:
            entries.append(((a, b), 0.2))
    rules = (
        SemanticRule(
            classes=("Fire", "FireBrigade"),
            value=-1.0,
            when=(
                RuleCondition("FireBrigade", "action", "eq", "extinguish"),
                RuleCondition("FireBrigade", "target", "targets_other"),
            ),
        ),
    )
    return SemanticTable(tuple(entries), rules)


# ---------------------------------------------------------------------------
# FSF validation and lookup front doors


def validate_fsf(schema: OntologySchema, fsf: "FSF") -> ValidationReport:
    """Check one parsed FSF against the schema.

    Unknown entity class is fatal.  Unknown qualifiers and out-of-range values
    are warnings (streams may carry extensions); type mismatches are errors.
    """
    report = ValidationReport()
    cls = schema.entity_class(fsf.entity_id.name_class)
    if cls is None:
        report.error(f"unknown entity class {fsf.entity_id.name_class!r} in {fsf.entity_id}")
        return report
    for name, value in fsf.qualifiers:
        spec = cls.resolve(name)
        if spec is None:
            report.warn(f"{fsf.entity_id}: unknown qualifier {name!r}")
            continue
        if not _type_ok(spec.value_type, value):
            report.error(
                f"{fsf.entity_id}: qualifier {spec.name!r} expects {spec.value_type.value},"
                f" got {value!r}"
            )
            continue
        if spec.range is not None and isinstance(value, (int, float)):
            lo, hi = spec.range
            if not lo <= value <= hi:
                report.warn(f"{fsf.entity_id}: {spec.name}={value} outside [{lo:g},{hi:g}]")
    return report


def _type_ok(value_type: ValueType, value: Any) -> bool:
    from .fsf import Coord, EntityId

    if value_type is ValueType.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if value_type is ValueType.REAL:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if value_type is ValueType.ENUM_TOKEN:
        return isinstance(value, str)
    if value_type is ValueType.ENTITY_REF:
        return isinstance(value, EntityId)
    return isinstance(value, Coord)


def semantic_lookup(table: SemanticTable, a: "FSF", b: "FSF") -> float:
    return table.lookup(a, b)


# ---------------------------------------------------------------------------
# Serialization


def schema_to_dict(schema: OntologySchema) -> dict[str, Any]:
    return {
        "classes": [
            {
                "name": c.name,
                "kind": c.kind.kind.value,
                "qualifiers": [
                    {
                        "name": q.name,
                        "aliases": list(q.aliases),
                        "type": q.value_type.value,
                        "range": list(q.range) if q.range is not None else None,
                    }
                    for q in c.qualifiers
                ],
            }
            for c in schema.classes
        ],
        "semantic_table": {
            "pairs": [{"classes": list(pair), "value": value} for pair, value in schema.table.entries],
            "rules": [
                {
                    "classes": list(rule.classes),
                    "value": rule.value,
                    "when": [
                        {"on": c.on, "qualifier": c.qualifier, "op": c.op, "value": c.value}
                        for c in rule.when
                    ],
                }
                for rule in schema.table.rules
            ],
            "default": schema.table.default,
        },
    }


def schema_from_dict(data: dict[str, Any]) -> OntologySchema:
    classes = tuple(
        EntityClass(
            c["name"],
            EntityKind.of(c["kind"]),
            tuple(
                QualifierSpec(
                    q["name"],
                    ValueType(q["type"]),
                    tuple(q.get("aliases", ())),
                    tuple(q["range"]) if q.get("range") is not None else None,
                )
                for q in c.get("qualifiers", ())
            ),
        )
        for c in data["classes"]
    )
    tbl = data.get("semantic_table", {})
    table = SemanticTable(
        entries=tuple(((p["classes"][0], p["classes"][1]), p["value"]) for p in tbl.get("pairs", ())),
        rules=tuple(
            SemanticRule(
                (r["classes"][0], r["classes"][1]),
                r["value"],
                tuple(
                    RuleCondition(w["on"], w["qualifier"], w["op"], w.get("value"))
                    for w in r.get("when", ())
                ),
            )
            for r in tbl.get("rules", ())
        ),
        default=tbl.get("default", 0.0),
    )
    return OntologySchema(classes, table)
