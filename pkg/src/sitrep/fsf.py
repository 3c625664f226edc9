"""Factual Semantic Features: one timestamped, localized observation about one
entity, as qualifier/value pairs, with a parenthesized textual wire format.

Grammar::

    FSF   := "(" id ("," key "," value)* ")"
    id    := classToken "#" int
    value := int | real | token | id | int "|" int

Keys match qualifier names or aliases case-insensitively with internal spaces
tolerated.  The keys ``localisation``/``l`` and ``time``/``t`` populate the
dedicated fields; ``source``, ``performative`` and ``relevance`` are reserved
for the message envelope so that any FSF round-trips through its text form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .ontology import OntologySchema, normalize_key


_CLASS_TOKEN_CACHE: dict[str, str] = {}


class EntityId(NamedTuple):
    """Entity identity, rendered like ``fire#14``."""

    name: str
    num: int

    def __str__(self) -> str:
        return f"{self.name}#{self.num}"

    @property
    def name_class(self) -> str:
        """Schema class name for the rendered token (``fire`` -> ``Fire``)."""
        cached = _CLASS_TOKEN_CACHE.get(self.name)
        if cached is None:
            cached = _CLASS_TOKEN_CACHE.setdefault(self.name, self.name[:1].upper() + self.name[1:])
        return cached

    @classmethod
    def parse(cls, text: str) -> "EntityId":
        m = _ID_RE.fullmatch(text)
        if m is None:
            raise ValueError(f"malformed entity id {text!r}")
        return cls(m.group(1), int(m.group(2)))


class Coord(NamedTuple):
    x: int
    y: int

    def __str__(self) -> str:
        return f"{self.x}|{self.y}"


Value = Union[int, float, str, EntityId, Coord]

_ID_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)#(-?\d+)")
_INT_RE = re.compile(r"[+-]?\d+")
_REAL_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_COORD_RE = re.compile(r"([+-]?\d+)\|([+-]?\d+)")

_RESERVED = {"localisation", "l", "time", "t", "source", "performative", "relevance"}


class FsfParseError(ValueError):
    """Parse failure carrying the byte offset of the offending input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class FSF:
    entity_id: EntityId
    qualifiers: tuple[tuple[str, Value], ...] = ()
    localisation: Coord = Coord(0, 0)
    time: int = 0
    source: Optional[str] = None
    performative: str = "inform"
    relevance: float = 1.0

    def __post_init__(self) -> None:
        if self.time < 0:
            raise ValueError(f"{self.entity_id}: time {self.time} < 0")
        if not 0.0 <= self.relevance <= 1.0:
            raise ValueError(f"{self.entity_id}: relevance {self.relevance} outside [0,1]")
        object.__setattr__(
            self, "_by_key", {normalize_key(name): value for name, value in self.qualifiers}
        )

    def get(self, name: str) -> Optional[Value]:
        """Qualifier value by canonical name (key-folded), or None."""
        return self._by_key.get(normalize_key(name))  # type: ignore[attr-defined]

    def __str__(self) -> str:
        return format_fsf(self)


def _field_offsets(text: str, start: int, end: int) -> list[tuple[str, int]]:
    fields: list[tuple[str, int]] = []
    pos = start
    while True:
        comma = text.find(",", pos, end)
        stop = comma if comma != -1 else end
        raw = text[pos:stop]
        stripped = raw.strip()
        fields.append((stripped, pos + len(raw) - len(raw.lstrip())))
        if comma == -1:
            break
        pos = comma + 1
    return fields


def _parse_value(token: str, offset: int) -> Value:
    if _INT_RE.fullmatch(token):
        return int(token)
    if "|" in token:
        m = _COORD_RE.fullmatch(token)
        if m is None:
            raise FsfParseError(f"non-integer coordinate {token!r}", offset)
        return Coord(int(m.group(1)), int(m.group(2)))
    if _REAL_RE.fullmatch(token):
        return float(token)
    if "#" in token:
        m = _ID_RE.fullmatch(token)
        if m is None:
            raise FsfParseError(f"malformed entity reference {token!r}", offset)
        return EntityId(m.group(1), int(m.group(2)))
    if not token:
        raise FsfParseError("empty value", offset)
    return token


def parse_fsf(text: str, schema: OntologySchema) -> FSF:
    """Parse the textual FSF form, canonicalizing qualifier keys via the schema.

    Keys the schema does not know are kept verbatim (streams may carry
    extensions); the entity class itself may be unknown, validation decides.
    """
    open_at = text.find("(")
    if open_at == -1 or text[:open_at].strip():
        raise FsfParseError("expected '('", 0)
    close_at = text.rfind(")")
    if close_at == -1 or text[close_at + 1 :].strip():
        raise FsfParseError("expected ')'", len(text))
    fields = _field_offsets(text, open_at + 1, close_at)
    id_text, id_off = fields[0]
    if not id_text:
        raise FsfParseError("missing entity id", id_off)
    try:
        entity_id = EntityId.parse(id_text)
    except ValueError:
        raise FsfParseError(f"malformed entity id {id_text!r}", id_off) from None
    if len(fields) % 2 == 0:
        key, off = fields[-1]
        raise FsfParseError(f"dangling key {key!r}", off)

    cls_name = entity_id.name_class
    qualifiers: list[tuple[str, Value]] = []
    localisation = Coord(0, 0)
    time = 0
    source: Optional[str] = None
    performative = "inform"
    relevance = 1.0
    for i in range(1, len(fields), 2):
        key, key_off = fields[i]
        raw_value, value_off = fields[i + 1]
        if not key:
            raise FsfParseError("empty key", key_off)
        value = _parse_value(raw_value, value_off)
        folded = normalize_key(key)
        if folded in ("localisation", "l"):
            if not isinstance(value, Coord):
                raise FsfParseError(f"localisation expects a coordinate, got {raw_value!r}", value_off)
            localisation = value
        elif folded in ("time", "t"):
            if not isinstance(value, int) or value < 0:
                raise FsfParseError(f"time expects a non-negative integer, got {raw_value!r}", value_off)
            time = value
        elif folded == "source":
            source = str(value)
        elif folded == "performative":
            if not isinstance(value, str):
                raise FsfParseError(f"performative expects a token, got {raw_value!r}", value_off)
            performative = value
        elif folded == "relevance":
            if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
                raise FsfParseError(f"relevance expects a real in [0,1], got {raw_value!r}", value_off)
            relevance = float(value)
        else:
            spec = schema.resolve_qualifier(cls_name, key)
            qualifiers.append((spec.name if spec is not None else key, value))
    return FSF(
        entity_id=entity_id,
        qualifiers=tuple(qualifiers),
        localisation=localisation,
        time=time,
        source=source,
        performative=performative,
        relevance=relevance,
    )


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean is not an FSF value")
    if isinstance(value, (EntityId, Coord)):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_fsf(fsf: FSF) -> str:
    """Canonical text: long qualifier names, envelope fields only when
    non-default, localisation and time last.  parse(format(x)) == x."""
    parts = [str(fsf.entity_id)]
    for name, value in fsf.qualifiers:
        parts += [name, format_value(value)]
    if fsf.source is not None:
        parts += ["source", fsf.source]
    if fsf.performative != "inform":
        parts += ["performative", fsf.performative]
    if fsf.relevance != 1.0:
        parts += ["relevance", repr(fsf.relevance)]
    parts += ["localisation", str(fsf.localisation), "time", str(fsf.time)]
    return "(" + ", ".join(parts) + ")"
