from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from sitrep.fsf import EntityId, parse_fsf
from sitrep.ontology import (
    EntityKind,
    Family,
    Kind,
    bundled_rcr_schema,
    schema_from_dict,
    schema_to_dict,
    semantic_lookup,
    validate_fsf,
)

from conftest import SAMPLE_BRIGADE, SAMPLE_FIRE, SAMPLE_FIRE_ALIASED


def test_kind_family_pairing():
    assert EntityKind.of(Kind.ACTOR).family is Family.PHYSICAL_ENTITY
    assert EntityKind.of(Kind.PHENOMENON).family is Family.VIRTUAL_ACTIVITY
    with pytest.raises(ValueError):
        EntityKind(Family.VIRTUAL_ACTIVITY, Kind.ACTOR)
    for kind in Kind:
        EntityKind.of(kind)  # every kind has a well-defined family


def test_bundled_schema_shape(schema):
    assert len(schema.classes) == 7
    phenomena = [c for c in schema.classes if c.kind.kind is Kind.PHENOMENON]
    assert {c.name for c in phenomena} == {"Fire", "Collapse", "Injury", "Blockade"}
    actors = [c for c in schema.classes if c.kind.kind is Kind.ACTOR]
    assert {c.name for c in actors} == {"FireBrigade", "PoliceForce", "AmbulanceTeam"}


def test_fire_qualifiers(schema):
    fire = schema.entity_class("Fire")
    fieriness = fire.resolve("f")
    assert fieriness is not None and fieriness.name == "fieriness"
    assert fieriness.range == (0, 8)
    assert fire.resolve("idn").name == "inDangerNeighbours"
    assert fire.resolve("bn").name == "burningNeighbours"
    assert schema.entity_class("FireBrigade").resolve("hitPoint") is not None
    # spaced spelling folds onto the canonical name
    assert schema.entity_class("FireBrigade").resolve("hit point").name == "hitPoint"


def test_sample_qualifiers_all_resolve(schema):
    for text in (SAMPLE_FIRE, SAMPLE_BRIGADE, SAMPLE_FIRE_ALIASED):
        fsf = parse_fsf(text, schema)
        cls = schema.entity_class(fsf.entity_id.name_class)
        assert cls is not None
        for name, _ in fsf.qualifiers:
            assert cls.resolve(name) is not None, name


def test_validate_clean_sample(schema):
    report = validate_fsf(schema, parse_fsf(SAMPLE_FIRE, schema))
    assert report.empty


def test_validate_unknown_class_is_fatal(schema):
    report = validate_fsf(schema, parse_fsf("(dragon#1, localisation, 0|0, time, 0)", schema))
    assert not report.ok
    assert "unknown entity class" in report.errors[0]


def test_validate_out_of_range_warns(schema):
    fsf = parse_fsf("(fire#3, fieriness, 99, localisation, 0|0, time, 0)", schema)
    report = validate_fsf(schema, fsf)
    assert report.ok and not report.empty
    assert any("fieriness=99" in w for w in report.warnings)


def test_validate_unknown_qualifier_warns(schema):
    fsf = parse_fsf("(fire#3, smokiness, 2, localisation, 0|0, time, 0)", schema)
    report = validate_fsf(schema, fsf)
    assert report.ok
    assert any("smokiness" in w for w in report.warnings)


def test_validate_type_mismatch_is_error(schema):
    fsf = parse_fsf("(fire#3, fieriness, hot, localisation, 0|0, time, 0)", schema)
    report = validate_fsf(schema, fsf)
    assert not report.ok


def _fire(num, time=0, loc="0|0", extra=""):
    return f"(fire#{num}{extra}, localisation, {loc}, time, {time})"


def test_lookup_same_entity(schema):
    a = parse_fsf("(fire#1, fieriness, 1, localisation, 0|0, time, 0)", schema)
    b = parse_fsf("(fire#1, fieriness, 5, localisation, 9|9, time, 4)", schema)
    assert semantic_lookup(schema.table, a, b) == 1.0


def test_lookup_base_pair(schema):
    a = parse_fsf(_fire(1), schema)
    b = parse_fsf(_fire(2), schema)
    assert semantic_lookup(schema.table, a, b) == 0.8


def test_lookup_override_beats_base(schema):
    fire = parse_fsf("(fire#5, fieriness, 2, localisation, 3|3, time, 1)", schema)
    brigade = parse_fsf(SAMPLE_BRIGADE, schema)  # extinguishing building#5
    assert semantic_lookup(schema.table, fire, brigade) == -1.0
    assert semantic_lookup(schema.table, brigade, fire) == -1.0
    # without the extinguish action the base value applies
    idle = parse_fsf(
        "(fireBrigade#5, hit point, 100, action, move, target, building#5,"
        " localisation, 7|9, time, 5)",
        schema,
    )
    assert semantic_lookup(schema.table, fire, idle) == -0.3


def test_lookup_phenomenon_and_actor_defaults(schema):
    fire = parse_fsf(_fire(1), schema)
    collapse = parse_fsf("(collapse#9, brokenness, 40, localisation, 0|0, time, 0)", schema)
    assert semantic_lookup(schema.table, fire, collapse) == 0.2
    pf1 = parse_fsf("(policeForce#1, hitPoint, 50, localisation, 0|0, time, 0)", schema)
    pf2 = parse_fsf("(policeForce#2, hitPoint, 60, localisation, 0|0, time, 0)", schema)
    assert semantic_lookup(schema.table, pf1, pf2) == 0.6
    ambulance = parse_fsf("(ambulanceTeam#1, hitPoint, 50, localisation, 0|0, time, 0)", schema)
    assert semantic_lookup(schema.table, pf1, ambulance) == 0.0


_CLASS_TOKENS = ("fire", "collapse", "injury", "blockade", "fireBrigade", "policeForce", "ambulanceTeam")


@st.composite
def _random_fsf_text(draw):
    token = draw(st.sampled_from(_CLASS_TOKENS))
    num = draw(st.integers(min_value=0, max_value=50))
    time = draw(st.integers(min_value=0, max_value=100))
    x = draw(st.integers(min_value=-10_000, max_value=10_000))
    y = draw(st.integers(min_value=-10_000, max_value=10_000))
    extra = ""
    if token == "fireBrigade" and draw(st.booleans()):
        extra = f", action, extinguish, target, building#{draw(st.integers(0, 50))}"
    return f"({token}#{num}{extra}, localisation, {x}|{y}, time, {time})"


@given(_random_fsf_text(), _random_fsf_text())
def test_lookup_symmetric_and_bounded(a_text, b_text):
    schema = bundled_rcr_schema()
    a, b = parse_fsf(a_text, schema), parse_fsf(b_text, schema)
    value = semantic_lookup(schema.table, a, b)
    assert value == semantic_lookup(schema.table, b, a)
    assert abs(value) <= 1.0


def test_schema_round_trip(schema):
    reloaded = schema_from_dict(schema_to_dict(schema))
    assert reloaded == schema
    assert schema_to_dict(reloaded) == schema_to_dict(schema)


def test_value_bound_covers_rules(schema):
    # Fire/FireBrigade base is -0.3 but the extinguish override reaches -1.
    assert schema.table.value_bound("Fire", "FireBrigade") == 1.0
    assert schema.table.value_bound("Fire", "Fire") == 0.8
    assert schema.table.value_bound("Collapse", "Collapse") == 0.0


def test_entity_id_rendering():
    assert str(EntityId("fireBrigade", 5)) == "fireBrigade#5"
    assert EntityId("fireBrigade", 5).name_class == "FireBrigade"
    assert EntityId.parse("fire#14") == EntityId("fire", 14)
