"""Deterministic situation-representation engine for emergency monitoring."""

from .engine import (
    CycleReport,
    Engine,
    EngineConfig,
    FactualAgent,
    Indicators,
    IngestOutcome,
    Snapshot,
    snapshot_to_dict,
    snapshot_to_json,
)
from .fsf import FSF, Coord, EntityId, FsfParseError, format_fsf, parse_fsf
from .ontology import (
    OntologySchema,
    SemanticTable,
    ValidationReport,
    bundled_rcr_schema,
    semantic_lookup,
    validate_fsf,
)
from .proximity import (
    ProximityBreakdown,
    ProximityConfig,
    sigmoid_bump,
    spatial_proximity,
    temporal_proximity,
    total_proximity,
)
from .scenario import (
    Scenario,
    ScenarioError,
    ScenarioMeta,
    export_snapshots,
    fig9_scenario,
    generate_fire_demo,
    load_scenario,
    load_scenario_path,
    run_scenario,
)

__all__ = [
    "CycleReport",
    "Engine",
    "EngineConfig",
    "FactualAgent",
    "FSF",
    "Coord",
    "EntityId",
    "FsfParseError",
    "Indicators",
    "IngestOutcome",
    "OntologySchema",
    "ProximityBreakdown",
    "ProximityConfig",
    "Scenario",
    "ScenarioError",
    "ScenarioMeta",
    "SemanticTable",
    "Snapshot",
    "ValidationReport",
    "bundled_rcr_schema",
    "export_snapshots",
    "fig9_scenario",
    "format_fsf",
    "generate_fire_demo",
    "load_scenario",
    "load_scenario_path",
    "parse_fsf",
    "run_scenario",
    "semantic_lookup",
    "sigmoid_bump",
    "snapshot_to_dict",
    "snapshot_to_json",
    "spatial_proximity",
    "temporal_proximity",
    "total_proximity",
    "validate_fsf",
]
