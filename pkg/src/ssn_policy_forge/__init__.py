"""Sensor-network policy engine: schema-driven concept aggregation, if-then
policy compilation to graph queries, and a simulated mine to test them in.
"""

from .rdf import (
    Binding,
    Graph,
    GraphPattern,
    Iri,
    Literal,
    ParseError,
    Triple,
    UnknownPrefixError,
    Variable,
    match_bgp,
    parse_pattern,
    parse_turtle,
)
from .schema import SchemaGraph, SchemaMapping, extract_schema, load_declared_schema, schema_entails
from .aca import (
    ACA,
    AggregationRule,
    check_applicability,
    generate_acas,
    human_name,
    load_rules,
    render_label,
    search_acas,
)
from .policy import (
    ActuatorCommand,
    CompiledQuery,
    Comparison,
    EvaluationError,
    Policy,
    action_instances,
    compile_policy,
    evaluate,
    load_policy,
    serialize_query,
    validate_policy,
)
from .simulator import MineWorld, WorldEvent, apply_actuator, emit_observations, inject_event
from .monitor import Engine, ObservationWindow, TriggerLogEntry, build_engine, run_scenario

__version__ = "0.1.0"

__all__ = [
    "ACA",
    "ActuatorCommand",
    "AggregationRule",
    "Binding",
    "CompiledQuery",
    "Comparison",
    "Engine",
    "EvaluationError",
    "Graph",
    "GraphPattern",
    "Iri",
    "Literal",
    "MineWorld",
    "ObservationWindow",
    "ParseError",
    "Policy",
    "SchemaGraph",
    "SchemaMapping",
    "Triple",
    "TriggerLogEntry",
    "UnknownPrefixError",
    "Variable",
    "WorldEvent",
    "action_instances",
    "apply_actuator",
    "build_engine",
    "check_applicability",
    "compile_policy",
    "emit_observations",
    "evaluate",
    "extract_schema",
    "generate_acas",
    "human_name",
    "inject_event",
    "load_declared_schema",
    "load_policy",
    "load_rules",
    "match_bgp",
    "parse_pattern",
    "parse_turtle",
    "render_label",
    "run_scenario",
    "schema_entails",
    "search_acas",
    "serialize_query",
    "validate_policy",
]
