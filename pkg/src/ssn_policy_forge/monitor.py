"""The closed monitoring loop: step the world, ingest fresh observations,
evaluate every enabled policy over the latest readings, dispatch actuator
commands, and keep an auditable trigger log.

Dispatch is edge-triggered: a (policy, kind, target) command fires when its
condition starts holding and is suppressed while the condition keeps holding
on consecutive ticks, so a 50 ppm exceedance evacuates a tunnel once rather
than once per tick.
"""

from __future__ import annotations

import copy
import json
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .aca import generate_acas, load_rules, render_label
from .policy import (
    ActuatorCommand,
    CompiledQuery,
    EvaluationError,
    Policy,
    action_instances,
    compile_policy,
    evaluate_full,
    load_policy,
    project,
    target_text,
    validate_policy,
)
from .rdf import Binding, Graph, Triple, parse_turtle, term_to_text
from .schema import SchemaGraph, extract_schema, load_declared_schema
from .simulator import MineWorld, WorldEvent, apply_actuator, event_from_doc, inject_event
from .vocab import default_prefixes


class ObservationWindow:
    """Latest-value store: at most one observation per sensor."""

    def __init__(self):
        self.latest: dict[str, tuple[Triple, ...]] = {}

    def update(self, readings: Iterable[tuple[str, tuple[Triple, ...]]]) -> int:
        count = 0
        for sensor_id, triples in readings:
            self.latest[sensor_id] = triples
            count += 1
        return count

    def as_graph(self, prefixes: Mapping[str, str] | None = None) -> Graph:
        graph = Graph(prefixes=prefixes)
        for triples in self.latest.values():
            graph.update(triples)
        return graph


@dataclass(frozen=True)
class TriggerLogEntry:
    tick: int
    seq: int
    policy: str
    label: str
    binding: tuple[tuple[str, str], ...]
    command_kind: str
    command_target: str | None

    def to_json(self) -> dict:
        return {
            "tick": self.tick,
            "seq": self.seq,
            "policy": self.policy,
            "label": self.label,
            "binding": {k: v for k, v in self.binding},
            "command": {"kind": self.command_kind, "target": self.command_target},
        }

    def to_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class TickReport:
    tick: int
    observations: int
    evaluations: int
    triggers: int
    errors: tuple[str, ...] = ()


class Engine:
    """World + window + policy store + catalog behind one lock.

    Every public method takes the lock, so anything that happens between two
    tick() calls lands exactly at a tick boundary and each tick sees one
    consistent policy set.
    """

    def __init__(
        self,
        world_config: Mapping[str, object],
        seed: int,
        names: Graph | None = None,
        rules: Iterable = (),
        declared_schema: SchemaGraph | None = None,
    ):
        self.lock = threading.RLock()
        self.world_config = copy.deepcopy(dict(world_config))
        self.names = names if names is not None else Graph()
        self.rules = list(rules)
        self.declared_schema = declared_schema
        self.policies: dict[str, Policy] = {}
        self.policy_diagnostics: dict[str, list[str]] = {}
        self.compiled: dict[str, CompiledQuery] = {}
        self.scheduled: list[tuple[int, WorldEvent]] = []
        self._start(seed)

    def _start(self, seed: int) -> None:
        self.seed = seed
        self.world = MineWorld.from_config(self.world_config, seed)
        self.window = ObservationWindow()
        self.log: list[TriggerLogEntry] = []
        self.seq = 0
        self.holding: set[tuple[str, str, str | None]] = set()
        self.schema = self.declared_schema or extract_schema(self.world.bootstrap_graph())
        self.catalog = generate_acas(self.rules, self.schema, self.names)
        self.catalog_by_id = {a.id: a for a in self.catalog}
        self._recompile_all()

    @property
    def prefixes(self) -> dict[str, str]:
        return default_prefixes(self.world.base)

    # ------------------------------------------------------------------
    # Catalog and policy management
    # ------------------------------------------------------------------

    def rebuild_catalog(self, rules: Iterable) -> tuple[int, int, int]:
        """Swap in a new rule set; returns (rules, applicable rules, ACAs)."""
        with self.lock:
            self.rules = list(rules)
            self.catalog = generate_acas(self.rules, self.schema, self.names)
            self.catalog_by_id = {a.id: a for a in self.catalog}
            self._recompile_all()
            applicable = len({a.rule_id for a in self.catalog})
            return len(self.rules), applicable, len(self.catalog)

    def _recompile_all(self) -> None:
        self.compiled = {}
        self.policy_diagnostics = {}
        for pid, policy in self.policies.items():
            diagnostics = validate_policy(policy, self.catalog_by_id)
            if diagnostics:
                self.policy_diagnostics[pid] = diagnostics
            else:
                self.compiled[pid] = compile_policy(policy, self.catalog_by_id)

    def put_policy(self, policy: Policy) -> list[str]:
        """Create or replace; rejected policies are not stored."""
        with self.lock:
            diagnostics = validate_policy(policy, self.catalog_by_id)
            if diagnostics:
                return diagnostics
            self.policies[policy.id] = policy
            self.compiled[policy.id] = compile_policy(policy, self.catalog_by_id)
            self.policy_diagnostics.pop(policy.id, None)
            self.holding = {k for k in self.holding if k[0] != policy.id}
            return []

    def delete_policy(self, policy_id: str) -> bool:
        with self.lock:
            if policy_id not in self.policies:
                return False
            del self.policies[policy_id]
            self.compiled.pop(policy_id, None)
            self.policy_diagnostics.pop(policy_id, None)
            self.holding = {k for k in self.holding if k[0] != policy_id}
            return True

    # ------------------------------------------------------------------
    # Simulation control
    # ------------------------------------------------------------------

    def reset(self, seed: int | None = None) -> None:
        with self.lock:
            self._start(self.seed if seed is None else seed)

    def schedule_event(self, at_tick: int, event: WorldEvent) -> None:
        with self.lock:
            self.world.require_tunnel(event.tunnel)
            self.scheduled.append((at_tick, event))

    def inject_now(self, event: WorldEvent) -> None:
        with self.lock:
            inject_event(self.world, event)

    # ------------------------------------------------------------------
    # The loop body
    # ------------------------------------------------------------------

    def tick(self) -> TickReport:
        with self.lock:
            now = self.world.tick
            for at_tick, event in self.scheduled:
                if at_tick == now:
                    inject_event(self.world, event)
            self.scheduled = [(t, e) for t, e in self.scheduled if t != now]
            self.world.step()
            observations = self.window.update(self.world.take_readings())
            graph = self.window.as_graph(self.prefixes)
            evaluations = 0
            errors: list[str] = []
            produced: dict[tuple[str, str, str | None], tuple[ActuatorCommand, Binding | None]] = {}
            for pid in sorted(self.policies):
                policy = self.policies[pid]
                if not policy.enabled or pid not in self.compiled:
                    continue
                query = self.compiled[pid]
                evaluations += 1
                try:
                    full = evaluate_full(query, graph)
                except EvaluationError as exc:
                    errors.append(f"policy {pid}: {exc}")
                    continue
                results = project(full, query.projection)
                for command in action_instances(policy, results, self.world.tick, self.catalog_by_id):
                    key = (pid, command.kind, command.target)
                    produced[key] = (command, self._witness(policy, full, command))
            triggers = 0
            for key, (command, witness) in produced.items():
                if key in self.holding:
                    continue
                apply_actuator(self.world, command)
                self.log.append(self._log_entry(command, witness))
                triggers += 1
            self.holding = set(produced)
            return TickReport(
                tick=self.world.tick,
                observations=observations,
                evaluations=evaluations,
                triggers=triggers,
                errors=tuple(errors),
            )

    def run(self, n_ticks: int) -> list[TriggerLogEntry]:
        for _ in range(n_ticks):
            self.tick()
        return list(self.log)

    def log_lines(self, since: int | None = None) -> list[str]:
        with self.lock:
            entries = self.log if since is None else [e for e in self.log if e.tick > since]
            return [e.to_line() for e in entries]

    # ------------------------------------------------------------------
    # Log assembly
    # ------------------------------------------------------------------

    def _witness(self, policy: Policy, full: set[Binding], command: ActuatorCommand) -> Binding | None:
        """A deterministic full solution that produced this command."""
        action_aca = self.catalog_by_id[policy.action.aca_id]
        arg_map = dict(policy.action.args)
        for binding in sorted(full, key=repr):
            if command.target is None:
                return binding
            source = arg_map[action_aca.exposed_vars[0]]
            if target_text(binding[source]) == command.target:
                return binding
        return None

    def _log_entry(self, command: ActuatorCommand, witness: Binding | None) -> TriggerLogEntry:
        policy = self.policies[command.source_policy]
        sentences: list[str] = []
        rendered: list[tuple[str, str]] = []
        if witness is not None:
            for cond in policy.conditions:
                aca = self.catalog_by_id.get(cond.aca_id)
                if aca is None:
                    continue
                local = {v: witness[cond.renamed(v)] for v in aca.exposed_vars}
                sentences.append(render_label(aca, Binding.from_dict(local), self.names))
            rendered = sorted(
                (name, term_to_text(term, self.prefixes)) for name, term in witness.items
            )
        self.seq += 1
        return TriggerLogEntry(
            tick=command.tick,
            seq=self.seq,
            policy=command.source_policy,
            label=" and ".join(sentences),
            binding=tuple(rendered),
            command_kind=command.kind,
            command_target=command.target,
        )


# ---------------------------------------------------------------------------
# Scenario assembly
# ---------------------------------------------------------------------------


def packaged_text(name: str) -> str:
    return resources.files("ssn_policy_forge").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def _resolve_text(spec: object, directory: Path | None, default_name: str) -> str:
    if isinstance(spec, str):
        path = Path(spec)
        if not path.is_absolute() and directory is not None:
            path = directory / path
        return path.read_text(encoding="utf-8")
    return packaged_text(default_name)


def _apply_overrides(config: dict, overrides: Mapping[str, object]) -> dict:
    constants = dict(config.get("constants", {}))
    for key in ("delta", "lambda", "ambient_co", "ambient_temp", "p_move"):
        if key in overrides:
            constants[key] = overrides[key]
    config["constants"] = constants
    if "sigma" in overrides:
        config["sensors"] = [dict(s, sigma=overrides["sigma"]) for s in config.get("sensors", [])]
    return config


def build_engine(scenario: Mapping[str, object], directory: Path | None = None, seed: int | None = None) -> Engine:
    """Assemble an Engine from a scenario document.

    The document may point at world/ontology/rule files (relative to the
    scenario's directory) or inline the world; missing pieces fall back to
    the packaged defaults. Precedence for the seed: argument, scenario,
    world config.
    """
    world_spec = scenario.get("world")
    if isinstance(world_spec, dict):
        config = copy.deepcopy(world_spec)
    else:
        config = json.loads(_resolve_text(world_spec, directory, "world.json"))
    config = _apply_overrides(config, scenario.get("overrides", {}))  # type: ignore[arg-type]
    if seed is None and "seed" in scenario:
        seed = int(scenario["seed"])  # type: ignore[arg-type]
    base = str(config.get("base", "http://example.org/mine#"))
    prefixes = default_prefixes(base)
    names = parse_turtle(_resolve_text(scenario.get("ontology"), directory, "ontology.ttl"), prefixes)
    rules = load_rules(_resolve_text(scenario.get("rules"), directory, "rules.json"), prefixes)
    declared = None
    if scenario.get("schema") is not None:
        declared = load_declared_schema(_resolve_text(scenario.get("schema"), directory, ""), prefixes)
    engine = Engine(
        config,
        seed=0 if seed is None else seed,
        names=names,
        rules=rules,
        declared_schema=declared,
    )
    for doc in scenario.get("policies", []):  # type: ignore[union-attr]
        policy = load_policy(doc, prefixes)
        diagnostics = engine.put_policy(policy)
        if diagnostics:
            raise ValueError(f"policy {policy.id}: " + "; ".join(diagnostics))
    for doc in scenario.get("events", []):  # type: ignore[union-attr]
        engine.schedule_event(int(doc.get("at_tick", 0)), event_from_doc(doc))
    return engine


def run_scenario(
    path: str | Path,
    ticks: int | None = None,
    seed: int | None = None,
    schema: str | None = None,
) -> tuple[Engine, list[str]]:
    """Headless batch run; returns the engine and its JSONL trigger log."""
    scenario_path = Path(path)
    scenario = json.loads(scenario_path.read_text(encoding="utf-8"))
    if schema is not None:
        scenario = dict(scenario, schema=schema)
    engine = build_engine(scenario, scenario_path.parent, seed)
    if ticks is None:
        ticks = int(scenario.get("ticks", 100))
    engine.run(ticks)
    return engine, engine.log_lines()
