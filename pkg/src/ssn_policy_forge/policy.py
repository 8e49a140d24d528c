"""If-then policies over ACAs: validation, compilation to conjunctive
queries, evaluation with threshold filters, and actuator command synthesis.

A policy's IF side is a list of ACA instances joined by shared variables plus
variable-vs-constant comparisons; its THEN side is one actuation ACA whose
arguments are wired to condition variables. Compilation concatenates the
condition patterns, renaming hidden variables apart so separate ACA instances
can never capture each other's internals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .aca import ACA, aca_id
from .rdf import (
    Binding,
    Graph,
    GraphPattern,
    Iri,
    Literal,
    NUMBER,
    Term,
    Variable,
    match_bgp,
    term_to_text,
)

EVACUATE_TUNNEL = "EvacuateTunnel"
EVACUATE_MINE = "EvacuateMine"
GEOFENCE_TUNNEL = "GeofenceTunnel"

# Local name of the command class an actuation ACA matches → command kind.
COMMAND_CLASSES = {
    "EvacuateTunnelCommand": EVACUATE_TUNNEL,
    "EvacuateMineCommand": EVACUATE_MINE,
    "GeofenceTunnelCommand": GEOFENCE_TUNNEL,
}
_TARGETED_KINDS = (EVACUATE_TUNNEL, GEOFENCE_TUNNEL)

COMPARISON_OPS = ("<", "<=", ">", ">=", "=", "!=")
_ORDERING_OPS = ("<", "<=", ">", ">=")
_OP_ALIASES = {"≤": "<=", "≥": ">=", "≠": "!=", "==": "="}


class EvaluationError(ValueError):
    """A filter was applied to a value it cannot compare against."""


@dataclass(frozen=True)
class Comparison:
    variable: str
    op: str
    constant: Term

    def __post_init__(self):
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")
        if isinstance(self.constant, Variable):
            raise ValueError("comparisons are variable-vs-constant only")

    def describe(self) -> str:
        return f"?{self.variable} {self.op} {term_to_text(self.constant)}"


@dataclass(frozen=True)
class ConditionRef:
    aca_id: str
    rename: tuple[tuple[str, str], ...] = ()

    def renamed(self, var: str) -> str:
        for old, new in self.rename:
            if old == var:
                return new
        return var


@dataclass(frozen=True)
class ActionRef:
    aca_id: str
    args: tuple[tuple[str, str], ...] = ()  # action exposed var → condition variable


@dataclass(frozen=True)
class Policy:
    id: str
    name: str
    conditions: tuple[ConditionRef, ...]
    comparisons: tuple[Comparison, ...]
    action: ActionRef
    enabled: bool = True


@dataclass(frozen=True)
class CompiledQuery:
    pattern: GraphPattern
    filters: tuple[Comparison, ...]
    projection: tuple[str, ...]


@dataclass(frozen=True)
class ActuatorCommand:
    kind: str
    target: str | None
    source_policy: str
    tick: int

    def __post_init__(self):
        if self.kind in _TARGETED_KINDS and not self.target:
            raise ValueError(f"{self.kind} requires a target")
        if self.kind == EVACUATE_MINE and self.target is not None:
            raise ValueError("EvacuateMine takes no target")


def command_kind_of(aca: ACA) -> str | None:
    """Command kind an actuation ACA drives, read off its pattern's command class."""
    for t in aca.pattern.triple_patterns:
        if isinstance(t.object, Iri) and t.object.local_name() in COMMAND_CLASSES:
            return COMMAND_CLASSES[t.object.local_name()]
    return None


def _condition_variables(policy: Policy, catalog: Mapping[str, ACA]) -> set[str]:
    out: set[str] = set()
    for cond in policy.conditions:
        aca = catalog.get(cond.aca_id)
        if aca is None:
            continue
        out.update(cond.renamed(v) for v in aca.exposed_vars)
    return out


def validate_policy(policy: Policy, catalog: Mapping[str, ACA]) -> list[str]:
    """Diagnostics for every violated rule; an empty list means the policy is sound."""
    diagnostics: list[str] = []
    if not policy.conditions:
        diagnostics.append("policy has no condition")
    for cond in policy.conditions:
        aca = catalog.get(cond.aca_id)
        if aca is None:
            diagnostics.append(f"unknown ACA id {cond.aca_id}")
            continue
        if aca.kind != "observation":
            diagnostics.append(f"condition ACA {cond.aca_id} is not an observation")
        for old, _ in cond.rename:
            if old not in aca.exposed_vars:
                diagnostics.append(f"rename source {old} is not an exposed variable of {cond.aca_id}")
    bound = _condition_variables(policy, catalog)
    for comparison in policy.comparisons:
        if comparison.variable not in bound:
            diagnostics.append(f"unbound variable {comparison.variable}")
    action_aca = catalog.get(policy.action.aca_id)
    if action_aca is None:
        diagnostics.append(f"unknown ACA id {policy.action.aca_id}")
    else:
        if action_aca.kind != "actuation":
            diagnostics.append(f"action ACA {policy.action.aca_id} is not an actuation")
        elif command_kind_of(action_aca) is None:
            diagnostics.append(f"action ACA {policy.action.aca_id} names no known command class")
        arg_map = dict(policy.action.args)
        for exposed in action_aca.exposed_vars:
            source = arg_map.get(exposed)
            if source is None:
                diagnostics.append(f"action argument {exposed} is not wired to a condition variable")
            elif source not in bound:
                diagnostics.append(f"unbound variable {source}")
        for exposed in arg_map:
            if exposed not in action_aca.exposed_vars:
                diagnostics.append(f"action has no exposed variable {exposed}")
    # Join-graph connectivity over shared (renamed) exposed variables.
    known = [c for c in policy.conditions if c.aca_id in catalog]
    if len(known) > 1:
        exposed_sets = [{c.renamed(v) for v in catalog[c.aca_id].exposed_vars} for c in known]
        reached = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in range(len(known)):
                if j not in reached and exposed_sets[i] & exposed_sets[j]:
                    reached.add(j)
                    frontier.append(j)
        if len(reached) < len(known):
            diagnostics.append("disconnected condition")
    return diagnostics


def compile_policy(policy: Policy, catalog: Mapping[str, ACA]) -> CompiledQuery:
    """Concatenate condition patterns with hidden variables renamed apart.

    The k-th condition instance (1-based) gets each non-exposed variable v
    renamed to v_k; exposed variables are renamed per the policy's maps and
    are the only legal join points.
    """
    diagnostics = validate_policy(policy, catalog)
    if diagnostics:
        raise ValueError("; ".join(diagnostics))
    pieces: list[GraphPattern] = []
    exposed_names: set[str] = set()
    hidden_names: set[str] = set()
    for k, cond in enumerate(policy.conditions, start=1):
        aca = catalog[cond.aca_id]
        mapping: dict[str, Term] = {}
        for v in aca.pattern.variables():
            if v in aca.exposed_vars:
                mapping[v] = Variable(cond.renamed(v))
                exposed_names.add(cond.renamed(v))
            else:
                mapping[v] = Variable(f"{v}_{k}")
                hidden_names.add(f"{v}_{k}")
        pieces.append(aca.pattern.substitute(mapping))
    overlap = exposed_names & hidden_names
    if overlap:
        raise ValueError(f"policy variable name(s) collide with hidden renames: {sorted(overlap)}")
    pattern = GraphPattern(tuple(t for piece in pieces for t in piece.triple_patterns))
    action_aca = catalog[policy.action.aca_id]
    arg_map = dict(policy.action.args)
    projection = tuple(arg_map[v] for v in action_aca.exposed_vars)
    return CompiledQuery(pattern=pattern, filters=policy.comparisons, projection=projection)


def _passes(comparison: Comparison, value: Term) -> bool:
    constant = comparison.constant
    if comparison.op in _ORDERING_OPS:
        if not (isinstance(value, Literal) and value.kind == NUMBER and isinstance(constant, Literal)
                and constant.kind == NUMBER):
            raise EvaluationError(
                f"filter {comparison.describe()}: ordering comparison on non-numeric value {value!r}"
            )
        left, right = value.as_decimal(), constant.as_decimal()
        return {
            "<": left < right,
            "<=": left <= right,
            ">": left > right,
            ">=": left >= right,
        }[comparison.op]
    if (isinstance(value, Literal) and value.kind == NUMBER
            and isinstance(constant, Literal) and constant.kind == NUMBER):
        equal = value.as_decimal() == constant.as_decimal()
    else:
        equal = value == constant
    return equal if comparison.op == "=" else not equal


def evaluate_full(query: CompiledQuery, graph: Graph) -> set[Binding]:
    """Filtered but unprojected solutions; the monitor logs these for audit."""
    survivors: set[Binding] = set()
    for binding in match_bgp(graph, query.pattern):
        ok = True
        for comparison in query.filters:
            value = binding.get(comparison.variable)
            if value is None:
                raise EvaluationError(f"filter {comparison.describe()}: variable is not bound by the pattern")
            if not _passes(comparison, value):
                ok = False
                break
        if ok:
            survivors.add(binding)
    return survivors


def project(bindings: Iterable[Binding], projection: tuple[str, ...]) -> set[Binding]:
    out: set[Binding] = set()
    for b in bindings:
        out.add(Binding.from_dict({v: b[v] for v in projection}))
    return out


def evaluate(query: CompiledQuery, graph: Graph) -> set[Binding]:
    """Match, filter, project: the solutions that drive the policy's action."""
    return project(evaluate_full(query, graph), query.projection)


def target_text(term: Term) -> str:
    """Actuator-facing name of a bound term (tunnel id for IRIs)."""
    if isinstance(term, Iri):
        return term.local_name()
    if isinstance(term, Literal):
        return term.lexical
    raise ValueError(f"cannot target {term!r}")


def action_instances(
    policy: Policy,
    results: Iterable[Binding],
    tick: int,
    catalog: Mapping[str, ACA],
) -> list[ActuatorCommand]:
    """One command per distinct result, deduplicated by (kind, target)."""
    action_aca = catalog[policy.action.aca_id]
    kind = command_kind_of(action_aca)
    if kind is None:
        raise ValueError(f"action ACA {policy.action.aca_id} names no known command class")
    arg_map = dict(policy.action.args)
    commands: list[ActuatorCommand] = []
    seen: set[tuple[str, str | None]] = set()
    for binding in sorted(results, key=lambda b: repr(b)):
        target: str | None = None
        if kind in _TARGETED_KINDS:
            exposed = action_aca.exposed_vars[0]
            target = target_text(binding[arg_map[exposed]])
        if (kind, target) in seen:
            continue
        seen.add((kind, target))
        commands.append(ActuatorCommand(kind=kind, target=target, source_policy=policy.id, tick=tick))
    return commands


# ---------------------------------------------------------------------------
# Query serialization
# ---------------------------------------------------------------------------


def pattern_block(query: CompiledQuery, prefixes: Mapping[str, str]) -> str:
    """The WHERE-block triple lines, one pattern per line, reader-compatible."""
    lines = []
    for t in query.pattern.triple_patterns:
        s, p, o = (term_to_text(term, prefixes) for term in t)
        lines.append(f"  {s} {p} {o} .")
    return "\n".join(lines)


def serialize_query(query: CompiledQuery, prefixes: Mapping[str, str]) -> str:
    """Deterministic SELECT text for display and golden files.

    Only prefixes that shorten some term in the query are declared. The
    pattern block re-parses to exactly query.pattern.
    """
    body = pattern_block(query, prefixes)
    used: set[str] = set()
    for t in query.pattern.triple_patterns:
        for term in t:
            if isinstance(term, Iri):
                rendered = term_to_text(term, prefixes)
                if not rendered.startswith("<"):
                    used.add(rendered.split(":", 1)[0])
    header = "".join(f"PREFIX {name}: <{prefixes[name]}>\n" for name in sorted(used))
    select = " ".join(f"?{v}" for v in query.projection) or "*"
    filters = "".join(
        f"\n  FILTER(?{c.variable} {c.op} {term_to_text(c.constant, prefixes)})"
        for c in query.filters
    )
    return f"{header}SELECT {select}\nWHERE {{\n{body}{filters}\n}}\n"


# ---------------------------------------------------------------------------
# Policy document loading
# ---------------------------------------------------------------------------


def _constant_from_doc(entry: Mapping[str, object], prefixes: Mapping[str, str]) -> Term:
    if "iri" in entry:
        text = str(entry["iri"])
        if text.startswith("<") and text.endswith(">"):
            return Iri(text[1:-1])
        if "://" in text or ":" not in text:
            return Iri(text)
        prefix, _, local = text.partition(":")
        base = prefixes.get(prefix)
        if base is None:
            raise ValueError(f"comparison iri uses unknown prefix {prefix!r}")
        return Iri(base + local)
    value = entry.get("value")
    if isinstance(value, bool):
        return Literal("true" if value else "false", "boolean")
    if isinstance(value, (int, float)):
        return Literal(json.dumps(value), NUMBER)
    if isinstance(value, str):
        return Literal(value, "string")
    raise ValueError("comparison needs a 'value' or 'iri' constant")


def _resolve_aca_ref(entry: Mapping[str, object], prefixes: Mapping[str, str]) -> str:
    """An ACA reference is either its id or a (rule, concepts) pair."""
    if "aca" in entry:
        ref = entry["aca"]
        if isinstance(ref, str):
            return ref
        if isinstance(ref, dict) and "rule" in ref:
            concepts = ref.get("concepts", {})
            items = []
            for slot, iri_text in sorted(concepts.items()):  # type: ignore[union-attr]
                term = _constant_from_doc({"iri": iri_text}, prefixes)
                assert isinstance(term, Iri)
                items.append((str(slot), term))
            return aca_id(str(ref["rule"]), items)
    raise ValueError("condition/action needs an 'aca' reference")


def load_policy(doc: Mapping[str, object], prefixes: Mapping[str, str]) -> Policy:
    """Build a Policy from its JSON document form (no catalog checks here)."""
    policy_id = str(doc.get("id", "")).strip()
    if not policy_id:
        raise ValueError("policy is missing an id")
    conditions = []
    for entry in doc.get("conditions", []):  # type: ignore[union-attr]
        rename = tuple(sorted((str(k), str(v)) for k, v in (entry.get("rename") or {}).items()))
        conditions.append(ConditionRef(aca_id=_resolve_aca_ref(entry, prefixes), rename=rename))
    comparisons = []
    for entry in doc.get("comparisons", []):  # type: ignore[union-attr]
        op = str(entry.get("op", ""))
        op = _OP_ALIASES.get(op, op)
        comparisons.append(Comparison(variable=str(entry.get("var", "")), op=op,
                                      constant=_constant_from_doc(entry, prefixes)))
    action_doc = doc.get("action")
    if not isinstance(action_doc, dict):
        raise ValueError("policy needs an 'action' object")
    args = tuple(sorted((str(k), str(v)) for k, v in (action_doc.get("args") or {}).items()))
    action = ActionRef(aca_id=_resolve_aca_ref(action_doc, prefixes), args=args)
    return Policy(
        id=policy_id,
        name=str(doc.get("name", policy_id)),
        conditions=tuple(conditions),
        comparisons=tuple(comparisons),
        action=action,
        enabled=bool(doc.get("enabled", True)),
    )


def policy_to_doc(policy: Policy) -> dict:
    """Inverse of load_policy for API responses (ids stay resolved)."""
    return {
        "id": policy.id,
        "name": policy.name,
        "conditions": [
            {"aca": c.aca_id, "rename": {k: v for k, v in c.rename}} for c in policy.conditions
        ],
        "comparisons": [
            {
                "var": c.variable,
                "op": c.op,
                **({"iri": c.constant.value} if isinstance(c.constant, Iri)
                   else {"value": _literal_to_json(c.constant)}),
            }
            for c in policy.comparisons
        ],
        "action": {"aca": policy.action.aca_id, "args": {k: v for k, v in policy.action.args}},
        "enabled": policy.enabled,
    }


def _literal_to_json(lit: Term) -> object:
    assert isinstance(lit, Literal)
    if lit.kind == NUMBER:
        d = lit.as_decimal()
        return int(d) if d == d.to_integral_value() else float(d)
    if lit.kind == "boolean":
        return lit.lexical == "true"
    return lit.lexical
