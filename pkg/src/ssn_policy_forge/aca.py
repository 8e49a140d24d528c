"""Aggregation rules and the Abstract Concept Aggregations they generate.

A rule is domain-agnostic: a body pattern whose variables split into concept
slots (bound to vocabulary IRIs found in the schema) and instance variables
(left open), plus a label template. Applying a rule to a schema yields one
ACA per concept binding: a human-readable label with ``?var`` placeholders
side by side with the graph pattern that answers it.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .rdf import Binding, Graph, GraphPattern, Iri, Literal, Term, parse_pattern
from .schema import SchemaGraph, schema_entails
from .vocab import RDFS_LABEL

OBSERVATION = "observation"
ACTUATION = "actuation"
_RULE_KINDS = (OBSERVATION, ACTUATION)

_CAMEL_CHUNK = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


@dataclass(frozen=True)
class LiteralText:
    text: str


@dataclass(frozen=True)
class ConceptName:
    slot: str


@dataclass(frozen=True)
class Var:
    name: str


Token = Union[LiteralText, ConceptName, Var]


@dataclass(frozen=True)
class AggregationRule:
    id: str
    kind: str
    body: GraphPattern
    concept_slots: tuple[str, ...]
    instance_vars: tuple[str, ...]
    label_template: tuple[Token, ...]
    exposed_vars: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in _RULE_KINDS:
            raise ValueError(f"rule {self.id}: unknown kind {self.kind!r}")
        slots, ivars = set(self.concept_slots), set(self.instance_vars)
        body_vars = set(self.body.variables())
        if slots & ivars:
            raise ValueError(f"rule {self.id}: {sorted(slots & ivars)} declared as both concept slot and instance var")
        if slots | ivars != body_vars:
            raise ValueError(
                f"rule {self.id}: concept slots and instance vars must cover the body variables exactly"
                f" (declared {sorted(slots | ivars)}, body has {sorted(body_vars)})"
            )
        for token in self.label_template:
            if isinstance(token, ConceptName) and token.slot not in slots:
                raise ValueError(f"rule {self.id}: template references undeclared concept slot {token.slot!r}")
            if isinstance(token, Var) and token.name not in ivars:
                raise ValueError(f"rule {self.id}: template references undeclared instance var {token.name!r}")
        if not set(self.exposed_vars) <= ivars:
            raise ValueError(f"rule {self.id}: exposed vars must be instance vars")


@dataclass(frozen=True)
class ACA:
    """A rule specialized to concrete concepts: label plus queryable pattern."""

    id: str
    label: str
    pattern: GraphPattern
    exposed_vars: tuple[str, ...]
    rule_id: str
    concept_bindings: tuple[tuple[str, Iri], ...]
    kind: str

    def hidden_vars(self) -> list[str]:
        exposed = set(self.exposed_vars)
        return [v for v in self.pattern.variables() if v not in exposed]


def aca_id(rule_id: str, concept_items: Iterable[tuple[str, Iri]]) -> str:
    """Content-derived id, stable across restarts and catalog rebuilds."""
    payload = rule_id + "".join(f"\n{slot}={iri.value}" for slot, iri in sorted(concept_items))
    return "aca-" + hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def human_name(iri: Iri, names: Graph | None = None) -> str:
    """rdfs:label when declared, else the local name split on case boundaries."""
    if names is not None:
        for t in names:
            if t.subject == iri and t.predicate == RDFS_LABEL and isinstance(t.object, Literal):
                return t.object.lexical
    local = iri.local_name().replace("_", " ").replace("-", " ")
    chunks: list[str] = []
    for piece in local.split():
        chunks.extend(_CAMEL_CHUNK.findall(piece) or [piece])
    return " ".join(c.lower() for c in chunks)


def check_applicability(rule: AggregationRule, schema: SchemaGraph) -> set[Binding]:
    """Concept-slot assignments under which the rule applies to this schema.

    Slots must land on schema constants; homomorphisms that send a slot to a
    wildcard name no usable concept and are dropped.
    """
    bindings: set[Binding] = set()
    for mapping in schema_entails(schema, rule.body):
        images = {slot: mapping.get(slot) for slot in rule.concept_slots}
        if all(isinstance(v, Iri) for v in images.values()):
            bindings.add(Binding.from_dict(images))
    return bindings


def generate_acas(rules: Iterable[AggregationRule], schema: SchemaGraph, names: Graph | None = None) -> list[ACA]:
    """One ACA per (rule, concept binding), in a deterministic catalog order."""
    catalog: list[ACA] = []
    for rule in sorted(rules, key=lambda r: r.id):
        found = check_applicability(rule, schema)
        keyed = sorted(found, key=lambda b: tuple(v.value for _, v in b.items))  # type: ignore[union-attr]
        for binding in keyed:
            concepts = tuple((slot, binding[slot]) for slot in rule.concept_slots)  # type: ignore[misc]
            substitution: dict[str, Term] = dict(concepts)
            pieces: list[str] = []
            for token in rule.label_template:
                if isinstance(token, LiteralText):
                    pieces.append(token.text)
                elif isinstance(token, ConceptName):
                    pieces.append(human_name(substitution[token.slot], names))  # type: ignore[arg-type]
                else:
                    pieces.append(f"?{token.name}")
            catalog.append(
                ACA(
                    id=aca_id(rule.id, concepts),
                    label=" ".join(pieces),
                    pattern=rule.body.substitute(substitution),
                    exposed_vars=rule.exposed_vars,
                    rule_id=rule.id,
                    concept_bindings=concepts,
                    kind=rule.kind,
                )
            )
    return catalog


def _placeholder(name: str) -> re.Pattern[str]:
    return re.compile(rf"\?{re.escape(name)}(?![A-Za-z0-9_])")


def render_label(aca: ACA, binding: Binding | None = None, names: Graph | None = None) -> str:
    """The ACA's label, with placeholders filled in when a binding is given."""
    if binding is None:
        return aca.label
    label = aca.label
    for name in aca.exposed_vars:
        term = binding.get(name)
        if term is None:
            raise ValueError(f"binding is missing variable {name!r}")
        if isinstance(term, Literal):
            display = term.lexical
        else:
            display = human_name(term, names)  # type: ignore[arg-type]
        label = _placeholder(name).sub(display, label)
    return label


def search_acas(query: str, catalog: list[ACA]) -> list[ACA]:
    """Keyword search over labels: more matched tokens first, then shorter label, then id."""
    tokens = sorted(set(query.lower().split()))
    if not tokens:
        return sorted(catalog, key=lambda a: a.id)
    scored: list[tuple[int, int, str, ACA]] = []
    for aca in catalog:
        label = aca.label.lower()
        matched = sum(1 for t in tokens if t in label)
        if matched:
            scored.append((-matched, len(aca.label), aca.id, aca))
    return [aca for *_, aca in sorted(scored, key=lambda s: s[:3])]


# ---------------------------------------------------------------------------
# Rule file loading
# ---------------------------------------------------------------------------


def _parse_token(raw: object, rule_id: str) -> Token:
    if isinstance(raw, dict):
        if set(raw) == {"text"}:
            return LiteralText(str(raw["text"]))
        if set(raw) == {"concept"}:
            return ConceptName(str(raw["concept"]))
        if set(raw) == {"var"}:
            return Var(str(raw["var"]))
    raise ValueError(f"rule {rule_id}: label template tokens must be {{text}}, {{concept}} or {{var}} objects")


def load_rules(text: str, base_prefixes: Mapping[str, str] | None = None) -> list[AggregationRule]:
    """Read a rule file: a JSON array of rule objects.

    Each object carries ``id``, ``kind``, ``body`` (pattern text in the same
    grammar data files use), ``conceptSlots``, ``instanceVars``,
    ``exposedVars`` and ``labelTemplate``.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"rule file is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ValueError("rule file must be a JSON array of rule objects")
    rules: list[AggregationRule] = []
    seen_ids: set[str] = set()
    for entry in raw:
        if not isinstance(entry, dict):
            raise ValueError("each rule must be a JSON object")
        rule_id = str(entry.get("id", ""))
        if not rule_id:
            raise ValueError("rule is missing an id")
        if rule_id in seen_ids:
            raise ValueError(f"duplicate rule id {rule_id!r}")
        seen_ids.add(rule_id)
        missing = [k for k in ("kind", "body", "labelTemplate") if k not in entry]
        if missing:
            raise ValueError(f"rule {rule_id}: missing field(s) {', '.join(missing)}")
        body = parse_pattern(str(entry["body"]), base_prefixes)
        tokens = tuple(_parse_token(t, rule_id) for t in entry["labelTemplate"])
        rules.append(
            AggregationRule(
                id=rule_id,
                kind=str(entry["kind"]),
                body=body,
                concept_slots=tuple(str(s) for s in entry.get("conceptSlots", [])),
                instance_vars=tuple(str(s) for s in entry.get("instanceVars", [])),
                label_template=tokens,
                exposed_vars=tuple(str(s) for s in entry.get("exposedVars", [])),
            )
        )
    return rules
