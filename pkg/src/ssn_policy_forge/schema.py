"""Triplestore schema abstraction and the rule-applicability check.

A schema records which triple shapes can occur in a store: predicates stay
constant, concept-bearing objects (class and observed-property IRIs) stay
constant, everything else becomes a wildcard variable. A rule body is
applicable iff it has a homomorphism into the schema, so rules that could
never match any conforming store are rejected before they generate anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .rdf import Graph, GraphPattern, Iri, Literal, Term, Triple, Variable, parse_triples

# Objects under these predicates carry domain concepts and survive abstraction.
DEFAULT_PRESERVED_OBJECTS = frozenset(
    [
        Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
        Iri("http://www.w3.org/ns/sosa/observedProperty"),
    ]
)


def _validate_schema_triple(triple: Triple) -> None:
    if not isinstance(triple.predicate, Iri):
        raise ValueError(f"schema predicate must be an IRI: {triple}")


def _components(triples: tuple[Triple, ...]) -> list[list[int]]:
    """Indices grouped by shared wildcard names (union-find)."""
    parent = list(range(len(triples)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        parent[find(i)] = find(j)

    owner: dict[str, int] = {}
    for idx, t in enumerate(triples):
        for name in t.variables():
            if name in owner:
                union(idx, owner[name])
            else:
                owner[name] = idx
    groups: dict[int, list[int]] = {}
    for idx in range(len(triples)):
        groups.setdefault(find(idx), []).append(idx)
    return sorted(groups.values(), key=lambda g: g[0])


def _isomorphic(a: frozenset[Triple], b: frozenset[Triple]) -> bool:
    """True iff some bijective wildcard renaming carries a onto b exactly."""
    if len(a) != len(b):
        return False
    a_list = sorted(a, key=Triple.sort_key)
    b_list = list(b)

    def term_match(x: Term, y: Term, fwd: dict[str, str], rev: dict[str, str]) -> bool:
        if isinstance(x, Variable) != isinstance(y, Variable):
            return False
        if not isinstance(x, Variable):
            return x == y
        assert isinstance(y, Variable)
        if x.name in fwd:
            return fwd[x.name] == y.name
        if y.name in rev:
            return False
        fwd[x.name] = y.name
        rev[y.name] = x.name
        return True

    def extend(i: int, used: set[int], fwd: dict[str, str], rev: dict[str, str]) -> bool:
        if i == len(a_list):
            return True
        for j, bt in enumerate(b_list):
            if j in used:
                continue
            f2, r2 = dict(fwd), dict(rev)
            if all(term_match(x, y, f2, r2) for x, y in zip(a_list[i], bt)):
                if extend(i + 1, used | {j}, f2, r2):
                    return True
        return False

    return extend(0, set(), {}, {})


@dataclass(frozen=True)
class SchemaGraph:
    """Pattern-form triples where Variables are wildcards; predicates are IRIs.

    Duplicate shapes are removed at connected-component granularity: a group
    of triples linked by shared wildcards that is a renaming of an already
    kept group adds nothing the applicability check could distinguish.
    Triple-by-triple dedup would be unsound, since dropping one triple of a
    star can break a multi-triple body that the remaining data still matches.
    """

    schema_triples: tuple[Triple, ...]

    @classmethod
    def from_patterns(cls, triples: Iterable[Triple]) -> "SchemaGraph":
        unique: list[Triple] = []
        seen: set[Triple] = set()
        for t in triples:
            _validate_schema_triple(t)
            if t not in seen:
                seen.add(t)
                unique.append(t)
        fixed = tuple(unique)
        kept: list[Triple] = []
        kept_components: list[frozenset[Triple]] = []
        for group in _components(fixed):
            comp = frozenset(fixed[i] for i in group)
            if any(_isomorphic(comp, other) for other in kept_components):
                continue
            kept_components.append(comp)
            kept.extend(fixed[i] for i in group)
        return cls(tuple(kept))

    def wildcards(self) -> set[str]:
        out: set[str] = set()
        for t in self.schema_triples:
            out.update(t.variables())
        return out

    def isomorphic_to(self, other: "SchemaGraph") -> bool:
        return _isomorphic(frozenset(self.schema_triples), frozenset(other.schema_triples))

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.schema_triples)

    def __len__(self) -> int:
        return len(self.schema_triples)


@dataclass(frozen=True)
class SchemaMapping:
    """Witness of applicability: body variable name → schema term.

    Images are schema constants (IRIs, occasionally literals from declared
    schemas) or schema wildcard Variables.
    """

    items: tuple[tuple[str, Term], ...]

    @classmethod
    def from_dict(cls, assignments: Mapping[str, Term]) -> "SchemaMapping":
        return cls(tuple(sorted(assignments.items(), key=lambda kv: kv[0])))

    def get(self, name: str) -> Term | None:
        for k, v in self.items:
            if k == name:
                return v
        return None

    def as_dict(self) -> dict[str, Term]:
        return dict(self.items)

    def __repr__(self) -> str:
        inner = ", ".join(f"?{k}→{v!r}" for k, v in self.items)
        return "{" + inner + "}"


def extract_schema(
    graph: Graph,
    preserve_objects: frozenset[Iri] = DEFAULT_PRESERVED_OBJECTS,
) -> SchemaGraph:
    """Abstract a ground graph into its schema.

    Predicates are kept. Objects are kept under preserve_objects predicates.
    Every other IRI gets one wildcard shared across all its occurrences, so
    multi-triple shapes (observation stars, command/target links) stay
    connected; literal objects get a fresh wildcard per occurrence because
    equal readings are coincidence, not structure.
    """
    counter = 0
    by_term: dict[Iri, Variable] = {}

    def fresh() -> Variable:
        nonlocal counter
        v = Variable(f"w{counter}")
        counter += 1
        return v

    def wildcard_for(iri: Iri) -> Variable:
        if iri not in by_term:
            by_term[iri] = fresh()
        return by_term[iri]

    abstracted: list[Triple] = []
    for t in graph:
        assert isinstance(t.subject, Iri) and isinstance(t.predicate, Iri)
        subject = wildcard_for(t.subject)
        if t.predicate in preserve_objects:
            obj: Term = t.object
        elif isinstance(t.object, Iri):
            obj = wildcard_for(t.object)
        else:
            obj = fresh()
        abstracted.append(Triple(subject, t.predicate, obj))
    return SchemaGraph.from_patterns(abstracted)


def load_declared_schema(text: str, base_prefixes: Mapping[str, str] | None = None) -> SchemaGraph:
    """Read a schema stated directly as a pattern document (may be empty)."""
    triples, _ = parse_triples(text, base_prefixes, allow_variables=True)
    return SchemaGraph.from_patterns(triples)


def _unify_into(body_triple: Triple, schema_triple: Triple, mapping: dict[str, Term]) -> dict[str, Term] | None:
    """Extend mapping so body_triple lands on schema_triple, or report failure.

    Body variables bind the schema term in their position — a constant or a
    wildcard — and every occurrence of one variable must bind the same term,
    so shared variables keep multi-triple shapes connected. Ground body terms
    must equal the schema constant or sit under a wildcard, which stands for
    "anything" and absorbs any ground term.
    """
    extended = dict(mapping)
    for b, s in zip(body_triple, schema_triple):
        if isinstance(b, Variable):
            bound = extended.get(b.name)
            if bound is None:
                extended[b.name] = s
            elif bound != s:
                return None
        elif not isinstance(s, Variable) and s != b:
            return None
    return extended


def schema_entails(schema: SchemaGraph, body: GraphPattern) -> set[SchemaMapping]:
    """All homomorphisms from the body into the schema; empty means not applicable.

    Each body variable binds exactly one schema term across all its
    occurrences. An empty result therefore certifies the body can never match
    data of this shape: every graph-level match maps into the schema through
    the abstraction that produced it.
    """
    schema_list = list(schema.schema_triples)

    def candidates(bt: Triple) -> int:
        return sum(1 for st in schema_list if _unify_into(bt, st, {}) is not None)

    order = sorted(
        range(len(body.triple_patterns)),
        key=lambda i: (candidates(body.triple_patterns[i]), i),
    )
    ordered = [body.triple_patterns[i] for i in order]
    results: set[SchemaMapping] = set()
    seen: set[tuple[int, frozenset[tuple[str, Term]]]] = set()

    def extend(index: int, mapping: dict[str, Term]) -> None:
        # Distinct triple assignments can converge on one mapping; visiting
        # each (depth, mapping) state once keeps the search near-linear in
        # the number of distinct states instead of assignment paths.
        state = (index, frozenset(mapping.items()))
        if state in seen:
            return
        seen.add(state)
        if index == len(ordered):
            results.add(SchemaMapping.from_dict(mapping))
            return
        for st in schema_list:
            extended = _unify_into(ordered[index], st, mapping)
            if extended is not None:
                extend(index + 1, extended)

    extend(0, {})
    return results
