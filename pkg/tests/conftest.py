"""Shared fixtures and independent oracles the test suite checks against."""

from __future__ import annotations

import itertools
import random
from decimal import Decimal

import pytest

from ssn_policy_forge.rdf import (
    Binding,
    Graph,
    GraphPattern,
    Iri,
    Literal,
    NUMBER,
    Triple,
    Variable,
    match_bgp,
    parse_pattern,
    parse_turtle,
    term_sort_key,
)
from ssn_policy_forge.vocab import DEFAULT_BASE, default_prefixes

BASE = DEFAULT_BASE
PREFIXES = default_prefixes()

# The canonical four-line observation pattern and the label it aggregates to.
CO_PATTERN_TEXT = """
?s sosa:observedProperty :CO .
?s sosa:hasResult ?b .
?s sosa:hasFeatureOfInterest ?a .
?a rdf:type :Tunnel .
"""
CO_LABEL = "the carbon monoxide concentration of tunnel ?a is ?b"

CO_DATA_TEXT = """
:obs1 sosa:observedProperty :CO .
:obs1 sosa:hasResult 55 .
:obs1 sosa:hasFeatureOfInterest :t1 .
:t1 rdf:type :Tunnel .
"""


@pytest.fixture
def co_pattern() -> GraphPattern:
    return parse_pattern(CO_PATTERN_TEXT, PREFIXES)


@pytest.fixture
def co_graph() -> Graph:
    return parse_turtle(CO_DATA_TEXT, PREFIXES)


def iri(local: str) -> Iri:
    return Iri(BASE + local)


def num(value) -> Literal:
    return Literal(str(value), NUMBER)


# ---------------------------------------------------------------------------
# Brute-force BGP oracle: try every assignment of variables to graph terms.
# ---------------------------------------------------------------------------


def brute_force_match(graph: Graph, pattern: GraphPattern) -> set[Binding]:
    variables = pattern.variables()
    terms = sorted(graph.terms(), key=term_sort_key)
    solutions: set[Binding] = set()
    for combo in itertools.product(terms, repeat=len(variables)):
        mapping = dict(zip(variables, combo))
        try:
            ground = [tp.substitute(mapping) for tp in pattern.triple_patterns]
        except ValueError:
            continue  # literal forced into a subject/predicate slot
        if all(t in graph for t in ground):
            solutions.add(Binding.from_dict(mapping))
    return solutions


# ---------------------------------------------------------------------------
# Random instance generators (bounded pools keep the oracle affordable)
# ---------------------------------------------------------------------------

_SUBJECT_POOL = [f"r{i}" for i in range(6)]
_PREDICATE_POOL = [f"p{i}" for i in range(4)]
_LITERAL_POOL = ["3", "7", "50", "55"]


def random_graph(rng: random.Random, max_triples: int = 30, unique_literals: bool = False) -> Graph:
    """Random ground graph over small pools.

    ``unique_literals`` gives every literal object a value of its own. The
    schema abstraction assigns each literal occurrence an independent
    wildcard, so a literal value shared between triples is a join the schema
    deliberately does not record; the soundness properties quantify over
    graphs without such joins.
    """
    graph = Graph(prefixes=PREFIXES)
    fresh = itertools.count(100)
    for _ in range(rng.randint(0, max_triples)):
        subject = iri(rng.choice(_SUBJECT_POOL))
        predicate = iri(rng.choice(_PREDICATE_POOL))
        if rng.random() < 0.3:
            value = next(fresh) if unique_literals else rng.choice(_LITERAL_POOL)
            obj: Iri | Literal = num(value)
        else:
            obj = iri(rng.choice(_SUBJECT_POOL))
        graph.add(Triple(subject, predicate, obj))
    return graph


def random_pattern(rng: random.Random, max_patterns: int = 4, max_vars: int = 4) -> GraphPattern:
    n_vars = rng.randint(1, max_vars)
    variables = [Variable(f"v{i}") for i in range(n_vars)]
    patterns = []
    for _ in range(rng.randint(1, max_patterns)):
        def pick(position: str):
            role = rng.random()
            if role < 0.45:
                return rng.choice(variables)
            if position == "object" and role < 0.6:
                return num(rng.choice(_LITERAL_POOL))
            return iri(rng.choice(_SUBJECT_POOL if position != "predicate" else _PREDICATE_POOL))

        patterns.append(Triple(pick("subject"), pick("predicate"), pick("object")))
    return GraphPattern(tuple(patterns))


# ---------------------------------------------------------------------------
# Random observation worlds for policy-level oracles
# ---------------------------------------------------------------------------

OBSERVATION_RULE_JSON = """
[
  {
    "id": "observation-of-feature",
    "kind": "observation",
    "body": "?s sosa:observedProperty ?P . ?s sosa:hasResult ?b . ?s sosa:hasFeatureOfInterest ?a . ?a rdf:type ?C .",
    "conceptSlots": ["P", "C"],
    "instanceVars": ["s", "a", "b"],
    "exposedVars": ["a", "b"],
    "labelTemplate": [
      {"text": "the"}, {"concept": "P"}, {"text": "of"}, {"concept": "C"},
      {"var": "a"}, {"text": "is"}, {"var": "b"}
    ]
  },
  {
    "id": "action-mark",
    "kind": "actuation",
    "body": "?c rdf:type :EvacuateTunnelCommand . ?c :targets ?a . ?a rdf:type :F0 .",
    "conceptSlots": [],
    "instanceVars": ["c", "a"],
    "exposedVars": ["a"],
    "labelTemplate": [{"text": "mark feature"}, {"var": "a"}]
  }
]
"""


def join_bindings(left: set[Binding], right: set[Binding]) -> set[Binding]:
    """Natural join: merge pairs that agree on every shared variable."""
    out: set[Binding] = set()
    for lb in left:
        ld = lb.as_dict()
        for rb in right:
            rd = rb.as_dict()
            if all(ld[k] == rd[k] for k in ld.keys() & rd.keys()):
                out.add(Binding.from_dict({**ld, **rd}))
    return out


def oracle_passes(op: str, value, constant) -> bool:
    """Filter semantics recomputed from scratch (numeric via Decimal)."""
    if op in ("<", "<=", ">", ">="):
        left, right = Decimal(value.lexical), Decimal(constant.lexical)
        return {"<": left < right, "<=": left <= right, ">": left > right, ">=": left >= right}[op]
    if (isinstance(value, Literal) and isinstance(constant, Literal)
            and value.kind == NUMBER and constant.kind == NUMBER):
        equal = Decimal(value.lexical) == Decimal(constant.lexical)
    else:
        equal = value == constant
    return equal if op == "=" else not equal


def oracle_policy_results(policy, catalog: dict, graph: Graph) -> set[Binding]:
    """Independent join-filter-project composition over per-ACA matches."""
    joined: set[Binding] | None = None
    for cond in policy.conditions:
        aca = catalog[cond.aca_id]
        projected = {
            Binding.from_dict({cond.renamed(v): sol[v] for v in aca.exposed_vars})
            for sol in match_bgp(graph, aca.pattern)
        }
        joined = projected if joined is None else join_bindings(joined, projected)
    assert joined is not None
    survivors = {
        b for b in joined
        if all(oracle_passes(c.op, b.get(c.variable), c.constant) for c in policy.comparisons)
    }
    action_aca = catalog[policy.action.aca_id]
    arg_map = dict(policy.action.args)
    projection = [arg_map[v] for v in action_aca.exposed_vars]
    return {Binding.from_dict({v: b[v] for v in projection}) for b in survivors}


def random_policy(rng: random.Random, catalog: list, policy_id: str = "p", force_two: bool = False):
    """A valid random policy over the catalog: conditions join on ?a, one filter each."""
    from ssn_policy_forge.policy import ActionRef, Comparison, ConditionRef, Policy, COMPARISON_OPS

    observations = sorted((a for a in catalog if a.kind == "observation"), key=lambda a: a.id)
    actions = sorted((a for a in catalog if a.kind == "actuation"), key=lambda a: a.id)
    n_conditions = 2 if force_two or rng.random() < 0.5 else 1
    conditions, value_vars = [], []
    for k in range(1, n_conditions + 1):
        aca = rng.choice(observations)
        value_var = f"v{k}"
        conditions.append(ConditionRef(aca.id, rename=(("b", value_var),)))
        value_vars.append(value_var)
    comparisons = tuple(
        Comparison(rng.choice(value_vars), rng.choice(COMPARISON_OPS), num(rng.randint(0, 100)))
        for _ in range(rng.randint(1, 2))
    )
    action = rng.choice(actions)
    args = tuple((v, "a") for v in action.exposed_vars)
    return Policy(
        id=policy_id,
        name=policy_id,
        conditions=tuple(conditions),
        comparisons=comparisons,
        action=ActionRef(action.id, args),
    )


def random_observation_graph(rng: random.Random, n_observations: int | None = None) -> Graph:
    """Observation stars over a small vocabulary, plus one actuator capability."""
    graph = Graph(prefixes=PREFIXES)
    properties = [iri(f"P{i}") for i in range(rng.randint(1, 3))]
    classes = [iri(f"F{i}") for i in range(rng.randint(1, 2))]
    features = [iri(f"f{i}") for i in range(rng.randint(1, 5))]
    feature_class = {f: rng.choice(classes) for f in features}
    if n_observations is None:
        n_observations = rng.randint(0, 20)
    for k in range(n_observations):
        obs = iri(f"o{k}")
        feature = rng.choice(features)
        graph.update(
            [
                Triple(obs, Iri("http://www.w3.org/ns/sosa/observedProperty"), rng.choice(properties)),
                Triple(obs, Iri("http://www.w3.org/ns/sosa/hasResult"), num(rng.randint(0, 100))),
                Triple(obs, Iri("http://www.w3.org/ns/sosa/hasFeatureOfInterest"), feature),
                Triple(feature, Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), feature_class[feature]),
            ]
        )
    graph.update(
        [
            Triple(iri("cap1"), Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), iri("EvacuateTunnelCommand")),
            Triple(iri("cap1"), iri("targets"), iri("f0")),
            Triple(iri("f0"), Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), iri("F0")),
        ]
    )
    return graph
