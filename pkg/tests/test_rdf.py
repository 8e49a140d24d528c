"""Substrate tests: reader, terms, graphs, and BGP matching."""

from __future__ import annotations

import random

import pytest

from conftest import (
    CO_DATA_TEXT,
    CO_PATTERN_TEXT,
    PREFIXES,
    brute_force_match,
    iri,
    num,
    random_graph,
    random_pattern,
)
from ssn_policy_forge.rdf import (
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

SEED = 2024


def test_terms_validate():
    with pytest.raises(ValueError):
        Iri("")
    with pytest.raises(ValueError):
        Iri("http://example.org/with space")
    with pytest.raises(ValueError):
        Variable("9bad")
    with pytest.raises(ValueError):
        Literal("not-a-number", "number")
    assert Literal("49.5", "number").as_decimal() == pytest.approx(49.5)


def test_triple_rejects_literal_subject_and_predicate():
    with pytest.raises(ValueError):
        Triple(num(1), iri("p"), iri("o"))
    with pytest.raises(ValueError):
        Triple(iri("s"), num(1), iri("o"))


def test_parse_single_ground_statement():
    graph = parse_turtle(":obs1 sosa:observedProperty :CO .", PREFIXES)
    assert len(graph) == 1
    assert Triple(iri("obs1"), Iri("http://www.w3.org/ns/sosa/observedProperty"), iri("CO")) in graph


def test_parse_empty_document():
    assert len(parse_turtle("", PREFIXES)) == 0


def test_parse_semicolon_lists_and_a_keyword():
    # A document using ';' lists and 'a', checked against its hand expansion.
    compact = """
    @prefix ex: <http://example.org/x#> .
    ex:s1 a ex:Klass ;
          ex:p1 5 ;
          ex:p2 "hi" .
    ex:s2 ex:p1 ex:s1 .
    """
    expanded = """
    @prefix ex: <http://example.org/x#> .
    ex:s1 rdf:type ex:Klass .
    ex:s1 ex:p1 5 .
    ex:s1 ex:p2 "hi" .
    ex:s2 ex:p1 ex:s1 .
    """
    left = parse_turtle(compact, PREFIXES)
    right = parse_turtle(expanded, PREFIXES)
    assert len(left) == 4
    assert left == right


def test_parse_reordering_is_irrelevant():
    lines = [line for line in CO_DATA_TEXT.strip().splitlines()]
    shuffled = "\n".join([lines[2], lines[0], lines[3], lines[1]])
    assert parse_turtle(CO_DATA_TEXT, PREFIXES) == parse_turtle(shuffled, PREFIXES)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_turtle(":a :b\n:c", PREFIXES)
    assert err.value.line >= 1 and err.value.column >= 1
    with pytest.raises(UnknownPrefixError) as uerr:
        parse_turtle("nope:a :b :c .", PREFIXES)
    assert uerr.value.prefix == "nope"
    with pytest.raises(ParseError):
        parse_turtle(':a :b "unterminated .', PREFIXES)


def test_variables_rejected_in_data_documents():
    with pytest.raises(ParseError):
        parse_turtle("?s :p :o .", PREFIXES)


def test_parse_pattern_canonical_four_lines(co_pattern):
    assert len(co_pattern.triple_patterns) == 4
    assert co_pattern.variables() == ["s", "b", "a"]
    first = co_pattern.triple_patterns[0]
    assert first.subject == Variable("s")
    assert first.object == iri("CO")


def test_parse_pattern_ground_text_has_no_variables():
    pattern = parse_pattern(":a :p :b .", PREFIXES)
    assert pattern.variables() == []


def test_parse_pattern_shares_equal_names():
    pattern = parse_pattern("?a :p :b . :c :q ?a .", PREFIXES)
    assert pattern.triple_patterns[0].subject is not None
    assert pattern.triple_patterns[0].subject == pattern.triple_patterns[1].object


def test_parse_pattern_rejects_literal_predicate():
    with pytest.raises(ParseError):
        parse_pattern("?s 5 ?o .", PREFIXES)


def test_graph_set_semantics():
    graph = Graph()
    t = Triple(iri("a"), iri("p"), iri("b"))
    graph.add(t)
    graph.add(t)
    assert len(graph) == 1


def test_graph_rejects_open_triples():
    with pytest.raises(ValueError):
        Graph([Triple(Variable("s"), iri("p"), iri("o"))])


def test_match_canonical_pattern_single_observation(co_graph, co_pattern):
    found = match_bgp(co_graph, co_pattern)
    expected = Binding.from_dict({"s": iri("obs1"), "a": iri("t1"), "b": num(55)})
    assert found == {expected}


def test_match_ground_pattern_yields_one_empty_binding(co_graph):
    pattern = parse_pattern(":t1 rdf:type :Tunnel .", PREFIXES)
    assert match_bgp(co_graph, pattern) == {Binding(())}


def test_match_absent_predicate_is_empty(co_graph):
    pattern = parse_pattern("?s :neverUsed ?o .", PREFIXES)
    assert match_bgp(co_graph, pattern) == set()


def test_binding_application_grounds_pattern(co_pattern):
    binding = Binding.from_dict({"s": iri("obs1"), "a": iri("t1"), "b": num(55)})
    ground = co_pattern.apply(binding)
    assert all(t.is_ground() for t in ground)
    with pytest.raises(ValueError):
        co_pattern.apply(Binding.from_dict({"s": iri("obs1")}))


def test_match_equals_bruteforce_on_random_cases():
    rng = random.Random(SEED)
    for _ in range(60):
        graph = random_graph(rng)
        pattern = random_pattern(rng)
        assert match_bgp(graph, pattern) == brute_force_match(graph, pattern)


def test_match_is_monotone_under_graph_growth():
    rng = random.Random(SEED + 1)
    for _ in range(40):
        big = random_graph(rng)
        triples = sorted(big.triples(), key=Triple.sort_key)
        small = Graph(t for t in triples if rng.random() < 0.5)
        pattern = random_pattern(rng)
        assert match_bgp(small, pattern) <= match_bgp(big, pattern)


def test_parse_is_deterministic():
    assert parse_turtle(CO_DATA_TEXT, PREFIXES) == parse_turtle(CO_DATA_TEXT, PREFIXES)


def test_pattern_requires_at_least_one_triple():
    with pytest.raises(ValueError):
        GraphPattern(())
