"""Ground RDF data, variable-bearing graph patterns, a Turtle-subset reader,
and brute-force basic graph pattern (BGP) matching.

Every other module stores and queries data through this one. The dialect is
deliberately small: ``@prefix`` directives, prefixed names, absolute IRIs in
angle brackets, plain number/boolean literals, quoted string literals,
``;`` predicate lists, ``a`` for rdf:type, and ``.``-terminated statements.
IRIs compare by exact string equality after prefix expansion; literals by
lexical form plus kind. There are no blank nodes, collections, language
tags or datatype IRIs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, Mapping, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

NUMBER = "number"
STRING = "string"
BOOLEAN = "boolean"

_LITERAL_KINDS = (NUMBER, STRING, BOOLEAN)
_VARIABLE_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Malformed document text; carries the 1-based line/column of the fault."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownPrefixError(ParseError):
    def __init__(self, prefix: str, line: int, column: int):
        label = prefix if prefix else ":"
        super().__init__(f"unknown prefix '{label}'", line, column)
        self.prefix = prefix


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or any(c.isspace() for c in self.value):
            raise ValueError(f"IRI must be non-empty and whitespace-free: {self.value!r}")

    def local_name(self) -> str:
        for sep in ("#", "/", ":"):
            if sep in self.value:
                return self.value.rsplit(sep, 1)[1]
        return self.value

    def __repr__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    kind: str = STRING

    def __post_init__(self):
        if self.kind not in _LITERAL_KINDS:
            raise ValueError(f"unknown literal kind {self.kind!r}")
        if self.kind == NUMBER:
            try:
                if not Decimal(self.lexical).is_finite():
                    raise ValueError
            except (InvalidOperation, ValueError):
                raise ValueError(f"not a finite decimal: {self.lexical!r}") from None

    def as_decimal(self) -> Decimal:
        if self.kind != NUMBER:
            raise ValueError(f"literal {self.lexical!r} is not numeric")
        return Decimal(self.lexical)

    def __repr__(self) -> str:
        return f"{self.lexical!r}({self.kind})" if self.kind != STRING else repr(self.lexical)


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VARIABLE_NAME.match(self.name):
            raise ValueError(f"bad variable name {self.name!r}")

    def __repr__(self) -> str:
        return f"?{self.name}"


Term = Union[Iri, Literal, Variable]

_TERM_RANK = {Iri: 0, Literal: 1, Variable: 2}


def term_sort_key(term: Term) -> tuple:
    """Deterministic total order over terms, used wherever iteration order matters."""
    if isinstance(term, Iri):
        return (0, term.value)
    if isinstance(term, Literal):
        return (1, term.kind, term.lexical)
    return (2, term.name)


def format_number(value: float) -> str:
    """Lexical form for a numeric reading: integral floats print without a dot."""
    if value == int(value):
        return str(int(value))
    return repr(value)


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if isinstance(self.predicate, Literal):
            raise ValueError("literal not allowed in predicate position")
        if isinstance(self.subject, Literal):
            raise ValueError("literal not allowed in subject position")

    def is_ground(self) -> bool:
        return not any(isinstance(t, Variable) for t in self)

    def variables(self) -> list[str]:
        return [t.name for t in self if isinstance(t, Variable)]

    def substitute(self, mapping: Mapping[str, Term]) -> "Triple":
        def sub(t: Term) -> Term:
            if isinstance(t, Variable) and t.name in mapping:
                return mapping[t.name]
            return t

        return Triple(sub(self.subject), sub(self.predicate), sub(self.object))

    def __iter__(self) -> Iterator[Term]:
        return iter((self.subject, self.predicate, self.object))

    def sort_key(self) -> tuple:
        return (term_sort_key(self.subject), term_sort_key(self.predicate), term_sort_key(self.object))


class Graph:
    """A set of ground triples plus the prefix bindings they were read with.

    Set semantics: re-adding a triple is a no-op. Iteration is sorted, so any
    derived output is independent of insertion order. Instances are intended
    for single-writer/many-reader use; mutate only from the owning thread.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Mapping[str, str] | None = None):
        self._triples: set[Triple] = set()
        self.prefixes: dict[str, str] = dict(prefixes or {})
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> None:
        if not triple.is_ground():
            raise ValueError(f"graph triples must be ground: {triple}")
        if not isinstance(triple.subject, Iri) or not isinstance(triple.predicate, Iri):
            raise ValueError(f"ground subject/predicate must be IRIs: {triple}")
        self._triples.add(triple)

    def update(self, triples: Iterable[Triple]) -> None:
        for t in triples:
            self.add(t)

    def merged(self, other: "Graph") -> "Graph":
        g = Graph(self._triples, self.prefixes)
        g.prefixes.update(other.prefixes)
        g.update(other._triples)
        return g

    def triples(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def terms(self) -> set[Term]:
        out: set[Term] = set()
        for t in self._triples:
            out.update(t)
        return out

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=Triple.sort_key))

    def __len__(self) -> int:
        return len(self._triples)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._triples == other._triples

    def __repr__(self) -> str:
        return f"Graph({len(self._triples)} triples)"


@dataclass(frozen=True)
class GraphPattern:
    """An ordered conjunction of triple patterns."""

    triple_patterns: tuple[Triple, ...]

    def __post_init__(self):
        if not self.triple_patterns:
            raise ValueError("graph pattern must contain at least one triple pattern")

    def variables(self) -> list[str]:
        """Variable names in first-occurrence order."""
        seen: dict[str, None] = {}
        for t in self.triple_patterns:
            for name in t.variables():
                seen.setdefault(name)
        return list(seen)

    def substitute(self, mapping: Mapping[str, Term]) -> "GraphPattern":
        return GraphPattern(tuple(t.substitute(mapping) for t in self.triple_patterns))

    def apply(self, binding: "Binding") -> list[Triple]:
        """Instantiate with a binding that covers every variable; result is ground."""
        missing = [v for v in self.variables() if binding.get(v) is None]
        if missing:
            raise ValueError(f"binding does not cover variable(s): {', '.join(missing)}")
        return [t.substitute(binding.as_dict()) for t in self.triple_patterns]


@dataclass(frozen=True)
class Binding:
    """An immutable assignment of variable names to ground terms."""

    items: tuple[tuple[str, Term], ...]

    @classmethod
    def from_dict(cls, assignments: Mapping[str, Term]) -> "Binding":
        for name, term in assignments.items():
            if isinstance(term, Variable):
                raise ValueError(f"binding for ?{name} must be ground, got {term!r}")
        return cls(tuple(sorted(assignments.items())))

    def get(self, name: str, default: Term | None = None) -> Term | None:
        for k, v in self.items:
            if k == name:
                return v
        return default

    def __getitem__(self, name: str) -> Term:
        term = self.get(name)
        if term is None:
            raise KeyError(name)
        return term

    def as_dict(self) -> dict[str, Term]:
        return dict(self.items)

    def covers(self, names: Iterable[str]) -> bool:
        have = {k for k, _ in self.items}
        return all(n in have for n in names)

    def __len__(self) -> int:
        return len(self.items)

    def __repr__(self) -> str:
        inner = ", ".join(f"?{k}→{v!r}" for k, v in self.items)
        return "{" + inner + "}"


EMPTY_BINDING = Binding(())


# ---------------------------------------------------------------------------
# Turtle-subset reader
# ---------------------------------------------------------------------------

_PNAME_PREFIX = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")
_PNAME_LOCAL_OK = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.-]*\Z")


@dataclass
class _Token:
    type: str
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def emit(type_: str, value: str, l: int, c: int) -> None:
        tokens.append(_Token(type_, value, l, c))

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            col += 1
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c == "<":
            j = i + 1
            while j < n and text[j] not in ">\n":
                j += 1
            if j >= n or text[j] != ">":
                raise ParseError("unterminated IRI reference", start_line, start_col)
            emit("iriref", text[i + 1 : j], start_line, start_col)
            col += j + 1 - i
            i = j + 1
            continue
        if c == '"':
            j = i + 1
            out: list[str] = []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                if text[j] == "\\":
                    if j + 1 >= n:
                        raise ParseError("dangling escape in string literal", start_line, start_col)
                    esc = text[j + 1]
                    mapped = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}.get(esc)
                    if mapped is None:
                        raise ParseError(f"unsupported escape \\{esc}", start_line, start_col)
                    out.append(mapped)
                    j += 2
                    continue
                out.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", start_line, start_col)
            emit("string", "".join(out), start_line, start_col)
            col += j + 1 - i
            i = j + 1
            continue
        if c == "?":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i + 1 : j]
            if not _VARIABLE_NAME.match(name):
                raise ParseError(f"bad variable name ?{name}", start_line, start_col)
            emit("var", name, start_line, start_col)
            col += j - i
            i = j
            continue
        if c == "@":
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            word = text[i + 1 : j]
            if word != "prefix":
                raise ParseError(f"unknown directive @{word}", start_line, start_col)
            emit("at_prefix", word, start_line, start_col)
            col += j - i
            i = j
            continue
        if c in ".;":
            emit("dot" if c == "." else "semicolon", c, start_line, start_col)
            col += 1
            i += 1
            continue
        if c.isdigit() or (c in "+-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            seen_dot = False
            while j < n:
                if text[j].isdigit():
                    j += 1
                elif text[j] == "." and not seen_dot and j + 1 < n and text[j + 1].isdigit():
                    seen_dot = True
                    j += 1
                else:
                    break
            emit("number", text[i:j], start_line, start_col)
            col += j - i
            i = j
            continue
        # bare word or prefixed name
        j = i
        while j < n and (text[j].isalnum() or text[j] in "_-" or (text[j] == ":")
                         or (text[j] == "." and j + 1 < n and (text[j + 1].isalnum() or text[j + 1] in "_-"))):
            j += 1
        word = text[i:j]
        if not word:
            raise ParseError(f"unexpected character {c!r}", start_line, start_col)
        if ":" in word:
            emit("pname", word, start_line, start_col)
        elif word == "a":
            emit("a", word, start_line, start_col)
        elif word in ("true", "false"):
            emit("boolean", word, start_line, start_col)
        else:
            raise ParseError(f"unexpected token {word!r}", start_line, start_col)
        col += j - i
        i = j
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], prefixes: Mapping[str, str] | None, allow_variables: bool):
        self.tokens = tokens
        self.pos = 0
        self.prefixes = dict(prefixes or {})
        self.allow_variables = allow_variables

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise ParseError(f"unexpected end of input (expected {expected or 'more input'})", last.line, last.column)
        if expected is not None and tok.type != expected:
            raise ParseError(f"expected {expected}, got {tok.value!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def expand_pname(self, tok: _Token) -> Iri:
        prefix, _, local = tok.value.partition(":")
        if prefix and not _PNAME_PREFIX.match(prefix):
            raise ParseError(f"bad prefix name {prefix!r}", tok.line, tok.column)
        if local and not _PNAME_LOCAL_OK.match(local):
            raise ParseError(f"bad local name {local!r}", tok.line, tok.column)
        base = self.prefixes.get(prefix)
        if base is None:
            raise UnknownPrefixError(prefix, tok.line, tok.column)
        return Iri(base + local)

    def parse_directive(self) -> None:
        self.next("at_prefix")
        tok = self.next("pname")
        prefix, sep, rest = tok.value.partition(":")
        if rest:
            raise ParseError(f"prefix declaration must end with ':', got {tok.value!r}", tok.line, tok.column)
        iri = self.next("iriref")
        self.next("dot")
        self.prefixes[prefix] = iri.value

    def parse_term(self, position: str) -> Term:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise ParseError(f"unexpected end of input (expected {position})", last.line, last.column)
        if tok.type == "var":
            if not self.allow_variables:
                raise ParseError(f"variable ?{tok.value} not allowed in data document", tok.line, tok.column)
            self.next()
            return Variable(tok.value)
        if tok.type == "iriref":
            self.next()
            return Iri(tok.value)
        if tok.type == "pname":
            self.next()
            return self.expand_pname(tok)
        if tok.type == "a":
            if position != "predicate":
                raise ParseError("'a' is only allowed in predicate position", tok.line, tok.column)
            self.next()
            return Iri(RDF_NS + "type")
        if tok.type in ("number", "string", "boolean"):
            if position != "object":
                raise ParseError(f"literal not allowed in {position} position", tok.line, tok.column)
            self.next()
            return Literal(tok.value, tok.type)
        raise ParseError(f"unexpected {tok.value!r} in {position} position", tok.line, tok.column)

    def parse_statement(self, out: list[Triple]) -> None:
        subject = self.parse_term("subject")
        while True:
            predicate = self.parse_term("predicate")
            obj = self.parse_term("object")
            out.append(Triple(subject, predicate, obj))
            tok = self.next()
            if tok.type == "dot":
                return
            if tok.type == "semicolon":
                # allow a trailing ';' before the closing '.'
                nxt = self.peek()
                if nxt is not None and nxt.type == "dot":
                    self.next()
                    return
                continue
            raise ParseError(f"expected '.' or ';', got {tok.value!r}", tok.line, tok.column)

    def parse_document(self) -> list[Triple]:
        out: list[Triple] = []
        while not self.at_end():
            tok = self.peek()
            if tok is not None and tok.type == "at_prefix":
                self.parse_directive()
            else:
                self.parse_statement(out)
        return out


def parse_triples(
    text: str,
    base_prefixes: Mapping[str, str] | None = None,
    *,
    allow_variables: bool = False,
) -> tuple[list[Triple], dict[str, str]]:
    """Parse a document into an ordered triple list plus the final prefix map."""
    parser = _Parser(_tokenize(text), base_prefixes, allow_variables)
    triples = parser.parse_document()
    return triples, parser.prefixes


def parse_turtle(text: str, base_prefixes: Mapping[str, str] | None = None) -> Graph:
    """Read a ground data document; prefixed names come back fully expanded."""
    triples, prefixes = parse_triples(text, base_prefixes, allow_variables=False)
    graph = Graph(prefixes=prefixes)
    for t in triples:
        graph.add(t)
    return graph


def parse_pattern(text: str, base_prefixes: Mapping[str, str] | None = None) -> GraphPattern:
    """Read a pattern document: same grammar plus ``?var`` terms, order preserved."""
    triples, _ = parse_triples(text, base_prefixes, allow_variables=True)
    return GraphPattern(tuple(triples))


# ---------------------------------------------------------------------------
# BGP matching
# ---------------------------------------------------------------------------


def _compatible(pattern_term: Term, ground_term: Term, binding: dict[str, Term]) -> bool:
    if isinstance(pattern_term, Variable):
        bound = binding.get(pattern_term.name)
        return bound is None or bound == ground_term
    return pattern_term == ground_term


def _candidate_count(graph_triples: frozenset[Triple], tp: Triple) -> int:
    empty: dict[str, Term] = {}
    return sum(
        1
        for gt in graph_triples
        if _compatible(tp.subject, gt.subject, empty)
        and _compatible(tp.predicate, gt.predicate, empty)
        and _compatible(tp.object, gt.object, empty)
    )


def match_bgp(graph: Graph, pattern: GraphPattern) -> set[Binding]:
    """All bindings over the pattern's variables whose instantiation lies in the graph.

    Naive join: triple patterns are processed in ascending order of how many
    graph triples each could match on its own, extending a partial assignment
    and backtracking. Predictable for the desk-scale graphs this engine holds.
    """
    triples = graph.triples()
    order = sorted(
        range(len(pattern.triple_patterns)),
        key=lambda i: (_candidate_count(triples, pattern.triple_patterns[i]), i),
    )
    ordered = [pattern.triple_patterns[i] for i in order]
    results: set[Binding] = set()

    def extend(index: int, binding: dict[str, Term]) -> None:
        if index == len(ordered):
            results.add(Binding.from_dict(binding))
            return
        tp = ordered[index]
        for gt in triples:
            extended = dict(binding)
            ok = True
            for p_term, g_term in zip(tp, gt):
                if isinstance(p_term, Variable):
                    bound = extended.get(p_term.name)
                    if bound is None:
                        extended[p_term.name] = g_term
                    elif bound != g_term:
                        ok = False
                        break
                elif p_term != g_term:
                    ok = False
                    break
            if ok:
                extend(index + 1, extended)

    extend(0, {})
    return results


# ---------------------------------------------------------------------------
# Term rendering (prefixed form)
# ---------------------------------------------------------------------------


def term_to_text(term: Term, prefixes: Mapping[str, str] | None = None) -> str:
    """Render a term the way the reader accepts it back."""
    if isinstance(term, Variable):
        return f"?{term.name}"
    if isinstance(term, Literal):
        if term.kind == STRING:
            escaped = (
                term.lexical.replace("\\", "\\\\")
                .replace('"', '\\"')
                .replace("\n", "\\n")
                .replace("\t", "\\t")
                .replace("\r", "\\r")
            )
            return f'"{escaped}"'
        return term.lexical
    if prefixes:
        best: tuple[int, str, str] | None = None
        for name, base in prefixes.items():
            if term.value.startswith(base) and len(base) < len(term.value):
                local = term.value[len(base):]
                if _PNAME_LOCAL_OK.match(local) and (best is None or len(base) > best[0]):
                    best = (len(base), name, local)
        if best is not None:
            return f"{best[1]}:{best[2]}"
    return f"<{term.value}>"
