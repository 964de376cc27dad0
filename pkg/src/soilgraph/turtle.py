"""Reader and writer for the Turtle subset used by the ontology files.

Supported constructs: ``@prefix`` declarations, and statements declaring
``owl:Class`` / ``owl:DatatypeProperty`` / ``owl:ObjectProperty`` subjects
followed by ``rdfs:comment``, ``rdfs:domain``, ``rdfs:range`` and
``rdfs:seeAlso`` assertions. Full-line ``#`` comments are ignored.
Anything else is rejected.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .ontology import (
    DataPropertyDef,
    ObjectPropertyDef,
    Ontology,
    OntologyClass,
    validate_ontology,
)

log = logging.getLogger(__name__)

# Prefixes resolvable without a declaration; the subset's keywords use them.
WELL_KNOWN_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}

_XSD_TO_RANGE = {
    "string": "string",
    "float": "float",
    "double": "float",
    "int": "int",
    "integer": "int",
    "bool": "bool",
    "boolean": "bool",
    "date": "date",
}

_RANGE_TO_XSD = {
    "string": "xsd:string",
    "float": "xsd:float",
    "int": "xsd:int",
    "bool": "xsd:boolean",
    "date": "xsd:date",
}


class TurtleParseError(Exception):
    """Syntax or unsupported-construct error with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # 'pname' | 'iri' | 'string' | 'punct' | 'at_prefix' | 'eof'
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line
        stripped = line.lstrip()
        if not stripped or stripped.startswith("#"):
            continue
        i = 0
        n = len(line)
        while i < n:
            ch = line[i]
            col = i + 1
            if ch in " \t":
                i += 1
                continue
            if ch in ";.,":
                tokens.append(_Token("punct", ch, line_no, col))
                i += 1
                continue
            if ch == "<":
                end = line.find(">", i + 1)
                if end < 0:
                    raise TurtleParseError("unterminated IRI", line_no, col)
                tokens.append(_Token("iri", line[i + 1 : end], line_no, col))
                i = end + 1
                continue
            if ch == '"':
                buf = []
                j = i + 1
                while True:
                    if j >= n:
                        raise TurtleParseError("unterminated string literal", line_no, col)
                    c = line[j]
                    if c == "\\":
                        if j + 1 >= n:
                            raise TurtleParseError("dangling escape", line_no, j + 1)
                        esc = line[j + 1]
                        mapped = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}.get(esc)
                        if mapped is None:
                            raise TurtleParseError(f"unknown escape \\{esc}", line_no, j + 1)
                        buf.append(mapped)
                        j += 2
                        continue
                    if c == '"':
                        break
                    buf.append(c)
                    j += 1
                tokens.append(_Token("string", "".join(buf), line_no, col))
                i = j + 1
                continue
            if line.startswith("@prefix", i):
                tokens.append(_Token("at_prefix", "@prefix", line_no, col))
                i += len("@prefix")
                continue
            # prefixed name: prefix:local, either part possibly empty
            j = i
            while j < n and line[j] not in ' \t;,.<>"':
                j += 1
            word = line[i:j]
            # a trailing '.' ends the statement: 'xsd:float .' vs 'nalt/5142.'
            if ":" not in word:
                raise TurtleParseError(f"unexpected token {word!r}", line_no, col)
            tokens.append(_Token("pname", word, line_no, col))
            i = j
    tokens.append(_Token("eof", "", len(text.splitlines()) + 1, 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self.advance()
        if tok.kind != kind or (value is not None and tok.value != value):
            expected = value or kind
            raise TurtleParseError(f"expected {expected!r}, found {tok.value!r}", tok.line, tok.column)
        return tok

    def resolve(self, tok: _Token) -> tuple[str, str, str]:
        """Split a pname token into (prefix, namespace, local)."""
        prefix, _, local = tok.value.partition(":")
        if prefix in self.prefixes:
            return prefix, self.prefixes[prefix], local
        if prefix in WELL_KNOWN_PREFIXES:
            return prefix, WELL_KNOWN_PREFIXES[prefix], local
        raise TurtleParseError(f"undeclared prefix {prefix!r}", tok.line, tok.column)


def parse_ontology(text: str) -> Ontology:
    """Parse a Turtle-subset document into an :class:`Ontology`.

    Declarations map one-to-one onto ontology members; comments and
    seeAlso URIs are preserved verbatim. Dangling domain/range references
    do not fail here; run :func:`validate_ontology` for those. Repeated
    ``rdfs:seeAlso`` assertions keep the first URI and log a warning.
    """
    parser = _Parser(_tokenize(text))
    classes: list[OntologyClass] = []
    data_props: list[DataPropertyDef] = []
    object_props: list[ObjectPropertyDef] = []
    subject_namespace: str | None = None

    while True:
        tok = parser.peek()
        if tok.kind == "eof":
            break
        if tok.kind == "at_prefix":
            parser.advance()
            name_tok = parser.expect("pname")
            prefix = name_tok.value.rstrip(":")
            iri_tok = parser.expect("iri")
            parser.expect("punct", ".")
            parser.prefixes[prefix] = iri_tok.value
            continue
        if tok.kind != "pname":
            raise TurtleParseError(f"expected a subject, found {tok.value!r}", tok.line, tok.column)

        subject_tok = parser.advance()
        prefix, namespace, local = parser.resolve(subject_tok)
        if prefix in WELL_KNOWN_PREFIXES and prefix not in parser.prefixes:
            raise TurtleParseError(
                f"subject may not use the reserved prefix {prefix!r}", subject_tok.line, subject_tok.column
            )
        if subject_namespace is None:
            subject_namespace = namespace
        elif namespace != subject_namespace:
            raise TurtleParseError(
                "subjects from more than one namespace are not supported",
                subject_tok.line,
                subject_tok.column,
            )

        type_tok = parser.expect("pname")
        if type_tok.value != "rdf:type":
            raise TurtleParseError(
                f"expected rdf:type after subject, found {type_tok.value!r}", type_tok.line, type_tok.column
            )
        kind_tok = parser.expect("pname")
        if kind_tok.value not in ("owl:Class", "owl:DatatypeProperty", "owl:ObjectProperty"):
            raise TurtleParseError(
                f"unsupported declaration type {kind_tok.value!r}", kind_tok.line, kind_tok.column
            )

        comment: str | None = None
        see_also: str | None = None
        domain: str | None = None
        range_: str | None = None

        while True:
            sep = parser.advance()
            if sep.kind != "punct" or sep.value not in ";.":
                raise TurtleParseError(f"expected ';' or '.', found {sep.value!r}", sep.line, sep.column)
            if sep.value == ".":
                break
            pred_tok = parser.expect("pname")
            pred = pred_tok.value
            if pred == "rdfs:comment":
                value_tok = parser.expect("string")
                if comment is None:
                    comment = value_tok.value
                else:
                    log.warning(
                        "line %d: repeated rdfs:comment on %s, keeping the first",
                        value_tok.line,
                        subject_tok.value,
                    )
            elif pred == "rdfs:seeAlso":
                value_tok = parser.expect("iri")
                if see_also is None:
                    see_also = value_tok.value
                else:
                    log.warning(
                        "line %d: repeated rdfs:seeAlso on %s, keeping the first",
                        value_tok.line,
                        subject_tok.value,
                    )
            elif pred == "rdfs:domain":
                value_tok = parser.expect("pname")
                _, _, domain = parser.resolve(value_tok)
            elif pred == "rdfs:range":
                value_tok = parser.expect("pname")
                range_prefix, _, range_local = parser.resolve(value_tok)
                if kind_tok.value == "owl:DatatypeProperty":
                    if range_prefix != "xsd" or range_local not in _XSD_TO_RANGE:
                        raise TurtleParseError(
                            f"unsupported datatype range {value_tok.value!r}",
                            value_tok.line,
                            value_tok.column,
                        )
                    range_ = _XSD_TO_RANGE[range_local]
                else:
                    range_ = range_local
            else:
                raise TurtleParseError(f"unsupported predicate {pred!r}", pred_tok.line, pred_tok.column)

        if kind_tok.value == "owl:Class":
            if domain is not None or range_ is not None:
                raise TurtleParseError(
                    f"class {local!r} may not carry domain/range", subject_tok.line, subject_tok.column
                )
            classes.append(OntologyClass(local, comment=comment, see_also=see_also))
        elif kind_tok.value == "owl:DatatypeProperty":
            if domain is None or range_ is None:
                raise TurtleParseError(
                    f"data property {local!r} needs rdfs:domain and rdfs:range",
                    subject_tok.line,
                    subject_tok.column,
                )
            data_props.append(
                DataPropertyDef(local, domain=domain, range=range_, comment=comment, see_also=see_also)
            )
        else:
            if domain is None or range_ is None:
                raise TurtleParseError(
                    f"object property {local!r} needs rdfs:domain and rdfs:range",
                    subject_tok.line,
                    subject_tok.column,
                )
            object_props.append(
                ObjectPropertyDef(local, domain=domain, range=range_, comment=comment, see_also=see_also)
            )

    if subject_namespace is None:
        # prefix-only or empty document
        subject_namespace = next(iter(parser.prefixes.values()), "")
    return Ontology(subject_namespace, classes, data_props, object_props)


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def serialize_ontology(o: Ontology, prefix: str = "ont") -> str:
    """Emit the Turtle subset with deterministic sorted ordering.

    Classes first, then data properties, then object properties, each
    group sorted by name, so two serializations of equal ontologies are
    byte-identical and exports diff cleanly.
    """
    violations = validate_ontology(o)
    if violations:
        raise ValueError(
            "refusing to serialize an invalid ontology: " + "; ".join(str(v) for v in violations)
        )

    lines: list[str] = [f"@prefix {prefix}: <{o.base_uri}> .", ""]

    def emit(name: str, rdf_kind: str, pairs: list[str]) -> None:
        lines.append(f"###  {o.base_uri}{name}")
        lines.append(f"{prefix}:{name} rdf:type {rdf_kind} ;")
        for i, pair in enumerate(pairs):
            terminator = " ." if i == len(pairs) - 1 else " ;"
            lines.append(f"    {pair}{terminator}")
        if not pairs:
            lines[-1] = lines[-1].removesuffix(" ;") + " ."
        lines.append("")

    for cls in sorted(o.classes.values(), key=lambda c: c.name):
        pairs = []
        if cls.comment is not None:
            pairs.append(f'rdfs:comment "{_escape(cls.comment)}"')
        if cls.see_also is not None:
            pairs.append(f"rdfs:seeAlso <{cls.see_also}>")
        emit(cls.name, "owl:Class", pairs)

    for prop in sorted(o.data_properties.values(), key=lambda p: p.name):
        pairs = [f"rdfs:domain {prefix}:{prop.domain}", f"rdfs:range {_RANGE_TO_XSD[prop.range]}"]
        if prop.comment is not None:
            pairs.append(f'rdfs:comment "{_escape(prop.comment)}"')
        if prop.see_also is not None:
            pairs.append(f"rdfs:seeAlso <{prop.see_also}>")
        emit(prop.name, "owl:DatatypeProperty", pairs)

    for oprop in sorted(o.object_properties.values(), key=lambda p: p.name):
        pairs = [f"rdfs:domain {prefix}:{oprop.domain}", f"rdfs:range {prefix}:{oprop.range}"]
        if oprop.comment is not None:
            pairs.append(f'rdfs:comment "{_escape(oprop.comment)}"')
        if oprop.see_also is not None:
            pairs.append(f"rdfs:seeAlso <{oprop.see_also}>")
        emit(oprop.name, "owl:ObjectProperty", pairs)

    return "\n".join(lines)
