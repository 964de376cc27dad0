"""N-Triples export and import for the knowledge graph.

Entity URIs are class-scoped (``base + ClassName/uid``) so uids only
need to be unique within their class. Output is sorted line-by-line,
making exports diffable and the export/import cycle deterministic.
"""

from __future__ import annotations

from datetime import date
from urllib.parse import quote, unquote

from .graph import Entity, GraphBuildError, KnowledgeGraph, Link, assemble_graph
from .ingest import Scalar
from .ontology import Ontology

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD = "http://www.w3.org/2001/XMLSchema#"

_RANGE_TO_XSD = {
    "float": XSD + "float",
    "int": XSD + "integer",
    "bool": XSD + "boolean",
    "date": XSD + "date",
}


class NTriplesError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _entity_uri(base: str, class_name: str, uid: str) -> str:
    return f"{base}{class_name}/{quote(uid, safe='')}"


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape_literal(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            mapped = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _literal_term(value: Scalar, range_: str) -> str:
    if range_ == "string":
        return f'"{_escape_literal(str(value))}"'
    if range_ == "float":
        text = repr(float(value))
    elif range_ == "int":
        text = str(value)
    elif range_ == "bool":
        text = "true" if value else "false"
    elif range_ == "date":
        text = value.isoformat()
    else:
        raise ValueError(f"unknown range {range_!r}")
    return f'"{text}"^^<{_RANGE_TO_XSD[range_]}>'


def export_ntriples(g: KnowledgeGraph, base: str) -> str:
    """One sorted line per triple; line count equals
    n_entities + n_links + n_literal_assertions."""
    o = g.ontology
    lines: list[str] = []
    for entity in g.iter_entities():
        subject = _entity_uri(base, entity.class_name, entity.uid)
        lines.append(f"<{subject}> <{RDF_TYPE}> <{base}{entity.class_name}> .")
        for prop, value in entity.values.items():
            term = _literal_term(value, o.data_properties[prop].range)
            lines.append(f"<{subject}> <{base}{prop}> {term} .")
    for link in g.links:
        pdef = o.object_properties[link.predicate]
        subject = _entity_uri(base, pdef.domain, link.subject_uid)
        obj = _entity_uri(base, pdef.range, link.object_uid)
        lines.append(f"<{subject}> <{base}{link.predicate}> <{obj}> .")
    lines.sort()
    return "\n".join(lines) + ("\n" if lines else "")


def export_turtle(g: KnowledgeGraph, base: str, prefix: str = "data") -> str:
    """Turtle rendering: a prefix block over the same sorted triples."""
    body = export_ntriples(g, base)
    header = f"@prefix {prefix}: <{base}> .\n@prefix xsd: <{XSD}> .\n\n"
    return header + body


def _split_line(line: str, line_no: int) -> tuple[str, str, str]:
    rest = line.strip()
    if not rest.endswith("."):
        raise NTriplesError("statement must end with '.'", line_no)
    rest = rest[:-1].rstrip()

    def take_iri(text: str) -> tuple[str, str]:
        if not text.startswith("<"):
            raise NTriplesError(f"expected IRI, found {text[:30]!r}", line_no)
        end = text.find(">")
        if end < 0:
            raise NTriplesError("unterminated IRI", line_no)
        return text[1:end], text[end + 1 :].lstrip()

    subject, rest = take_iri(rest)
    predicate, rest = take_iri(rest)
    return subject, predicate, rest


def _parse_object(term: str, line_no: int) -> tuple[str, str | None, bool]:
    """Return (value text, datatype URI or None, is_iri)."""
    if term.startswith("<"):
        end = term.find(">")
        if end < 0 or term[end + 1 :].strip():
            raise NTriplesError("malformed IRI object", line_no)
        return term[1:end], None, True
    if not term.startswith('"'):
        raise NTriplesError(f"malformed object term {term[:30]!r}", line_no)
    i = 1
    while i < len(term):
        if term[i] == "\\":
            i += 2
            continue
        if term[i] == '"':
            break
        i += 1
    else:
        raise NTriplesError("unterminated literal", line_no)
    text = _unescape_literal(term[1:i])
    suffix = term[i + 1 :].strip()
    if not suffix:
        return text, None, False
    if suffix.startswith("^^<") and suffix.endswith(">"):
        return text, suffix[3:-1], False
    raise NTriplesError(f"malformed literal suffix {suffix!r}", line_no)


def _typed_value(text: str, datatype: str | None, range_: str, line_no: int) -> Scalar:
    expected = _RANGE_TO_XSD.get(range_)
    if datatype != expected and not (range_ == "string" and datatype in (None, XSD + "string")):
        raise NTriplesError(f"datatype {datatype!r} does not match range {range_!r}", line_no)
    try:
        if range_ == "string":
            return text
        if range_ == "float":
            return float(text)
        if range_ == "int":
            return int(text)
        if range_ == "bool":
            if text in ("true", "false"):
                return text == "true"
            raise ValueError(text)
        return date.fromisoformat(text)
    except ValueError as exc:
        raise NTriplesError(f"bad {range_} literal {text!r}", line_no) from exc


def import_ntriples(text: str, o: Ontology) -> KnowledgeGraph:
    """Rebuild a graph from the exporter's dialect.

    The base URI is inferred from the first ``rdf:type`` triple whose
    object ends in a declared class name; all triples must share it.
    """
    parsed: list[tuple[int, str, str, str]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        subject, predicate, obj_term = _split_line(line, line_no)
        parsed.append((line_no, subject, predicate, obj_term))

    base: str | None = None
    for line_no, _, predicate, obj_term in parsed:
        if predicate != RDF_TYPE:
            continue
        obj_uri, _, is_iri = _parse_object(obj_term, line_no)
        if not is_iri:
            raise NTriplesError("rdf:type object must be an IRI", line_no)
        for cls in o.classes:
            if obj_uri.endswith(cls) and obj_uri[: -len(cls)]:
                candidate = obj_uri[: -len(cls)]
                if base is None:
                    base = candidate
                break
    if base is None:
        if parsed:
            raise NTriplesError("no rdf:type triple names a declared class", parsed[0][0])
        return assemble_graph(o, [], set())

    def split_entity(uri: str, line_no: int) -> tuple[str, str]:
        if not uri.startswith(base):
            raise NTriplesError(f"IRI {uri!r} outside base {base!r}", line_no)
        class_name, _, encoded = uri[len(base) :].partition("/")
        if class_name not in o.classes or not encoded:
            raise NTriplesError(f"IRI {uri!r} is not a class-scoped entity", line_no)
        return class_name, unquote(encoded)

    entities: dict[tuple[str, str], Entity] = {}

    # pass 1: entity declarations
    for line_no, subject, predicate, obj_term in parsed:
        if predicate != RDF_TYPE:
            continue
        obj_uri, _, _ = _parse_object(obj_term, line_no)
        class_name, uid = split_entity(subject, line_no)
        declared = obj_uri[len(base) :] if obj_uri.startswith(base) else obj_uri
        if declared != class_name:
            raise NTriplesError(
                f"type {declared!r} disagrees with subject class {class_name!r}", line_no
            )
        entities[(class_name, uid)] = Entity(uid, class_name)

    # pass 2: literals and links
    links: set[Link] = set()
    for line_no, subject, predicate, obj_term in parsed:
        if predicate == RDF_TYPE:
            continue
        if not predicate.startswith(base):
            raise NTriplesError(f"predicate {predicate!r} outside base {base!r}", line_no)
        name = predicate[len(base) :]
        class_name, uid = split_entity(subject, line_no)
        entity = entities.get((class_name, uid))
        if entity is None:
            raise NTriplesError(f"no rdf:type triple for subject {subject!r}", line_no)
        if name in o.data_properties:
            value_text, datatype, is_iri = _parse_object(obj_term, line_no)
            if is_iri:
                raise NTriplesError(f"data property {name!r} needs a literal object", line_no)
            range_ = o.data_properties[name].range
            entity.values[name] = _typed_value(value_text, datatype, range_, line_no)
        elif name in o.object_properties:
            obj_uri, _, is_iri = _parse_object(obj_term, line_no)
            if not is_iri:
                raise NTriplesError(f"object property {name!r} needs an IRI object", line_no)
            target_class, target_uid = split_entity(obj_uri, line_no)
            pdef = o.object_properties[name]
            if class_name != pdef.domain or target_class != pdef.range:
                raise NTriplesError(
                    f"{name!r} relates {pdef.domain!r} to {pdef.range!r}, "
                    f"found {class_name!r} to {target_class!r}",
                    line_no,
                )
            links.add(Link(uid, name, target_uid))
        else:
            raise NTriplesError(f"predicate {name!r} not declared in ontology", line_no)

    try:
        return assemble_graph(o, list(entities.values()), links)
    except GraphBuildError as exc:
        raise NTriplesError(f"imported triples violate ontology typing: {exc}") from exc
