"""Immutable in-memory knowledge graph built from normalized records.

Build is two-phase (all entities, then all links) so records may
reference rows from tabs ingested later. UIDs are unique within a
class; two classes may reuse a uid, which is why exports scope entity
URIs by class.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import date

from .ingest import NormalizedRecord, Scalar
from .ontology import Ontology, validate_ontology

_RANGE_TYPES = {
    "string": str,
    "float": float,
    "int": int,
    "bool": bool,
    "date": date,
}


@dataclass
class Entity:
    uid: str
    class_name: str
    values: dict[str, Scalar] = field(default_factory=dict)

    @property
    def key(self) -> tuple[str, str]:
        return (self.class_name, self.uid)


@dataclass(frozen=True, order=True)
class Link:
    subject_uid: str
    predicate: str
    object_uid: str


@dataclass(frozen=True)
class GraphStats:
    n_classes_used: int
    n_object_property_types_used: int
    n_data_property_types_used: int
    n_entities: int
    n_links: int
    n_literal_assertions: int

    def to_json(self) -> dict:
        return {
            "n_classes_used": self.n_classes_used,
            "n_object_property_types_used": self.n_object_property_types_used,
            "n_data_property_types_used": self.n_data_property_types_used,
            "n_entities": self.n_entities,
            "n_links": self.n_links,
            "n_literal_assertions": self.n_literal_assertions,
        }


class GraphBuildError(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class KnowledgeGraph:
    """Typed entities, literal assertions, and links with exact indexes.

    Instances are immutable once :func:`build_graph` returns and are safe
    to share across concurrent readers.
    """

    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self._by_class: dict[str, dict[str, Entity]] = {}
        self.links: tuple[Link, ...] = ()
        self.predicate_index: dict[str, tuple[Link, ...]] = {}

    # --- access -----------------------------------------------------------

    @property
    def class_index(self) -> dict[str, tuple[str, ...]]:
        return {cls: tuple(entities) for cls, entities in self._by_class.items()}

    def classes_used(self) -> list[str]:
        return sorted(self._by_class)

    def entities_of(self, class_name: str) -> list[Entity]:
        return list(self._by_class.get(class_name, {}).values())

    def entity(self, class_name: str, uid: str) -> Entity | None:
        return self._by_class.get(class_name, {}).get(uid)

    def find_entities(self, uid: str) -> list[Entity]:
        """Entities with this uid in any class (uids are class-scoped)."""
        return [
            entities[uid] for entities in self._by_class.values() if uid in entities
        ]

    def iter_entities(self):
        for entities in self._by_class.values():
            yield from entities.values()

    def links_from(self, predicate: str, subject_uid: str) -> list[Link]:
        return [l for l in self.predicate_index.get(predicate, ()) if l.subject_uid == subject_uid]

    def links_to(self, predicate: str, object_uid: str) -> list[Link]:
        return [l for l in self.predicate_index.get(predicate, ()) if l.object_uid == object_uid]

    @property
    def n_entities(self) -> int:
        return sum(len(entities) for entities in self._by_class.values())

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_literal_assertions(self) -> int:
        return sum(len(e.values) for e in self.iter_entities())

    def fingerprint(self) -> str:
        """Content hash of the graph, stable across builds of equal data."""
        digest = hashlib.sha256()
        for cls in sorted(self._by_class):
            for uid in sorted(self._by_class[cls]):
                entity = self._by_class[cls][uid]
                digest.update(f"E\t{cls}\t{uid}\n".encode())
                for prop in sorted(entity.values):
                    digest.update(f"V\t{prop}\t{entity.values[prop]!r}\n".encode())
        for link in sorted(self.links):
            digest.update(f"L\t{link.subject_uid}\t{link.predicate}\t{link.object_uid}\n".encode())
        return digest.hexdigest()


def _check_value(o: Ontology, class_name: str, prop: str, value: Scalar) -> str | None:
    pdef = o.data_properties.get(prop)
    if pdef is None:
        return f"property {prop!r} not declared"
    if pdef.domain != class_name:
        return f"property {prop!r} has domain {pdef.domain!r}, used on {class_name!r}"
    expected = _RANGE_TYPES[pdef.range]
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return None
    if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
        return f"value {value!r} does not match range {pdef.range!r} of {prop!r}"
    return None


def assemble_graph(o: Ontology, entities: list[Entity], links: set[Link]) -> KnowledgeGraph:
    """Index pre-built entities and links, enforcing every graph invariant.

    Shared by :func:`build_graph` and the N-Triples importer, which is
    why link endpoints and literal typing are re-checked here.
    """
    violations = validate_ontology(o)
    if violations:
        raise GraphBuildError([f"invalid ontology: {v}" for v in violations])

    graph = KnowledgeGraph(o)
    problems: list[str] = []

    for entity in entities:
        if entity.class_name not in o.classes:
            problems.append(f"entity {entity.uid!r}: class {entity.class_name!r} not declared")
            continue
        bucket = graph._by_class.setdefault(entity.class_name, {})
        if entity.uid in bucket:
            problems.append(f"duplicate uid {entity.uid!r} in class {entity.class_name!r}")
            continue
        for prop, value in entity.values.items():
            problem = _check_value(o, entity.class_name, prop, value)
            if problem:
                problems.append(f"entity {entity.uid!r}: {problem}")
        bucket[entity.uid] = entity

    for link in links:
        pdef = o.object_properties.get(link.predicate)
        if pdef is None:
            problems.append(f"link predicate {link.predicate!r} not declared")
            continue
        if graph.entity(pdef.domain, link.subject_uid) is None:
            problems.append(
                f"link {link.subject_uid!r} -{link.predicate}-> {link.object_uid!r}: "
                f"no {pdef.domain!r} entity {link.subject_uid!r}"
            )
        if graph.entity(pdef.range, link.object_uid) is None:
            problems.append(
                f"link {link.subject_uid!r} -{link.predicate}-> {link.object_uid!r}: "
                f"no {pdef.range!r} entity {link.object_uid!r}"
            )

    if problems:
        raise GraphBuildError(problems)

    graph.links = tuple(sorted(links))
    index: dict[str, list[Link]] = {}
    for link in graph.links:
        index.setdefault(link.predicate, []).append(link)
    graph.predicate_index = {pred: tuple(ls) for pred, ls in index.items()}

    # keep class buckets sorted by uid for deterministic iteration
    graph._by_class = {
        cls: dict(sorted(graph._by_class[cls].items())) for cls in sorted(graph._by_class)
    }
    return graph


def build_graph(o: Ontology, records: list[NormalizedRecord]) -> KnowledgeGraph:
    """Materialize records into a graph; entities first, links second.

    Never succeeds with an invalid ontology. A link entry on a record
    whose class matches the predicate's range (a foreign-key column on
    the child row) is stored with the referenced row as subject, per the
    predicate's declared direction, so forward references between tabs
    resolve regardless of ingest order.
    """
    problems: list[str] = []
    entities: list[Entity] = []
    for record in records:
        entity = Entity(record.uid, record.class_name)
        for prop, value in record.values.items():
            pdef = o.data_properties.get(prop)
            if pdef is not None and pdef.range == "float":
                value = float(value)
            entity.values[prop] = value
        entities.append(entity)

    by_class: dict[str, set[str]] = {}
    for record in records:
        by_class.setdefault(record.class_name, set()).add(record.uid)

    links: set[Link] = set()
    for record in records:
        for predicate, target_uid in record.links.items():
            pdef = o.object_properties.get(predicate)
            if pdef is None:
                problems.append(f"record {record.uid!r}: object property {predicate!r} not declared")
                continue
            if record.class_name == pdef.domain:
                subject, obj = record.uid, target_uid
            elif record.class_name == pdef.range:
                subject, obj = target_uid, record.uid
            else:
                problems.append(
                    f"record {record.uid!r}: {predicate!r} relates {pdef.domain!r} to "
                    f"{pdef.range!r}, not {record.class_name!r}"
                )
                continue
            links.add(Link(subject, predicate, obj))

    if problems:
        raise GraphBuildError(problems)
    return assemble_graph(o, entities, links)


def stats(g: KnowledgeGraph) -> GraphStats:
    """Exact usage counts: distinct types with at least one instance."""
    data_props = {prop for e in g.iter_entities() for prop in e.values}
    return GraphStats(
        n_classes_used=len(g._by_class),
        n_object_property_types_used=len(g.predicate_index),
        n_data_property_types_used=len(data_props),
        n_entities=g.n_entities,
        n_links=g.n_links,
        n_literal_assertions=g.n_literal_assertions,
    )
