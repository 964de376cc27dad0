"""Basic graph-pattern matching and faceted treatment search.

Patterns are conjunctive triples with ``?name`` variables; evaluation
propagates bindings left to right and returns sorted, duplicate-free
binding maps. The facet helpers drive the drop-down behaviour of the
exploration dashboard: the options offered for one facet are computed
with that facet's own constraint removed, so every offered value is
guaranteed to match at least one treatment.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import schema
from .graph import KnowledgeGraph
from .ingest import Scalar

RDF_TYPE = "rdf:type"


def is_variable(term: object) -> bool:
    return isinstance(term, str) and term.startswith("?")


@dataclass(frozen=True)
class TriplePattern:
    """One pattern: uid or ``?var`` subject; property name, ``rdf:type``
    or ``?var`` predicate; uid, literal, class name or ``?var`` object."""

    subject: str
    predicate: str
    object: Scalar

    @property
    def is_full_scan(self) -> bool:
        return is_variable(self.subject) and is_variable(self.predicate) and is_variable(self.object)


def _iter_triples(g: KnowledgeGraph, predicate: str | None):
    """Concrete (subject uid, predicate, object) triples, optionally
    restricted to one predicate name."""
    if predicate is None or predicate == RDF_TYPE:
        for entity in g.iter_entities():
            yield entity.uid, RDF_TYPE, entity.class_name
        if predicate is not None:
            return
    if predicate is None:
        for entity in g.iter_entities():
            for prop, value in entity.values.items():
                yield entity.uid, prop, value
        for link in g.links:
            yield link.subject_uid, link.predicate, link.object_uid
        return
    if predicate in g.ontology.data_properties:
        for entity in g.iter_entities():
            for prop, value in entity.values.items():
                if prop == predicate:
                    yield entity.uid, prop, value
    elif predicate in g.ontology.object_properties:
        for link in g.predicate_index.get(predicate, ()):
            yield link.subject_uid, link.predicate, link.object_uid


def _sort_key(value: Scalar) -> tuple[str, str]:
    return (type(value).__name__, str(value))


def match_pattern(g: KnowledgeGraph, patterns: list[TriplePattern]) -> list[dict[str, Scalar]]:
    """All variable bindings satisfying every pattern, in sorted order.

    Conjunction semantics with shared variables by name; results carry
    one entry per variable and contain no duplicates.
    """
    if not patterns:
        raise ValueError("at least one pattern is required")

    bindings: list[dict[str, Scalar]] = [{}]
    for pattern in patterns:
        next_bindings: list[dict[str, Scalar]] = []
        for binding in bindings:
            subject = binding.get(pattern.subject, pattern.subject) if is_variable(pattern.subject) else pattern.subject
            predicate = (
                binding.get(pattern.predicate, pattern.predicate)
                if is_variable(pattern.predicate)
                else pattern.predicate
            )
            obj = binding.get(pattern.object, pattern.object) if is_variable(pattern.object) else pattern.object

            fixed_predicate = None if is_variable(predicate) else predicate
            for s, p, o in _iter_triples(g, fixed_predicate):
                if not is_variable(subject) and s != subject:
                    continue
                if not is_variable(obj):
                    if type(o) is not type(obj) or o != obj:
                        continue
                new = dict(binding)
                if is_variable(subject):
                    new[subject] = s
                if is_variable(predicate):
                    new[predicate] = p
                if is_variable(obj):
                    new[obj] = o
                next_bindings.append(new)
        bindings = next_bindings

    unique = {tuple(sorted((k, _sort_key(v)) for k, v in b.items())): b for b in bindings}
    return [unique[key] for key in sorted(unique)]


@dataclass(frozen=True)
class TreatmentFilter:
    """Equality constraints over treatment attributes; absent fields match all."""

    crop: str | None = None
    fertilizer_class: str | None = None
    residue_removal: str | None = None
    tillage: str | None = None
    irrigation: bool | None = None
    nitrogen_level: str | None = None
    rotation: str | None = None

    def constraints(self) -> dict[str, str]:
        """Present fields as (ontology property, expected value) pairs."""
        out: dict[str, str] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            prop = schema.FACET_FIELDS[f.name]
            if f.name == "irrigation":
                out[prop] = schema.IRRIGATION_APPLIED if value else schema.IRRIGATION_NOT_APPLIED
            else:
                out[prop] = value
        return out

    def replace(self, field_name: str, value) -> "TreatmentFilter":
        kwargs = {f.name: getattr(self, f.name) for f in fields(self)}
        kwargs[field_name] = value
        return TreatmentFilter(**kwargs)


def _matches(entity_values: dict, constraints: dict[str, str]) -> bool:
    return all(entity_values.get(prop) == expected for prop, expected in constraints.items())


def filter_treatments(g: KnowledgeGraph, f: TreatmentFilter) -> list[str]:
    """UIDs of treatments whose attributes equal every present field."""
    constraints = f.constraints()
    return sorted(
        t.uid for t in g.entities_of(schema.TREATMENT) if _matches(t.values, constraints)
    )


def facet_options(g: KnowledgeGraph, f: TreatmentFilter) -> dict[str, list[str]]:
    """Available drop-down values per facet given the other facets' state.

    For each facet field the candidates are the distinct values among
    treatments matching the filter with that field's own constraint
    removed; selecting any offered value therefore yields a non-empty
    result.
    """
    treatments = g.entities_of(schema.TREATMENT)
    options: dict[str, list[str]] = {}
    for field_name, prop in schema.FACET_FIELDS.items():
        relaxed = f.replace(field_name, None).constraints()
        values = {
            t.values[prop]
            for t in treatments
            if prop in t.values and _matches(t.values, relaxed)
        }
        options[field_name] = sorted(values)
    return options


def treatment_units(g: KnowledgeGraph, treatment_uid: str) -> list[str]:
    """Experimental units linked to one treatment."""
    return sorted(
        l.subject_uid for l in g.links_to(schema.APPLIED_TREATMENT, treatment_uid)
    )
