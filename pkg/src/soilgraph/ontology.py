"""Ontology model for field-experiment knowledge graphs.

Classes, data properties, and object properties with the naming
conventions used throughout the toolkit: class names in upper camel
case, property names in lower camel case with unit suffixes joined by
underscores (e.g. ``bulkDensity_g_per_cm_cubed``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from urllib.parse import urlparse

SCALAR_RANGES = ("string", "float", "int", "bool", "date")

_CLASS_NAME_RE = re.compile(r"^[A-Z][A-Za-z0-9]*$", re.ASCII)
_PROPERTY_NAME_RE = re.compile(r"^[a-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)*$", re.ASCII)


def is_class_name(name: str) -> bool:
    return bool(_CLASS_NAME_RE.match(name))


def is_property_name(name: str) -> bool:
    return bool(_PROPERTY_NAME_RE.match(name))


def is_absolute_uri(uri: str) -> bool:
    parsed = urlparse(uri)
    return bool(parsed.scheme)


@dataclass(frozen=True)
class OntologyClass:
    name: str
    comment: str | None = None
    see_also: str | None = None


@dataclass(frozen=True)
class DataPropertyDef:
    name: str
    domain: str
    range: str
    comment: str | None = None
    see_also: str | None = None


@dataclass(frozen=True)
class ObjectPropertyDef:
    name: str
    domain: str
    range: str
    comment: str | None = None
    see_also: str | None = None


@dataclass(frozen=True)
class Violation:
    """One validation finding; violations are data, not exceptions."""

    kind: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.subject}: {self.message}"


class Ontology:
    """Immutable schema of the graph: declarations indexed by name.

    Construction keeps declaration order; equality is structural and
    independent of declaration order.
    """

    def __init__(
        self,
        base_uri: str,
        classes: list[OntologyClass] | tuple[OntologyClass, ...] = (),
        data_properties: list[DataPropertyDef] | tuple[DataPropertyDef, ...] = (),
        object_properties: list[ObjectPropertyDef] | tuple[ObjectPropertyDef, ...] = (),
    ):
        self.base_uri = base_uri
        self.classes: dict[str, OntologyClass] = {c.name: c for c in classes}
        self.data_properties: dict[str, DataPropertyDef] = {p.name: p for p in data_properties}
        self.object_properties: dict[str, ObjectPropertyDef] = {
            p.name: p for p in object_properties
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return (
            self.base_uri == other.base_uri
            and self.classes == other.classes
            and self.data_properties == other.data_properties
            and self.object_properties == other.object_properties
        )

    def __repr__(self) -> str:
        return (
            f"Ontology(base_uri={self.base_uri!r}, {len(self.classes)} classes, "
            f"{len(self.data_properties)} data properties, "
            f"{len(self.object_properties)} object properties)"
        )

    def is_declared(self, name: str) -> bool:
        return (
            name in self.classes
            or name in self.data_properties
            or name in self.object_properties
        )

    def kind_of(self, name: str) -> str | None:
        if name in self.classes:
            return "class"
        if name in self.data_properties:
            return "data-property"
        if name in self.object_properties:
            return "object-property"
        return None

    def properties_of(self, class_name: str) -> list[DataPropertyDef]:
        """Data properties whose domain is the given class, by name."""
        return sorted(
            (p for p in self.data_properties.values() if p.domain == class_name),
            key=lambda p: p.name,
        )


def validate_ontology(o: Ontology) -> list[Violation]:
    """Check naming conventions, name uniqueness, and reference integrity.

    An empty report means every invariant holds. Name collisions inside
    one declaration group are unobservable here (the constructor keys by
    name), but collisions across groups are reported.
    """
    violations: list[Violation] = []

    if not is_absolute_uri(o.base_uri):
        violations.append(Violation("invalid-base-uri", o.base_uri, "base URI must be absolute"))

    seen: dict[str, str] = {}
    for group, names in (
        ("class", o.classes),
        ("data property", o.data_properties),
        ("object property", o.object_properties),
    ):
        for name in names:
            if name in seen:
                violations.append(
                    Violation(
                        "duplicate-name",
                        name,
                        f"declared both as {seen[name]} and as {group}",
                    )
                )
            else:
                seen[name] = group

    for cls in o.classes.values():
        if not is_class_name(cls.name):
            violations.append(
                Violation("bad-class-name", cls.name, "expected upper camel case, ASCII alphanumeric")
            )
        if cls.see_also is not None and not is_absolute_uri(cls.see_also):
            violations.append(Violation("bad-see-also", cls.name, f"not an absolute URI: {cls.see_also}"))

    for prop in o.data_properties.values():
        if not is_property_name(prop.name):
            violations.append(
                Violation(
                    "bad-property-name",
                    prop.name,
                    "expected lower camel case with optional underscore unit suffix",
                )
            )
        if prop.domain not in o.classes:
            violations.append(
                Violation("dangling-domain", prop.name, f"domain {prop.domain!r} is not a declared class")
            )
        if prop.range not in SCALAR_RANGES:
            violations.append(
                Violation("bad-range", prop.name, f"range {prop.range!r} not one of {SCALAR_RANGES}")
            )
        if prop.see_also is not None and not is_absolute_uri(prop.see_also):
            violations.append(Violation("bad-see-also", prop.name, f"not an absolute URI: {prop.see_also}"))

    for prop in o.object_properties.values():
        if not is_property_name(prop.name):
            violations.append(
                Violation(
                    "bad-property-name",
                    prop.name,
                    "expected lower camel case with optional underscore unit suffix",
                )
            )
        if prop.domain not in o.classes:
            violations.append(
                Violation("dangling-domain", prop.name, f"domain {prop.domain!r} is not a declared class")
            )
        if prop.range not in o.classes:
            violations.append(
                Violation("dangling-range", prop.name, f"range {prop.range!r} is not a declared class")
            )
        if prop.see_also is not None and not is_absolute_uri(prop.see_also):
            violations.append(Violation("bad-see-also", prop.name, f"not an absolute URI: {prop.see_also}"))

    return violations


def concept_uri(base: str, name: str, *, ontology: Ontology | None = None) -> str:
    """Resolvable URI of a declared concept: base + name.

    Names are alphanumeric identifiers so no escaping is applied. When an
    ontology is supplied, undeclared names are rejected.
    """
    if not name:
        raise ValueError("concept name must be non-empty")
    if not (is_class_name(name) or is_property_name(name)):
        raise ValueError(f"not a valid concept name: {name!r}")
    if ontology is not None and not ontology.is_declared(name):
        raise KeyError(f"concept not declared in ontology: {name!r}")
    return base + name


@dataclass(frozen=True)
class ConceptDoc:
    """Documentation payload behind a concept's resolvable URI."""

    name: str
    kind: str
    uri: str
    comment: str | None
    see_also: str | None
    related: dict = field(default_factory=dict)


def concept_doc(o: Ontology, name: str) -> ConceptDoc:
    """Build the documentation record for one declared concept.

    For a class the record lists its data properties and every object
    property naming it as domain or range; for a property it names the
    domain and range.
    """
    kind = o.kind_of(name)
    if kind is None:
        raise KeyError(f"concept not declared in ontology: {name!r}")
    uri = concept_uri(o.base_uri, name)

    if kind == "class":
        cls = o.classes[name]
        object_props = []
        for op in sorted(o.object_properties.values(), key=lambda p: p.name):
            if op.domain == name:
                object_props.append({"name": op.name, "role": "domain"})
            if op.range == name:
                object_props.append({"name": op.name, "role": "range"})
        related = {
            "data_properties": [p.name for p in o.properties_of(name)],
            "object_properties": object_props,
        }
        return ConceptDoc(name, kind, uri, cls.comment, cls.see_also, related)

    if kind == "data-property":
        prop = o.data_properties[name]
        related = {"domain": prop.domain, "range": prop.range}
        return ConceptDoc(name, kind, uri, prop.comment, prop.see_also, related)

    oprop = o.object_properties[name]
    related = {"domain": oprop.domain, "range": oprop.range}
    return ConceptDoc(name, kind, uri, oprop.comment, oprop.see_also, related)
