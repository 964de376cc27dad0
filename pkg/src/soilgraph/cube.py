"""Precomputed data cube over SOC stock.

Dimensions are management attributes with curated candidate values;
every combination of values (each dimension also taking a wildcard that
imposes no constraint) is evaluated once and persisted, giving
constant-time lookups where live evaluation would walk the graph. Keys
outside the curated values stay answerable through live evaluation.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import schema
from .graph import KnowledgeGraph
from .ingest import parse_scalar
from .soc import AggregateResult, pooled_mean, survey_window

log = logging.getLogger(__name__)

ANY = None  # wildcard dimension value, rendered as '*'

STORE_FORMAT = "soilgraph-cube/1"


@dataclass(frozen=True)
class CubeDimension:
    """One influencing factor: the attribute it constrains and its
    candidate values."""

    name: str
    class_name: str
    property: str
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError(f"dimension {self.name!r} has no candidate values")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"dimension {self.name!r} has duplicate values")


@dataclass(frozen=True)
class CubeSpec:
    dimensions: tuple[CubeDimension, ...]
    window: tuple[float, float]
    fact: str = "SOC_STOCK"

    def __post_init__(self) -> None:
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names: {names}")
        if not self.window[0] < self.window[1]:
            raise ValueError(f"bad depth window {self.window}")

    def dimension(self, name: str) -> CubeDimension:
        for dim in self.dimensions:
            if dim.name == name:
                return dim
        raise KeyError(f"no dimension {name!r}")

    def to_json(self) -> dict:
        return {
            "fact": self.fact,
            "windowUpperCm": self.window[0],
            "windowLowerCm": self.window[1],
            "dimensions": [
                {
                    "name": d.name,
                    "class": d.class_name,
                    "property": d.property,
                    "values": list(d.values),
                }
                for d in self.dimensions
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CubeSpec":
        dims = tuple(
            CubeDimension(d["name"], d["class"], d["property"], tuple(d["values"]))
            for d in doc["dimensions"]
        )
        return cls(dims, (doc["windowUpperCm"], doc["windowLowerCm"]), doc.get("fact", "SOC_STOCK"))


def load_spec(path: str | Path) -> CubeSpec:
    return CubeSpec.from_json(json.loads(Path(path).read_text("utf-8")))


def default_spec() -> CubeSpec:
    """The dimension config shipped with the package (27 cells, 0-30 cm)."""
    return CubeSpec.from_json(json.loads(schema.bundled_cube_spec_text()))


Combination = tuple  # one entry per dimension: a value string or ANY


def canonical_key(spec: CubeSpec, combo: Combination) -> str:
    """Stable text key: ``dim=value`` pairs joined by ``&``, ANY as ``*``."""
    if len(combo) != len(spec.dimensions):
        raise ValueError(f"combination {combo!r} does not fit {len(spec.dimensions)} dimensions")
    return "&".join(
        f"{dim.name}={'*' if value is ANY else value}"
        for dim, value in zip(spec.dimensions, combo)
    )


def parse_key(spec: CubeSpec, key: str) -> Combination:
    parts = key.split("&") if key else []
    if len(parts) != len(spec.dimensions):
        raise ValueError(f"key {key!r} does not fit {len(spec.dimensions)} dimensions")
    combo = []
    for dim, part in zip(spec.dimensions, parts):
        name, sep, value = part.partition("=")
        if not sep or name != dim.name:
            raise ValueError(f"key segment {part!r} does not match dimension {dim.name!r}")
        combo.append(ANY if value == "*" else value)
    return tuple(combo)


def generate_combinations(spec: CubeSpec) -> list[Combination]:
    """Every value combination, each dimension extended with the wildcard.

    Exactly prod(|values_i| + 1) combinations, ordered by canonical key.
    """
    axes = [tuple(dim.values) + (ANY,) for dim in spec.dimensions]
    combos = list(itertools.product(*axes))
    combos.sort(key=lambda c: canonical_key(spec, c))
    return combos


def _select_units(g: KnowledgeGraph, spec: CubeSpec, combo: Combination) -> set[str]:
    """Units whose management attributes equal every non-ANY value."""
    treatment_of: dict[str, str] = {
        l.subject_uid: l.object_uid for l in g.predicate_index.get(schema.APPLIED_TREATMENT, ())
    }
    units = {e.uid for e in g.entities_of(schema.EXPERIMENTAL_UNIT)}
    for dim, value in zip(spec.dimensions, combo):
        if value is ANY:
            continue
        pdef = g.ontology.data_properties.get(dim.property)
        try:
            expected = parse_scalar(value, pdef.range) if pdef else value
        except ValueError:
            return set()
        if dim.class_name == schema.TREATMENT:
            matching = set()
            for unit in units:
                treatment_uid = treatment_of.get(unit)
                if treatment_uid is None:
                    continue
                treatment = g.entity(schema.TREATMENT, treatment_uid)
                if treatment is not None and treatment.values.get(dim.property) == expected:
                    matching.add(unit)
            units = matching
        else:
            units = {
                unit
                for unit in units
                if (e := g.entity(dim.class_name, unit)) is not None
                and e.values.get(dim.property) == expected
            }
        if not units:
            break
    return units


def evaluate_live(g: KnowledgeGraph, spec: CubeSpec, combo: Combination) -> AggregateResult:
    """Walk the graph for one combination: select units, assemble their
    profiles over the spec window, and pool the surviving stocks."""
    if len(combo) != len(spec.dimensions):
        raise ValueError(f"combination {combo!r} does not fit the spec")
    units = _select_units(g, spec, combo)
    if not units:
        return AggregateResult(None, 0, 0)
    return pooled_mean(survey_window(g, spec.window, units))


@dataclass
class CubeStore:
    """Persisted combination -> aggregate map for constant-time lookup."""

    spec: CubeSpec
    cells: dict[str, AggregateResult]
    fingerprint: str
    built_at: str | None = None


class KeyNotPrecomputed(KeyError):
    """The combination lies outside the spec's curated values."""


def precompute(g: KnowledgeGraph, spec: CubeSpec, *, built_at: str | None = None) -> CubeStore:
    """Evaluate every generated combination and freeze the results.

    Empty cells are stored too, so lookup can distinguish "precomputed,
    no data" from "not precomputed". ``built_at`` defaults to unset to
    keep repeated runs byte-identical.
    """
    cells: dict[str, AggregateResult] = {}
    for combo in generate_combinations(spec):
        cells[canonical_key(spec, combo)] = evaluate_live(g, spec, combo)
    return CubeStore(spec=spec, cells=cells, fingerprint=g.fingerprint(), built_at=built_at)


def lookup(store: CubeStore, combo: Combination) -> AggregateResult:
    """Constant-time cell access by exact key."""
    key = canonical_key(store.spec, combo)
    try:
        return store.cells[key]
    except KeyError:
        raise KeyNotPrecomputed(key) from None


def save_store(store: CubeStore, path: str | Path) -> None:
    """Write the store: a JSON header line, then sorted key/cell lines."""
    header = {
        "format": STORE_FORMAT,
        "spec": store.spec.to_json(),
        "fingerprint": store.fingerprint,
        "builtAt": store.built_at,
        "cells": len(store.cells),
    }
    lines = [json.dumps(header, sort_keys=True)]
    for key in sorted(store.cells):
        lines.append(f"{key}\t{json.dumps(store.cells[key].to_json(), sort_keys=True)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_store(path: str | Path, graph: KnowledgeGraph | None = None) -> CubeStore:
    """Read a persisted store; a fingerprint mismatch against ``graph``
    warns but does not fail."""
    text = Path(path).read_text("utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"{path}: empty store file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line 1: bad header: {exc}") from exc
    if header.get("format") != STORE_FORMAT:
        raise ValueError(f"{path}: line 1: unknown store format {header.get('format')!r}")
    spec = CubeSpec.from_json(header["spec"])

    cells: dict[str, AggregateResult] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        key, sep, payload = line.partition("\t")
        if not sep:
            raise ValueError(f"{path}: line {line_no}: expected key<TAB>json")
        try:
            parse_key(spec, key)
            cells[key] = AggregateResult.from_json(json.loads(payload))
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise ValueError(f"{path}: line {line_no}: {exc}") from exc
    if len(cells) != header.get("cells"):
        raise ValueError(
            f"{path}: truncated store: header promises {header.get('cells')} cells, "
            f"found {len(cells)} (file ends at line {len(lines)})"
        )

    store = CubeStore(spec=spec, cells=cells, fingerprint=header["fingerprint"], built_at=header.get("builtAt"))
    if graph is not None and graph.fingerprint() != store.fingerprint:
        log.warning("cube store %s was built from a different graph (fingerprint mismatch)", path)
    return store
