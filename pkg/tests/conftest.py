"""Shared fixtures: bundled ontology, synthetic datasets, report plumbing."""

from __future__ import annotations

import random
from contextlib import contextmanager

import pytest

from soilgraph import schema
from soilgraph.cube import default_spec, precompute
from soilgraph.datagen import GenConfig, generate
from soilgraph.graph import build_graph
from soilgraph.ingest import ingest_directory, load_mapping
from soilgraph.ontology import DataPropertyDef, ObjectPropertyDef, Ontology, OntologyClass
from soilgraph.turtle import parse_ontology

# one class, one data property, one object property, thesaurus links included
LISTING_SNIPPET = """\
@prefix sockg: <https://idir.uta.edu/sockg-ontology/docs/> .

###  https://idir.uta.edu/sockg-ontology/docs/SoilPhysicalSample
sockg:SoilPhysicalSample rdf:type owl:Class ;
    rdfs:comment "Soil sample measured for structural properties such as bulk density." ;
    rdfs:seeAlso <https://lod.nal.usda.gov/nalt/5142> .

###  https://idir.uta.edu/sockg-ontology/docs/bulkDensitySd_g_per_cm_cubed
sockg:bulkDensitySd_g_per_cm_cubed rdf:type owl:DatatypeProperty ;
    rdfs:domain sockg:SoilPhysicalSample ;
    rdfs:range xsd:float ;
    rdfs:seeAlso <https://lod.nal.usda.gov/nalt/20349> .

###  https://idir.uta.edu/sockg-ontology/docs/hasChemSample
sockg:hasChemSample rdf:type owl:ObjectProperty ;
    rdfs:domain sockg:ExperimentalUnit ;
    rdfs:range sockg:SoilChemicalSample .
"""


@pytest.fixture(scope="session")
def bundled_text() -> str:
    return schema.bundled_ontology_text()


@pytest.fixture(scope="session")
def bundled_onto(bundled_text):
    return parse_ontology(bundled_text)


@pytest.fixture()
def listing_snippet() -> str:
    return LISTING_SNIPPET


@pytest.fixture()
def small_valid_onto() -> Ontology:
    """The listing snippet's concepts plus the classes they reference."""
    return Ontology(
        "https://idir.uta.edu/sockg-ontology/docs/",
        [
            OntologyClass("SoilPhysicalSample", see_also="https://lod.nal.usda.gov/nalt/5142"),
            OntologyClass("SoilChemicalSample"),
            OntologyClass("ExperimentalUnit"),
        ],
        [
            DataPropertyDef(
                "bulkDensitySd_g_per_cm_cubed",
                domain="SoilPhysicalSample",
                range="float",
                see_also="https://lod.nal.usda.gov/nalt/20349",
            )
        ],
        [ObjectPropertyDef("hasChemSample", domain="ExperimentalUnit", range="SoilChemicalSample")],
    )


SMALL_CONFIG = GenConfig(seed=42)  # 2 sites x 2 fields x 12 units, 5 years


@pytest.fixture(scope="session")
def small_data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("dataset")
    ledger = generate(SMALL_CONFIG, out)
    return out, ledger


@pytest.fixture(scope="session")
def small_graph(small_data_dir, bundled_onto):
    out, _ = small_data_dir
    mapping = load_mapping(out / "mapping.json")
    records, _ = ingest_directory(out, mapping, bundled_onto)
    return build_graph(bundled_onto, records)


@pytest.fixture(scope="session")
def small_ledger(small_data_dir):
    return small_data_dir[1]


@pytest.fixture(scope="session")
def small_store(small_graph):
    return precompute(small_graph, default_spec())


def random_ontology(rng: random.Random) -> Ontology:
    """A random valid ontology for round-trip and graph properties."""
    n_classes = rng.randint(1, 6)
    classes = []
    for i in range(n_classes):
        comment = None
        if rng.random() < 0.5:
            comment = rng.choice(
                ["plain text", 'with "quotes"', "line\nbreak", "tab\there", "backslash \\ inside"]
            )
        see_also = f"https://example.org/thesaurus/{rng.randint(1, 9999)}" if rng.random() < 0.5 else None
        classes.append(OntologyClass(f"Kind{chr(65 + i)}", comment=comment, see_also=see_also))
    class_names = [c.name for c in classes]

    data_props = []
    for i in range(rng.randint(0, 8)):
        range_ = rng.choice(["string", "float", "int", "bool", "date"])
        suffix = rng.choice(["", "_kg_per_ha", "_g_per_cm_cubed", "_percent"])
        data_props.append(
            DataPropertyDef(
                f"measure{chr(97 + i)}{suffix}",
                domain=rng.choice(class_names),
                range=range_,
                comment='quoted "comment"' if rng.random() < 0.3 else None,
                see_also=f"https://example.org/t/{i}" if rng.random() < 0.3 else None,
            )
        )
    object_props = []
    for i in range(rng.randint(0, 5)):
        object_props.append(
            ObjectPropertyDef(
                f"linksTo{chr(65 + i)}",
                domain=rng.choice(class_names),
                range=rng.choice(class_names),
            )
        )
    return Ontology("https://example.org/onto/", classes, data_props, object_props)


# ---------------------------------------------------------------------------
# acceptance reporting: one pass/fail line per criterion at session end

ACCEPTANCE_RESULTS: dict[str, tuple[str, bool]] = {}


@contextmanager
def criterion(cid: str, description: str):
    try:
        yield
    except BaseException:
        ACCEPTANCE_RESULTS[cid] = (description, False)
        raise
    ACCEPTANCE_RESULTS[cid] = (description, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS, key=lambda c: int(c.lstrip("C"))):
        description, ok = ACCEPTANCE_RESULTS[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}: {description}")
