"""soilgraph: knowledge-graph engine for soil-carbon field experiments."""

from .cube import (
    CubeDimension,
    CubeSpec,
    CubeStore,
    KeyNotPrecomputed,
    evaluate_live,
    generate_combinations,
    load_store,
    lookup,
    precompute,
    save_store,
)
from .datagen import GenConfig, GroundTruthLedger, generate
from .graph import Entity, GraphBuildError, GraphStats, KnowledgeGraph, Link, build_graph, stats
from .ingest import (
    CellValue,
    IngestError,
    MappingDictionary,
    NormalizedRecord,
    RawTable,
    TabMapping,
    assign_uids,
    ingest_directory,
    normalize_columns,
    normalize_missing,
    typecheck_records,
)
from .ntriples import NTriplesError, export_ntriples, import_ntriples
from .ontology import (
    ConceptDoc,
    DataPropertyDef,
    ObjectPropertyDef,
    Ontology,
    OntologyClass,
    concept_doc,
    concept_uri,
    validate_ontology,
)
from .query import TreatmentFilter, TriplePattern, facet_options, filter_treatments, match_pattern
from .soc import (
    AggregateResult,
    DepthProfile,
    GapInWindow,
    SoilLayer,
    StartsBelowWindow,
    StockResult,
    TooShallow,
    assemble_profiles,
    grouped_mean_stock,
    layer_stock,
    profile_stock,
)
from .turtle import TurtleParseError, parse_ontology, serialize_ontology

__version__ = "0.1.0"

__all__ = [
    "AggregateResult",
    "CellValue",
    "ConceptDoc",
    "CubeDimension",
    "CubeSpec",
    "CubeStore",
    "DataPropertyDef",
    "DepthProfile",
    "Entity",
    "GapInWindow",
    "GenConfig",
    "GraphBuildError",
    "GraphStats",
    "GroundTruthLedger",
    "IngestError",
    "KeyNotPrecomputed",
    "KnowledgeGraph",
    "Link",
    "MappingDictionary",
    "NTriplesError",
    "NormalizedRecord",
    "ObjectPropertyDef",
    "Ontology",
    "OntologyClass",
    "RawTable",
    "SoilLayer",
    "StartsBelowWindow",
    "StockResult",
    "TabMapping",
    "TooShallow",
    "TreatmentFilter",
    "TriplePattern",
    "TurtleParseError",
    "assemble_profiles",
    "assign_uids",
    "build_graph",
    "concept_doc",
    "concept_uri",
    "evaluate_live",
    "export_ntriples",
    "facet_options",
    "filter_treatments",
    "generate",
    "generate_combinations",
    "grouped_mean_stock",
    "import_ntriples",
    "ingest_directory",
    "layer_stock",
    "load_store",
    "lookup",
    "match_pattern",
    "normalize_columns",
    "normalize_missing",
    "parse_ontology",
    "precompute",
    "profile_stock",
    "save_store",
    "serialize_ontology",
    "stats",
    "typecheck_records",
    "validate_ontology",
]
