"""Command-line pipeline: gen, ingest, stats, export, cube precompute, serve.

Stages hand off through files so each one is independently runnable and
re-runnable: same inputs, byte-identical outputs. Exit codes: 1 usage,
2 validation, 3 I/O; failures print one structured JSON error to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cube as cube_mod
from .datagen import GenConfig, generate
from .graph import GraphBuildError, build_graph, stats
from .ingest import IngestError, ingest_directory, load_mapping
from .ntriples import NTriplesError, export_ntriples, export_turtle, import_ntriples
from .ontology import validate_ontology
from .turtle import TurtleParseError, parse_ontology

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


class UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        raise UsageExit(message)


class CliError(Exception):
    def __init__(self, exit_code: int, code: str, message: str, details: object = None):
        super().__init__(message)
        self.exit_code = exit_code
        self.code = code
        self.details = details


def _fail(exc: CliError) -> int:
    body = {"code": exc.code, "message": str(exc)}
    if exc.details is not None:
        body["details"] = exc.details
    print(json.dumps(body), file=sys.stderr)
    return exc.exit_code


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, "io-error", f"cannot read {what} {path}: {exc}") from exc


def _write_text(path: str, text: str, what: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, "io-error", f"cannot write {what} {path}: {exc}") from exc


def _load_ontology(path: str):
    text = _read_text(path, "ontology")
    try:
        o = parse_ontology(text)
    except TurtleParseError as exc:
        raise CliError(EXIT_VALIDATION, "ontology-parse-error", str(exc)) from exc
    violations = validate_ontology(o)
    if violations:
        raise CliError(
            EXIT_VALIDATION,
            "ontology-invalid",
            f"{len(violations)} ontology violations",
            details=[str(v) for v in violations],
        )
    return o


def _load_graph(graph_path: str, ontology_path: str):
    o = _load_ontology(ontology_path)
    text = _read_text(graph_path, "graph")
    try:
        return import_ntriples(text, o)
    except NTriplesError as exc:
        raise CliError(EXIT_VALIDATION, "graph-parse-error", str(exc)) from exc


def _cmd_gen(args) -> int:
    if args.config:
        try:
            cfg = GenConfig.from_json(json.loads(_read_text(args.config, "gen config")))
        except (json.JSONDecodeError, ValueError, TypeError) as exc:
            raise CliError(EXIT_VALIDATION, "bad-config", f"invalid gen config: {exc}") from exc
    else:
        cfg = GenConfig()
    try:
        ledger = generate(cfg, args.out)
    except OSError as exc:
        raise CliError(EXIT_IO, "io-error", f"cannot write dataset: {exc}") from exc
    print(json.dumps({"out": args.out, "profiles": ledger.n_profiles, "entities": ledger.stats["n_entities"]}))
    return 0


def _cmd_ingest(args) -> int:
    o = _load_ontology(args.ontology)
    try:
        mapping = load_mapping(args.mapping)
    except OSError as exc:
        raise CliError(EXIT_IO, "io-error", f"cannot read mapping {args.mapping}: {exc}") from exc
    except (json.JSONDecodeError, KeyError) as exc:
        raise CliError(EXIT_VALIDATION, "bad-mapping", f"invalid mapping dictionary: {exc}") from exc

    if not Path(args.input).is_dir():
        raise CliError(EXIT_IO, "io-error", f"input directory {args.input} does not exist")

    try:
        records, report = ingest_directory(args.input, mapping, o)
    except IngestError as exc:
        report = getattr(exc, "report", None)
        if args.report and report is not None:
            _write_text(args.report, json.dumps(report.to_json(), indent=2) + "\n", "ingest report")
        raise CliError(
            EXIT_VALIDATION,
            "ingest-failed",
            f"{len(exc.issues)} ingest issues",
            details=[str(i) for i in exc.issues],
        ) from exc

    try:
        graph = build_graph(o, records)
    except GraphBuildError as exc:
        raise CliError(EXIT_VALIDATION, "graph-build-failed", "graph violates ontology", details=exc.problems) from exc

    base = args.base_uri or o.base_uri
    _write_text(args.out, export_ntriples(graph, base), "graph export")
    if args.report:
        _write_text(args.report, json.dumps(report.to_json(), indent=2) + "\n", "ingest report")
    print(json.dumps(stats(graph).to_json()))
    return 0


def _cmd_stats(args) -> int:
    graph = _load_graph(args.graph, args.ontology)
    print(json.dumps(stats(graph).to_json(), indent=2))
    return 0


def _cmd_export(args) -> int:
    graph = _load_graph(args.graph, args.ontology)
    base = args.base_uri or graph.ontology.base_uri
    if args.format == "ntriples":
        text = export_ntriples(graph, base)
    else:
        text = export_turtle(graph, base)
    _write_text(args.out, text, "export")
    print(json.dumps({"out": args.out, "format": args.format}))
    return 0


def _cmd_cube_precompute(args) -> int:
    graph = _load_graph(args.graph, args.ontology)
    if args.spec:
        try:
            spec = cube_mod.load_spec(args.spec)
        except OSError as exc:
            raise CliError(EXIT_IO, "io-error", f"cannot read cube spec {args.spec}: {exc}") from exc
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CliError(EXIT_VALIDATION, "bad-cube-spec", f"invalid cube spec: {exc}") from exc
    else:
        spec = cube_mod.default_spec()
    for dim in spec.dimensions:
        if dim.property not in graph.ontology.data_properties:
            raise CliError(
                EXIT_VALIDATION, "bad-cube-spec", f"dimension {dim.name!r}: property {dim.property!r} not declared"
            )
    store = cube_mod.precompute(graph, spec)
    try:
        cube_mod.save_store(store, args.out)
    except OSError as exc:
        raise CliError(EXIT_IO, "io-error", f"cannot write cube store: {exc}") from exc
    print(json.dumps({"out": args.out, "cells": len(store.cells)}))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    graph = _load_graph(args.graph, args.ontology)
    store = None
    if args.cube:
        try:
            store = cube_mod.load_store(args.cube, graph)
        except OSError as exc:
            raise CliError(EXIT_IO, "io-error", f"cannot read cube store {args.cube}: {exc}") from exc
        except ValueError as exc:
            raise CliError(EXIT_VALIDATION, "bad-cube-store", str(exc)) from exc
    app = create_app(
        graph,
        cube_store=store,
        base_uri=args.base_uri,
        ui_dir=args.ui if args.ui else None,
        cors_origins=args.cors_origin or None,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="soilgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset with its ground-truth ledger")
    p.add_argument("--config", help="gen config JSON (defaults baked in)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("ingest", help="ingest CSV tabs into an N-Triples graph export")
    p.add_argument("--input", required=True, help="directory of CSV tabs")
    p.add_argument("--mapping", required=True, help="mapping dictionary JSON")
    p.add_argument("--ontology", required=True, help="ontology Turtle file")
    p.add_argument("--out", required=True, help="output N-Triples file")
    p.add_argument("--report", help="ingest report JSON path")
    p.add_argument("--base-uri", help="entity URI base (defaults to the ontology base)")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("stats", help="print graph statistics as JSON")
    p.add_argument("--graph", required=True)
    p.add_argument("--ontology", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export", help="re-serialize a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--ontology", required=True)
    p.add_argument("--format", choices=["turtle", "ntriples"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--base-uri")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("cube", help="data cube commands")
    cube_sub = p.add_subparsers(dest="cube_command", required=True)
    pc = cube_sub.add_parser("precompute", help="precompute every cube cell into a store file")
    pc.add_argument("--graph", required=True)
    pc.add_argument("--ontology", required=True)
    pc.add_argument("--spec", help="cube spec JSON (defaults to the bundled spec)")
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=_cmd_cube_precompute)

    p = sub.add_parser("serve", help="serve the REST API")
    p.add_argument("--graph", required=True)
    p.add_argument("--ontology", required=True)
    p.add_argument("--cube", help="cube store file")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--base-uri")
    p.add_argument("--ui", help="directory of dashboard static assets, served under /ui/")
    p.add_argument("--cors-origin", action="append", help="allowed CORS origin (repeatable)")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageExit as exc:
        print(json.dumps({"code": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
