"""Read-only HTTP/JSON API over an immutable graph and cube store.

Cube requests try the precomputed store first and fall back to live
evaluation for keys outside it; every response says which path answered
(``source: "cube" | "live"``). Concept documentation pages are served
under ``/docs/{conceptName}`` as HTML or JSON by content negotiation.
"""

from __future__ import annotations

from html import escape
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import schema
from .cube import ANY, CubeSpec, CubeStore, KeyNotPrecomputed, canonical_key, evaluate_live, lookup
from .graph import KnowledgeGraph, stats
from .ontology import concept_doc
from .query import TreatmentFilter, facet_options, filter_treatments, treatment_units
from .soc import AggregateResult, grouped_mean_stock

DEFAULT_LIMIT = 100

# query parameter name per facet field
_FACET_PARAMS = {
    "crop": "crop",
    "fertilizerClass": "fertilizer_class",
    "residueRemoval": "residue_removal",
    "tillage": "tillage",
    "irrigation": "irrigation",
    "nitrogenLevel": "nitrogen_level",
    "rotation": "rotation",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: object = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


def _json_scalar(value):
    if hasattr(value, "isoformat"):
        return value.isoformat()
    return value


def _entity_json(entity) -> dict:
    return {
        "uid": entity.uid,
        "class": entity.class_name,
        "values": {prop: _json_scalar(v) for prop, v in sorted(entity.values.items())},
    }


def _parse_float(params, name: str, default: float | None) -> float | None:
    raw = params.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ApiError(400, "malformed-parameter", f"{name} must be a number, got {raw!r}") from None


def _parse_int(params, name: str, default: int) -> int:
    raw = params.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ApiError(400, "malformed-parameter", f"{name} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ApiError(400, "malformed-parameter", f"{name} must be non-negative")
    return value


def _parse_window(params, default: tuple[float, float]) -> tuple[float, float]:
    upper = _parse_float(params, "depthUpperCm", default[0])
    lower = _parse_float(params, "depthLowerCm", default[1])
    if upper >= lower:
        raise ApiError(422, "bad-depth-window", f"depthUpperCm {upper} must be less than depthLowerCm {lower}")
    return upper, lower


def _parse_filter(params) -> TreatmentFilter:
    kwargs = {}
    for param, field_name in _FACET_PARAMS.items():
        raw = params.get(param)
        if raw is None:
            continue
        if field_name == "irrigation":
            if raw == schema.IRRIGATION_APPLIED:
                kwargs[field_name] = True
            elif raw == schema.IRRIGATION_NOT_APPLIED:
                kwargs[field_name] = False
            else:
                raise ApiError(
                    400,
                    "malformed-parameter",
                    f"irrigation must be '{schema.IRRIGATION_APPLIED}' or "
                    f"'{schema.IRRIGATION_NOT_APPLIED}', got {raw!r}",
                )
        else:
            kwargs[field_name] = raw
    return TreatmentFilter(**kwargs)


def _concept_html(doc) -> str:
    rows = [
        f"<h1>{escape(doc.name)}</h1>",
        f"<p class='kind'>{escape(doc.kind)}</p>",
        f"<p class='uri'><code>{escape(doc.uri)}</code></p>",
    ]
    if doc.comment:
        rows.append(f"<p>{escape(doc.comment)}</p>")
    if doc.see_also:
        rows.append(f"<p>See also: <a href='{escape(doc.see_also)}'>{escape(doc.see_also)}</a></p>")
    if doc.kind == "class":
        props = doc.related.get("data_properties", [])
        rows.append("<h2>Data properties</h2>")
        rows.append("<ul>" + "".join(f"<li>{escape(p)}</li>" for p in props) + "</ul>")
        oprops = doc.related.get("object_properties", [])
        rows.append("<h2>Object properties</h2>")
        rows.append(
            "<ul>"
            + "".join(f"<li>{escape(p['name'])} (as {escape(p['role'])})</li>" for p in oprops)
            + "</ul>"
        )
    else:
        rows.append(
            f"<p>Domain: {escape(doc.related['domain'])}<br>Range: {escape(doc.related['range'])}</p>"
        )
    body = "\n".join(rows)
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        f"<title>{escape(doc.name)}</title></head><body>{body}</body></html>"
    )


def create_app(
    graph: KnowledgeGraph,
    cube_store: CubeStore | None = None,
    cube_spec: CubeSpec | None = None,
    base_uri: str | None = None,
    ui_dir: str | Path | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    """Build the API app around one immutable graph and optional cube."""
    o = graph.ontology
    base = base_uri or o.base_uri
    spec = cube_spec or (cube_store.spec if cube_store is not None else None)
    # /docs is the concept-page namespace, so the interactive API docs are off
    app = FastAPI(title="soilgraph", docs_url=None, redoc_url=None)

    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        body = {"code": exc.code, "message": exc.message, "details": exc.details}
        return JSONResponse(status_code=exc.status, content=body)

    @app.get("/api/v1/stats")
    def get_stats() -> dict:
        return stats(graph).to_json()

    @app.get("/api/v1/cube/soc-stock")
    def cube_soc_stock(request: Request) -> dict:
        if spec is None:
            raise ApiError(400, "no-cube", "no cube spec configured")
        params = dict(request.query_params)
        window = _parse_window(params, spec.window)
        params.pop("depthUpperCm", None)
        params.pop("depthLowerCm", None)
        dim_names = [d.name for d in spec.dimensions]
        unknown = sorted(set(params) - set(dim_names))
        if unknown:
            raise ApiError(400, "unknown-dimension", f"unknown dimensions: {unknown}", details=dim_names)
        combo = tuple(params.get(name, ANY) for name in dim_names)
        key = canonical_key(spec, combo)

        result: AggregateResult | None = None
        source = "live"
        if cube_store is not None and window == spec.window:
            try:
                result = lookup(cube_store, combo)
                source = "cube"
            except KeyNotPrecomputed:
                result = None
        if result is None:
            live_spec = CubeSpec(spec.dimensions, window, spec.fact)
            result = evaluate_live(graph, live_spec, combo)
        return {
            "key": key,
            "source": source,
            "depthUpperCm": window[0],
            "depthLowerCm": window[1],
            **result.to_json(),
        }

    @app.get("/api/v1/analytics/soc-stock")
    def analytics_soc_stock(request: Request) -> list[dict]:
        params = dict(request.query_params)
        group_by = params.get("groupBy", "treatment")
        if group_by not in ("treatment", "field", "site"):
            raise ApiError(400, "bad-group-by", f"groupBy must be treatment, field, or site, got {group_by!r}")
        window = _parse_window(params, (0.0, 30.0))
        limit = _parse_int(params, "limit", DEFAULT_LIMIT)
        offset = _parse_int(params, "offset", 0)
        grouped = grouped_mean_stock(graph, group_by, window)
        rows = [{"group": uid, **result.to_json()} for uid, result in sorted(grouped.items())]
        return rows[offset : offset + limit]

    @app.get("/api/v1/treatments")
    def treatments(request: Request) -> dict:
        params = dict(request.query_params)
        limit = _parse_int(params, "limit", DEFAULT_LIMIT)
        offset = _parse_int(params, "offset", 0)
        f = _parse_filter(params)
        uids = filter_treatments(graph, f)
        page = uids[offset : offset + limit]
        items = []
        for uid in page:
            entity = graph.entity(schema.TREATMENT, uid)
            doc = _entity_json(entity)
            doc["units"] = treatment_units(graph, uid)
            items.append(doc)
        return {"total": len(uids), "items": items}

    @app.get("/api/v1/treatments/facets")
    def treatment_facets(request: Request) -> dict:
        f = _parse_filter(dict(request.query_params))
        return facet_options(graph, f)

    @app.get("/api/v1/experimental-units/{uid}")
    def unit_detail(uid: str) -> dict:
        entity = graph.entity(schema.EXPERIMENTAL_UNIT, uid)
        if entity is None:
            raise ApiError(404, "unknown-unit", f"no experimental unit {uid!r}")
        doc = _entity_json(entity)
        doc["sampleCounts"] = {
            kind.name: len(
                [l for l in graph.links_from(kind.link, uid)]
            )
            for kind in schema.SAMPLE_KINDS.values()
        }
        treatment_links = graph.links_from(schema.APPLIED_TREATMENT, uid)
        doc["treatment"] = treatment_links[0].object_uid if treatment_links else None
        field_links = graph.links_from(schema.LOCATED_IN_FIELD, uid)
        doc["field"] = field_links[0].object_uid if field_links else None
        return doc

    @app.get("/api/v1/experimental-units/{uid}/samples")
    def unit_samples(uid: str, request: Request) -> list[dict]:
        if graph.entity(schema.EXPERIMENTAL_UNIT, uid) is None:
            raise ApiError(404, "unknown-unit", f"no experimental unit {uid!r}")
        params = dict(request.query_params)
        kind_name = params.get("kind", "chemical")
        kind = schema.SAMPLE_KINDS.get(kind_name)
        if kind is None:
            raise ApiError(400, "unknown-kind", f"kind must be one of {sorted(schema.SAMPLE_KINDS)}")
        limit = _parse_int(params, "limit", DEFAULT_LIMIT)
        offset = _parse_int(params, "offset", 0)
        requested = [p for p in params.get("properties", "").split(",") if p]
        declared = {p.name for p in o.properties_of(kind.class_name)}
        unknown = sorted(set(requested) - declared)
        if unknown:
            raise ApiError(400, "unknown-property", f"not properties of {kind.class_name}: {unknown}")

        rows = []
        for link in graph.links_from(kind.link, uid):
            sample = graph.entity(kind.class_name, link.object_uid)
            if sample is None:
                continue
            row = {"uid": sample.uid, "date": _json_scalar(sample.values.get(kind.date_prop))}
            row["upperDepthCm"] = sample.values.get(kind.upper_prop)
            row["lowerDepthCm"] = sample.values.get(kind.lower_prop)
            keys = requested or sorted(
                set(sample.values) - {kind.date_prop, kind.upper_prop, kind.lower_prop}
            )
            for prop in keys:
                if prop in sample.values:
                    row[prop] = _json_scalar(sample.values[prop])
            rows.append(row)
        rows.sort(key=lambda r: (r["date"] is None, str(r["date"]), r["uid"]))
        return rows[offset : offset + limit]

    @app.get("/api/v1/ontology")
    def ontology_graph() -> dict:
        counts = {cls: len(uids) for cls, uids in graph.class_index.items()}
        nodes = [
            {"name": name, "instanceCount": counts.get(name, 0)}
            for name in sorted(o.classes)
        ]
        edges = [
            {"name": p.name, "domain": p.domain, "range": p.range}
            for p in sorted(o.object_properties.values(), key=lambda p: p.name)
        ]
        return {"nodes": nodes, "edges": edges}

    @app.get("/api/v1/ontology/classes/{name}")
    def class_detail(name: str) -> dict:
        if name not in o.classes:
            raise ApiError(404, "unknown-class", f"no class {name!r}")
        entities = graph.entities_of(name)
        props = []
        for pdef in o.properties_of(name):
            values = sorted(
                {e.values[pdef.name] for e in entities if pdef.name in e.values},
                key=lambda v: (str(type(v).__name__), str(v)),
            )
            samples = [_json_scalar(v) for v in values[:5]]
            inferred = sorted({type(v).__name__ for v in values}) or []
            props.append(
                {
                    "name": pdef.name,
                    "range": pdef.range,
                    "sampleValues": samples,
                    "inferredTypes": inferred,
                }
            )
        return {"name": name, "instanceCount": len(entities), "dataProperties": props}

    @app.get("/docs/{concept_name}")
    def concept_page(concept_name: str, request: Request) -> Response:
        if not o.is_declared(concept_name):
            raise ApiError(404, "unknown-concept", f"no concept {concept_name!r}")
        doc = concept_doc(o, concept_name)
        accept = request.headers.get("accept", "")
        if "text/html" not in accept and "application/json" in accept:
            return JSONResponse(
                {
                    "name": doc.name,
                    "kind": doc.kind,
                    "uri": base + doc.name,
                    "comment": doc.comment,
                    "seeAlso": doc.see_also,
                    "related": doc.related,
                }
            )
        return HTMLResponse(_concept_html(doc))

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
