#!/usr/bin/env python3
"""
Route Tool Service
Exposes the route engine as LLM-callable tools over HTTP (FastAPI) or stdio
(line-delimited JSON). Distances, ratings and coordinates leave the service in
the units of the input files; vertex ids are the ids used in vertices.txt.
"""

import dataclasses
import difflib
import json
import logging
import signal
import sys
import time
from dataclasses import dataclass
from typing import List, Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field, ValidationError

import service_metrics
from errors import KatrError, QueryTimeoutError, QueryValidationError, UncoverableKeywordError
from graph_core import normalize, shortest_path
from index_store import load_or_build
from ingest import load_raw_network, network_hash
from katr_config import KatrConfig
from katr_engine import VARIANTS, Query, katr_query
from poi_index import build_poi_index, list_poi_tags

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
NEAREST_TAGS = 3


# ============================================================================
# REQUEST / RESPONSE MODELS
# ============================================================================

class QueryRequest(BaseModel):
    source: int = Field(..., description="Start vertex id (as in vertices.txt)")
    keywords: List[Union[int, str]] = Field(..., min_length=1, description="Keyword ids or tags, one POI each")
    k: int = Field(1, ge=1, description="Number of routes to return")
    alpha: float = Field(0.5, ge=0.0, le=1.0, description="Distance weight; 1 - alpha weighs ratings")
    fixed_order: bool = Field(False, description="Visit POIs in the given keyword order")
    budget: Optional[float] = Field(None, ge=0.0, description="Maximum route length in input distance units")
    destination: Optional[int] = Field(None, description="Optional end vertex id")
    identical_ratings: bool = Field(False, description="Ignore ratings, rank by distance only")


class PoiOut(BaseModel):
    poi_id: int
    keyword_id: int
    tag: str
    vertex: int
    rating: float
    lon: float
    lat: float


class RouteOut(BaseModel):
    rank: int
    score: float
    distance: float
    rating_sum: float
    pois: List[PoiOut]
    path: List[int]
    coordinates: List[List[float]]


class RouteResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    routes: List[RouteOut]
    partial: bool
    infeasible_budget: bool = False
    counters: dict
    timing_ms: float


class PoiTag(BaseModel):
    keyword_id: int
    tag: str
    count: int


class ServiceError(Exception):
    """Error with an HTTP status and a JSON body"""

    def __init__(self, status, code, message, **details):
        self.status = status
        self.code = code
        self.message = message
        self.details = details
        super().__init__(message)

    def body(self):
        return {"schema_version": SCHEMA_VERSION, "error": self.code, "message": self.message, **self.details}


def tool_spec(name, description, parameters):
    return {
        "type": "function",
        "function": {
            "name": name,
            "description": description,
            "parameters": parameters,
        },
    }


TOOLS_SPEC = [
    tool_spec(
        "katr_search",
        "Find the top-k walking routes from a start vertex that visit one point of interest "
        "for each requested keyword, trading route length against POI ratings.",
        QueryRequest.model_json_schema(),
    ),
    tool_spec(
        "poi_tags",
        "List the POI keywords (tags) the loaded network knows, with POI counts.",
        {"type": "object", "properties": {}},
    ),
]


# ============================================================================
# INDEX LOADING
# ============================================================================

@dataclass
class LoadedIndexes:
    net: object
    pi: object
    idx: object
    net_hash: str


def load_indexes(network_dir, config=None):
    """Read, normalize and index a network directory, reusing the cached partition index"""
    config = config or KatrConfig()
    net = normalize(load_raw_network(network_dir))
    net_hash = network_hash(network_dir)
    pi, rebuilt = load_or_build(config.INDEX_PATH, net, net_hash, config.PARTITION_SIZE,
                                seed=config.SEED, workers=config.INDEX_WORKERS)
    # Built eagerly so concurrent requests only read it
    pi.skeleton()
    idx = build_poi_index(net, pi)
    logger.info(
        f"Indexes ready: {net.n_vertices} vertices, {len(pi.subgraphs)} subgraphs, "
        f"{len(idx.keyword_catalog)} keywords ({'rebuilt' if rebuilt else 'cached'})"
    )
    return LoadedIndexes(net, pi, idx, net_hash)


# ============================================================================
# SERVICE
# ============================================================================

class ToolService:
    def __init__(self, indexes=None, config=None):
        self.indexes = indexes
        self.config = config or KatrConfig()
        self._dense = {}
        if indexes is not None:
            self.attach(indexes)

    def attach(self, indexes):
        self.indexes = indexes
        self._dense = {orig: i for i, orig in enumerate(indexes.net.original_ids)}
        service_metrics.describe_index(indexes.net, indexes.pi, indexes.idx)

    @property
    def ready(self):
        return self.indexes is not None

    def _require_ready(self):
        if not self.ready:
            raise ServiceError(503, "not_loaded", "No network is loaded")
        return self.indexes

    def poi_tags(self):
        return list_poi_tags(self._require_ready().idx)

    def _vertex(self, original_id, what):
        if original_id not in self._dense:
            raise ServiceError(422, "unknown_vertex", f"{what} vertex {original_id} is not in the network")
        return self._dense[original_id]

    def _keyword(self, value, tags):
        known = {entry.keyword_id for entry in self.indexes.idx.keyword_catalog}
        if isinstance(value, int):
            if value not in known:
                raise ServiceError(400, "unknown_keyword", f"Keyword id {value} has no POIs",
                                   known_keyword_ids=sorted(known))
            return value
        if value in tags:
            return tags[value]
        nearest = difflib.get_close_matches(value, list(tags), n=NEAREST_TAGS)
        raise ServiceError(400, "unknown_tag", f"Unknown tag '{value}'", nearest_tags=nearest)

    def to_query(self, req):
        indexes = self._require_ready()
        net = indexes.net
        tags = indexes.idx.tag_lookup()
        keywords = tuple(self._keyword(kw, tags) for kw in req.keywords)
        return Query(
            v_q=self._vertex(req.source, "Source"),
            keywords=keywords,
            k=req.k,
            alpha=req.alpha,
            fixed_order=req.fixed_order,
            distance_budget=None if req.budget is None else net.normalize_distance(req.budget),
            destination=None if req.destination is None else self._vertex(req.destination, "Destination"),
            identical_ratings=req.identical_ratings,
        )

    def route_out(self, rank, route, q):
        net = self.indexes.net
        path = route.expanded_path
        if not path:
            pivots = [q.v_q] + [p.vertex for p in route.order]
            if q.destination is not None:
                pivots.append(q.destination)
            path = [pivots[0]]
            for a, b in zip(pivots, pivots[1:]):
                path.extend(shortest_path(net, a, b)[1][1:])
        return RouteOut(
            rank=rank,
            score=route.score,
            distance=net.denormalize_distance(route.graph_distance),
            rating_sum=sum(net.denormalize_rating(p.rating) for p in route.order),
            pois=[
                PoiOut(
                    poi_id=p.id,
                    keyword_id=p.keyword,
                    tag=net.tag(p.keyword),
                    vertex=net.original_ids[p.vertex],
                    rating=net.denormalize_rating(p.rating),
                    lon=float(net.coords[p.vertex, 0]),
                    lat=float(net.coords[p.vertex, 1]),
                )
                for p in route.order
            ],
            path=[net.original_ids[v] for v in path],
            coordinates=[[float(net.coords[v, 0]), float(net.coords[v, 1])] for v in path],
        )

    def search(self, req, variant="full"):
        """Run one katr_search call; raises ServiceError on any failure"""
        indexes = self._require_ready()
        q = self.to_query(req)
        options = dataclasses.replace(VARIANTS[variant], timeout_s=self.config.TIMEOUT_S,
                                      slow_query_s=self.config.SLOW_QUERY_S,
                                      max_keywords=self.config.MAX_KEYWORDS)
        start = time.perf_counter()
        try:
            result = katr_query(q, indexes.net, indexes.pi, indexes.idx, options)
        except QueryTimeoutError as e:
            service_metrics.query_timeouts_total.inc()
            routes = [self.route_out(i + 1, r, q).model_dump() for i, r in enumerate(e.partial_routes)]
            raise ServiceError(504, "timeout", str(e), partial=True, routes=routes)
        except UncoverableKeywordError as e:
            tag = indexes.net.tag(e.keyword) if isinstance(e.keyword, int) else e.keyword
            raise ServiceError(422, "uncoverable", str(e), keyword=tag)
        except QueryValidationError as e:
            raise ServiceError(422, "invalid_query", str(e))
        finally:
            service_metrics.query_duration_seconds.observe(time.perf_counter() - start)

        service_metrics.record_counters(result.counters)
        return RouteResponse(
            routes=[self.route_out(i + 1, r, q) for i, r in enumerate(result.routes)],
            partial=result.partial,
            infeasible_budget=result.infeasible_budget,
            counters=result.counters.as_dict(),
            timing_ms=round(result.elapsed * 1000.0, 3),
        )

    def handle_line(self, line):
        """One stdio request: {"tool": name, "arguments": {...}} -> JSON-ready dict"""
        try:
            message = json.loads(line)
        except json.JSONDecodeError as e:
            return ServiceError(400, "malformed_json", e.msg, position=e.pos).body()
        if not isinstance(message, dict):
            return ServiceError(400, "malformed_request", "Request must be a JSON object").body()

        tool = message.get("tool")
        try:
            if tool == "poi_tags":
                return {"schema_version": SCHEMA_VERSION, "tags": self.poi_tags()}
            if tool == "katr_search":
                req = QueryRequest.model_validate(message.get("arguments") or {})
                return self.search(req).model_dump()
            if tool == "tools":
                return {"schema_version": SCHEMA_VERSION, "tools": TOOLS_SPEC}
            return ServiceError(400, "unknown_tool", f"Unknown tool '{tool}'").body()
        except ValidationError as e:
            return ServiceError(422, "invalid_query", "Request validation failed",
                                details=json.loads(e.json())).body()
        except ServiceError as e:
            return e.body()
        except KatrError as e:
            return ServiceError(500, "engine_error", str(e)).body()


# ============================================================================
# HTTP APP
# ============================================================================

def create_app(service):
    app = FastAPI(title="Keyword-Aware Route Tool Service", version=SCHEMA_VERSION)

    def _count(endpoint, status):
        service_metrics.requests_total.labels(endpoint=endpoint, status=str(status)).inc()

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        _count(request.url.path, exc.status)
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        for err in errors:
            if err.get("type") == "json_invalid":
                loc = err.get("loc", ())
                position = loc[1] if len(loc) > 1 else None
                _count(request.url.path, 400)
                error = ServiceError(400, "malformed_json", "Request body is not valid JSON",
                                     position=position)
                return JSONResponse(status_code=400, content=error.body())
        _count(request.url.path, 422)
        error = ServiceError(422, "invalid_query", "Request validation failed",
                             details=json.loads(json.dumps(errors, default=str)))
        return JSONResponse(status_code=422, content=error.body())

    @app.post("/katr/search", response_model=RouteResponse)
    def katr_search(req: QueryRequest):
        response = service.search(req)
        _count("/katr/search", 200)
        return response

    @app.get("/poi/tags", response_model=List[PoiTag])
    def poi_tags():
        tags = service.poi_tags()
        _count("/poi/tags", 200)
        return tags

    @app.get("/tools")
    def tools():
        return TOOLS_SPEC

    @app.get("/health")
    def health():
        memory_mb = service_metrics.monitor_memory_usage(service.config)
        body = {"status": "ok" if service.ready else "not_loaded", "memory_mb": round(memory_mb, 1)}
        if service.ready:
            body["network_hash"] = service.indexes.net_hash
        return JSONResponse(status_code=200 if service.ready else 503, content=body)

    @app.get("/metrics")
    def metrics():
        service_metrics.monitor_memory_usage(service.config)
        payload, content_type = service_metrics.render_latest()
        return Response(content=payload, media_type=content_type)

    return app


# ============================================================================
# RUNNERS
# ============================================================================

def serve_http(service, bind=None, port=None):
    import uvicorn

    bind = bind or service.config.BIND
    port = port or service.config.PORT
    logger.info(f"Serving route tools on http://{bind}:{port}")
    uvicorn.run(create_app(service), host=bind, port=port, log_level="warning")


class StdioServer:
    """Line-delimited JSON loop on stdin/stdout"""

    def __init__(self, service, stdin=None, stdout=None):
        self.service = service
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.running = True

    def _handle_shutdown(self, signum, frame):
        logger.info(f"Received signal {signum}, shutting down...")
        self.running = False

    def install_signal_handlers(self):
        signal.signal(signal.SIGTERM, self._handle_shutdown)
        signal.signal(signal.SIGINT, self._handle_shutdown)

    def run(self):
        handled = 0
        for line in self.stdin:
            if not self.running:
                break
            if not line.strip():
                continue
            response = self.service.handle_line(line)
            self.stdout.write(json.dumps(response, sort_keys=True) + "\n")
            self.stdout.flush()
            handled += 1
        logger.info(f"Stdio server stopped after {handled} requests")
        return handled
