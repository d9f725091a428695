#!/usr/bin/env python3
"""
Road Network Data Model
Vertices, edges and POIs, normalization into the engine's units, and exact
shortest-distance primitives shared by the oracle and the leg router
"""

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from errors import NormalizationError

logger = logging.getLogger(__name__)

# Normalized ratings live in (0, RATING_TOP]; edge weights in (0, 1]
RATING_TOP = 10.0
ZERO_RATING_FLOOR = 1e-6
# Relative shrink applied to Euclidean bounds to absorb float rounding
EUCLID_SLACK = 1e-9


@dataclass(frozen=True)
class Vertex:
    id: int
    lon: float
    lat: float


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    weight: float


@dataclass(frozen=True)
class Poi:
    id: int
    vertex: int
    keyword: int
    rating: float


@dataclass
class RawNetwork:
    """Network as read from disk: original ids, raw weights and ratings"""
    vertices: list
    edges: list
    pois: list
    tags: dict = field(default_factory=dict)


@dataclass
class RoadNetwork:
    """Normalized, connected, densely relabeled road network (immutable once built)"""
    vertices: list
    coords: np.ndarray
    adjacency: list
    edges: list
    pois: list
    tags: dict
    weight_scale: float
    rating_scale: float
    calibration: float
    original_ids: list
    dropped_vertices: int = 0

    @property
    def n_vertices(self):
        return len(self.vertices)

    def tag(self, keyword):
        return self.tags.get(keyword, f"kw{keyword}")

    def coord_distance(self, s, t):
        (x1, y1), (x2, y2) = self.coords[s], self.coords[t]
        return math.hypot(x1 - x2, y1 - y2)

    def to_csr(self):
        n = self.n_vertices
        rows = [e.u for e in self.edges] + [e.v for e in self.edges]
        cols = [e.v for e in self.edges] + [e.u for e in self.edges]
        data = [e.weight for e in self.edges] * 2
        return csr_matrix((data, (rows, cols)), shape=(n, n))

    def denormalize_distance(self, d):
        return d * self.weight_scale

    def normalize_distance(self, d):
        return d / self.weight_scale

    def denormalize_rating(self, r):
        return r * self.rating_scale


def _calibrate(raw_edges, coords_by_id):
    """c = min(1, min raw weight / coordinate distance) over edges with positive length"""
    c = math.inf
    for e in raw_edges:
        (x1, y1), (x2, y2) = coords_by_id[e.u], coords_by_id[e.v]
        dist = math.hypot(x1 - x2, y1 - y2)
        if dist == 0.0:
            # Co-located endpoints: a positive weight with zero length breaks nothing
            continue
        c = min(c, e.weight / dist)
    if c is math.inf:
        return 0.0
    return min(1.0, c)


def normalize(raw):
    """Validate and normalize a raw network into a connected RoadNetwork"""
    if not raw.vertices or not raw.edges:
        raise NormalizationError("Empty graph: need at least one vertex and one edge")

    coords_by_id = {}
    for v in raw.vertices:
        if not (math.isfinite(v.lon) and math.isfinite(v.lat)):
            raise NormalizationError(f"Vertex {v.id} has non-finite coordinates")
        coords_by_id[v.id] = (v.lon, v.lat)

    best = {}
    for i, e in enumerate(raw.edges):
        if not e.weight > 0 or not math.isfinite(e.weight):
            raise NormalizationError(
                f"Edge {i} ({e.u}-{e.v}) has non-positive weight {e.weight}", edge_index=i
            )
        if e.u == e.v:
            raise NormalizationError(f"Edge {i} is a self loop on vertex {e.u}", edge_index=i)
        if e.u not in coords_by_id or e.v not in coords_by_id:
            raise NormalizationError(f"Edge {i} references an unknown vertex", edge_index=i)
        key = (min(e.u, e.v), max(e.u, e.v))
        if key not in best or e.weight < best[key]:
            best[key] = e.weight

    if len(best) < len(raw.edges):
        logger.info(f"Merged {len(raw.edges) - len(best)} parallel edges (kept minimum weight)")

    calibration = _calibrate([Edge(u, v, w) for (u, v), w in best.items()], coords_by_id)

    # Largest connected component over the original ids (ties: lowest original id wins)
    ordered_ids = sorted(coords_by_id)
    position = {vid: i for i, vid in enumerate(ordered_ids)}
    n = len(ordered_ids)
    rows = [position[u] for u, _ in best]
    cols = [position[v] for _, v in best]
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_comp, labels = connected_components(graph, directed=False)
    dropped = 0
    if n_comp > 1:
        sizes = np.bincount(labels)
        keep_label = int(np.argmax(sizes))
        kept_ids = [vid for vid in ordered_ids if labels[position[vid]] == keep_label]
        dropped = n - len(kept_ids)
        logger.warning(
            f"Network has {n_comp} components; keeping the largest ({len(kept_ids)} vertices), "
            f"dropping {dropped} vertices"
        )
    else:
        kept_ids = ordered_ids

    new_id = {vid: i for i, vid in enumerate(kept_ids)}
    weight_scale = max(w for (u, v), w in best.items() if u in new_id)

    vertices = [Vertex(new_id[vid], *coords_by_id[vid]) for vid in kept_ids]
    coords = np.array([[v.lon, v.lat] for v in vertices], dtype=float)

    edges = []
    adjacency = [[] for _ in vertices]
    for (u, v), w in sorted(best.items()):
        if u not in new_id:
            continue
        a, b = sorted((new_id[u], new_id[v]))
        edge = Edge(a, b, w / weight_scale)
        edges.append(edge)
        adjacency[a].append((b, edge.weight))
        adjacency[b].append((a, edge.weight))
    for neighbors in adjacency:
        neighbors.sort()

    kept_pois = []
    for p in raw.pois:
        if p.vertex not in coords_by_id:
            raise NormalizationError(f"POI {p.id} sits on unknown vertex {p.vertex}")
        if p.rating < 0 or not math.isfinite(p.rating):
            raise NormalizationError(f"POI {p.id} has invalid rating {p.rating}")
        if p.vertex in new_id:
            kept_pois.append(p)
    if len(kept_pois) < len(raw.pois):
        logger.warning(f"Dropped {len(raw.pois) - len(kept_pois)} POIs outside the kept component")

    max_rating = max((p.rating for p in kept_pois), default=0.0)
    if max_rating > 0:
        rating_scale = max_rating / RATING_TOP
    else:
        rating_scale = 1.0
        if kept_pois:
            logger.warning("All raw ratings are zero; every POI gets the top rating")

    lifted = 0
    pois = []
    for i, p in enumerate(kept_pois):
        if max_rating > 0:
            rating = min(RATING_TOP, RATING_TOP * p.rating / max_rating)
            if rating <= 0:
                rating = ZERO_RATING_FLOOR
                lifted += 1
        else:
            rating = RATING_TOP
        pois.append(Poi(i, new_id[p.vertex], p.keyword, rating))
    if lifted:
        logger.warning(f"Lifted {lifted} zero ratings to {ZERO_RATING_FLOOR}")

    net = RoadNetwork(
        vertices=vertices,
        coords=coords,
        adjacency=adjacency,
        edges=edges,
        pois=pois,
        tags=dict(raw.tags),
        weight_scale=weight_scale,
        rating_scale=rating_scale,
        calibration=calibration,
        original_ids=kept_ids,
        dropped_vertices=dropped,
    )
    logger.info(
        f"Normalized network: {net.n_vertices} vertices, {len(edges)} edges, "
        f"{len(pois)} POIs, calibration c={calibration:.4f}"
    )
    return net


def euclid_lower_bound(net, s, t):
    """Admissible straight-line lower bound on shortest_distance(s, t), normalized units"""
    if s == t or net.calibration == 0.0:
        return 0.0
    return net.calibration * net.coord_distance(s, t) / net.weight_scale * (1.0 - EUCLID_SLACK)


def dijkstra_all(net, source, target=None):
    """Single-source Dijkstra; returns (dist, pred) lists. Ties pick the smaller predecessor id."""
    n = net.n_vertices
    dist = [math.inf] * n
    pred = [-1] * n
    done = [False] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == target:
            break
        for v, w in net.adjacency[u]:
            nd = d + w
            if nd < dist[v] or (nd == dist[v] and not done[v] and u < pred[v]):
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def shortest_distance(net, s, t):
    """Exact shortest distance; math.inf when t cannot be reached"""
    if s == t:
        return 0.0
    dist, _ = dijkstra_all(net, s, target=t)
    return dist[t]


def shortest_path(net, s, t):
    """(distance, vertex list) for one shortest path, or (inf, [])"""
    dist, pred = dijkstra_all(net, s, target=t)
    if math.isinf(dist[t]):
        return math.inf, []
    path = [t]
    while path[-1] != s:
        path.append(pred[path[-1]])
    path.reverse()
    return dist[t], path
