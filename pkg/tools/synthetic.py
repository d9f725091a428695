#!/usr/bin/env python3
"""
Synthetic Road Networks
Random geometric networks (Delaunay triangulation restricted to near-neighbour
edges and thinned to a target degree, minimum spanning tree always kept) with
uniformly placed, rated POIs
"""

import logging
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import Delaunay, cKDTree

from errors import GeneratorError
from graph_core import Edge, Poi, RawNetwork, Vertex
from ingest import write_raw_network

logger = logging.getLogger(__name__)

MIN_DEGREE = 2.0
MAX_DEGREE = 6.0
# Non-tree edges must join one of the endpoints' NEAR_NEIGHBORS nearest vertices
NEAR_NEIGHBORS = 6
RATING_DISTRIBUTIONS = ("uniform", "normal", "constant")

TAG_NAMES = [
    "cafe", "restaurant", "museum", "park", "bakery", "pharmacy", "library",
    "cinema", "gym", "bookstore", "bar", "hotel", "market", "gallery", "theater",
    "zoo", "aquarium", "hospital", "school", "bank", "florist", "bike_rental",
    "playground", "viewpoint", "ice_cream", "post_office", "pub", "spa",
]


def tag_for(keyword):
    base = TAG_NAMES[keyword % len(TAG_NAMES)]
    return base if keyword < len(TAG_NAMES) else f"{base}_{keyword // len(TAG_NAMES)}"


def _ratings(rng, size, rating_dist):
    if rating_dist == "uniform":
        return np.round(rng.uniform(1.0, 5.0, size), 1)
    if rating_dist == "normal":
        return np.round(np.clip(rng.normal(3.5, 0.8, size), 0.5, 5.0), 1)
    return np.full(size, 4.0)


def _delaunay_edges(coords):
    tri = Delaunay(coords)
    edges = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            edges.add((int(min(u, v)), int(max(u, v))))
    return sorted(edges)


def _near_neighbor_radius(coords, k=NEAR_NEIGHBORS):
    """Distance from every vertex to its k-th nearest neighbour"""
    k = min(k, len(coords) - 1)
    dist, _ = cKDTree(coords).query(coords, k=k + 1)
    return dist[:, -1]


def generate_synthetic(seed, n_vertices, avg_degree, n_keywords, pois_per_keyword,
                       rating_dist="uniform", out_dir=None):
    """Build a connected random geometric network; optionally write it to out_dir"""
    if n_vertices < 3:
        raise GeneratorError(f"Need at least 3 vertices for a triangulation, got {n_vertices}")
    if not MIN_DEGREE <= avg_degree <= MAX_DEGREE:
        raise GeneratorError(
            f"Average degree {avg_degree} infeasible for a planar network "
            f"(allowed {MIN_DEGREE}..{MAX_DEGREE})"
        )
    if n_keywords < 1 or pois_per_keyword < 1:
        raise GeneratorError("Need at least one keyword and one POI per keyword")
    if rating_dist not in RATING_DISTRIBUTIONS:
        raise GeneratorError(f"Unknown rating distribution '{rating_dist}'")

    rng = np.random.default_rng(seed)
    coords = rng.random((n_vertices, 2))

    def length(u, v):
        return math.hypot(coords[u, 0] - coords[v, 0], coords[u, 1] - coords[v, 1])

    candidates = _delaunay_edges(coords)
    rows = [u for u, _ in candidates]
    cols = [v for _, v in candidates]
    graph = csr_matrix(([length(u, v) for u, v in candidates], (rows, cols)),
                       shape=(n_vertices, n_vertices))
    tree = minimum_spanning_tree(graph).tocoo()
    tree_edges = {(int(min(u, v)), int(max(u, v))) for u, v in zip(tree.row, tree.col)}

    target = max(len(tree_edges), int(round(avg_degree * n_vertices / 2)))
    # Hull triangles join far-apart vertices; only the spanning tree may keep such edges
    radius = _near_neighbor_radius(coords)
    spare = [(u, v) for u, v in candidates
             if (u, v) not in tree_edges and length(u, v) <= max(radius[u], radius[v])]
    extra = min(len(spare), target - len(tree_edges))
    if extra < target - len(tree_edges):
        logger.warning(f"Near-neighbour triangulation only allows {len(tree_edges) + len(spare)} edges, wanted {target}")
    chosen = sorted(tree_edges)
    if extra > 0:
        picks = rng.choice(len(spare), size=extra, replace=False)
        chosen += [spare[i] for i in sorted(picks)]
    chosen.sort()

    vertices = [Vertex(i, float(coords[i, 0]), float(coords[i, 1])) for i in range(n_vertices)]
    edges = [Edge(u, v, length(u, v)) for u, v in chosen]

    pois = []
    for kw in range(n_keywords):
        spots = rng.integers(0, n_vertices, pois_per_keyword)
        for vertex, rating in zip(spots, _ratings(rng, pois_per_keyword, rating_dist)):
            pois.append(Poi(len(pois), int(vertex), kw, float(rating)))

    raw = RawNetwork(vertices, edges, pois, {kw: tag_for(kw) for kw in range(n_keywords)})
    logger.info(
        f"Generated network: {n_vertices} vertices, {len(edges)} edges "
        f"(avg degree {2 * len(edges) / n_vertices:.2f}), {len(pois)} POIs"
    )
    if out_dir is not None:
        write_raw_network(raw, out_dir)
    return raw
