#!/usr/bin/env python3
"""
Unit tests for search_graph.py and route_legs.py
Overlay distance preservation and exact pivot legs
"""

import math
import random
from pathlib import Path

import numpy as np
import pytest

# Import the module to test
import sys
sys.path.insert(0, str(Path(__file__).parent))
from errors import UncoverableKeywordError
from graph_core import (
    Edge,
    Poi,
    RawNetwork,
    Vertex,
    dijkstra_all,
    euclid_lower_bound,
    normalize,
    shortest_distance,
    shortest_path,
)
from katr_engine import Query
from partition_index import build_partition_index
from route_legs import LegRouter
from search_graph import REAL_EDGE, build_search_graph, expand_hop, search_graph_dijkstra, search_graph_distance


def _edge_weights(net):
    weights = {}
    for e in net.edges:
        weights[(e.u, e.v)] = weights[(e.v, e.u)] = e.weight
    return weights


# ============================================================================
# SEARCH GRAPH TESTS
# ============================================================================

@pytest.mark.parametrize("seed", [31, 32, 33])
def test_overlay_preserves_distances(make_synthetic, seed):
    """Test that overlay distances from v_q equal full-graph distances"""
    net, pi, idx = make_synthetic(seed, n_vertices=100, n_keywords=3, pois_per_keyword=2)
    q = Query(v_q=seed % net.n_vertices, keywords=(0, 1))
    sg = build_search_graph(net, pi, idx, q)

    overlay, _ = search_graph_dijkstra(sg, q.v_q)
    full, _ = dijkstra_all(net, q.v_q)
    for v, d in overlay.items():
        assert d == pytest.approx(full[v], abs=1e-9)


def test_overlay_keeps_relevant_subgraphs_whole(make_synthetic):
    """Test that subgraphs with km-POIs keep all vertices and others only borders"""
    net, pi, idx = make_synthetic(34, n_vertices=100)
    q = Query(v_q=0, keywords=(1,))
    sg = build_search_graph(net, pi, idx, q)

    relevant = {idx.poi_subgraph[p.id] for p in net.pois if p.keyword == 1}
    assert sg.relevant == frozenset(relevant)
    for sub in pi.subgraphs:
        if sub.id in relevant:
            assert all(sg.has_vertex(v) for v in sub.members)
        else:
            assert all(sg.has_vertex(b) for b in sub.borders)
    assert sg.vertex_count <= net.n_vertices
    assert sg.has_vertex(q.v_q)


def test_overlay_adds_destination_anchor(make_synthetic):
    """Test that the destination is reachable in the overlay at its true distance"""
    net, pi, idx = make_synthetic(35, n_vertices=100)
    q = Query(v_q=1, keywords=(0,), destination=net.n_vertices - 1)
    sg = build_search_graph(net, pi, idx, q)

    overlay, _ = search_graph_dijkstra(sg, q.v_q)
    assert overlay[q.destination] == pytest.approx(shortest_distance(net, 1, q.destination), abs=1e-9)


def test_overlay_uncoverable_keyword(make_synthetic):
    """Test that a keyword without POIs is rejected while building the overlay"""
    net, pi, idx = make_synthetic(36)
    with pytest.raises(UncoverableKeywordError):
        build_search_graph(net, pi, idx, Query(v_q=0, keywords=(0, 99)))


def test_expand_hop_unpacks_shortcuts(make_synthetic):
    """Test that shortcut hops expand to real-edge paths of the same length"""
    net, pi, idx = make_synthetic(37, n_vertices=100)
    sg = build_search_graph(net, pi, idx, Query(v_q=0, keywords=(2,)))
    weights = _edge_weights(net)

    checked = 0
    for u, hops in sg.adjacency.items():
        for v, w, via in hops:
            path = expand_hop(pi, u, v, via)
            assert path[0] == u and path[-1] == v
            length = sum(weights[(a, b)] for a, b in zip(path, path[1:]))
            assert length == pytest.approx(w, abs=1e-12)
            if via != REAL_EDGE:
                checked += 1
    assert checked > 0


def test_overlay_pair_distances_over_many_partitions(make_synthetic):
    """Test overlay distances between random overlay vertices on 50 partitioned networks"""
    shortcuts = 0
    for seed in range(600, 650):
        rng = random.Random(seed)
        net, pi, idx = make_synthetic(seed, n_vertices=60, partition_size=rng.randint(3, 12))
        sg = build_search_graph(net, pi, idx, Query(v_q=rng.randrange(net.n_vertices), keywords=(0, 1)))
        vertices = sorted(sg.adjacency)
        for _ in range(10):
            s, t = rng.choice(vertices), rng.choice(vertices)
            assert search_graph_distance(sg, s, t) == pytest.approx(shortest_distance(net, s, t), abs=1e-9)
        shortcuts += sum(sg.is_shortcut(via) for hops in sg.adjacency.values() for _, _, via in hops)
    assert shortcuts > 0


# ============================================================================
# LEG ROUTER TESTS
# ============================================================================

@pytest.mark.parametrize("seed", [41, 42])
def test_legs_are_exact(make_synthetic, seed):
    """Test that A* legs over the skeleton equal Dijkstra distances"""
    net, pi, _ = make_synthetic(seed, n_vertices=120)
    router = LegRouter(net, pi)
    for s in range(0, net.n_vertices, 13):
        full, _ = dijkstra_all(net, s)
        for t in range(0, net.n_vertices, 5):
            assert router.leg(s, t) == pytest.approx(full[t], abs=1e-9)


def test_leg_paths_are_valid(make_synthetic):
    """Test that expanded leg paths follow network edges and sum to the leg"""
    net, pi, _ = make_synthetic(43, n_vertices=120)
    router = LegRouter(net, pi)
    weights = _edge_weights(net)
    for s, t in [(0, 50), (7, 7), (119, 3), (60, 61)]:
        path = router.leg_path(s, t)
        assert path[0] == s and path[-1] == t
        length = sum(weights[(a, b)] for a, b in zip(path, path[1:]))
        assert length == pytest.approx(router.leg(s, t), abs=1e-9)


def test_leg_cache_counts_computations(make_synthetic):
    """Test that repeated legs are served from the per-query cache"""
    net, pi, _ = make_synthetic(44)
    router = LegRouter(net, pi)
    router.leg(0, 10)
    router.leg(0, 10)
    router.leg(10, 0)

    assert router.computations == 2
    assert router.leg(3, 3) == 0.0
    assert router.computations == 2


def test_route_distance_sums_legs(line_indexes):
    """Test route distance and path over several pivots"""
    net, pi, _ = line_indexes
    router = LegRouter(net, pi)

    assert router.route_distance([0, 4, 2, 5]) == 9.0
    assert router.route_path([0, 2, 1]) == [0, 1, 2, 1]


def test_equal_legs_take_smallest_predecessor():
    """Test that A* keeps the smaller predecessor id between two equal-length legs"""
    class Singletons:
        def assign(self, net, max_size):
            return np.arange(net.n_vertices, dtype=np.int64)

    vertices = [Vertex(0, 0.0, 0.0), Vertex(1, 0.7, 0.7), Vertex(2, 0.7, 0.1), Vertex(3, 1.4, 0.0)]
    edges = [Edge(0, 1, 1.0), Edge(0, 2, 1.0), Edge(1, 3, 1.0), Edge(2, 3, 1.0)]
    net = normalize(RawNetwork(vertices, edges, [Poi(0, 3, 0, 1.0)]))
    router = LegRouter(net, build_partition_index(net, 2, partitioner=Singletons()))

    assert router.leg_path(0, 3) == [0, 1, 3]
    assert router.leg_path(0, 3) == shortest_path(net, 0, 3)[1]
    assert router.leg_path(3, 0) == [3, 1, 0]
    assert router.leg(0, 3) == 2.0


def test_heuristic_is_admissible_during_search(make_synthetic):
    """Test that every heuristic value seen by A* is a lower bound"""
    net, pi, _ = make_synthetic(45, n_vertices=120)
    violations = []

    def check(x, t, h):
        if h > shortest_distance(net, x, t) + 1e-12:
            violations.append((x, t, h))

    router = LegRouter(net, pi, heuristic_check=check)
    for s, t in [(0, 100), (20, 90), (55, 5)]:
        router.leg(s, t)

    assert router.expansions > 0
    assert violations == []
    assert euclid_lower_bound(net, 0, 100) <= router.leg(0, 100)
    assert not math.isinf(router.leg(0, 100))


# ============================================================================
# RUN TESTS
# ============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=search_graph", "--cov=route_legs", "--cov-report=term-missing"])
