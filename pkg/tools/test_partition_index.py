#!/usr/bin/env python3
"""
Unit tests for partition_index.py
"""

from pathlib import Path

import networkx as nx
import numpy as np
import pytest

# Import the module to test
import sys
sys.path.insert(0, str(Path(__file__).parent))
from errors import PartitionError, UnknownSubgraphError
from graph_core import Edge, Poi, RawNetwork, Vertex, dijkstra_all, normalize
from partition_index import (
    BfsGrowPartitioner,
    border_shortcuts,
    build_partition_index,
    partition,
)
from synthetic import generate_synthetic


# ============================================================================
# FIXTURES
# ============================================================================

@pytest.fixture
def geo_net():
    return normalize(generate_synthetic(11, 120, 3.0, 2, 3))


@pytest.fixture
def geo_index(geo_net):
    return build_partition_index(geo_net, 10, seed=11)


# ============================================================================
# PARTITION TESTS
# ============================================================================

def test_every_vertex_assigned_once(geo_net, geo_index):
    """Test that members cover all vertices exactly once"""
    members = sorted(v for sg in geo_index.subgraphs for v in sg.members)

    assert members == list(range(geo_net.n_vertices))
    for sg in geo_index.subgraphs:
        assert all(geo_index.assignment[v] == sg.id for v in sg.members)


def test_subgraphs_are_bounded_and_connected(geo_net, geo_index):
    """Test the size limit and internal connectivity of every subgraph"""
    g = nx.Graph()
    g.add_edges_from((e.u, e.v) for e in geo_net.edges)
    for sg in geo_index.subgraphs:
        assert 1 <= len(sg.members) <= 10
        assert nx.is_connected(g.subgraph(sg.members))


def test_borders_are_external_edge_endpoints(geo_net, geo_index):
    """Test that border vertices are exactly the endpoints of external edges"""
    endpoints = {v for u, w, _ in geo_index.external_edges for v in (u, w)}

    assert set(np.flatnonzero(geo_index.is_border).tolist()) == endpoints
    for sg in geo_index.subgraphs:
        assert set(sg.borders) == {v for v in sg.members if v in endpoints}
    for u, v, _ in geo_index.external_edges:
        assert geo_index.assignment[u] != geo_index.assignment[v]


def test_partition_is_deterministic(geo_net):
    """Test that the same seed gives the same assignment"""
    a = partition(geo_net, 10, seed=5).assignment
    b = partition(geo_net, 10, seed=5).assignment

    assert np.array_equal(a, b)


def test_partition_size_too_small(geo_net):
    """Test that a partition size below 2 is rejected"""
    with pytest.raises(PartitionError):
        partition(geo_net, 1)


def test_oversized_partitioner_output(line_raw):
    """Test that a partitioner breaking the size limit is rejected"""
    class OneBlock:
        def assign(self, net, max_size):
            return np.zeros(net.n_vertices, dtype=np.int64)

    with pytest.raises(PartitionError):
        partition(normalize(line_raw), 3, partitioner=OneBlock())


def test_bfs_grow_respects_limit(geo_net):
    """Test the default partitioner directly"""
    assignment = BfsGrowPartitioner(seed=1).assign(geo_net, 4)

    assert (assignment >= 0).all()
    assert np.bincount(assignment).max() <= 4


# ============================================================================
# INTRA DISTANCE TESTS
# ============================================================================

def test_intra_tables_symmetric_and_restricted(geo_net, geo_index):
    """Test that intra distances are symmetric and never beat the full-graph distance"""
    for sg in geo_index.subgraphs[:6]:
        assert np.array_equal(sg.intra_dist, sg.intra_dist.T)
        for a in sg.members:
            full, _ = dijkstra_all(geo_net, a)
            for b in sg.members:
                assert sg.dist(a, b) >= full[b] - 1e-12


def test_intra_path_walks_real_edges(geo_net, geo_index):
    """Test that expanded intra paths use network edges and match the table"""
    weights = {}
    for e in geo_net.edges:
        weights[(e.u, e.v)] = weights[(e.v, e.u)] = e.weight
    for sg in geo_index.subgraphs[:6]:
        a = sg.members[0]
        for b in sg.members:
            path = sg.path(a, b)
            assert path[0] == a and path[-1] == b
            assert all(geo_index.assignment[v] == sg.id for v in path)
            length = sum(weights[(x, y)] for x, y in zip(path, path[1:]))
            assert length == pytest.approx(sg.dist(a, b), abs=1e-12)


def test_equal_paths_take_smallest_predecessor():
    """Test that of two equal intra paths the one through the smaller vertex id is kept"""
    class OneBlock:
        def assign(self, net, max_size):
            return np.zeros(net.n_vertices, dtype=np.int64)

    vertices = [Vertex(0, 0.0, 0.0), Vertex(1, 1.0, 1.0), Vertex(2, 1.0, -1.0), Vertex(3, 2.0, 0.0)]
    edges = [Edge(0, 2, 1.0), Edge(0, 1, 1.0), Edge(2, 3, 1.0), Edge(1, 3, 1.0)]
    net = normalize(RawNetwork(vertices, edges, [Poi(0, 3, 0, 1.0)]))
    sg = build_partition_index(net, 4, partitioner=OneBlock()).subgraphs[0]

    assert sg.path(0, 3) == [0, 1, 3]
    assert sg.path(3, 0) == [3, 1, 0]
    assert sg.path(1, 2) == [1, 0, 2]
    assert sg.intra_pred.dtype == np.int32


def test_parallel_build_matches_serial(geo_net):
    """Test that worker threads produce the same tables"""
    serial = build_partition_index(geo_net, 10, seed=3, workers=1)
    threaded = build_partition_index(geo_net, 10, seed=3, workers=4)

    for a, b in zip(serial.subgraphs, threaded.subgraphs):
        assert np.array_equal(a.intra_dist, b.intra_dist)


# ============================================================================
# SHORTCUT TESTS
# ============================================================================

def test_border_shortcuts_pairs(geo_index):
    """Test that shortcuts pair distinct borders with their intra distance"""
    for sg in geo_index.subgraphs:
        shortcuts = border_shortcuts(geo_index, sg.id)
        n = len(sg.borders)
        assert len(shortcuts) == n * (n - 1) // 2
        for u, v, d in shortcuts:
            assert u in sg.borders and v in sg.borders
            assert d == sg.dist(u, v)


def test_border_shortcuts_unknown_subgraph(geo_index):
    """Test that an unknown subgraph id raises"""
    with pytest.raises(UnknownSubgraphError):
        border_shortcuts(geo_index, len(geo_index.subgraphs))
    with pytest.raises(UnknownSubgraphError):
        border_shortcuts(geo_index, -1)


def test_skeleton_contains_external_edges(geo_index):
    """Test that every external edge appears in the skeleton in both directions"""
    skeleton = geo_index.skeleton()
    for u, v, w in geo_index.external_edges:
        assert (v, w, -1) in skeleton[u]
        assert (u, w, -1) in skeleton[v]


# ============================================================================
# RUN TESTS
# ============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=partition_index", "--cov-report=term-missing"])
