"""
Shared fixtures for the route engine tests
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
from graph_core import Edge, Poi, RawNetwork, Vertex, normalize
from katr_config import KatrConfig
from partition_index import build_partition_index
from poi_index import build_poi_index
from synthetic import generate_synthetic


@pytest.fixture
def line_raw():
    """Unit-weight path 0-1-2-3-4-5 on the x axis with three rated POIs.

    keyword 0: v1 (10), v4 (10); keyword 1: v2 (5)
    """
    vertices = [Vertex(i, float(i), 0.0) for i in range(6)]
    edges = [Edge(i, i + 1, 1.0) for i in range(5)]
    pois = [Poi(0, 1, 0, 10.0), Poi(1, 4, 0, 10.0), Poi(2, 2, 1, 5.0)]
    return RawNetwork(vertices, edges, pois, {0: "cafe", 1: "museum"})


@pytest.fixture
def make_indexes():
    """Factory: raw network -> (net, pi, idx)"""
    def build(raw, partition_size=3, seed=0):
        net = normalize(raw)
        pi = build_partition_index(net, partition_size, seed=seed)
        idx = build_poi_index(net, pi)
        return net, pi, idx
    return build


@pytest.fixture
def line_indexes(line_raw, make_indexes):
    return make_indexes(line_raw, partition_size=2)


@pytest.fixture
def make_synthetic(make_indexes):
    """Factory: seeded random geometric network, normalized and indexed"""
    def build(seed, n_vertices=80, n_keywords=3, pois_per_keyword=4, partition_size=8, avg_degree=3.0):
        raw = generate_synthetic(seed, n_vertices, avg_degree, n_keywords, pois_per_keyword)
        return make_indexes(raw, partition_size=partition_size, seed=seed)
    return build


@pytest.fixture
def config(tmp_path):
    """Config with the index cache redirected to a temporary directory"""
    return KatrConfig({"index_path": str(tmp_path / "katr_index.db"), "index_workers": 1})
