#!/usr/bin/env python3
"""
Unit tests for synthetic.py
"""

from pathlib import Path

import numpy as np
import pytest

# Import the module to test
import sys
sys.path.insert(0, str(Path(__file__).parent))
from errors import GeneratorError
from graph_core import normalize
from ingest import load_raw_network
from synthetic import TAG_NAMES, generate_synthetic, tag_for


# ============================================================================
# GENERATOR TESTS
# ============================================================================

def test_generator_is_deterministic():
    """Test that one seed always produces the same network"""
    a = generate_synthetic(7, 200, 3.0, 4, 5)
    b = generate_synthetic(7, 200, 3.0, 4, 5)
    c = generate_synthetic(8, 200, 3.0, 4, 5)

    assert a.edges == b.edges
    assert a.pois == b.pois
    assert a.edges != c.edges


def test_generator_connected_with_target_degree():
    """Test connectivity and the average degree"""
    raw = generate_synthetic(9, 300, 3.0, 2, 2)
    net = normalize(raw)

    assert net.dropped_vertices == 0
    assert net.n_vertices == 300
    assert 2 * len(raw.edges) / 300 == pytest.approx(3.0, abs=0.05)


def test_generator_weights_are_euclidean():
    """Test that edge weights equal straight-line lengths (calibration 1)"""
    net = normalize(generate_synthetic(10, 100, 2.5, 1, 1))

    assert net.calibration == pytest.approx(1.0)


def test_generator_drops_long_edges():
    """Test that hull triangles do not leave long edges across the square"""
    raw = generate_synthetic(12, 2000, 3.0, 1, 1)
    lengths = np.array([e.weight for e in raw.edges])

    assert lengths.max() < 0.1
    assert lengths.max() < 10 * np.median(lengths)
    assert normalize(raw).dropped_vertices == 0


def test_generator_pois_and_ratings():
    """Test POI counts per keyword and the uniform rating range"""
    raw = generate_synthetic(11, 100, 3.0, 3, 7)

    assert len(raw.pois) == 21
    assert [p.id for p in raw.pois] == list(range(21))
    for kw in range(3):
        assert sum(1 for p in raw.pois if p.keyword == kw) == 7
    assert all(1.0 <= p.rating <= 5.0 for p in raw.pois)
    assert raw.tags == {0: "cafe", 1: "restaurant", 2: "museum"}


@pytest.mark.parametrize("dist,check", [
    ("constant", lambda r: r == 4.0),
    ("normal", lambda r: 0.5 <= r <= 5.0),
])
def test_rating_distributions(dist, check):
    """Test the alternative rating distributions"""
    raw = generate_synthetic(12, 60, 3.0, 2, 10, rating_dist=dist)

    assert all(check(p.rating) for p in raw.pois)


def test_generator_writes_files(tmp_path):
    """Test that generated files read back identically"""
    raw = generate_synthetic(13, 50, 3.0, 2, 2, out_dir=tmp_path / "net")
    loaded = load_raw_network(tmp_path / "net")

    assert loaded.edges == raw.edges
    assert loaded.vertices == raw.vertices
    assert loaded.pois == raw.pois


@pytest.mark.parametrize("kwargs", [
    {"n_vertices": 2},
    {"avg_degree": 1.5},
    {"avg_degree": 7.0},
    {"n_keywords": 0},
    {"pois_per_keyword": 0},
    {"rating_dist": "bimodal"},
])
def test_generator_rejects_bad_parameters(kwargs):
    """Test that infeasible parameters raise GeneratorError"""
    params = {"seed": 1, "n_vertices": 50, "avg_degree": 3.0, "n_keywords": 2, "pois_per_keyword": 2}
    params.update(kwargs)
    with pytest.raises(GeneratorError):
        generate_synthetic(**params)


def test_tag_names_wrap():
    """Test that keyword ids past the name list get a numbered suffix"""
    assert tag_for(0) == "cafe"
    assert tag_for(len(TAG_NAMES)) == "cafe_1"


# ============================================================================
# RUN TESTS
# ============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=synthetic", "--cov-report=term-missing"])
