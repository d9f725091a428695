#!/usr/bin/env python3
"""
Unit tests for katr_cli.py
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

# Import the module to test
import sys
sys.path.insert(0, str(Path(__file__).parent))
from katr_cli import _keyword_list, main


# ============================================================================
# FIXTURES
# ============================================================================

@pytest.fixture
def base_args(tmp_path):
    """Global flags isolating each test from config/katr.yml and data/"""
    config_file = tmp_path / "katr.yml"
    config_file.write_text("index:\n  workers: 1\n")
    return ["--config", str(config_file), "--index-path", str(tmp_path / "index.db"),
            "--partition-size", "10", "--seed", "5"]


@pytest.fixture
def network(tmp_path, base_args):
    out = tmp_path / "net"
    assert main(base_args + ["generate", str(out), "--vertices", "80", "--keywords", "3",
                             "--pois-per-keyword", "3"]) == 0
    return out


def _query_args(network, *extra):
    return [str(network), "--source", "2", "--keywords", "cafe,restaurant", "--k", "2", *extra]


# ============================================================================
# ARGUMENT TESTS
# ============================================================================

def test_keyword_list():
    """Test that numeric items become ids and the rest stay tags"""
    assert _keyword_list("0, cafe,12,") == [0, "cafe", 12]


def test_no_command_prints_help(capsys):
    """Test that running without a command returns 1"""
    assert main([]) == 1
    assert "usage" in capsys.readouterr().out


# ============================================================================
# COMMAND TESTS
# ============================================================================

def test_generate_writes_files(network):
    """Test that generate writes the three input files"""
    for name in ("edges.txt", "vertices.txt", "pois.txt"):
        assert (network / name).exists()


def test_ingest_summary(network, base_args, capsys):
    """Test the network summary table"""
    capsys.readouterr()
    assert main(base_args + ["ingest", str(network)]) == 0

    out = capsys.readouterr().out
    assert "Vertices" in out
    assert "Euclidean calibration" in out


def test_index_stats(network, base_args, tmp_path, capsys):
    """Test that index builds the cache and prints partition statistics"""
    capsys.readouterr()
    assert main(base_args + ["index", str(network), "--stats"]) == 0

    out = capsys.readouterr().out
    assert (tmp_path / "index.db").exists()
    assert "Subgraphs" in out
    assert "restaurant" in out


def test_partition_builds_then_loads(network, base_args, tmp_path, capsys):
    """Test that partition caches the index and reuses it on the second run"""
    capsys.readouterr()
    assert main(base_args + ["partition", str(network)]) == 0
    first = capsys.readouterr().out
    assert main(base_args + ["partition", str(network)]) == 0
    second = capsys.readouterr().out

    assert (tmp_path / "index.db").exists()
    assert "Partition index built" in first
    assert "Partition index loaded" in second
    assert "Subgraphs" in second


def test_query_json_matches_oracle(network, base_args, capsys):
    """Test that query and oracle print the same scores"""
    capsys.readouterr()
    assert main(base_args + ["query"] + _query_args(network, "--format", "json")) == 0
    engine = json.loads(capsys.readouterr().out)
    assert main(base_args + ["oracle"] + _query_args(network, "--format", "json")) == 0
    oracle = json.loads(capsys.readouterr().out)

    assert len(engine["routes"]) == 2
    assert [r["score"] for r in engine["routes"]] == pytest.approx(
        [r["score"] for r in oracle["routes"]], abs=1e-9)
    assert oracle["counters"]["orders_evaluated"] >= oracle["counters"]["cp_sets"]


def test_query_table(network, base_args, capsys):
    """Test the grid table output"""
    capsys.readouterr()
    assert main(base_args + ["query"] + _query_args(network, "--variant", "naive")) == 0

    out = capsys.readouterr().out
    assert "Rank" in out
    assert "+--" in out


def test_query_unknown_tag_fails(network, base_args):
    """Test that an unknown tag exits with 1"""
    args = [str(network), "--source", "2", "--keywords", "castle"]
    with patch('katr_cli.logger') as mock_logger:
        assert main(base_args + ["query"] + args) == 1

    assert "unknown_tag" in str(mock_logger.error.call_args)


def test_missing_network_fails(base_args, tmp_path):
    """Test that a missing network directory exits with 1"""
    assert main(base_args + ["ingest", str(tmp_path / "nowhere")]) == 1


def test_bench_then_report(network, base_args, tmp_path, capsys):
    """Test a small benchmark run and its report"""
    csv_path = tmp_path / "bench.csv"
    assert main(base_args + ["bench", str(network), "--out", str(csv_path), "--queries", "3",
                             "--m", "2", "--k", "1", "2", "--alpha", "0.5", "--workers", "1",
                             "--variants", "full", "no_ed", "oracle", "--no-timing"]) == 0
    capsys.readouterr()

    assert main(base_args + ["report", str(csv_path), "--estimate", str(network)]) == 0
    out = capsys.readouterr().out
    assert "no_ed" in out
    assert "estimated_fraction" in out


def test_serve_http(network, base_args):
    """Test that serve hands a loaded service to the HTTP runner"""
    with patch('katr_cli.serve_http') as mock_serve:
        assert main(base_args + ["serve", str(network), "--port", "9000"]) == 0

    service = mock_serve.call_args[0][0]
    assert service.ready
    assert mock_serve.call_args[1]["port"] == 9000


# ============================================================================
# RUN TESTS
# ============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=katr_cli", "--cov-report=term-missing"])
