#!/usr/bin/env python3
"""
Unit tests for katr_config.py
"""

import argparse
from pathlib import Path
from unittest.mock import patch

import pytest

# Import the module to test
import sys
sys.path.insert(0, str(Path(__file__).parent))
from katr_config import KatrConfig, apply_cli_overrides, load_config


# ============================================================================
# CONFIGURATION TESTS
# ============================================================================

def test_katr_config_defaults():
    """Test default configuration values"""
    config = KatrConfig()

    assert config.PARTITION_SIZE == 64
    assert config.SEED == 42
    assert config.MAX_KEYWORDS == 8
    assert config.PORT == 8350
    assert config.MEMORY_WARNING_THRESHOLD_MB == 500
    assert config.MEMORY_CRITICAL_THRESHOLD_MB == 1000


def test_overrides_do_not_leak_between_instances():
    """Test that instance overrides leave the class defaults alone"""
    config = KatrConfig({"partition_size": 16})

    assert config.PARTITION_SIZE == 16
    assert KatrConfig().PARTITION_SIZE == 64


@patch('katr_config.logger')
def test_unknown_key_warns(mock_logger):
    """Test that unknown keys are ignored with a warning"""
    config = KatrConfig({"partition_sise": 16})

    mock_logger.warning.assert_called_once()
    assert "partition_sise" in str(mock_logger.warning.call_args)
    assert config.PARTITION_SIZE == 64


def test_load_config_missing_file(tmp_path):
    """Test that a missing file yields defaults"""
    config = load_config(tmp_path / "absent.yml")

    assert config.as_dict() == KatrConfig().as_dict()


def test_load_config_flattens_sections(tmp_path):
    """Test that nested YAML sections map onto prefixed keys"""
    path = tmp_path / "katr.yml"
    path.write_text(
        "partition_size: 32\n"
        "synth:\n"
        "  vertices: 500\n"
        "  rating_dist: normal\n"
        "bench:\n"
        "  m: [2, 4]\n"
    )
    config = load_config(path)

    assert config.PARTITION_SIZE == 32
    assert config.SYNTH_VERTICES == 500
    assert config.SYNTH_RATING_DIST == "normal"
    assert config.BENCH_M == [2, 4]


@patch('katr_config.logger')
def test_load_config_not_a_mapping(mock_logger, tmp_path):
    """Test that a YAML list is rejected with a warning"""
    path = tmp_path / "katr.yml"
    path.write_text("- 1\n- 2\n")
    config = load_config(path)

    mock_logger.warning.assert_called()
    assert config.PARTITION_SIZE == 64


def test_load_config_from_env_path(tmp_path, monkeypatch):
    """Test that KATR_CONFIG selects the file"""
    path = tmp_path / "other.yml"
    path.write_text("seed: 7\n")
    monkeypatch.setenv("KATR_CONFIG", str(path))

    assert load_config().SEED == 7


def test_apply_env_overrides():
    """Test that KATR_* variables override file values with the right types"""
    config = KatrConfig().apply_env({
        "KATR_BIND": "0.0.0.0",
        "KATR_PORT": "9000",
        "KATR_TIMEOUT_S": "2.5",
        "UNRELATED": "x",
    })

    assert config.BIND == "0.0.0.0"
    assert config.PORT == 9000
    assert config.TIMEOUT_S == 2.5


def test_apply_cli_overrides_skips_none():
    """Test that only flags given on the command line win"""
    config = KatrConfig({"seed": 3})
    args = argparse.Namespace(seed=None, partition_size=12)
    apply_cli_overrides(config, args, ["seed", "partition_size", "index_path"])

    assert config.SEED == 3
    assert config.PARTITION_SIZE == 12


# ============================================================================
# RUN TESTS
# ============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v", "--cov=katr_config", "--cov-report=term-missing"])
