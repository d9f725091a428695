#!/usr/bin/env python3
"""
Prometheus Metrics for the Route Tool Service
Request counts, query latency, pruning-stage candidate counts and process memory
"""

import logging

import psutil
from prometheus_client import CONTENT_TYPE_LATEST, Counter, Gauge, Histogram, Info, generate_latest
from prometheus_client.core import CollectorRegistry

from katr_config import KatrConfig

logger = logging.getLogger(__name__)

# Create a custom registry to avoid conflicts
registry = CollectorRegistry()

requests_total = Counter(
    'katr_requests_total',
    'Tool service requests by endpoint and HTTP status',
    ['endpoint', 'status'],
    registry=registry
)

query_duration_seconds = Histogram(
    'katr_query_duration_seconds',
    'Route query latency in seconds',
    buckets=[0.005, 0.01, 0.05, 0.1, 0.25, 0.5, 1, 2, 5, 10],
    registry=registry
)

query_timeouts_total = Counter(
    'katr_query_timeouts_total',
    'Queries aborted at their deadline',
    registry=registry
)

candidates_total = Counter(
    'katr_candidates_total',
    'Candidates surviving each pruning stage (subgraphs, CP-Sets, CP-Routes)',
    ['quantity', 'stage'],
    registry=registry
)

service_memory_usage_mb = Gauge(
    'katr_service_memory_usage_mb',
    'Resident memory of the tool service in MB',
    registry=registry
)

index_info = Info(
    'katr_index',
    'Loaded network and partition index',
    registry=registry
)

STAGES = {
    ("sg", "RN"): "n_sg_rn",
    ("sg", "SR"): "n_sg_sr",
    ("sg", "BP"): "n_sg_bp",
    ("cps", "RN"): "n_cps_rn",
    ("cps", "SR"): "n_cps_sr",
    ("cps", "BP"): "n_cps_bp",
    ("cpr", "SR"): "n_cpr_sr",
    ("cpr", "EDRS"): "n_cpr_edrs",
}


def record_counters(counters):
    values = counters.as_dict()
    for (quantity, stage), name in STAGES.items():
        candidates_total.labels(quantity=quantity, stage=stage).inc(values[name])


def describe_index(net, pi, idx):
    index_info.info({
        'vertices': str(net.n_vertices),
        'edges': str(len(net.edges)),
        'pois': str(len(net.pois)),
        'keywords': str(len(idx.keyword_catalog)),
        'subgraphs': str(len(pi.subgraphs)),
        'partition_size': str(pi.partition_size),
    })


def monitor_memory_usage(config=None):
    """Sample RSS, update the gauge and warn past the configured thresholds"""
    config = config or KatrConfig()
    try:
        process = psutil.Process()
        memory_mb = process.memory_info().rss / 1024 / 1024
        service_memory_usage_mb.set(memory_mb)

        if memory_mb > config.MEMORY_CRITICAL_THRESHOLD_MB:
            logger.error(f"CRITICAL: Memory usage {memory_mb:.1f}MB exceeds threshold {config.MEMORY_CRITICAL_THRESHOLD_MB}MB")
        elif memory_mb > config.MEMORY_WARNING_THRESHOLD_MB:
            logger.warning(f"WARNING: Memory usage {memory_mb:.1f}MB exceeds threshold {config.MEMORY_WARNING_THRESHOLD_MB}MB")

        return memory_mb
    except Exception as e:
        logger.debug(f"Could not monitor memory usage: {e}")
        return 0


def render_latest():
    """(payload, content type) for a /metrics response"""
    return generate_latest(registry), CONTENT_TYPE_LATEST
