#!/usr/bin/env python3
"""
Benchmark Harness
Seeded query workloads, per-variant runs with pruning counters, CSV emission
and aggregate reports
"""

import csv
import dataclasses
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from errors import KatrError, OracleGuardError
from katr_config import KatrConfig
from katr_engine import VARIANTS, PruneCounters, Query, estimate_search_fraction, katr_query
from oracle import oracle_topk

logger = logging.getLogger(__name__)

VARIANT_ORDER = ["full", "no_sr", "no_sg", "no_ed", "naive", "oracle"]
COUNTER_FIELDS = [f.name for f in dataclasses.fields(PruneCounters)]
SCORE_TOLERANCE = 1e-9


@dataclass
class Workload:
    seed: int = KatrConfig.SEED
    n_queries: int = KatrConfig.BENCH_QUERIES
    m_values: list = field(default_factory=lambda: list(KatrConfig.BENCH_M))
    k_values: list = field(default_factory=lambda: list(KatrConfig.BENCH_K))
    alpha_values: list = field(default_factory=lambda: list(KatrConfig.BENCH_ALPHA))
    poi_fraction: float = KatrConfig.BENCH_POI_FRACTION


@dataclass
class BenchRecord:
    query_id: int
    variant: str
    v_q: int
    keywords: str
    m: int
    k: int
    alpha: float
    wall_time_s: float
    counters: dict
    n_routes: int
    scores: str
    distances: str
    rating_sums: str
    partial: bool
    score_match: bool = True

    def row(self, include_timing=True):
        row = {
            "query_id": self.query_id,
            "variant": self.variant,
            "v_q": self.v_q,
            "keywords": self.keywords,
            "m": self.m,
            "k": self.k,
            "alpha": self.alpha,
        }
        if include_timing:
            row["wall_time_s"] = f"{self.wall_time_s:.6f}"
        for name in COUNTER_FIELDS:
            row[name] = self.counters.get(name, "")
        row.update({
            "n_routes": self.n_routes,
            "scores": self.scores,
            "distances": self.distances,
            "rating_sums": self.rating_sums,
            "partial": int(self.partial),
            "score_match": int(self.score_match),
        })
        return row


def apply_poi_fraction(net, fraction, seed):
    """Keep a seeded share of each keyword's POIs (at least one per keyword)"""
    if fraction >= 1.0:
        return net
    rng = np.random.default_rng(seed)
    by_keyword = {}
    for p in net.pois:
        by_keyword.setdefault(p.keyword, []).append(p)
    kept = []
    for kw in sorted(by_keyword):
        plist = by_keyword[kw]
        n_keep = max(1, int(round(len(plist) * fraction)))
        picks = sorted(rng.choice(len(plist), size=n_keep, replace=False))
        kept.extend(plist[i] for i in picks)
    kept.sort(key=lambda p: p.id)
    logger.info(f"POI fraction {fraction}: kept {len(kept)}/{len(net.pois)} POIs")
    return dataclasses.replace(net, pois=kept)


def generate_queries(net, idx, workload):
    """Reproducible coverable queries: uniform sources, keywords drawn from the catalog"""
    rng = np.random.default_rng(workload.seed)
    keywords = [entry.keyword_id for entry in idx.keyword_catalog]
    if not keywords:
        raise KatrError("Network has no POIs; cannot build a workload")
    queries = []
    for query_id in range(workload.n_queries):
        m = int(rng.choice(workload.m_values))
        m = min(m, len(keywords))
        chosen = tuple(int(kw) for kw in rng.choice(keywords, size=m, replace=False))
        queries.append((query_id, Query(
            v_q=int(rng.integers(0, net.n_vertices)),
            keywords=chosen,
            k=int(rng.choice(workload.k_values)),
            alpha=float(rng.choice(workload.alpha_values)),
        )))
    return queries


def _fmt(values):
    return ";".join(f"{v:.12g}" for v in values)


def _record(query_id, variant, q, routes, counters, wall, partial):
    return BenchRecord(
        query_id=query_id,
        variant=variant,
        v_q=q.v_q,
        keywords=";".join(str(kw) for kw in q.keywords),
        m=len(q.keywords),
        k=q.k,
        alpha=q.alpha,
        wall_time_s=wall,
        counters=counters,
        n_routes=len(routes),
        scores=_fmt(r.score for r in routes),
        distances=_fmt(r.graph_distance for r in routes),
        rating_sums=_fmt(r.cpset.tau for r in routes),
        partial=partial,
    )


def run_one(net, pi, idx, query_id, q, variant, oracle_guard=KatrConfig.ORACLE_GUARD):
    """One (query, variant) record; None when the oracle refuses the size"""
    start = time.perf_counter()
    if variant == "oracle":
        try:
            result = oracle_topk(net, q, guard=oracle_guard)
        except OracleGuardError as e:
            logger.debug(f"Skipping oracle for query {query_id}: {e}")
            return None
        counters = {"n_cps_rn": result.cp_sets, "n_cpr_edrs": result.orders_evaluated}
        return _record(query_id, variant, q, result.routes, counters,
                       time.perf_counter() - start, len(result.routes) < q.k)
    result = katr_query(q, net, pi, idx, VARIANTS[variant])
    return _record(query_id, variant, q, result.routes, result.counters.as_dict(),
                   time.perf_counter() - start, result.partial)


def _scores(record):
    return [float(s) for s in record.scores.split(";") if s]


def check_variants(records):
    """Flag records whose scores differ from the full engine's on the same query"""
    reference = {r.query_id: _scores(r) for r in records if r.variant == "full"}
    mismatches = 0
    for r in records:
        expected = reference.get(r.query_id)
        if expected is None or r.variant == "full":
            continue
        got = _scores(r)
        if len(got) != len(expected) or any(
                abs(a - b) > SCORE_TOLERANCE for a, b in zip(got, expected)):
            r.score_match = False
            mismatches += 1
            logger.error(f"Score mismatch on query {r.query_id}: {r.variant}={got} full={expected}")
    return mismatches


def run_bench(net, pi, idx, workload, variants=("full", "no_sr", "no_sg", "no_ed", "oracle"),
              workers=KatrConfig.BENCH_WORKERS, oracle_guard=KatrConfig.ORACLE_GUARD):
    """Run every variant on every workload query; records ordered by (query id, variant)"""
    unknown = [v for v in variants if v != "oracle" and v not in VARIANTS]
    if unknown:
        raise KatrError(f"Unknown variants: {', '.join(unknown)}")
    queries = generate_queries(net, idx, workload)
    jobs = [(query_id, q, variant) for query_id, q in queries for variant in variants]
    logger.info(f"Running {len(queries)} queries x {len(variants)} variants on {workers} workers")

    def job(item):
        query_id, q, variant = item
        return run_one(net, pi, idx, query_id, q, variant, oracle_guard)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, jobs))
    else:
        results = [job(item) for item in jobs]

    records = [r for r in results if r is not None]
    records.sort(key=lambda r: (r.query_id, VARIANT_ORDER.index(r.variant)))
    mismatches = check_variants(records)
    logger.info(f"Bench finished: {len(records)} records, {mismatches} score mismatches")
    return records


def write_csv(records, path, include_timing=True):
    rows = [r.row(include_timing) for r in records]
    if not rows:
        raise KatrError("No records to write")
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    logger.info(f"Wrote {len(rows)} records to {path}")
    return path


def _ratio(numerator, denominator, empty):
    ratio = numerator / denominator.replace(0, np.nan)
    return ratio.fillna(empty).clip(0.0, 1.0)


def report(source):
    """Aggregate a bench CSV (or DataFrame) per variant and parameter point"""
    df = source if isinstance(source, pd.DataFrame) else pd.read_csv(source)
    if df.empty:
        raise KatrError("Bench report needs at least one record")
    df = df.copy()
    df["sg_sr_ratio"] = _ratio(df["n_sg_sr"], df["n_sg_rn"], 1.0)
    df["sg_bp_ratio"] = _ratio(df["n_sg_bp"], df["n_sg_sr"], 1.0)
    df["cps_sr_ratio"] = _ratio(df["n_cps_sr"], df["n_cps_rn"], 1.0)
    df["cps_bp_ratio"] = _ratio(df["n_cps_bp"], df["n_cps_sr"], 1.0)
    df["cpr_skip_ratio"] = 1.0 - _ratio(df["n_cpr_edrs"], df["n_cpr_sr"], 1.0)

    aggregations = {
        "queries": ("query_id", "count"),
        "visited_mean": ("visited", "mean"),
        "sg_sr_ratio": ("sg_sr_ratio", "mean"),
        "sg_bp_ratio": ("sg_bp_ratio", "mean"),
        "cps_sr_ratio": ("cps_sr_ratio", "mean"),
        "cps_bp_ratio": ("cps_bp_ratio", "mean"),
        "cpr_skip_ratio": ("cpr_skip_ratio", "mean"),
        "mismatches": ("score_match", lambda s: int((s == 0).sum())),
    }
    if "wall_time_s" in df.columns:
        aggregations.update({
            "time_mean_s": ("wall_time_s", "mean"),
            "time_p50_s": ("wall_time_s", lambda s: s.quantile(0.5)),
            "time_p95_s": ("wall_time_s", lambda s: s.quantile(0.95)),
        })
    summary = df.groupby(["variant", "m", "k", "alpha"], sort=True).agg(**aggregations).reset_index()
    return summary


def estimator_diagnostic(summary, net):
    """Measured CP-Set share inside the Safe Region next to the closed-form estimate"""
    full = summary[summary["variant"] == "full"]
    if full.empty or not net.pois:
        return pd.DataFrame()
    # Unit-square generator: area in normalized distance units
    xs, ys = net.coords[:, 0], net.coords[:, 1]
    area = (xs.max() - xs.min()) * (ys.max() - ys.min()) / net.weight_scale ** 2
    n_keywords = len({p.keyword for p in net.pois})
    n_p = len(net.pois) / n_keywords
    ratings = [p.rating for p in net.pois]
    rows = []
    for _, row in full.iterrows():
        if row["alpha"] <= 0 or area <= 0:
            continue
        estimate = estimate_search_fraction(
            area, int(row["m"]), int(row["k"]), n_p, row["alpha"], max(ratings), min(ratings))
        rows.append({
            "m": row["m"], "k": row["k"], "alpha": row["alpha"],
            "measured_cps_sr_ratio": row["cps_sr_ratio"],
            "estimated_fraction": estimate,
        })
        logger.info(
            f"m={row['m']} k={row['k']} alpha={row['alpha']}: measured CP-Set share "
            f"{row['cps_sr_ratio']:.4%} vs estimate {estimate:.4%}"
        )
    return pd.DataFrame(rows)
