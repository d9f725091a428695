#!/usr/bin/env python3
"""
Route Engine Command Line
Generate networks, build indexes, run and compare queries, benchmark, report and serve
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from tabulate import tabulate

from bench import Workload, apply_poi_fraction, estimator_diagnostic, report, run_bench, write_csv
from errors import KatrError
from graph_core import normalize
from index_store import load_or_build
from ingest import load_raw_network, network_hash
from katr_config import apply_cli_overrides, load_config
from katr_engine import VARIANTS
from oracle import oracle_topk
from poi_index import build_poi_index
from synthetic import RATING_DISTRIBUTIONS, generate_synthetic
from tool_service import (
    QueryRequest,
    RouteResponse,
    ServiceError,
    StdioServer,
    ToolService,
    load_indexes,
    serve_http,
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='[%(asctime)s] %(levelname)s: %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)
logger = logging.getLogger(__name__)

CONFIG_FLAGS = ["partition_size", "seed", "index_path", "timeout_s"]


def _keyword_list(text):
    items = [item.strip() for item in text.split(",") if item.strip()]
    return [int(item) if item.isdigit() else item for item in items]


def _query_request(args):
    return QueryRequest(
        source=args.source,
        keywords=_keyword_list(args.keywords),
        k=args.k,
        alpha=args.alpha,
        fixed_order=args.fixed_order,
        budget=args.budget,
        destination=args.destination,
        identical_ratings=args.identical_ratings,
    )


def print_routes(response, fmt):
    if fmt == "json":
        print(json.dumps(response.model_dump(), indent=2))
        return
    rows = [
        [
            r.rank,
            f"{r.score:.4f}",
            f"{r.distance:.2f}",
            f"{r.rating_sum:.1f}",
            " -> ".join(f"{p.tag}#{p.poi_id}@{p.vertex}" for p in r.pois),
            len(r.path),
        ]
        for r in response.routes
    ]
    print(tabulate(rows, headers=["Rank", "Score", "Distance", "Rating", "POIs", "Path len"], tablefmt="grid"))
    if response.partial:
        print(f"Only {len(response.routes)} route(s) exist for this query")
    if response.infeasible_budget:
        print("No route fits the distance budget")


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_generate(args, config):
    generate_synthetic(
        seed=config.SEED,
        n_vertices=args.vertices or config.SYNTH_VERTICES,
        avg_degree=args.avg_degree or config.SYNTH_AVG_DEGREE,
        n_keywords=args.keywords or config.SYNTH_KEYWORDS,
        pois_per_keyword=args.pois_per_keyword or config.SYNTH_POIS_PER_KEYWORD,
        rating_dist=args.rating_dist or config.SYNTH_RATING_DIST,
        out_dir=args.out,
    )
    print(f"Network written to {args.out}")
    return 0


def cmd_ingest(args, config):
    net = normalize(load_raw_network(args.network))
    rows = [
        ["Vertices", net.n_vertices],
        ["Dropped vertices (disconnected)", net.dropped_vertices],
        ["Edges", len(net.edges)],
        ["POIs", len(net.pois)],
        ["Keywords", len({p.keyword for p in net.pois})],
        ["Max edge weight", f"{net.weight_scale:.6g}"],
        ["Rating scale", f"{net.rating_scale:.6g}"],
        ["Euclidean calibration", f"{net.calibration:.6g}"],
    ]
    print(tabulate(rows, headers=["Network", "Value"], tablefmt="grid"))
    return 0


def print_partition_stats(pi):
    sizes = np.array([len(sg.members) for sg in pi.subgraphs])
    borders = np.array([len(sg.borders) for sg in pi.subgraphs])
    rows = [
        ["Subgraphs", len(pi.subgraphs)],
        ["Partition size limit", pi.partition_size],
        ["Members (mean / max)", f"{sizes.mean():.1f} / {sizes.max()}"],
        ["Borders (mean / max)", f"{borders.mean():.1f} / {borders.max()}"],
        ["Border vertices", int(np.count_nonzero(pi.is_border))],
        ["External edges", len(pi.external_edges)],
    ]
    print(tabulate(rows, headers=["Partition index", "Value"], tablefmt="grid"))


def cmd_partition(args, config):
    net = normalize(load_raw_network(args.network))
    pi, rebuilt = load_or_build(config.INDEX_PATH, net, network_hash(args.network), config.PARTITION_SIZE,
                                seed=config.SEED, workers=config.INDEX_WORKERS)
    print(f"Partition index {'built' if rebuilt else 'loaded'} at {config.INDEX_PATH}")
    print_partition_stats(pi)
    return 0


def cmd_index(args, config):
    indexes = load_indexes(args.network, config)
    if not args.stats:
        print(f"Index ready at {config.INDEX_PATH}")
        return 0
    print_partition_stats(indexes.pi)
    tag_rows = [[e.keyword_id, e.tag, e.count] for e in indexes.idx.keyword_catalog]
    print(tabulate(tag_rows, headers=["Keyword", "Tag", "POIs"], tablefmt="grid"))
    return 0


def cmd_query(args, config):
    service = ToolService(load_indexes(args.network, config), config)
    response = service.search(_query_request(args), variant=args.variant)
    print_routes(response, args.format)
    return 0


def cmd_oracle(args, config):
    service = ToolService(load_indexes(args.network, config), config)
    q = service.to_query(_query_request(args))
    result = oracle_topk(service.indexes.net, q, guard=config.ORACLE_GUARD)
    response = RouteResponse(
        routes=[service.route_out(i + 1, r, q) for i, r in enumerate(result.routes)],
        partial=len(result.routes) < q.k,
        infeasible_budget=q.distance_budget is not None and not result.routes,
        counters={"cp_sets": result.cp_sets, "orders_evaluated": result.orders_evaluated},
        timing_ms=0.0,
    )
    print_routes(response, args.format)
    return 0


def cmd_bench(args, config):
    indexes = load_indexes(args.network, config)
    workload = Workload(
        seed=config.SEED,
        n_queries=args.queries or config.BENCH_QUERIES,
        m_values=args.m or config.BENCH_M,
        k_values=args.k or config.BENCH_K,
        alpha_values=args.alpha or config.BENCH_ALPHA,
        poi_fraction=args.poi_fraction if args.poi_fraction is not None else config.BENCH_POI_FRACTION,
    )
    net = indexes.net
    idx = indexes.idx
    if workload.poi_fraction < 1.0:
        net = apply_poi_fraction(net, workload.poi_fraction, workload.seed)
        idx = build_poi_index(net, indexes.pi)
    records = run_bench(net, indexes.pi, idx, workload, variants=args.variants,
                        workers=args.workers or config.BENCH_WORKERS, oracle_guard=config.ORACLE_GUARD)
    write_csv(records, args.out, include_timing=not args.no_timing)
    mismatches = sum(1 for r in records if not r.score_match)
    print(f"{len(records)} records written to {args.out} ({mismatches} score mismatches)")
    return 1 if mismatches else 0


def cmd_report(args, config):
    summary = report(args.csv)
    print(tabulate(summary, headers="keys", tablefmt="grid", showindex=False, floatfmt=".4f"))
    if args.estimate:
        net = normalize(load_raw_network(args.estimate))
        diagnostic = estimator_diagnostic(summary, net)
        if not diagnostic.empty:
            print(tabulate(diagnostic, headers="keys", tablefmt="grid", showindex=False, floatfmt=".5f"))
    return 0


def cmd_serve(args, config):
    service = ToolService(load_indexes(args.network, config), config)
    if args.stdio:
        server = StdioServer(service)
        server.install_signal_handlers()
        server.run()
    else:
        serve_http(service, bind=args.bind, port=args.port)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "ingest": cmd_ingest,
    "partition": cmd_partition,
    "index": cmd_index,
    "query": cmd_query,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
    "report": cmd_report,
    "serve": cmd_serve,
}


# ============================================================================
# ARGUMENTS
# ============================================================================

def _add_query_args(p):
    p.add_argument('network', help='Network directory (edges.txt, vertices.txt, pois.txt)')
    p.add_argument('--source', type=int, required=True, help='Start vertex id')
    p.add_argument('--keywords', required=True, help='Comma-separated keyword ids or tags')
    p.add_argument('--k', type=int, default=1, help='Number of routes')
    p.add_argument('--alpha', type=float, default=0.5, help='Distance weight in [0, 1]')
    p.add_argument('--fixed-order', action='store_true', help='Visit keywords in the given order')
    p.add_argument('--budget', type=float, help='Maximum route length (input units)')
    p.add_argument('--destination', type=int, help='End vertex id')
    p.add_argument('--identical-ratings', action='store_true', help='Rank by distance only')
    p.add_argument('--format', choices=['table', 'json'], default='table')


def build_parser():
    parser = argparse.ArgumentParser(description='Keyword-aware top-k route queries')
    parser.add_argument('--config', help='YAML config file (default config/katr.yml)')
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level')
    parser.add_argument('--partition-size', type=int, help='Maximum vertices per subgraph')
    parser.add_argument('--seed', type=int, help='Seed for partitioning, generation and workloads')
    parser.add_argument('--index-path', help='SQLite partition index cache')
    parser.add_argument('--timeout-s', type=float, help='Per-query deadline in seconds')

    subparsers = parser.add_subparsers(dest='command', help='Commands')

    gen_parser = subparsers.add_parser('generate', help='Generate a synthetic network')
    gen_parser.add_argument('out', help='Output directory')
    gen_parser.add_argument('--vertices', type=int)
    gen_parser.add_argument('--avg-degree', type=float)
    gen_parser.add_argument('--keywords', type=int)
    gen_parser.add_argument('--pois-per-keyword', type=int)
    gen_parser.add_argument('--rating-dist', choices=list(RATING_DISTRIBUTIONS))

    ingest_parser = subparsers.add_parser('ingest', help='Validate and summarize a network')
    ingest_parser.add_argument('network', help='Network directory')

    partition_parser = subparsers.add_parser('partition', help='Partition the network and cache the intra tables')
    partition_parser.add_argument('network', help='Network directory')

    index_parser = subparsers.add_parser('index', help='Build or load the partition index')
    index_parser.add_argument('network', help='Network directory')
    index_parser.add_argument('--stats', action='store_true', help='Print partition statistics')

    query_parser = subparsers.add_parser('query', help='Run a top-k route query')
    _add_query_args(query_parser)
    query_parser.add_argument('--variant', choices=list(VARIANTS), default='full',
                              help='Engine variant (pruning ablations)')

    oracle_parser = subparsers.add_parser('oracle', help='Exhaustive ground-truth query')
    _add_query_args(oracle_parser)

    bench_parser = subparsers.add_parser('bench', help='Benchmark engine variants')
    bench_parser.add_argument('network', help='Network directory')
    bench_parser.add_argument('--out', default='bench.csv', help='CSV output path')
    bench_parser.add_argument('--queries', type=int)
    bench_parser.add_argument('--m', type=int, nargs='+', help='Keyword counts')
    bench_parser.add_argument('--k', type=int, nargs='+', help='Route counts')
    bench_parser.add_argument('--alpha', type=float, nargs='+', help='Alpha values')
    bench_parser.add_argument('--variants', nargs='+', default=['full', 'no_sr', 'no_sg', 'no_ed', 'oracle'],
                              choices=list(VARIANTS) + ['oracle'])
    bench_parser.add_argument('--workers', type=int)
    bench_parser.add_argument('--poi-fraction', type=float, help='Share of POIs kept per keyword')
    bench_parser.add_argument('--no-timing', action='store_true', help='Omit wall times (byte-stable CSV)')

    report_parser = subparsers.add_parser('report', help='Summarize a bench CSV')
    report_parser.add_argument('csv', help='Bench CSV')
    report_parser.add_argument('--estimate', metavar='NETWORK',
                               help='Compare measured search scope with the closed-form estimate')

    serve_parser = subparsers.add_parser('serve', help='Serve the route tools')
    serve_parser.add_argument('network', help='Network directory')
    serve_parser.add_argument('--bind', help='Bind address')
    serve_parser.add_argument('--port', type=int, help='Port')
    serve_parser.add_argument('--stdio', action='store_true', help='Line-delimited JSON on stdin/stdout')

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.getLogger().setLevel(getattr(logging, args.log_level))

    if args.command not in COMMANDS:
        parser.print_help()
        return 1

    try:
        config = load_config(args.config).apply_env()
        apply_cli_overrides(config, args, CONFIG_FLAGS)
        Path(config.INDEX_PATH).parent.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, config)
    except ServiceError as e:
        logger.error(json.dumps(e.body()))
        return 1
    except KatrError as e:
        logger.error(str(e))
        return 1
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
