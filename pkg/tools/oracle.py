#!/usr/bin/env python3
"""
Brute-Force Route Oracle
Enumerates every CP-Set and visit order with exact full-graph distances.
Ground truth for the engine; no pruning of any kind.
"""

import itertools
import logging
import math
from dataclasses import dataclass

from scipy.sparse.csgraph import floyd_warshall

from errors import OracleGuardError, QueryValidationError, UncoverableKeywordError
from graph_core import dijkstra_all, euclid_lower_bound, shortest_path
from katr_config import KatrConfig
from katr_engine import CpRoute, CpSet, score, tie_value, validate_query

logger = logging.getLogger(__name__)

FLOYD_MAX_VERTICES = 150


@dataclass
class OracleResult:
    routes: list
    cp_sets: int
    orders_evaluated: int


def _enumerate(net, q, leg, guard):
    by_keyword = {kw: [] for kw in q.keywords}
    for p in net.pois:
        if p.keyword in by_keyword:
            by_keyword[p.keyword].append(p)
    for kw, plist in by_keyword.items():
        if not plist:
            raise UncoverableKeywordError(kw, f"Keyword {kw} has no POI in the network")

    n_sets = 1
    for plist in by_keyword.values():
        n_sets *= len(plist)
    n_orders = 1 if q.fixed_order else math.factorial(len(q.keywords))
    if n_sets * n_orders > guard:
        raise OracleGuardError(n_sets, n_orders, guard)

    common = None
    if q.identical_ratings:
        common = q.common_rating if q.common_rating is not None else max(p.rating for p in net.pois)

    routes = []
    evaluated = 0
    for combo in itertools.product(*(by_keyword[kw] for kw in q.keywords)):
        tau = 0.0
        for p in combo:
            tau += p.rating if common is None else common
        cps = CpSet(tuple(combo), tau)
        orders = [combo] if q.fixed_order else itertools.permutations(combo)
        best, best_key = None, None
        for order in orders:
            evaluated += 1
            pivots = [q.v_q] + [p.vertex for p in order]
            if q.destination is not None:
                pivots.append(q.destination)
            gd = 0.0
            for a, b in zip(pivots, pivots[1:]):
                gd += leg(a, b)
            if math.isinf(gd):
                continue
            if q.distance_budget is not None and gd > q.distance_budget:
                continue
            key = (tie_value(gd), tuple(p.vertex for p in order), tuple(p.id for p in order))
            if best is None or key < best_key:
                ed = sum(euclid_lower_bound(net, a, b) for a, b in zip(pivots, pivots[1:]))
                best_key = key
                best = CpRoute(cps, tuple(order), gd, ed, score(q.alpha, gd, tau))
        if best is not None:
            routes.append(best)

    routes.sort(key=lambda r: r.sort_key)
    return OracleResult(routes[:q.k], n_sets, evaluated)


def _materialize(net, q, result):
    for route in result.routes:
        pivots = [q.v_q] + [p.vertex for p in route.order]
        if q.destination is not None:
            pivots.append(q.destination)
        path = [pivots[0]]
        for a, b in zip(pivots, pivots[1:]):
            path.extend(shortest_path(net, a, b)[1][1:])
        route.expanded_path = path
    return result


def oracle_topk(net, q, guard=KatrConfig.ORACLE_GUARD):
    """Exact top-k by exhaustive enumeration with per-source Dijkstra legs"""
    validate_query(q, net)
    sources = {}

    def leg(a, b):
        if a not in sources:
            sources[a] = dijkstra_all(net, a)[0]
        return sources[a][b]

    result = _enumerate(net, q, leg, guard)
    logger.debug(
        f"Oracle: {result.cp_sets} CP-Sets, {result.orders_evaluated} orders, "
        f"{len(sources)} Dijkstra sources"
    )
    return _materialize(net, q, result)


def oracle_topk_floyd(net, q, guard=KatrConfig.ORACLE_GUARD):
    """Second, independent oracle using all-pairs Floyd-Warshall distances (small graphs only)"""
    validate_query(q, net)
    if net.n_vertices > FLOYD_MAX_VERTICES:
        raise QueryValidationError(
            f"Floyd-Warshall oracle is limited to {FLOYD_MAX_VERTICES} vertices, got {net.n_vertices}"
        )
    matrix = floyd_warshall(net.to_csr(), directed=False)

    def leg(a, b):
        return float(matrix[a, b])

    return _enumerate(net, q, leg, guard)
