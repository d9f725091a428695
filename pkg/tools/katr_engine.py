#!/usr/bin/env python3
"""
Keyword-Aware Top-k Route Engine
Explore-and-bound query processing: seed exploration, Safe Region, subgraph
batch pruning, CP-Set elimination and Euclidean-ordered permutation search
"""

import bisect
import heapq
import itertools
import logging
import math
import time
from dataclasses import asdict, dataclass, field

from errors import (
    InapplicableBoundError,
    QueryTimeoutError,
    QueryValidationError,
    UncoverableKeywordError,
    ZeroAlphaError,
)
from graph_core import euclid_lower_bound
from katr_config import KatrConfig
from poi_index import max_cumulative_rating_with_forced_poi
from route_legs import LegRouter
from search_graph import build_search_graph

logger = logging.getLogger(__name__)

# Distances are compared against d_ub with this relative tolerance
RADIUS_TOLERANCE = 1e-12

# Scores and distances are ranked after rounding so that equal routes summed
# along different leg decompositions tie exactly
TIE_DECIMALS = 9


@dataclass(frozen=True)
class Query:
    v_q: int
    keywords: tuple
    k: int = 1
    alpha: float = 0.5
    fixed_order: bool = False
    distance_budget: float = None  # normalized units
    destination: int = None
    identical_ratings: bool = False
    common_rating: float = None


@dataclass(frozen=True)
class EngineOptions:
    safe_region: bool = True
    subgraph_pruning: bool = True
    cpset_elimination: bool = True
    edrs: bool = True
    timeout_s: float = None
    slow_query_s: float = KatrConfig.SLOW_QUERY_S
    max_keywords: int = KatrConfig.MAX_KEYWORDS
    heuristic_check: object = None


VARIANTS = {
    "full": EngineOptions(),
    "no_sr": EngineOptions(safe_region=False),
    "no_sg": EngineOptions(subgraph_pruning=False),
    "no_ed": EngineOptions(edrs=False),
    "naive": EngineOptions(safe_region=False, subgraph_pruning=False,
                           cpset_elimination=False, edrs=False),
}


@dataclass(frozen=True)
class CpSet:
    pois: tuple  # one POI per query keyword, in query keyword order
    tau: float

    @property
    def key(self):
        return frozenset(p.id for p in self.pois)


@dataclass
class CpRoute:
    cpset: CpSet
    order: tuple
    graph_distance: float
    euclid_distance: float
    score: float
    expanded_path: list = field(default_factory=list)

    @property
    def vertex_sequence(self):
        return tuple(p.vertex for p in self.order)

    @property
    def sort_key(self):
        return (-tie_value(self.score), tie_value(self.graph_distance), self.vertex_sequence,
                tuple(p.id for p in self.order))


@dataclass
class PruneCounters:
    n_sg_rn: int = 0
    n_sg_sr: int = 0
    n_sg_bp: int = 0
    n_cps_rn: int = 0
    n_cps_sr: int = 0
    n_cps_bp: int = 0
    n_cpr_sr: int = 0
    n_cpr_edrs: int = 0
    visited: int = 0
    graph_distance_computations: int = 0
    cpsets_eliminated: int = 0
    subgraphs_bypassed: int = 0
    safe_region_iterations: int = 0

    def as_dict(self):
        return asdict(self)


class TopK:
    """Best k routes (one per CP-Set) ordered by sort_key"""

    def __init__(self, k):
        self.k = k
        self._keys = []
        self._routes = []

    def __len__(self):
        return len(self._routes)

    @property
    def full(self):
        return len(self._routes) >= self.k

    @property
    def sc_min(self):
        return self._routes[self.k - 1].score if self.full else -math.inf

    def offer(self, route):
        key = route.sort_key
        if self.full and key >= self._keys[-1]:
            return False
        pos = bisect.bisect_left(self._keys, key)
        self._keys.insert(pos, key)
        self._routes.insert(pos, route)
        if len(self._routes) > self.k:
            self._keys.pop()
            self._routes.pop()
        return True

    def routes(self):
        return list(self._routes)


@dataclass
class SearchState:
    frontier: list = field(default_factory=list)
    sd: dict = field(default_factory=dict)
    processed: set = field(default_factory=set)
    settle_order: list = field(default_factory=list)
    per_keyword_found: dict = field(default_factory=dict)
    processed_pois: set = field(default_factory=set)
    dismissed: set = field(default_factory=set)
    topk: TopK = None
    d_ub: float = math.inf
    tau_u: float = math.inf
    counters: PruneCounters = field(default_factory=PruneCounters)
    emitted: list = field(default_factory=list)
    pending: list = field(default_factory=list)
    pruned: set = field(default_factory=set)
    eliminated: set = field(default_factory=set)
    first_dist: dict = field(default_factory=dict)
    checked_at: dict = field(default_factory=dict)
    border_dist: dict = None
    region: frozenset = None
    established_region: frozenset = None
    established_d_ub: float = None
    exhausted: bool = False
    nothing_left: bool = False


@dataclass
class QueryResult:
    routes: list
    counters: PruneCounters
    partial: bool
    infeasible_budget: bool
    established_d_ub: float
    final_d_ub: float
    bypassed_subgraphs: set
    dismissed_pois: set
    eliminated_cpsets: set
    elapsed: float


@dataclass
class QueryContext:
    net: object
    pi: object
    idx: object
    graph: object
    q: Query
    options: EngineOptions
    router: LegRouter
    state: SearchState
    rating_override: float = None
    deadline: float = None
    started: float = 0.0

    @classmethod
    def create(cls, q, net, pi, idx, options=None):
        options = options or EngineOptions()
        graph = build_search_graph(net, pi, idx, q)
        rating_override = None
        if q.identical_ratings:
            rating_override = q.common_rating
            if rating_override is None:
                rating_override = max(p.rating for p in net.pois)
        started = time.monotonic()
        deadline = started + options.timeout_s if options.timeout_s else None
        state = SearchState(topk=TopK(q.k))
        state.per_keyword_found = {kw: [] for kw in q.keywords}
        if q.distance_budget is not None:
            state.d_ub = q.distance_budget
        return cls(net, pi, idx, graph, q, options,
                   LegRouter(net, pi, options.heuristic_check), state,
                   rating_override, deadline, started)

    def rating(self, poi):
        return poi.rating if self.rating_override is None else self.rating_override


# ============================================================================
# SCORE AND BOUND FORMULAS
# ============================================================================

def score(alpha, graph_distance, rating_sum):
    return -alpha * graph_distance + (1.0 - alpha) * rating_sum


def tie_value(x):
    return round(x, TIE_DECIMALS)


def strictly_below(bound, sc_min):
    """True when bound loses to sc_min even after tie rounding"""
    return tie_value(bound) < tie_value(sc_min)


def compute_d_ub(alpha, tau_u, sc_min):
    """Safe Region radius ((1 - alpha) * tau_u - sc_min) / alpha, clamped at 0"""
    if alpha == 0:
        raise ZeroAlphaError("Safe Region radius is undefined for alpha = 0")
    if sc_min == -math.inf:
        return math.inf
    if tau_u == -math.inf:
        return 0.0
    return max(0.0, ((1.0 - alpha) * tau_u - sc_min) / alpha)


def _within(d, radius):
    return d <= radius + RADIUS_TOLERANCE * max(1.0, radius)


def validate_query(q, net, max_keywords=KatrConfig.MAX_KEYWORDS):
    n = net.n_vertices
    if not 0 <= q.v_q < n:
        raise QueryValidationError(f"Query vertex {q.v_q} not in network (0..{n - 1})")
    if not q.keywords:
        raise QueryValidationError("At least one keyword is required")
    if len(set(q.keywords)) != len(q.keywords):
        raise QueryValidationError("Query keywords must be distinct")
    if len(q.keywords) > max_keywords:
        raise QueryValidationError(f"At most {max_keywords} keywords are supported, got {len(q.keywords)}")
    if q.k < 1:
        raise QueryValidationError(f"k must be at least 1, got {q.k}")
    if not 0.0 <= q.alpha <= 1.0:
        raise QueryValidationError(f"alpha must be in [0, 1], got {q.alpha}")
    if q.destination is not None and not 0 <= q.destination < n:
        raise QueryValidationError(f"Destination {q.destination} not in network")
    if q.distance_budget is not None and not q.distance_budget >= 0:
        raise QueryValidationError(f"Distance budget must be non-negative, got {q.distance_budget}")


# ============================================================================
# CP-SETS AND ROUTES
# ============================================================================

def make_cpset(ctx, pois):
    tau = 0.0
    for p in pois:
        tau += ctx.rating(p)
    return CpSet(tuple(pois), tau)


def _orders(ctx, cps):
    if ctx.q.fixed_order:
        return [cps.pois]
    return list(itertools.permutations(cps.pois))


def _pivots(ctx, order):
    pivots = [ctx.q.v_q] + [p.vertex for p in order]
    if ctx.q.destination is not None:
        pivots.append(ctx.q.destination)
    return pivots


def euclid_route_distance(net, pivots):
    return sum(euclid_lower_bound(net, a, b) for a, b in zip(pivots, pivots[1:]))


def cpset_upper_bound(ctx, cps):
    """(SC_CPS, ED_m, [(euclid distance, order)]) over every allowed visit order"""
    order_eds = [(euclid_route_distance(ctx.net, _pivots(ctx, order)), order)
                 for order in _orders(ctx, cps)]
    ed_m = min(ed for ed, _ in order_eds)
    return score(ctx.q.alpha, ed_m, cps.tau), ed_m, order_eds


def graph_route_distance(router, order, v_q, destination=None, expand=True):
    """Graph distance of visiting order from v_q (and on to destination), plus the expanded path.

    Legs come from the router: the intra table when both pivots share a subgraph,
    A* over the border skeleton otherwise. The path is None when expand is False.
    """
    pivots = [v_q] + [p.vertex for p in order]
    if destination is not None:
        pivots.append(destination)
    distance = router.route_distance(pivots)
    if not expand or math.isinf(distance):
        return distance, None
    return distance, router.route_path(pivots)


def edrs(ctx, cps, order_eds=None):
    """Best route of cps: orders by ascending Euclidean distance, stop once ED exceeds the best graph distance.

    An order whose ED only ties the best distance is still evaluated, since it may
    win the tie-break on its vertex sequence.
    """
    if order_eds is None:
        _, _, order_eds = cpset_upper_bound(ctx, cps)
    counters = ctx.state.counters
    counters.n_cpr_sr += len(order_eds)

    ranked = sorted(order_eds, key=lambda item: (
        item[0], tuple(p.vertex for p in item[1]), tuple(p.id for p in item[1])))
    best = None
    best_key = None
    for ed, order in ranked:
        if ctx.options.edrs and best is not None and tie_value(ed) > tie_value(best.graph_distance):
            break
        counters.n_cpr_edrs += 1
        gd, _ = graph_route_distance(ctx.router, order, ctx.q.v_q, ctx.q.destination, expand=False)
        if math.isinf(gd):
            continue
        key = (tie_value(gd), tuple(p.vertex for p in order), tuple(p.id for p in order))
        if best is None or key < best_key:
            best_key = key
            best = CpRoute(cps, tuple(order), gd, ed, score(ctx.q.alpha, gd, cps.tau))
    return best


# ============================================================================
# FRONTIER
# ============================================================================

def _push(state, v, d):
    if v not in state.processed and d < state.sd.get(v, math.inf):
        state.sd[v] = d
        heapq.heappush(state.frontier, (d, v))


def _check_deadline(ctx):
    if ctx.deadline is not None and time.monotonic() > ctx.deadline:
        raise QueryTimeoutError(time.monotonic() - ctx.started, ctx.state.topk.routes())


def _emit_cpsets(ctx, poi):
    """New CP-Sets formed by a freshly processed POI with the POIs found so far"""
    state = ctx.state
    state.processed_pois.add(poi.id)
    state.per_keyword_found[poi.keyword].append(poi)
    pools = [[poi] if kw == poi.keyword else state.per_keyword_found[kw] for kw in ctx.q.keywords]
    if any(not pool for pool in pools):
        return []
    fresh = [make_cpset(ctx, combo) for combo in itertools.product(*pools)]
    state.emitted.extend(fresh)
    return fresh


def _settle(ctx, v, d):
    """Mark v processed, relax its edges and process its km-POIs; returns new CP-Sets"""
    state, pi, graph = ctx.state, ctx.pi, ctx.graph
    state.processed.add(v)
    state.settle_order.append(v)
    state.counters.visited += 1
    sg_id = int(pi.assignment[v])
    state.first_dist.setdefault(sg_id, d)

    if sg_id in state.pruned:
        # Bypassed subgraph: only its skeleton (external edges and border shortcuts) is traversed
        sg = pi.subgraphs[sg_id]
        for u, w, via in graph.adjacency[v]:
            if graph.is_shortcut(via) or pi.assignment[u] != sg_id:
                _push(state, u, d + w)
        for b in sg.borders:
            _push(state, b, d + sg.dist(v, b))
        return []

    for u, w, _ in graph.adjacency[v]:
        _push(state, u, d + w)
    fresh = []
    for p in graph.pois_at.get(v, ()):
        if p.id not in state.dismissed:
            fresh.extend(_emit_cpsets(ctx, p))
    return fresh


def di_exploration(ctx):
    """Dijkstra from v_q emitting CP-Sets as km-POIs settle, until at least k exist"""
    state, q = ctx.state, ctx.q
    if not state.frontier and not state.processed:
        _push(state, q.v_q, 0.0)
    while state.frontier and len(state.emitted) < q.k:
        _check_deadline(ctx)
        d, v = heapq.heappop(state.frontier)
        if v in state.processed or d > state.sd[v]:
            continue
        if not _within(d, state.d_ub):
            state.frontier.clear()
            break
        state.pending.extend(_settle(ctx, v, d))
    if not state.frontier:
        state.exhausted = True
    logger.debug(f"Seed exploration: {len(state.emitted)} CP-Sets after {state.counters.visited} vertices")
    return list(state.emitted)


# ============================================================================
# SAFE REGION
# ============================================================================

def _open_pois(ctx, sg_ids):
    state = ctx.state
    return [
        p for sg in sg_ids for p in ctx.graph.subgraph_pois.get(sg, ())
        if p.id not in state.processed_pois and p.id not in state.dismissed
    ]


def compute_tau_u(ctx, region):
    """Max cumulative rating over CP-Sets with at least one unprocessed POI inside region"""
    open_pois = _open_pois(ctx, region)
    if not open_pois:
        return -math.inf
    try:
        return max_cumulative_rating_with_forced_poi(
            ctx.idx, ctx.q.keywords, open_pois, restrict=region,
            exclude=ctx.state.dismissed, rating_override=ctx.rating_override)
    except (UncoverableKeywordError, InapplicableBoundError):
        return -math.inf


def _border_range_search(ctx, radius):
    """Distances from v_q to every border within radius over the border skeleton"""
    pi, v_q = ctx.pi, ctx.q.v_q
    skeleton = pi.skeleton()
    home = pi.subgraph_of(v_q)
    dist = {v_q: 0.0}
    heap = [(0.0, v_q)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        if not _within(d, radius):
            break
        done.add(x)
        edges = list(skeleton.get(x, ()))
        if x == v_q:
            edges += [(b, home.dist(v_q, b), home.id) for b in home.borders]
        for y, w, _ in edges:
            nd = d + w
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return {b: d for b, d in dist.items() if b in done and pi.is_border[b]}


def _region_within(ctx, radius):
    pi = ctx.pi
    region = {int(pi.assignment[ctx.q.v_q])}
    for b, d in ctx.state.border_dist.items():
        if _within(d, radius):
            region.add(int(pi.assignment[b]))
    return frozenset(region & ctx.graph.relevant)


def _radius(ctx, tau_u):
    try:
        d = compute_d_ub(ctx.q.alpha, tau_u, ctx.state.topk.sc_min)
    except ZeroAlphaError:
        d = math.inf
    if ctx.q.distance_budget is not None:
        d = min(d, ctx.q.distance_budget)
    return d


def _shrink_region(ctx):
    """Alternate tau_u and d_ub until tau_u stops decreasing"""
    state = ctx.state
    region = state.region if state.region is not None else ctx.graph.relevant
    tau = compute_tau_u(ctx, region)
    while True:
        state.counters.safe_region_iterations += 1
        if tau == -math.inf:
            state.nothing_left = True
            break
        radius = min(_radius(ctx, tau), state.d_ub)
        new_region = _region_within(ctx, radius)
        new_tau = compute_tau_u(ctx, new_region)
        state.d_ub, state.region = radius, new_region
        logger.debug(
            f"Safe Region: tau_u={tau:.4f} d_ub={radius:.6f} "
            f"subgraphs={len(new_region)} next tau_u={new_tau:.4f}"
        )
        if not new_tau < tau:
            break
        tau = new_tau
    state.tau_u = tau


def establish_safe_region(ctx):
    """Fix the first Safe Region from the seeds; one skeleton range search is reused afterwards"""
    state = ctx.state
    state.region = ctx.graph.relevant
    first_radius = _radius(ctx, compute_tau_u(ctx, state.region))
    state.border_dist = _border_range_search(ctx, min(first_radius, state.d_ub))
    _shrink_region(ctx)
    state.established_region = state.region
    state.established_d_ub = state.d_ub
    return state


def refine_safe_region(ctx):
    if ctx.options.safe_region and ctx.state.border_dist is not None:
        _shrink_region(ctx)


# ============================================================================
# BATCH PRUNING
# ============================================================================

def subgraph_upper_bound(ctx, sg_id, d_lb):
    """SC_SG = -alpha * D_lb + (1 - alpha) * tau_max for routes through sg_id's unprocessed POIs"""
    forced = _open_pois(ctx, [sg_id])
    if not forced:
        raise InapplicableBoundError(f"Subgraph {sg_id} has no unprocessed km-POI")
    region = ctx.state.region if ctx.state.region is not None else ctx.graph.relevant
    tau_max = max_cumulative_rating_with_forced_poi(
        ctx.idx, ctx.q.keywords, forced, restrict=region | {sg_id},
        exclude=ctx.state.dismissed, rating_override=ctx.rating_override)
    return score(ctx.q.alpha, d_lb, tau_max)


def _bypass(ctx, sg_id):
    """Dismiss sg_id's unprocessed POIs and reroute settled anchors over its border shortcuts"""
    state, pi = ctx.state, ctx.pi
    sg = pi.subgraphs[sg_id]
    dismissed = _open_pois(ctx, [sg_id])
    state.pruned.add(sg_id)
    state.dismissed.update(p.id for p in dismissed)
    state.counters.subgraphs_bypassed += 1
    anchors = [x for x in (ctx.q.v_q, *sg.borders)
               if x in state.processed and pi.assignment[x] == sg_id]
    for x in anchors:
        for b in sg.borders:
            _push(state, b, state.sd[x] + sg.dist(x, b))
    logger.debug(f"Bypassed subgraph {sg_id}, dismissed {len(dismissed)} POIs")


def _maybe_bypass(ctx, sg_id, d):
    state = ctx.state
    if (not ctx.options.subgraph_pruning or not state.topk.full
            or sg_id in state.pruned or sg_id not in ctx.graph.relevant):
        return False
    sc_min = state.topk.sc_min
    if state.checked_at.get(sg_id) == sc_min:
        return False
    state.checked_at[sg_id] = sc_min
    try:
        bound = subgraph_upper_bound(ctx, sg_id, state.first_dist.get(sg_id, d))
    except (InapplicableBoundError, UncoverableKeywordError):
        return False
    if strictly_below(bound, sc_min):
        _bypass(ctx, sg_id)
        refine_safe_region(ctx)
        return True
    return False


# ============================================================================
# CANDIDATE EVALUATION
# ============================================================================

def _evaluate(ctx, cps):
    state, q = ctx.state, ctx.q
    bound, ed_m, order_eds = cpset_upper_bound(ctx, cps)
    over_budget = q.distance_budget is not None and ed_m > q.distance_budget
    if ctx.options.cpset_elimination and (strictly_below(bound, state.topk.sc_min) or over_budget):
        state.counters.cpsets_eliminated += 1
        state.eliminated.add(cps.key)
        return
    route = edrs(ctx, cps, order_eds)
    if route is None:
        return
    if q.distance_budget is not None and route.graph_distance > q.distance_budget:
        return
    before = state.topk.sc_min
    if state.topk.offer(route) and state.topk.sc_min > before:
        refine_safe_region(ctx)


def _explore_region(ctx):
    """Continue the frontier inside the Safe Region with pruning and refinement"""
    state, pi, q = ctx.state, ctx.pi, ctx.q
    while state.frontier and not state.nothing_left:
        _check_deadline(ctx)
        d, v = heapq.heappop(state.frontier)
        if v in state.processed or d > state.sd[v]:
            continue
        if not _within(d, state.d_ub):
            break
        sg_id = int(pi.assignment[v])
        interior = not pi.is_border[v] and v != q.v_q
        if sg_id in state.pruned and interior:
            continue
        if _maybe_bypass(ctx, sg_id, d) and interior:
            continue
        for cps in _settle(ctx, v, d):
            _evaluate(ctx, cps)


# ============================================================================
# QUERY
# ============================================================================

def _product(values):
    total = 1
    for v in values:
        total *= v
    return total


def _finish_counters(ctx):
    state, graph, counters = ctx.state, ctx.graph, ctx.state.counters
    region = state.established_region if state.established_region is not None else graph.relevant
    counters.n_sg_rn = len(graph.relevant)
    counters.n_sg_sr = len(region)
    counters.n_sg_bp = len(region - state.pruned)
    counters.n_cps_rn = _product(len(graph.km_pois[kw]) for kw in ctx.q.keywords)
    poi_sg = ctx.idx.poi_subgraph
    counters.n_cps_sr = _product(
        sum(1 for p in graph.km_pois[kw] if poi_sg[p.id] in region) for kw in ctx.q.keywords)
    counters.n_cps_bp = sum(
        1 for cps in state.emitted if all(poi_sg[p.id] in region for p in cps.pois))
    counters.graph_distance_computations = ctx.router.computations


def run_query(ctx):
    """Run the full pipeline on a prepared context"""
    state, q = ctx.state, ctx.q
    seeds = di_exploration(ctx)
    if not seeds and state.exhausted and q.distance_budget is None:
        raise UncoverableKeywordError(q.keywords[0], "No CP-Set is reachable from the query vertex")

    for cps in state.pending:
        _evaluate(ctx, cps)
    state.pending.clear()

    if not state.exhausted:
        if ctx.options.safe_region:
            establish_safe_region(ctx)
        _explore_region(ctx)

    routes = state.topk.routes()
    for route in routes:
        _, route.expanded_path = graph_route_distance(ctx.router, route.order, q.v_q, q.destination)
    _finish_counters(ctx)
    return routes


def katr_query(q, net, pi, idx, options=None):
    """Top-k routes for q over prebuilt indexes"""
    options = options or EngineOptions()
    validate_query(q, net, options.max_keywords)
    ctx = QueryContext.create(q, net, pi, idx, options)
    routes = run_query(ctx)
    state = ctx.state
    elapsed = time.monotonic() - ctx.started
    if elapsed > ctx.options.slow_query_s:
        logger.warning(f"Slow query: {elapsed:.2f}s for v_q={q.v_q} keywords={list(q.keywords)} k={q.k}")
    logger.debug(f"Query counters: {state.counters.as_dict()}")
    return QueryResult(
        routes=routes,
        counters=state.counters,
        partial=len(routes) < q.k,
        infeasible_budget=q.distance_budget is not None and not routes,
        established_d_ub=state.established_d_ub,
        final_d_ub=state.d_ub,
        bypassed_subgraphs=set(state.pruned),
        dismissed_pois=set(state.dismissed),
        eliminated_cpsets=set(state.eliminated),
        elapsed=elapsed,
    )


# ============================================================================
# SEARCH SCOPE ESTIMATE
# ============================================================================

def search_scope_variants(z, m, k, n_p, alpha, tau_h, tau_l, pi_value=math.pi):
    """Safe Region area fraction under uniform POIs, in two algebraic forms.

    'derived' follows D_ub = ((1 - alpha) * m * tau_h - SC_min) / alpha with the seed
    diameter term entering SC_min multiplied by alpha; 'closed_form' divides the whole
    numerator by alpha.
    """
    if min(z, m, n_p, tau_h) <= 0 or alpha <= 0 or k < 0:
        raise ValueError("All inputs must be positive and alpha > 0")
    seed_diameter = 2.0 * math.sqrt(k / (n_p ** m * pi_value) * z)
    rating_term = (1.0 - alpha) * m * (tau_h - tau_l)
    derived_radius = rating_term / alpha + seed_diameter
    closed_radius = (rating_term + seed_diameter) / alpha
    return {
        "seed_diameter": seed_diameter,
        "derived": pi_value * derived_radius ** 2 / z,
        "closed_form": pi_value * closed_radius ** 2 / z,
    }


def estimate_search_fraction(z, m, k, n_p, alpha, tau_h, tau_l, pi_value=math.pi):
    """Diagnostic estimate of the share of the network inside the Safe Region"""
    variants = search_scope_variants(z, m, k, n_p, alpha, tau_h, tau_l, pi_value)
    if not math.isclose(variants["derived"], variants["closed_form"], rel_tol=1e-6):
        logger.debug(
            f"Search scope forms disagree: derived={variants['derived']:.5%} "
            f"closed_form={variants['closed_form']:.5%}"
        )
    return variants["derived"]
