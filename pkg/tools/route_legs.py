#!/usr/bin/env python3
"""
Pivot Leg Router
Exact shortest distances between route pivots (query vertex, POIs, destination)
using A* over the border skeleton with the calibrated Euclidean heuristic
"""

import heapq
import logging
import math

from graph_core import euclid_lower_bound
from search_graph import expand_hop

logger = logging.getLogger(__name__)


class LegRouter:
    """Per-query leg cache over shared, read-only indexes"""

    def __init__(self, net, pi, heuristic_check=None):
        self.net = net
        self.pi = pi
        self.skeleton = pi.skeleton()
        self.heuristic_check = heuristic_check
        self._cache = {}
        self.computations = 0
        self.expansions = 0

    def leg(self, s, t):
        return self._route(s, t)[0]

    def leg_path(self, s, t):
        """Full vertex sequence of the leg s -> t ([s] when s == t, [] if unreachable)"""
        dist, hops = self._route(s, t)
        if s == t:
            return [s]
        if math.isinf(dist):
            return []
        path = [s]
        for u, v, via in hops:
            path.extend(expand_hop(self.pi, u, v, via)[1:])
        return path

    def route_distance(self, pivots):
        """Sum of legs between consecutive pivots"""
        total = 0.0
        for a, b in zip(pivots, pivots[1:]):
            total += self.leg(a, b)
        return total

    def route_path(self, pivots):
        path = [pivots[0]]
        for a, b in zip(pivots, pivots[1:]):
            path.extend(self.leg_path(a, b)[1:])
        return path

    def _route(self, s, t):
        if s == t:
            return 0.0, []
        key = (s, t)
        if key not in self._cache:
            self.computations += 1
            self._cache[key] = self._astar(s, t)
        return self._cache[key]

    def _neighbors(self, x, s, t, sg_s, sg_t):
        if x == s:
            for b in sg_s.borders:
                if b != s:
                    yield b, sg_s.dist(s, b), sg_s.id
            if sg_s.id == sg_t.id:
                yield t, sg_s.dist(s, t), sg_s.id
        else:
            if sg_t.id == self.pi.assignment[x]:
                yield t, sg_t.dist(x, t), sg_t.id
        if self.pi.is_border[x]:
            yield from self.skeleton.get(x, ())

    def _astar(self, s, t):
        sg_s = self.pi.subgraph_of(s)
        sg_t = self.pi.subgraph_of(t)

        def h(x):
            return euclid_lower_bound(self.net, x, t)

        best = {s: 0.0}
        parent = {}
        heap = [(h(s), 0.0, s)]
        while heap:
            _, g, x = heapq.heappop(heap)
            if g > best[x]:
                continue
            if x == t:
                hops = []
                while x != s:
                    prev, via = parent[x]
                    hops.append((prev, x, via))
                    x = prev
                hops.reverse()
                return g, hops
            self.expansions += 1
            if self.heuristic_check is not None:
                self.heuristic_check(x, t, h(x))
            for y, w, via in self._neighbors(x, s, t, sg_s, sg_t):
                if math.isinf(w):
                    continue
                ng = g + w
                known = best.get(y, math.inf)
                if ng < known:
                    best[y] = ng
                    parent[y] = (x, via)
                    heapq.heappush(heap, (ng + h(y), ng, y))
                elif ng == known and y != s and x < parent[y][0]:
                    # Equal-length alternative: smaller predecessor id wins
                    parent[y] = (x, via)
        return math.inf, []
