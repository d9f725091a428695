#!/usr/bin/env python3
"""
Search Graph
Query-specific overlay: subgraphs holding km-POIs are kept whole, the rest
collapse to their border vertices joined by intra-subgraph shortcuts
"""

import heapq
import logging
import math
from dataclasses import dataclass, field

from errors import UncoverableKeywordError
from partition_index import border_shortcuts

logger = logging.getLogger(__name__)

# Adjacency entries are (neighbor, weight, via); via is REAL_EDGE for an original
# edge, otherwise the id of the subgraph whose intra table expands the shortcut
REAL_EDGE = -1


@dataclass
class SearchGraph:
    v_q: int
    destination: object
    relevant: frozenset
    adjacency: dict
    km_pois: dict
    pois_at: dict
    subgraph_pois: dict = field(default_factory=dict)

    @property
    def vertex_count(self):
        return len(self.adjacency)

    def has_vertex(self, v):
        return v in self.adjacency

    def is_shortcut(self, via):
        return via != REAL_EDGE


def _add(adjacency, u, v, w, via):
    adjacency.setdefault(u, []).append((v, w, via))
    adjacency.setdefault(v, []).append((u, w, via))


def build_search_graph(net, pi, idx, q):
    """Build the overlay for query q (needs q.v_q, q.keywords, q.destination)"""
    km_pois = {}
    for kw in q.keywords:
        plist = idx.postings.get(kw)
        if not plist:
            raise UncoverableKeywordError(kw, f"Keyword {kw} has no POI in the network")
        km_pois[kw] = plist

    pois_at = {}
    subgraph_pois = {}
    for plist in km_pois.values():
        for p in plist:
            pois_at.setdefault(p.vertex, []).append(p)
            subgraph_pois.setdefault(idx.poi_subgraph[p.id], []).append(p)
    for plist in pois_at.values():
        plist.sort(key=lambda p: p.id)
    relevant = frozenset(subgraph_pois)

    adjacency = {}
    for sg in pi.subgraphs:
        if sg.id in relevant:
            for v in sg.members:
                adjacency.setdefault(v, [])
                for u, w in net.adjacency[v]:
                    if pi.assignment[u] == sg.id:
                        adjacency[v].append((u, w, REAL_EDGE))
        else:
            for b in sg.borders:
                adjacency.setdefault(b, [])
            for u, v, d in border_shortcuts(pi, sg.id):
                _add(adjacency, u, v, d, sg.id)

    # External edges are kept even between two irrelevant subgraphs
    for u, v, w in pi.external_edges:
        _add(adjacency, u, v, w, REAL_EDGE)

    anchors = [a for a in (q.v_q, q.destination) if a is not None]
    for a in dict.fromkeys(anchors):
        if a in adjacency:
            continue
        sg = pi.subgraph_of(a)
        adjacency[a] = []
        for b in sg.borders:
            d = sg.dist(a, b)
            if math.isfinite(d):
                _add(adjacency, a, b, d, sg.id)
    if len(anchors) == 2 and anchors[0] != anchors[1]:
        a, b = anchors
        sg = pi.subgraph_of(a)
        if sg.id not in relevant and pi.assignment[b] == sg.id and math.isfinite(sg.dist(a, b)):
            _add(adjacency, a, b, sg.dist(a, b), sg.id)

    graph = SearchGraph(q.v_q, q.destination, relevant, adjacency, km_pois, pois_at, subgraph_pois)
    logger.debug(
        f"Search graph: {len(relevant)}/{len(pi.subgraphs)} relevant subgraphs, "
        f"{graph.vertex_count}/{net.n_vertices} vertices"
    )
    return graph


def expand_hop(pi, u, v, via):
    """Vertex sequence u..v for one overlay hop, unpacking shortcuts"""
    if via == REAL_EDGE:
        return [u, v]
    return pi.subgraphs[via].path(u, v)


def search_graph_dijkstra(sg, source):
    """Distances from source over the overlay, plus the settle order"""
    dist = {source: 0.0}
    order = []
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        order.append(u)
        for v, w, _ in sg.adjacency[u]:
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist, order


def search_graph_distance(sg, s, t):
    dist, _ = search_graph_dijkstra(sg, s)
    return dist.get(t, math.inf)
