#!/usr/bin/env python3
"""
Partition Index
Splits the road network into size-bounded connected subgraphs, records border
vertices and external edges, and precomputes intra-subgraph distance tables
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from errors import PartitionError, UnknownSubgraphError

logger = logging.getLogger(__name__)


class Partitioner(Protocol):
    def assign(self, net, max_size) -> np.ndarray:
        """Return subgraph id per vertex; each part connected and at most max_size"""


class BfsGrowPartitioner:
    """Seeded BFS-grow: pick an unassigned seed, grow a connected region up to max_size"""

    def __init__(self, seed=0):
        self.seed = seed

    def assign(self, net, max_size):
        n = net.n_vertices
        rng = np.random.default_rng(self.seed)
        order = rng.permutation(n)
        assignment = np.full(n, -1, dtype=np.int64)
        next_id = 0
        for start in order:
            if assignment[start] >= 0:
                continue
            assignment[start] = next_id
            size = 1
            queue = [int(start)]
            head = 0
            while head < len(queue) and size < max_size:
                u = queue[head]
                head += 1
                for v, _ in net.adjacency[u]:
                    if assignment[v] < 0:
                        assignment[v] = next_id
                        queue.append(v)
                        size += 1
                        if size >= max_size:
                            break
            next_id += 1
        return assignment


@dataclass
class Subgraph:
    id: int
    members: tuple
    borders: tuple
    local: dict = field(default_factory=dict)
    intra_dist: np.ndarray = None
    intra_pred: np.ndarray = None

    def dist(self, a, b):
        return float(self.intra_dist[self.local[a], self.local[b]])

    def path(self, a, b):
        """Vertex sequence of the restricted shortest path a -> b (empty if disconnected)"""
        i, j = self.local[a], self.local[b]
        if i == j:
            return [a]
        if not np.isfinite(self.intra_dist[i, j]):
            return []
        seq = [j]
        while seq[-1] != i:
            seq.append(int(self.intra_pred[i, seq[-1]]))
        return [self.members[x] for x in reversed(seq)]


@dataclass
class PartitionIndex:
    assignment: np.ndarray
    subgraphs: list
    external_edges: list
    partition_size: int
    is_border: np.ndarray
    _skeleton: dict = field(default=None, repr=False)

    def subgraph_of(self, v):
        return self.subgraphs[int(self.assignment[v])]

    def skeleton(self):
        """Border adjacency: external edges plus same-subgraph border shortcuts.

        Entries are (neighbor, weight, subgraph id) where subgraph id is -1 for a real
        external edge and the owning subgraph for a shortcut.
        """
        if self._skeleton is None:
            adj = {}
            for sg in self.subgraphs:
                for b in sg.borders:
                    adj.setdefault(b, [])
                for u, v, d in border_shortcuts(self, sg.id):
                    adj[u].append((v, d, sg.id))
                    adj[v].append((u, d, sg.id))
            for u, v, w in self.external_edges:
                adj[u].append((v, w, -1))
                adj[v].append((u, w, -1))
            self._skeleton = adj
        return self._skeleton


def partition(net, partition_size, partitioner=None, seed=0):
    """Assign every vertex to a connected subgraph of at most partition_size vertices"""
    if partition_size < 2:
        raise PartitionError(f"Partition size must be at least 2, got {partition_size}")
    partitioner = partitioner or BfsGrowPartitioner(seed)
    assignment = np.asarray(partitioner.assign(net, partition_size), dtype=np.int64)

    n_parts = int(assignment.max()) + 1
    members = [[] for _ in range(n_parts)]
    for v in range(net.n_vertices):
        members[assignment[v]].append(v)

    is_border = np.zeros(net.n_vertices, dtype=bool)
    external = []
    for e in net.edges:
        if assignment[e.u] != assignment[e.v]:
            external.append((e.u, e.v, e.weight))
            is_border[e.u] = is_border[e.v] = True

    subgraphs = []
    for sg_id, vs in enumerate(members):
        if len(vs) > partition_size:
            raise PartitionError(f"Partitioner produced subgraph {sg_id} of size {len(vs)}")
        subgraphs.append(Subgraph(
            id=sg_id,
            members=tuple(vs),
            borders=tuple(v for v in vs if is_border[v]),
            local={v: i for i, v in enumerate(vs)},
        ))

    logger.info(
        f"Partitioned {net.n_vertices} vertices into {n_parts} subgraphs "
        f"(size <= {partition_size}), {len(external)} external edges"
    )
    return PartitionIndex(assignment, subgraphs, external, partition_size, is_border)


def _intra_tables(net, pi, sg):
    size = len(sg.members)
    rows, cols, data = [], [], []
    for v in sg.members:
        for u, w in net.adjacency[v]:
            if pi.assignment[u] == sg.id:
                rows.append(sg.local[v])
                cols.append(sg.local[u])
                data.append(w)
    graph = csr_matrix((data, (rows, cols)), shape=(size, size))
    dist, pred = dijkstra(graph, directed=True, return_predecessors=True)
    # Reverse-direction sums can differ in the last bit; keep the table symmetric
    dist = np.minimum(dist, dist.T)
    return dist, _smallest_predecessors(dist, pred, rows, cols, data)


def _smallest_predecessors(dist, pred, rows, cols, data):
    """Among equally short predecessors pick the smallest vertex id.

    Members are stored in ascending id order, so the smallest local index is the
    smallest vertex id. Edges are applied from the largest tail down; the last hit wins.
    """
    chosen = pred.astype(np.int64)
    slack = 1e-12 * np.maximum(1.0, np.where(np.isfinite(dist), dist, 1.0))
    for a, b, w in sorted(zip(rows, cols, data), reverse=True):
        hit = (dist[:, a] < dist[:, b]) & (dist[:, a] + w <= dist[:, b] + slack[:, b])
        chosen[hit, b] = a
    return chosen.astype(np.int32)


def build_intra_distances(pi, net, workers=1):
    """Fill intra_dist / intra_pred for every subgraph (restricted to intra-subgraph paths)"""
    def build(sg):
        sg.intra_dist, sg.intra_pred = _intra_tables(net, pi, sg)
        return sg.id

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(build, pi.subgraphs))
    else:
        for sg in pi.subgraphs:
            build(sg)
    pi._skeleton = None
    logger.info(f"Built intra-distance tables for {len(pi.subgraphs)} subgraphs")
    return pi


def border_shortcuts(pi, sg_id):
    """(u, v, distance) for every pair of borders of sg_id with a finite intra distance"""
    if not 0 <= sg_id < len(pi.subgraphs):
        raise UnknownSubgraphError(sg_id)
    sg = pi.subgraphs[sg_id]
    shortcuts = []
    for i, u in enumerate(sg.borders):
        for v in sg.borders[i + 1:]:
            d = sg.dist(u, v)
            if np.isfinite(d):
                shortcuts.append((u, v, d))
    return shortcuts


def build_partition_index(net, partition_size, seed=0, workers=1, partitioner=None):
    pi = partition(net, partition_size, partitioner=partitioner, seed=seed)
    return build_intra_distances(pi, net, workers=workers)
