#!/usr/bin/env python3
"""
Error types for the route engine
Every failure the engine, index builders and service can signal derives from KatrError
"""


class KatrError(Exception):
    """Base class for all route engine errors"""


class IngestError(KatrError):
    """Malformed line in one of the network text files"""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class NormalizationError(KatrError):
    """Raw network cannot be normalized (empty graph, bad weight, self loop)"""

    def __init__(self, message, edge_index=None):
        self.edge_index = edge_index
        super().__init__(message)


class PartitionError(KatrError):
    pass


class UnknownSubgraphError(KatrError):
    def __init__(self, sg_id):
        self.sg_id = sg_id
        super().__init__(f"Unknown subgraph id {sg_id}")


class UncoverableKeywordError(KatrError):
    """A query keyword has no POI in the searched area, so no route exists"""

    def __init__(self, keyword, message=None):
        self.keyword = keyword
        super().__init__(message or f"Keyword {keyword} has no reachable POI")


class QueryValidationError(KatrError):
    pass


class ZeroAlphaError(KatrError):
    """The Safe Region radius is undefined when alpha is 0"""


class InapplicableBoundError(KatrError):
    """A bound has nothing to constrain (no forced candidate or no unprocessed POI)"""


class OracleGuardError(KatrError):
    def __init__(self, cp_sets, orders, limit):
        self.cp_sets = cp_sets
        self.orders = orders
        self.limit = limit
        super().__init__(
            f"Enumeration too large: {cp_sets} CP-Sets x {orders} orders "
            f"= {cp_sets * orders} > {limit}"
        )


class QueryTimeoutError(KatrError):
    """Query exceeded its deadline; carries the routes found so far"""

    def __init__(self, elapsed, partial_routes):
        self.elapsed = elapsed
        self.partial_routes = partial_routes
        super().__init__(f"Query timed out after {elapsed:.2f}s with {len(partial_routes)} partial routes")


class IndexStoreError(KatrError):
    pass


class GeneratorError(KatrError):
    """Synthetic network parameters cannot produce a valid network"""
