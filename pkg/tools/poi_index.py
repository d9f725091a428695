#!/usr/bin/env python3
"""
POI Inverted Index
Keyword -> POIs sorted by rating, split per subgraph, plus the cumulative-rating
maxima every score bound is built from
"""

import logging
from dataclasses import dataclass

from errors import InapplicableBoundError, UncoverableKeywordError

logger = logging.getLogger(__name__)


def poi_order(p):
    return (-p.rating, p.vertex, p.id)


@dataclass(frozen=True)
class KeywordEntry:
    keyword_id: int
    tag: str
    count: int


@dataclass
class PoiInvertedIndex:
    postings: dict
    per_subgraph: dict
    keyword_catalog: list
    poi_subgraph: dict

    def keywords_of_subgraph(self, sg_id):
        return {kw for (kw, sg) in self.per_subgraph if sg == sg_id}

    def tag_lookup(self):
        return {entry.tag: entry.keyword_id for entry in self.keyword_catalog}


def build_poi_index(net, pi):
    postings = {}
    per_subgraph = {}
    poi_subgraph = {}
    for p in net.pois:
        sg = int(pi.assignment[p.vertex])
        poi_subgraph[p.id] = sg
        postings.setdefault(p.keyword, []).append(p)
        per_subgraph.setdefault((p.keyword, sg), []).append(p)
    for plist in postings.values():
        plist.sort(key=poi_order)
    for plist in per_subgraph.values():
        plist.sort(key=poi_order)

    catalog = [KeywordEntry(kw, net.tag(kw), len(postings[kw])) for kw in sorted(postings)]
    logger.info(f"Indexed {len(net.pois)} POIs over {len(catalog)} keywords")
    return PoiInvertedIndex(postings, per_subgraph, catalog, poi_subgraph)


def _head(plist, exclude):
    for p in plist:
        if not exclude or p.id not in exclude:
            return p
    return None


def best_poi(idx, keyword, restrict=None, exclude=None):
    """Highest-rated POI of keyword inside restrict, skipping excluded ids (None if none)"""
    if restrict is None:
        return _head(idx.postings.get(keyword, ()), exclude)
    best = None
    for sg in restrict:
        p = _head(idx.per_subgraph.get((keyword, sg), ()), exclude)
        if p is not None and (best is None or poi_order(p) < poi_order(best)):
            best = p
    return best


def max_cumulative_rating(idx, keywords, restrict=None, exclude=None, rating_override=None):
    """Sum over keywords of the best available rating: the unconstrained CP-Set maximum"""
    total = 0.0
    for kw in keywords:
        p = best_poi(idx, kw, restrict, exclude)
        if p is None:
            raise UncoverableKeywordError(kw)
        total += p.rating if rating_override is None else rating_override
    return total


def swap_maximum(keywords, best_any, best_forced):
    """max over t of best_forced[t] + sum of best_any[t'] for t' != t"""
    total = sum(best_any[kw] for kw in keywords)
    return max(total - best_any[kw] + best_forced[kw] for kw in best_forced)


def max_cumulative_rating_with_forced_poi(idx, keywords, forced_candidates, restrict=None,
                                          exclude=None, rating_override=None):
    """Best cumulative rating over CP-Sets containing at least one forced candidate"""
    wanted = set(keywords)
    best_forced = {}
    for p in forced_candidates:
        if p.keyword not in wanted:
            continue
        rating = p.rating if rating_override is None else rating_override
        if rating > best_forced.get(p.keyword, float("-inf")):
            best_forced[p.keyword] = rating
    if not best_forced:
        raise InapplicableBoundError("No forced candidate matches the query keywords")

    best_any = {}
    for kw in keywords:
        p = best_poi(idx, kw, restrict, exclude)
        if p is None and kw not in best_forced:
            raise UncoverableKeywordError(kw)
        rating = float("-inf") if p is None else (p.rating if rating_override is None else rating_override)
        best_any[kw] = max(rating, best_forced.get(kw, float("-inf")))
    return swap_maximum(keywords, best_any, best_forced)


def list_poi_tags(idx):
    """Keyword catalog as JSON-ready dicts, ordered by keyword id"""
    return [
        {"keyword_id": e.keyword_id, "tag": e.tag, "count": e.count}
        for e in idx.keyword_catalog
    ]
