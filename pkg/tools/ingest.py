#!/usr/bin/env python3
"""
Network File Ingestion
Reads and writes the line-oriented text formats (edges, vertices, POIs, tags)
"""

import hashlib
import logging
from pathlib import Path

from errors import IngestError
from graph_core import Edge, Poi, RawNetwork, Vertex

logger = logging.getLogger(__name__)

EDGES_FILE = "edges.txt"
VERTICES_FILE = "vertices.txt"
POIS_FILE = "pois.txt"
TAGS_FILE = "tags.txt"


def _records(path, n_fields, max_split=None):
    """Yield (line_no, fields) for non-comment lines, checking the field count"""
    with open(path) as f:
        for line_no, line in enumerate(f, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            fields = text.split(None, max_split) if max_split else text.split()
            if len(fields) != n_fields:
                raise IngestError(path, line_no, f"expected {n_fields} fields, got {len(fields)}")
            yield line_no, fields


def _parse(path, line_no, cast, value, what):
    try:
        return cast(value)
    except ValueError:
        raise IngestError(path, line_no, f"invalid {what} '{value}'") from None


def read_edges(path):
    edges = []
    for line_no, (u, v, w) in _records(path, 3):
        edges.append(Edge(
            _parse(path, line_no, int, u, "vertex id"),
            _parse(path, line_no, int, v, "vertex id"),
            _parse(path, line_no, float, w, "weight"),
        ))
    return edges


def read_vertices(path):
    vertices = []
    seen = set()
    for line_no, (vid, lon, lat) in _records(path, 3):
        vertex = Vertex(
            _parse(path, line_no, int, vid, "vertex id"),
            _parse(path, line_no, float, lon, "longitude"),
            _parse(path, line_no, float, lat, "latitude"),
        )
        if vertex.id in seen:
            raise IngestError(path, line_no, f"duplicate vertex id {vertex.id}")
        seen.add(vertex.id)
        vertices.append(vertex)
    return vertices


def read_pois(path):
    pois = []
    for line_no, (vid, kw, rating) in _records(path, 3):
        pois.append(Poi(
            len(pois),
            _parse(path, line_no, int, vid, "vertex id"),
            _parse(path, line_no, int, kw, "keyword id"),
            _parse(path, line_no, float, rating, "rating"),
        ))
    return pois


def read_tags(path):
    tags = {}
    for line_no, (kw, tag) in _records(path, 2, max_split=1):
        tags[_parse(path, line_no, int, kw, "keyword id")] = tag.strip()
    return tags


def network_paths(directory):
    directory = Path(directory)
    return {
        "edges": directory / EDGES_FILE,
        "vertices": directory / VERTICES_FILE,
        "pois": directory / POIS_FILE,
        "tags": directory / TAGS_FILE,
    }


def load_raw_network(directory):
    """Read a network directory; the tags file is optional"""
    paths = network_paths(directory)
    for name in ("edges", "vertices", "pois"):
        if not paths[name].exists():
            raise IngestError(paths[name], 0, "file not found")

    raw = RawNetwork(
        vertices=read_vertices(paths["vertices"]),
        edges=read_edges(paths["edges"]),
        pois=read_pois(paths["pois"]),
        tags=read_tags(paths["tags"]) if paths["tags"].exists() else {},
    )
    logger.info(
        f"Read {len(raw.vertices)} vertices, {len(raw.edges)} edges, "
        f"{len(raw.pois)} POIs from {directory}"
    )
    return raw


def write_raw_network(raw, directory):
    """Write a RawNetwork in the text formats (floats written with repr so they round-trip)"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = network_paths(directory)

    with open(paths["vertices"], "w") as f:
        f.write("# id lon lat\n")
        for v in raw.vertices:
            f.write(f"{v.id} {v.lon!r} {v.lat!r}\n")
    with open(paths["edges"], "w") as f:
        f.write("# u v weight\n")
        for e in raw.edges:
            f.write(f"{e.u} {e.v} {e.weight!r}\n")
    with open(paths["pois"], "w") as f:
        f.write("# vertex_id keyword_id rating\n")
        for p in raw.pois:
            f.write(f"{p.vertex} {p.keyword} {p.rating!r}\n")
    if raw.tags:
        with open(paths["tags"], "w") as f:
            f.write("# keyword_id tag\n")
            for kw in sorted(raw.tags):
                f.write(f"{kw} {raw.tags[kw]}\n")
    logger.info(f"Wrote network files to {directory}")
    return paths


def network_hash(directory):
    """sha256 over the network files, used to invalidate cached indexes"""
    digest = hashlib.sha256()
    for name, path in sorted(network_paths(directory).items()):
        if path.exists():
            digest.update(name.encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()
