#!/usr/bin/env python3
"""
Index Store
Caches the partition index (assignment, borders, external edges, intra tables)
in SQLite, keyed by the network files' hash
"""

import io
import logging
import sqlite3
from datetime import datetime
from pathlib import Path

import numpy as np

from errors import IndexStoreError
from partition_index import PartitionIndex, Subgraph, build_partition_index

logger = logging.getLogger(__name__)

MAGIC = "KATR-INDEX"
SCHEMA_VERSION = 2


def _to_blob(array):
    buf = io.BytesIO()
    np.save(buf, np.asarray(array), allow_pickle=False)
    return buf.getvalue()


def _from_blob(blob):
    return np.load(io.BytesIO(blob), allow_pickle=False)


def init_database(db_path):
    """Create the index tables if they don't exist"""
    Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(db_path)
    cursor = conn.cursor()

    cursor.execute('''
        CREATE TABLE IF NOT EXISTS meta (
            key TEXT PRIMARY KEY,
            value TEXT
        )
    ''')

    cursor.execute('''
        CREATE TABLE IF NOT EXISTS arrays (
            name TEXT PRIMARY KEY,
            data BLOB
        )
    ''')

    cursor.execute('''
        CREATE TABLE IF NOT EXISTS subgraphs (
            id INTEGER PRIMARY KEY,
            members BLOB,
            borders BLOB,
            intra_dist BLOB,
            intra_pred BLOB
        )
    ''')

    conn.commit()
    return conn


def read_meta(db_path):
    if not Path(db_path).exists():
        return {}
    conn = sqlite3.connect(db_path)
    try:
        rows = conn.execute("SELECT key, value FROM meta").fetchall()
    except sqlite3.Error:
        rows = []
    finally:
        conn.close()
    return dict(rows)


def save_index(db_path, pi, net_hash, seed):
    conn = init_database(db_path)
    try:
        cursor = conn.cursor()
        cursor.execute("DELETE FROM meta")
        cursor.execute("DELETE FROM arrays")
        cursor.execute("DELETE FROM subgraphs")

        meta = {
            "magic": MAGIC,
            "schema_version": str(SCHEMA_VERSION),
            "network_hash": net_hash,
            "partition_size": str(pi.partition_size),
            "seed": str(seed),
            "created_at": datetime.now().isoformat(),
        }
        cursor.executemany("INSERT INTO meta VALUES (?, ?)", meta.items())

        external = np.array(pi.external_edges, dtype=float).reshape(-1, 3)
        cursor.executemany("INSERT INTO arrays VALUES (?, ?)", [
            ("assignment", _to_blob(pi.assignment)),
            ("is_border", _to_blob(pi.is_border)),
            ("external_edges", _to_blob(external)),
        ])
        cursor.executemany("INSERT INTO subgraphs VALUES (?, ?, ?, ?, ?)", [
            (
                sg.id,
                _to_blob(np.array(sg.members, dtype=np.int64)),
                _to_blob(np.array(sg.borders, dtype=np.int64)),
                _to_blob(sg.intra_dist),
                _to_blob(sg.intra_pred),
            )
            for sg in pi.subgraphs
        ])
        conn.commit()
    finally:
        conn.close()
    logger.info(f"Saved partition index ({len(pi.subgraphs)} subgraphs) to {db_path}")


def load_index(db_path, net_hash=None, partition_size=None, seed=None):
    """Load a cached index; None when absent or stale for the given parameters"""
    meta = read_meta(db_path)
    if not meta:
        return None
    if meta.get("magic") != MAGIC:
        raise IndexStoreError(f"{db_path} is not a route index (bad magic header)")
    if meta.get("schema_version") != str(SCHEMA_VERSION):
        raise IndexStoreError(
            f"{db_path} has schema version {meta.get('schema_version')}, expected {SCHEMA_VERSION}"
        )

    expected = {"network_hash": net_hash, "partition_size": partition_size, "seed": seed}
    for key, value in expected.items():
        if value is not None and meta.get(key) != str(value):
            logger.info(f"Cached index is stale ({key} changed), rebuild required")
            return None

    conn = sqlite3.connect(db_path)
    try:
        arrays = dict(conn.execute("SELECT name, data FROM arrays").fetchall())
        rows = conn.execute(
            "SELECT id, members, borders, intra_dist, intra_pred FROM subgraphs ORDER BY id"
        ).fetchall()
    except sqlite3.Error as e:
        raise IndexStoreError(f"Could not read index {db_path}: {e}") from e
    finally:
        conn.close()

    subgraphs = []
    for sg_id, members, borders, dist, pred in rows:
        members = tuple(int(v) for v in _from_blob(members))
        subgraphs.append(Subgraph(
            id=sg_id,
            members=members,
            borders=tuple(int(v) for v in _from_blob(borders)),
            local={v: i for i, v in enumerate(members)},
            intra_dist=_from_blob(dist),
            intra_pred=_from_blob(pred),
        ))

    external = [(int(u), int(v), float(w)) for u, v, w in _from_blob(arrays["external_edges"])]
    pi = PartitionIndex(
        assignment=_from_blob(arrays["assignment"]),
        subgraphs=subgraphs,
        external_edges=external,
        partition_size=int(meta["partition_size"]),
        is_border=_from_blob(arrays["is_border"]),
    )
    logger.info(f"Loaded cached partition index from {db_path}")
    return pi


def load_or_build(db_path, net, net_hash, partition_size, seed=0, workers=1):
    """Return (PartitionIndex, rebuilt) using the cache when it matches"""
    pi = load_index(db_path, net_hash, partition_size, seed)
    if pi is not None and len(pi.assignment) == net.n_vertices:
        return pi, False
    pi = build_partition_index(net, partition_size, seed=seed, workers=workers)
    save_index(db_path, pi, net_hash, seed)
    return pi, True
