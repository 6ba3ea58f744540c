"""Edge-walk kernels shared by single-path checks and bulk sweeps.

A path over node numbers 1..n is walked against a dense boolean adjacency
matrix.  The walk stops at the first offence, scanning left to right: the
entry at index i is bounds-checked before the hop (i-1, i) is looked up.

Two interchangeable implementations live here: a numba-compiled loop (the
default) and a vectorized numpy fallback.  Set GRAPHPLAY_PURE_NUMPY=1 to
force the fallback; it is also selected automatically when numba is not
importable.  Both produce bit-identical results; `bench.py` compares their
throughput.
"""

import os

import numpy as np

# walk status codes
VALID = 0
UNKNOWN_NODE = 1
MISSING_EDGE = 2

_PURE_NUMPY_FLAG = "GRAPHPLAY_PURE_NUMPY"


def pack_paths(paths):
    """Pad a list of int sequences into (paths, lengths) int64 arrays."""
    lengths = np.array([len(p) for p in paths], dtype=np.int64)
    width = int(lengths.max()) if len(paths) else 0
    packed = np.zeros((len(paths), max(width, 1)), dtype=np.int64)
    for row, path in enumerate(paths):
        packed[row, : len(path)] = path
    return packed, lengths


def walk_paths_numpy(adj, paths, lengths):
    """Vectorized fallback walk.

    Failure ordering is reproduced by assigning each potential offence a
    timestamp on the scan timeline: entry i fails at max(0, 2i-1), hop
    (i-1, i) fails at 2i.  Entry times are odd (or zero) and hop times even,
    so ties cannot occur and the earliest timestamp is the first offence.
    """
    paths = np.ascontiguousarray(paths, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    count, width = paths.shape
    n = adj.shape[0]
    status = np.zeros(count, dtype=np.int8)
    pos = np.full(count, -1, dtype=np.int64)
    if count == 0:
        return status, pos

    cols = np.arange(width, dtype=np.int64)
    in_len = cols[None, :] < lengths[:, None]
    if n == 0:
        # every entry is out of bounds; the first one offends
        status[:] = UNKNOWN_NODE
        pos[:] = 0
        return status, pos

    entry_bad = ((paths < 1) | (paths > n)) & in_len
    # hop (i-1, i) lives at column i; clip keeps fancy indexing legal when an
    # entry is out of bounds (that entry's earlier timestamp wins anyway)
    a = np.clip(paths[:, :-1], 1, n) - 1
    b = np.clip(paths[:, 1:], 1, n) - 1
    hop_bad = ~adj[a, b] & in_len[:, 1:]

    sentinel = 2 * width + 2
    entry_t = np.where(entry_bad, np.maximum(0, 2 * cols - 1)[None, :], sentinel)
    hop_t = np.where(hop_bad, (2 * cols[1:])[None, :], sentinel)
    first_entry = entry_t.min(axis=1)
    first_hop = hop_t.min(axis=1)

    unknown = first_entry < first_hop
    missing = first_hop < first_entry
    status[unknown & (first_entry < sentinel)] = UNKNOWN_NODE
    status[missing & (first_hop < sentinel)] = MISSING_EDGE
    entry_col = entry_t.argmin(axis=1)
    hop_col = hop_t.argmin(axis=1)  # column i of hop (i-1, i); report i-1
    pos = np.where(status == UNKNOWN_NODE, entry_col, pos)
    pos = np.where(status == MISSING_EDGE, hop_col, pos)
    return status, pos


def _walk_loop(adj, paths, lengths, status, pos):
    n = adj.shape[0]
    for row in range(paths.shape[0]):
        length = lengths[row]
        st = VALID
        at = -1
        for i in range(length):
            v = paths[row, i]
            if v < 1 or v > n:
                st = UNKNOWN_NODE
                at = i
                break
            if i > 0 and not adj[paths[row, i - 1] - 1, v - 1]:
                st = MISSING_EDGE
                at = i - 1
                break
        status[row] = st
        pos[row] = at


try:  # pragma: no cover - exercised through the active backend
    from numba import njit as _njit

    _walk_loop_jit = _njit(cache=True)(_walk_loop)
except ImportError:  # pragma: no cover
    _walk_loop_jit = None


def walk_paths_numba(adj, paths, lengths):
    """Compiled walk; raises if numba is unavailable."""
    if _walk_loop_jit is None:
        raise RuntimeError("numba backend not available")
    paths = np.ascontiguousarray(paths, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    status = np.empty(paths.shape[0], dtype=np.int8)
    pos = np.empty(paths.shape[0], dtype=np.int64)
    _walk_loop_jit(np.ascontiguousarray(adj), paths, lengths, status, pos)
    return status, pos


if _walk_loop_jit is not None and not os.environ.get(_PURE_NUMPY_FLAG):
    ACTIVE_BACKEND = "numba"
    walk_paths = walk_paths_numba
else:
    ACTIVE_BACKEND = "numpy"
    walk_paths = walk_paths_numpy


def walk_path(adj, path):
    """Walk a single path; returns (status, position)."""
    packed, lengths = pack_paths([list(path)])
    status, pos = walk_paths(adj, packed, lengths)
    return int(status[0]), int(pos[0])
