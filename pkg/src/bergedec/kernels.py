"""Hot numeric kernels: colex enumeration, CSR adjacency fill, matching.

Each kernel has a numba @njit build and a pure-numpy fallback producing
bit-identical output.  Selection is by the BERGE_DISABLE_NUMBA environment
variable (any value other than empty/0/false forces the fallback); both
builds stay importable so the bench command can compare them directly.
"""

from __future__ import annotations

import math
import os

import numpy as np

_flag = os.environ.get("BERGE_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false")

try:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # workqueue is fork-safe and present in every numba build
        os.environ["NUMBA_THREADING_LAYER"] = "workqueue"
    from numba import config as _numba_config
    from numba import njit as _njit
    from numba import prange
    from numba import set_num_threads as _numba_set_threads

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    prange = range

USING_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def backend() -> str:
    return "numba" if USING_NUMBA else "numpy"


def set_threads(threads: int) -> None:
    """Bound the worker count for parallel kernels (no-op on the fallback)."""
    if HAVE_NUMBA:
        _numba_set_threads(max(1, min(threads, _numba_config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# colex enumeration of k-sets into a dense (N, k) array


def _colex_fill_impl(n, k, skip, out):
    total_rows = out.shape[0]
    cur = np.empty(k, np.int32)
    for j in range(k):
        cur[j] = j + 1
    si = 0
    row = 0
    rank = 0
    n_skip = skip.shape[0]
    while row < total_rows:
        if si < n_skip and skip[si] == rank:
            si += 1
        else:
            for j in range(k):
                out[row, j] = cur[j]
            row += 1
        rank += 1
        if row >= total_rows:
            break
        # colex successor: bump the lowest non-tight element, reset the prefix
        i = 0
        while i + 1 < k and cur[i] + 1 == cur[i + 1]:
            i += 1
        cur[i] += 1
        for j in range(i):
            cur[j] = j + 1
    return row


def _colex_fill_numpy(n, k, skip, out):
    total = math.comb(n, k)
    ranks = np.arange(total, dtype=np.int64)
    if skip.shape[0]:
        keep = np.ones(total, dtype=bool)
        keep[skip] = False
        ranks = ranks[keep]
    rr = ranks
    for j in range(k, 0, -1):
        table = np.array([math.comb(x, j) for x in range(n)], dtype=np.int64)
        idx = np.searchsorted(table, rr, side="right") - 1
        out[:, j - 1] = idx + 1
        rr = rr - table[idx]
    return out.shape[0]


# ---------------------------------------------------------------------------
# CSR row fill: for each k-set, concatenate the B-elements of its pairs


def _fill_rows_impl(lefts, pa, pb, pair_indptr, pair_indices, indptr, out):
    n_left = lefts.shape[0]
    npairs = pa.shape[0]
    for i in prange(n_left):
        pos = indptr[i]
        for j in range(npairs):
            x = np.int64(lefts[i, pa[j]])
            y = np.int64(lefts[i, pb[j]])
            pr = (y - 1) * (y - 2) // 2 + (x - 1)
            s = pair_indptr[pr]
            e = pair_indptr[pr + 1]
            for t in range(s, e):
                out[pos] = pair_indices[t]
                pos += 1
        out[indptr[i] : indptr[i + 1]].sort()


def _fill_rows_numpy(lefts, pa, pb, pair_indptr, pair_indices, indptr, out):
    n_left = lefts.shape[0]
    counts = pair_indptr[1:] - pair_indptr[:-1]
    max_deg = 1 if n_left == 0 else max(1, int(indptr[-1] // max(1, n_left)) * 4 + 64)
    chunk = max(1, 4_000_000 // max_deg)
    start = 0
    while start < n_left:
        end = min(start + chunk, n_left)
        X = lefts[start:end][:, pa].astype(np.int64)
        Y = lefts[start:end][:, pb].astype(np.int64)
        P = (Y - 1) * (Y - 2) // 2 + (X - 1)
        L = counts[P]
        flat_len = L.ravel()
        tot = int(flat_len.sum())
        if tot:
            starts = pair_indptr[P].ravel()
            ends = np.cumsum(flat_len)
            within = np.arange(tot, dtype=np.int64) - np.repeat(ends - flat_len, flat_len)
            vals = pair_indices[np.repeat(starts, flat_len) + within]
            rowid = np.repeat(
                np.arange(end - start, dtype=np.int64), L.sum(axis=1)
            )
            order = np.lexsort((vals, rowid))
            out[indptr[start] : indptr[end]] = vals[order]
        start = end


def left_degrees(lefts, pa, pb, pair_counts):
    """Row degrees of the pair-containment adjacency (vectorized, chunked)."""
    n_left = lefts.shape[0]
    deg = np.empty(n_left, np.int64)
    chunk = max(1, 4_000_000 // max(1, pa.shape[0]))
    for s in range(0, n_left, chunk):
        e = min(s + chunk, n_left)
        X = lefts[s:e][:, pa].astype(np.int64)
        Y = lefts[s:e][:, pb].astype(np.int64)
        P = (Y - 1) * (Y - 2) // 2 + (X - 1)
        deg[s:e] = pair_counts[P].sum(axis=1)
    return deg


# ---------------------------------------------------------------------------
# Hopcroft-Karp with deterministic ascending scan order


def _hk_impl(indptr, indices, match_l, match_r, dist, q, stack, cursor):
    n_left = match_l.shape[0]
    INF = np.int64(1) << 62
    matched = 0
    while True:
        # BFS layers from the free left vertices
        qt = 0
        for l in range(n_left):
            if match_l[l] == -1:
                dist[l] = 0
                q[qt] = l
                qt += 1
            else:
                dist[l] = INF
        found = INF
        qh = 0
        while qh < qt:
            l = q[qh]
            qh += 1
            if dist[l] >= found:
                continue
            for e in range(indptr[l], indptr[l + 1]):
                r = indices[e]
                l2 = match_r[r]
                if l2 == -1:
                    if found == INF:
                        found = dist[l] + 1
                elif dist[l2] == INF:
                    dist[l2] = dist[l] + 1
                    q[qt] = l2
                    qt += 1
        if found == INF:
            break
        # DFS for a maximal set of shortest augmenting paths
        for l in range(n_left):
            cursor[l] = indptr[l]
        for l0 in range(n_left):
            if match_l[l0] != -1:
                continue
            top = 0
            stack[0] = l0
            while top >= 0:
                l = stack[top]
                moved = False
                while cursor[l] < indptr[l + 1]:
                    e = cursor[l]
                    cursor[l] += 1
                    r = indices[e]
                    l2 = match_r[r]
                    if l2 == -1:
                        if dist[l] + 1 == found:
                            rr = np.int64(r)
                            t = top
                            while t >= 0:
                                ll = stack[t]
                                prev = match_l[ll]
                                match_l[ll] = rr
                                match_r[rr] = ll
                                rr = prev
                                t -= 1
                            matched += 1
                            top = -1
                            moved = True
                            break
                    elif dist[l2] == dist[l] + 1:
                        top += 1
                        stack[top] = l2
                        moved = True
                        break
                if not moved:
                    dist[l] = INF
                    top -= 1
    return matched


def _violator_impl(indptr, indices, match_l, match_r, visited_l, visited_r, q):
    # alternating BFS from free lefts; visited lefts form a Hall violator
    n_left = match_l.shape[0]
    qt = 0
    for l in range(n_left):
        if match_l[l] == -1:
            visited_l[l] = True
            q[qt] = l
            qt += 1
    qh = 0
    while qh < qt:
        l = q[qh]
        qh += 1
        for e in range(indptr[l], indptr[l + 1]):
            r = indices[e]
            if not visited_r[r]:
                visited_r[r] = True
                l2 = match_r[r]
                if l2 != -1 and not visited_l[l2]:
                    visited_l[l2] = True
                    q[qt] = l2
                    qt += 1


# ---------------------------------------------------------------------------
# compiled builds + dispatch

if HAVE_NUMBA:
    _colex_fill_jit = _njit(cache=True)(_colex_fill_impl)
    _fill_rows_jit = _njit(cache=True, parallel=True)(_fill_rows_impl)
    _hk_jit = _njit(cache=True)(_hk_impl)
    _violator_jit = _njit(cache=True)(_violator_impl)
else:  # pragma: no cover
    _colex_fill_jit = None
    _fill_rows_jit = None
    _hk_jit = None
    _violator_jit = None


def _pick(jit_fn, py_fn, force: str | None):
    if force == "numba":
        if jit_fn is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return jit_fn
    if force == "numpy":
        return py_fn
    return jit_fn if USING_NUMBA else py_fn


def colex_lefts(n: int, k: int, skip=None, force: str | None = None) -> np.ndarray:
    """(N, k) int32 array of the k-sets of [n] in colex order minus `skip` ranks."""
    skip_arr = np.asarray([] if skip is None else skip, dtype=np.int64)
    total = math.comb(n, k) - skip_arr.shape[0]
    out = np.empty((total, k), dtype=np.int32)
    if total:
        fn = _pick(_colex_fill_jit, _colex_fill_numpy, force)
        if fn is _colex_fill_numpy:
            _colex_fill_numpy(n, k, skip_arr, out)
        else:
            fn(n, k, skip_arr, out)
    return out


def fill_adjacency(lefts, pa, pb, pair_indptr, pair_indices, indptr, force: str | None = None) -> np.ndarray:
    """CSR `indices` for the containment adjacency, rows ascending."""
    out = np.empty(int(indptr[-1]), dtype=np.int32)
    fn = _pick(_fill_rows_jit, _fill_rows_numpy, force)
    fn(lefts, pa, pb, pair_indptr, pair_indices, indptr, out)
    return out


def hopcroft_karp_arrays(indptr, indices, n_left: int, n_right: int, force: str | None = None):
    """Maximum matching on CSR arrays; returns (match_l, match_r, size)."""
    match_l = np.full(n_left, -1, dtype=np.int64)
    match_r = np.full(n_right, -1, dtype=np.int64)
    dist = np.empty(n_left, dtype=np.int64)
    q = np.empty(max(1, n_left), dtype=np.int64)
    stack = np.empty(max(1, n_left), dtype=np.int64)
    cursor = np.empty(max(1, n_left), dtype=np.int64)
    fn = _pick(_hk_jit, _hk_impl, force)
    size = int(fn(indptr, indices, match_l, match_r, dist, q, stack, cursor))
    return match_l, match_r, size


def hall_violator_arrays(indptr, indices, match_l, match_r, force: str | None = None) -> np.ndarray:
    """Sorted left indices reachable from free lefts by alternating paths."""
    n_left = match_l.shape[0]
    n_right = match_r.shape[0]
    visited_l = np.zeros(n_left, dtype=np.bool_)
    visited_r = np.zeros(n_right, dtype=np.bool_)
    q = np.empty(max(1, n_left), dtype=np.int64)
    fn = _pick(_violator_jit, _violator_impl, force)
    fn(indptr, indices, match_l, match_r, visited_l, visited_r, q)
    return np.flatnonzero(visited_l).astype(np.int64)


def warmup() -> None:
    """Trigger kernel compilation on a tiny instance."""
    lefts = colex_lefts(4, 3)
    pa = np.array([0, 0, 1], dtype=np.int64)
    pb = np.array([1, 2, 2], dtype=np.int64)
    pair_indptr = np.arange(math.comb(4, 2) + 1, dtype=np.int64)
    pair_indices = np.arange(math.comb(4, 2), dtype=np.int32)
    deg = left_degrees(lefts, pa, pb, pair_indptr[1:] - pair_indptr[:-1])
    indptr = np.concatenate(([0], np.cumsum(deg)))
    indices = fill_adjacency(lefts, pa, pb, pair_indptr, pair_indices, indptr)
    ml, mr, _ = hopcroft_karp_arrays(indptr, indices, lefts.shape[0], pair_indices.shape[0])
    hall_violator_arrays(indptr, indices, ml, mr)
