"""Bipartite maximum matching with a Hall-violator certificate on failure.

The graph is immutable CSR: one contiguous index array plus per-vertex
offsets, rows strictly ascending.  The solver is Hopcroft-Karp with a fixed
ascending scan order, so identical inputs give bit-identical matchings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .checks import CheckResult


@dataclass(frozen=True)
class BipartiteGraph:
    left_count: int
    right_count: int
    indptr: np.ndarray  # int64, len left_count + 1
    indices: np.ndarray  # int32, ascending within each row

    @staticmethod
    def from_adjacency(adjacency: list[list[int]], right_count: int) -> "BipartiteGraph":
        indptr = np.zeros(len(adjacency) + 1, dtype=np.int64)
        for i, row in enumerate(adjacency):
            indptr[i + 1] = indptr[i] + len(row)
        indices = np.empty(int(indptr[-1]), dtype=np.int32)
        for i, row in enumerate(adjacency):
            indices[indptr[i] : indptr[i + 1]] = sorted(row)
        return BipartiteGraph(len(adjacency), right_count, indptr, indices)

    @property
    def edge_count(self) -> int:
        return int(self.indptr[-1])

    def row(self, l: int) -> np.ndarray:
        return self.indices[self.indptr[l] : self.indptr[l + 1]]

    def validate(self) -> CheckResult:
        if self.indptr.shape[0] != self.left_count + 1:
            return CheckResult.failed("indptr length mismatch")
        if int(self.indptr[0]) != 0 or int(self.indptr[-1]) != self.indices.shape[0]:
            return CheckResult.failed("indptr endpoints mismatch")
        if np.any(np.diff(self.indptr) < 0):
            return CheckResult.failed("indptr not monotone")
        if self.indices.size:
            if int(self.indices.min()) < 0 or int(self.indices.max()) >= self.right_count:
                return CheckResult.failed("right index out of range")
        for l in range(self.left_count):
            row = self.row(l)
            if row.size > 1 and np.any(np.diff(row) <= 0):
                return CheckResult.failed(f"row {l} not strictly ascending")
        return CheckResult.passed()


@dataclass(frozen=True)
class MatchingResult:
    pairs: np.ndarray  # int64, len left_count; -1 where unmatched
    size: int
    violator: np.ndarray | None  # sorted left indices, present iff not perfect

    @property
    def perfect(self) -> bool:
        return self.violator is None

    def as_dict(self) -> dict[int, int]:
        return {int(l): int(r) for l, r in enumerate(self.pairs) if r != -1}


def hopcroft_karp(g: BipartiteGraph, force: str | None = None) -> MatchingResult:
    """Deterministic maximum matching; attaches a Hall violator when imperfect."""
    match_l, match_r, size = kernels.hopcroft_karp_arrays(
        g.indptr, g.indices, g.left_count, g.right_count, force=force
    )
    violator = None
    if size < g.left_count:
        violator = kernels.hall_violator_arrays(g.indptr, g.indices, match_l, match_r, force=force)
    return MatchingResult(match_l, size, violator)


def right_to_left(g: BipartiteGraph, r: MatchingResult) -> np.ndarray:
    """Inverse map right -> left (-1 where unmatched)."""
    inv = np.full(g.right_count, -1, dtype=np.int64)
    matched = r.pairs >= 0
    inv[r.pairs[matched]] = np.flatnonzero(matched)
    return inv


def verify_matching(g: BipartiteGraph, r: MatchingResult) -> CheckResult:
    """Re-check injectivity, edge membership, and any claimed Hall violator."""
    if r.pairs.shape[0] != g.left_count:
        return CheckResult.failed("pairs length != left_count")
    matched = np.flatnonzero(r.pairs >= 0)
    if matched.shape[0] != r.size:
        return CheckResult.failed(f"claimed size {r.size} != matched count {matched.shape[0]}")
    rights = r.pairs[matched]
    if rights.size and (int(rights.min()) < 0 or int(rights.max()) >= g.right_count):
        return CheckResult.failed("matched right index out of range")
    if np.unique(rights).shape[0] != rights.shape[0]:
        return CheckResult.failed("matching not injective")
    for l in matched:
        row = g.row(int(l))
        pos = np.searchsorted(row, r.pairs[l])
        if pos >= row.shape[0] or row[pos] != r.pairs[l]:
            return CheckResult.failed(f"pair ({int(l)}, {int(r.pairs[l])}) is not an edge")
    if r.size < g.left_count:
        if r.violator is None:
            return CheckResult.failed("imperfect matching without a violator")
        neigh: set[int] = set()
        for l in r.violator:
            neigh.update(int(x) for x in g.row(int(l)))
        if len(neigh) >= r.violator.shape[0]:
            return CheckResult.failed(
                f"claimed violator has |N(S)|={len(neigh)} >= |S|={r.violator.shape[0]}"
            )
    elif r.violator is not None:
        return CheckResult.failed("perfect matching carries a violator")
    return CheckResult.passed()
