"""Decompose the complete k-uniform hypergraph minus M into Hamilton Berge cycles.

Pipeline for 3 <= k <= n-3: fix a Hamilton decomposition of the complete
digraph and m extra directed Hamilton cycles, lay their edges out as the
right-hand class B (one block per digraph copy, split into the tail<head
half and its reverses, then the extra cycles), connect each remaining k-set
to every B-edge it contains, find a perfect matching, and read each Berge
cycle off a Hamilton cycle by replacing its edges with their matched k-sets.
k = n-1 is a single explicit cycle; k = n-2 runs the same matching pipeline
over undirected Hamilton cycles of K_n.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .combinat import Family, KSet, colex_rank, format_kset
from .errors import (
    ConstructionCheckError,
    DivisibilityError,
    MatchingInfeasible,
    OutsideProvenRangeWarning,
    SizeCapError,
)
from .hamdec import HamCycle, HamDecomposition, dk_decompose, select_m_cycles, walecki_decompose, walecki_even_decompose
from .matching import BipartiteGraph, MatchingResult, hopcroft_karp, right_to_left

SIZE_CAP_DEFAULT = 5_000_000
# CSR edge budget scales with the k-set cap; 40x keeps int32 indices under ~1 GB
EDGE_CAP_FACTOR = 40


@dataclass(frozen=True)
class Parameters:
    n: int
    k: int
    m_set_size: int
    ell: int
    m: int

    @property
    def remaining(self) -> int:
        return math.comb(self.n, self.k) - self.m_set_size

    @property
    def cycle_count(self) -> int:
        return self.remaining // self.n


@dataclass(frozen=True)
class BElement:
    block: tuple[str, int]  # ("B", i) | ("Bprime", i) | ("H", j)
    edge: tuple[int, int]
    index: int


class BSide(Sequence):
    """Array-backed canonical layout of the right-hand class B."""

    def __init__(self, n, directed, tails, heads, block_kind, block_idx):
        self.n = n
        self.directed = directed
        self.tails = tails
        self.heads = heads
        self.block_kind = block_kind  # 0 = B, 1 = Bprime, 2 = H
        self.block_idx = block_idx

    _KIND_NAMES = ("B", "Bprime", "H")

    def __len__(self) -> int:
        return self.tails.shape[0]

    def __getitem__(self, i: int) -> BElement:
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        return BElement(
            (self._KIND_NAMES[int(self.block_kind[i])], int(self.block_idx[i])),
            (int(self.tails[i]), int(self.heads[i])),
            i,
        )

    def pair_ranks(self) -> np.ndarray:
        """Colex rank of the unordered pair under each element, as int64."""
        lo = np.minimum(self.tails, self.heads).astype(np.int64)
        hi = np.maximum(self.tails, self.heads).astype(np.int64)
        return (hi - 1) * (hi - 2) // 2 + (lo - 1)


@dataclass(frozen=True)
class BergeCycle:
    vertices: tuple[int, ...]
    edges: tuple[KSet, ...]


@dataclass(frozen=True)
class Decomposition:
    n: int
    k: int
    m_set: Family
    cycles: tuple[BergeCycle, ...]
    seed: int
    provenance: str  # case marker: 1 | 2 | 3a | 3b

    @property
    def m_members(self) -> tuple[KSet, ...]:
        return self.m_set.members

    @property
    def case(self) -> str:
        return self.provenance


# ---------------------------------------------------------------------------
# parameters and M


def compute_parameters(n: int, k: int, m_set_size: int) -> Parameters:
    """Split C(n,k) - |M| as ell*n*(n-1) + m*n, exactly."""
    if not 3 <= k < n:
        raise ValueError(f"need 3 <= k < n, got k={k}, n={n}")
    if m_set_size >= n or m_set_size < 0:
        raise ValueError(f"|M| must be in 0..{n - 1}, got {m_set_size}")
    total = math.comb(n, k)
    remaining = total - m_set_size
    if remaining % n != 0:
        raise DivisibilityError(n, k, m_set_size, remaining % n, total % n)
    ell = remaining // (n * (n - 1))
    m = (remaining - ell * n * (n - 1)) // n
    assert 0 <= m < n - 1 and remaining == ell * n * (n - 1) + m * n
    return Parameters(n, k, m_set_size, ell, m)


def choose_default_M(n: int, k: int) -> Family:
    """The canonical M of the unique admissible size C(n,k) mod n.

    Colex-initial k-sets for k >= 4; for k = 3 a nonzero remainder forces
    3 | n with remainder n/3, covered by the perfect matching 123, 456, ...
    """
    if not 3 <= k < n:
        raise ValueError(f"need 3 <= k < n, got k={k}, n={n}")
    r = math.comb(n, k) % n
    if r == 0:
        return Family.empty(n, k)
    if k == 3:
        if n % 3 != 0 or r != n // 3:
            raise AssertionError(
                f"k=3 remainder {r} is not n/3={n // 3}; arithmetic invariant broke"
            )
        triples = [(3 * i + 1, 3 * i + 2, 3 * i + 3) for i in range(n // 3)]
        return Family.from_iterable(n, 3, triples)
    members = []
    gen = kernels.colex_lefts(n, k)[:r]
    for row in gen:
        members.append(tuple(int(v) for v in row))
    return Family.from_iterable(n, k, members)


def in_proven_range(n: int, k: int, m_set: Family) -> bool:
    """Whether (n, k, M) falls in the ranges with a success guarantee."""
    if k >= 5 and n >= 20:
        return True
    if k == 4 and n >= 30:
        return True
    if k == 3 and n >= 100:
        if len(m_set) == 0:
            return math.comb(n, 3) % n == 0
        return _is_perfect_matching(n, m_set)
    return False


def _is_perfect_matching(n: int, m_set: Family) -> bool:
    if m_set.k != 3 or len(m_set) * 3 != n:
        return False
    covered: set[int] = set()
    for s in m_set:
        covered.update(s)
    return len(covered) == n


# ---------------------------------------------------------------------------
# the B side


def build_B(p: Parameters, dk_decomps: Sequence[HamDecomposition], h_cycles: Sequence[HamCycle]) -> BSide:
    """Canonical B layout: each digraph copy (tail<head block then reverses),
    then the extra Hamilton cycles, edges ascending within each block."""
    n = p.n
    if len(dk_decomps) != p.ell:
        raise ValueError(f"need {p.ell} digraph decompositions, got {len(dk_decomps)}")
    if len(h_cycles) != p.m:
        raise ValueError(f"need {p.m} extra cycles, got {len(h_cycles)}")
    directed = all(c.directed for c in h_cycles) if h_cycles else True
    if h_cycles and any(c.directed != directed for c in h_cycles):
        raise ValueError("extra cycles mix directed and undirected")
    seen: set[tuple[int, int]] = set()
    for c in h_cycles:
        for e in c.directed_edges() if directed else c.undirected_edges():
            if e in seen:
                raise ValueError(f"extra cycles are not edge-disjoint at {e}")
            seen.add(e)

    tails: list[int] = []
    heads: list[int] = []
    kinds: list[int] = []
    idxs: list[int] = []
    lt = [(x, y) for x in range(1, n + 1) for y in range(x + 1, n + 1)]
    gt = [(y, x) for x, y in lt]
    gt.sort()
    for i in range(1, p.ell + 1):
        for t, h in lt:
            tails.append(t)
            heads.append(h)
            kinds.append(0)
            idxs.append(i)
        for t, h in gt:
            tails.append(t)
            heads.append(h)
            kinds.append(1)
            idxs.append(i)
    for j, c in enumerate(h_cycles, start=1):
        edges = sorted(c.directed_edges() if directed else c.undirected_edges())
        for t, h in edges:
            tails.append(t)
            heads.append(h)
            kinds.append(2)
            idxs.append(j)

    b = BSide(
        n,
        directed,
        np.array(tails, dtype=np.int32),
        np.array(heads, dtype=np.int32),
        np.array(kinds, dtype=np.int8),
        np.array(idxs, dtype=np.int32),
    )
    if len(b) != p.remaining:
        raise ValueError(f"|B| = {len(b)} != C(n,k) - |M| = {p.remaining}")
    return b


# ---------------------------------------------------------------------------
# auxiliary bipartite graph


def _pair_columns(k: int) -> tuple[np.ndarray, np.ndarray]:
    prs = list(itertools.combinations(range(k), 2))
    pa = np.array([a for a, _ in prs], dtype=np.int64)
    pb = np.array([b for _, b in prs], dtype=np.int64)
    return pa, pb


def _aux_csr_from_lefts(n, k, lefts, b: BSide, threads=1, force=None) -> BipartiteGraph:
    kernels.set_threads(threads)
    pa, pb = _pair_columns(k)
    n_pairs = math.comb(n, 2)
    b_pairs = b.pair_ranks()
    order = np.argsort(b_pairs, kind="stable").astype(np.int32)
    counts = np.bincount(b_pairs, minlength=n_pairs).astype(np.int64)
    pair_indptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    deg = kernels.left_degrees(lefts, pa, pb, counts)
    indptr = np.concatenate(([0], np.cumsum(deg))).astype(np.int64)
    indices = kernels.fill_adjacency(lefts, pa, pb, pair_indptr, order, indptr, force=force)
    return BipartiteGraph(lefts.shape[0], len(b), indptr, indices)


def build_aux_graph(a_star, b: BSide, threads: int = 1, force: str | None = None) -> BipartiteGraph:
    """Containment adjacency between k-sets (left, colex order) and B (right)."""
    if isinstance(a_star, Family):
        n, k = a_star.n, a_star.k
        lefts = np.array(a_star.members, dtype=np.int32).reshape(len(a_star), k)
    else:
        lefts = np.asarray(a_star, dtype=np.int32)
        k = lefts.shape[1]
        n = b.n
    if lefts.shape[0] != len(b):
        raise ValueError(f"class sizes differ: {lefts.shape[0]} k-sets vs {len(b)} B-elements")
    return _aux_csr_from_lefts(n, k, lefts, b, threads=threads, force=force)


# ---------------------------------------------------------------------------
# assembly


def _copy_position_tables(n: int) -> dict[tuple[int, int], int]:
    lt = [(x, y) for x in range(1, n + 1) for y in range(x + 1, n + 1)]
    gt = sorted((y, x) for x, y in lt)
    pos = {e: i for i, e in enumerate(lt)}
    half = len(lt)
    pos.update({e: half + i for i, e in enumerate(gt)})
    return pos


def assemble_cycles(
    p: Parameters,
    matching: MatchingResult,
    dk_decomps: Sequence[HamDecomposition],
    h_cycles: Sequence[HamCycle],
    a_star,
    *,
    m_set: Family | None = None,
    seed: int = 0,
    provenance: str = "1",
    graph: BipartiteGraph | None = None,
) -> Decomposition:
    """Walk every Hamilton cycle, replacing each edge by its matched k-set."""
    if matching.violator is not None or matching.size < p.remaining:
        raise MatchingInfeasible(
            matching.violator if matching.violator is not None else np.array([], dtype=np.int64),
            matching.size,
            p.remaining,
        )
    n = p.n
    if isinstance(a_star, Family):
        lefts = np.array(a_star.members, dtype=np.int32).reshape(len(a_star), p.k)
    else:
        lefts = np.asarray(a_star, dtype=np.int32)
    if graph is None:
        inv = np.empty(p.remaining, dtype=np.int64)
        inv[matching.pairs] = np.arange(p.remaining, dtype=np.int64)
    else:
        inv = right_to_left(graph, matching)

    directed = not h_cycles or h_cycles[0].directed
    copy_size = n * (n - 1)
    pos_in_copy = _copy_position_tables(n) if p.ell else {}
    h_offset = p.ell * copy_size

    def kset_of(b_index: int) -> KSet:
        left = int(inv[b_index])
        return tuple(int(v) for v in lefts[left])

    cycles: list[BergeCycle] = []
    for i in range(p.ell):
        base = i * copy_size
        for ham in dk_decomps[i].cycles:
            edges = [kset_of(base + pos_in_copy[e]) for e in ham.directed_edges()]
            cycles.append(BergeCycle(ham.order, tuple(edges)))
    for j, ham in enumerate(h_cycles):
        walk = ham.directed_edges() if directed else ham.undirected_edges()
        block = sorted(walk)
        pos = {e: h_offset + j * n + t for t, e in enumerate(block)}
        edges = [kset_of(pos[e]) for e in walk]
        cycles.append(BergeCycle(ham.order, tuple(edges)))

    m_set = m_set if m_set is not None else Family.empty(n, p.k)
    return Decomposition(n, p.k, m_set, tuple(cycles), seed, provenance)


# ---------------------------------------------------------------------------
# case 3a: k = n-1


def single_cycle_n_minus_1(n: int, seed: int = 0) -> Decomposition:
    """The whole hypergraph as one Berge cycle: edge t omits vertex t+2."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    verts = tuple(range(1, n + 1))
    edges = []
    for t in range(n):
        omit = verts[(t + 2) % n]
        edges.append(tuple(v for v in verts if v != omit))
    cycle = BergeCycle(verts, tuple(edges))
    return Decomposition(n, n - 1, Family.empty(n, n - 1), (cycle,), seed, "3a")


# ---------------------------------------------------------------------------
# top-level dispatch


def _validate_m(n: int, k: int, m_set: Family) -> Family:
    if m_set.n != n or m_set.k != k:
        raise ValueError(f"M is over ({m_set.n},{m_set.k}), instance is ({n},{k})")
    if len(m_set) >= n:
        raise ValueError(f"|M| = {len(m_set)} must be < n = {n}")
    return m_set


def decompose(
    n: int,
    k: int,
    m_set: Family | None = None,
    seed: int = 0,
    cap: int = SIZE_CAP_DEFAULT,
    warn_range: bool = True,
    threads: int = 1,
    verify_output: bool = True,
) -> Decomposition:
    """Construct and certify a Hamilton Berge cycle decomposition of the
    complete k-uniform hypergraph on n vertices minus M."""
    if not 3 <= k < n:
        raise ValueError(f"need 3 <= k < n, got k={k}, n={n}")
    total = math.comb(n, k)
    if total > cap:
        raise SizeCapError(
            f"C({n},{k}) = {total} exceeds the cap of {cap} k-sets; "
            f"raise --cap to override"
        )
    m_set = choose_default_M(n, k) if m_set is None else _validate_m(n, k, m_set)
    p = compute_parameters(n, k, len(m_set))
    if warn_range and not in_proven_range(n, k, m_set):
        warnings.warn(
            f"(n={n}, k={k}, |M|={len(m_set)}) is outside the ranges where the "
            f"construction is guaranteed; it may fail with a Hall certificate",
            OutsideProvenRangeWarning,
            stacklevel=2,
        )
    edge_upper = p.remaining * math.comb(n - 2, k - 2)
    edge_cap = EDGE_CAP_FACTOR * cap
    if k <= n - 2 and edge_upper > edge_cap:
        raise SizeCapError(
            f"auxiliary graph needs ~{edge_upper} edges, over the budget of "
            f"{edge_cap}; raise --cap to override"
        )

    if k == n - 1:
        dec = single_cycle_n_minus_1(n, seed)
    elif k == n - 2:
        dec = _decompose_case3b(p, m_set, seed, threads)
    else:
        dec = _decompose_general(p, m_set, seed, threads)

    if verify_output:
        from . import verify

        report = verify.verify_decomposition(dec)
        if not report.ok:
            raise ConstructionCheckError(report.violation)
    return dec


def _decompose_case3b(p: Parameters, m_set: Family, seed: int, threads: int) -> Decomposition:
    n = p.n
    if n % 2 == 1:
        hs = list(walecki_decompose(n).cycles)
    else:
        hs = list(walecki_even_decompose(n).cycles)
    if p.ell != 0 or p.m != len(hs):
        raise AssertionError(f"case 3b expects ell=0, m={len(hs)}; got {p}")
    m_ranks = sorted(colex_rank(s) for s in m_set)
    lefts = kernels.colex_lefts(n, p.k, skip=m_ranks)
    b = build_B(p, [], hs)
    g = _aux_csr_from_lefts(n, p.k, lefts, b, threads=threads)
    res = hopcroft_karp(g)
    return assemble_cycles(
        p, res, [], hs, lefts, m_set=m_set, seed=seed, provenance="3b", graph=g
    )


def _decompose_general(p: Parameters, m_set: Family, seed: int, threads: int) -> Decomposition:
    n = p.n
    dk = dk_decompose(n, seed)
    hs = select_m_cycles(dk, p.m)
    copies = [dk] * p.ell
    m_ranks = sorted(colex_rank(s) for s in m_set)
    lefts = kernels.colex_lefts(n, p.k, skip=m_ranks)
    b = build_B(p, copies, hs)
    g = _aux_csr_from_lefts(n, p.k, lefts, b, threads=threads)
    res = hopcroft_karp(g)
    case = "2" if p.k == 3 else "1"
    return assemble_cycles(
        p, res, copies, hs, lefts, m_set=m_set, seed=seed, provenance=case, graph=g
    )


# ---------------------------------------------------------------------------
# HBD v1 serialization (the verifier owns parsing)


def format_decomposition(d: Decomposition) -> str:
    lines = [
        "HBD v1",
        f"n={d.n} k={d.k} msize={len(d.m_set)} cycles={len(d.cycles)} "
        f"seed={d.seed} case={d.provenance}",
    ]
    if len(d.m_set):
        lines.append("M " + " ".join(format_kset(s) for s in d.m_set.members))
    for c in d.cycles:
        toks: list[str] = []
        for v, e in zip(c.vertices, c.edges):
            toks.append(str(v))
            toks.append(format_kset(e))
        lines.append("C " + " ".join(toks))
    return "\n".join(lines) + "\n"
