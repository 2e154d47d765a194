"""Hamilton decompositions of K_n, K_n minus a perfect matching, and DK_n.

Odd-n decompositions use the classical rotational zig-zag construction; the
complete digraph is handled by direction-doubling for odd n and by seeded
randomized extraction with rollback for even n (impossible for n in {4, 6}).
Every public constructor's output can be re-checked with
verify_ham_decomposition, which shares no code with the constructions.
"""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .checks import CheckResult
from .errors import ImpossibleByTillson, ParseError, SearchExhausted

KIND_ODD = "complete_graph_odd"
KIND_EVEN = "complete_graph_even_minus_matching"
KIND_DIGRAPH = "complete_digraph"

DEFAULT_RESTART_CAP = 1000
ROLLBACKS_PER_VERTEX = 50
NODES_PER_VERTEX = 100


@dataclass(frozen=True)
class HamCycle:
    order: tuple[int, ...]
    directed: bool

    @staticmethod
    def make(seq, directed: bool) -> "HamCycle":
        order = tuple(seq)
        if 1 not in order:
            raise ValueError("cycle must contain vertex 1")
        i = order.index(1)
        rot = order[i:] + order[:i]
        if not directed and len(rot) >= 3 and rot[1] > rot[-1]:
            rot = (rot[0],) + tuple(reversed(rot[1:]))
        return HamCycle(rot, directed)

    @property
    def n(self) -> int:
        return len(self.order)

    def directed_edges(self) -> list[tuple[int, int]]:
        o = self.order
        return [(o[i], o[(i + 1) % len(o)]) for i in range(len(o))]

    def undirected_edges(self) -> list[tuple[int, int]]:
        return [(min(u, v), max(u, v)) for u, v in self.directed_edges()]


@dataclass(frozen=True)
class HamDecomposition:
    n: int
    kind: str
    cycles: tuple[HamCycle, ...]
    leftover_matching: tuple[tuple[int, int], ...] = field(default=())


def _zigzag(start: int, ring: int, steps: int) -> list[int]:
    # start, start+1, start-1, start+2, start-2, ... (mod ring), `steps` entries
    seq = [start % ring]
    t = 1
    while len(seq) < steps:
        seq.append((start + t) % ring)
        if len(seq) < steps:
            seq.append((start - t) % ring)
        t += 1
    return seq


def walecki_decompose(n: int) -> HamDecomposition:
    """Edge-disjoint Hamilton cycles covering K_n exactly (n odd)."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    m = (n - 1) // 2
    ring = n - 1
    cycles = []
    for i in range(m):
        seq = _zigzag(i, ring, ring)
        cycles.append(HamCycle.make([n] + [v + 1 for v in seq], directed=False))
    return HamDecomposition(n, KIND_ODD, tuple(cycles))


def walecki_even_decompose(n: int) -> HamDecomposition:
    """n/2 - 1 Hamilton cycles plus a perfect matching partitioning K_n (n even)."""
    if n < 4 or n % 2 == 1:
        raise ValueError(f"n must be even and >= 4, got {n}")
    m = n // 2
    ring = n - 1
    cycles = []
    for i in range(m - 1):
        seq = _zigzag(i, ring, ring)
        cycles.append(HamCycle.make([n] + [v + 1 for v in seq], directed=False))
    leftover = [(x + 1, n - 1 - x) for x in range(m - 1)] + [(m, n)]
    leftover = sorted((min(a, b), max(a, b)) for a, b in leftover)
    return HamDecomposition(n, KIND_EVEN, tuple(cycles), tuple(leftover))


# ---------------------------------------------------------------------------
# complete digraph


def dk_decompose(
    n: int,
    seed: int = 0,
    cache_dir: str | os.PathLike | None = None,
    restart_cap: int = DEFAULT_RESTART_CAP,
) -> HamDecomposition:
    """n-1 edge-disjoint directed Hamilton cycles partitioning E(DK_n).

    Deterministic for odd n (direction-doubled zig-zag cycles) and a
    deterministic function of (n, seed) for even n (randomized sequential
    extraction with rollback and restarts).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n in (4, 6):
        raise ImpossibleByTillson(n)
    if n % 2 == 1:
        cycles = []
        for c in walecki_decompose(n).cycles:
            cycles.append(HamCycle.make(c.order, directed=True))
            cycles.append(HamCycle.make((c.order[0],) + tuple(reversed(c.order[1:])), directed=True))
        return HamDecomposition(n, KIND_DIGRAPH, tuple(cycles))

    cache_dir = cache_dir if cache_dir is not None else os.environ.get("BERGE_CACHE_DIR")
    if cache_dir:
        cached = _cache_load(Path(cache_dir), n, seed)
        if cached is not None:
            return cached
    dec = _dk_search_even(n, seed, restart_cap)
    if cache_dir:
        _cache_store(Path(cache_dir), dec, seed)
    return dec


def _find_directed_ham_cycle(out_adj, n, rng, node_budget):
    """Randomized backtracking for one Hamilton cycle in the remaining digraph.

    Candidates with the fewest onward moves are tried first (random ties) and
    moves that would strand the walk are pruned, which keeps success cheap on
    thin remainders; the node budget bounds hopeless searches.
    """
    path = [1]
    visited = [False] * (n + 1)
    visited[1] = True
    budget = [node_budget]

    def extend() -> bool:
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        v = path[-1]
        if len(path) == n:
            return 1 in out_adj[v]
        last_slot = len(path) + 1 == n
        cands = []
        for u in out_adj[v]:
            if visited[u]:
                continue
            onward = 0
            for w in out_adj[u]:
                if not visited[w]:
                    onward += 1
            if onward == 0 and not last_slot:
                continue
            cands.append((onward, rng.random(), u))
        cands.sort()
        for _, _, u in cands:
            path.append(u)
            visited[u] = True
            if extend():
                return True
            if budget[0] <= 0:
                return False
            path.pop()
            visited[u] = False
        return False

    if extend():
        return HamCycle.make(path, directed=True)
    return None


def _enumerate_ham_cycles(out_adj, n, rng, node_budget, visit) -> bool:
    """DFS-enumerate Hamilton cycles, calling visit(path) on each; stop when
    visit returns True or the node budget runs out."""
    path = [1]
    visited = [False] * (n + 1)
    visited[1] = True
    budget = [node_budget]

    def extend() -> bool:
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        v = path[-1]
        if len(path) == n:
            return 1 in out_adj[v] and visit(path)
        last_slot = len(path) + 1 == n
        cands = []
        for u in out_adj[v]:
            if visited[u]:
                continue
            onward = 0
            for w in out_adj[u]:
                if not visited[w]:
                    onward += 1
            if onward == 0 and not last_slot:
                continue
            cands.append((onward, rng.random(), u))
        cands.sort()
        for _, _, u in cands:
            path.append(u)
            visited[u] = True
            if extend():
                return True
            path.pop()
            visited[u] = False
            if budget[0] <= 0:
                return False
        return False

    return extend()


def _solve_last_three(out_adj, n, rng, node_budget, candidates_per_pass=800, passes=6):
    """Decompose a 3-in-3-out remainder into three Hamilton cycles.

    Enumerates Hamilton cycles and accepts the first whose complement (a
    2-in-2-out digraph) splits exactly into two more.  Enumeration restarts
    with fresh random tie-breaking between passes, since DFS-adjacent cycles
    share prefixes and reject together; returns None when all passes fail.
    """
    result: list[HamCycle] = []

    for _ in range(passes):
        tried = [0]

        def visit(path) -> bool:
            tried[0] += 1
            succ = {path[i]: path[(i + 1) % n] for i in range(n)}
            comp = {v: out_adj[v] - {succ[v]} for v in range(1, n + 1)}
            pair = _split_two_cycles(comp, n)
            if pair is not None:
                result.append(HamCycle.make(path, directed=True))
                result.extend(pair)
                return True
            return tried[0] >= candidates_per_pass

        _enumerate_ham_cycles(out_adj, n, rng, node_budget, visit)
        if result:
            return result
    return None


def _walk_is_single_cycle(succ, n) -> bool:
    v = 1
    for steps in range(1, n + 1):
        v = succ[v]
        if v == 1:
            return steps == n
    return False


def _split_two_cycles(out_adj, n, max_free_bits: int = 16):
    """Exactly split a 2-in-2-out digraph into two Hamilton cycles, or None.

    Assigning each vertex's two out-edges to the two cycles is a binary
    choice; the in-degree conditions are parity constraints between choices,
    solved by union-find.  Only one bit per constraint component remains
    free, and the constraint graph is 2-regular, so there are few components;
    each assignment is then checked for single-cycledness in O(n).
    """
    a = [0] * (n + 1)
    b = [0] * (n + 1)
    ins: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    for v in range(1, n + 1):
        outs = sorted(out_adj[v])
        if len(outs) != 2:
            return None
        a[v], b[v] = outs
        ins[outs[0]].append((v, 0))
        ins[outs[1]].append((v, 1))

    parent = list(range(n + 1))
    parity = [0] * (n + 1)  # choice XOR choice-of-parent

    def find(x: int) -> tuple[int, int]:
        root = x
        p = 0
        while parent[root] != root:
            p ^= parity[root]
            root = parent[root]
        cur, cur_p = x, p
        while cur != root:
            nxt, nxt_p = parent[cur], cur_p ^ parity[cur]
            parent[cur], parity[cur] = root, cur_p
            cur, cur_p = nxt, nxt_p
        return root, p

    def union(x: int, y: int, rel: int) -> bool:
        rx, px = find(x)
        ry, py = find(y)
        if rx == ry:
            return (px ^ py) == rel
        parent[ry] = rx
        parity[ry] = px ^ py ^ rel
        return True

    for u in range(1, n + 1):
        if len(ins[u]) != 2:
            return None
        (x, dx), (y, dy) = ins[u]
        if not union(x, y, 1 ^ dx ^ dy):
            return None

    root_bit: dict[int, int] = {}
    rel_parity = [0] * (n + 1)
    comp_idx = [0] * (n + 1)
    for v in range(1, n + 1):
        r, p = find(v)
        rel_parity[v] = p
        if r not in root_bit:
            root_bit[r] = len(root_bit)
        comp_idx[v] = root_bit[r]
    if len(root_bit) > max_free_bits:
        return None

    succ0 = [0] * (n + 1)
    succ1 = [0] * (n + 1)
    for mask in range(1 << len(root_bit)):
        for v in range(1, n + 1):
            c = rel_parity[v] ^ (mask >> comp_idx[v] & 1)
            succ0[v] = b[v] if c else a[v]
            succ1[v] = a[v] if c else b[v]
        if _walk_is_single_cycle(succ0, n) and _walk_is_single_cycle(succ1, n):
            path0 = [1]
            path1 = [1]
            for _ in range(n - 1):
                path0.append(succ0[path0[-1]])
                path1.append(succ1[path1[-1]])
            return (
                HamCycle.make(path0, directed=True),
                HamCycle.make(path1, directed=True),
            )
    return None


def _dk_search_even(n: int, seed: int, restart_cap: int) -> HamDecomposition:
    target = n - 1
    rollback_budget = ROLLBACKS_PER_VERTEX * n
    node_budget = NODES_PER_VERTEX * n
    last_rollbacks = 0
    for restart in range(restart_cap + 1):
        rng = random.Random(f"dk:{n}:{seed}:{restart}")
        out_adj = {v: {u for u in range(1, n + 1) if u != v} for v in range(1, n + 1)}
        cycles: list[HamCycle] = []
        rollbacks = 0
        while len(cycles) < target:
            remaining = target - len(cycles)
            found: list[HamCycle] = []
            if remaining == 3:
                triple = _solve_last_three(out_adj, n, rng, 60 * node_budget)
                if triple is not None:
                    found = triple
            elif remaining == 2:
                pair = _split_two_cycles(out_adj, n)
                if pair is not None:
                    found = list(pair)
            else:
                # thin remainders fail often during unwinding; keep that cheap
                budget = node_budget if remaining > 10 else max(10 * n, node_budget // 4)
                cyc = _find_directed_ham_cycle(out_adj, n, rng, budget)
                if cyc is not None:
                    found = [cyc]
            if not found:
                rollbacks += 1
                if not cycles or rollbacks > rollback_budget:
                    break
                prev = cycles.pop()
                for u, v in prev.directed_edges():
                    out_adj[u].add(v)
                continue
            for cyc in found:
                for u, v in cyc.directed_edges():
                    out_adj[u].remove(v)
                cycles.append(cyc)
        last_rollbacks = rollbacks
        if len(cycles) == target:
            return HamDecomposition(n, KIND_DIGRAPH, tuple(cycles))
    raise SearchExhausted(n, seed, restart_cap, last_rollbacks)


# ---------------------------------------------------------------------------
# exhaustive search at the impossibility boundary


@dataclass(frozen=True)
class ExhaustiveSearchCertificate:
    n: int
    exists: bool
    nodes: int
    elapsed_s: float
    cycles: tuple[HamCycle, ...] | None


def prove_impossible_small(n: int) -> ExhaustiveSearchCertificate:
    """Exhaustively decide whether DK_n has a Hamilton decomposition (n <= 7).

    The first cycle is fixed to (1, 2, ..., n): any decomposition can be
    vertex-relabelled so that one of its cycles becomes that canonical cycle,
    so existence is unaffected and the search space shrinks by a factor n!/n.
    """
    if not 2 <= n <= 7:
        raise ValueError("exhaustive search is supported only for n in 2..7")
    t0 = time.perf_counter()
    uncov = {v: set(u for u in range(1, n + 1) if u != v) for v in range(1, n + 1)}
    first = tuple(range(1, n + 1))
    for i in range(n):
        uncov[first[i]].remove(first[(i + 1) % n])
    chosen: list[tuple[int, ...]] = [first]
    nodes = 0

    def cycles_through(v: int, u: int) -> list[tuple[int, ...]]:
        # all Hamilton cycles containing edge v->u, on uncovered edges only
        out: list[tuple[int, ...]] = []
        path = [v, u]
        on_path = {v, u}

        def go() -> None:
            last = path[-1]
            if len(path) == n:
                if v in uncov[last]:
                    out.append(tuple(path))
                return
            for w in sorted(uncov[last]):
                if w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    go()
                    path.pop()
                    on_path.remove(w)

        go()
        return out

    def rec() -> bool:
        nonlocal nodes
        nodes += 1
        pivot = None
        for v in range(1, n + 1):
            if uncov[v]:
                pivot = (v, min(uncov[v]))
                break
        if pivot is None:
            return True
        v, u = pivot
        for cyc in cycles_through(v, u):
            nodes += 1
            for i in range(n):
                uncov[cyc[i]].remove(cyc[(i + 1) % n])
            chosen.append(cyc)
            if rec():
                return True
            chosen.pop()
            for i in range(n):
                uncov[cyc[i]].add(cyc[(i + 1) % n])
        return False

    exists = rec()
    elapsed = time.perf_counter() - t0
    cycles = None
    if exists:
        cycles = tuple(HamCycle.make(c, directed=True) for c in chosen)
    return ExhaustiveSearchCertificate(n, exists, nodes, elapsed, cycles)


# ---------------------------------------------------------------------------


def select_m_cycles(d: HamDecomposition, m: int) -> list[HamCycle]:
    """First m cycles under the canonical order (sorted vertex sequences)."""
    if m > len(d.cycles):
        raise ValueError(f"requested {m} cycles, decomposition has {len(d.cycles)}")
    return sorted(d.cycles, key=lambda c: c.order)[:m]


def verify_ham_decomposition(d: HamDecomposition) -> CheckResult:
    """Independent check of every decomposition invariant."""
    n = d.n
    if n < 2:
        return CheckResult.failed(f"n={n} too small")
    expected_counts = {
        KIND_ODD: (n - 1) // 2 if n % 2 == 1 else -1,
        KIND_EVEN: n // 2 - 1 if n % 2 == 0 else -1,
        KIND_DIGRAPH: n - 1,
    }
    if d.kind not in expected_counts:
        return CheckResult.failed(f"unknown kind {d.kind!r}")
    want = expected_counts[d.kind]
    if want < 0:
        return CheckResult.failed(f"kind {d.kind} incompatible with n={n}")
    if len(d.cycles) != want:
        return CheckResult.failed(f"expected {want} cycles, got {len(d.cycles)}")

    directed = d.kind == KIND_DIGRAPH
    all_vertices = set(range(1, n + 1))
    seen: set[tuple[int, int]] = set()
    for ci, c in enumerate(d.cycles):
        if c.directed != directed:
            return CheckResult.failed(f"cycle {ci} directedness mismatch")
        if len(c.order) != n or set(c.order) != all_vertices:
            return CheckResult.failed(f"cycle {ci} is not a permutation of 1..{n}")
        if c.order[0] != 1:
            return CheckResult.failed(f"cycle {ci} not normalized to start at 1")
        if not directed and n >= 3 and c.order[1] > c.order[-1]:
            return CheckResult.failed(f"cycle {ci} not direction-normalized")
        edges = c.directed_edges() if directed else c.undirected_edges()
        for e in edges:
            if e in seen:
                return CheckResult.failed(f"edge {e} appears in two cycles (second in cycle {ci})")
            seen.add(e)

    if d.kind == KIND_EVEN:
        touched: set[int] = set()
        for a, b in d.leftover_matching:
            e = (min(a, b), max(a, b))
            if e in seen:
                return CheckResult.failed(f"leftover edge {e} also used by a cycle")
            seen.add(e)
            if a in touched or b in touched or a == b:
                return CheckResult.failed("leftover is not a matching")
            touched.update((a, b))
        if touched != all_vertices:
            return CheckResult.failed("leftover matching is not perfect")
    elif d.leftover_matching:
        return CheckResult.failed(f"kind {d.kind} must not carry a leftover matching")

    if directed:
        full = {(u, v) for u in all_vertices for v in all_vertices if u != v}
    else:
        full = {(u, v) for u in all_vertices for v in all_vertices if u < v}
    if seen != full:
        missing = len(full - seen)
        return CheckResult.failed(f"edge cover mismatch: {missing} host edges uncovered")
    return CheckResult.passed()


# ---------------------------------------------------------------------------
# HAMDEC v1 file format


def write_hamdec(d: HamDecomposition, seed: int = 0) -> str:
    lines = [f"HAMDEC v1 n={d.n} kind={d.kind} seed={seed}"]
    for c in d.cycles:
        lines.append("H " + " ".join(str(v) for v in c.order))
    for a, b in d.leftover_matching:
        lines.append(f"L {a}-{b}")
    return "\n".join(lines) + "\n"


def parse_hamdec(text: str) -> tuple[HamDecomposition, int]:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "HAMDEC" or head[1] != "v1":
        raise ParseError(1, f"bad header {lines[0]!r}")
    try:
        fields = dict(p.split("=", 1) for p in head[2:])
        n = int(fields["n"])
        kind = fields["kind"]
        seed = int(fields["seed"])
    except (ValueError, KeyError) as exc:
        raise ParseError(1, f"bad header fields: {exc}") from None
    directed = kind == KIND_DIGRAPH
    cycles: list[HamCycle] = []
    leftover: list[tuple[int, int]] = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("H "):
            try:
                order = tuple(int(t) for t in line[2:].split())
            except ValueError:
                raise ParseError(line_no, "non-integer vertex in cycle") from None
            cycles.append(HamCycle(order, directed))
        elif line.startswith("L "):
            try:
                a, b = (int(t) for t in line[2:].split("-"))
            except ValueError:
                raise ParseError(line_no, "bad leftover edge") from None
            leftover.append((a, b))
        else:
            raise ParseError(line_no, f"unrecognized line {line!r}")
    return HamDecomposition(n, kind, tuple(cycles), tuple(leftover)), seed


def _cache_path(cache_dir: Path, n: int, seed: int) -> Path:
    return cache_dir / f"dk_n{n}_seed{seed}.hamdec"


def _cache_load(cache_dir: Path, n: int, seed: int) -> HamDecomposition | None:
    path = _cache_path(cache_dir, n, seed)
    if not path.is_file():
        return None
    try:
        dec, _ = parse_hamdec(path.read_text(encoding="utf-8"))
    except (ParseError, OSError):
        return None
    if dec.n != n or dec.kind != KIND_DIGRAPH or not verify_ham_decomposition(dec):
        return None
    return dec


def _cache_store(cache_dir: Path, dec: HamDecomposition, seed: int) -> None:
    try:
        cache_dir.mkdir(parents=True, exist_ok=True)
        _cache_path(cache_dir, dec.n, seed).write_text(write_hamdec(dec, seed), encoding="utf-8")
    except OSError:
        pass  # cache is best-effort
