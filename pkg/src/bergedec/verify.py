"""Independent certificate checking for decomposition files.

Everything here re-derives its facts from scratch: parsing, ranking, and
coverage use local helpers only, so a constructor bug cannot hide behind a
shared code path.  The only shared pieces are the k-set token format and
plain result containers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .checks import CheckResult
from .errors import ParseError

HBD_CASES = ("1", "2", "3a", "3b")
HAMDEC_KINDS = ("complete_graph_odd", "complete_graph_even_minus_matching", "complete_digraph")


def _rank_colex(s: tuple[int, ...], comb_col) -> int:
    # comb_col[i][v] = C(v, i+1); local table, independent of the library rank
    r = 0
    for i, v in enumerate(s):
        r += comb_col[i][v - 1]
    return r


def _comb_columns(n: int, k: int) -> list[list[int]]:
    return [[math.comb(v, i + 1) for v in range(n + 1)] for i in range(k)]


@dataclass(frozen=True)
class ParsedCycle:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ParsedDecomposition:
    n: int
    k: int
    msize: int
    declared_cycles: int
    seed: int
    case: str
    m_members: tuple[tuple[int, ...], ...]
    cycles: tuple[ParsedCycle, ...]


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    violation: str | None
    cycles_checked: int

    def __bool__(self) -> bool:
        return self.ok


def _parse_int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line_no, f"{what} is not an integer: {token!r}") from None


def _parse_set_token(token: str, line_no: int) -> tuple[int, ...]:
    parts = token.split("-")
    if not all(parts):
        raise ParseError(line_no, f"malformed set token {token!r}")
    return tuple(_parse_int(p, line_no, "set element") for p in parts)


def parse_hbd(text: str) -> ParsedDecomposition:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "HBD v1":
        raise ParseError(1, "expected header 'HBD v1'")
    if len(lines) < 2:
        raise ParseError(2, "missing parameter line")
    fields: dict[str, str] = {}
    for tok in lines[1].split():
        if "=" not in tok:
            raise ParseError(2, f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        fields[key] = val
    for key in ("n", "k", "msize", "cycles", "seed", "case"):
        if key not in fields:
            raise ParseError(2, f"missing field {key}")
    n = _parse_int(fields["n"], 2, "n")
    k = _parse_int(fields["k"], 2, "k")
    msize = _parse_int(fields["msize"], 2, "msize")
    declared = _parse_int(fields["cycles"], 2, "cycles")
    seed = _parse_int(fields["seed"], 2, "seed")
    case = fields["case"]
    if case not in HBD_CASES:
        raise ParseError(2, f"unknown case marker {case!r}")

    m_members: tuple[tuple[int, ...], ...] = ()
    cycles: list[ParsedCycle] = []
    for line_no, raw in enumerate(lines[2:], start=3):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("M "):
            if m_members:
                raise ParseError(line_no, "duplicate M line")
            m_members = tuple(_parse_set_token(t, line_no) for t in line[2:].split())
        elif line.startswith("C "):
            toks = line[2:].split()
            if len(toks) != 2 * n:
                raise ParseError(
                    line_no, f"cycle line has {len(toks)} tokens, expected {2 * n}"
                )
            verts = tuple(_parse_int(toks[2 * i], line_no, "vertex") for i in range(n))
            edges = tuple(_parse_set_token(toks[2 * i + 1], line_no) for i in range(n))
            cycles.append(ParsedCycle(verts, edges))
        else:
            raise ParseError(line_no, f"unrecognized line {line.split(' ', 1)[0]!r}")
    return ParsedDecomposition(n, k, msize, declared, seed, case, m_members, tuple(cycles))


def _check_kset(s: tuple[int, ...], n: int, k: int) -> str | None:
    if len(s) != k:
        return f"set {s} has {len(s)} elements, expected {k}"
    prev = 0
    for v in s:
        if not 1 <= v <= n:
            return f"set element {v} out of range 1..{n}"
        if v <= prev:
            return f"set {s} is not strictly increasing"
        prev = v
    return None


def verify_berge_cycle(cycle, n: int, k: int) -> CheckResult:
    """Check one alternating cycle: vertex permutation, edge validity and
    distinctness, and cyclic containment of consecutive vertex pairs."""
    verts = tuple(cycle.vertices)
    edges = tuple(tuple(e) for e in cycle.edges)
    if len(verts) != n or set(verts) != set(range(1, n + 1)):
        return CheckResult.failed(f"vertices are not a permutation of 1..{n}")
    if len(edges) != n:
        return CheckResult.failed(f"cycle has {len(edges)} edges, expected {n}")
    for i, e in enumerate(edges):
        bad = _check_kset(e, n, k)
        if bad:
            return CheckResult.failed(f"edge {i + 1}: {bad}")
    if len(set(edges)) != n:
        seen: dict[tuple[int, ...], int] = {}
        for i, e in enumerate(edges):
            if e in seen:
                return CheckResult.failed(
                    f"duplicate edge at positions ({seen[e] + 1},{i + 1})"
                )
            seen[e] = i
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        es = set(edges[i])
        if a not in es or b not in es:
            return CheckResult.failed(
                f"containment fails at i={i + 1}: edge {edges[i]} misses "
                f"{{{a},{b}}}"
            )
    return CheckResult.passed()


def verify_decomposition(d) -> VerifyReport:
    """Full re-validation: every cycle, counts, M sanity, and exact coverage
    of all k-sets outside M (order-insensitive)."""
    n, k = d.n, d.k
    if not 3 <= k < n:
        return VerifyReport(False, f"need 3 <= k < n, got k={k}, n={n}", 0)
    m_members = tuple(tuple(s) for s in d.m_members)
    declared_msize = getattr(d, "msize", len(m_members))
    declared_cycles = getattr(d, "declared_cycles", len(d.cycles))
    case = d.case

    if declared_msize != len(m_members):
        return VerifyReport(
            False, f"declared msize {declared_msize} != {len(m_members)} sets", 0
        )
    if len(m_members) >= n:
        return VerifyReport(False, f"|M| = {len(m_members)} must be < n = {n}", 0)
    for s in m_members:
        bad = _check_kset(s, n, k)
        if bad:
            return VerifyReport(False, f"M: {bad}", 0)
    if len(set(m_members)) != len(m_members):
        return VerifyReport(False, "M contains duplicates", 0)
    if case == "2" and m_members:
        if k != 3:
            return VerifyReport(False, f"case 2 with k={k}", 0)
        covered = [v for s in m_members for v in s]
        if len(m_members) * 3 != n or len(set(covered)) != n:
            return VerifyReport(False, "case 2 requires M to be a perfect matching", 0)

    total = math.comb(n, k)
    remaining = total - len(m_members)
    if remaining % n != 0:
        return VerifyReport(False, f"n does not divide C(n,k) - |M| = {remaining}", 0)
    want_cycles = remaining // n
    if declared_cycles != len(d.cycles):
        return VerifyReport(
            False, f"declared {declared_cycles} cycles, file has {len(d.cycles)}", 0
        )
    if len(d.cycles) != want_cycles:
        return VerifyReport(
            False, f"expected {want_cycles} cycles, got {len(d.cycles)}", 0
        )

    checked = 0
    for ci, cycle in enumerate(d.cycles):
        res = verify_berge_cycle(cycle, n, k)
        if not res.ok:
            return VerifyReport(False, f"cycle {ci + 1}: {res.violation}", checked)
        checked += 1

    comb_col = _comb_columns(n, k)
    ranks = sorted(
        _rank_colex(tuple(e), comb_col) for cycle in d.cycles for e in cycle.edges
    )
    m_ranks = sorted(_rank_colex(s, comb_col) for s in m_members)
    expected = 0
    mi = 0
    for got in ranks:
        while mi < len(m_ranks) and m_ranks[mi] == expected:
            mi += 1
            expected += 1
        if got != expected:
            return VerifyReport(
                False,
                f"coverage mismatch: rank {got} where rank {expected} was expected "
                f"(duplicate, missing, or M-member used)",
                checked,
            )
        expected += 1
    return VerifyReport(True, None, checked)


def verify_hbd_text(text: str) -> VerifyReport:
    return verify_decomposition(parse_hbd(text))


# ---------------------------------------------------------------------------
# Hall-violator certificates


def hall_certificate_check(g, violator) -> CheckResult:
    """Recompute N(violator) by brute force and confirm |N| < |violator|."""
    vio = [int(v) for v in violator]
    if not vio:
        return CheckResult.failed("empty violator")
    if len(set(vio)) != len(vio):
        return CheckResult.failed("violator lists a vertex twice")
    if min(vio) < 0 or max(vio) >= g.left_count:
        return CheckResult.failed("violator vertex out of range")
    neigh: set[int] = set()
    indptr, indices = g.indptr, g.indices
    for l in vio:
        for e in range(int(indptr[l]), int(indptr[l + 1])):
            neigh.add(int(indices[e]))
    if len(neigh) >= len(vio):
        return CheckResult.failed(
            f"|N(S)| = {len(neigh)} >= |S| = {len(vio)}: not a Hall violator"
        )
    return CheckResult.passed()


# ---------------------------------------------------------------------------
# HAMDEC v1 files, checked independently of the construction module


def verify_hamdec_text(text: str) -> VerifyReport:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty file")
    head = lines[0].split()
    if len(head) != 5 or head[:2] != ["HAMDEC", "v1"]:
        raise ParseError(1, f"bad header {lines[0]!r}")
    fields = {}
    for tok in head[2:]:
        if "=" not in tok:
            raise ParseError(1, f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        fields[key] = val
    n = _parse_int(fields.get("n", "?"), 1, "n")
    kind = fields.get("kind", "")
    if kind not in HAMDEC_KINDS:
        raise ParseError(1, f"unknown kind {kind!r}")

    cycles: list[tuple[int, ...]] = []
    leftover: list[tuple[int, int]] = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("H "):
            cycles.append(tuple(_parse_int(t, line_no, "vertex") for t in line[2:].split()))
        elif line.startswith("L "):
            pair = _parse_set_token(line[2:], line_no)
            if len(pair) != 2:
                raise ParseError(line_no, "leftover edge needs exactly two vertices")
            leftover.append((pair[0], pair[1]))
        else:
            raise ParseError(line_no, f"unrecognized line {line!r}")

    directed = kind == "complete_digraph"
    if kind == "complete_graph_odd":
        want, want_left = ((n - 1) // 2 if n % 2 else -1), 0
    elif kind == "complete_graph_even_minus_matching":
        want, want_left = (n // 2 - 1 if n % 2 == 0 else -1), n // 2
    else:
        want, want_left = n - 1, 0
    if want < 0:
        return VerifyReport(False, f"kind {kind} incompatible with n={n}", 0)
    if len(cycles) != want:
        return VerifyReport(False, f"expected {want} cycles, got {len(cycles)}", 0)
    if len(leftover) != want_left:
        return VerifyReport(
            False, f"expected {want_left} leftover edges, got {len(leftover)}", 0
        )

    full_vertices = set(range(1, n + 1))
    seen: set[tuple[int, int]] = set()
    for ci, order in enumerate(cycles):
        if len(order) != n or set(order) != full_vertices:
            return VerifyReport(False, f"cycle {ci + 1} is not a permutation of 1..{n}", ci)
        for i in range(n):
            u, v = order[i], order[(i + 1) % n]
            e = (u, v) if directed else (min(u, v), max(u, v))
            if e in seen:
                return VerifyReport(False, f"edge {e} used twice", ci)
            seen.add(e)
    touched: set[int] = set()
    for a, b in leftover:
        e = (min(a, b), max(a, b))
        if e in seen:
            return VerifyReport(False, f"leftover edge {e} also used by a cycle", len(cycles))
        seen.add(e)
        if a in touched or b in touched or a == b:
            return VerifyReport(False, "leftover is not a matching", len(cycles))
        touched.update((a, b))
    if want_left and touched != full_vertices:
        return VerifyReport(False, "leftover matching is not perfect", len(cycles))

    if directed:
        need = n * (n - 1)
    else:
        need = math.comb(n, 2)
    if len(seen) != need:
        return VerifyReport(
            False, f"covered {len(seen)} edges, host graph has {need}", len(cycles)
        )
    return VerifyReport(True, None, len(cycles))


def verify_certificate_text(text: str) -> VerifyReport:
    """Dispatch on the header line: HBD or HAMDEC."""
    first = text.splitlines()[0] if text.splitlines() else ""
    if first.startswith("HBD"):
        return verify_hbd_text(text)
    if first.startswith("HAMDEC"):
        return verify_hamdec_text(text)
    raise ParseError(1, "unrecognized certificate header")
