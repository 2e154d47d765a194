"""k-subset enumeration, colex/lex orders, shadows, and shadow lower bounds.

Vertices are labelled 1..n.  A k-set is a strictly increasing tuple of ints;
families are kept sorted in colex order so serialization is canonical.  The
shadow-bound functions implement the Lovász binomial form for lower shadows
and two explicit upper-shadow bounds on pair families.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

KSet = tuple[int, ...]

LOVASZ_TOL = 1e-9
# Bisection converges well past the documented 1e-9 guarantee so that error
# amplified through binom_real(s, 2) stays below comparison tolerances.
_BISECT_TOL = 1e-12
LOVASZ_MAX_ITER = 200


def validate_kset(s: Sequence[int], n: int, k: int) -> KSet:
    """Return s as a canonical KSet tuple, or raise ValueError."""
    t = tuple(s)
    if len(t) != k:
        raise ValueError(f"expected {k} elements, got {len(t)}: {t}")
    for i, v in enumerate(t):
        if not isinstance(v, int) or v < 1 or v > n:
            raise ValueError(f"element {v} out of range 1..{n}")
        if i > 0 and t[i - 1] >= v:
            raise ValueError(f"elements not strictly increasing: {t}")
    return t


def parse_kset(token: str) -> KSet:
    """Parse the dash-joined form, e.g. '1-4-7'."""
    try:
        t = tuple(int(p) for p in token.split("-"))
    except ValueError:
        raise ValueError(f"malformed k-set token {token!r}") from None
    if not t:
        raise ValueError("empty k-set token")
    return t


def format_kset(s: KSet) -> str:
    return "-".join(str(v) for v in s)


def colex_key(s: KSet) -> tuple[int, ...]:
    # Comparing reversed tuples compares largest differing elements first.
    return s[::-1]


@dataclass(frozen=True)
class Family:
    """A duplicate-free family of k-subsets of [n], colex-sorted."""

    n: int
    k: int
    members: tuple[KSet, ...]

    @staticmethod
    def from_iterable(n: int, k: int, sets: Iterable[Sequence[int]]) -> "Family":
        members = sorted((validate_kset(s, n, k) for s in sets), key=colex_key)
        for a, b in zip(members, members[1:]):
            if a == b:
                raise ValueError(f"duplicate member {format_kset(a)}")
        if len(members) > math.comb(n, k):
            raise ValueError("family larger than C(n,k)")
        return Family(n, k, tuple(members))

    @staticmethod
    def empty(n: int, k: int) -> "Family":
        return Family(n, k, ())

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[KSet]:
        return iter(self.members)

    def __contains__(self, s: object) -> bool:
        return s in set(self.members)


# ---------------------------------------------------------------------------
# colex / lex ranking


def colex_rank(s: KSet) -> int:
    """0-based position of s in the colex order of k-sets (independent of n)."""
    r = 0
    for i, v in enumerate(s):
        if v < 1 or (i > 0 and s[i - 1] >= v):
            raise ValueError(f"malformed k-set {s}")
        r += math.comb(v - 1, i + 1)
    return r


def colex_unrank(r: int, k: int) -> KSet:
    """Inverse of colex_rank for k-sets."""
    if r < 0:
        raise ValueError("rank must be nonnegative")
    out = [0] * k
    rr = r
    for i in range(k, 0, -1):
        # largest c with C(c, i) <= rr; element is c + 1
        c = i - 1
        while math.comb(c + 1, i) <= rr:
            c += 1
        rr -= math.comb(c, i)
        out[i - 1] = c + 1
    return tuple(out)


def colex_successor(s: KSet) -> KSet:
    """The k-set following s in colex order."""
    k = len(s)
    i = 0
    while i + 1 < k and s[i] + 1 == s[i + 1]:
        i += 1
    return tuple(range(1, i + 1)) + (s[i] + 1,) + s[i + 1 :]


def iter_colex(k: int) -> Iterator[KSet]:
    """Yield k-sets in colex order indefinitely."""
    cur = tuple(range(1, k + 1))
    while True:
        yield cur
        cur = colex_successor(cur)


def colex_initial_segment(size: int, k: int, n: int | None = None) -> Family:
    """The first `size` k-sets in colex order."""
    members = list(itertools.islice(iter_colex(k), size))
    top = max((m[-1] for m in members), default=k)
    if n is None:
        n = top
    if size > math.comb(n, k):
        raise ValueError(f"size {size} exceeds C({n},{k})")
    return Family(n, k, tuple(members))


def lex_initial_segment(size: int, k: int, n: int) -> Family:
    """The first `size` k-sets of [n] in lex order (smallest differing element wins)."""
    if size > math.comb(n, k):
        raise ValueError(f"size {size} exceeds C({n},{k})")
    members = tuple(itertools.islice(itertools.combinations(range(1, n + 1), k), size))
    # itertools.combinations yields exactly the lex order; keep it but the
    # Family constructor re-sorts to colex, so build directly.
    return Family(n, k, tuple(sorted(members, key=colex_key)))


def lex_members(size: int, k: int, n: int) -> list[KSet]:
    """First `size` k-sets of [n] in lex order, in that order."""
    if size > math.comb(n, k):
        raise ValueError(f"size {size} exceeds C({n},{k})")
    return list(itertools.islice(itertools.combinations(range(1, n + 1), k), size))


# ---------------------------------------------------------------------------
# shadows


def lower_shadow(f: Family, level: int) -> Family:
    """All (k-level)-sets contained in some member of f."""
    if level < 0 or level > f.k:
        raise ValueError(f"level {level} out of range 0..{f.k}")
    out: set[KSet] = set()
    for m in f.members:
        out.update(itertools.combinations(m, f.k - level))
    return Family(f.n, f.k - level, tuple(sorted(out, key=colex_key)))


def upper_shadow(f: Family, level: int) -> Family:
    """All (k+level)-sets of [n] containing some member of f."""
    if level < 0 or f.k + level > f.n:
        raise ValueError(f"level {level} out of range for k={f.k}, n={f.n}")
    out: set[KSet] = set()
    ground = range(1, f.n + 1)
    for m in f.members:
        ms = set(m)
        rest = [v for v in ground if v not in ms]
        for extra in itertools.combinations(rest, level):
            out.add(tuple(sorted(m + extra)))
    return Family(f.n, f.k + level, tuple(sorted(out, key=colex_key)))


# ---------------------------------------------------------------------------
# shadow lower bounds


def binom_real(s: float, k: int) -> float:
    """Generalized binomial s(s-1)...(s-k+1)/k! for real s."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    num = 1.0
    for i in range(k):
        num *= s - i
    return num / math.factorial(k)


def lovasz_s(size: int, k: int) -> float:
    """The unique s >= k with binom_real(s, k) == size, by bisection."""
    if size < 1:
        raise ValueError("size must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    lo, hi = float(k), float(k + size)
    for _ in range(LOVASZ_MAX_ITER):
        if hi - lo <= _BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if binom_real(mid, k) < size:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def kk_bound_i(size: int, k: int) -> float:
    """Lower bound on the (k-2)-level lower shadow: C(s,2) with C(s,k)=size."""
    if k < 3:
        raise ValueError("k must be >= 3")
    return binom_real(lovasz_s(size, k), 2)


class BergeInternalError(AssertionError):
    """Arithmetic invariant broke; indicates a bug, not bad input."""


@dataclass(frozen=True)
class KKBoundReport:
    family_size: int
    s_real: float
    c: int
    d: int
    bound_value: float


def kk_bound_ii(size: int, n: int) -> KKBoundReport:
    """Lower bound on the 1-level upper shadow of a pair family.

    Decomposes size = c*n - C(c+1,2) + d with c < n, 0 <= d < n-(c+1) and
    returns c*C(n-c,2) + 2*d*n/5.  The bound is asserted only for n >= 100
    and c <= 8; elsewhere the report is informational.
    """
    if size <= 0 or size >= math.comb(n, 2):
        raise ValueError(f"size must lie strictly between 0 and C({n},2)")
    for c in range(n):
        base = c * n - math.comb(c + 1, 2)
        d = size - base
        if 0 <= d < n - (c + 1):
            bound = c * math.comb(n - c, 2) + 2.0 * d * n / 5.0
            return KKBoundReport(size, lovasz_s(size, 2), c, d, bound)
    raise BergeInternalError(f"no (c,d) decomposition for size={size}, n={n}")


def kk_bound_iii(size: int, n: int) -> float:
    """Lower bound on the 2-level upper shadow of a pair family of given size."""
    if not 1 <= size <= n - 1:
        raise ValueError(f"size must be in 1..{n - 1}")
    return size * math.comb(n - size - 1, 2) + math.comb(size, 2) * (n - size - 1)


# ---------------------------------------------------------------------------
# family file format: one k-set per line as 1-4-7; '#' comments and blanks ignored


def read_family(text: str, n: int, k: int) -> Family:
    sets = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            t = parse_kset(line)
            sets.append(validate_kset(tuple(sorted(t)), n, k))
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from None
    return Family.from_iterable(n, k, sets)


def write_family(f: Family) -> str:
    return "".join(format_kset(s) + "\n" for s in f.members)


# ---------------------------------------------------------------------------
# property-check driver for the shadow bounds (CLI `kk-check`)


@dataclass
class KKCheckReport:
    ok: bool
    checks: int
    failures: list[str]

    def add_failure(self, msg: str) -> None:
        self.ok = False
        self.failures.append(msg)


def _random_family(rng: random.Random, pool: list[KSet], size: int) -> list[KSet]:
    return rng.sample(pool, size)


def kk_check(
    n: int,
    k: int,
    samples: int = 200,
    exhaustive: bool = False,
    seed: int = 0,
) -> KKCheckReport:
    """Validate the shadow bounds against exact initial-segment shadows.

    Checks, for every family size (or a spread of sizes when C(n,k) is large):
      * colex segments meet bound (i) on the (k-2)-level lower shadow;
      * lex pair-segments meet bounds (ii) (asserted for n >= 100, c <= 8)
        and (iii) on their upper shadows;
      * randomly sampled families never undercut the initial segments
        (minimality) nor the bounds.
    """
    report = KKCheckReport(True, 0, [])
    rng = random.Random(f"kk:{n}:{k}:{seed}")
    total = math.comb(n, k)
    samples = max(0, min(samples, 100_000))

    # (i): incremental lower shadow of the colex initial segment.  Bisection
    # per size is the dear part, so large instances check a spread of sizes.
    pairs_seen: set[KSet] = set()
    seg_lower: list[int] = [0]
    for s in itertools.islice(iter_colex(k), total):
        pairs_seen.update(itertools.combinations(s, 2))
        seg_lower.append(len(pairs_seen))
    check_sizes = range(1, total + 1) if total <= 5000 else _spread_sizes(total, 400)
    for size in check_sizes:
        bound = kk_bound_i(size, k)
        report.checks += 1
        if seg_lower[size] < bound - LOVASZ_TOL:
            report.add_failure(
                f"lower-shadow bound fails at size {size}: "
                f"segment shadow {seg_lower[size]} < bound {bound:.6f}"
            )

    # (ii)/(iii): incremental upper shadows of the lex initial pair segment.
    n_pairs = math.comb(n, 2)
    lex_pairs = lex_members(n_pairs, 2, n)
    up1: set[KSet] = set()
    up2: set[KSet] = set()
    seg_up1: list[int] = [0]
    seg_up2: list[int] = [0]
    ground = range(1, n + 1)
    for idx, (x, y) in enumerate(lex_pairs):
        rest = [v for v in ground if v != x and v != y]
        for w in rest:
            up1.add(tuple(sorted((x, y, w))))
        seg_up1.append(len(up1))
        if idx < n:  # (iii) only needs sizes <= n-1
            for w, z in itertools.combinations(rest, 2):
                up2.add(tuple(sorted((x, y, w, z))))
            seg_up2.append(len(up2))
    for size in range(1, n_pairs):
        rep = kk_bound_ii(size, n)
        report.checks += 1
        if n >= 100 and rep.c <= 8 and seg_up1[size] < rep.bound_value - LOVASZ_TOL:
            report.add_failure(
                f"upper-shadow bound (pairs->triples) fails at size {size}: "
                f"segment shadow {seg_up1[size]} < bound {rep.bound_value:.6f}"
            )
    for size in range(1, n):
        bound = kk_bound_iii(size, n)
        report.checks += 1
        if seg_up2[size] < bound - LOVASZ_TOL:
            report.add_failure(
                f"upper-shadow bound (pairs->quadruples) fails at size {size}: "
                f"segment shadow {seg_up2[size]} < bound {bound:.6f}"
            )

    # Minimality of initial segments against sampled (or exhausted) families.
    # Random-family checks only make sense at small n; large instances are
    # covered by the exact segment shadows above.
    if (exhaustive or samples > 0) and total <= 4096:
        pool_k = list(itertools.islice(iter_colex(k), total))
        sizes = range(1, total + 1) if exhaustive else _spread_sizes(total)
        for size in sizes:
            for fam in _families_of_size(rng, pool_k, size, samples, exhaustive):
                shadow = {p for s in fam for p in itertools.combinations(s, 2)}
                report.checks += 1
                if len(shadow) < seg_lower[size]:
                    report.add_failure(
                        f"colex segment not minimal at size {size}: found "
                        f"family with lower shadow {len(shadow)} < {seg_lower[size]}"
                    )
                if len(shadow) < kk_bound_i(size, k) - LOVASZ_TOL:
                    report.add_failure(
                        f"lower-shadow bound fails on sampled family of size {size}"
                    )
    if (exhaustive or samples > 0) and n_pairs <= 4096:
        pool_2 = lex_pairs
        sizes2 = range(1, n_pairs) if exhaustive else _spread_sizes(n_pairs - 1)
        for size in sizes2:
            for fam in _families_of_size(rng, pool_2, size, samples, exhaustive):
                sh1 = {tuple(sorted((x, y, w))) for (x, y) in fam for w in ground if w != x and w != y}
                report.checks += 1
                if len(sh1) < seg_up1[size]:
                    report.add_failure(
                        f"lex segment not minimal at size {size}: found "
                        f"family with upper shadow {len(sh1)} < {seg_up1[size]}"
                    )
    return report


def _spread_sizes(total: int, limit: int = 40) -> list[int]:
    if total <= limit:
        return list(range(1, total + 1))
    step = total / limit
    sizes = sorted({max(1, round(step * i)) for i in range(1, limit + 1)})
    return sizes


def _families_of_size(
    rng: random.Random,
    pool: list[KSet],
    size: int,
    samples: int,
    exhaustive: bool,
) -> Iterator[list[KSet]]:
    total = len(pool)
    if exhaustive and math.comb(total, size) <= samples:
        for combo in itertools.combinations(pool, size):
            yield list(combo)
        return
    for _ in range(samples):
        yield _random_family(rng, pool, size)
