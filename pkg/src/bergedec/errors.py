"""Exception types and warning categories used across the package."""

from __future__ import annotations


class BergeError(Exception):
    """Base class for all package errors."""


class DivisibilityError(BergeError):
    """n does not divide the number of k-sets left after removing M."""

    def __init__(self, n: int, k: int, m_size: int, remainder: int, admissible: int):
        self.n = n
        self.k = k
        self.m_size = m_size
        self.remainder = remainder
        # |M| < n forces a unique admissible size: C(n,k) mod n.
        self.admissible = admissible
        super().__init__(
            f"n={n} does not divide C({n},{k}) - {m_size} "
            f"(remainder {remainder}); the only admissible |M| < {n} is {admissible}"
        )


class SizeCapError(BergeError):
    """Instance exceeds the configured size cap."""


class ImpossibleByTillson(BergeError):
    """The complete digraph on 4 or 6 vertices has no Hamilton decomposition."""

    def __init__(self, n: int):
        self.n = n
        super().__init__(f"DK_{n} has no Hamilton decomposition (n in {{4, 6}})")


class SearchExhausted(BergeError):
    """Randomized decomposition search hit its restart cap."""

    def __init__(self, n: int, seed: int, restarts: int, rollbacks: int):
        self.n = n
        self.seed = seed
        self.restarts = restarts
        self.rollbacks = rollbacks
        super().__init__(
            f"no Hamilton decomposition of DK_{n} found for seed {seed} "
            f"after {restarts} restarts ({rollbacks} rollbacks in final run)"
        )


class MatchingInfeasible(BergeError):
    """The auxiliary bipartite graph has no perfect matching.

    Carries a Hall-violator certificate: a set S of left vertices with
    |N(S)| < |S|, independently checkable.
    """

    def __init__(self, violator, matched: int, left_count: int):
        self.violator = violator
        self.matched = matched
        self.left_count = left_count
        super().__init__(
            f"maximum matching has size {matched} < {left_count}; "
            f"Hall violator of size {len(violator)} attached"
        )


class ParseError(BergeError):
    """A certificate file failed to parse."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ConstructionCheckError(BergeError):
    """The constructor's own output failed verification (internal bug)."""


class OutsideProvenRangeWarning(UserWarning):
    """(n, k, M) lies outside the ranges where success is guaranteed."""
