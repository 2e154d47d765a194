"""Hamilton Berge cycle decompositions of complete uniform hypergraphs.

Construct decompositions of the complete k-uniform hypergraph on n vertices
(minus a small removed family M) into Hamilton Berge cycles, certify them
with an independent verifier, and explore the shadow bounds and Hamilton
decompositions the construction rests on.
"""

from .combinat import (
    Family,
    KKBoundReport,
    KSet,
    binom_real,
    colex_initial_segment,
    colex_rank,
    colex_unrank,
    kk_bound_i,
    kk_bound_ii,
    kk_bound_iii,
    kk_check,
    lex_initial_segment,
    lovasz_s,
    lower_shadow,
    read_family,
    upper_shadow,
    write_family,
)
from .construct import (
    BergeCycle,
    Decomposition,
    Parameters,
    build_B,
    build_aux_graph,
    choose_default_M,
    compute_parameters,
    decompose,
    format_decomposition,
    in_proven_range,
    single_cycle_n_minus_1,
)
from .errors import (
    BergeError,
    DivisibilityError,
    ImpossibleByTillson,
    MatchingInfeasible,
    OutsideProvenRangeWarning,
    ParseError,
    SearchExhausted,
    SizeCapError,
)
from .hamdec import (
    HamCycle,
    HamDecomposition,
    dk_decompose,
    parse_hamdec,
    prove_impossible_small,
    select_m_cycles,
    verify_ham_decomposition,
    walecki_decompose,
    walecki_even_decompose,
    write_hamdec,
)
from .matching import BipartiteGraph, MatchingResult, hopcroft_karp, verify_matching
from .verify import (
    hall_certificate_check,
    parse_hbd,
    verify_berge_cycle,
    verify_certificate_text,
    verify_decomposition,
    verify_hamdec_text,
    verify_hbd_text,
)

__version__ = "0.1.0"
