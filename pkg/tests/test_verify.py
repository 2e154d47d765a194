import random
import warnings

import pytest

from bergedec.construct import decompose, format_decomposition, single_cycle_n_minus_1
from bergedec.errors import OutsideProvenRangeWarning, ParseError
from bergedec.hamdec import dk_decompose, walecki_even_decompose, write_hamdec
from bergedec.matching import BipartiteGraph, hopcroft_karp
from bergedec.verify import (
    ParsedCycle,
    hall_certificate_check,
    parse_hbd,
    verify_berge_cycle,
    verify_certificate_text,
    verify_hamdec_text,
    verify_hbd_text,
)


@pytest.fixture(scope="module")
def sample_text():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideProvenRangeWarning)
        return format_decomposition(decompose(9, 7))


def test_single_cycle_passes():
    d = single_cycle_n_minus_1(5)
    res = verify_berge_cycle(d.cycles[0], 5, 4)
    assert res.ok


def test_duplicate_edge_rejected():
    d = single_cycle_n_minus_1(6)
    c = d.cycles[0]
    edges = list(c.edges)
    edges[1] = edges[0]
    res = verify_berge_cycle(ParsedCycle(c.vertices, tuple(edges)), 6, 5)
    assert not res.ok and "duplicate edge at positions (1,2)" in res.violation


def test_containment_violation_rejected():
    # first failure at position 2: that edge omits v_3 = 3
    verts = (1, 2, 3, 4, 5)
    omit = {1: 4, 2: 3, 3: 1, 4: 2, 5: 5}
    edges = tuple(tuple(v for v in verts if v != omit[i]) for i in range(1, 6))
    res = verify_berge_cycle(ParsedCycle(verts, edges), 5, 4)
    assert not res.ok and "i=2" in res.violation


def test_bad_vertex_permutation_rejected():
    d = single_cycle_n_minus_1(5)
    res = verify_berge_cycle(ParsedCycle((1, 2, 3, 4, 4), d.cycles[0].edges), 5, 4)
    assert not res.ok


def test_roundtrip_verifies(sample_text):
    rep = verify_hbd_text(sample_text)
    assert rep.ok, rep.violation
    assert rep.cycles_checked == 4


def test_cycle_order_is_irrelevant(sample_text):
    lines = sample_text.splitlines()
    swapped = lines[:2] + [lines[3], lines[2]] + lines[4:]
    rep = verify_hbd_text("\n".join(swapped) + "\n")
    assert rep.ok


def test_m_member_replacing_edge_fails():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideProvenRangeWarning)
        d = decompose(10, 8)
    text = format_decomposition(d)
    # replace one cycle edge with an M member
    m_token = "1-2-3-4-5-6-7-8"
    lines = text.splitlines()
    target = lines[3].split()
    for i in range(2, len(target), 2):
        if target[i] != m_token:
            target[i] = m_token
            break
    lines[3] = " ".join(target)
    rep = verify_hbd_text("\n".join(lines) + "\n")
    assert not rep.ok


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_hbd("")
    with pytest.raises(ParseError, match="line 1"):
        parse_hbd("HBD v2\nn=5 k=4 msize=0 cycles=1 seed=0 case=3a\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_hbd("HBD v1\nn=5 k=4 msize=0 cycles=1 case=3a\n")
    good = format_decomposition(single_cycle_n_minus_1(5))
    with pytest.raises(ParseError, match="line 3"):
        parse_hbd(good.replace("C 1", "Z 1"))
    with pytest.raises(ParseError, match="line 3"):
        parse_hbd(good.replace("1-2-4-5", "1-2-x-5"))


def test_declared_count_mismatches_fail(sample_text):
    rep = verify_hbd_text(sample_text.replace("cycles=4", "cycles=5"))
    assert not rep.ok and "declared" in rep.violation
    rep = verify_hbd_text(sample_text.replace("msize=0", "msize=1"))
    assert not rep.ok


def test_case2_requires_perfect_matching():
    text = (
        "HBD v1\n"
        "n=6 k=3 msize=2 cycles=3 seed=0 case=2\n"
        "M 1-2-3 1-4-5\n"
    )
    rep = verify_hbd_text(text)
    assert not rep.ok and "perfect matching" in rep.violation


def test_case2_matching_flag_checked_on_files():
    # hand-build a tiny case-2 header with a non-matching M: must fail msize rules
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideProvenRangeWarning)
        d = decompose(9, 7)
    text = format_decomposition(d).replace("case=3b", "case=2")
    rep = verify_hbd_text(text)
    # case 2 with empty M is structurally fine; k mismatch is not checked then
    assert rep.ok


def test_mutation_fuzz_all_rejected(sample_text):
    rng = random.Random(20260808)
    lines = sample_text.splitlines()
    rejected = 0
    trials = 0
    while trials < 100:
        mutated = list(lines)
        kind = rng.choice(["flip_vertex", "dup_edge", "drop_cycle", "perturb_edge"])
        ci = rng.randrange(2, len(lines))
        toks = mutated[ci].split()
        if kind == "flip_vertex":
            vi = 1 + 2 * rng.randrange((len(toks) - 1) // 2)
            old = int(toks[vi])
            new = rng.randint(1, 9)
            if new == old:
                continue
            toks[vi] = str(new)
            mutated[ci] = " ".join(toks)
        elif kind == "dup_edge":
            ei = 2 + 2 * rng.randrange((len(toks) - 1) // 2)
            ej = 2 + 2 * rng.randrange((len(toks) - 1) // 2)
            if toks[ei] == toks[ej]:
                continue
            toks[ei] = toks[ej]
            mutated[ci] = " ".join(toks)
        elif kind == "drop_cycle":
            mutated.pop(ci)
        else:
            # change one element of one edge; the k-set multiset cannot survive
            ei = 2 + 2 * rng.randrange((len(toks) - 1) // 2)
            vals = [int(x) for x in toks[ei].split("-")]
            pos = rng.randrange(len(vals))
            new = rng.randint(1, 10)
            if new == vals[pos]:
                continue
            vals[pos] = new
            toks[ei] = "-".join(str(v) for v in sorted(vals))
            mutated[ci] = " ".join(toks)
        trials += 1
        try:
            rep = verify_hbd_text("\n".join(mutated) + "\n")
            ok = rep.ok
        except ParseError:
            ok = False
        if not ok:
            rejected += 1
    assert rejected == trials == 100


def test_hall_certificate_check():
    g = BipartiteGraph.from_adjacency([[0], [0]], 1)
    res = hopcroft_karp(g)
    assert hall_certificate_check(g, res.violator)
    # claimed violator on a matchable graph must fail
    g2 = BipartiteGraph.from_adjacency([[0], [1]], 2)
    assert not hall_certificate_check(g2, [0, 1])
    assert not hall_certificate_check(g2, [])
    assert not hall_certificate_check(g2, [0, 0])


def test_hall_certificates_from_thinned_graphs():
    rng = random.Random(5)
    found = 0
    for _ in range(200):
        nl = rng.randint(2, 10)
        nr = rng.randint(1, 6)
        adj = [[r for r in range(nr) if rng.random() < 0.2] for _ in range(nl)]
        g = BipartiteGraph.from_adjacency(adj, nr)
        res = hopcroft_karp(g)
        if res.violator is not None:
            assert hall_certificate_check(g, res.violator)
            found += 1
    assert found > 30


def test_hamdec_text_verification():
    good = write_hamdec(dk_decompose(8, seed=1), 1)
    rep = verify_hamdec_text(good)
    assert rep.ok, rep.violation
    rep = verify_hamdec_text(good.replace("H 1", "H 2", 1))
    assert not rep.ok

    even = write_hamdec(walecki_even_decompose(10), 0)
    assert verify_hamdec_text(even).ok
    # drop a leftover edge
    broken = "\n".join(even.splitlines()[:-1]) + "\n"
    assert not verify_hamdec_text(broken).ok


def test_certificate_dispatch(sample_text):
    assert verify_certificate_text(sample_text).ok
    assert verify_certificate_text(write_hamdec(dk_decompose(7), 0)).ok
    with pytest.raises(ParseError):
        verify_certificate_text("garbage\n")
