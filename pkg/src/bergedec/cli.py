"""Command-line surface: construct, verify, shadows, bound checks, benchmarks.

Exit codes for `decompose`: 0 verified success, 2 divisibility error,
3 matching infeasible (Hall certificate on stderr), 4 size cap exceeded,
5 M-file parse error.  `verify`: 0 pass, 1 fail, 5 parse error.  Other
subcommands: 0 ok, 1 check failed, 2 precondition violated.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from . import verify as verify_mod
from .combinat import (
    Family,
    colex_rank,
    colex_unrank,
    format_kset,
    kk_check,
    lower_shadow,
    read_family,
    upper_shadow,
    write_family,
)
from .construct import (
    SIZE_CAP_DEFAULT,
    _aux_csr_from_lefts,
    assemble_cycles,
    build_B,
    choose_default_M,
    compute_parameters,
    decompose,
    format_decomposition,
)
from .errors import (
    BergeError,
    DivisibilityError,
    ImpossibleByTillson,
    MatchingInfeasible,
    ParseError,
    SizeCapError,
)
from .hamdec import (
    dk_decompose,
    select_m_cycles,
    walecki_decompose,
    walecki_even_decompose,
    write_hamdec,
)
from .matching import hopcroft_karp
from .verify import verify_certificate_text


@dataclass
class RunConfig:
    subcommand: str
    n: int = 0
    k: int = 0
    matching_file: str | None = None
    seed: int = 0
    out: str | None = None
    cap: int = SIZE_CAP_DEFAULT
    threads: int = 1
    extras: dict = field(default_factory=dict)


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _expand_rank(compact: int, m_ranks: list[int]) -> int:
    g = compact
    for r in m_ranks:
        if r <= g:
            g += 1
        else:
            break
    return g


def cmd_decompose(cfg: RunConfig) -> int:
    n, k = cfg.n, cfg.k
    m_set: Family | None
    if cfg.matching_file is not None:
        try:
            text = Path(cfg.matching_file).read_text(encoding="utf-8")
            m_set = read_family(text, n, k)
        except OSError as exc:
            print(f"cannot read M file: {exc}", file=sys.stderr)
            return 5
        except ValueError as exc:
            print(f"M file parse error: {exc}", file=sys.stderr)
            return 5
    elif cfg.extras.get("auto_m"):
        try:
            m_set = choose_default_M(n, k)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return 2
    else:
        m_set = Family.empty(n, k)
    try:
        dec = decompose(
            n,
            k,
            m_set=m_set,
            seed=cfg.seed,
            cap=cfg.cap,
            warn_range=not cfg.extras.get("force_range", False),
            threads=cfg.threads,
        )
    except DivisibilityError as exc:
        print(str(exc), file=sys.stderr)
        print(f"admissible |M| (with |M| < n): {exc.admissible}", file=sys.stderr)
        return 2
    except MatchingInfeasible as exc:
        m_ranks = sorted(colex_rank(s) for s in m_set) if m_set else []
        print(
            f"HALL-VIOLATOR size={len(exc.violator)} matched={exc.matched} "
            f"left={exc.left_count}",
            file=sys.stderr,
        )
        for idx in exc.violator:
            g = _expand_rank(int(idx), m_ranks)
            print(format_kset(colex_unrank(g, k)), file=sys.stderr)
        return 3
    except SizeCapError as exc:
        print(str(exc), file=sys.stderr)
        return 4
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except BergeError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    _write_output(format_decomposition(dec), cfg.out)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    try:
        text = Path(cfg.extras["in_path"]).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read file: {exc}", file=sys.stderr)
        return 5
    try:
        report = verify_certificate_text(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 5
    if not report.ok:
        print(f"FAIL: {report.violation}", file=sys.stderr)
        return 1
    print(f"OK: {report.cycles_checked} cycles verified")
    return 0


def cmd_shadow(cfg: RunConfig) -> int:
    try:
        text = Path(cfg.extras["family"]).read_text(encoding="utf-8")
        fam = read_family(text, cfg.n, cfg.k)
    except OSError as exc:
        print(f"cannot read family: {exc}", file=sys.stderr)
        return 5
    except ValueError as exc:
        print(f"family parse error: {exc}", file=sys.stderr)
        return 5
    level = cfg.extras["level"]
    direction = cfg.extras["direction"]
    try:
        sh = lower_shadow(fam, level) if direction == "lower" else upper_shadow(fam, level)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    out = write_family(sh) + f"size {len(sh)}\n"
    _write_output(out, cfg.out)
    return 0


def cmd_kk_check(cfg: RunConfig) -> int:
    report = kk_check(
        cfg.n,
        cfg.k,
        samples=cfg.extras.get("samples", 50),
        exhaustive=cfg.extras.get("exhaustive", False),
        seed=cfg.seed,
    )
    print(f"kk-check n={cfg.n} k={cfg.k}: {report.checks} checks, "
          f"{len(report.failures)} failures")
    for msg in report.failures[:20]:
        print(f"  {msg}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_ham(cfg: RunConfig) -> int:
    n = cfg.n
    try:
        if cfg.extras.get("directed"):
            dec = dk_decompose(n, seed=cfg.seed)
        elif n % 2 == 1:
            dec = walecki_decompose(n)
        else:
            dec = walecki_even_decompose(n)
    except ImpossibleByTillson as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ValueError, BergeError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    _write_output(write_hamdec(dec, cfg.seed), cfg.out)
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    n, k = cfg.n, cfg.k
    if not 3 <= k <= n - 2:
        print("bench needs 3 <= k <= n-2 (the matching pipeline)", file=sys.stderr)
        return 2
    kernels.set_threads(cfg.threads)
    kernels.warmup()
    backend = kernels.backend()
    rows: list[tuple[str, float]] = []

    t0 = time.perf_counter()
    m_set = choose_default_M(n, k)
    p = compute_parameters(n, k, len(m_set))
    if k == n - 2:
        hs = list((walecki_decompose(n) if n % 2 else walecki_even_decompose(n)).cycles)
        copies = []
        case = "3b"
    else:
        dk = dk_decompose(n, cfg.seed)
        hs = select_m_cycles(dk, p.m)
        copies = [dk] * p.ell
        case = "2" if k == 3 else "1"
    rows.append(("ham_decomp", time.perf_counter() - t0))

    t0 = time.perf_counter()
    b = build_B(p, copies, hs)
    rows.append(("build_b", time.perf_counter() - t0))

    m_ranks = sorted(colex_rank(s) for s in m_set)
    t0 = time.perf_counter()
    lefts = kernels.colex_lefts(n, k, skip=m_ranks)
    g = _aux_csr_from_lefts(n, k, lefts, b, threads=cfg.threads)
    rows.append(("aux_graph", time.perf_counter() - t0))

    t0 = time.perf_counter()
    res = hopcroft_karp(g)
    rows.append(("matching", time.perf_counter() - t0))

    t0 = time.perf_counter()
    dec = assemble_cycles(
        p, res, copies, hs, lefts, m_set=m_set, seed=cfg.seed, provenance=case, graph=g
    )
    rows.append(("assembly", time.perf_counter() - t0))

    t0 = time.perf_counter()
    report = verify_mod.verify_decomposition(dec)
    rows.append(("verify", time.perf_counter() - t0))
    if not report.ok:
        print(f"verification failed: {report.violation}", file=sys.stderr)
        return 1

    agree = None
    if cfg.extras.get("compare") and kernels.HAVE_NUMBA:
        other = "numpy" if backend == "numba" else "numba"
        t0 = time.perf_counter()
        g2 = _aux_csr_from_lefts(n, k, lefts, b, threads=cfg.threads, force=other)
        rows.append((f"aux_graph[{other}]", time.perf_counter() - t0))
        t0 = time.perf_counter()
        res2 = hopcroft_karp(g2, force=other)
        rows.append((f"matching[{other}]", time.perf_counter() - t0))
        agree = bool(
            np.array_equal(g.indices, g2.indices) and np.array_equal(res.pairs, res2.pairs)
        )

    mem = (
        lefts.nbytes
        + g.indptr.nbytes
        + g.indices.nbytes
        + b.tails.nbytes
        + b.heads.nbytes
        + res.pairs.nbytes
    )
    print(f"BENCH n={n} k={k} seed={cfg.seed} backend={backend} threads={cfg.threads}")
    print(f"{'stage':<18} {'seconds':>10}")
    total = 0.0
    for name, dt in rows:
        if "[" not in name:
            total += dt
        print(f"{name:<18} {dt:>10.3f}")
    print(f"{'total':<18} {total:>10.3f}")
    print(
        f"edges {g.edge_count}  left {g.left_count}  right {g.right_count}  "
        f"cycles {len(dec.cycles)}  mem_estimate_mb {mem / 1e6:.1f}"
    )
    if agree is not None:
        print(f"kernels_agree {'yes' if agree else 'NO'}")
        if not agree:
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bergedec",
        description="Hamilton Berge cycle decompositions of complete uniform "
        "hypergraphs, with independent certificate verification.",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    d = sub.add_parser("decompose", help="construct a certified decomposition")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--k", type=int, required=True)
    mx = d.add_mutually_exclusive_group()
    mx.add_argument("--m-file", help="family file with the removed k-sets")
    mx.add_argument("--auto-m", action="store_true", help="pick the canonical M")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", help="output path (default stdout)")
    d.add_argument("--cap", type=int, default=SIZE_CAP_DEFAULT)
    d.add_argument("--force-range", action="store_true", help="suppress the range warning")
    d.add_argument("--threads", type=int, default=1)

    v = sub.add_parser("verify", help="re-check a decomposition file from scratch")
    v.add_argument("--in", dest="in_path", required=True)

    s = sub.add_parser("shadow", help="lower/upper shadow of a family file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--dir", dest="direction", choices=("lower", "upper"), required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--out")

    c = sub.add_parser("kk-check", help="validate the shadow bounds")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    cx = c.add_mutually_exclusive_group()
    cx.add_argument("--exhaustive", action="store_true")
    cx.add_argument("--samples", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)

    h = sub.add_parser("ham", help="emit a Hamilton decomposition file")
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--directed", action="store_true")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--out")

    bn = sub.add_parser("bench", help="stage timings for the pipeline")
    bn.add_argument("--n", type=int, required=True)
    bn.add_argument("--k", type=int, required=True)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--threads", type=int, default=1)
    bn.add_argument("--compare-kernels", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    sc = args.subcommand
    if sc == "decompose":
        cfg = RunConfig(
            sc, args.n, args.k, args.m_file, args.seed, args.out, args.cap, args.threads,
            extras={"auto_m": args.auto_m, "force_range": args.force_range},
        )
        return cmd_decompose(cfg)
    if sc == "verify":
        return cmd_verify(RunConfig(sc, extras={"in_path": args.in_path}))
    if sc == "shadow":
        cfg = RunConfig(
            sc, args.n, args.k, out=args.out,
            extras={"level": args.level, "direction": args.direction, "family": args.family},
        )
        return cmd_shadow(cfg)
    if sc == "kk-check":
        extras = {"exhaustive": args.exhaustive}
        if args.samples is not None:
            extras["samples"] = args.samples
        elif args.exhaustive:
            extras["samples"] = 200
        return cmd_kk_check(RunConfig(sc, args.n, args.k, seed=args.seed, extras=extras))
    if sc == "ham":
        return cmd_ham(RunConfig(sc, args.n, seed=args.seed, out=args.out,
                                 extras={"directed": args.directed}))
    if sc == "bench":
        return cmd_bench(RunConfig(sc, args.n, args.k, seed=args.seed, threads=args.threads,
                                   extras={"compare": args.compare_kernels}))
    raise AssertionError(sc)


if __name__ == "__main__":
    sys.exit(main())
