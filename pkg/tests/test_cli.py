import math

import pytest

from bergedec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_decompose_verify_roundtrip(tmp_path, capsys):
    out = tmp_path / "d.hbd"
    code, _, err = run(capsys, "decompose", "--n", "9", "--k", "7",
                       "--force-range", "--out", str(out))
    assert code == 0, err
    code, stdout, _ = run(capsys, "verify", "--in", str(out))
    assert code == 0
    assert "OK" in stdout


def test_decompose_writes_to_stdout(capsys):
    code, stdout, _ = run(capsys, "decompose", "--n", "5", "--k", "4", "--force-range")
    assert code == 0
    assert stdout.startswith("HBD v1\n")
    assert stdout.count("\nC ") == 1


def test_decompose_divisibility_exit_2(capsys):
    code, _, err = run(capsys, "decompose", "--n", "8", "--k", "4", "--force-range")
    assert code == 2
    assert "admissible |M|" in err and "6" in err


def test_decompose_auto_m(capsys):
    code, stdout, _ = run(capsys, "decompose", "--n", "8", "--k", "4",
                          "--force-range", "--auto-m")
    assert code == 0
    assert "msize=6" in stdout


def test_decompose_m_file(tmp_path, capsys):
    m_file = tmp_path / "m.fam"
    m_file.write_text("1-2-3-4\n1-2-3-5\n1-2-4-5\n1-3-4-5\n2-3-4-5\n1-2-3-6\n")
    code, stdout, _ = run(capsys, "decompose", "--n", "8", "--k", "4",
                          "--force-range", "--m-file", str(m_file))
    assert code == 0
    assert "msize=6" in stdout


def test_decompose_bad_m_file_exit_5(tmp_path, capsys):
    m_file = tmp_path / "m.fam"
    m_file.write_text("1-2-3-x\n")
    code, _, err = run(capsys, "decompose", "--n", "8", "--k", "4",
                       "--force-range", "--m-file", str(m_file))
    assert code == 5


def test_decompose_size_cap_exit_4(capsys):
    code, _, err = run(capsys, "decompose", "--n", "30", "--k", "10", "--force-range")
    assert code == 4


def test_decompose_range_warning_on_stderr(tmp_path, capsys, recwarn):
    import subprocess
    import sys

    # warnings must reach stderr and not affect the exit code
    proc = subprocess.run(
        [sys.executable, "-m", "bergedec.cli", "decompose", "--n", "9", "--k", "7"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "outside the ranges" in proc.stderr
    proc2 = subprocess.run(
        [sys.executable, "-m", "bergedec.cli", "decompose", "--n", "9", "--k", "7",
         "--force-range"],
        capture_output=True,
        text=True,
    )
    assert proc2.returncode == 0
    assert "outside the ranges" not in proc2.stderr
    assert proc.stdout == proc2.stdout


def test_verify_corrupted_exit_1(tmp_path, capsys):
    out = tmp_path / "d.hbd"
    code, _, _ = run(capsys, "decompose", "--n", "5", "--k", "4",
                     "--force-range", "--out", str(out))
    assert code == 0
    text = out.read_text()
    out.write_text(text.replace("C 1 ", "C 2 ", 1))
    code, _, err = run(capsys, "verify", "--in", str(out))
    assert code == 1
    assert "FAIL" in err


def test_verify_empty_file_exit_5(tmp_path, capsys):
    empty = tmp_path / "empty.hbd"
    empty.write_text("")
    code, _, err = run(capsys, "verify", "--in", str(empty))
    assert code == 5
    assert "parse error" in err


def test_verify_missing_file_exit_5(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", "--in", str(tmp_path / "nope.hbd"))
    assert code == 5


def test_shadow_lower(tmp_path, capsys):
    fam = tmp_path / "f.fam"
    fam.write_text("1-2-3\n")
    code, stdout, _ = run(capsys, "shadow", "--n", "5", "--k", "3", "--level", "1",
                          "--dir", "lower", "--family", str(fam))
    assert code == 0
    assert stdout == "1-2\n1-3\n2-3\nsize 3\n"


def test_shadow_upper(tmp_path, capsys):
    fam = tmp_path / "f.fam"
    fam.write_text("1-2\n")
    code, stdout, _ = run(capsys, "shadow", "--n", "5", "--k", "2", "--level", "2",
                          "--dir", "upper", "--family", str(fam))
    assert code == 0
    assert stdout.endswith(f"size {math.comb(3, 2)}\n")


def test_shadow_bad_level_exit_2(tmp_path, capsys):
    fam = tmp_path / "f.fam"
    fam.write_text("1-2-3\n")
    code, _, _ = run(capsys, "shadow", "--n", "5", "--k", "3", "--level", "4",
                     "--dir", "lower", "--family", str(fam))
    assert code == 2


def test_kk_check_small(capsys):
    code, stdout, _ = run(capsys, "kk-check", "--n", "6", "--k", "3", "--samples", "20")
    assert code == 0
    assert "0 failures" in stdout


def test_ham_odd_and_even(capsys):
    code, stdout, _ = run(capsys, "ham", "--n", "7")
    assert code == 0
    assert stdout.startswith("HAMDEC v1 n=7 kind=complete_graph_odd")
    code, stdout, _ = run(capsys, "ham", "--n", "8")
    assert code == 0
    assert "kind=complete_graph_even_minus_matching" in stdout
    assert "\nL " in stdout


def test_ham_directed_impossible(capsys):
    code, _, err = run(capsys, "ham", "--n", "4", "--directed")
    assert code == 2
    assert "no Hamilton decomposition" in err


def test_ham_directed_ok(capsys, tmp_path):
    out = tmp_path / "dk.hamdec"
    code, _, _ = run(capsys, "ham", "--n", "8", "--directed", "--seed", "1",
                     "--out", str(out))
    assert code == 0
    code, stdout, _ = run(capsys, "verify", "--in", str(out))
    assert code == 0


def test_ham_identical_invocations_byte_identical(capsys):
    _, a, _ = run(capsys, "ham", "--n", "10", "--directed", "--seed", "9")
    _, b, _ = run(capsys, "ham", "--n", "10", "--directed", "--seed", "9")
    assert a == b


def test_bench_table(capsys):
    code, stdout, _ = run(capsys, "bench", "--n", "9", "--k", "5")
    assert code == 0
    assert stdout.startswith("BENCH n=9 k=5 seed=0 backend=")
    for stage in ("ham_decomp", "build_b", "aux_graph", "matching", "assembly",
                  "verify", "total"):
        assert f"\n{stage} " in stdout or stdout.startswith(stage)
    assert "edges " in stdout and "mem_estimate_mb" in stdout


def test_bench_compare_kernels(capsys):
    from bergedec import kernels

    if not kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    code, stdout, _ = run(capsys, "bench", "--n", "9", "--k", "5", "--compare-kernels")
    assert code == 0
    assert "kernels_agree yes" in stdout
    assert "aux_graph[" in stdout and "matching[" in stdout


def test_bench_rejects_trivial_case(capsys):
    code, _, err = run(capsys, "bench", "--n", "9", "--k", "8")
    assert code == 2


def test_decompose_infeasible_exit_3_with_certificate(capsys, monkeypatch):
    import numpy as np

    from bergedec import construct
    from bergedec.matching import MatchingResult

    def starved(g, force=None):
        pairs = np.full(g.left_count, -1, dtype=np.int64)
        return MatchingResult(pairs, 0, np.array([0, 1], dtype=np.int64))

    monkeypatch.setattr(construct, "hopcroft_karp", starved)
    code, _, err = run(capsys, "decompose", "--n", "9", "--k", "7", "--force-range")
    assert code == 3
    assert "HALL-VIOLATOR size=2" in err
    # the two smallest 7-sets of [9] in colex order
    assert "1-2-3-4-5-6-7" in err and "1-2-3-4-5-6-8" in err
