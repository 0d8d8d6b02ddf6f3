import csv
import io
import subprocess
import sys
from math import comb

import numpy as np
import pytest
from conftest import random_poly

from pesto_lab.cli import main, parse_vector, read_system
from pesto_lab.oracle import brute_force_solutions, max_degree
from pesto_lab.scheme import (
    PestoParams,
    PublicKey,
    load_public_key,
    public_eval,
    save_public_key,
    save_secret_key,
)

TOY_ARGS = ["-n", "6", "-m", "5", "-t", "2", "-s", "1", "-q", "3"]


@pytest.fixture
def toy_files(tmp_path, toy):
    sk, pk, ipt, opt = toy
    save_secret_key(sk, tmp_path / "toy.sec")
    save_public_key(pk, tmp_path / "toy.pub")
    return tmp_path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_keygen_writes_files(tmp_path, capsys):
    code, _, err = run(["keygen", *TOY_ARGS, "--seed", 42, "--out", tmp_path / "k"], capsys)
    assert code == 0
    pk = load_public_key(tmp_path / "k.pub")
    assert (tmp_path / "k.sec").exists()
    assert len(pk.gpub) == 5 and max_degree(pk.gpub) == 4
    assert "max_degree=4" in err


def test_keygen_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["keygen", *TOY_ARGS, "--seed", 42, "--out", tmp_path / d], capsys)[0] == 0
    for ext in ("sec", "pub"):
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()


def test_keygen_bad_params(tmp_path, capsys):
    code, _, err = run(["keygen", "-n", 6, "-m", 5, "-t", 7, "-s", 1, "--out", tmp_path / "k"], capsys)
    assert code == 1
    assert "t <= min(n, m)" in err
    assert not (tmp_path / "k.pub").exists()
    assert run(["keygen", "-n", 6], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1


@pytest.mark.parametrize("method", ["hole", "groebner"])
def test_attack_toy(toy_files, toy, capsys, method):
    _, pk, ipt, opt = toy
    out = toy_files / f"{method}.txt"
    code, _, err = run(["attack", "--method", method, "--pk", toy_files / "toy.pub",
                        "--target", "1,2,2,1,2", "--out", out], capsys)
    assert code == 0
    assert "status=OK" in err and "max_degree=2" in err
    system = read_system(out, 6, 3)
    assert max_degree(system) <= 2
    assert all(p.evaluate(ipt) == 0 for p in system)


def test_attack_methods_agree(toy_files, capsys):
    sols = []
    for method in ("hole", "groebner"):
        code, out, _ = run(["attack", "--method", method, "--pk", toy_files / "toy.pub",
                            "--target", "1,2,2,1,2"], capsys)
        assert code == 0
        (toy_files / "r.txt").write_text(out)
        sols.append(brute_force_solutions(read_system(toy_files / "r.txt", 6, 3), 3, 6))
    assert sols[0] == sols[1]


def test_attack_transcripts(toy_files, capsys):
    _, _, err = run(["attack", "--pk", toy_files / "toy.pub", "--target", "1,2,2,1,2"], capsys)
    assert "relation_dim=" in err and "matrix=98x78" in err
    _, _, err = run(["attack", "--method", "groebner", "--pk", toy_files / "toy.pub",
                     "--target", "1,2,2,1,2"], capsys)
    assert "macaulay_columns=210" in err and "pass1=" in err


def test_target_from_file(toy_files, capsys):
    (toy_files / "target.txt").write_text("1,2,2,1,2\n")
    a = run(["attack", "--pk", toy_files / "toy.pub", "--target", "1,2,2,1,2"], capsys)
    b = run(["attack", "--pk", toy_files / "toy.pub", "--target", toy_files / "target.txt"], capsys)
    assert a[1] == b[1]


@pytest.mark.parametrize("method", ["hole", "groebner"])
def test_attack_random_quartics_fails(tmp_path, capsys, method):
    rng = np.random.default_rng(0)
    pk = PublicKey(PestoParams(6, 5, 2, 1), [random_poly(rng, 6, 4, 3) for _ in range(5)])
    save_public_key(pk, tmp_path / "rand.pub")
    code, _, err = run(["attack", "--method", method, "--pk", tmp_path / "rand.pub",
                        "--target", "0,0,0,0,0"], capsys)
    assert code == 2
    assert "status=STRUCTURAL_FAILURE" in err


def test_attack_bad_target(toy_files, capsys):
    assert run(["attack", "--pk", toy_files / "toy.pub", "--target", "1,2"], capsys)[0] == 1
    assert run(["attack", "--pk", toy_files / "toy.pub", "--target", "1,2,2,1,7"], capsys)[0] == 1
    assert run(["attack", "--pk", toy_files / "missing.pub", "--target", "1,2,2,1,2"], capsys)[0] == 1


def test_verify_pass_and_fail(toy_files, capsys):
    reduced = toy_files / "red.txt"
    run(["attack", "--pk", toy_files / "toy.pub", "--target", "1,2,2,1,2", "--out", reduced], capsys)
    code, out, _ = run(["verify", "--pk", toy_files / "toy.pub", "--target", "1,2,2,1,2",
                        "--reduced", reduced], capsys)
    assert code == 0 and "exhaustive=PASS" in out and "verdict=PASS" in out

    lines = reduced.read_text().splitlines()
    lines[0] = lines[0] + " + 1"
    reduced.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["verify", "--pk", toy_files / "toy.pub", "--target", "1,2,2,1,2",
                        "--reduced", reduced], capsys)
    assert code == 2
    assert "exhaustive=FAIL" in out and "first_difference=" in out and "verdict=FAIL" in out


def test_verify_skips_at_scale(tmp_path, capsys):
    assert run(["keygen", "-n", 20, "-m", 16, "-t", 6, "-s", 4, "--out", tmp_path / "big"], capsys)[0] == 0
    (tmp_path / "red.txt").write_text("z1^2 + z2\n")
    code, out, _ = run(["verify", "--pk", tmp_path / "big.pub", "--target", ",".join(["0"] * 16),
                        "--reduced", tmp_path / "red.txt"], capsys)
    assert "degree=PASS" in out and "exhaustive=SKIPPED" in out
    assert code == 0


def test_bench_hole_sweep(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(["bench", "--method", "hole", "--sweep", "6,9,12", "--out", out], capsys)[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3
    cols = [int(r["matrix_cols"]) for r in rows]
    assert cols == [comb(int(r["n"]) + int(r["m"]) + 2, 2) for r in rows]
    assert cols == sorted(cols) and all(r["ok"] == "1" for r in rows)


def test_bench_groebner_columns(capsys):
    code, out, _ = run(["bench", "--method", "groebner", "--sweep", "6,9"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [int(r["matrix_cols"]) for r in rows] == [210, 715]


def test_bench_empty_sweep(capsys):
    code, out, _ = run(["bench"], capsys)
    assert code == 0
    assert out == "n,m,t,s,q,method,seconds,matrix_rows,matrix_cols,expected_cols,relation_dim,ok\n"


def test_eval_and_invert(toy_files, capsys):
    code, out, _ = run(["eval", "--pk", toy_files / "toy.pub", "--input", "2,0,1,2,2,0"], capsys)
    assert code == 0 and out.strip() == "1,2,2,1,2"
    code, out, _ = run(["invert", "--sk", toy_files / "toy.sec", "--target", "1,2,2,1,2"], capsys)
    assert code == 0
    z = parse_vector(out.strip(), 3, 6)
    pk = load_public_key(toy_files / "toy.pub")
    assert public_eval(pk, z).tolist() == [1, 2, 2, 1, 2]


def test_invert_not_found(tmp_path, capsys):
    run(["keygen", "-n", 3, "-m", 5, "-t", 1, "-s", 1, "--out", tmp_path / "k"], capsys)
    pk = load_public_key(tmp_path / "k.pub")
    grid = np.indices((3, 3, 3)).reshape(3, -1).T
    image = {tuple(int(v) for v in w) for w in public_eval(pk, grid)}
    target = next(w for w in np.ndindex(*(3,) * 5) if w not in image)
    code, _, err = run(["invert", "--sk", tmp_path / "k.sec", "--retries", 8,
                        "--target", ",".join(map(str, target))], capsys)
    assert code == 2 and "status=NOT_FOUND" in err


def test_module_entry_point(toy_files):
    proc = subprocess.run(
        [sys.executable, "-m", "pesto_lab", "eval", "--pk", str(toy_files / "toy.pub"),
         "--input", "2,0,1,2,2,0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "1,2,2,1,2"
