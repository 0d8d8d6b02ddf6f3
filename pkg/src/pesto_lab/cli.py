"""Command-line front end: ``pesto-lab {keygen,eval,invert,attack,verify,bench}``.

Exit codes: 0 success, 1 usage or parameter error, 2 attack or verification
failure.  Reduced systems go to ``--out`` (or stdout), one polynomial per
line; transcripts are ``key=value`` lines on stderr.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import groebner, hole, oracle, scheme
from .mpoly import count_monomials, parse_poly, render_poly
from .scheme import PestoParams

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_vector(value: str, q: int, length: int | None = None) -> np.ndarray:
    """Comma-separated residues, or the path of a file holding them."""
    path = Path(value)
    if path.is_file():
        value = path.read_text()
    try:
        vec = np.array([int(v) for v in value.replace("\n", ",").split(",") if v.strip()], dtype=np.int64)
    except ValueError:
        raise UsageError(f"cannot parse vector {value!r}") from None
    if length is not None and vec.size != length:
        raise UsageError(f"expected a vector of length {length}, got {vec.size}")
    if ((vec < 0) | (vec >= q)).any():
        raise UsageError(f"vector entries must lie in [0, {q})")
    return vec


def format_vector(v) -> str:
    return ",".join(str(int(x)) for x in v)


def emit(stream, **fields):
    for key, value in fields.items():
        print(f"{key}={value}", file=stream)


def write_system(polys, n: int, out) -> None:
    names = scheme.public_names(n)
    text = "".join(render_poly(p, names) + "\n" for p in polys)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def read_system(path, n: int, q: int):
    names = scheme.public_names(n)
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    return [parse_poly(ln, names, q) for ln in lines]


def _params(args) -> PestoParams:
    missing = [f for f in ("n", "m", "t", "s") if getattr(args, f) is None]
    if missing:
        raise UsageError("missing parameter(s): " + ", ".join("-" + f for f in missing))
    try:
        return PestoParams(args.n, args.m, args.t, args.s, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands ------------------------------------------------------------------


def cmd_keygen(args) -> int:
    params = _params(args)
    sk, pk = scheme.keygen(params, args.seed)
    prefix = args.out or "pesto"
    scheme.save_secret_key(sk, f"{prefix}.sec")
    scheme.save_public_key(pk, f"{prefix}.pub")
    emit(sys.stderr, secret_key=f"{prefix}.sec", public_key=f"{prefix}.pub",
         polynomials=len(pk.gpub), max_degree=oracle.max_degree(pk.gpub))
    return EXIT_OK


def cmd_eval(args) -> int:
    pk = _load_pk(args)
    z = parse_vector(args.input, pk.params.q, pk.params.n)
    print(format_vector(scheme.public_eval(pk, z)))
    return EXIT_OK


def cmd_invert(args) -> int:
    if not args.sk:
        raise UsageError("--sk is required")
    sk = scheme.load_secret_key(args.sk)
    w = _target(args, sk.params)
    try:
        z = scheme.secret_invert(sk, w, args.seed, args.retries)
    except scheme.PreimageNotFound as exc:
        emit(sys.stderr, status="NOT_FOUND", reason=str(exc))
        return EXIT_FAILURE
    print(format_vector(z))
    return EXIT_OK


def run_attack(pk, target, method: str, samples=None, seed=None) -> tuple[list, dict, bool]:
    """Run one attack; returns ``(equations, transcript, ok)``."""
    p = pk.params
    info = {"method": method, "n": p.n, "m": p.m, "q": p.q, "target": format_vector(target)}
    if method == "groebner":
        red = groebner.mutant_elimination(pk, target)
        info.update(
            macaulay_columns=red.columns,
            macaulay_rows=red.rows,
            passes=len(red.passes) - 1,
        )
        for stage in red.passes:
            info[f"pass{stage['pass']}"] = f"appended:{stage['appended']},rank:{stage['rank']}"
        info.update(quadratic_equations=len(red.system), residual_equations=len(red.residual))
        return red.equations, info, red.ok
    if method == "hole":
        res = hole.hole_attack(pk, target, samples, seed)
        info.update(
            samples=res.samples,
            matrix=f"{res.matrix_shape[0]}x{res.matrix_shape[1]}",
            relation_dim=res.relations.dim,
            short_relations=len(res.short),
            equations=len(res.system),
        )
        return res.system, info, res.ok
    raise UsageError(f"unknown method {method!r}")


def cmd_attack(args) -> int:
    pk = _load_pk(args)
    target = _target(args, pk.params)
    equations, info, ok = run_attack(pk, target, args.method, args.samples, args.seed)
    info["max_degree"] = oracle.max_degree(equations) if equations else 0
    info["status"] = "OK" if ok else "STRUCTURAL_FAILURE"
    write_system(equations, pk.params.n, args.out)
    emit(sys.stderr, **info)
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_verify(args) -> int:
    pk = _load_pk(args)
    p = pk.params
    target = _target(args, p)
    if not args.reduced:
        raise UsageError("--reduced is required")
    reduced = read_system(args.reduced, p.n, p.q)
    deg = oracle.max_degree(reduced) if reduced else 0
    passed = deg <= 2
    emit(sys.stdout, degree="PASS" if passed else "FAIL", max_degree=deg)
    shifted = [g - int(c) for g, c in zip(pk.gpub, target)]
    try:
        expected = oracle.brute_force_solutions(shifted, p.q, p.n)
        got = oracle.brute_force_solutions(reduced, p.q, p.n)
    except oracle.ScaleGuardExceeded as exc:
        emit(sys.stdout, exhaustive="SKIPPED", reason=str(exc))
    else:
        same = oracle.solution_set_equal(expected, got)
        emit(sys.stdout, exhaustive="PASS" if same else "FAIL",
             expected_solutions=len(expected), reduced_solutions=len(got))
        if not same:
            diff = oracle.first_difference(expected, got)
            side = "missing" if diff in expected else "extra"
            emit(sys.stdout, first_difference=format_vector(diff), kind=side)
        passed = passed and same
    emit(sys.stdout, verdict="PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_FAILURE


BENCH_FIELDS = ["n", "m", "t", "s", "q", "method", "seconds", "matrix_rows", "matrix_cols",
                "expected_cols", "relation_dim", "ok"]


def sweep_params(n: int, args) -> PestoParams:
    """Shape used for a sweep point; m, t, s default to round(4n/5), n//3, (n-t)//3."""
    t = args.t if args.t is not None else max(1, n // 3)
    m = args.m if args.m is not None else max(t, round(4 * n / 5))
    s = args.s if args.s is not None else max(1, (n - t) // 3)
    return PestoParams(n, m, t, s, args.q)


def bench_row(params: PestoParams, method: str, seed=None) -> dict:
    sk, pk = scheme.keygen(params, seed)
    rng = np.random.default_rng(seed)
    target = scheme.public_eval(pk, rng.integers(0, params.q, size=params.n))
    start = time.perf_counter()
    if method == "hole":
        res = hole.hole_attack(pk, target, seed=seed)
        rows, cols = res.matrix_shape
        expected, rel, ok = hole.relation_monomial_count(params.n, params.m), res.relations.dim, res.ok
    else:
        red = groebner.mutant_elimination(pk, target)
        rows, cols = red.rows, red.columns
        expected, rel, ok = count_monomials(params.n, 4), "", red.ok
    elapsed = time.perf_counter() - start
    return {"n": params.n, "m": params.m, "t": params.t, "s": params.s, "q": params.q,
            "method": method, "seconds": f"{elapsed:.3f}", "matrix_rows": rows,
            "matrix_cols": cols, "expected_cols": expected, "relation_dim": rel, "ok": int(ok)}


def cmd_bench(args) -> int:
    ns = [int(v) for v in args.sweep.split(",") if v.strip()] if args.sweep else []
    try:
        grid = [sweep_params(n, args) for n in ns]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
        writer.writeheader()
        for params in grid:
            writer.writerow(bench_row(params, args.method, args.seed))
            out.flush()
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _load_pk(args):
    if not args.pk:
        raise UsageError("--pk is required")
    return scheme.load_public_key(args.pk)


def _target(args, params: PestoParams) -> np.ndarray:
    if not args.target:
        raise UsageError("--target is required")
    return parse_vector(args.target, params.q, params.m)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pesto-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-n", type=int)
        p.add_argument("-m", type=int)
        p.add_argument("-t", type=int)
        p.add_argument("-s", type=int)
        p.add_argument("-q", type=int, default=3)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--method", choices=["groebner", "hole"], default="hole")
        p.add_argument("--samples", type=int, help="HOLE sample count (default C(n+m+2,2)+20)")
        p.add_argument("--retries", type=int, default=scheme.DEFAULT_RETRIES)
        p.add_argument("--pk", help="public key file")
        p.add_argument("--sk", help="secret key file")
        p.add_argument("--target", help="comma-separated output vector, or a file holding one")
        p.add_argument("--out", help="output path (prefix for keygen)")
        return p

    common(sub.add_parser("keygen", help="generate a key pair")).set_defaults(func=cmd_keygen)
    p = common(sub.add_parser("eval", help="evaluate the public map"))
    p.add_argument("--input", required=True, help="comma-separated input vector")
    p.set_defaults(func=cmd_eval)
    common(sub.add_parser("invert", help="invert with the secret key")).set_defaults(func=cmd_invert)
    common(sub.add_parser("attack", help="reduce G_pub = target to quadrics")).set_defaults(func=cmd_attack)
    p = common(sub.add_parser("verify", help="check a reduced system against the public key"))
    p.add_argument("--reduced", help="reduced system file, one polynomial per line")
    p.set_defaults(func=cmd_verify)
    p = common(sub.add_parser("bench", help="time attacks over a parameter sweep (CSV)"))
    p.add_argument("--sweep", default="", help="comma-separated values of n")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
