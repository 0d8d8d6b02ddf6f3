"""The Pesto scheme: key generation, public evaluation and trapdoor inversion.

Secret-side polynomials use variables ``x1..xt, y1..y(n-t)``.  The central
map is ``G(x, y) = (x - q(y), U(x - q(y), y))`` and the public key is
``A1 o G o A2`` in variables ``z1..zn``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import gf
from .mpoly import (
    AffineMap,
    Polynomial,
    apply_affine_to_system,
    evaluate_system,
    parse_poly,
    render_poly,
    scheme_names,
    substitute_many,
    variable_names,
)

DEFAULT_RETRIES = 64


class PreimageNotFound(LookupError):
    """Trapdoor inversion gave up after its vinegar resampling budget."""


@dataclass(frozen=True)
class PestoParams:
    n: int
    m: int
    t: int
    s: int
    q: int = 3

    def __post_init__(self):
        for name in ("n", "m", "t", "s"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.t > min(self.n, self.m):
            raise ValueError(f"constraint t <= min(n, m) violated: t={self.t}, n={self.n}, m={self.m}")
        if not 0 < self.s <= self.n - self.t:
            raise ValueError(f"constraint 0 < s <= n - t violated: s={self.s}, n - t={self.n - self.t}")
        gf.check_modulus(self.q)

    @property
    def oil(self) -> list[int]:
        """Indices (in x, y order) of the oil variables y_{s+1}..y_{n-t}."""
        return list(range(self.t + self.s, self.n))

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "t": self.t, "s": self.s, "q": self.q}


@dataclass(frozen=True)
class SecretKey:
    params: PestoParams
    qmap: list  # t polynomials in the n - t y-variables
    U: list  # m - t polynomials in x1..xt, y1..y(n-t)
    A1: AffineMap
    A2: AffineMap

    def __post_init__(self):
        p = self.params
        if len(self.qmap) != p.t or len(self.U) != p.m - p.t:
            raise ValueError("secret key has the wrong number of polynomials")
        if self.A1.dim != p.m or self.A2.dim != p.n:
            raise ValueError("affine layers have the wrong dimension")
        for f in self.qmap:
            if f.nvars != p.n - p.t or f.degree != 2:
                raise ValueError("every q-map component must be a degree-2 polynomial in the y-variables")
        oil = set(p.oil)
        for u in self.U:
            if u.nvars != p.n or u.degree > 2:
                raise ValueError("U components must be quadratic in n variables")
            if has_oil_oil_term(u, oil):
                raise ValueError("U component contains an oil x oil monomial")


@dataclass(frozen=True)
class PublicKey:
    params: PestoParams
    gpub: list = field(repr=False)

    def __post_init__(self):
        if len(self.gpub) != self.params.m:
            raise ValueError("public key has the wrong number of polynomials")


def has_oil_oil_term(f: Polynomial, oil) -> bool:
    oil = sorted(oil)
    quad = f.exps[f.exps.sum(axis=1) == 2]
    return bool((quad[:, oil].sum(axis=1) == 2).any()) if oil else False


# -- key generation ------------------------------------------------------------


def _random_poly(exps: np.ndarray, q: int, rng, nvars: int) -> Polynomial:
    return Polynomial.from_arrays(nvars, q, exps, rng.integers(0, q, size=exps.shape[0]))


def _quadratic_exps(nvars: int, pairs) -> np.ndarray:
    rows = []
    for j, k in pairs:
        e = [0] * nvars
        e[j] += 1
        e[k] += 1
        rows.append(e)
    return np.array(rows, dtype=np.int64).reshape(-1, nvars)


def sample_secret_key(params: PestoParams, rng: np.random.Generator) -> SecretKey:
    n, m, t, s, q = params.n, params.m, params.t, params.s, params.q
    ny = n - t
    eye_y = np.eye(ny, dtype=np.int64)
    qmap = []
    for _ in range(t):
        quad = _quadratic_exps(ny, [(j, k) for j in range(ny) for k in range(j, ny)])
        while True:
            top = _random_poly(quad, q, rng, ny)
            if not top.is_zero():
                break
        affine = np.vstack([eye_y, np.zeros((1, ny), dtype=np.int64)])
        qmap.append(top + _random_poly(affine, q, rng, ny))

    vinegar = range(t + s)
    oil = range(t + s, n)
    pairs = [(j, k) for j in vinegar for k in vinegar if j <= k] + [(j, k) for j in vinegar for k in oil]
    quad = _quadratic_exps(n, pairs)
    affine = np.vstack([np.eye(n, dtype=np.int64), np.zeros((1, n), dtype=np.int64)])
    U = [
        _random_poly(np.vstack([quad, affine]), q, rng, n)
        for _ in range(m - t)
    ]
    A1 = AffineMap.random(m, q, rng)
    A2 = AffineMap.random(n, q, rng)
    return SecretKey(params, qmap, U, A1, A2)


def central_map(sk: SecretKey) -> list[Polynomial]:
    """The secret map ``G(x, y) = (x - q(y), U(x - q(y), y))``."""
    p = sk.params
    n, t, q = p.n, p.t, p.q
    ys = list(range(t, n))
    xs = [Polynomial.variable(n, q, i) for i in range(n)]
    shifted = [xs[i] - sk.qmap[i].embed(n, ys) for i in range(t)]
    return shifted + substitute_many(sk.U, shifted + xs[t:])


def assemble_public(sk: SecretKey) -> PublicKey:
    """``G_pub = A1 o G o A2``.

    ``G o A2`` is built from the quadratic layer: the images of ``x - q(y)``
    and of the y-variables under ``A2`` are computed first and ``U`` is then
    evaluated on them, which keeps every product at most quadratic times
    quadratic.
    """
    p = sk.params
    n, t = p.n, p.t
    lin = sk.A2.components()
    ys = lin[t:]
    shifted = [lin[i] - sk.qmap[i].substitute(ys) for i in range(t)]
    g_a2 = shifted + substitute_many(sk.U, shifted + ys)
    return PublicKey(p, apply_affine_to_system(sk.A1, g_a2))


def keygen(params: PestoParams, seed=None) -> tuple[SecretKey, PublicKey]:
    rng = np.random.default_rng(seed)
    sk = sample_secret_key(params, rng)
    return sk, assemble_public(sk)


def public_eval(pk: PublicKey, z) -> np.ndarray:
    """Evaluate the public map at one point (1-D) or many points (2-D)."""
    z = np.asarray(z, dtype=np.int64)
    single = z.ndim == 1
    pts = z.reshape(1, -1) if single else z
    if pts.shape[1] != pk.params.n:
        raise ValueError(f"input must have length {pk.params.n}")
    out = evaluate_system(pk.gpub, pts)
    return out[0] if single else out


def secret_invert(sk: SecretKey, w, seed=None, retries: int = DEFAULT_RETRIES) -> np.ndarray:
    """Find some ``z`` with ``G_pub(z) = w`` using the trapdoor.

    Undo ``A1`` to get ``(a, b)``.  Since ``x - q(y) = a`` fixes the first
    argument of ``U``, fixing the vinegar variables ``y1..ys`` leaves a
    linear system in the oil variables.  Vinegar values are resampled up to
    ``retries`` times.  Raises :class:`PreimageNotFound` when the budget runs
    out; that does not prove ``w`` has no preimage.
    """
    p = sk.params
    n, m, t, s, q = p.n, p.m, p.t, p.s, p.q
    w = gf.as_field_array(w, q).ravel()
    if w.size != m:
        raise ValueError(f"target must have length {m}")
    rng = np.random.default_rng(seed)
    ab = sk.A1.inverse()(w)
    a, b = ab[:t], ab[t:]
    A2_inv = sk.A2.inverse()
    oil = p.oil
    # x_1..x_t of U fixed to a; U becomes a polynomial in the n - t y-variables
    u_of_y = [u.specialize({i: int(a[i]) for i in range(t)}) for u in sk.U]
    for _ in range(retries):
        vin = rng.integers(0, q, size=s)
        fixed = {i: int(vin[i]) for i in range(s)}
        lin = [u.specialize(fixed) for u in u_of_y]  # in the n - t - s oil variables
        k = len(oil)
        M = np.zeros((len(lin), k), dtype=np.int64)
        rhs = np.zeros(len(lin), dtype=np.int64)
        for r, f in enumerate(lin):
            if f.degree > 1:
                raise RuntimeError("U is not linear in the oil variables")
            for e, c in zip(f.exps, f.coeffs):
                if e.any():
                    M[r, int(np.flatnonzero(e)[0])] = c
                else:
                    rhs[r] = (rhs[r] - c) % q
            rhs[r] = (rhs[r] + b[r]) % q
        sol = gf.solve(M, rhs, q)
        if sol is None:
            continue
        part, kernel = sol
        if kernel.shape[0]:
            part = (part + gf.matmul(rng.integers(0, q, size=(1, kernel.shape[0])), kernel, q).ravel()) % q
        y = np.concatenate([vin, part])
        x = np.array([(int(a[i]) + sk.qmap[i].evaluate(y)) % q for i in range(t)], dtype=np.int64)
        return A2_inv(np.concatenate([x, y]))
    raise PreimageNotFound(f"no preimage found after {retries} vinegar samples")


# -- serialization ---------------------------------------------------------------


def public_names(n: int) -> list[str]:
    return variable_names("z", n)


def _affine_to_json(A: AffineMap) -> dict:
    return {"matrix": A.matrix.tolist(), "translation": A.translation.tolist()}


def _affine_from_json(d: dict, q: int) -> AffineMap:
    return AffineMap(d["matrix"], d["translation"], q)


def params_from_json(d: dict) -> PestoParams:
    return PestoParams(int(d["n"]), int(d["m"]), int(d["t"]), int(d["s"]), int(d.get("q", 3)))


def secret_key_to_json(sk: SecretKey) -> dict:
    p = sk.params
    ny = variable_names("y", p.n - p.t)
    names = scheme_names(p.n, p.t)
    return {
        "params": p.as_dict(),
        "qmap": [render_poly(f, ny) for f in sk.qmap],
        "U": [render_poly(u, names) for u in sk.U],
        "A1": _affine_to_json(sk.A1),
        "A2": _affine_to_json(sk.A2),
        "gpub": [render_poly(g, public_names(p.n)) for g in assemble_public(sk).gpub],
    }


def secret_key_from_json(d: dict) -> SecretKey:
    p = params_from_json(d["params"])
    ny = variable_names("y", p.n - p.t)
    names = scheme_names(p.n, p.t)
    sk = SecretKey(
        p,
        [parse_poly(s, ny, p.q) for s in d["qmap"]],
        [parse_poly(s, names, p.q) for s in d["U"]],
        _affine_from_json(d["A1"], p.q),
        _affine_from_json(d["A2"], p.q),
    )
    if "gpub" in d:
        stored = [parse_poly(s, public_names(p.n), p.q) for s in d["gpub"]]
        if stored != assemble_public(sk).gpub:
            raise ValueError("stored public polynomials do not match the secret key")
    return sk


def public_key_to_json(pk: PublicKey) -> dict:
    p = pk.params
    return {"params": p.as_dict(), "gpub": [render_poly(g, public_names(p.n)) for g in pk.gpub]}


def public_key_from_json(d: dict) -> PublicKey:
    p = params_from_json(d["params"])
    return PublicKey(p, [parse_poly(s, public_names(p.n), p.q) for s in d["gpub"]])


def dump_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def save_secret_key(sk: SecretKey, path) -> None:
    dump_json(secret_key_to_json(sk), path)


def save_public_key(pk: PublicKey, path) -> None:
    dump_json(public_key_to_json(pk), path)


def load_secret_key(path) -> SecretKey:
    return secret_key_from_json(json.loads(Path(path).read_text()))


def load_public_key(path) -> PublicKey:
    return public_key_from_json(json.loads(Path(path).read_text()))


def load_fixture(name: str = "toy"):
    """Bundled example key: returns ``(sk, pk, ipt, opt)``."""
    try:
        text = resources.files("pesto_lab.data").joinpath(f"{name}.json").read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"no fixture named {name!r}") from None
    try:
        d = json.loads(text)
        sk = secret_key_from_json(d)
        ipt = np.array(d["ipt"], dtype=np.int64)
        opt = np.array(d["opt"], dtype=np.int64)
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"corrupt fixture {name!r}: {exc}") from exc
    return sk, assemble_public(sk), ipt, opt
