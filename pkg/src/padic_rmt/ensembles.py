"""Samplers for the matrix laws driving the product process.

Supported one-step laws: a bi-invariant law with fixed singular numbers,
an exact-rational mixture of such laws, the top-left corner of a Haar
element of a larger group, matrices with i.i.d. uniform entries, and the
Haar / fixed-signature laws on the symplectic similitude group.

All draws are addressed through an RngStream path, so a trajectory is a
pure function of (master_seed, stream_index, spec), and redrawing a step
at a higher precision extends the same matrix instead of resampling it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf

from .errors import DimensionMismatch
from .padic import PadicMatrix, Prime, Signature, _p_int
from .rng import PathLike, RngStream

DEFAULT_PRECISION_BASE = 32


# ---------------------------------------------------------------------------
# Ensemble specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedSN:
    lam: Signature


@dataclass(frozen=True)
class SNMixture:
    components: tuple[tuple[Signature, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("mixture needs at least one component")
        total = Fraction(0)
        for lam, prob in self.components:
            if prob <= 0:
                raise ValueError("mixture probabilities must be positive")
            total += prob
        if total != 1:
            raise ValueError(f"mixture probabilities sum to {total}, not 1")


@dataclass(frozen=True)
class CornerOfHaar:
    """n x n corner of a Haar element of the invertible group of the given
    ambient size; ambient None means i.i.d. uniform entries (infinite limit)."""

    ambient: int | None


@dataclass(frozen=True)
class HaarEntries:
    pass


@dataclass(frozen=True)
class GSpHaar:
    half: int


@dataclass(frozen=True)
class GSpFixedSN:
    lam: Signature


Kind = FixedSN | SNMixture | CornerOfHaar | HaarEntries | GSpHaar | GSpFixedSN


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative description of the law of one step matrix."""

    p: Prime
    n: int
    kind: Kind
    precision_base: int = DEFAULT_PRECISION_BASE

    def __post_init__(self) -> None:
        if isinstance(self.p, int):
            object.__setattr__(self, "p", Prime(self.p))
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.precision_base < 4:
            raise ValueError("precision_base too small")
        k = self.kind
        if isinstance(k, FixedSN) and len(k.lam) != self.n:
            raise ValueError("fixed signature length must equal n")
        if isinstance(k, SNMixture):
            for lam, _ in k.components:
                if len(lam) != self.n:
                    raise ValueError("mixture signature length must equal n")
        if isinstance(k, CornerOfHaar) and k.ambient is not None and k.ambient < self.n:
            raise ValueError("ambient size must be at least n")
        if isinstance(k, (GSpHaar, GSpFixedSN)):
            if self.n % 2:
                raise ValueError("symplectic dimension must be even")
            if isinstance(k, GSpHaar) and 2 * k.half != self.n:
                raise ValueError("GSpHaar half-dimension inconsistent with n")
            if isinstance(k, GSpFixedSN):
                from .symplectic import require_balanced

                if len(k.lam) != self.n:
                    raise ValueError("fixed signature length must equal n")
                require_balanced(k.lam)

    @property
    def is_symplectic(self) -> bool:
        return isinstance(self.kind, (GSpHaar, GSpFixedSN))

    def finite_sn_law(self) -> dict[Signature, Fraction] | None:
        """Exact law of the step signature, when it has finite support."""
        k = self.kind
        if isinstance(k, (FixedSN, GSpFixedSN)):
            return {k.lam: Fraction(1)}
        if isinstance(k, SNMixture):
            return {lam: prob for lam, prob in k.components}
        if isinstance(k, GSpHaar):
            return {Signature.zeros(self.n): Fraction(1)}
        return None

    def to_json(self) -> dict:
        k = self.kind
        if isinstance(k, FixedSN):
            kind = {"FixedSN": [str(x) for x in k.lam]}
        elif isinstance(k, SNMixture):
            kind = {
                "SNMixture": [
                    [[str(x) for x in lam], str(prob)] for lam, prob in k.components
                ]
            }
        elif isinstance(k, CornerOfHaar):
            kind = {"CornerOfHaar": "infinity" if k.ambient is None else k.ambient}
        elif isinstance(k, HaarEntries):
            kind = {"HaarEntries": {}}
        elif isinstance(k, GSpHaar):
            kind = {"GSpHaar": k.half}
        else:
            kind = {"GSpFixedSN": [str(x) for x in k.lam]}
        return {
            "p": self.p.p,
            "n": self.n,
            "precision_base": self.precision_base,
            "kind": kind,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EnsembleSpec":
        kind_obj = obj["kind"]
        if len(kind_obj) != 1:
            raise ValueError("kind must have exactly one entry")
        name, payload = next(iter(kind_obj.items()))
        if name == "FixedSN":
            kind: Kind = FixedSN(_sig(payload))
        elif name == "SNMixture":
            comps = tuple(
                (_sig(lam), Fraction(prob)) for lam, prob in payload
            )
            kind = SNMixture(comps)
        elif name == "CornerOfHaar":
            amb = None if payload in ("infinity", None) else int(payload)
            kind = CornerOfHaar(amb)
        elif name == "HaarEntries":
            kind = HaarEntries()
        elif name == "GSpHaar":
            kind = GSpHaar(int(payload))
        elif name == "GSpFixedSN":
            kind = GSpFixedSN(_sig(payload))
        else:
            raise ValueError(f"unknown ensemble kind {name!r}")
        return cls(
            p=Prime(int(obj["p"])),
            n=int(obj["n"]),
            kind=kind,
            precision_base=int(obj.get("precision_base", DEFAULT_PRECISION_BASE)),
        )


def _sig(xs) -> Signature:
    return Signature(tuple(int(x) for x in xs))


# ---------------------------------------------------------------------------
# Elementary draws
# ---------------------------------------------------------------------------


def sample_uniform_residue(
    rng: RngStream, p: Prime | int, precision: int, path: PathLike = ("scalar",)
) -> int:
    """One uniform residue in [0, p^precision) with i.i.d. base-p digits."""
    return rng.residue(path, _p_int(p), precision)


def _det_mod_p(rows: list[list[int]], p: int) -> int:
    """Determinant mod p by elimination; rows is consumed."""
    n = len(rows)
    det = 1
    for c in range(n):
        piv = None
        for r in range(c, n):
            if rows[r][c] % p:
                piv = r
                break
        if piv is None:
            return 0
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        inv = pow(rows[c][c], -1, p)
        det = det * rows[c][c] % p
        for r in range(c + 1, n):
            f = rows[r][c] * inv % p
            if f:
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[c])]
    return det % p


def _haar_gl_grid(
    n: int, p: int, precision: int, rng: RngStream, path: PathLike
) -> list[list[int]]:
    """Uniform residues conditioned on invertibility mod p (whole-matrix
    rejection; acceptance is decided by the first digit of every entry, so
    the accepted attempt does not depend on the precision)."""
    nn = n * n
    attempt = 0
    while True:
        first = rng.sliced_first_digits(path, nn, p, attempt)
        if n == 2:
            ok = (first[0] * first[3] - first[1] * first[2]) % p != 0
        else:
            ok = _det_mod_p([first[i * n : (i + 1) * n] for i in range(n)], p) != 0
        if ok:
            flat = rng.sliced_residues(path, nn, p, precision, attempt)
            return [flat[i * n : (i + 1) * n] for i in range(n)]
        attempt += 1


def sample_haar_gl(
    n: int,
    p: Prime | int,
    precision: int,
    rng: RngStream,
    path: PathLike = ("haar",),
) -> PadicMatrix:
    """Precision-N truncation of the Haar measure on the integral invertible
    group: uniform residues conditioned on invertibility mod p."""
    pi = _p_int(p)
    grid = _haar_gl_grid(n, pi, precision, rng, path)
    return PadicMatrix(pi, precision, 0, tuple(tuple(row) for row in grid))


def _bi_invariant_grid(
    lam: Signature,
    rows: int,
    cols: int,
    p: int,
    precision: int,
    rng: RngStream,
    path: PathLike,
) -> tuple[list[list[int]], int]:
    """Grid and shift of U * diag(p^lam) * V with independent Haar U, V."""
    if rows > cols or len(lam) != rows:
        raise DimensionMismatch("need len(lam) == rows <= cols")
    shift = min(0, lam[len(lam) - 1])
    u = _haar_gl_grid(rows, p, precision, rng, path + ("U",))
    v = _haar_gl_grid(cols, p, precision, rng, path + ("V",))
    mod = p**precision
    if rows == cols == 2:
        s0, s1 = p ** (lam[0] - shift), p ** (lam[1] - shift)
        (a, b), (c, d) = u
        (v00, v01), (v10, v11) = v
        v00 *= s0
        v01 *= s0
        v10 *= s1
        v11 *= s1
        return [
            [(a * v00 + b * v10) % mod, (a * v01 + b * v11) % mod],
            [(c * v00 + d * v10) % mod, (c * v01 + d * v11) % mod],
        ], shift
    # diag(p^(lam-shift)) * V scales the first `rows` rows of V
    dv = [
        [x * p ** (lam[i] - shift) % mod for x in v[i]] for i in range(rows)
    ]
    grid = [
        [sum(u[i][k] * dv[k][j] for k in range(rows)) % mod for j in range(cols)]
        for i in range(rows)
    ]
    return grid, shift


def sample_bi_invariant(
    lam: Signature,
    rows: int,
    cols: int,
    p: Prime | int,
    precision: int | None,
    rng: RngStream,
    path: PathLike = ("bi",),
) -> PadicMatrix:
    """One draw from the unique bi-invariant law with the given singular
    numbers. Default precision: signature spread + DEFAULT_PRECISION_BASE."""
    pi = _p_int(p)
    if precision is None:
        precision = lam.spread() + DEFAULT_PRECISION_BASE
    grid, shift = _bi_invariant_grid(lam, rows, cols, pi, precision, rng, path)
    return PadicMatrix(pi, precision, shift, tuple(tuple(r) for r in grid))


def sample_corner_of_haar(
    n: int,
    m: int,
    ambient: int | float | None,
    p: Prime | int,
    precision: int,
    rng: RngStream,
    path: PathLike = ("corner",),
) -> PadicMatrix:
    """Top n x m block of a Haar element of the ambient group; an infinite
    ambient size degenerates to i.i.d. uniform entries."""
    pi = _p_int(p)
    if ambient in (None, inf):
        flat = rng.sliced_residues(path, n * m, pi, precision)
        grid = [flat[i * m : (i + 1) * m] for i in range(n)]
        return PadicMatrix(pi, precision, 0, tuple(tuple(r) for r in grid))
    ambient = int(ambient)
    if not n <= m <= ambient:
        raise DimensionMismatch("need n <= m <= ambient")
    big = _haar_gl_grid(ambient, pi, precision, rng, path)
    grid = [row[:m] for row in big[:n]]
    return PadicMatrix(pi, precision, 0, tuple(tuple(r) for r in grid))


def _mixture_pick(
    components: tuple[tuple[Signature, Fraction], ...],
    rng: RngStream,
    path: PathLike,
) -> Signature:
    denom = 1
    for _, prob in components:
        denom = denom * prob.denominator // _gcd(denom, prob.denominator)
    x = rng.uniform_int(path, denom)
    acc = 0
    for lam, prob in components:
        acc += prob.numerator * (denom // prob.denominator)
        if x < acc:
            return lam
    raise AssertionError("mixture probabilities did not cover [0,1)")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Step-matrix dispatch
# ---------------------------------------------------------------------------


def step_precision(spec: EnsembleSpec, lam: Signature | None = None) -> int:
    """Precision rule: signature spread (when known) plus the base margin."""
    if lam is not None:
        return lam.spread() + spec.precision_base
    return spec.precision_base


def step_grid(
    spec: EnsembleSpec,
    rng: RngStream,
    step: int = 0,
    precision: int | None = None,
) -> tuple[list[list[int]], int, int]:
    """Raw (grid, shift, precision) of one step draw; the lean path used by
    the trajectory engine."""
    p = spec.p.p
    n = spec.n
    path: PathLike = ("step", step)
    k = spec.kind
    if isinstance(k, FixedSN):
        N = precision or step_precision(spec, k.lam)
        grid, shift = _bi_invariant_grid(k.lam, n, n, p, N, rng, path)
        return grid, shift, N
    if isinstance(k, SNMixture):
        lam = _mixture_pick(k.components, rng, path + ("mix",))
        N = precision or step_precision(spec, lam)
        grid, shift = _bi_invariant_grid(lam, n, n, p, N, rng, path)
        return grid, shift, N
    if isinstance(k, CornerOfHaar) and k.ambient is not None:
        N = precision or spec.precision_base
        big = _haar_gl_grid(k.ambient, p, N, rng, path)
        return [row[:n] for row in big[:n]], 0, N
    if isinstance(k, (CornerOfHaar, HaarEntries)):
        N = precision or spec.precision_base
        flat = rng.sliced_residues(path, n * n, p, N)
        return [flat[i * n : (i + 1) * n] for i in range(n)], 0, N
    if isinstance(k, GSpHaar):
        from .symplectic import sample_haar_gsp

        N = precision or spec.precision_base
        mat = sample_haar_gsp(k.half, p, N, rng, path).matrix
        return [list(r) for r in mat.residues], mat.shift, N
    if isinstance(k, GSpFixedSN):
        from .symplectic import sample_bi_invariant_gsp

        N = precision or step_precision(spec, k.lam)
        mat = sample_bi_invariant_gsp(k.lam, p, N, rng, path).matrix
        return [list(r) for r in mat.residues], mat.shift, N
    raise TypeError(f"unknown kind {k!r}")


def draw_step_matrix(
    spec: EnsembleSpec,
    rng: RngStream,
    step: int = 0,
    precision: int | None = None,
) -> PadicMatrix:
    """One i.i.d. sample of the step matrix. Identical (rng, spec, step,
    precision) always return the same matrix; a larger precision returns the
    same matrix carried to more digits."""
    grid, shift, n_used = step_grid(spec, rng, step, precision)
    return PadicMatrix(
        spec.p.p, n_used, shift, tuple(tuple(r) for r in grid)
    )
