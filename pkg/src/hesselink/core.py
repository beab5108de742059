"""Exact scalars, vectors and matrices shared by the rest of the package.

Everything here works over :class:`fractions.Fraction` (or over ``Z/pZ`` with
plain ints where a prime is passed); no floating point is ever produced.
Matrices are tuples of row tuples.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


class HesselinkError(Exception):
    """Domain error raised by an operation of this package.

    ``label`` names the operation that refused the input; the CLI echoes it.
    """

    def __init__(self, label: str, message: str):
        super().__init__(f"{label}: {message}")
        self.label = label
        self.message = message


class BudgetExceeded(HesselinkError):
    pass


class CertificateError(RuntimeError):
    """An internal consistency check failed (never expected on valid input)."""


# --- scalars -----------------------------------------------------------------

def frac(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: every quantity in this package is exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(c in s for c in ".eE"):
            raise ValueError(f"not an exact rational: {x!r}")
        return Fraction(s)
    raise TypeError(f"not an exact rational: {x!r}")


def fmt_q(x) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def as_vector(v: Iterable) -> Vector:
    return tuple(frac(x) for x in v)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(as_vector(r) for r in rows)
    if m and len({len(r) for r in m}) != 1:
        raise ValueError("ragged matrix")
    return m


def shape(m: Sequence[Sequence], ncols: int | None = None) -> tuple[int, int]:
    if not m:
        return 0, (ncols or 0)
    return len(m), len(m[0])


def transpose(m: Sequence[Sequence], ncols: int = 0) -> list[list]:
    if not m:
        return [[] for _ in range(ncols)]
    return [list(col) for col in zip(*m)]


def mat_vec(m: Sequence[Sequence], v: Sequence, p: int = 0) -> list:
    out = [sum((a * b for a, b in zip(row, v)), 0) for row in m]
    return [x % p for x in out] if p else out


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence], p: int = 0,
            inner: int | None = None, ncols: int | None = None) -> list[list]:
    """Product ``a @ b``; ``inner``/``ncols`` disambiguate empty operands."""
    rows = len(a)
    k = inner if inner is not None else (len(a[0]) if a else len(b))
    cols = ncols if ncols is not None else (len(b[0]) if b else 0)
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(cols):
                    if bt[j]:
                        oi[j] += x * bt[j]
    if p:
        out = [[x % p for x in r] for r in out]
    return out


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


# --- echelon forms -------------------------------------------------------------

def _inv(x, p: int):
    return pow(x, -1, p) if p else 1 / Fraction(x)


def rref(rows: Sequence[Sequence], p: int = 0) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q (``p == 0``) or over F_p.

    Pivots are taken left to right and normalised to 1, so the output is
    canonical for the row space of the input.
    """
    m = [[(x % p) if p else frac(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv(m[r][c], p)
        row = [(x * inv) % p if p else x * inv for x in m[r]]
        m[r] = row
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                mi = m[i]
                if p:
                    m[i] = [(a - f * b) % p for a, b in zip(mi, row)]
                else:
                    m[i] = [a - f * b for a, b in zip(mi, row)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], p: int = 0) -> int:
    return len(rref(rows, p)[0])


def rank_and_basis(m: Sequence[Sequence], p: int = 0) -> tuple[int, list[tuple]]:
    """Rank of ``m`` and a reduced-echelon basis of its column space."""
    if not m or not m[0]:
        return 0, []
    basis, _ = rref(transpose(m), p)
    return len(basis), [tuple(b) for b in basis]


def nullspace(m: Sequence[Sequence], ncols: int, p: int = 0) -> list[list]:
    """Basis of ``{x : m x = 0}``, one vector per free column."""
    red, pivots = rref(m, p) if m else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    zero = 0 if p else Fraction(0)
    out = []
    for f in free:
        v = [zero] * ncols
        v[f] = 1 if p else Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = (-row[f]) % p if p else -row[f]
        out.append(v)
    return out


def solve(a: Sequence[Sequence], b: Sequence, p: int = 0) -> list | None:
    """One solution of ``a x = b`` or None when inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    red, pivots = rref(aug, p)
    if n in pivots:
        return None
    zero = 0 if p else Fraction(0)
    x = [zero] * n
    for row, pc in zip(red, pivots):
        x[pc] = row[n]
    return x


def inverse(m: Sequence[Sequence], p: int = 0) -> list[list]:
    n = len(m)
    one = 1 if p else Fraction(1)
    zero = 0 if p else Fraction(0)
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(m)]
    red, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("singular matrix")
    return [r[n:] for r in red]


def in_span(basis_rref: Sequence[Sequence], pivots: Sequence[int], v: Sequence, p: int = 0) -> bool:
    """Membership of ``v`` in the row space of an RREF matrix."""
    w = list(v)
    for row, pc in zip(basis_rref, pivots):
        f = w[pc]
        if f:
            if p:
                w = [(a - f * b) % p for a, b in zip(w, row)]
            else:
                w = [a - f * b for a, b in zip(w, row)]
    return not any(w)


# --- lattice utilities -----------------------------------------------------------

def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else 0


def primitive_integral(v: Sequence) -> tuple[int, ...]:
    """The primitive integer vector on the ray spanned by ``v``."""
    q = [frac(x) for x in v]
    if not any(q):
        raise HesselinkError("primitive_integral", "no primitive representative of the zero vector")
    den = reduce(lcm, (x.denominator for x in q), 1)
    ints = [int(x * den) for x in q]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class ComparableNormValue:
    """The real number ``pairing / sqrt(norm_sq)``, kept exact.

    Comparisons are decided by signs and squared cross products, so no root is
    ever extracted.
    """

    pairing: Fraction
    norm_sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "pairing", frac(self.pairing))
        object.__setattr__(self, "norm_sq", frac(self.norm_sq))
        if self.norm_sq < 0:
            raise ValueError("norm_sq must be nonnegative")

    def _cmp(self, other: "ComparableNormValue") -> int:
        return compare_norm_values(self, other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def to_json(self) -> dict:
        return {"pairing": fmt_q(self.pairing), "norm_sq": fmt_q(self.norm_sq)}


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def compare_norm_values(a: ComparableNormValue, b: ComparableNormValue) -> int:
    """-1, 0 or 1 as ``a.pairing/sqrt(a.norm_sq)`` is <, = or > the same for ``b``."""
    if a.norm_sq <= 0 or b.norm_sq <= 0:
        raise HesselinkError("compare_norm_values", "zero norm: value undefined")
    sa, sb = _sign(a.pairing), _sign(b.pairing)
    if sa != sb:
        return _sign(sa - sb)
    if sa == 0:
        return 0
    # same nonzero sign: compare squares, flipping when both negative
    lhs = a.pairing * a.pairing * b.norm_sq
    rhs = b.pairing * b.pairing * a.norm_sq
    return _sign(lhs - rhs) * sa
