"""Coherent sheaves on the projective line and the functor to Kronecker modules.

A sheaf is a direct sum of line bundles ``O(a)`` and torsion blocks
``k[u]/(u^L)`` supported at a rational point or at infinity. Sections of
``O(a)(n)`` use the monomial basis ``x^j y^(a+n-j)`` with ascending ``j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .core import HesselinkError, frac, fmt_q
from .hilbert import HilbertPoly, ack_parameters, gamma_nm, is_hn_type
from .quiver import (
    DEFAULT_BUDGET,
    DEFAULT_PRIMES,
    Quiver,
    QuiverHNResult,
    QuiverRepresentation,
    StabilityPair,
    hn_filtration_quiver,
)

INF = "inf"


@dataclass(frozen=True)
class TorsionBlock:
    point: Fraction | str
    length: int

    def __post_init__(self):
        pt = self.point
        if isinstance(pt, str) and pt.strip().lower() in ("inf", "infinity", "oo"):
            object.__setattr__(self, "point", INF)
        else:
            object.__setattr__(self, "point", frac(pt))
        if int(self.length) < 1:
            raise HesselinkError("TorsionBlock", "length must be positive")
        object.__setattr__(self, "length", int(self.length))

    @property
    def at_infinity(self) -> bool:
        return self.point == INF

    def to_json(self) -> dict:
        return {"point": INF if self.at_infinity else fmt_q(self.point), "length": self.length}


@dataclass(frozen=True)
class SheafP1:
    line_degrees: tuple[int, ...] = ()
    torsion: tuple[TorsionBlock, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "line_degrees", tuple(sorted((int(a) for a in self.line_degrees), reverse=True)))
        object.__setattr__(self, "torsion", tuple(self.torsion))

    def is_zero(self) -> bool:
        return not self.line_degrees and not self.torsion

    @property
    def torsion_length(self) -> int:
        return sum(b.length for b in self.torsion)

    def to_json(self) -> dict:
        return {"line_degrees": list(self.line_degrees), "torsion": [b.to_json() for b in self.torsion]}

    @classmethod
    def from_json(cls, obj: dict) -> "SheafP1":
        try:
            lines = tuple(int(a) for a in obj.get("line_degrees", []))
            tors = tuple(TorsionBlock(b["point"], int(b["length"])) for b in obj.get("torsion", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise HesselinkError("SheafP1", f"malformed sheaf: {exc}") from None
        return cls(lines, tors)

    def __str__(self) -> str:
        parts = [f"O({a})" for a in self.line_degrees]
        parts += [f"T({b.to_json()['point']},{b.length})" for b in self.torsion]
        return " + ".join(parts) or "0"


def _nonzero(label: str, e: SheafP1) -> None:
    if e.is_zero():
        raise HesselinkError(label, "the zero sheaf is not allowed")


def hilbert_poly_p1(e: SheafP1) -> HilbertPoly:
    _nonzero("hilbert_poly_p1", e)
    const = sum(a + 1 for a in e.line_degrees) + e.torsion_length
    return HilbertPoly((const, len(e.line_degrees)))


def cohomology_dims(e: SheafP1, n: int) -> tuple[int, int]:
    h0 = sum(max(0, a + n + 1) for a in e.line_degrees) + e.torsion_length
    h1 = sum(max(0, -a - n - 1) for a in e.line_degrees)
    return h0, h1


def regularity_bound(e: SheafP1) -> int:
    """Least ``n >= 0`` with ``E`` n-regular (``a + n >= 0`` for every summand)."""
    return max([0] + [-a for a in e.line_degrees])


def is_regular(e: SheafP1, n: int) -> bool:
    return cohomology_dims(e, n - 1)[1] == 0


def sheaf_hn_type(e: SheafP1) -> tuple[HilbertPoly, ...]:
    """Torsion first, then one entry ``r_a (t + a + 1)`` per degree, decreasing."""
    _nonzero("sheaf_hn_type", e)
    out = []
    if e.torsion_length:
        out.append(HilbertPoly((e.torsion_length,)))
    for a in sorted(set(e.line_degrees), reverse=True):
        r = e.line_degrees.count(a)
        out.append(HilbertPoly((r * (a + 1), r)))
    tau = tuple(out)
    if not is_hn_type(tau, hilbert_poly_p1(e)):  # pragma: no cover - structural
        raise HesselinkError("sheaf_hn_type", "computed type fails the HN-type check")
    return tau


# --- multiplication matrices ---------------------------------------------------------------------

def _line_block(a: int, n: int, m: int, i: int) -> list[list[Fraction]]:
    """Multiplication by ``x^i y^(k-i)`` from H^0(O(a+n)) to H^0(O(a+m))."""
    src, dst = a + n + 1, a + m + 1
    out = [[Fraction(0)] * src for _ in range(dst)]
    for j in range(src):
        out[i + j][j] = Fraction(1)
    return out


def _torsion_block(b: TorsionBlock, k: int, i: int) -> list[list[Fraction]]:
    """Multiplication by the section ``x^i y^(k-i)`` on ``k[u]/(u^L)``.

    Finite point ``p``: chart ``y = 1`` and ``u = x - p``, so the section acts as
    ``(u + p)^i``. Infinity: chart ``x = 1`` and ``u = y/x``, acting as ``u^(k-i)``.
    """
    L = b.length
    out = [[Fraction(0)] * L for _ in range(L)]
    if b.at_infinity:
        coeffs = {k - i: Fraction(1)}
    else:
        p = b.point
        coeffs = {s: comb(i, s) * p ** (i - s) for s in range(i + 1)}
    for c in range(L):
        for s, v in coeffs.items():
            if c + s < L and v:
                out[c + s][c] += v
    return out


def _block_diag(blocks: Sequence[list[list[Fraction]]], rows: int, cols: int) -> tuple[tuple[Fraction, ...], ...]:
    out = [[Fraction(0)] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        h = len(b)
        w = len(b[0]) if b else 0
        for i in range(h):
            for j in range(w):
                out[r0 + i][c0 + j] = b[i][j]
        r0 += h
        c0 += w
    return tuple(tuple(r) for r in out)


def _block_sizes(e: SheafP1, n: int) -> list[int]:
    return [a + n + 1 for a in e.line_degrees] + [b.length for b in e.torsion]


def multiplication_maps(e: SheafP1, n: int, m: int) -> list[tuple[tuple[Fraction, ...], ...]]:
    """One matrix per monomial ``x^i y^(m-n-i)``, ``i = 0..m-n``, in block-diagonal form."""
    k = m - n
    rows, cols = sum(_block_sizes(e, m)), sum(_block_sizes(e, n))
    maps = []
    for i in range(k + 1):
        blocks = [_line_block(a, n, m, i) for a in e.line_degrees]
        blocks += [_torsion_block(b, k, i) for b in e.torsion]
        maps.append(_block_diag(blocks, rows, cols))
    return maps


def phi_nm(e: SheafP1, n: int, m: int) -> QuiverRepresentation:
    _nonzero("phi_nm", e)
    if m <= n:
        raise HesselinkError("phi_nm", "need m > n")
    if not is_regular(e, n):
        raise HesselinkError("phi_nm", f"E not {n}-regular")
    q = Quiver.kronecker(m - n + 1)
    dims = (cohomology_dims(e, n)[0], cohomology_dims(e, m)[0])
    return QuiverRepresentation(q, dims, tuple(multiplication_maps(e, n, m)))


def phi_multi(e: SheafP1, ns: Sequence[int]) -> QuiverRepresentation:
    _nonzero("phi_multi", e)
    ns = [int(x) for x in ns]
    if len(ns) < 1 or any(a >= b for a, b in zip(ns, ns[1:])):
        raise HesselinkError("phi_multi", "ns must be strictly increasing")
    if not is_regular(e, ns[0]):
        raise HesselinkError("phi_multi", f"E not {ns[0]}-regular")
    q = Quiver.chain([b - a + 1 for a, b in zip(ns, ns[1:])])
    dims = tuple(cohomology_dims(e, x)[0] for x in ns)
    maps = []
    for a, b in zip(ns, ns[1:]):
        maps.extend(multiplication_maps(e, a, b))
    return QuiverRepresentation(q, dims, tuple(maps))


# --- ACK verification ----------------------------------------------------------------------------

@dataclass(frozen=True)
class AckReport:
    sheaf: SheafP1
    n: int
    m: int
    tau: tuple[HilbertPoly, ...]
    expected: tuple[tuple[int, ...], ...]
    computed: tuple[tuple[int, ...], ...]
    primes: tuple[int, ...]
    oracle: str

    @property
    def match(self) -> bool:
        return self.expected == self.computed

    def to_json(self) -> dict:
        return {
            "sheaf": self.sheaf.to_json(),
            "n": self.n,
            "m": self.m,
            "tau": [p.to_json() for p in self.tau],
            "expected": [list(d) for d in self.expected],
            "computed": [list(d) for d in self.computed],
            "match": self.match,
            "primes": list(self.primes),
            "oracle": self.oracle,
        }


def ack_stability(e: SheafP1, n: int, m: int) -> StabilityPair:
    d, theta, alpha = ack_parameters(hilbert_poly_p1(e), n, m)
    return StabilityPair(theta, alpha, d)


def verify_ack_hn(e: SheafP1, n: int, m: int, primes: Sequence[int] = DEFAULT_PRIMES,
                  budget: int = DEFAULT_BUDGET) -> AckReport:
    tau = sheaf_hn_type(e)
    expected = gamma_nm(tau, n, m)
    rep = phi_nm(e, n, m)
    hn: QuiverHNResult = hn_filtration_quiver(rep, ack_stability(e, n, m), budget, primes)
    return AckReport(e, n, m, tau, expected, hn.gamma, hn.primes, hn.oracle)


@dataclass(frozen=True)
class GridReport:
    cells: tuple[tuple[int, int, bool], ...]
    minimal: tuple[int, int] | None
    non_monotone: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "cells": [{"n": n, "m": m, "match": ok} for n, m, ok in self.cells],
            "minimal": list(self.minimal) if self.minimal else None,
            "non_monotone": [list(c) for c in self.non_monotone],
        }


def threshold_grid(e: SheafP1, n_max: int = 6, m_max: int = 14, primes: Sequence[int] = DEFAULT_PRIMES,
                   budget: int = DEFAULT_BUDGET) -> GridReport:
    """Match table over admissible ``(n, m)``.

    ``minimal`` is the lexicographically least matching cell; a cell is
    non-monotone when it fails although ``(n, m - 1)`` matched.
    """
    cells = []
    for n in range(regularity_bound(e), n_max + 1):
        for m in range(n + 1, m_max + 1):
            cells.append((n, m, verify_ack_hn(e, n, m, primes, budget).match))
    ok = {(n, m) for n, m, good in cells if good}
    minimal = min(ok) if ok else None
    bad = tuple((n, m) for n, m, good in cells if not good and (n, m - 1) in ok)
    return GridReport(tuple(cells), minimal, bad)


def first_match(e: SheafP1, n_max: int = 5, m_max: int = 12, primes: Sequence[int] = DEFAULT_PRIMES,
                budget: int = DEFAULT_BUDGET) -> AckReport | None:
    """First matching cell scanning ``n`` then ``m`` upward (None if none)."""
    for n in range(regularity_bound(e), n_max + 1):
        for m in range(n + 1, m_max + 1):
            rep = verify_ack_hn(e, n, m, primes, budget)
            if rep.match:
                return rep
    return None
