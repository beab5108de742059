"""Torus instability: semistability of weight sets and Kempf adapted 1-PS.

A torus of rank ``dim`` carries a diagonal metric ``m`` and a character
``rho``. A finite set ``W`` of characters (the weights of a vector) cuts out
the cone ``C_W = {lam : <chi, lam> >= 0 for chi in W}``. ``W`` is semistable
when ``<rho, lam> >= 0`` on all of ``C_W``; otherwise the adapted 1-PS is the
primitive ray of ``C_W`` minimising ``<rho, lam> / ||lam||``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .core import (
    CertificateError,
    ComparableNormValue,
    HesselinkError,
    compare_norm_values,
    dot,
    frac,
    primitive_integral,
    rank,
    rref,
    solve,
)

Weight = tuple[int, ...]


# --- domain types ----------------------------------------------------------------------

@dataclass(frozen=True)
class WeightContext:
    dim: int
    metric: tuple[int, ...]
    rho: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "metric", tuple(int(x) for x in self.metric))
        object.__setattr__(self, "rho", tuple(int(x) for x in self.rho))
        if self.dim < 0 or len(self.metric) != self.dim or len(self.rho) != self.dim:
            raise HesselinkError("WeightContext", "metric and rho must have length dim")
        if any(x <= 0 for x in self.metric):
            raise HesselinkError("WeightContext", "metric entries must be positive")

    @classmethod
    def standard(cls, rho: Sequence[int], metric: Sequence[int] | None = None) -> "WeightContext":
        return cls(len(rho), tuple(metric) if metric is not None else (1,) * len(rho), tuple(rho))

    def pairing(self, lam: Sequence) -> Fraction:
        return Fraction(dot(self.rho, lam))

    def norm_sq(self, lam: Sequence) -> Fraction:
        return Fraction(sum(m * x * x for m, x in zip(self.metric, lam)))

    def value(self, lam: Sequence) -> ComparableNormValue:
        return ComparableNormValue(self.pairing(lam), self.norm_sq(lam))


def weight_set(weights: Iterable[Sequence[int]]) -> tuple[Weight, ...]:
    """Canonical (deduplicated, sorted) form of a set of integer weights."""
    out = set()
    for w in weights:
        t = tuple(int(x) for x in w)
        out.add(t)
    return tuple(sorted(out))


@dataclass(frozen=True)
class HalfspaceCone:
    dim: int
    normals: tuple[Weight, ...]

    def contains(self, lam: Sequence) -> bool:
        return all(dot(chi, lam) >= 0 for chi in self.normals)


@dataclass(frozen=True)
class AdaptedOnePS:
    lam: tuple[int, ...]
    value: ComparableNormValue
    active: tuple[Weight, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {"lambda": list(self.lam), **self.value.to_json()}


def cone_from_weight_set(weights: Iterable[Sequence[int]], dim: int | None = None) -> HalfspaceCone:
    ws = weight_set(weights)
    if dim is None:
        if not ws:
            raise HesselinkError("cone_from_weight_set", "dimension needed for an empty weight set")
        dim = len(ws[0])
    if any(len(w) != dim for w in ws):
        raise HesselinkError("cone_from_weight_set", "weights of inconsistent length")
    return HalfspaceCone(dim, ws)


# --- exact linear feasibility -----------------------------------------------------------

def _normalise(a: Sequence[Fraction], b: Fraction) -> tuple[tuple[Fraction, ...], Fraction]:
    """Scale ``a.x >= b`` by a positive factor so the first nonzero |a_i| is 1."""
    lead = next((abs(x) for x in a if x), None)
    if lead is None:
        return tuple(a), b
    return tuple(x / lead for x in a), b / lead


def lp_feasible(rows: Sequence[tuple[Sequence, object]], dim: int) -> bool:
    """Whether ``{x in Q^dim : a.x >= b for all (a, b) in rows}`` is nonempty.

    Exact phase-one simplex over rationals with Bland's rule. Free variables are
    split as ``x = u - v`` and each row gets a surplus and an artificial column.
    """
    rows = [([frac(x) for x in a], frac(b)) for a, b in rows]
    n = len(rows)
    if n == 0:
        return True
    width = 2 * dim + 2 * n
    tab = []
    for i, (a, b) in enumerate(rows):
        sign = -1 if b < 0 else 1
        line = [sign * x for x in a] + [-sign * x for x in a] + [Fraction(0)] * (2 * n) + [sign * b]
        line[2 * dim + i] = Fraction(-sign)
        line[2 * dim + n + i] = Fraction(1)
        tab.append(line)
    basis = [2 * dim + n + i for i in range(n)]
    # reduced costs of "minimise the sum of artificials"
    cost = [Fraction(0)] * (width + 1)
    for line in tab:
        for j in range(width + 1):
            cost[j] -= line[j]
    for j in range(2 * dim + n, width):
        cost[j] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, line in enumerate(tab):
            if line[enter] > 0:
                ratio = line[-1] / line[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # pragma: no cover - phase one is bounded below by zero
            break
        r = best[1]
        piv = tab[r][enter]
        tab[r] = [x / piv for x in tab[r]]
        for i, line in enumerate(tab):
            if i != r and line[enter]:
                f = line[enter]
                tab[i] = [x - f * y for x, y in zip(line, tab[r])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, tab[r])]
        basis[r] = enter
    return cost[-1] == 0


def fm_feasible(rows: Sequence[tuple[Sequence, object]], dim: int) -> bool:
    """Same question as :func:`lp_feasible`, by plain Fourier-Motzkin elimination.

    No redundancy pruning beyond keeping the tightest row per direction, so the
    row count can grow quickly; meant for small systems and cross-checks.
    """
    sys = {}
    for a, b in rows:
        na, nb = _normalise([frac(x) for x in a], frac(b))
        if na not in sys or nb > sys[na]:
            sys[na] = nb
    for k in range(dim):
        pos, neg, rest = [], [], {}
        for a, b in sys.items():
            if a[k] > 0:
                pos.append((a, b))
            elif a[k] < 0:
                neg.append((a, b))
            else:
                rest[a] = b
        for ap, bp in pos:
            for an, bn in neg:
                fp, fn = 1 / ap[k], 1 / -an[k]
                a = [x * fp + y * fn for x, y in zip(ap, an)]
                a[k] = Fraction(0)
                na, nb = _normalise(a, bp * fp + bn * fn)
                if na not in rest or nb > rest[na]:
                    rest[na] = nb
        sys = rest
    return all(b <= 0 for b in sys.values())


def is_weight_set_semistable(weights: Iterable[Sequence[int]], ctx: WeightContext) -> bool:
    """No rational lam with all ``<chi, lam> >= 0`` and ``<rho, lam> <= -1``."""
    ws = weight_set(weights)
    if not any(ctx.rho):
        return True
    rows = [(w, 0) for w in ws] + [(tuple(-r for r in ctx.rho), 1)]
    return not lp_feasible(rows, ctx.dim)


def implicit_equalities(cone: HalfspaceCone) -> tuple[Weight, ...]:
    """Normals that vanish identically on the cone."""
    out = []
    for chi in cone.normals:
        rows = [(w, 0) for w in cone.normals] + [(chi, 1)]
        if not lp_feasible(rows, cone.dim):
            out.append(chi)
    return tuple(out)


# --- Kempf optimisation --------------------------------------------------------------------

def _kkt_candidate(ctx: WeightContext, active: Sequence[Weight]):
    """Minimiser of lam^T M lam on {rho.lam = -1, chi.lam = 0 for chi in active}.

    Returns ``(lam, multipliers)`` with ``M lam = C^T y`` for ``C = [rho; active]``,
    or None when the rows of ``C`` are dependent.
    """
    c = [ctx.rho] + list(active)
    minv = [Fraction(1, m) for m in ctx.metric]
    g = [[sum(ci[j] * cj[j] * minv[j] for j in range(ctx.dim)) for cj in c] for ci in c]
    if rank(g) < len(c):
        return None
    b = [Fraction(-1)] + [Fraction(0)] * len(active)
    y = solve(g, b)
    if y is None:  # pragma: no cover - G nonsingular
        return None
    lam = tuple(minv[j] * sum(y[i] * c[i][j] for i in range(len(c))) for j in range(ctx.dim))
    return lam, tuple(y)


def _check_certificate(ctx: WeightContext, ws: Sequence[Weight], active: Sequence[Weight],
                       lam: Sequence[Fraction], y: Sequence[Fraction]) -> None:
    if dot(ctx.rho, lam) != -1:
        raise CertificateError("normalisation <rho, lam> = -1 violated")
    for chi in ws:
        if dot(chi, lam) < 0:
            raise CertificateError(f"primal infeasible at weight {chi}")
    for chi in active:
        if dot(chi, lam) != 0:
            raise CertificateError(f"active weight {chi} not tight")
    c = [ctx.rho] + list(active)
    for j in range(ctx.dim):
        if ctx.metric[j] * lam[j] != sum(y[i] * c[i][j] for i in range(len(c))):
            raise CertificateError("stationarity violated")
    if any(v < 0 for v in y[1:]):
        raise CertificateError("negative multiplier")


def _reduce_weights(ws: Sequence[Weight]) -> list[Weight]:
    """Drop zero weights and positive multiples of one another (same half-space)."""
    seen = {}
    for w in ws:
        if any(w):
            seen.setdefault(primitive_integral(w), w)
    return sorted(seen)


def adapted_one_ps(weights: Iterable[Sequence[int]], ctx: WeightContext) -> AdaptedOnePS:
    """Kempf's adapted 1-PS of an unstable weight set, with an exact KKT certificate.

    Active sets are tried by increasing size; the first KKT point is the unique
    optimum since the objective is strictly convex on the feasible slice.
    """
    ws = weight_set(weights)
    if any(len(w) != ctx.dim for w in ws):
        raise HesselinkError("adapted_one_ps", "weights of inconsistent length")
    if is_weight_set_semistable(ws, ctx):
        raise HesselinkError("adapted_one_ps", "no adapted 1-PS: weight set is semistable")
    reduced = _reduce_weights(ws)
    for size in range(0, min(len(reduced), ctx.dim - 1) + 1):
        for active in combinations(reduced, size):
            cand = _kkt_candidate(ctx, active)
            if cand is None:
                continue
            lam, y = cand
            if any(v < 0 for v in y[1:]):
                continue
            if any(dot(chi, lam) < 0 for chi in reduced):
                continue
            _check_certificate(ctx, ws, active, lam, y)
            prim = primitive_integral(lam)
            return AdaptedOnePS(prim, ctx.value(prim), tuple(active))
    raise CertificateError("no KKT point found for an unstable weight set")


StratumLabel = AdaptedOnePS | None


def stratify_weight_sets(points: Sequence[Iterable[Sequence[int]]], ctx: WeightContext) -> list[StratumLabel]:
    """Label each weight set by its adapted 1-PS, or None when semistable."""
    memo: dict[tuple, StratumLabel] = {}
    out = []
    for pt in points:
        ws = weight_set(pt)
        if ws not in memo:
            memo[ws] = None if is_weight_set_semistable(ws, ctx) else adapted_one_ps(ws, ctx)
        out.append(memo[ws])
    return out


def index_less(a: AdaptedOnePS, b: AdaptedOnePS) -> bool:
    """Order on indices: ``[a] < [b]`` when a's normalised value exceeds b's."""
    return compare_norm_values(a.value, b.value) > 0


def dominant_representative(lam: Sequence[int], block_sizes: Sequence[int]) -> tuple[int, ...]:
    """Sort each block non-increasingly (Weyl representative for a product of GL's)."""
    if sum(block_sizes) != len(lam) or any(b < 0 for b in block_sizes):
        raise HesselinkError("dominant_representative", "block sizes must sum to the vector length")
    out: list[int] = []
    i = 0
    for b in block_sizes:
        out.extend(sorted((int(x) for x in lam[i:i + b]), reverse=True))
        i += b
    return tuple(out)


def twist_character(ctx: WeightContext, lam: Sequence[int]) -> tuple[int, ...]:
    """``||lam||^2 rho - <rho, lam> lam*`` with ``lam*_j = m_j lam_j``."""
    if len(lam) != ctx.dim:
        raise HesselinkError("twist_character", "lambda has the wrong length")
    if not any(lam):
        raise HesselinkError("twist_character", "zero 1-PS has no twisted character")
    n = sum(m * x * x for m, x in zip(ctx.metric, lam))
    p = dot(ctx.rho, lam)
    return tuple(int(n * r - p * m * x) for r, m, x in zip(ctx.rho, ctx.metric, lam))


# --- Grassmannian ---------------------------------------------------------------------------

def grassmann_stratum(matrix: Sequence[Sequence]) -> tuple[int, tuple[int, ...] | None]:
    """Stratum of an r x n matrix under GL_r with the determinant character.

    Returns ``(k, lam_k)`` with ``k`` the rank and ``lam_k = (0^k, (-1)^(r-k))``,
    or ``(r, None)`` for the semistable full-rank locus. The label is checked
    against the torus algorithm applied to the row echelon form of the matrix,
    whose nonzero rows carry the weights ``e_1, ..., e_k``.
    """
    rows = [[frac(x) for x in r] for r in matrix]
    r = len(rows)
    n = len(rows[0]) if rows else 0
    if r > n:
        raise HesselinkError("grassmann_stratum", "need r <= n")
    red, _ = rref(rows)
    k = len(red)
    expected = None if k == r else (0,) * k + (-1,) * (r - k)
    # torus cross-check in the echelon-adapted basis
    ctx = WeightContext.standard((1,) * r)
    ws = [tuple(1 if j == i else 0 for j in range(r)) for i in range(k)]
    if is_weight_set_semistable(ws, ctx):
        check = None
    else:
        check = dominant_representative(adapted_one_ps(ws, ctx).lam, [r])
    if check != expected:
        raise CertificateError(f"grassmann cross-check disagrees: {check} vs {expected}")
    return k, expected


# --- sampling check of optimality ------------------------------------------------------------

@dataclass(frozen=True)
class SamplingReport:
    n_samples: int
    n_distinct: int
    n_violations: int


def sample_cone_points(cone: HalfspaceCone, n: int, box: int, rng: np.random.Generator,
                       extra: Sequence[Sequence[int]] = (), rounds: int = 20) -> np.ndarray:
    """``n`` uniform draws from the nonzero integer points of the cone in ``[-box, box]^dim``.

    Uniform box points are drawn and rejected outside the cone; a thin cone
    that yields too few hits falls back to enumerating the whole box. Draws are with replacement, so they repeat
    when the cone holds fewer than ``n`` such points. Multiples of the
    ``extra`` rays that fit in the box are appended.
    """
    dim = cone.dim
    normals = np.array(cone.normals, dtype=np.int64).reshape(-1, dim)
    pool = None
    hits = []
    total = 0
    # float products are exact here: every entry stays far below 2**53
    exact = box * dim * int(np.abs(normals).max(initial=0)) < 2**52
    fnormals = normals.T.astype(np.float64)
    for r in range(rounds):
        pts = rng.integers(-box, box + 1, size=(5 * n, dim), dtype=np.int64)
        keep = np.any(pts != 0, axis=1)
        if normals.shape[0]:
            prods = pts.astype(np.float64) @ fnormals if exact else pts @ normals.T
            keep &= np.all(prods >= 0, axis=1)
        hits.append(pts[keep])
        total += int(keep.sum())
        if total >= n:
            pool = np.concatenate(hits)[:n]
            break
        if total * rounds < n:  # this hit rate cannot finish in time
            break
    if pool is None:
        every = _kernels.box_cone_points(normals, dim, box)
        if every.shape[0] == 0:
            pool = every
        else:
            pool = every[rng.integers(0, every.shape[0], size=n)]
    rays = []
    for e in extra:
        e = np.array(e, dtype=np.int64)
        top = int(np.abs(e).max()) if e.size else 0
        if top:
            rays.extend(k * e for k in range(1, box // top + 1))
    if rays:
        pool = np.concatenate([pool, np.array(rays, dtype=np.int64)])
    return pool


def kempf_sampling_check(weights: Iterable[Sequence[int]], ctx: WeightContext, n: int = 10_000,
                         box: int = 20, seed: int = 0) -> SamplingReport:
    """Count cone samples strictly beating the adapted 1-PS value (expected: none)."""
    ws = weight_set(weights)
    best = adapted_one_ps(ws, ctx)
    cone = cone_from_weight_set(ws, ctx.dim)
    pts = sample_cone_points(cone, n, box, np.random.default_rng(seed), extra=[best.lam])
    n_in, n_viol = _kernels.cone_scan(pts, np.array(cone.normals, dtype=np.int64).reshape(-1, ctx.dim),
                                      ctx.rho, ctx.metric, int(best.value.pairing), int(best.value.norm_sq))
    distinct = len({tuple(r) for r in pts.tolist()})
    return SamplingReport(n_in, distinct, n_viol)
