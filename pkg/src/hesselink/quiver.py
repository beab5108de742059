"""Quiver representations, King semistability and (theta, alpha)-HN filtrations.

Representations live over Q (``p == 0``, Fraction entries) or over F_p (int
entries reduced mod p). Two oracles find subrepresentations:

* exhaustive enumeration of subspace tuples over F_p (ground truth, tiny dims);
* a coordinate oracle for rational representations admitting a torus grading
  that separates basis vectors; there the HN filtration is spanned by basis
  vectors and is found with a parametric min cut.

Rational input without such a grading is handled per direct summand by
reduction modulo several primes, which must agree.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .core import (
    BudgetExceeded,
    CertificateError,
    ComparableNormValue,
    HesselinkError,
    frac,
    fmt_q,
    in_span,
    inverse,
    mat_mul,
    primitive_integral,
    rank,
    rref,
    solve,
)

DEFAULT_BUDGET = 10**6
DEFAULT_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23)

Basis = tuple[tuple, ...]
SubTuple = tuple[Basis, ...]


# --- quivers and representations -------------------------------------------------------

@dataclass(frozen=True)
class Quiver:
    """Vertices ``0..n-1`` with labels; arrows as ``(tail, head)`` index pairs.

    A relation is a tuple of ``(coefficient, path)`` terms, a path being a
    tuple of arrow indices in order of traversal.
    """

    vertices: tuple[str, ...]
    arrows: tuple[tuple[int, int], ...]
    relations: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...] = ()

    def __post_init__(self):
        n = len(self.vertices)
        for t, h in self.arrows:
            if not (0 <= t < n and 0 <= h < n):
                raise HesselinkError("Quiver", f"arrow ({t},{h}) references a missing vertex")
        for rel in self.relations:
            ends = set()
            for _, path in rel:
                if not path:
                    raise HesselinkError("Quiver", "empty path in relation")
                for a, b in zip(path, path[1:]):
                    if self.arrows[a][1] != self.arrows[b][0]:
                        raise HesselinkError("Quiver", f"path {path} is not composable")
                ends.add((self.arrows[path[0]][0], self.arrows[path[-1]][1]))
            if len(ends) > 1:
                raise HesselinkError("Quiver", "relation paths do not share endpoints")

    @classmethod
    def a2(cls) -> "Quiver":
        return cls(("1", "2"), ((0, 1),))

    @classmethod
    def kronecker(cls, k: int = 2) -> "Quiver":
        return cls(("1", "2"), ((0, 1),) * k)

    @classmethod
    def chain(cls, arrow_counts: Sequence[int]) -> "Quiver":
        """Vertices ``0..len(arrow_counts)`` with ``arrow_counts[i]`` arrows ``i -> i+1``."""
        arrows = tuple((i, i + 1) for i, c in enumerate(arrow_counts) for _ in range(c))
        return cls(tuple(str(i + 1) for i in range(len(arrow_counts) + 1)), arrows)


@dataclass(frozen=True)
class StabilityPair:
    theta: tuple[int, ...]
    alpha: tuple[int, ...]
    ambient: tuple[int, ...]
    balanced: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(int(x) for x in self.theta))
        object.__setattr__(self, "alpha", tuple(int(x) for x in self.alpha))
        object.__setattr__(self, "ambient", tuple(int(x) for x in self.ambient))
        if not len(self.theta) == len(self.alpha) == len(self.ambient):
            raise HesselinkError("StabilityPair", "theta, alpha and ambient differ in length")
        if any(a < 1 for a in self.alpha):
            raise HesselinkError("StabilityPair", "alpha entries must be positive")
        if any(d < 0 for d in self.ambient):
            raise HesselinkError("StabilityPair", "negative dimension")
        if self.balanced and sum(t * d for t, d in zip(self.theta, self.ambient)) != 0:
            raise HesselinkError("StabilityPair", "theta(d) must vanish")

    def theta_of(self, d: Sequence[int]) -> int:
        return sum(t * x for t, x in zip(self.theta, d))

    def alpha_of(self, d: Sequence[int]) -> int:
        return sum(a * x for a, x in zip(self.alpha, d))

    def shifted(self, d: Sequence[int]) -> "StabilityPair":
        """Pair for a subquotient of dimension ``d``: theta' = alpha(d) theta - theta(d) alpha."""
        td, ad = self.theta_of(d), self.alpha_of(d)
        th = tuple(ad * t - td * a for t, a in zip(self.theta, self.alpha))
        return StabilityPair(th, self.alpha, tuple(d))


def slope(d: Sequence[int], sp: StabilityPair) -> Fraction:
    if sp.alpha_of(d) <= 0:
        raise HesselinkError("slope", "slope of the zero dimension vector is undefined")
    return Fraction(sp.theta_of(d), sp.alpha_of(d))


def _reduce(x, p: int):
    if not p:
        return frac(x)
    q = frac(x)
    if q.denominator % p == 0:
        raise HesselinkError("QuiverRepresentation", f"entry {x} not defined mod {p}")
    return q.numerator * pow(q.denominator, -1, p) % p


@dataclass(frozen=True)
class QuiverRepresentation:
    quiver: Quiver
    dims: tuple[int, ...]
    maps: tuple[tuple[tuple, ...], ...]
    p: int = 0

    def __post_init__(self):
        q = self.quiver
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if len(self.dims) != len(q.vertices) or any(d < 0 for d in self.dims):
            raise HesselinkError("QuiverRepresentation", "bad dimension vector")
        if len(self.maps) != len(q.arrows):
            raise HesselinkError("QuiverRepresentation", "one matrix per arrow required")
        fixed = []
        for (t, h), m in zip(q.arrows, self.maps):
            rows = tuple(tuple(_reduce(x, self.p) for x in r) for r in m)
            if len(rows) != self.dims[h] or any(len(r) != self.dims[t] for r in rows):
                raise HesselinkError("QuiverRepresentation",
                                     f"matrix shape must be {self.dims[h]}x{self.dims[t]}")
            fixed.append(rows)
        object.__setattr__(self, "maps", tuple(fixed))

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def offsets(self) -> list[int]:
        out, s = [], 0
        for d in self.dims:
            out.append(s)
            s += d
        return out

    def reduce_mod(self, p: int) -> "QuiverRepresentation":
        if self.p:
            raise HesselinkError("reduce_mod", "representation is not rational")
        return QuiverRepresentation(self.quiver, self.dims, self.maps, p)


def _zero(p):
    return 0 if p else Fraction(0)


def _identity(n: int, p: int) -> list[list]:
    one = 1 if p else Fraction(1)
    return [[one if i == j else _zero(p) for j in range(n)] for i in range(n)]


def evaluate_path(rep: QuiverRepresentation, path: Sequence[int]) -> list[list]:
    q = rep.quiver
    cur = _identity(rep.dims[q.arrows[path[0]][0]], rep.p)
    for a in path:
        t, h = q.arrows[a]
        cur = mat_mul(rep.maps[a], cur, rep.p, inner=rep.dims[t], ncols=len(cur[0]) if cur else 0)
    return cur


def check_relations(rep: QuiverRepresentation) -> bool:
    q = rep.quiver
    for rel in q.relations:
        t = q.arrows[rel[0][1][0]][0]
        h = q.arrows[rel[0][1][-1]][1]
        total = [[_zero(rep.p)] * rep.dims[t] for _ in range(rep.dims[h])]
        for coef, path in rel:
            m = evaluate_path(rep, path)
            for i in range(rep.dims[h]):
                for j in range(rep.dims[t]):
                    total[i][j] += coef * m[i][j]
        if any((x % rep.p if rep.p else x) for r in total for x in r):
            return False
    return True


# --- subspaces ---------------------------------------------------------------------------

def _canon(basis: Sequence[Sequence], p: int) -> Basis:
    red, _ = rref(basis, p) if basis else ([], [])
    return tuple(tuple(r) for r in red)


def _pivots(basis: Basis) -> list[int]:
    return [next(i for i, x in enumerate(r) if x) for r in basis]


def _contains(big: Basis, small: Basis, p: int) -> bool:
    piv = _pivots(big)
    return all(in_span(big, piv, v, p) for v in small)


def is_subrepresentation(rep: QuiverRepresentation, sub: Sequence[Sequence[Sequence]]) -> bool:
    """Whether the per-vertex subspaces are closed under every arrow map."""
    if len(sub) != len(rep.dims):
        raise HesselinkError("is_subrepresentation", "one basis per vertex required")
    for v, b in enumerate(sub):
        if any(len(x) != rep.dims[v] for x in b):
            raise HesselinkError("is_subrepresentation", f"basis vectors at vertex {v} have wrong length")
    canon = [_canon(b, rep.p) for b in sub]
    for a, (t, h) in enumerate(rep.quiver.arrows):
        if not canon[t]:
            continue
        images = [tuple(sum(m * x for m, x in zip(row, v)) for row in rep.maps[a]) for v in canon[t]]
        if rep.p:
            images = [tuple(x % rep.p for x in im) for im in images]
        if not _contains(canon[h], tuple(images), rep.p):
            return False
    return True


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def subspace_count(n: int, p: int) -> int:
    return sum(gaussian_binomial(n, k, p) for k in range(n + 1))


def subspaces_ff(n: int, p: int) -> Iterator[Basis]:
    """All subspaces of F_p^n as RREF bases, by dimension then pivot pattern."""
    for k in range(n + 1):
        for piv in combinations(range(n), k):
            free = [(r, c) for r in range(k) for c in range(piv[r] + 1, n) if c not in piv]
            for vals in product(range(p), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for r, c in enumerate(piv):
                    rows[r][c] = 1
                for (r, c), x in zip(free, vals):
                    rows[r][c] = x
                yield tuple(tuple(r) for r in rows)


def enumerate_subreps_ff(rep: QuiverRepresentation, budget: int = DEFAULT_BUDGET
                         ) -> list[tuple[tuple[int, ...], SubTuple]]:
    """Every subrepresentation of an F_p representation, as (dimvec, bases)."""
    if not rep.p:
        raise HesselinkError("enumerate_subreps_ff", "representation is not over a finite field")
    count = 1
    for d in rep.dims:
        count *= subspace_count(d, rep.p)
    if count > budget:
        raise BudgetExceeded("enumerate_subreps_ff",
                             f"{count} subspace tuples exceed the budget {budget}")
    q = rep.quiver
    per_vertex = [list(subspaces_ff(d, rep.p)) for d in rep.dims]
    n = len(rep.dims)
    # arrows checked as soon as both endpoints are assigned
    ready = [[a for a, (t, h) in enumerate(q.arrows) if max(t, h) == v] for v in range(n)]
    out: list[tuple[tuple[int, ...], SubTuple]] = []
    chosen: list[Basis] = []

    def closed(a: int) -> bool:
        t, h = q.arrows[a]
        src, dst = chosen[t], chosen[h]
        if not src:
            return True
        m = rep.maps[a]
        piv = _pivots(dst)
        for v in src:
            im = [sum(x * y for x, y in zip(row, v)) % rep.p for row in m]
            if not in_span(dst, piv, im, rep.p):
                return False
        return True

    def rec(v: int):
        if v == n:
            out.append((tuple(len(b) for b in chosen), tuple(chosen)))
            return
        for s in per_vertex[v]:
            chosen.append(s)
            if all(closed(a) for a in ready[v]):
                rec(v + 1)
            chosen.pop()

    rec(0)
    return out


# --- HN results -----------------------------------------------------------------------------

@dataclass(frozen=True)
class QuiverHNResult:
    gamma: tuple[tuple[int, ...], ...]
    slopes: tuple[Fraction, ...]
    filtration: tuple[SubTuple, ...] | None
    oracle: str
    primes: tuple[int, ...] = ()

    def is_semistable(self) -> bool:
        return len(self.gamma) <= 1

    def to_json(self) -> dict:
        filt = None
        if self.filtration is not None:
            filt = [[[[fmt_q(x) for x in v] for v in b] for b in step] for step in self.filtration]
        return {"gamma": [list(g) for g in self.gamma], "filtration": filt}


def _dimsum(a: Sequence[int], b: Sequence[int], sign: int = 1) -> tuple[int, ...]:
    return tuple(x + sign * y for x, y in zip(a, b))


def hn_from_subreps(subreps: Sequence[tuple[tuple[int, ...], SubTuple]], sp: StabilityPair, p: int,
                    total: Sequence[int] | None = None) -> QuiverHNResult:
    """HN filtration from a complete list of subrepresentations.

    Each step takes, among subreps strictly containing the current one, those of
    minimal relative slope, and among them the one of maximal dimension, which
    must be unique.
    """
    total = tuple(total) if total is not None else sp.ambient
    zero = tuple(0 for _ in total)
    cur_dim, cur = zero, next(s for d, s in subreps if d == zero)
    steps, gamma, slopes = [], [], []
    while cur_dim != total:
        cands = []
        for d, s in subreps:
            if d == cur_dim or any(x < y for x, y in zip(d, cur_dim)):
                continue
            if all(_contains(s[v], cur[v], p) for v in range(len(total))):
                diff = _dimsum(d, cur_dim, -1)
                cands.append((slope(diff, sp), d, s))
        mu = min(c[0] for c in cands)
        best = [c for c in cands if c[0] == mu]
        top = max(sum(c[1]) for c in best)
        winners = [c for c in best if sum(c[1]) == top]
        if len(winners) != 1:
            raise CertificateError(f"{len(winners)} maximal destabilizing subrepresentations")
        _, d, s = winners[0]
        for _, d2, s2 in best:
            if not all(_contains(s[v], s2[v], p) for v in range(len(total))):
                raise CertificateError("maximal destabilizer does not contain all minimizers")
        gamma.append(_dimsum(d, cur_dim, -1))
        slopes.append(mu)
        steps.append(s)
        cur_dim, cur = d, s
    return QuiverHNResult(tuple(gamma), tuple(slopes), tuple(steps), "finite-field", (p,))


def hn_exhaustive(rep: QuiverRepresentation, sp: StabilityPair, budget: int = DEFAULT_BUDGET) -> QuiverHNResult:
    if rep.total_dim == 0:
        return QuiverHNResult((), (), (), "finite-field", (rep.p,))
    return hn_from_subreps(enumerate_subreps_ff(rep, budget), sp, rep.p, rep.dims)


# --- coordinate oracle ---------------------------------------------------------------------------

def _support_edges(rep: QuiverRepresentation) -> list[tuple[int, int, int]]:
    """(source node, target node, arrow) for every nonzero matrix entry."""
    off = rep.offsets()
    out = []
    for a, (t, h) in enumerate(rep.quiver.arrows):
        for i, row in enumerate(rep.maps[a]):
            for j, x in enumerate(row):
                if x:
                    out.append((off[t] + j, off[h] + i, a))
    return out


def _node_vertex(rep: QuiverRepresentation) -> list[int]:
    return [v for v, d in enumerate(rep.dims) for _ in range(d)]


def _components(n: int, edges: Sequence[tuple[int, int, int]]) -> list[list[int]]:
    adj = [[] for _ in range(n)]
    for s, t, _ in edges:
        adj[s].append(t)
        adj[t].append(s)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def is_torus_graded(rep: QuiverRepresentation, nodes: Sequence[int] | None = None) -> bool:
    """Whether some torus acting on arrows and basis vectors fixes the representation
    while giving distinct weights to the basis vectors of each vertex.

    Nodes in one support component get potentials in Z^arrows along a spanning
    tree; independent cycles impose linear relations. Two nodes of a vertex are
    separated iff their potential difference avoids the span of the relations.
    """
    n_arrows = len(rep.quiver.arrows)
    edges = _support_edges(rep)
    vert = _node_vertex(rep)
    universe = set(range(rep.total_dim)) if nodes is None else set(nodes)
    edges = [e for e in edges if e[0] in universe and e[1] in universe]
    adj: dict[int, list[tuple[int, int, int]]] = {x: [] for x in universe}
    for s, t, a in edges:
        adj[s].append((t, a, 1))
        adj[t].append((s, a, -1))
    pot: dict[int, list[int]] = {}
    comp_of: dict[int, int] = {}
    rel: list[list[int]] = []
    for root in sorted(universe):
        if root in pot:
            continue
        pot[root] = [0] * n_arrows
        comp_of[root] = root
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, a, sgn in adj[x]:
                cand = list(pot[x])
                cand[a] += sgn
                if y not in pot:
                    pot[y] = cand
                    comp_of[y] = root
                    queue.append(y)
                elif cand != pot[y]:
                    rel.append([u - w for u, w in zip(cand, pot[y])])
    red, piv = rref(rel) if rel else ([], [])
    seen = set()
    for x in sorted(universe):
        w = [Fraction(c) for c in pot[x]]
        for row, pc in zip(red, piv):
            f = w[pc]
            if f:
                w = [u - f * r for u, r in zip(w, row)]
        key = (comp_of[x], vert[x], tuple(w))
        if key in seen:
            return False
        seen.add(key)
    return True


class _MaxFlow:
    """Edmonds-Karp on integer capacities."""

    def __init__(self, n: int):
        self.n = n
        self.cap: list[dict[int, int]] = [dict() for _ in range(n)]

    def add(self, u: int, v: int, c: int):
        self.cap[u][v] = self.cap[u].get(v, 0) + c
        self.cap[v].setdefault(u, 0)

    def run(self, s: int, t: int) -> int:
        flow = 0
        while True:
            parent = {s: s}
            queue = deque([s])
            while queue and t not in parent:
                u = queue.popleft()
                for v, c in self.cap[u].items():
                    if c > 0 and v not in parent:
                        parent[v] = u
                        queue.append(v)
            if t not in parent:
                return flow
            v, push = t, None
            while v != s:
                u = parent[v]
                push = self.cap[u][v] if push is None else min(push, self.cap[u][v])
                v = u
            v = t
            while v != s:
                u = parent[v]
                self.cap[u][v] -= push
                self.cap[v][u] += push
                v = u
            flow += push

    def reaching(self, t: int) -> set[int]:
        """Nodes with a residual path to ``t``."""
        rev: list[list[int]] = [[] for _ in range(self.n)]
        for u in range(self.n):
            for v, c in self.cap[u].items():
                if c > 0:
                    rev[v].append(u)
        seen = {t}
        queue = deque([t])
        while queue:
            v = queue.popleft()
            for u in rev[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return seen


def _max_closure(nodes: Sequence[int], weight: dict[int, int], succ: dict[int, list[int]]) -> tuple[int, set[int]]:
    """Maximal closed set of maximum weight (closed: x in S, x -> y implies y in S)."""
    idx = {x: i for i, x in enumerate(nodes)}
    s, t = len(nodes), len(nodes) + 1
    g = _MaxFlow(len(nodes) + 2)
    pos = sum(w for w in weight.values() if w > 0)
    inf = pos + 1
    for x in nodes:
        w = weight[x]
        if w > 0:
            g.add(s, idx[x], w)
        elif w < 0:
            g.add(idx[x], t, -w)
        for y in succ[x]:
            g.add(idx[x], idx[y], inf)
    cut = g.run(s, t)
    reach = g.reaching(t)
    chosen = {x for x in nodes if idx[x] not in reach}
    return pos - cut, chosen


def _coordinate_hn(rep: QuiverRepresentation, sp: StabilityPair, nodes: Sequence[int]
                   ) -> list[tuple[Fraction, tuple[int, ...], frozenset[int]]]:
    """HN blocks (slope, dimvec, node set) of the coordinate sub-lattice on ``nodes``."""
    vert = _node_vertex(rep)
    nv = len(rep.dims)
    edges = _support_edges(rep)
    remaining = set(nodes)
    blocks = []

    def dimvec(s) -> tuple[int, ...]:
        d = [0] * nv
        for x in s:
            d[vert[x]] += 1
        return tuple(d)

    while remaining:
        rem = sorted(remaining)
        succ = {x: [] for x in rem}
        for a, b, _ in edges:
            if a in remaining and b in remaining and a != b:
                succ[a].append(b)
        mu = slope(dimvec(rem), sp)
        while True:
            w = {x: mu.numerator * sp.alpha[vert[x]] - mu.denominator * sp.theta[vert[x]] for x in rem}
            val, s = _max_closure(rem, w, succ)
            if val > 0:
                mu = slope(dimvec(s), sp)
                continue
            if not s:
                raise CertificateError("empty maximal destabilizer")
            break
        blocks.append((mu, dimvec(s), frozenset(s)))
        remaining -= s
    return blocks


# --- multi-prime route ----------------------------------------------------------------------------

def _restrict(rep: QuiverRepresentation, nodes: Sequence[int]) -> QuiverRepresentation:
    """Subrepresentation spanned by a union of support components."""
    off = rep.offsets()
    vert = _node_vertex(rep)
    keep = [[x - off[v] for x in nodes if vert[x] == v] for v in range(len(rep.dims))]
    maps = []
    for a, (t, h) in enumerate(rep.quiver.arrows):
        m = rep.maps[a]
        maps.append(tuple(tuple(m[i][j] for j in keep[t]) for i in keep[h]))
    return QuiverRepresentation(rep.quiver, tuple(len(k) for k in keep), tuple(maps), rep.p)


def _rank_profile(rep: QuiverRepresentation) -> tuple[int, ...]:
    """Ranks of each arrow map and of the stacked in/out maps at every vertex."""
    out = []
    q = rep.quiver
    for m in rep.maps:
        out.append(rank(m, rep.p) if m and m[0] else 0)
    for v, d in enumerate(rep.dims):
        outs = [rep.maps[a] for a, (t, h) in enumerate(q.arrows) if t == v]
        stacked = [list(r) for m in outs for r in m]
        out.append(rank(stacked, rep.p) if stacked and d else 0)
        ins = [rep.maps[a] for a, (t, h) in enumerate(q.arrows) if h == v]
        if ins and d:
            joined = [[x for m in ins for x in m[i]] for i in range(d)]
            out.append(rank(joined, rep.p) if joined[0] else 0)
        else:
            out.append(0)
    return tuple(out)


def _reducible_mod(rep: QuiverRepresentation, p: int) -> bool:
    return all(frac(x).denominator % p for m in rep.maps for r in m for x in r)


def hn_type_multi_prime(rep: QuiverRepresentation, sp: StabilityPair, primes: Sequence[int] = DEFAULT_PRIMES,
                        budget: int = DEFAULT_BUDGET, need: int = 3) -> tuple[tuple, tuple, tuple[int, ...]]:
    """HN type of a rational representation via exhaustive search at ``need`` primes.

    Primes that change any rank in the rank profile are skipped; all used primes
    must give the same type.
    """
    ranks = _rank_profile(rep)
    results, used = [], []
    for p in primes:
        if not _reducible_mod(rep, p):
            continue
        red = rep.reduce_mod(p)
        if _rank_profile(red) != ranks:
            continue
        try:
            res = hn_exhaustive(red, sp, budget)
        except BudgetExceeded:
            continue
        results.append((res.gamma, res.slopes))
        used.append(p)
        if len(used) == need:
            break
    if len(used) < need:
        raise HesselinkError("hn_filtration_quiver",
                             f"undecidable under configured oracle: only {len(used)} usable primes")
    if len(set(results)) != 1:
        raise HesselinkError("hn_filtration_quiver", f"primes {used} disagree on the HN type")
    return results[0][0], results[0][1], tuple(used)


# --- public HN / semistability --------------------------------------------------------------------

def hn_filtration_quiver(rep: QuiverRepresentation, sp: StabilityPair, budget: int = DEFAULT_BUDGET,
                         primes: Sequence[int] = DEFAULT_PRIMES) -> QuiverHNResult:
    """HN filtration (or at least HN type) of a representation.

    F_p input is answered exhaustively. Rational input is split into support
    components (a direct sum decomposition); torus-graded components use the
    coordinate oracle, the rest the multi-prime route. Blocks of equal slope
    from different components are merged.
    """
    if tuple(rep.dims) != sp.ambient:
        raise HesselinkError("hn_filtration_quiver", "dimension vector differs from the stability ambient")
    if rep.p:
        return hn_exhaustive(rep, sp, budget)
    if rep.total_dim == 0:
        return QuiverHNResult((), (), (), "coordinate")
    edges = _support_edges(rep)
    comps = _components(rep.total_dim, edges)
    graded = [c for c in comps if is_torus_graded(rep, c)]
    other = [x for c in comps if c not in graded for x in c]
    blocks: dict[Fraction, list] = {}
    for c in graded:
        for mu, d, s in _coordinate_hn(rep, sp, c):
            entry = blocks.setdefault(mu, [tuple(0 for _ in rep.dims), frozenset()])
            entry[0] = _dimsum(entry[0], d)
            entry[1] = entry[1] | s
    used: tuple[int, ...] = ()
    if other:
        sub = _restrict(rep, other)
        gamma, slopes, used = hn_type_multi_prime(sub, sp, primes, budget)
        for mu, d in zip(slopes, gamma):
            entry = blocks.setdefault(mu, [tuple(0 for _ in rep.dims), None])
            entry[0] = _dimsum(entry[0], d)
            entry[1] = None
    order = sorted(blocks)
    gamma = tuple(blocks[mu][0] for mu in order)
    filtration = None
    if not other:
        off = rep.offsets()
        vert = _node_vertex(rep)
        acc: set[int] = set()
        steps = []
        for mu in order:
            acc |= blocks[mu][1]
            steps.append(tuple(
                tuple(tuple(Fraction(int(j == x - off[v])) for j in range(rep.dims[v])) for x in sorted(acc)
                      if vert[x] == v)
                for v in range(len(rep.dims))))
        filtration = tuple(steps)
    oracle = "coordinate" if not other else ("multi-prime" if not graded else "coordinate+multi-prime")
    return QuiverHNResult(gamma, tuple(order), filtration, oracle, used)


def is_theta_semistable(rep: QuiverRepresentation, sp: StabilityPair, budget: int = DEFAULT_BUDGET,
                        primes: Sequence[int] = DEFAULT_PRIMES) -> bool:
    return hn_filtration_quiver(rep, sp, budget, primes).is_semistable()


def subquotient(rep: QuiverRepresentation, lower: SubTuple, upper: SubTuple) -> QuiverRepresentation:
    """The representation ``upper / lower`` in a basis extending that of ``lower``."""
    p = rep.p
    bases = []
    for v in range(len(rep.dims)):
        lo = [list(x) for x in lower[v]]
        ext = list(lo)
        comp = []
        for x in upper[v]:
            if rank(ext + [list(x)], p) > len(ext):
                ext.append(list(x))
                comp.append(list(x))
        bases.append((ext, len(lo), comp))
    maps = []
    for a, (t, h) in enumerate(rep.quiver.arrows):
        ext_h, nlo_h, _ = bases[h]
        cols = []
        for x in bases[t][2]:
            y = [sum(m * u for m, u in zip(row, x)) for row in rep.maps[a]]
            if p:
                y = [u % p for u in y]
            coeff = solve([list(col) for col in zip(*ext_h)], y, p) if ext_h else []
            if coeff is None:
                raise HesselinkError("subquotient", "upper is not a subrepresentation")
            cols.append(coeff[nlo_h:])
        nh = len(bases[h][2])
        maps.append(tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(nh)))
    return QuiverRepresentation(rep.quiver, tuple(len(b[2]) for b in bases), tuple(maps), p)


# --- lambda_gamma and limits ------------------------------------------------------------------------

def validate_hn_type(gamma: Sequence[Sequence[int]], sp: StabilityPair) -> None:
    if any(not any(d) or any(x < 0 for x in d) for d in gamma):
        raise HesselinkError("lambda_gamma", "invalid HN type: zero or negative entry")
    tot = tuple(sum(c) for c in zip(*gamma)) if gamma else tuple(0 for _ in sp.ambient)
    if tot != sp.ambient:
        raise HesselinkError("lambda_gamma", "invalid HN type: entries do not sum to the ambient")
    sl = [slope(d, sp) for d in gamma]
    if any(a >= b for a, b in zip(sl, sl[1:])):
        raise HesselinkError("lambda_gamma", "invalid HN type: slopes not strictly increasing")


def lambda_gamma(gamma: Sequence[Sequence[int]], sp: StabilityPair
                 ) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[tuple[int, ...], ...]]:
    """Rational weights ``r_i = -theta(d_i)/alpha(d_i)`` per vertex in block order,
    and their primitive integral rescaling (all zeros for a single block)."""
    validate_hn_type(gamma, sp)
    r = [-slope(d, sp) for d in gamma]
    nv = len(sp.ambient)
    rat = tuple(tuple(ri for ri, d in zip(r, gamma) for _ in range(d[v])) for v in range(nv))
    flat = [x for ws in rat for x in ws]
    if any(flat):
        prim = iter(primitive_integral(flat))
    else:
        prim = iter([0] * len(flat))
    integral = tuple(tuple(next(prim) for _ in ws) for ws in rat)
    return rat, integral


def pairing_rho_theta(lam: Sequence[Sequence], theta: Sequence[int]) -> Fraction:
    return Fraction(sum(t * sum((frac(x) for x in ws), Fraction(0)) for t, ws in zip(theta, lam)))


def norm_sq_alpha(lam: Sequence[Sequence], alpha: Sequence[int]) -> Fraction:
    return Fraction(sum(a * sum((frac(x) ** 2 for x in ws), Fraction(0)) for a, ws in zip(alpha, lam)))


def limit_exists(rep: QuiverRepresentation, lam: Sequence[Sequence]) -> bool:
    """Entries of each arrow matrix vanish where target weight < source weight."""
    if [len(w) for w in lam] != list(rep.dims):
        raise HesselinkError("limit_exists", "weight lists do not match the dimension vector")
    for a, (t, h) in enumerate(rep.quiver.arrows):
        for i, row in enumerate(rep.maps[a]):
            for j, x in enumerate(row):
                if x and lam[h][i] < lam[t][j]:
                    return False
    return True


# --- HN = Hesselink verification ----------------------------------------------------------------------

@dataclass
class DominanceReport:
    gamma: tuple[tuple[int, ...], ...]
    lam: tuple[tuple[int, ...], ...]
    value: ComparableNormValue | None
    semistable: bool
    bases_checked: int = 0
    competitors: int = 0
    with_limit: int = 0
    violations: int = 0
    best: ComparableNormValue | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "gamma": [list(g) for g in self.gamma],
            "lambda": [list(w) for w in self.lam],
            "value": self.value.to_json() if self.value else None,
            "semistable": self.semistable,
            "bases_checked": self.bases_checked,
            "competitors": self.competitors,
            "with_limit": self.with_limit,
            "violations": self.violations,
            "best_competitor": self.best.to_json() if self.best else None,
            "passed": self.passed,
        }


def _adapted_basis(rep: QuiverRepresentation, filtration: Sequence[SubTuple]) -> list[list[list]]:
    """Per vertex, columns of a basis adapted to the filtration (block order)."""
    p = rep.p
    out = []
    for v, d in enumerate(rep.dims):
        cols: list[list] = []
        for step in filtration:
            for x in step[v]:
                if rank(cols + [list(x)], p) > len(cols):
                    cols.append(list(x))
        if len(cols) != d:
            raise CertificateError("filtration does not exhaust the representation")
        out.append(cols)
    return out


def conjugate(rep: QuiverRepresentation, cols: Sequence[Sequence[Sequence]]) -> QuiverRepresentation:
    """Matrices of the representation in new bases (``cols[v]`` lists basis vectors)."""
    p = rep.p
    mats = []
    for a, (t, h) in enumerate(rep.quiver.arrows):
        bt = [list(r) for r in zip(*cols[t])] if cols[t] else []
        bh = [list(r) for r in zip(*cols[h])] if cols[h] else []
        if not rep.dims[h] or not rep.dims[t]:
            mats.append(tuple(tuple(_zero(p) for _ in range(rep.dims[t])) for _ in range(rep.dims[h])))
            continue
        m = mat_mul(inverse(bh, p), mat_mul(rep.maps[a], bt, p), p)
        mats.append(tuple(tuple(r) for r in m))
    return QuiverRepresentation(rep.quiver, rep.dims, tuple(mats), p)


def _support_pairs(rep: QuiverRepresentation) -> tuple[np.ndarray, np.ndarray]:
    pairs = sorted({(s, t) for s, t, _ in _support_edges(rep)})
    heads = np.array([t for _, t in pairs], dtype=np.int64)
    tails = np.array([s for s, _ in pairs], dtype=np.int64)
    return heads, tails


def _random_invertible(n: int, p: int, rng: np.random.Generator) -> list[list]:
    while True:
        if p:
            m = [[int(x) for x in row] for row in rng.integers(0, p, size=(n, n))]
        else:
            m = [[Fraction(int(x)) for x in row] for row in rng.integers(-2, 3, size=(n, n))]
        if rank(m, p) == n:
            return m


def competitor_grid(dim: int, bound: int, max_rows: int = 5 * 10**6) -> np.ndarray:
    rows = (2 * bound + 1) ** dim
    if rows > max_rows:
        raise BudgetExceeded("verify_hn_equals_hesselink",
                             f"{rows} competitors exceed the grid limit {max_rows}")
    axes = [np.arange(-bound, bound + 1, dtype=np.int64)] * dim
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)


def conjugate_supports(rep: QuiverRepresentation, conjugates: int, seed: int = 0
                       ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Support patterns of the representation in its given basis and ``conjugates``
    random bases (seeded), reusable across stability pairs."""
    rng = np.random.default_rng(seed)
    out = [_support_pairs(rep)]
    for _ in range(conjugates):
        g = [_random_invertible(d, rep.p, rng) for d in rep.dims]
        out.append(_support_pairs(conjugate(rep, g)))
    return out


def verify_hn_equals_hesselink(rep: QuiverRepresentation, sp: StabilityPair, bound: int = 3,
                               conjugates: int = 100, seed: int = 0, budget: int = DEFAULT_BUDGET,
                               hn: QuiverHNResult | None = None,
                               supports: Sequence[tuple[np.ndarray, np.ndarray]] | None = None
                               ) -> DominanceReport:
    """Check that lambda_gamma is optimal among integral 1-PS with a limit.

    Competitors are all weight vectors in ``[-bound, bound]^D`` read in the
    HN-adapted basis, the given basis, and ``conjugates`` random bases (or the
    precomputed ``supports`` of the latter two). For a
    semistable representation the check is that no competitor with a limit has
    negative pairing.
    """
    hn = hn or hn_filtration_quiver(rep, sp, budget)
    nv = len(rep.dims)
    if rep.total_dim == 0:
        return DominanceReport((), tuple(() for _ in range(nv)), None, True, notes=["dimension zero: vacuous"])
    if hn.filtration is None:
        raise HesselinkError("verify_hn_equals_hesselink", "no explicit HN filtration available for this input")
    _, lam = lambda_gamma(hn.gamma, sp)
    cols = _adapted_basis(rep, hn.filtration)
    adapted = conjugate(rep, cols)
    semistable = hn.is_semistable()
    if not limit_exists(adapted, lam):
        raise CertificateError("lambda_gamma has no limit in the HN-adapted basis")
    value = None
    ref_p = ref_n = 0
    if not semistable:
        value = ComparableNormValue(pairing_rho_theta(lam, sp.theta), norm_sq_alpha(lam, sp.alpha))
        ref_p, ref_n = int(value.pairing), int(value.norm_sq)
    vert = _node_vertex(rep)
    theta_w = np.array([sp.theta[v] for v in vert], dtype=np.int64)
    alpha_w = np.array([sp.alpha[v] for v in vert], dtype=np.int64)
    grid = competitor_grid(rep.total_dim, bound)
    report = DominanceReport(hn.gamma, lam, value, semistable)
    if supports is None:
        supports = conjugate_supports(rep, conjugates, seed)
    best = None
    for heads, tails in [_support_pairs(adapted)] + list(supports):
        n_lim, n_viol, bp, bn, found = _kernels.competitor_scan(
            grid, heads, tails, theta_w, alpha_w, ref_p, ref_n, not semistable)
        report.bases_checked += 1
        report.competitors += grid.shape[0]
        report.with_limit += n_lim
        report.violations += n_viol
        if found:
            cand = ComparableNormValue(bp, bn)
            if best is None or cand < best:
                best = cand
    report.best = best
    if semistable:
        report.notes.append("semistable, M >= 0")
    return report


# --- JSON interchange -------------------------------------------------------------------------------

def parse_field(s: str) -> int:
    s = str(s).strip()
    if s in ("Q", "QQ"):
        return 0
    if s.startswith("F") and s[1:].isdigit():
        p = int(s[1:])
        if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise HesselinkError("parse_field", f"{p} is not prime")
        return p
    raise HesselinkError("parse_field", f"unknown field {s!r}")


def rep_from_json(obj: dict) -> QuiverRepresentation:
    try:
        labels = [str(v) for v in obj["vertices"]]
        index = {v: i for i, v in enumerate(labels)}
        arrows = tuple((index[str(t)], index[str(h)]) for t, h in obj["arrows"])
        rels = tuple(tuple((int(c), tuple(int(a) for a in path)) for c, path in rel)
                     for rel in obj.get("relations", []))
        quiver = Quiver(tuple(labels), arrows, rels)
        p = parse_field(obj.get("field", "Q"))
        dims_obj = obj["dims"]
        dims = tuple(int(dims_obj[v]) for v in labels) if isinstance(dims_obj, dict) else tuple(int(x) for x in dims_obj)
        maps_obj = obj.get("maps", {})
        maps = []
        for a, (t, h) in enumerate(arrows):
            m = maps_obj.get(str(a)) if isinstance(maps_obj, dict) else maps_obj[a]
            if m is None:
                m = [[0] * dims[t] for _ in range(dims[h])]
            maps.append(tuple(tuple(frac(x) if isinstance(x, str) else frac(int(x)) for x in r) for r in m))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise HesselinkError("rep_from_json", f"malformed representation: {exc}") from None
    return QuiverRepresentation(quiver, dims, tuple(maps), p)


def rep_to_json(rep: QuiverRepresentation) -> dict:
    q = rep.quiver
    return {
        "vertices": list(q.vertices),
        "arrows": [[q.vertices[t], q.vertices[h]] for t, h in q.arrows],
        "relations": [[[c, list(path)] for c, path in rel] for rel in q.relations],
        "field": f"F{rep.p}" if rep.p else "Q",
        "dims": {v: d for v, d in zip(q.vertices, rep.dims)},
        "maps": {str(a): [[fmt_q(x) for x in r] for r in m] for a, m in enumerate(rep.maps)},
    }


def stability_from_json(obj: dict, rep: QuiverRepresentation) -> StabilityPair:
    labels = rep.quiver.vertices

    def vec(key, default=None):
        v = obj.get(key, default)
        if v is None:
            raise HesselinkError("stability_from_json", f"missing {key}")
        if isinstance(v, dict):
            return tuple(int(v[x]) for x in labels)
        return tuple(int(x) for x in v)

    return StabilityPair(vec("theta"), vec("alpha", [1] * len(labels)), rep.dims)
