"""Hilbert polynomial combinatorics: Rudakov order, HN types, Quot indices, ACK parameters.

Polynomials are in one variable ``t`` with exact rational coefficients stored
in ascending order. Types are tuples of polynomials, ordered strictly
decreasingly in the Rudakov order (lower degree is larger).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations, product
from typing import Iterable, Sequence

from .core import BudgetExceeded, HesselinkError, frac, fmt_q


@dataclass(frozen=True)
class HilbertPoly:
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [frac(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def of(cls, *coeffs) -> "HilbertPoly":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "HilbertPoly") -> "HilbertPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return HilbertPoly(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "HilbertPoly") -> "HilbertPoly":
        return self + HilbertPoly(tuple(-x for x in other.coeffs))

    def scale(self, c) -> "HilbertPoly":
        return HilbertPoly(tuple(frac(c) * x for x in self.coeffs))

    def is_integer_valued(self) -> bool:
        return all(self(j).denominator == 1 for j in range(len(self.coeffs) + 1))

    def is_valid(self) -> bool:
        """Nonzero, integer valued, positive leading coefficient."""
        return bool(self.coeffs) and self.lead > 0 and self.is_integer_valued()

    def to_json(self) -> list[str]:
        return [fmt_q(c) for c in self.coeffs] or ["0"]

    @classmethod
    def from_json(cls, obj: Sequence) -> "HilbertPoly":
        try:
            return cls(tuple(frac(x) if isinstance(x, str) else frac(int(x)) for x in obj))
        except (TypeError, ValueError) as exc:
            raise HesselinkError("HilbertPoly", f"malformed polynomial: {exc}") from None

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            coef = "" if mag == 1 and k > 0 else fmt_q(mag)
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            sign = "-" if c < 0 else "+"
            parts.append((sign, f"{coef}{mono}"))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f"{s}{body}" for s, body in parts[1:])


Poly = HilbertPoly
HNType = tuple[HilbertPoly, ...]


def poly_sum(ps: Iterable[HilbertPoly]) -> HilbertPoly:
    acc = HilbertPoly(())
    for p in ps:
        acc = acc + p
    return acc


# --- Rudakov order ------------------------------------------------------------------------

def _require_nonzero(label: str, *ps: HilbertPoly) -> None:
    for p in ps:
        if p.is_zero() or p.lead <= 0:
            raise HesselinkError(label, "nonzero polynomial with positive leading coefficient required")


def rudakov_lambda(p: HilbertPoly, q: HilbertPoly) -> list[Fraction]:
    """Entries ``p_i q_j - q_i p_j`` in the order (f,f-1),...,(f,0),(f-1,f-2),...,(1,0)."""
    f = max(p.degree, q.degree)
    pc = list(p.coeffs) + [Fraction(0)] * (f + 1 - len(p.coeffs))
    qc = list(q.coeffs) + [Fraction(0)] * (f + 1 - len(q.coeffs))
    return [pc[i] * qc[j] - qc[i] * pc[j] for i in range(f, 0, -1) for j in range(i - 1, -1, -1)]


def rudakov_cmp(p: HilbertPoly, q: HilbertPoly) -> int:
    """-1 if p precedes q, 0 if equivalent (proportional), 1 if p succeeds q."""
    _require_nonzero("rudakov_cmp", p, q)
    for x in rudakov_lambda(p, q):
        if x:
            return -1 if x > 0 else 1
    return 0


def rudakov_asymptotic_oracle(p: HilbertPoly, q: HilbertPoly, scale: int = 10, max_steps: int = 40) -> int:
    """Evaluate ``p(n)/p(m)`` against ``q(n)/q(m)`` at ``n = s, m = s^e``.

    ``s`` grows tenfold until three consecutive scales give the same sign;
    ``e = 2`` separates all monomials up to degree 3, ``e = f`` beyond.
    """
    _require_nonzero("rudakov_asymptotic_oracle", p, q)
    f = max(p.degree, q.degree)
    e = 2 if f <= 3 else f
    s = max(scale, 2)
    history: list[int] = []
    for _ in range(max_steps):
        n, m = s, s ** e
        pn, pm, qn, qm = p(n), p(m), q(n), q(m)
        if min(pn, pm, qn, qm) > 0:
            lhs, rhs = pn * qm, qn * pm
            sign = (lhs > rhs) - (lhs < rhs)
            history.append(sign)
            if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
                return sign
        else:
            history.clear()
        s *= 10
    raise HesselinkError("rudakov_asymptotic_oracle", "sign did not stabilise")


def rudakov_key():
    """Sort key putting polynomials in increasing Rudakov order."""
    return cmp_to_key(rudakov_cmp)


# --- HN types and Shatz polygons ---------------------------------------------------------------

def is_hn_type(entries: Sequence[HilbertPoly], total: HilbertPoly) -> bool:
    if not entries or not all(e.is_valid() for e in entries):
        return False
    if poly_sum(entries) != total:
        return False
    return all(rudakov_cmp(a, b) == 1 for a, b in zip(entries, entries[1:]))


def _polygon(tau: Sequence[HilbertPoly], n: int, m: int) -> list[tuple[Fraction, Fraction]]:
    pts = [(Fraction(0), Fraction(0))]
    for p in tau:
        x, y = pts[-1]
        if p(m) <= 0:
            raise HesselinkError("shatz_leq", "entries must be positive at m")
        pts.append((x + p(m), y + p(n)))
    return pts


def _height(pts: Sequence[tuple[Fraction, Fraction]], x: Fraction) -> Fraction:
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise HesselinkError("shatz_leq", "abscissa outside the polygon")


def shatz_leq(tau: Sequence[HilbertPoly], tau2: Sequence[HilbertPoly], n: int, m: int) -> bool:
    """``tau <= tau2``: the polygon of ``tau2`` lies weakly above that of ``tau``."""
    if poly_sum(tau) != poly_sum(tau2):
        raise HesselinkError("shatz_leq", "types have different totals")
    if m <= n:
        raise HesselinkError("shatz_leq", "need m > n")
    a, b = _polygon(tau, n, m), _polygon(tau2, n, m)
    xs = {x for x, _ in a} | {x for x, _ in b}
    return all(_height(b, x) >= _height(a, x) for x in xs)


# --- Quot indices -------------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotIndex:
    r: tuple[Fraction, ...]
    l: tuple[int, ...]
    total: HilbertPoly
    n: int
    merged: bool = False
    decreasing: bool = True

    def to_json(self) -> dict:
        return {"r": [fmt_q(x) for x in self.r], "l": list(self.l), "total": self.total.to_json(),
                "n": self.n, "merged": self.merged, "decreasing": self.decreasing}


def beta_nm(tau: Sequence[HilbertPoly], n: int, m: int) -> QuotIndex:
    """Weights ``r_i = P(m)/P(n) - P_i(m)/P_i(n)`` and multiplicities ``l_i = P_i(n)``.

    Consecutive equal weights are merged (flagged). Order is kept as given;
    ``decreasing`` records whether the weights strictly decrease.
    """
    if m <= n:
        raise HesselinkError("beta_nm", "need m > n")
    if not tau:
        raise HesselinkError("beta_nm", "empty type")
    total = poly_sum(tau)
    pn, pm = total(n), total(m)
    for p in tau:
        if p(n) <= 0:
            raise HesselinkError("beta_nm", f"nonpositive value {p}({n}) = {p(n)}")
    r: list[Fraction] = []
    l: list[int] = []
    merged = False
    for p in tau:
        ri = pm / pn - p(m) / p(n)
        li = int(p(n))
        if r and r[-1] == ri:
            l[-1] += li
            merged = True
        else:
            r.append(ri)
            l.append(li)
    if sum(x * y for x, y in zip(r, l)) != 0:  # pragma: no cover - algebraic identity
        raise HesselinkError("beta_nm", "sum r_i l_i does not vanish")
    dec = all(a > b for a, b in zip(r, r[1:]))
    return QuotIndex(tuple(r), tuple(l), total, n, merged, dec)


def beta_equal(tau: Sequence[HilbertPoly], tau2: Sequence[HilbertPoly], n: int, m: int) -> bool:
    if len(tau) != len(tau2):
        return False
    return all(a(n) == b(n) and a(m) == b(m) for a, b in zip(tau, tau2))


def gamma_of_beta(beta: QuotIndex, m: int) -> tuple[tuple[int, int], ...]:
    """``d_i = (l_i, l_i P(m)/P(n) - l_i r_i)``; second entries must be positive integers."""
    ratio = beta.total(m) / beta.total(beta.n)
    out = []
    for r, l in zip(beta.r, beta.l):
        second = l * ratio - l * r
        if second.denominator != 1 or second <= 0 or l <= 0:
            raise HesselinkError("gamma_of_beta", f"index not realizable: component {fmt_q(second)}")
        out.append((int(l), int(second)))
    return tuple(out)


def gamma_nm(tau: Sequence[HilbertPoly], n: int, m: int) -> tuple[tuple[int, int], ...]:
    return tuple((int(p(n)), int(p(m))) for p in tau)


def fixed_locus_weight_check(r: Sequence, values_at_m: Sequence, l: Sequence) -> Fraction:
    """``sum r_i P_i(m) + r_i^2 l_i`` (vanishes on the weight-d fixed locus)."""
    return sum((frac(ri) * frac(pi) + frac(ri) ** 2 * frac(li) for ri, pi, li in zip(r, values_at_m, l)),
               Fraction(0))


def enumerate_refined_indices(beta: QuotIndex, m: int, degree_cap: int = 1) -> list[HNType]:
    """Degree <= 1 tuples summing to the total with the prescribed values at ``m``.

    Survivors have ``P_i(n) >= 0``, positive leading coefficient (or positive
    constant) and strictly decreasing ratios ``P_i(n)/P_i(m)``.
    """
    if degree_cap > 1:
        raise HesselinkError("enumerate_refined_indices", "enumeration unbounded for degree cap > 1")
    total, n = beta.total, beta.n
    if total.degree > 1:
        return []
    ratio = total(m) / total(n)
    vals = [li * ratio - li * ri for ri, li in zip(beta.r, beta.l)]
    if any(v.denominator != 1 or v <= 0 for v in vals):
        return []
    lead = int(total.coeffs[1]) if total.degree == 1 else 0
    if total.degree == 1 and total.coeffs[1].denominator != 1:
        return []
    s = len(vals)
    out = []
    for split in _compositions(lead, s):
        polys = []
        ok = True
        for a, v in zip(split, vals):
            b = v - a * m
            if a == 0 and b <= 0:
                ok = False
                break
            polys.append(HilbertPoly((b, a)))
        if not ok or poly_sum(polys) != total:
            continue
        if any(p(n) < 0 for p in polys):
            continue
        ratios = [p(n) / p(m) for p in polys]
        if all(x > y for x, y in zip(ratios, ratios[1:])):
            out.append(tuple(polys))
    return out


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """Nonnegative integer tuples of length ``parts`` summing to ``total``, lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# --- ACK parameters ---------------------------------------------------------------------------

def ack_parameters(total: HilbertPoly, n: int, m: int) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
    if m <= n:
        raise HesselinkError("ack_parameters", "need m > n")
    pn, pm = total(n), total(m)
    if pn <= 0 or pm <= 0 or pn.denominator != 1 or pm.denominator != 1:
        raise HesselinkError("ack_parameters", "P(n) and P(m) must be positive integers")
    pn, pm = int(pn), int(pm)
    d, theta, alpha = (pn, pm), (-pm, pn), (pm, pn)
    assert theta[0] * d[0] + theta[1] * d[1] == 0
    return d, theta, alpha


def multi_parameters_from_values(values: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """``theta_i = sum_{j<i} h_j - sum_{j>i} h_j``, ``alpha_i`` the same with a plus."""
    h = [int(x) for x in values]
    total = sum(h)
    theta, alpha = [], []
    before = 0
    for x in h:
        after = total - before - x
        theta.append(before - after)
        alpha.append(before + after)
        before += x
    if sum(t * x for t, x in zip(theta, h)) != 0:  # pragma: no cover - telescoping identity
        raise HesselinkError("multi_parameters", "theta(d) does not vanish")
    return tuple(h), tuple(theta), tuple(alpha)


def multi_parameters(ns: Sequence[int], total: HilbertPoly) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    if any(a >= b for a, b in zip(ns, ns[1:])):
        raise HesselinkError("multi_parameters", "ns must be strictly increasing")
    vals = [total(x) for x in ns]
    if any(v <= 0 or v.denominator != 1 for v in vals):
        raise HesselinkError("multi_parameters", "P(n_i) must be positive integers")
    return multi_parameters_from_values([int(v) for v in vals])


def gamma_multi(ns: Sequence[int], tau: Sequence[HilbertPoly]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(p(x)) for x in ns) for p in tau)


def sub_regular_positions(gamma: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """(entry, vertex) positions holding a nonpositive value; these mark ns too small for the type."""
    return [(i, j) for i, g in enumerate(gamma) for j, x in enumerate(g) if x <= 0]


def ack_slope(a: int, b: int, pn: int, pm: int) -> Fraction:
    """Slope of dimension vector ``(a, b)`` for ``theta = (-P(m), P(n))``, ``alpha = (P(m), P(n))``."""
    return Fraction(-pm * a + pn * b, pm * a + pn * b)


# --- enumeration, collisions, injectivity -------------------------------------------------------

def enumerate_polys(deg_bound: int, coeff_bound: int, positive_at: Sequence[int] = ()) -> list[HilbertPoly]:
    """Integer-coefficient polynomials of degree <= deg_bound, coefficients in
    ``[-c, c]``, positive leading coefficient, positive at every point given."""
    out = []
    rng = range(-coeff_bound, coeff_bound + 1)
    for deg in range(deg_bound + 1):
        for lower in product(rng, repeat=deg):
            for lead in range(1, coeff_bound + 1):
                p = HilbertPoly(tuple(lower) + (lead,))
                if all(p(x) > 0 for x in positive_at):
                    out.append(p)
    return out


def enumerate_hn_types(polys: Sequence[HilbertPoly], parts_bound: int, budget: int = 5 * 10**6) -> list[HNType]:
    """All strictly Rudakov-decreasing tuples of 1..parts_bound entries from ``polys``."""
    ordered = sorted(set(polys), key=rudakov_key(), reverse=True)
    # classes of equivalent (proportional) polynomials cannot appear together
    cls = {}
    k = 0
    for i, p in enumerate(ordered):
        if i and rudakov_cmp(ordered[i - 1], p) != 0:
            k += 1
        cls[p] = k
    out: list[HNType] = []
    for s in range(1, parts_bound + 1):
        for combo in combinations(ordered, s):
            if any(cls[a] == cls[b] for a, b in zip(combo, combo[1:])):
                continue
            out.append(combo)
            if len(out) > budget:
                raise BudgetExceeded("collision_search", f"more than {budget} types enumerated")
    return out


def collision_search(n: int, m: int, deg_bound: int, coeff_bound: int, parts_bound: int = 2,
                     budget: int = 5 * 10**6) -> list[tuple[HNType, HNType]]:
    """Distinct HN types with the same total whose entries agree at ``n`` and ``m``.

    Entries range over integer-coefficient polynomials within the bounds that
    are positive at ``n`` and ``m``.
    """
    if m <= n:
        raise HesselinkError("collision_search", "need m > n")
    polys = enumerate_polys(deg_bound, coeff_bound, (n, m))
    width = deg_bound + 1
    info = {p: (tuple(int(c) for c in p.coeffs) + (0,) * (width - len(p.coeffs)), (int(p(n)), int(p(m))))
            for p in polys}
    groups: dict[tuple, list[HNType]] = defaultdict(list)
    for tau in enumerate_hn_types(polys, parts_bound, budget):
        parts = [info[p] for p in tau]
        total = tuple(map(sum, zip(*(c for c, _ in parts))))
        groups[(total, tuple(v for _, v in parts))].append(tau)
    out = []
    for key in sorted(groups, key=repr):
        g = groups[key]
        out.extend(combinations(g, 2))
    return out


def injectivity_report(pool: Sequence[Sequence[HilbertPoly]], ns: Sequence[int]) -> list[tuple[HNType, HNType]]:
    """Distinct pool members with equal images under ``gamma_multi``."""
    groups: dict[tuple, list[HNType]] = defaultdict(list)
    for tau in pool:
        groups[gamma_multi(ns, tau)].append(tuple(tau))
    out = []
    for key in sorted(groups):
        g = list(dict.fromkeys(groups[key]))
        out.extend(combinations(g, 2))
    return out


def type_to_json(tau: Sequence[HilbertPoly]) -> dict:
    return {"entries": [p.to_json() for p in tau], "total": poly_sum(tau).to_json()}


def type_from_json(obj) -> HNType:
    entries = obj["entries"] if isinstance(obj, dict) else obj
    tau = tuple(HilbertPoly.from_json(e) for e in entries)
    if isinstance(obj, dict) and "total" in obj:
        if HilbertPoly.from_json(obj["total"]) != poly_sum(tau):
            raise HesselinkError("type_from_json", "entries do not sum to the total")
    return tau
