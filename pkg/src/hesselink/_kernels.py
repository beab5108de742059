"""Integer inner loops: competitor 1-PS scans, cone-sample scans and box enumeration.

Each kernel exists twice, as numba ``@njit`` loops and as vectorised numpy.
The numba path is used when numba imports and ``HESSELINK_NO_NUMBA`` is unset
(or ``0``). Inputs are int64 arrays; callers fall back to object arrays of
Python ints (numpy path) whenever a product could overflow int64.

Values compared are ``pairing / sqrt(norm)``; all comparisons square both
sides, so everything stays integral.
"""
from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("HESSELINK_NO_NUMBA", "0").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("disabled by HESSELINK_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

INT64_SAFE = 2**62


# --- numpy reference path -----------------------------------------------------------

def _best_of(p: np.ndarray, n: np.ndarray) -> tuple[int, int, bool]:
    """Smallest value p/sqrt(n) among the given pairs (n > 0), exactly.

    Ties keep the first pair in row order, matching the compiled scan.
    """
    if p.size == 0:
        return 0, 0, False
    pairs = dict.fromkeys(zip(p.tolist(), n.tolist()))
    best = None
    for a, b in pairs:
        if best is None or _less(a, b, *best):
            best = (a, b)
    return best[0], best[1], True


def _less(p1: int, n1: int, p2: int, n2: int) -> bool:
    s1 = (p1 > 0) - (p1 < 0)
    s2 = (p2 > 0) - (p2 < 0)
    if s1 != s2:
        return s1 < s2
    if s1 == 0:
        return False
    lhs = p1 * p1 * n2
    rhs = p2 * p2 * n1
    return lhs > rhs if s1 < 0 else lhs < rhs


def competitor_scan_numpy(lams, heads, tails, theta_w, alpha_w, ref_p, ref_n, has_ref):
    """Scan integral 1-PS ``lams`` (rows) against the support of a representation.

    A row has a limit when ``lam[head] >= lam[tail]`` for every support pair.
    Returns ``(n_limit, n_violations, best_p, best_n, found)`` where a
    violation is a limit-having row strictly below the reference value (or,
    without a reference, any limit-having row with negative pairing).
    """
    if len(heads):
        limit = np.all(lams[:, heads] >= lams[:, tails], axis=1)
    else:
        limit = np.ones(lams.shape[0], dtype=bool)
    pairing = lams @ theta_w
    norm = (lams * lams) @ alpha_w
    ok = limit & (norm > 0)
    if has_ref:
        viol = ok & (pairing < 0) & (pairing * pairing * ref_n > ref_p * ref_p * norm)
    else:
        viol = ok & (pairing < 0)
    best_p, best_n, found = _best_of(pairing[ok], norm[ok])
    return int(limit.sum()), int(viol.sum()), best_p, best_n, found


def cone_scan_numpy(samples, normals, rho, metric, ref_p, ref_n):
    """Count cone samples beating the reference value ``ref_p/sqrt(ref_n)``.

    Returns ``(n_in_cone, n_violations)``; zero samples are ignored.
    """
    if len(normals):
        inside = np.all(samples @ normals.T >= 0, axis=1)
    else:
        inside = np.ones(samples.shape[0], dtype=bool)
    pairing = samples @ rho
    norm = (samples * samples) @ metric
    ok = inside & (norm > 0)
    viol = ok & (pairing < 0) & (pairing * pairing * ref_n > ref_p * ref_p * norm)
    return int(ok.sum()), int(viol.sum())


def box_cone_points_numpy(normals, dim, box):
    """All nonzero integer points of ``[-box, box]^dim`` with ``normals @ x >= 0``.

    Grows coordinate prefixes level by level and drops a prefix as soon as
    some normal stays negative however the remaining coordinates are chosen.
    """
    normals = np.asarray(normals, dtype=np.int64).reshape(-1, dim)
    slack = box * np.abs(normals)[:, ::-1].cumsum(axis=1)[:, ::-1]
    slack = np.hstack([slack, np.zeros((normals.shape[0], 1), dtype=np.int64)])
    r = np.arange(-box, box + 1, dtype=np.int64)
    prefix = np.zeros((1, 0), dtype=np.int64)
    partial = np.zeros((1, normals.shape[0]), dtype=np.int64)
    for j in range(dim):
        prefix = np.hstack([np.repeat(prefix, r.size, axis=0), np.tile(r, prefix.shape[0])[:, None]])
        partial = np.repeat(partial, r.size, axis=0) + prefix[:, j:j + 1] * normals[:, j]
        keep = np.all(partial + slack[:, j + 1] >= 0, axis=1)
        prefix, partial = prefix[keep], partial[keep]
    return prefix[np.any(prefix != 0, axis=1)]


# --- numba path ---------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _competitor_scan_nb(lams, heads, tails, theta_w, alpha_w, ref_p, ref_n, has_ref):
        n_rows, dim = lams.shape
        n_limit = 0
        n_viol = 0
        best_p = 0
        best_n = 0
        found = False
        for r in range(n_rows):
            ok = True
            for k in range(heads.shape[0]):
                if lams[r, heads[k]] < lams[r, tails[k]]:
                    ok = False
                    break
            if not ok:
                continue
            n_limit += 1
            p = 0
            n = 0
            for j in range(dim):
                x = lams[r, j]
                p += x * theta_w[j]
                n += x * x * alpha_w[j]
            if n <= 0:
                continue
            if p < 0:
                if has_ref:
                    if p * p * ref_n > ref_p * ref_p * n:
                        n_viol += 1
                else:
                    n_viol += 1
            if not found:
                best_p, best_n, found = p, n, True
            else:
                s1 = (p > 0) - (p < 0)
                s2 = (best_p > 0) - (best_p < 0)
                less = False
                if s1 != s2:
                    less = s1 < s2
                elif s1 != 0:
                    lhs = p * p * best_n
                    rhs = best_p * best_p * n
                    less = lhs > rhs if s1 < 0 else lhs < rhs
                if less:
                    best_p, best_n = p, n
        return n_limit, n_viol, best_p, best_n, found

    @njit(cache=True)
    def _cone_scan_nb(samples, normals, rho, metric, ref_p, ref_n):
        n_rows, dim = samples.shape
        n_in = 0
        n_viol = 0
        for r in range(n_rows):
            inside = True
            for k in range(normals.shape[0]):
                s = 0
                for j in range(dim):
                    s += normals[k, j] * samples[r, j]
                if s < 0:
                    inside = False
                    break
            if not inside:
                continue
            p = 0
            n = 0
            for j in range(dim):
                x = samples[r, j]
                p += x * rho[j]
                n += x * x * metric[j]
            if n == 0:
                continue
            n_in += 1
            if p < 0 and p * p * ref_n > ref_p * ref_p * n:
                n_viol += 1
        return n_in, n_viol

    @njit(cache=True)
    def _box_cone_nb(normals, dim, box, out, fill):
        # depth-first over coordinates; a prefix is abandoned once some normal
        # cannot recover to >= 0 with the coordinates still free
        m = normals.shape[0]
        slack = np.zeros((m, dim + 1), dtype=np.int64)
        for k in range(m):
            for j in range(dim - 1, -1, -1):
                slack[k, j] = slack[k, j + 1] + box * abs(normals[k, j])
        partial = np.zeros((m, dim + 1), dtype=np.int64)
        x = np.zeros(dim, dtype=np.int64)
        count = 0
        j = 0
        x[0] = -box - 1
        while j >= 0:
            x[j] += 1
            if x[j] > box:
                j -= 1
                continue
            ok = True
            for k in range(m):
                partial[k, j + 1] = partial[k, j] + normals[k, j] * x[j]
                if partial[k, j + 1] + slack[k, j + 1] < 0:
                    ok = False
                    break
            if not ok:
                continue
            if j < dim - 1:
                j += 1
                x[j] = -box - 1
                continue
            nonzero = False
            for i in range(dim):
                if x[i] != 0:
                    nonzero = True
                    break
            if nonzero:
                if fill:
                    out[count, :] = x
                count += 1
        return count

    def box_cone_points_numba(normals, dim, box):
        empty = np.zeros((0, dim), dtype=np.int64)
        count = _box_cone_nb(normals, dim, box, empty, False)
        out = np.zeros((count, dim), dtype=np.int64)
        _box_cone_nb(normals, dim, box, out, True)
        return out

    def competitor_scan_numba(lams, heads, tails, theta_w, alpha_w, ref_p, ref_n, has_ref):
        n_limit, n_viol, bp, bn, found = _competitor_scan_nb(
            lams, heads, tails, theta_w, alpha_w, ref_p, ref_n, has_ref)
        return int(n_limit), int(n_viol), int(bp), int(bn), bool(found)

    def cone_scan_numba(samples, normals, rho, metric, ref_p, ref_n):
        n_in, n_viol = _cone_scan_nb(samples, normals, rho, metric, ref_p, ref_n)
        return int(n_in), int(n_viol)

else:  # pragma: no cover
    competitor_scan_numba = None
    cone_scan_numba = None
    box_cone_points_numba = None


def _i64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64))


def _obj(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    return arr


def _max_abs(a) -> int:
    a = np.asarray(a)
    return int(np.abs(a).max()) if a.size else 0


def competitor_scan(lams, heads, tails, theta_w, alpha_w, ref_p=0, ref_n=0, has_ref=False):
    """Dispatch to the numba or numpy scan, guarding against int64 overflow."""
    dim = np.asarray(lams).shape[1] if np.asarray(lams).ndim == 2 else 0
    mx = _max_abs(lams)
    p_max = mx * _max_abs(theta_w) * max(dim, 1)
    n_max = mx * mx * _max_abs(alpha_w) * max(dim, 1)
    worst = max(p_max * p_max * max(abs(int(ref_n)), 1), int(ref_p) ** 2 * max(n_max, 1), n_max)
    heads = _i64(heads).reshape(-1)
    tails = _i64(tails).reshape(-1)
    if worst >= INT64_SAFE:
        return competitor_scan_numpy(_obj(lams), heads, tails, _obj(theta_w), _obj(alpha_w),
                                     int(ref_p), int(ref_n), has_ref)
    args = (_i64(lams), heads, tails, _i64(theta_w), _i64(alpha_w), int(ref_p), int(ref_n), bool(has_ref))
    if HAVE_NUMBA:
        return competitor_scan_numba(*args)
    return competitor_scan_numpy(*args)


def cone_scan(samples, normals, rho, metric, ref_p, ref_n):
    samples = np.asarray(samples)
    dim = samples.shape[1] if samples.ndim == 2 else 0
    normals = np.asarray(normals).reshape(-1, dim) if np.asarray(normals).size else np.zeros((0, dim), dtype=np.int64)
    mx = _max_abs(samples)
    p_max = mx * _max_abs(rho) * max(dim, 1)
    n_max = mx * mx * _max_abs(metric) * max(dim, 1)
    worst = max(p_max * p_max * abs(int(ref_n)), int(ref_p) ** 2 * n_max, mx * _max_abs(normals) * max(dim, 1))
    if worst >= INT64_SAFE:
        return cone_scan_numpy(_obj(samples), _obj(normals), _obj(rho), _obj(metric), int(ref_p), int(ref_n))
    args = (_i64(samples), _i64(normals), _i64(rho), _i64(metric), int(ref_p), int(ref_n))
    if HAVE_NUMBA:
        return cone_scan_numba(*args)
    return cone_scan_numpy(*args)


def box_cone_points(normals, dim: int, box: int) -> np.ndarray:
    """Dispatch the exhaustive box enumeration (rows in lexicographic order)."""
    normals = _i64(normals).reshape(-1, dim) if np.asarray(normals).size else np.zeros((0, dim), dtype=np.int64)
    if dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if _max_abs(normals) * box * dim >= INT64_SAFE:  # pragma: no cover - absurd sizes
        raise OverflowError("box enumeration would overflow int64")
    if HAVE_NUMBA:
        return box_cone_points_numba(normals, dim, int(box))
    return box_cone_points_numpy(normals, dim, int(box))


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
