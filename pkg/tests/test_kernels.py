from itertools import product

import numpy as np
import pytest

from hesselink import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba unavailable or disabled")


def _random_problem(seed, rows=400, dim=5):
    rng = np.random.default_rng(seed)
    lams = rng.integers(-3, 4, size=(rows, dim)).astype(np.int64)
    heads = np.array([1, 2], dtype=np.int64)
    tails = np.array([0, 0], dtype=np.int64)
    theta = rng.integers(-3, 4, size=dim).astype(np.int64)
    alpha = rng.integers(1, 4, size=dim).astype(np.int64)
    return lams, heads, tails, theta, alpha


@needs_numba
@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("has_ref", [False, True])
def test_competitor_scan_backends_agree(seed, has_ref):
    lams, heads, tails, theta, alpha = _random_problem(seed)
    ref = (-2, 5) if has_ref else (0, 0)
    a = K.competitor_scan_numpy(lams, heads, tails, theta, alpha, *ref, has_ref)
    b = K.competitor_scan_numba(lams, heads, tails, theta, alpha, *ref, has_ref)
    # ties go to the first row in both backends, so even the representative agrees
    assert a == b


def test_competitor_scan_counts_by_hand():
    lams = np.array([[0, 1], [1, 0], [-1, -1], [0, 0]], dtype=np.int64)
    heads, tails = np.array([1]), np.array([0])
    # limit needs lam[1] >= lam[0]: rows 0, 2, 3; the zero row has no value
    n_limit, n_viol, bp, bn, found = K.competitor_scan(lams, heads, tails, [-1, 1], [1, 1])
    assert n_limit == 3
    assert n_viol == 0
    # values 1/sqrt(2) and 0/sqrt(2); the smaller wins
    assert found and (bp, bn) == (0, 2)


@needs_numba
@pytest.mark.parametrize("seed", range(5))
def test_cone_scan_backends_agree(seed):
    rng = np.random.default_rng(seed)
    samples = rng.integers(-20, 21, size=(2000, 4)).astype(np.int64)
    normals = rng.integers(-4, 5, size=(3, 4)).astype(np.int64)
    rho = rng.integers(-3, 4, size=4).astype(np.int64)
    metric = rng.integers(1, 4, size=4).astype(np.int64)
    assert K.cone_scan_numpy(samples, normals, rho, metric, -1, 7) == \
        K.cone_scan_numba(samples, normals, rho, metric, -1, 7)


def test_cone_scan_overflow_falls_back_to_python_ints():
    big = 2**40
    samples = np.array([[big, -big], [1, -3]], dtype=np.int64)
    n_in, n_viol = K.cone_scan(samples, np.zeros((0, 2), dtype=np.int64), [1, 1], [1, 1], -1, 2)
    # values: 0 for the first row, -2/sqrt(10) for the second, reference -1/sqrt(2)
    assert n_in == 2
    assert n_viol == 0


def test_competitor_scan_overflow_path():
    big = 2**35
    lams = np.array([[-big, -big]], dtype=np.int64)
    out = K.competitor_scan(lams, [], [], [1, 1], [1, 1], -1, 1, True)
    assert out[:2] == (1, 1)


def _brute_box(normals, dim, box):
    return [p for p in product(range(-box, box + 1), repeat=dim)
            if any(p) and all(sum(a * b for a, b in zip(n, p)) >= 0 for n in normals)]


@pytest.mark.parametrize("seed", range(6))
def test_box_enumeration_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    normals = rng.integers(-3, 4, size=(int(rng.integers(0, 4)), dim)).astype(np.int64)
    expected = _brute_box(normals.tolist(), dim, 3)
    got = [tuple(r) for r in K.box_cone_points(normals, dim, 3).tolist()]
    assert got == expected
    assert [tuple(r) for r in K.box_cone_points_numpy(normals, dim, 3).tolist()] == expected


@needs_numba
def test_box_enumeration_backends_agree_in_dim_five():
    normals = np.array([[1, -1, 0, 0, 2], [0, 1, 1, -1, 0], [-1, 0, 3, 0, 1]], dtype=np.int64)
    a = K.box_cone_points_numba(normals, 5, 4)
    b = K.box_cone_points_numpy(normals, 5, 4)
    assert np.array_equal(a, b)


def test_backend_name():
    assert K.backend() in ("numba", "numpy")
