from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hesselink.core import HesselinkError
from hesselink.hilbert import HilbertPoly as H, is_hn_type, rudakov_cmp
from hesselink.p1sheaf import (
    INF,
    SheafP1,
    TorsionBlock,
    cohomology_dims,
    first_match,
    hilbert_poly_p1,
    is_regular,
    multiplication_maps,
    phi_multi,
    phi_nm,
    regularity_bound,
    sheaf_hn_type,
    threshold_grid,
    verify_ack_hn,
)

O = SheafP1((0,))
SPLIT = SheafP1((1, -1))


def tors(point, length):
    return TorsionBlock(point, length)


sheaves = st.builds(
    SheafP1,
    st.lists(st.integers(-3, 3), max_size=3),
    st.lists(st.builds(TorsionBlock, st.sampled_from(["0", "1", "inf", "-1/2"]), st.integers(1, 2)), max_size=2),
).filter(lambda e: not e.is_zero())


# --- data -------------------------------------------------------------------------

def test_torsion_block_validation():
    assert tors("oo", 1).at_infinity
    assert tors("INF", 2).point == INF
    assert tors("1/2", 1).point == Fraction(1, 2)
    with pytest.raises(HesselinkError):
        tors("0", 0)


def test_sheaf_json_roundtrip():
    e = SheafP1((-1, 1), (tors("0", 2), tors("inf", 1)))
    assert e.line_degrees == (1, -1)
    assert SheafP1.from_json(e.to_json()) == e
    assert e.to_json() == {"line_degrees": [1, -1],
                           "torsion": [{"point": "0", "length": 2}, {"point": "inf", "length": 1}]}
    assert str(e) == "O(1) + O(-1) + T(0,2) + T(inf,1)"
    with pytest.raises(HesselinkError, match="malformed"):
        SheafP1.from_json({"torsion": [{"length": 1}]})


# --- invariants ---------------------------------------------------------------------

def test_hilbert_poly_examples():
    assert hilbert_poly_p1(SPLIT) == H.of(2, 2)
    assert hilbert_poly_p1(O) == H.of(1, 1)
    assert hilbert_poly_p1(SheafP1((), (tors("0", 1), tors("1", 1)))) == H.of(2)
    with pytest.raises(HesselinkError):
        hilbert_poly_p1(SheafP1())


def test_cohomology_examples():
    assert cohomology_dims(SheafP1((-1,)), 0) == (0, 0)
    assert cohomology_dims(SheafP1((-3,)), 0) == (0, 2)
    assert cohomology_dims(SheafP1((2,)), 0) == (3, 0)
    assert cohomology_dims(SheafP1((), (tors("0", 2),)), -5) == (2, 0)


@settings(max_examples=200)
@given(sheaves, st.integers(-8, 8))
def test_euler_characteristic(e, n):
    h0, h1 = cohomology_dims(e, n)
    assert h0 - h1 == hilbert_poly_p1(e)(n)


def test_regularity_examples():
    assert regularity_bound(SPLIT) == 1
    assert regularity_bound(SheafP1((0, 0))) == 0
    assert regularity_bound(SheafP1((), (tors("1", 2),))) == 0
    assert regularity_bound(SheafP1((-3, 2))) == 3


@given(sheaves)
def test_regularity_is_least_and_monotone(e):
    n = regularity_bound(e)
    assert is_regular(e, n) and is_regular(e, n + 1)
    if n > 0:
        assert not is_regular(e, n - 1)


def test_sheaf_hn_type_examples():
    assert sheaf_hn_type(SheafP1((1, -1), (tors("0", 2),))) == (H.of(2), H.of(2, 1), H.of(0, 1))
    assert sheaf_hn_type(SheafP1((1, 1))) == (H.of(4, 2),)
    assert sheaf_hn_type(SheafP1((2, 2, 0))) == (H.of(6, 2), H.of(1, 1))


@given(sheaves)
def test_sheaf_hn_type_is_hn_type(e):
    tau = sheaf_hn_type(e)
    assert is_hn_type(tau, hilbert_poly_p1(e))
    assert all(rudakov_cmp(a, b) == 1 for a, b in zip(tau, tau[1:]))


# --- the functor ---------------------------------------------------------------------

def test_phi_structure_sheaf():
    rep = phi_nm(O, 0, 1)
    assert rep.dims == (1, 2)
    assert rep.maps == (((1,), (0,)), ((0,), (1,)))


def test_phi_split_dims():
    rep = phi_nm(SPLIT, 1, 2)
    assert rep.dims == (4, 6)
    assert len(rep.maps) == 2


def test_phi_torsion_at_zero():
    rep = phi_nm(SheafP1((), (tors("0", 1),)), 0, 1)
    assert rep.dims == (1, 1)
    # y does not vanish at 0, x does
    assert rep.maps == (((1,),), ((0,),))


def test_phi_torsion_at_infinity_and_general_point():
    inf = phi_nm(SheafP1((), (tors("inf", 1),)), 0, 1)
    assert inf.maps == (((0,),), ((1,),))
    gen = phi_nm(SheafP1((), (tors("2", 2),)), 0, 1)
    # x acts as u + 2 on k[u]/(u^2)
    assert gen.maps[1] == ((2, 0), (1, 2))


def test_phi_errors():
    with pytest.raises(HesselinkError, match="E not 0-regular"):
        phi_nm(SPLIT, 0, 2)
    with pytest.raises(HesselinkError, match="need m > n"):
        phi_nm(O, 2, 2)
    with pytest.raises(HesselinkError):
        phi_nm(SheafP1(), 0, 1)


@settings(max_examples=60, deadline=None)
@given(sheaves, st.integers(0, 2), st.integers(1, 3))
def test_phi_dimension_vector(e, extra, gap):
    n = regularity_bound(e) + extra
    rep = phi_nm(e, n, n + gap)
    p = hilbert_poly_p1(e)
    assert rep.dims == (p(n), p(n + gap))
    assert len(rep.maps) == gap + 1


def test_phi_multi_examples():
    assert phi_multi(O, (0, 1)) == phi_nm(O, 0, 1)
    assert phi_multi(O, (0, 1, 2)).dims == (1, 2, 3)
    t2 = SheafP1((), (tors("0", 2),))
    rep = phi_multi(t2, (0, 1, 2))
    assert rep.dims == (2, 2, 2)
    # each step: y acts as 1, x acts as u
    assert rep.maps[:2] == (((1, 0), (0, 1)), ((0, 0), (1, 0)))
    with pytest.raises(HesselinkError, match="strictly increasing"):
        phi_multi(O, (1, 1))


@settings(max_examples=60, deadline=None)
@given(sheaves, st.integers(0, 2), st.integers(1, 3))
def test_phi_multi_two_entries_is_phi_nm(e, extra, gap):
    n = regularity_bound(e) + extra
    assert phi_multi(e, (n, n + gap)) == phi_nm(e, n, n + gap)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3, unique=True), st.integers(1, 3))
def test_maps_are_block_triangular(degrees, gap):
    # sorted descending: each line summand only maps into its own block
    e = SheafP1(tuple(degrees))
    n = regularity_bound(e)
    m = n + gap
    src = [a + n + 1 for a in e.line_degrees]
    dst = [a + m + 1 for a in e.line_degrees]
    for mat in multiplication_maps(e, n, m):
        for r, row in enumerate(mat):
            rb = next(i for i in range(len(dst)) if r < sum(dst[:i + 1]))
            for c, v in enumerate(row):
                cb = next(i for i in range(len(src)) if c < sum(src[:i + 1]))
                if v:
                    assert rb == cb


# --- ACK verification ---------------------------------------------------------------------

def test_ack_split_example():
    rep = verify_ack_hn(SPLIT, 1, 2)
    assert rep.expected == ((3, 4), (1, 2))
    assert rep.computed == rep.expected
    assert rep.match
    assert rep.to_json()["match"] is True


def test_ack_semistable_examples():
    rep = verify_ack_hn(SheafP1((1, 1)), 0, 1)
    assert rep.tau == (H.of(4, 2),)
    assert len(rep.computed) == 1 and rep.match
    for length in (1, 2):
        t = verify_ack_hn(SheafP1((), (tors("0", length),)), 0, 1)
        assert t.expected == ((length, length),) and t.match


def test_ack_general_point_uses_primes():
    rep = verify_ack_hn(SheafP1((0,), (tors("1", 2),)), 0, 2)
    assert rep.match
    assert len(rep.primes) >= 3 or rep.oracle == "coordinate"


def test_threshold_grid_examples():
    g = threshold_grid(SheafP1((0, 0)), n_max=2, m_max=4)
    assert g.cells and all(ok for _, _, ok in g.cells)
    assert g.minimal == (0, 1)
    assert g.non_monotone == ()
    split = threshold_grid(SPLIT, n_max=2, m_max=4)
    assert (1, 2, True) in split.cells
    assert all(n >= 1 for n, _, _ in split.cells)
    assert threshold_grid(SheafP1((-3,)), n_max=2, m_max=6).cells == ()
    assert threshold_grid(SheafP1((-3,)), n_max=2, m_max=6).minimal is None


def test_first_match():
    rep = first_match(SPLIT)
    assert rep is not None and (rep.n, rep.m) == (1, 2)
    assert first_match(SheafP1((-3,)), n_max=2) is None
