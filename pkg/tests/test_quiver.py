from fractions import Fraction
from itertools import product
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hesselink.core import BudgetExceeded, ComparableNormValue, HesselinkError
from hesselink import quiver as qv
from hesselink.quiver import Quiver, QuiverRepresentation, StabilityPair

A2 = Quiver.a2()
K2 = Quiver.kronecker(2)
LOOP = Quiver(("1",), ((0, 0),), (((1, (0, 0)),),))


def a2(x, p=0):
    return QuiverRepresentation(A2, (1, 1), (((x,),),), p)


def sp11(dims=(1, 1), theta=(-1, 1)):
    return StabilityPair(theta, (1, 1), dims)


# --- basic data -----------------------------------------------------------------

def test_slope_examples():
    sp = sp11()
    assert qv.slope((1, 0), sp) == -1
    assert qv.slope((1, 1), sp) == 0
    assert qv.slope((0, 1), sp) == 1
    with pytest.raises(HesselinkError):
        qv.slope((0, 0), sp)


def test_stability_pair_validation():
    with pytest.raises(HesselinkError, match="must vanish"):
        StabilityPair((1, 1), (1, 1), (1, 1))
    with pytest.raises(HesselinkError):
        StabilityPair((0, 0), (0, 1), (1, 1))
    # unbalanced pairs are allowed on request
    assert StabilityPair((-2, 1), (1, 1), (2, 2), balanced=False).theta_of((2, 2)) == -2


def test_quiver_validation():
    with pytest.raises(HesselinkError):
        Quiver(("1",), ((0, 1),))
    with pytest.raises(HesselinkError, match="not composable"):
        Quiver(("1", "2"), ((0, 1),), (((1, (0, 0)),),))


def test_representation_shape_checked():
    with pytest.raises(HesselinkError):
        QuiverRepresentation(A2, (1, 2), (((1,),),))


def test_check_relations_examples():
    assert qv.check_relations(a2(1))
    nil = QuiverRepresentation(LOOP, (2,), (((0, 1), (0, 0)),))
    assert qv.check_relations(nil)
    ident = QuiverRepresentation(LOOP, (2,), (((1, 0), (0, 1)),))
    assert not qv.check_relations(ident)


def test_is_subrepresentation_examples():
    rep = a2(1)
    assert qv.is_subrepresentation(rep, ((), ()))
    assert qv.is_subrepresentation(rep, (((1,),), ((1,),)))
    assert not qv.is_subrepresentation(rep, (((1,),), ()))
    assert qv.is_subrepresentation(rep, ((), ((1,),)))
    with pytest.raises(HesselinkError):
        qv.is_subrepresentation(rep, (((1, 0),), ()))


# --- subrepresentation enumeration ----------------------------------------------

def _dimset(rep):
    return sorted(d for d, _ in qv.enumerate_subreps_ff(rep))


def test_enumerate_examples():
    assert _dimset(a2(0, 2)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert _dimset(a2(1, 2)) == [(0, 0), (0, 1), (1, 1)]
    empty = QuiverRepresentation(A2, (0, 0), ((),), 2)
    assert _dimset(empty) == [(0, 0)]


def test_enumerate_needs_finite_field():
    with pytest.raises(HesselinkError):
        qv.enumerate_subreps_ff(a2(1))


def test_enumerate_budget():
    rep = QuiverRepresentation(K2, (3, 3), (((0,) * 3,) * 3,) * 2, 3)
    with pytest.raises(BudgetExceeded, match="exceed the budget"):
        qv.enumerate_subreps_ff(rep, budget=100)


def test_subspace_counts():
    assert qv.gaussian_binomial(4, 2, 2) == 35
    assert sum(1 for _ in qv.subspaces_ff(3, 3)) == qv.subspace_count(3, 3) == 1 + 13 + 13 + 1


kron_reps = st.tuples(st.integers(0, 2), st.integers(0, 2), st.sampled_from([2, 3])).flatmap(
    lambda t: st.builds(
        lambda vals: QuiverRepresentation(
            K2, (t[0], t[1]),
            tuple(tuple(tuple(vals[k * t[0] * t[1] + i * t[0] + j] for j in range(t[0])) for i in range(t[1]))
                  for k in range(2)), t[2]),
        st.lists(st.integers(0, t[2] - 1), min_size=2 * t[0] * t[1], max_size=2 * t[0] * t[1])))


@settings(max_examples=60, deadline=None)
@given(kron_reps)
def test_enumeration_complete_and_duplicate_free(rep):
    listed = [s for _, s in qv.enumerate_subreps_ff(rep)]
    assert len(set(listed)) == len(listed)
    brute = [s for s in product(*(list(qv.subspaces_ff(d, rep.p)) for d in rep.dims))
             if qv.is_subrepresentation(rep, s)]
    assert sorted(listed) == sorted(brute)


def test_subreps_of_relation_reps_satisfy_relations():
    for vals in product(range(2), repeat=4):
        m = (tuple(vals[:2]), tuple(vals[2:]))
        rep = QuiverRepresentation(LOOP, (2,), (m,), 2)
        if not qv.check_relations(rep):
            continue
        zero = ((),)
        for _, sub in qv.enumerate_subreps_ff(rep):
            assert qv.check_relations(qv.subquotient(rep, zero, sub))
            assert qv.check_relations(qv.subquotient(rep, sub, (((1, 0), (0, 1)),)))


# --- semistability and HN ---------------------------------------------------------

def test_semistable_examples():
    assert qv.is_theta_semistable(a2(1, 2), sp11())
    assert not qv.is_theta_semistable(a2(0, 2), sp11())
    one = QuiverRepresentation(Quiver(("1",), ()), (2,), (), 3)
    assert qv.is_theta_semistable(one, StabilityPair((0,), (1,), (2,)))


@pytest.mark.parametrize("p", [0, 2, 3])
def test_hn_examples(p):
    res = qv.hn_filtration_quiver(a2(0, p), sp11())
    assert res.gamma == ((1, 0), (0, 1))
    assert res.slopes == (-1, 1)
    assert qv.hn_filtration_quiver(a2(1, p), sp11()).gamma == ((1, 1),)


def test_hn_rational_oracle_names():
    assert qv.hn_filtration_quiver(a2(1), sp11()).oracle == "coordinate"
    # a generic pair of 2x2 maps is not torus-graded
    rep = QuiverRepresentation(K2, (2, 2), (((1, 0), (0, 1)), ((1, 1), (0, 1))))
    assert not qv.is_torus_graded(rep)
    res = qv.hn_filtration_quiver(rep, StabilityPair((-1, 1), (1, 1), (2, 2)))
    assert res.oracle == "multi-prime"
    assert len(res.primes) == 3
    assert res.gamma == ((2, 2),)


def test_hn_rejects_wrong_ambient():
    with pytest.raises(HesselinkError):
        qv.hn_filtration_quiver(a2(1), StabilityPair((-2, 1), (1, 1), (1, 2)))


def _partition_ok(res, sp):
    tot = tuple(sum(c) for c in zip(*res.gamma))
    sl = [qv.slope(d, sp) for d in res.gamma]
    return tot == sp.ambient and all(a < b for a, b in zip(sl, sl[1:]))


@settings(max_examples=80, deadline=None)
@given(kron_reps, st.sampled_from([(1, 1), (2, 1), (1, 3)]))
def test_hn_partition_and_semistable_subquotients(rep, alpha):
    a, b = rep.dims
    if a + b == 0:
        return
    theta = (-b, a) if a and b else ((1, 0) if a == 0 else (0, 1))
    sp = StabilityPair(theta, alpha, rep.dims)
    res = qv.hn_filtration_quiver(rep, sp)
    assert _partition_ok(res, sp)
    lower = tuple(() for _ in rep.dims)
    for step, d in zip(res.filtration, res.gamma):
        assert qv.is_subrepresentation(rep, step)
        quo = qv.subquotient(rep, lower, step)
        assert quo.dims == d
        assert qv.is_theta_semistable(quo, sp.shifted(d))
        lower = step


zero_one_reps = st.tuples(st.integers(1, 3), st.integers(1, 3)).flatmap(
    lambda t: st.builds(
        lambda vals: QuiverRepresentation(
            K2, t, tuple(tuple(tuple(vals[k][i][j] for j in range(t[0])) for i in range(t[1])) for k in range(2))),
        st.lists(st.lists(st.lists(st.sampled_from([0, 0, 1]), min_size=t[0], max_size=t[0]),
                          min_size=t[1], max_size=t[1]), min_size=2, max_size=2)))


@settings(max_examples=60, deadline=None)
@given(zero_one_reps)
def test_rational_oracles_match_exhaustive(rep):
    # same 0/1 matrices read over F_5: the exhaustive oracle is ground truth
    a, b = rep.dims
    g = gcd(a, b)
    sp = StabilityPair((-b // g, a // g), (1, 1), rep.dims)
    rat = qv.hn_filtration_quiver(rep, sp)
    ff = qv.hn_filtration_quiver(rep.reduce_mod(5), sp)
    assert rat.gamma == ff.gamma


# --- lambda_gamma -------------------------------------------------------------------

def test_lambda_gamma_examples():
    rat, prim = qv.lambda_gamma(((1, 0), (0, 1)), sp11())
    assert rat == ((1,), (-1,))
    assert prim == ((1,), (-1,))
    rat, prim = qv.lambda_gamma(((2, 3),), StabilityPair((-3, 2), (1, 1), (2, 3)))
    assert rat == ((0, 0), (0, 0, 0))
    assert prim == ((0, 0), (0, 0, 0))
    sp = StabilityPair((-2, 1), (1, 1), (2, 2), balanced=False)
    rat, prim = qv.lambda_gamma(((1, 0), (1, 2)), sp)
    assert rat == ((2, 0), (0, 0))
    assert prim == ((1, 0), (0, 0))


def test_lambda_gamma_rejects_invalid_types():
    with pytest.raises(HesselinkError, match="invalid HN type"):
        qv.lambda_gamma(((0, 1), (1, 0)), sp11())
    with pytest.raises(HesselinkError, match="invalid HN type"):
        qv.lambda_gamma(((1, 0),), sp11())


def test_pairing_examples():
    assert qv.pairing_rho_theta(((1,), (-1,)), (-1, 1)) == -2
    assert qv.pairing_rho_theta(((0,), (0,)), (-1, 1)) == 0
    assert qv.pairing_rho_theta(((2, 0), (0, 0)), (-2, 1)) == -4
    assert qv.norm_sq_alpha(((1,), (-1,)), (1, 2)) == 3


def test_pairing_two_ways():
    sp = StabilityPair((-5, 3), (2, 1), (3, 5))
    gamma = ((1, 0), (2, 2), (0, 3))
    rat, _ = qv.lambda_gamma(gamma, sp)
    r = [-qv.slope(d, sp) for d in gamma]
    assert qv.pairing_rho_theta(rat, sp.theta) == sum(ri * sp.theta_of(d) for ri, d in zip(r, gamma))


def test_limit_exists_examples():
    assert qv.limit_exists(a2(0), ((5,), (-5,)))
    assert not qv.limit_exists(a2(1), ((1,), (-1,)))
    assert qv.limit_exists(a2(1), ((-1,), (1,)))
    with pytest.raises(HesselinkError):
        qv.limit_exists(a2(1), ((1, 2), (1,)))


# --- HN = Hesselink ---------------------------------------------------------------------

def test_verify_zero_map():
    rep = qv.verify_hn_equals_hesselink(a2(0, 2), sp11(), conjugates=10)
    assert rep.passed
    assert rep.value == ComparableNormValue(-2, 2)
    assert rep.lam == ((1,), (-1,))
    # competitor (0 | -1) has value -1, which does not beat -sqrt(2)
    assert ComparableNormValue(-1, 1) > rep.value
    assert rep.best == rep.value


def test_verify_semistable():
    rep = qv.verify_hn_equals_hesselink(a2(1, 3), sp11(), conjugates=10)
    assert rep.passed and rep.semistable
    assert "semistable, M >= 0" in rep.notes
    assert rep.best.pairing >= 0


def test_verify_dimension_zero():
    rep = QuiverRepresentation(A2, (0, 0), ((),), 2)
    out = qv.verify_hn_equals_hesselink(rep, StabilityPair((0, 0), (1, 1), (0, 0)))
    assert out.passed and out.competitors == 0


def test_verify_rational_kronecker():
    rep = QuiverRepresentation(K2, (1, 2), (((1,), (0,)), ((0,), (0,))))
    res = qv.verify_hn_equals_hesselink(rep, StabilityPair((-2, 1), (1, 1), (1, 2)), conjugates=5)
    assert res.passed
    assert res.gamma == ((1, 1), (0, 1))


def test_conjugate_preserves_hn_type():
    rep = QuiverRepresentation(K2, (2, 2), (((1, 0), (0, 0)), ((0, 0), (0, 1))), 3)
    sp = StabilityPair((-1, 1), (1, 1), (2, 2))
    g = [[[1, 1], [0, 1]], [[2, 0], [1, 1]]]
    moved = qv.conjugate(rep, g)
    assert qv.hn_filtration_quiver(moved, sp).gamma == qv.hn_filtration_quiver(rep, sp).gamma


# --- JSON ------------------------------------------------------------------------------

def test_json_roundtrip():
    rep = QuiverRepresentation(K2, (1, 2), (((Fraction(1, 2),), (0,)), ((0,), (3,))))
    back = qv.rep_from_json(qv.rep_to_json(rep))
    assert back == rep
    sp = qv.stability_from_json({"theta": {"1": -2, "2": 1}}, back)
    assert sp.theta == (-2, 1) and sp.alpha == (1, 1)


def test_json_errors():
    with pytest.raises(HesselinkError, match="malformed"):
        qv.rep_from_json({"vertices": ["1"]})
    with pytest.raises(HesselinkError, match="not prime"):
        qv.parse_field("F4")
