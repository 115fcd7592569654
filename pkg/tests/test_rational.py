import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from strongstab.conformal import phi
from strongstab.errors import InputError, NumericalError, PoleError
from strongstab.rational import (
    Polynomial,
    RationalFn,
    blaschke_from_zeros,
    hinf_norm_axis,
    mobius_substitute,
    poly_roots,
)

from conftest import REFERENCE_UNIT

cplx = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def test_roots_of_z2_plus_1():
    r = sorted(poly_roots(Polynomial([1, 0, 1])), key=lambda x: x.imag)
    assert np.allclose(r, [-1j, 1j], atol=1e-14)


def test_roots_of_reference_unit_numerator():
    r = sorted(REFERENCE_UNIT.zeros(), key=lambda x: (x.real, x.imag))
    assert r[0] == pytest.approx(-50.9245, abs=1e-3)
    assert r[1] == pytest.approx(-2.2583 - 8.9628j, abs=1e-3)
    assert r[2] == pytest.approx(-2.2583 + 8.9628j, abs=1e-3)


def test_roots_evaluation_residual(rng):
    p = Polynomial(rng.normal(size=7))
    for r in poly_roots(p):
        assert abs(p(r)) < 1e-8


def test_zero_polynomial_rejected():
    with pytest.raises(InputError, match="degenerate polynomial"):
        poly_roots(Polynomial([0.0]))
    assert len(poly_roots(Polynomial([3.0]))) == 0


@settings(max_examples=50, deadline=None)
@given(st.lists(cplx, min_size=1, max_size=10))
def test_root_coefficient_round_trip(roots):
    # eigenvalue root finders lose accuracy like eps**(1/m) on m-fold roots; keep roots simple
    assume(min((abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :]), default=1.0) > 1e-2)
    p = Polynomial.from_roots(roots)
    q = Polynomial.from_roots(poly_roots(p))
    scale = np.max(np.abs(p.coeffs))
    assert np.max(np.abs(p.coeffs - q.coeffs)) / scale < 1e-8


def test_weight_evaluation():
    W = RationalFn([1, 0.1], [1, 1])
    assert W(0) == pytest.approx(1.0)
    assert W(1j) == pytest.approx((1 + 0.1j) / (1 + 1j), rel=1e-14)


def test_evaluation_at_pole_raises():
    with pytest.raises(PoleError):
        RationalFn([1], [1, 1])(-1.0)


def test_common_factor_cancelled():
    f = RationalFn(Polynomial.from_roots([1, -2]).coeffs, Polynomial.from_roots([-2, -3]).coeffs)
    assert f.den.degree == 1 and f.num.degree == 1


def test_blaschke_single_zero():
    B = blaschke_from_zeros([1.0]).to_rational()
    s = np.array([0.3 + 2j, 5.0, -0.7j])
    assert np.allclose(B(s), (s - 1) / (s + 1))


def test_blaschke_empty_is_one():
    B = blaschke_from_zeros([])
    assert B(2.0 + 1j) == pytest.approx(1.0)


def test_blaschke_reference_pair_all_pass():
    B = blaschke_from_zeros([0.3125 + 0.8548j, 0.3125 - 0.8548j], real=True)
    w = np.logspace(-3, 3, 500)
    assert np.max(np.abs(np.abs(B(1j * w)) - 1)) < 1e-10


def test_blaschke_rejects_lhp_zero():
    with pytest.raises(InputError, match="not interior RHP"):
        blaschke_from_zeros([-1.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 5), st.floats(-5, 5)), min_size=1, max_size=6))
def test_blaschke_all_pass_property(pts):
    B = blaschke_from_zeros([complex(x, y) for x, y in pts])
    w = np.concatenate([-np.logspace(-3, 3, 250), np.logspace(-3, 3, 250)])
    assert np.max(np.abs(np.abs(B(1j * w)) - 1)) < 1e-9


def test_mobius_identity():
    f = mobius_substitute(RationalFn([0, 1]))
    s = np.array([0.5, 1j, 2 + 3j])
    assert np.allclose(f(s), (s - 1) / (s + 1))


def test_mobius_constant():
    assert mobius_substitute(RationalFn.const(2.5))(7j) == pytest.approx(2.5)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(cplx, min_size=1, max_size=4),
    st.lists(st.complex_numbers(max_magnitude=0.9, allow_nan=False), min_size=1, max_size=4),
    st.lists(st.tuples(st.floats(0.05, 10), st.floats(-10, 10)), min_size=5, max_size=10),
)
def test_mobius_commutes_with_evaluation(num_roots, den_roots, pts):
    f = RationalFn(Polynomial.from_roots(num_roots).coeffs, Polynomial.from_roots(den_roots).coeffs)
    F = mobius_substitute(f)
    s = np.array([complex(x, y) for x, y in pts])
    ref = f(phi(s))
    assert np.max(np.abs(F(s) - ref) / np.maximum(1, np.abs(ref))) < 1e-10


def test_mobius_rational_example(rng):
    f = RationalFn([2, 1], [1, 2])
    F = mobius_substitute(f)
    s = rng.uniform(0.1, 5, 10) + 1j * rng.uniform(-5, 5, 10)
    assert np.allclose(F(s), f(phi(s)), atol=1e-12)


def test_hinf_weight_is_one():
    assert hinf_norm_axis(RationalFn([1, 0.1], [1, 1])) == pytest.approx(1.0, abs=1e-12)


def test_hinf_reference_unit_and_inverse():
    assert hinf_norm_axis(REFERENCE_UNIT) == pytest.approx(295.84 / 296.27, abs=1e-3)
    assert hinf_norm_axis(REFERENCE_UNIT.inverse()) == pytest.approx(146, abs=5)


@settings(max_examples=25, deadline=None)
@given(st.floats(-100, 100).filter(lambda a: abs(a) > 1e-3))
def test_hinf_scaling(alpha):
    f = RationalFn([1, 0.3], [2, 1, 1])
    assert hinf_norm_axis(f * alpha) == pytest.approx(abs(alpha) * hinf_norm_axis(f), rel=1e-12)


def test_hinf_unbounded_raises():
    with pytest.raises(NumericalError, match="unbounded on axis"):
        hinf_norm_axis(RationalFn([1], [1, 0, 1]))
