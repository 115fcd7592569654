from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongstab.errors import ConditionError, InputError
from strongstab.worked_example import plant
from strongstab.quasipoly import (
    QuasiPolynomial,
    SystemKind,
    classify,
    qp_conjugate,
    qp_eval,
    rhp_zeros,
    winding_number,
)
from strongstab.rational import Polynomial, RationalFn, poly_roots


@pytest.fixture(scope="module")
def RT():
    return plant()


def test_eval_at_zero(RT):
    R, T = RT
    assert qp_eval(R, 0.0) == pytest.approx(5.0)
    assert qp_eval(T, 0.0) == pytest.approx(-1.0)


def test_delay_free_eval_is_coefficient():
    c = RationalFn([1], [1, 1]) + RationalFn([2], [2, 1])
    Q = QuasiPolynomial([(c, 0)])
    s = 0.4 + 1.3j
    assert Q(s) == pytest.approx(1 / (s + 1) + 2 / (s + 2))


def test_irrational_delay_rejected():
    with pytest.raises(InputError):
        QuasiPolynomial([(RationalFn.const(1), 0), (RationalFn.const(0.5), np.sqrt(2))])


def test_delays_are_fractions(RT):
    R, T = RT
    assert R.delays == [Fraction(0), Fraction(3)]
    assert T.max_delay == Fraction(2)


def test_conjugate_structure(RT):
    _, T = RT
    Tb = qp_conjugate(T)
    terms = sorted(Tb.terms, key=lambda t: t[1])
    assert [h for _, h in terms] == [Fraction(0), Fraction(2)]
    c0, c2 = terms[0][0], terms[1][0]
    ref0, ref2 = RationalFn.const(2.0), RationalFn([-1, 1], [1, 1])
    s = np.array([0.3, 1 + 2j, 5j, 7.0])
    assert np.max(np.abs(c0(s) - ref0(s))) < 1e-12
    assert np.max(np.abs(c2(s) - ref2(s))) < 1e-12


def test_conjugate_of_one():
    Tb = qp_conjugate(QuasiPolynomial([(RationalFn.const(1), 0)]))
    assert Tb(1.7 + 0.2j) == pytest.approx(1.0)


def test_conjugate_modulus_identity(RT, rng):
    _, T = RT
    Tb = qp_conjugate(T)
    w = rng.uniform(-50, 50, 100)
    assert np.allclose(np.abs(Tb(1j * w)), np.abs(T(1j * w)), rtol=1e-12)


def test_conjugate_involution_modulus(RT):
    _, T = RT
    Tbb = qp_conjugate(qp_conjugate(T))
    w = np.logspace(-2, 2, 200)
    assert np.max(np.abs(np.abs(Tbb(1j * w)) - np.abs(T(1j * w)))) < 1e-9


def test_rhp_zeros_of_R(RT):
    R, _ = RT
    rep = rhp_zeros(R, (0.0, 5.0, -10.0, 10.0))
    near = [z for z in rep.zeros if abs(z.imag) < 2]
    assert rep.count == 4  # a second pair sits near 0.1 +- 2.75j
    assert len(near) == 2
    for z in (0.3125 + 0.8548j, 0.3125 - 0.8548j):
        assert min(abs(np.array(near) - z)) < 1e-3


def test_rhp_zero_residuals(RT):
    R, _ = RT
    box = (0.0, 5.0, -10.0, 10.0)
    rep = rhp_zeros(R, box)
    x, y = np.meshgrid(np.linspace(0, 5, 60), np.linspace(-10, 10, 120))
    scale = np.max(np.abs(R(x + 1j * y)))
    for z in rep.zeros:
        assert abs(R(z)) < 1e-8 * scale


def test_rhp_zeros_simple():
    Q = QuasiPolynomial([(RationalFn([-1, 1], [1]), 0)], strict=False)
    rep = rhp_zeros(Q, (0.0, 3.0, -3.0, 3.0))
    assert rep.count == 1 and rep.zeros[0] == pytest.approx(1.0, abs=1e-10)


def test_T_zero_chain_grows(RT):
    _, T = RT
    counts = [winding_number(T, (0.0, 1.0, 0.5, om)) for om in (10.0, 20.0, 40.0)]
    assert counts[0] < counts[1] < counts[2]
    # roughly one zero per pi of imaginary extent
    assert counts[2] == pytest.approx(40 / np.pi, abs=2)
    rep = rhp_zeros(T, (0.0, 1.0, 30.0, 40.0))
    assert all(abs(z.real - np.log(np.sqrt(2))) < 0.02 for z in rep.zeros)


def test_classification(RT):
    R, T = RT
    assert classify(T) is SystemKind.I
    assert classify(R, check_conjugate=False) is SystemKind.F
    assert classify(QuasiPolynomial([(RationalFn([1, 1], [2, 1]), 0)])) is SystemKind.F


def test_marginal_chain_rejected():
    # 1 + e^{-s}: zeros on the imaginary axis
    Q = QuasiPolynomial([(RationalFn.const(1), 0), (RationalFn.const(1), 1)])
    with pytest.raises(ConditionError):
        classify(Q)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=5))
def test_argument_principle_matches_roots(roots):
    roots = [complex(x, y) for x, y in roots]
    if any(abs(r.real) < 0.05 or abs(r.real - 4) < 0.05 or abs(abs(r.imag) - 4) < 0.05 for r in roots):
        return
    p = Polynomial.from_roots(roots)
    Q = QuasiPolynomial([(RationalFn(p.coeffs, Polynomial.from_roots([-1.0] * p.degree).coeffs), 0)], strict=False)
    expected = sum(1 for r in poly_roots(p) if 0 < r.real < 4 and abs(r.imag) < 4)
    assert winding_number(Q, (0.0, 4.0, -4.0, 4.0)) == expected
