import numpy as np
import pytest

from strongstab.errors import ConditionError
from strongstab.factorization import factorize, regularize_outer, relative_degree
from strongstab.worked_example import REFERENCE_ZEROS, plant
from strongstab.quasipoly import QuasiPolynomial
from strongstab.rational import RationalFn

W_GRID = 1j * np.logspace(-2, 2, 100)


def test_example_factorization(example):
    fact, _, zeros = example
    assert fact.case == "ii.a"
    assert fact.n_o == 0
    assert len(fact.inner_T.zeros) == 0  # the conjugate of T has no RHP zeros
    for z in REFERENCE_ZEROS:
        assert min(abs(np.array(zeros) - z)) < 1e-3
    R, T = plant()
    Tb = fact.Tbar
    s = np.array([0.5 + 1j, 2.0, 3j])
    assert np.allclose(fact.Md(s), T(s) / Tb(s))
    assert np.allclose(fact.No(s), R(s) / fact.Mn(s) / Tb(s))


def test_reconstruction(example):
    fact, _, _ = example
    P = fact.plant(W_GRID)
    rec = fact.Mn(W_GRID) / fact.Md(W_GRID) * fact.No(W_GRID)
    assert np.max(np.abs(rec - P) / np.abs(P)) < 1e-8


def test_inner_all_pass_and_outer_modulus(example):
    fact, _, _ = example
    assert np.max(np.abs(np.abs(fact.Mn(W_GRID)) - 1)) < 1e-8
    assert np.max(np.abs(np.abs(fact.Md(W_GRID)) - 1)) < 1e-8
    assert np.allclose(np.abs(fact.No(W_GRID)), np.abs(fact.plant(W_GRID)), rtol=1e-8)


def test_finite_dimensional_nonminimum_phase():
    R = QuasiPolynomial([(RationalFn([-2, 1, 1], [2, 3, 1]), 0)])  # (s-1)(s+2)/((s+1)(s+2))
    T = QuasiPolynomial([(RationalFn.const(1.0), 0)])
    f = factorize(R, T)
    assert np.allclose(f.Mn.zeros, [1.0])
    s = np.array([0.3 + 1j, 4.0])
    assert np.allclose(f.Md(s), 1.0)
    assert np.allclose(f.No(s), R(s) / ((s - 1) / (s + 1)))


def test_stable_minimum_phase_rational(rng):
    for _ in range(5):
        zs = -rng.uniform(0.1, 5, 2)
        ps = -rng.uniform(0.1, 5, 3)
        P = RationalFn.from_zpk(zs, ps, rng.uniform(0.5, 3))
        f = factorize(QuasiPolynomial([(P, 0)]), QuasiPolynomial([(RationalFn.const(1.0), 0)]))
        assert len(f.Mn) == 0 and len(f.inner_T.zeros) == 0
        assert np.allclose(f.No(W_GRID), P(W_GRID))
        assert f.n_o == 1


def test_infinitely_many_plant_zeros_rejected():
    R = QuasiPolynomial([(RationalFn([1], [1, 1]), 0), (RationalFn.const(2.0), 1)])
    T = QuasiPolynomial([(RationalFn.const(1.0), 0)])
    with pytest.raises(ConditionError, match="infinitely many plant zeros"):
        factorize(R, T)


@pytest.mark.parametrize("den, k", [([1, 1], 1), ([1, 2, 1], 2)])
def test_relative_degree(den, k):
    assert relative_degree(RationalFn([1], den)) == k


def test_example_relative_degree(example):
    assert relative_degree(example[0].No) == 0


def test_regularize_outer():
    No = RationalFn([1], [1, 1])
    N = regularize_outer(No, 0.1)
    s = np.array([0.2j, 3 + 1j])
    assert np.allclose(N(s), (1 + 0.1 * s) / (s + 1))
    assert relative_degree(N) == 0
    assert regularize_outer(No, 0.5, n_o=0)(2.0) == pytest.approx(No(2.0))
