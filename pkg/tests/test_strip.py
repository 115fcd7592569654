import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongstab import nevpick as npk
from strongstab import strip
from strongstab.conformal import StripMaps
from strongstab.errors import InfeasibleError, InputError
from strongstab.rational import RationalFn

RHO3 = float(np.exp(3.0))


def _reference_gtil(s):
    return 1j * (-0.99794 * (s - 3.415) * (s + 1)) / ((s + 3.406) * (s + 1.001))


@pytest.fixture(scope="module")
def strip_F(example):
    fact, W, zeros = example
    return strip.strip_interpolant(W, fact, zeros, 1.08, RHO3)


def test_midline_maps_to_centre():
    m = StripMaps(3.0)
    assert abs(m.psi(1.5)) < 1e-15
    assert m.psi_inv(0.0) == pytest.approx(1.5, abs=1e-15)


def test_psi_round_trip():
    m = StripMaps(3.0)
    nu = 0.5 + 2j
    assert m.psi_inv(m.psi(nu)) == pytest.approx(nu, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 8.0), st.floats(0.0, 1.0), st.floats(-20, 20))
def test_map_sandwich(sigma, frac, y):
    m = StripMaps(sigma)
    nu = complex(frac * sigma, y)
    mod = abs(m.psi(nu, check=False))
    if 0 < frac < 1:
        assert mod < 1 + 1e-12
    else:
        assert mod == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 8.0), st.floats(0, 0.999), st.floats(0, 2 * np.pi))
def test_exp_of_inverse_map_in_annulus(sigma, r, th):
    m = StripMaps(sigma)
    val = abs(np.exp(-m.psi_inv(r * np.exp(1j * th))))
    assert np.exp(-sigma) - 1e-12 <= val <= 1 + 1e-12


def test_feasible_interval_example(example):
    fact, W, zeros = example
    om = npk.interp_data(W, fact, zeros, 1.0).omega
    lo, hi = strip.feasible_gamma_interval(om, RHO3)
    assert lo == pytest.approx(np.sqrt(0.79**2 + 0.42**2), abs=5e-3)
    assert hi == pytest.approx(RHO3 * lo, rel=1e-12)


def test_feasible_interval_edges():
    assert strip.feasible_gamma_interval([0.5, 0.6j], 1.0 + 1e-9) is None
    assert strip.feasible_gamma_interval([0.5, 0.5j], 3.0) == pytest.approx((0.5, 1.5))
    with pytest.raises(InputError):
        strip.feasible_gamma_interval([1.0], 0.9)


def test_gamma_ss_rho_example(example):
    fact, W, zeros = example
    assert strip.gamma_ss_rho(W, fact, zeros, RHO3).gamma == pytest.approx(1.08, abs=0.01)
    big = strip.gamma_ss_rho(W, fact, zeros, float(np.exp(8.0))).gamma
    unrestricted = npk.gamma_ss(W, fact, zeros).gamma
    assert big == pytest.approx(unrestricted, abs=5e-3)
    assert big >= unrestricted - 1e-6


def test_rho_threshold(example):
    fact, W, zeros = example
    with pytest.raises(InfeasibleError):
        strip.gamma_ss_rho(W, fact, zeros, 2.0)
    assert strip.gamma_ss_rho(W, fact, zeros, 2.6).gamma > 1.08


def test_strip_interpolant(example, strip_F):
    fact, W, zeros = example
    d = npk.interp_data(W, fact, zeros, 1.08)
    assert np.max(np.abs(strip_F(d.s) - d.targets)) < 1e-6
    w = np.logspace(-3, 3, 2000)
    assert np.max(np.abs(strip_F.Gtil(1j * w))) <= 1 + 1e-6
    chk = strip.check_strip_interpolant(strip_F)
    assert chk["real_axis_imag"] < 1e-8
    assert chk["max_abs_F"] <= 1 + 1e-9
    assert chk["max_abs_Finv"] <= RHO3 * (1 + 1e-9)


def test_strip_interpolant_matches_reference(strip_F):
    w = np.logspace(-2, 2, 20)
    assert np.max(np.abs(strip_F.Gtil(1j * w) - _reference_gtil(1j * w))) < 5e-2


def test_strip_interpolant_outside_interval(example):
    fact, W, zeros = example
    with pytest.raises(InfeasibleError):
        strip.strip_interpolant(W, fact, zeros, 0.8, RHO3)


def test_curve_monotone(example):
    fact, W, zeros = example
    rhos = [2.0, 2.6, 3.0, 5.0, 10.0, RHO3, 100.0, 1000.0]
    curve = strip.curve_gamma_vs_rho(W, fact, zeros, rhos)
    assert curve[0][1] is None
    vals = [g for _, g in curve if g is not None]
    assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0704, abs=5e-3)


def test_curve_single_point():
    W = RationalFn.const(0.8)
    one = lambda s: np.ones_like(np.asarray(s, dtype=complex))
    for rho, g in strip.curve_gamma_vs_rho(W, one, [1.3], [1.5, 3.0, 20.0], tol=1e-8):
        assert g == pytest.approx(0.8, abs=1e-6)
