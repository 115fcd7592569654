"""Interpolation with a bound on ||F^-1||: G must map into the strip 0 < Re G < ln(rho)."""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Optional, Sequence

import numpy as np

from .conformal import StripMaps, psi, psi_inv
from .errors import InfeasibleError, InputError
from .interpolants import StripInterpolant
from .nevpick import (
    GammaResult,
    _bisect,
    disc_pick_matrix,
    ell_sets,
    interp_data,
    is_psd,
    np_interpolant,
    with_gamma,
)

__all__ = [
    "StripMaps",
    "StripInterpolant",
    "psi",
    "psi_inv",
    "feasible_gamma_interval",
    "gamma_ss_rho",
    "strip_interpolant",
    "curve_gamma_vs_rho",
]


def feasible_gamma_interval(omega: Sequence[complex], rho: float) -> Optional[tuple]:
    """Open interval of gamma with 0 < Re nu_i < ln(rho) for every i, or None if empty.

    Re nu_i = ln(gamma/|omega_i|), so the interval is (max|omega|, rho min|omega|).
    """
    if rho <= 1:
        raise InputError("rho must exceed 1")
    mags = np.abs(np.asarray(omega, dtype=complex))
    lo, hi = float(np.max(mags)), float(rho * np.min(mags))
    if hi <= lo:
        return None
    return (lo, hi)


def _strip_pick_ok(d) -> bool:
    return is_psd(disc_pick_matrix(d.z, d.zeta))


def gamma_ss_rho(
    W: Callable,
    fact,
    zeros: Sequence[complex],
    rho: float,
    ell_max: int = 2,
    tol: float = 1e-6,
    scan: int = 400,
) -> GammaResult:
    """Smallest gamma for which the strip-constrained problem is solvable.

    Feasibility need not be monotone near the upper end of the interval, so
    the interval is scanned for the first feasible point and the boundary is
    then bisected from the last infeasible one.
    """
    sigma_o = float(np.log(rho))
    base = interp_data(W, fact, zeros, 1.0, sigma_o=sigma_o)
    interval = feasible_gamma_interval(base.omega, rho)
    if interval is None:
        raise InfeasibleError("infeasible ρ: empty gamma interval")
    lo, hi = interval
    grid = np.geomspace(lo, hi, scan + 2)[1:-1]
    best: Optional[GammaResult] = None
    for ell in ell_sets(base.s, ell_max):
        d = replace(base, ell=ell)

        def ok(g, d=d):
            return _strip_pick_ok(with_gamma(d, g))

        prev = lo
        for g in grid:
            if best is not None and g >= best.gamma:
                break
            if ok(g):
                val = _bisect(ok, prev, g, tol)
                if best is None or val < best.gamma:
                    best = GammaResult(val, ell)
                break
            prev = g
    if best is None:
        raise InfeasibleError("infeasible ρ")
    return best


def strip_interpolant(
    W: Callable,
    fact,
    zeros: Sequence[complex],
    gamma: float,
    rho: float,
    ell: Optional[Sequence[int]] = None,
) -> StripInterpolant:
    """F = exp(-psi_inv(Gtil(s))) interpolating omega_i/gamma with e^-sigma_o <= |F| <= 1."""
    sigma_o = float(np.log(rho))
    d = interp_data(W, fact, zeros, gamma, ell, sigma_o=sigma_o)
    interval = feasible_gamma_interval(d.omega, rho)
    if interval is None or not interval[0] < gamma < interval[1]:
        raise InfeasibleError("infeasible ρ: gamma outside the feasible interval")
    return np_interpolant(d)


def check_strip_interpolant(F: StripInterpolant, n: int = 40) -> dict:
    """Numerical screens: |F| <= 1 and |1/F| <= rho on a right-half-plane lattice, F real on the real axis."""
    x = np.concatenate([[1e-6], np.logspace(-3, 2, n)])
    y = np.concatenate([-np.logspace(2, -3, n), [0.0], np.logspace(-3, 2, n)])
    S = x[:, None] + 1j * y[None, :]
    mag = np.abs(F(S))
    sig = np.logspace(-3, 3, 200)
    real_err = float(np.max(np.abs(np.imag(F(sig.astype(complex))))))
    return {
        "max_abs_F": float(np.max(mag)),
        "max_abs_Finv": float(np.max(1.0 / mag)),
        "rho": F.rho,
        "real_axis_imag": real_err,
    }


def curve_gamma_vs_rho(
    W: Callable, fact, zeros: Sequence[complex], rhos: Sequence[float], ell_max: int = 2, tol: float = 1e-6
) -> list:
    """[(rho, gamma_ss_rho or None)] over a grid of rho values."""
    out = []
    for rho in rhos:
        try:
            out.append((float(rho), gamma_ss_rho(W, fact, zeros, rho, ell_max, tol).gamma))
        except InfeasibleError:
            out.append((float(rho), None))
    return out
