"""Inner/inner/outer factorization ``P = Mn / Md * No`` of ``P = R / T``.

``Md`` and ``No`` are irrational for delay plants, so they are kept as
products of evaluable factors rather than closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConditionError, NumericalError
from .quasipoly import (
    QuasiPolynomial,
    SystemKind,
    check_axis_zeros,
    classify,
    default_box,
    qp_conjugate,
    rhp_zeros,
)
from .rational import BlaschkeProduct, RationalFn, axis_grid, blaschke_from_zeros

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class ProductFn:
    """``prod f_k(s) ** e_k`` for evaluable factors ``f_k`` and integer ``e_k``."""

    factors: tuple

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=complex)
        out = np.ones(s_arr.shape, dtype=complex)
        for f, e in self.factors:
            v = np.asarray(f(s_arr), dtype=complex)
            out = out * v**e
        return out if np.ndim(s) else complex(out)

    def inverse(self) -> "ProductFn":
        return ProductFn(tuple((f, -e) for f, e in self.factors))

    def __mul__(self, other) -> "ProductFn":
        if isinstance(other, ProductFn):
            return ProductFn(self.factors + other.factors)
        return ProductFn(self.factors + ((other, 1),))


@dataclass(frozen=True)
class PlantFactorization:
    R: QuasiPolynomial
    T: QuasiPolynomial
    Mn: BlaschkeProduct
    Md: ProductFn
    No: ProductFn
    n_o: int
    case: str  # "ii.a" (T is an I-system) or "ii.b"
    Tbar: Optional[QuasiPolynomial] = None
    # M_Tbar in case ii.a, M_T in case ii.b
    inner_T: BlaschkeProduct = field(default_factory=BlaschkeProduct)
    epsilon: float = DEFAULT_EPSILON

    def plant(self, s):
        return self.R(s) / self.T(s)

    @property
    def Neps(self) -> ProductFn:
        return regularize_outer(self.No, self.epsilon, self.n_o)

    @property
    def plant_zeros(self) -> list:
        return list(self.Mn.zeros)


def relative_degree(No: Callable, wmax: float = 1e4, n: int = 4000) -> int:
    """Nearest integer to the high-frequency roll-off of |No| in units of -20 dB/decade.

    The slope is a least-squares fit over the last two decades below ``wmax``
    (delay terms make |No| oscillate, a fit averages that out).
    """
    w = np.logspace(np.log10(wmax) - 2, np.log10(wmax), n)
    mag = np.abs(np.asarray(No(1j * w), dtype=complex))
    if not np.all(np.isfinite(mag)) or np.min(mag) <= 0:
        raise NumericalError("outer factor vanishes or is unbounded on the axis")
    slope = np.polyfit(np.log10(w), 20 * np.log10(mag), 1)[0]
    rd = -slope / 20.0
    k = int(round(rd))
    if abs(rd - k) > 0.2 or k < 0:
        raise NumericalError(f"non-integer relative degree (estimated {rd:.3f})")
    return k


def regularize_outer(No: Callable, epsilon: float, n_o: Optional[int] = None) -> ProductFn:
    """``No(s) (1 + epsilon s)^n_o`` so the regularized outer has no zero at infinity."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if n_o is None:
        n_o = relative_degree(No)
    base = No.factors if isinstance(No, ProductFn) else ((No, 1),)
    if n_o == 0:
        return ProductFn(tuple(base))
    return ProductFn(tuple(base) + ((RationalFn([1.0, epsilon]), n_o),))


def factorize(
    R: QuasiPolynomial,
    T: QuasiPolynomial,
    box=None,
    omega: float = 50.0,
    epsilon: float = DEFAULT_EPSILON,
) -> PlantFactorization:
    """Factor ``P = R/T`` (case ii.a when T is an I-system, ii.b otherwise).

    Right-half-plane zeros are searched in ``box`` (default: see
    :func:`strongstab.quasipoly.default_box` with imaginary half-width
    ``omega``).
    """
    if classify(R, check_conjugate=False) is SystemKind.I:
        raise ConditionError("infinitely many plant zeros unsupported")
    check_axis_zeros(R, "R")
    check_axis_zeros(T, "T")
    kind_T = classify(T)

    zR = rhp_zeros(R, box or default_box(R, omega)).zeros
    Mn = blaschke_from_zeros(zR, real=R.is_real)
    if kind_T is SystemKind.I:
        Tbar = qp_conjugate(T)
        check_axis_zeros(Tbar, "conjugate of T")
        zTb = rhp_zeros(Tbar, box or default_box(Tbar, omega)).zeros
        inner = blaschke_from_zeros(zTb, real=Tbar.is_real)
        Md = ProductFn(((inner, 1), (T, 1), (Tbar, -1)))
        No = ProductFn(((R, 1), (Mn, -1), (inner, 1), (Tbar, -1)))
        case = "ii.a"
    else:
        Tbar = None
        zT = rhp_zeros(T, box or default_box(T, omega)).zeros
        inner = blaschke_from_zeros(zT, real=T.is_real)
        Md = ProductFn(((inner, 1),))
        No = ProductFn(((R, 1), (Mn, -1), (inner, 1), (T, -1)))
        case = "ii.b"
    n_o = relative_degree(No)
    return PlantFactorization(
        R=R, T=T, Mn=Mn, Md=Md, No=No, n_o=n_o, case=case, Tbar=Tbar, inner_T=inner, epsilon=epsilon
    )
