"""Polynomials, rational functions and Blaschke products in one complex variable.

Coefficients are stored in ascending order (``c[0] + c[1] x + ...``), the
``numpy.polynomial`` convention.  Arrays whose imaginary parts are negligible
are stored as real arrays so that real-coefficient data stays real through
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize

from .errors import InputError, NumericalError, PoleError

_REAL_TOL = 1e-13
_POLE_TOL = 1e-12


def _clean(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.size == 0:
        c = np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    if scale > 0:
        nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
        c = c[: nz[-1] + 1]
        if np.max(np.abs(c.imag)) <= _REAL_TOL * scale:
            return c.real.copy()
    elif np.all(c.imag == 0):
        return np.zeros(1)
    return c


class Polynomial:
    """Immutable polynomial with ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _clean(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "Polynomial":
        if len(roots) == 0:
            return cls([lead])
        return cls(lead * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    @property
    def degree(self) -> int:
        if self.is_zero:
            return 0
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    @property
    def lead(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, s):
        return npoly.polyval(s, self.coeffs)

    def roots(self) -> np.ndarray:
        return poly_roots(self)

    def deriv(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial(npoly.polyder(self.coeffs))

    def reflect(self) -> "Polynomial":
        """p(-x)."""
        signs = (-1.0) ** np.arange(len(self.coeffs))
        return Polynomial(self.coeffs * signs)

    def conj(self) -> "Polynomial":
        """conj(p(conj(x))): conjugated coefficients."""
        return Polynomial(np.conj(self.coeffs))

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return NotImplemented
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return Polynomial(npoly.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        return Polynomial(npoly.polypow(self.coeffs, k)) if k else Polynomial([1.0])

    def __truediv__(self, other):
        return RationalFn(self, Polynomial([1.0])) / other

    def __repr__(self):
        return f"Polynomial({np.array2string(self.coeffs, precision=6)})"


def _as_poly(x):
    if isinstance(x, Polynomial):
        return x
    if np.isscalar(x):
        return Polynomial([x])
    return NotImplemented


def poly_roots(p: Polynomial) -> np.ndarray:
    """Roots via companion-matrix eigenvalues, polished by a few Newton steps."""
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    if p.is_zero:
        raise InputError("degenerate polynomial")
    if p.degree == 0:
        return np.zeros(0, dtype=complex)
    r = npoly.polyroots(p.coeffs).astype(complex)
    dp = npoly.polyder(p.coeffs)
    for _ in range(3):
        d = npoly.polyval(r, dp)
        ok = np.abs(d) > 1e-300
        step = np.zeros_like(r)
        step[ok] = npoly.polyval(r[ok], p.coeffs) / d[ok]
        # only accept steps that are small relative to root spacing
        small = np.abs(step) < 1e-3 * np.maximum(1.0, np.abs(r))
        r = np.where(small, r - step, r)
    if p.is_real:
        r = _snap_conjugates(r)
    return r


def _snap_conjugates(r: np.ndarray) -> np.ndarray:
    out = r.copy()
    for i, x in enumerate(out):
        if abs(x.imag) <= 1e-12 * max(1.0, abs(x)):
            out[i] = x.real
    return out


class RationalFn:
    """Ratio of polynomials, stored with a monic denominator.

    Common roots of numerator and denominator closer than ``cancel_tol``
    (relative) are removed on construction.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, cancel_tol: float = 1e-8, normalize: bool = True):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = Polynomial([1.0]) if den is None else den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero:
            raise InputError("denominator identically zero")
        if normalize:
            num, den = _coprime(num, den, cancel_tol)
        lead = den.lead
        object.__setattr__(self, "num", Polynomial(num.coeffs / lead))
        object.__setattr__(self, "den", Polynomial(den.coeffs / lead))

    def __setattr__(self, name, value):
        raise AttributeError("RationalFn is immutable")

    @classmethod
    def const(cls, c) -> "RationalFn":
        return cls([c], [1.0])

    @classmethod
    def from_zpk(cls, zeros, poles, k) -> "RationalFn":
        return cls(Polynomial.from_roots(zeros, k), Polynomial.from_roots(poles))

    @property
    def is_real(self) -> bool:
        return self.num.is_real and self.den.is_real

    @property
    def relative_degree(self) -> int:
        if self.num.is_zero:
            return 10**9
        return self.den.degree - self.num.degree

    @property
    def is_proper(self) -> bool:
        return self.relative_degree >= 0

    def zeros(self) -> np.ndarray:
        if self.num.is_zero:
            return np.zeros(0, dtype=complex)
        return self.num.roots()

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def high_frequency_gain(self) -> complex:
        """Limit at infinity for proper functions."""
        if not self.is_proper:
            return complex(np.inf)
        if self.relative_degree > 0:
            return 0.0
        return self.num.lead / self.den.lead

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=complex)
        d = self.den(s_arr)
        scale = np.sum(np.abs(self.den.coeffs)) * np.maximum(1.0, np.abs(s_arr)) ** self.den.degree
        if np.any(np.abs(d) < _POLE_TOL * scale):
            raise PoleError("evaluation at pole")
        out = self.num(s_arr) / d
        return out if np.ndim(s) else complex(out)

    def deriv(self) -> "RationalFn":
        n, d = self.num, self.den
        return RationalFn(n.deriv() * d - n * d.deriv(), d * d)

    def reflect(self) -> "RationalFn":
        """f(-s)."""
        return RationalFn(self.num.reflect(), self.den.reflect())

    def conj(self) -> "RationalFn":
        """conj(f(conj s))."""
        return RationalFn(self.num.conj(), self.den.conj())

    def inverse(self) -> "RationalFn":
        if self.num.is_zero:
            raise PoleError("inverse of zero function")
        return RationalFn(self.den, self.num)

    def __add__(self, other):
        other = _as_rational(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        other = _as_rational(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rational(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rational(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_rational(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFn(self.num**k, self.den**k)

    def __repr__(self):
        return f"RationalFn(num={self.num.coeffs!r}, den={self.den.coeffs!r})"


def _as_rational(x):
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, Polynomial):
        return RationalFn(x, Polynomial([1.0]), normalize=False)
    if isinstance(x, BlaschkeProduct):
        return x.to_rational()
    if np.isscalar(x):
        return RationalFn([x], [1.0], normalize=False)
    return NotImplemented


def _coprime(num: Polynomial, den: Polynomial, tol: float):
    if num.is_zero:
        return Polynomial([0.0]), Polynomial([1.0])
    if num.degree == 0 or den.degree == 0:
        return num, den
    rn, rd = poly_roots(num), poly_roots(den)
    keep_n = np.ones(len(rn), bool)
    keep_d = np.ones(len(rd), bool)
    for i, x in enumerate(rn):
        cand = np.nonzero(keep_d)[0]
        if cand.size == 0:
            break
        dist = np.abs(rd[cand] - x)
        j = cand[np.argmin(dist)]
        if abs(rd[j] - x) <= tol * max(1.0, abs(x)):
            keep_n[i] = False
            keep_d[j] = False
    if keep_n.all():
        return num, den
    real = num.is_real and den.is_real
    new_n = Polynomial.from_roots(rn[keep_n], num.lead)
    new_d = Polynomial.from_roots(rd[keep_d], den.lead)
    if real:
        new_n = Polynomial(np.real(new_n.coeffs))
        new_d = Polynomial(np.real(new_d.coeffs))
    return new_n, new_d


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite right-half-plane Blaschke product ``sign * prod (s - a)/(s + conj a)``."""

    zeros: tuple = ()
    sign: float = 1.0

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=complex)
        out = np.full(s_arr.shape, self.sign, dtype=complex)
        for a in self.zeros:
            out = out * (s_arr - a) / (s_arr + np.conj(a))
        return out if np.ndim(s) else complex(out)

    def to_rational(self) -> RationalFn:
        num = Polynomial.from_roots(self.zeros, self.sign)
        den = Polynomial.from_roots([-np.conj(a) for a in self.zeros])
        if _is_conjugate_closed(self.zeros):
            num, den = Polynomial(np.real(num.coeffs)), Polynomial(np.real(den.coeffs))
        return RationalFn(num, den, normalize=False)

    def __len__(self):
        return len(self.zeros)


def _is_conjugate_closed(zeros, tol: float = 1e-9) -> bool:
    rest = list(zeros)
    while rest:
        x = rest.pop()
        if abs(np.imag(x)) <= tol * max(1.0, abs(x)):
            continue
        idx = [i for i, y in enumerate(rest) if abs(y - np.conj(x)) <= tol * max(1.0, abs(x))]
        if not idx:
            return False
        rest.pop(idx[0])
    return True


def blaschke_from_zeros(zeros: Sequence[complex], real: bool = False) -> BlaschkeProduct:
    zs = tuple(complex(z) for z in zeros)
    for z in zs:
        if not z.real > 0:
            raise InputError(f"not interior RHP: {z}")
    if real and not _is_conjugate_closed(zs):
        raise InputError("zeros are not closed under conjugation")
    return BlaschkeProduct(zs, 1.0)


def _binomial_powers(K: int):
    """Coefficient arrays of (s-1)^k (s+1)^(K-k), k = 0..K."""
    out = []
    for k in range(K + 1):
        c = npoly.polymul(npoly.polypow([-1.0, 1.0], k), npoly.polypow([1.0, 1.0], K - k))
        out.append(c)
    return out


def mobius_substitute(f) -> RationalFn:
    """Compose ``f(z)`` with ``z = (s - 1)/(s + 1)``.

    Numerator and denominator are expanded over the common power
    ``(s + 1)^K`` with ``K = max(deg num, deg den)``, so no spurious common
    factors are introduced.
    """
    if isinstance(f, Polynomial):
        f = RationalFn(f, Polynomial([1.0]), normalize=False)
    n, d = f.num.coeffs, f.den.coeffs
    K = max(len(n), len(d)) - 1
    basis = _binomial_powers(K)

    def expand(c):
        acc = np.zeros(K + 1, dtype=complex)
        for k, ck in enumerate(c):
            acc[: len(basis[k])] += ck * basis[k]
        return acc

    return RationalFn(expand(n), expand(d))


def _vectorized(f: Callable) -> Callable:
    def g(s):
        try:
            out = np.asarray(f(s), dtype=complex)
            if out.shape == np.shape(s):
                return out
        except (TypeError, ValueError):
            pass
        return np.array([complex(f(x)) for x in np.ravel(s)]).reshape(np.shape(s))

    return g


def axis_grid(wmin: float = 1e-4, wmax: float = 1e4, n: int = 2000) -> np.ndarray:
    return np.logspace(np.log10(wmin), np.log10(wmax), n)


def hinf_norm_axis(
    f,
    wmin: float = 1e-4,
    wmax: float = 1e4,
    n: int = 2000,
    refine: bool = True,
) -> float:
    """sup |f(jw)| over w >= 0, from a log grid refined by golden-section search.

    ``f`` is anything callable on complex arrays (or scalars).  The value at
    w = 0 and the high-frequency limit are included: exactly for
    :class:`RationalFn`, by sampling at 1e6 and 1e8 rad/s otherwise.
    """
    fv = _vectorized(f)
    if isinstance(f, RationalFn) and np.any(np.abs(f.poles().real) <= _POLE_TOL):
        raise NumericalError("unbounded on axis")
    w = axis_grid(wmin, wmax, n)
    try:
        mag = np.abs(fv(1j * w))
        extra = [abs(complex(fv(np.array([0j]))[0]))]
    except PoleError as exc:
        raise NumericalError("unbounded on axis") from exc
    if isinstance(f, RationalFn):
        if not f.is_proper:
            raise NumericalError("unbounded on axis")
        extra.append(abs(f.high_frequency_gain()))
    else:
        extra.extend(np.abs(fv(1j * np.array([1e6, 1e8]))))
    if not (np.all(np.isfinite(mag)) and np.all(np.isfinite(extra))):
        raise NumericalError("unbounded on axis")
    i = int(np.argmax(mag))
    best = float(mag[i])
    if refine and 0 < i < n - 1:
        x = np.log(w)

        def neg(t):
            return -abs(complex(fv(np.array([1j * np.exp(t)]))[0]))

        try:
            t = optimize.golden(neg, brack=(x[i - 1], x[i], x[i + 1]), tol=1e-10)
            best = max(best, -neg(t))
        except (ValueError, RuntimeError):
            pass
    return float(max(best, *extra))


def axis_infimum(f, wmin: float = 1e-4, wmax: float = 1e4, n: int = 4000) -> float:
    """inf |f(jw)| on a log grid plus w = 0 and w = 1e6."""
    fv = _vectorized(f)
    w = np.concatenate([[0.0], axis_grid(wmin, wmax, n), [1e6]])
    mag = np.abs(fv(1j * w))
    if not np.all(np.isfinite(mag)):
        raise NumericalError("unbounded on axis")
    return float(np.min(mag))
