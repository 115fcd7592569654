"""Quasi-polynomials ``Q(s) = sum_i Q_i(s) exp(-h_i s)`` with rational coefficients.

Zero location uses the argument principle on rectangles: the winding number
of Q along the boundary counts zeros, cells are subdivided until each holds
one zero, and Newton iteration polishes it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConditionError, InputError, NumericalError
from .rational import BlaschkeProduct, Polynomial, RationalFn, axis_grid

Box = tuple  # (re_min, re_max, im_min, im_max)


def _delay(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"delay {x!r} is not a rational number") from exc
    if isinstance(x, float):
        # floats are accepted only when they are short decimals
        f = Fraction(x).limit_denominator(10**6)
        if abs(float(f) - x) > 1e-12:
            raise InputError(f"delay {x!r} is not a rational number")
        return f
    raise InputError(f"delay {x!r} is not a rational number")


class QuasiPolynomial:
    """Finite sum of rational coefficients times delay exponentials.

    With ``strict=True`` (the default) every coefficient must be proper with
    all poles in the open left half plane, and delays must start at 0 and be
    strictly increasing.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Sequence, strict: bool = True):
        parsed = []
        for coeff, delay in terms:
            if not isinstance(coeff, RationalFn):
                coeff = RationalFn(coeff) if isinstance(coeff, Polynomial) else RationalFn.const(coeff)
            parsed.append((coeff, _delay(delay)))
        if not parsed:
            raise InputError("quasi-polynomial needs at least one term")
        delays = [d for _, d in parsed]
        if delays[0] != 0 or any(b <= a for a, b in zip(delays, delays[1:])):
            raise InputError("delays must start at 0 and be strictly increasing")
        if parsed[0][0].num.is_zero:
            raise InputError("delay-free coefficient must be nonzero")
        if strict:
            for coeff, _ in parsed:
                if not coeff.is_proper:
                    raise InputError("coefficient is not proper")
                p = coeff.poles()
                if p.size and np.max(p.real) >= 0:
                    raise InputError("coefficient is not stable")
        object.__setattr__(self, "terms", tuple(parsed))

    def __setattr__(self, name, value):
        raise AttributeError("QuasiPolynomial is immutable")

    @classmethod
    def rational(cls, f: RationalFn, strict: bool = True) -> "QuasiPolynomial":
        return cls([(f, 0)], strict=strict)

    @property
    def delays(self) -> list:
        return [d for _, d in self.terms]

    @property
    def coefficients(self) -> list:
        return [c for c, _ in self.terms]

    @property
    def max_delay(self) -> Fraction:
        return self.terms[-1][1]

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.coefficients)

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=complex)
        out = np.zeros(s_arr.shape, dtype=complex)
        for coeff, h in self.terms:
            out = out + coeff(s_arr) * np.exp(-float(h) * s_arr)
        return out if np.ndim(s) else complex(out)

    def deriv(self, s):
        """Q'(s) evaluated analytically."""
        s_arr = np.asarray(s, dtype=complex)
        out = np.zeros(s_arr.shape, dtype=complex)
        for coeff, h in self.terms:
            hf = float(h)
            out = out + (coeff.deriv()(s_arr) - hf * coeff(s_arr)) * np.exp(-hf * s_arr)
        return out if np.ndim(s) else complex(out)

    def __repr__(self):
        parts = [f"({c.num.coeffs}/{c.den.coeffs})e^(-{d}s)" for c, d in self.terms]
        return "QuasiPolynomial(" + " + ".join(parts) + ")"


def qp_eval(Q: QuasiPolynomial, s):
    return Q(s)


def _cluster(values: np.ndarray, tol: float = 1e-6):
    """Group nearly equal complex values; returns (representatives, multiplicities)."""
    reps, mult = [], []
    for v in values:
        for i, r in enumerate(reps):
            if abs(r - v) <= tol * max(1.0, abs(r)):
                mult[i] += 1
                break
        else:
            reps.append(v)
            mult.append(1)
    return reps, mult


def qp_conjugate(T: QuasiPolynomial) -> QuasiPolynomial:
    """``exp(-tau_max s) T(-s) M_C(s)`` with M_C cancelling the mirrored poles of T."""
    tau = T.max_delay
    # M_C zeros: mirror image of every pole of T, at the largest multiplicity seen in any term
    needed: dict = {}
    for coeff in T.coefficients:
        reps, mult = _cluster(coeff.poles())
        for r, m in zip(reps, mult):
            key = next((k for k in needed if abs(k - r) <= 1e-6 * max(1.0, abs(k))), r)
            needed[key] = max(needed.get(key, 0), m)
    mc_zeros = [-p for p, m in needed.items() for _ in range(m)]
    mc_num = Polynomial.from_roots(mc_zeros)
    mc_den = Polynomial.from_roots([np.conj(p) for p in needed for _ in range(needed[p])])
    if T.is_real:
        mc_num, mc_den = Polynomial(np.real(mc_num.coeffs)), Polynomial(np.real(mc_den.coeffs))
    terms = []
    for coeff, h in reversed(T.terms):
        refl = coeff.reflect()
        # mc_num(s) is divisible by the reflected denominator; divide exactly
        q, r = np.polynomial.polynomial.polydiv(mc_num.coeffs, refl.den.coeffs)
        if np.max(np.abs(r), initial=0.0) > 1e-8 * np.max(np.abs(mc_num.coeffs)):
            raise NumericalError("conjugate construction: pole cancellation failed")
        new = RationalFn(refl.num * Polynomial(q), mc_den)
        terms.append((new, tau - h))
    return QuasiPolynomial(terms)


def conjugate_inner(T: QuasiPolynomial) -> BlaschkeProduct:
    """The all-pass factor M_C used by :func:`qp_conjugate`."""
    zeros = []
    for coeff in T.coefficients:
        zeros.extend(-p for p in coeff.poles())
    reps, _ = _cluster(np.array(zeros))
    return BlaschkeProduct(tuple(reps))


# ---------------------------------------------------------------------------
# argument principle


@dataclass
class RhpZeroReport:
    zeros: list
    count: int
    box: Box
    classification_hint: str = "finite"
    scale: float = 1.0


def _phase_walk(f: Callable, a: complex, b: complex, scale: float, n0: int = 64, max_points: int = 200000) -> float:
    """Accumulated arg change of f along the segment a -> b with steps < pi/4."""
    t = np.linspace(0.0, 1.0, n0)
    vals = f(a + (b - a) * t)
    for _ in range(40):
        if np.any(~np.isfinite(vals)) or np.min(np.abs(vals)) < 1e-13 * scale:
            raise NumericalError("boundary zero suspected")
        d = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(d) >= np.pi / 4
        if not bad.any():
            return float(np.sum(d))
        if t.size > max_points:
            break
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        t_new = np.concatenate([t, mids])
        order = np.argsort(t_new)
        t = t_new[order]
        vals = np.concatenate([vals, f(a + (b - a) * mids)])[order]
    raise NumericalError("boundary zero suspected")


def winding_number(f: Callable, box: Box, scale: float = 1.0) -> int:
    x0, x1, y0, y1 = box
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    total = 0.0
    for k in range(4):
        total += _phase_walk(f, corners[k], corners[(k + 1) % 4], scale)
    w = total / (2 * np.pi)
    if abs(w - round(w)) > 0.1:
        raise NumericalError("boundary zero suspected")
    return int(round(w))


def _newton(f: Callable, df: Callable, s0: complex, scale: float, iters: int = 60):
    # a diverging iterate overflows the delay exponentials; that just means "no root here"
    with np.errstate(over="ignore", invalid="ignore"):
        return _newton_iter(f, df, s0, scale, iters)


def _newton_iter(f: Callable, df: Callable, s0: complex, scale: float, iters: int):
    s = complex(s0)
    for _ in range(iters):
        fv = complex(f(np.array([s]))[0])
        dv = complex(df(np.array([s]))[0])
        if dv == 0 or not np.isfinite(dv):
            return None
        step = fv / dv
        s -= step
        if not np.isfinite(s):
            return None
        if abs(step) <= 1e-14 * max(1.0, abs(s)):
            break
    fv = abs(complex(f(np.array([s]))[0]))
    if fv > 1e-8 * scale:
        return None
    return s


def _numeric_deriv(f: Callable) -> Callable:
    def df(s):
        h = 1e-6 * np.maximum(1.0, np.abs(s))
        return (f(s + h) - f(s - h)) / (2 * h)

    return df


def _callables(Q):
    fv = lambda s: np.asarray(Q(np.asarray(s, dtype=complex)), dtype=complex)
    if isinstance(Q, QuasiPolynomial):
        df = lambda s: np.asarray(Q.deriv(np.asarray(s, dtype=complex)), dtype=complex)
    elif isinstance(Q, (RationalFn, Polynomial)):
        d = Q.deriv()
        df = lambda s: np.asarray(d(np.asarray(s, dtype=complex)), dtype=complex)
    else:
        df = _numeric_deriv(fv)
    return fv, df


def default_box(Q, omega: float = 50.0) -> Box:
    """Search rectangle [0, sigma_max] x [-omega, omega].

    sigma_max is ``1 + sum_i sup|Q_i| / |Q_0(inf)|`` (how far right a delayed
    term can still cancel the delay-free one), enlarged to cover the moduli of
    all coefficient numerator roots.
    """
    if not isinstance(Q, QuasiPolynomial):
        roots = Q.zeros() if isinstance(Q, RationalFn) else np.asarray(Q.roots())
        m = float(np.max(np.abs(roots), initial=0.0))
        return (0.0, 1.0 + 2 * m, -max(omega, 2 * m + 1), max(omega, 2 * m + 1))
    c0 = abs(Q.coefficients[0].high_frequency_gain())
    sigma = 1.0
    if c0 > 0:
        w = axis_grid(1e-3, 1e3, 400)
        for coeff in Q.coefficients[1:]:
            sigma += float(np.max(np.abs(coeff(1j * w)))) / c0
    else:
        sigma = 10.0
    for coeff in Q.coefficients:
        if coeff.num.degree > 0:
            sigma = max(sigma, 1.0 + float(np.max(np.abs(coeff.zeros()))))
    return (0.0, float(sigma), -float(omega), float(omega))


def _box_scale(fv: Callable, box: Box) -> float:
    x0, x1, y0, y1 = box
    xs = np.linspace(x0, x1, 33)
    ys = np.linspace(y0, y1, 33)
    pts = np.concatenate([xs + 1j * y0, xs + 1j * y1, x0 + 1j * ys, x1 + 1j * ys])
    v = np.abs(fv(pts))
    v = v[np.isfinite(v)]
    return float(np.max(v)) if v.size else 1.0


def rhp_zeros(Q, box: Box | None = None, max_subdiv: int = 24, omega: float = 50.0) -> RhpZeroReport:
    """Zeros of ``Q`` inside ``box`` by the argument principle plus Newton polishing.

    ``Q`` is a :class:`QuasiPolynomial` or anything evaluable on complex arrays.
    A box whose boundary passes (numerically) through a zero is shifted by 1e-6.
    """
    if box is None:
        box = default_box(Q, omega)
    fv, df = _callables(Q)
    scale = _box_scale(fv, box)
    shift = 0.0
    for attempt in range(4):
        b = (box[0] + shift, box[1] + shift, box[2] + shift, box[3] + shift)
        try:
            count = winding_number(fv, b, scale)
            break
        except NumericalError:
            shift = 1e-6 * (attempt + 1) * (-1) ** attempt
    else:
        raise NumericalError("boundary zero suspected")
    box = b
    zeros: list = []
    _search(fv, df, box, count, scale, 0, max_subdiv, zeros)
    zeros.sort(key=lambda z: (round(z.real, 9), z.imag))
    return RhpZeroReport(zeros=zeros, count=count, box=tuple(box), scale=scale)


def _split(fv, df, box, scale):
    """Split a box in two along its longer side, nudging the cut off any zero."""
    x0, x1, y0, y1 = box
    for frac in (0.5, 0.5 + 1 / 37, 0.5 - 1 / 41, 0.5 + 1 / 13):
        if (x1 - x0) >= (y1 - y0):
            xm = x0 + frac * (x1 - x0)
            parts = [(x0, xm, y0, y1), (xm, x1, y0, y1)]
        else:
            ym = y0 + frac * (y1 - y0)
            parts = [(x0, x1, y0, ym), (x0, x1, ym, y1)]
        try:
            counts = [winding_number(fv, p, scale) for p in parts]
            return parts, counts
        except NumericalError:
            continue
    raise NumericalError("boundary zero suspected")


def _search(fv, df, box, count, scale, depth, max_subdiv, out):
    if count <= 0:
        return
    x0, x1, y0, y1 = box
    if count == 1:
        s = _newton(fv, df, complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), scale)
        if s is not None and x0 <= s.real <= x1 and y0 <= s.imag <= y1:
            out.append(s)
            return
    if depth >= max_subdiv:
        found = []
        for s0 in (complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), complex(x0, y0), complex(x1, y1)):
            s = _newton(fv, df, s0, scale)
            if s is not None and x0 <= s.real <= x1 and y0 <= s.imag <= y1:
                if all(abs(s - t) > 1e-9 * max(1.0, abs(s)) for t in found):
                    found.append(s)
        if len(found) != count:
            raise NumericalError("unresolved cluster")
        out.extend(found)
        return
    parts, counts = _split(fv, df, box, scale)
    for p, c in zip(parts, counts):
        _search(fv, df, p, c, scale, depth + 1, max_subdiv, out)


def axis_minimum(Q, scale: float | None = None, wmax: float = 1e3, n: int = 20000) -> float:
    """min |Q(jw)| over a dense grid on [0, wmax] (real data is symmetric)."""
    fv, _ = _callables(Q)
    w = np.concatenate([np.linspace(0.0, 10.0, n // 2), np.linspace(10.0, wmax, n // 2)])
    return float(np.min(np.abs(fv(1j * w))))


def check_axis_zeros(Q, name: str = "Q", rel_tol: float = 1e-6) -> None:
    """Raise ConditionError if Q (numerically) vanishes on the imaginary axis."""
    fv, _ = _callables(Q)
    w = np.linspace(-1e3, 1e3, 40001)
    vals = np.abs(fv(1j * w))
    scale = float(np.max(vals))
    if np.min(vals) <= rel_tol * scale:
        raise ConditionError(f"{name} has an imaginary-axis zero (condition (ii))")


# ---------------------------------------------------------------------------
# F-system / I-system


class SystemKind(str, enum.Enum):
    F = "F-system"
    I = "I-system"


def chain_real_parts(Q: QuasiPolynomial) -> list:
    """Asymptotic real parts of the high-frequency zero chains of Q.

    Each coefficient behaves like ``c_i s^(-d_i)`` at infinity.  If the
    delay-free term does not have the smallest relative degree, a chain
    drifts to Re s -> +inf (returned as ``inf``).  If it is the only term of
    smallest relative degree the system is retarded and every chain drifts to
    -inf.  Otherwise the chains sit at ``Re s = -L ln|lambda_k|`` where
    lambda_k are the roots of ``sum c_i lambda^(L h_i)`` over the principal
    terms and 1/L is the commensurate delay unit.
    """
    degs = [c.relative_degree for c in Q.coefficients]
    dmin = min(degs)
    if degs[0] > dmin:
        return [math.inf]
    principal = [i for i, d in enumerate(degs) if d == dmin]
    if principal == [0]:
        return [-math.inf]
    delays = [Q.delays[i] for i in principal]
    L = 1
    for d in delays:
        L = L * d.denominator // math.gcd(L, d.denominator)
    if L * max(delays) > 2000:
        raise NumericalError("incommensurate delays: chain polynomial too large")
    lead = []
    for i in principal:
        c = Q.coefficients[i]
        lead.append(c.num.lead / c.den.lead)
    poly = np.zeros(int(L * max(delays)) + 1, dtype=complex)
    for d, c in zip(delays, lead):
        poly[int(d * L)] += c
    lam = Polynomial(poly).roots()
    return sorted(float(-L * np.log(abs(x))) for x in lam)


def classify(T: QuasiPolynomial, check_conjugate: bool = True, growth_fallback: bool = True) -> SystemKind:
    """F-system (finitely many RHP zeros) or I-system (infinitely many)."""
    try:
        chains = chain_real_parts(T)
    except NumericalError:
        if not growth_fallback:
            raise
        return _growth_classify(T)
    for r in chains:
        if abs(r) <= 1e-6:
            raise ConditionError("marginal chain, condition (ii) violated")
    kind = SystemKind.I if max(chains) > 0 else SystemKind.F
    if kind is SystemKind.I and check_conjugate:
        conj_chains = chain_real_parts(qp_conjugate(T))
        if max(conj_chains) > 0:
            raise ConditionError("conjugate system also has infinitely many RHP zeros")
    return kind


def _growth_classify(T: QuasiPolynomial) -> SystemKind:
    box = default_box(T)
    counts = []
    for om in (20.0, 40.0, 80.0):
        b = (box[0], box[1], 0.0, om)
        counts.append(winding_number(lambda s: T(s), b, _box_scale(lambda s: T(s), b)))
    return SystemKind.I if counts[2] > counts[1] > counts[0] else SystemKind.F
