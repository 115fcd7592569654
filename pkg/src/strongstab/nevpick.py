"""Nevanlinna-Pick interpolation for weighted sensitivity by stable controllers.

A unit ``F = exp(-G)`` with ``|F| <= 1`` and ``F(s_i) = omega_i / gamma``
exists iff some positive-real G meets ``G(s_i) = nu_i`` with
``nu_i = ln gamma - ln omega_i - 2 pi j l_i``; the branch integers ``l_i``
are searched over a bounded set.  Disc-side problems are solved with the
Schur recursion, whose 2x2 polynomial transfer matrix also gives the full
linear-fractional parametrization of all suboptimal solutions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import linalg, optimize

from .conformal import StripMaps, phi
from .errors import InfeasibleError, InputError, NumericalError
from .interpolants import ExpInterpolant, StripInterpolant
from .rational import Polynomial, RationalFn, mobius_substitute

PSD_TOL = 1e-10
SINGULAR_TOL = 1e-9


# ---------------------------------------------------------------------------
# interpolation data


def order_zeros(zeros: Sequence[complex], tol: float = 1e-8) -> list:
    """Conjugate pairs adjacent (upper half first), pairs by ascending |phi(s)|."""
    rest = [complex(z) for z in zeros]
    groups = []
    while rest:
        x = rest.pop(0)
        if abs(x.imag) <= tol * max(1.0, abs(x)):
            groups.append([complex(x.real, 0.0)])
            continue
        j = next((i for i, y in enumerate(rest) if abs(y - x.conjugate()) <= tol * max(1.0, abs(x))), None)
        if j is None:
            groups.append([x])
        else:
            y = rest.pop(j)
            groups.append(sorted([x, y], key=lambda v: -v.imag))
    groups.sort(key=lambda g: abs(phi(g[0])))
    return [z for g in groups for z in g]


def _pairs(s: np.ndarray, tol: float = 1e-8) -> list:
    """Index pairs (i, k) with s_k = conj(s_i), i < k."""
    out = []
    for i in range(len(s)):
        for k in range(i + 1, len(s)):
            if abs(s[k] - np.conj(s[i])) <= tol * max(1.0, abs(s[i])) and abs(s[i].imag) > tol:
                out.append((i, k))
    return out


@dataclass(frozen=True)
class InterpData:
    s: np.ndarray
    z: np.ndarray
    omega: np.ndarray
    ell: tuple
    nu: np.ndarray
    zeta: np.ndarray
    gamma: float
    sigma_o: Optional[float] = None  # None for the classical (unbounded) problem

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def targets(self) -> np.ndarray:
        """omega_i / gamma, the required values of F at s_i."""
        return self.omega / self.gamma

    @property
    def symmetric(self) -> bool:
        """True when the data set is closed under conjugation (real plant and weight)."""
        idx = set(range(self.n))
        for i, k in _pairs(self.s):
            if abs(self.omega[k] - np.conj(self.omega[i])) > 1e-9 * abs(self.omega[i]):
                return False
            idx -= {i, k}
        return all(abs(self.omega[i].imag) <= 1e-12 * abs(self.omega[i]) for i in idx)

    @property
    def rotation(self) -> complex:
        """Unimodular factor making the disc data conjugate-symmetric.

        psi(conj nu) = -conj(psi(nu)), so strip data need a factor -j.
        """
        return 1.0 if self.sigma_o is None else -1j


def _disc_values(nu: np.ndarray, sigma_o: Optional[float]) -> np.ndarray:
    if sigma_o is None:
        return (nu - 1) / (nu + 1)
    return StripMaps(sigma_o).psi(nu, check=False)


def interp_data(
    W: Callable,
    fact,
    zeros: Sequence[complex],
    gamma: float,
    ell: Optional[Sequence[int]] = None,
    sigma_o: Optional[float] = None,
) -> InterpData:
    """Interpolation data at the plant zeros ``zeros``.

    ``fact`` is a :class:`~strongstab.factorization.PlantFactorization` or any
    callable standing in for ``Md``.  Zeros are reordered by
    :func:`order_zeros`; ``ell`` refers to that order and must give opposite
    integers to conjugate pairs.
    """
    if gamma <= 0:
        raise InputError("gamma must be positive")
    Md = getattr(fact, "Md", fact)
    s = np.array(order_zeros(zeros), dtype=complex)
    if np.any(s.real <= 0):
        raise InputError("interpolation points must lie in the open right half plane")
    for i in range(len(s)):
        for k in range(i + 1, len(s)):
            if abs(s[i] - s[k]) <= 1e-9 * max(1.0, abs(s[i])):
                raise InputError("multiple interpolation point unsupported")
    z = np.asarray(phi(s), dtype=complex).reshape(-1)
    if np.any(np.abs(z) >= 1):
        raise InputError("interpolation point maps outside the unit disc")
    omega = np.asarray(W(s), dtype=complex) / np.asarray(Md(s), dtype=complex)
    ell = tuple(int(x) for x in (ell if ell is not None else [0] * len(s)))
    if len(ell) != len(s):
        raise InputError("one branch integer per interpolation point")
    for i, k in _pairs(s):
        if ell[i] != -ell[k]:
            raise InputError("conjugate points need opposite branch integers")
    nu = np.log(gamma) - np.log(omega) - 2j * np.pi * np.array(ell)
    return InterpData(
        s=s, z=z, omega=omega, ell=ell, nu=nu, zeta=_disc_values(nu, sigma_o), gamma=float(gamma), sigma_o=sigma_o
    )


def with_gamma(data: InterpData, gamma: float) -> InterpData:
    nu = np.log(gamma) - np.log(data.omega) - 2j * np.pi * np.array(data.ell)
    return replace(data, gamma=float(gamma), nu=nu, zeta=_disc_values(nu, data.sigma_o))


def ell_sets(s: Sequence[complex], ell_max: int = 2) -> Iterable[tuple]:
    """Branch-integer assignments with |l_i| <= ell_max, opposite on conjugate pairs, 0 on real points.

    ``s`` must already be in :func:`order_zeros` order.
    """
    s = np.asarray(s, dtype=complex)
    pairs = _pairs(s)
    free = [i for i, _ in pairs]
    for combo in itertools.product(range(-ell_max, ell_max + 1), repeat=len(free)):
        ell = [0] * len(s)
        for (i, k), v in zip(pairs, combo):
            ell[i], ell[k] = v, -v
        yield tuple(ell)


# ---------------------------------------------------------------------------
# Pick matrices


def pick_matrix(data: InterpData) -> np.ndarray:
    """``(nu_i + conj nu_k) / (1 - z_i conj z_k)``: PSD iff a positive-real G exists."""
    nu, z = data.nu, data.z
    M = (nu[:, None] + np.conj(nu)[None, :]) / (1 - z[:, None] * np.conj(z)[None, :])
    return 0.5 * (M + M.conj().T)


def disc_pick_matrix(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``(1 - w_i conj w_k) / (1 - z_i conj z_k)``: PSD iff a Schur function interpolates."""
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    M = (1 - w[:, None] * np.conj(w)[None, :]) / (1 - z[:, None] * np.conj(z)[None, :])
    return 0.5 * (M + M.conj().T)


def min_eig(M: np.ndarray) -> float:
    """Smallest eigenvalue relative to max(1, ||M||)."""
    ev = np.linalg.eigvalsh(M)
    return float(ev[0] / max(1.0, np.max(np.abs(ev))))


def is_psd(M: np.ndarray, tol: float = PSD_TOL) -> bool:
    return min_eig(M) >= -tol


# ---------------------------------------------------------------------------
# optimal levels


class GammaResult(NamedTuple):
    gamma: float
    ell: tuple


def _bisect(feasible: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Smallest feasible point in (lo, hi], given lo infeasible and hi feasible."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def gamma_ss(
    W: Callable, fact, zeros: Sequence[complex], ell_max: int = 2, tol: float = 1e-6, gamma_cap: float = 1e6
) -> GammaResult:
    """Smallest gamma admitting a unit interpolant, minimized over branch integers."""
    base = interp_data(W, fact, zeros, 1.0)
    lo = float(np.max(np.abs(base.omega)))
    best: Optional[GammaResult] = None
    for ell in ell_sets(base.s, ell_max):
        d = replace(base, ell=ell)

        def ok(g, d=d):
            return is_psd(pick_matrix(with_gamma(d, g)))

        hi = 2.0 * lo
        while not ok(hi) and hi < gamma_cap:
            hi *= 2.0
        if not ok(hi):
            continue
        g = _bisect(ok, lo, hi, tol)
        if best is None or g < best.gamma:
            best = GammaResult(g, ell)
    if best is None:
        raise InfeasibleError("infeasible within ℓ range")
    return best


def gamma_wsm(W: Callable, fact, zeros: Sequence[complex]) -> float:
    """Optimal level without the unit requirement: F only needs |F| <= 1.

    Feasibility of ``(1 - w_i conj w_k /gamma^2)/(1 - z_i conj z_k)`` is a
    generalized eigenvalue problem, solved in closed form.
    """
    d = interp_data(W, fact, zeros, 1.0)
    K = 1.0 / (1 - d.z[:, None] * np.conj(d.z)[None, :])
    B = d.omega[:, None] * np.conj(d.omega)[None, :] * K
    ev = linalg.eigh(0.5 * (B + B.conj().T), 0.5 * (K + K.conj().T), eigvals_only=True)
    return float(np.sqrt(max(ev[-1], 0.0)))


def refine_singular(data: InterpData, lo: float, hi: float, matrix: Callable[[InterpData], np.ndarray]) -> InterpData:
    """Move gamma in [lo, hi] to where the Pick matrix is exactly singular."""
    f = lambda g: np.linalg.eigvalsh(matrix(with_gamma(data, g)))[0]
    if f(lo) > 0 or f(hi) < 0:
        return with_gamma(data, hi)
    g = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return with_gamma(data, g)


# ---------------------------------------------------------------------------
# Schur recursion and the linear-fractional parametrization


def schur_parameters(z: Sequence[complex], w: Sequence[complex], allow_terminal: bool = False) -> list:
    """Schur recursion: list of ``(z_k, w_k)`` with ``|w_k| < 1``.

    With ``allow_terminal`` the last parameter may be unimodular (degenerate
    problem with a unique solution).
    """
    zs = [complex(x) for x in z]
    ws = [complex(x) for x in w]
    out = []
    while zs:
        z0, w0 = zs[0], ws[0]
        last = len(zs) == 1
        if abs(w0) >= 1 and not (allow_terminal and last and abs(abs(w0) - 1) < 1e-6):
            raise InfeasibleError("Pick matrix is not positive definite")
        out.append((z0, w0))
        zs, ws = zs[1:], ws[1:]
        ws = [((x - w0) / (1 - np.conj(w0) * x)) / ((zz - z0) / (1 - np.conj(z0) * zz)) for zz, x in zip(zs, ws)]
    return out


def _theta(zk: complex, wk: complex) -> list:
    a = Polynomial([-zk, 1.0])
    b = Polynomial([1.0, -np.conj(zk)])
    return [[a, b * wk], [a * np.conj(wk), b]]


def _matmul(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


def lft_matrix(z: Sequence[complex], w: Sequence[complex], normalize: bool = True) -> list:
    """2x2 polynomial matrix M with ``f = (M11 q + M12)/(M21 q + M22)``.

    The raw product of elementary Schur sections depends on the order of
    the points.  With ``normalize`` it is right-multiplied by ``M(1)^-1``
    (a disc automorphism of q), which makes it real for conjugate-symmetric
    data.  The result is scaled so the largest coefficient of M22 is 1.
    """
    M = [[Polynomial([1.0]), Polynomial([0.0])], [Polynomial([0.0]), Polynomial([1.0])]]
    for zk, wk in schur_parameters(z, w):
        M = _matmul(M, _theta(zk, wk))
    if normalize:
        M1 = np.array([[complex(M[i][j](1.0)) for j in range(2)] for i in range(2)])
        adj = np.array([[M1[1, 1], -M1[0, 1]], [-M1[1, 0], M1[0, 0]]])
        M = [[M[i][0] * adj[0, j] + M[i][1] * adj[1, j] for j in range(2)] for i in range(2)]
    c = M[1][1].coeffs[np.argmax(np.abs(M[1][1].coeffs))]
    M = [[Polynomial(p.coeffs / c) for p in row] for row in M]
    return M


def _realify(M: list, tol: float = 1e-8) -> tuple:
    scale = max(np.max(np.abs(p.coeffs)) for row in M for p in row)
    imag = max(np.max(np.abs(np.imag(p.coeffs))) for row in M for p in row)
    if imag <= tol * scale:
        return [[Polynomial(np.real(p.coeffs)) for p in row] for row in M], True
    return M, False


@dataclass(frozen=True)
class NPParametrization:
    """All solutions ``f = (Ptil q + Qtil)/(P + Q q)``, ``||q|| <= 1``, of ``f(z_i) = omega_i/gamma``."""

    Ptil: Polynomial
    Qtil: Polynomial
    P: Polynomial
    Q: Polynomial
    gamma: float
    data: InterpData
    real: bool = True

    def f(self, q) -> RationalFn:
        q = q if isinstance(q, RationalFn) else RationalFn.const(q)
        num = self.Ptil * q.num + self.Qtil * q.den
        den = self.P * q.den + self.Q * q.num
        return RationalFn(num, den)

    def evaluate(self, z, q):
        z = np.asarray(z, dtype=complex)
        q = np.asarray(q, dtype=complex)
        return (self.Ptil(z) * q + self.Qtil(z)) / (self.P(z) + self.Q(z) * q)

    @property
    def central(self) -> RationalFn:
        return RationalFn(self.Qtil, self.P)


def np_parametrization(data: InterpData, normalize: bool = True) -> NPParametrization:
    """Linear-fractional parametrization of all Schur interpolants of ``omega_i/gamma``."""
    w = data.targets
    if min_eig(disc_pick_matrix(data.z, w)) <= 1e-13:
        raise InfeasibleError("strictly suboptimal γ required")
    M = lft_matrix(data.z, w, normalize=normalize)
    real = False
    if normalize and data.symmetric:
        M, real = _realify(M)
    return NPParametrization(
        Ptil=M[0][0], Qtil=M[0][1], P=M[1][1], Q=M[1][0], gamma=data.gamma, data=data, real=real
    )


# ---------------------------------------------------------------------------
# disc interpolants


def degenerate_interpolant(z: np.ndarray, w: np.ndarray) -> RationalFn:
    """Unique Schur interpolant when the disc Pick matrix is singular.

    With ``Lambda x = 0``, ``A(z) = sum x_k/(1 - z conj z_k)`` and
    ``B(z) = sum conj(w_k) x_k/(1 - z conj z_k)`` satisfy
    ``A(z_i) = w_i B(z_i)``; ``A/B`` is a Blaschke product of degree rank(Lambda).
    """
    Lam = disc_pick_matrix(z, w)
    _, V = np.linalg.eigh(Lam)
    x = V[:, 0]
    A = Polynomial([0.0])
    B = Polynomial([0.0])
    for k in range(len(z)):
        rest = Polynomial([1.0])
        for m in range(len(z)):
            if m != k:
                rest = rest * Polynomial([1.0, -np.conj(z[m])])
        A = A + rest * x[k]
        B = B + rest * (np.conj(w[k]) * x[k])
    return RationalFn(A, B)


def central_interpolant(z: np.ndarray, w: np.ndarray) -> RationalFn:
    """Schur-recursion solution with the free parameter set to zero."""
    M = lft_matrix(z, w, normalize=False)
    return RationalFn(M[0][1], M[1][1])


def _symmetrize(h: RationalFn, z: np.ndarray, w: np.ndarray) -> RationalFn:
    """Average h with conj(h(conj z)) when h is not already real."""
    if h.is_real:
        return h
    scale = max(np.max(np.abs(h.num.coeffs)), np.max(np.abs(h.den.coeffs)))
    imag = max(np.max(np.abs(np.imag(h.num.coeffs))), np.max(np.abs(np.imag(h.den.coeffs))))
    if imag <= 1e-8 * scale:
        return RationalFn(np.real(h.num.coeffs), np.real(h.den.coeffs))
    hs = (h + h.conj()) * 0.5
    hs = RationalFn(np.real(hs.num.coeffs), np.real(hs.den.coeffs))
    if np.max(np.abs(hs(z) - w)) > 1e-8:
        raise NumericalError("symmetrized interpolant lost interpolation")
    return hs


def disc_interpolant(data: InterpData, symmetrize: bool = True, singular_tol: float = SINGULAR_TOL):
    """Disc function g with g(z_i) = zeta_i; returns (g, degenerate flag)."""
    alpha = data.rotation
    w = alpha * data.zeta
    lam = min_eig(disc_pick_matrix(data.z, w))
    if lam < -PSD_TOL:
        raise InfeasibleError("infeasible γ")
    degenerate = lam <= singular_tol
    h = degenerate_interpolant(data.z, w) if degenerate else central_interpolant(data.z, w)
    if symmetrize and data.symmetric:
        h = _symmetrize(h, data.z, w)
    return h * (1.0 / alpha), degenerate


def np_interpolant(data: InterpData, symmetrize: bool = True, singular_tol: float = SINGULAR_TOL):
    """Interpolant F(s) for ``data``: exp(-G) in the classical case, strip-composed otherwise.

    A singular Pick matrix yields the unique (degenerate) solution, a
    positive definite one the central solution.
    """
    g, _ = disc_interpolant(data, symmetrize, singular_tol)
    Gtil = mobius_substitute(g)
    if data.sigma_o is not None:
        return StripInterpolant(Gtil=Gtil, sigma_o=data.sigma_o, gamma=data.gamma)
    G = (1 + Gtil) / (1 - Gtil)
    return ExpInterpolant(G=G, gamma=data.gamma)


def optimal_interpolant(W: Callable, fact, zeros: Sequence[complex], ell_max: int = 2, tol: float = 1e-6):
    """gamma_ss, the data at the exactly singular level and the degenerate interpolant."""
    res = gamma_ss(W, fact, zeros, ell_max, tol)
    d = interp_data(W, fact, zeros, res.gamma, res.ell)
    lo = max(res.gamma - 2 * tol, float(np.max(np.abs(d.omega))) * (1 + 1e-12))
    d = refine_singular(d, lo, res.gamma, lambda x: disc_pick_matrix(x.z, x.zeta))
    return d, np_interpolant(d)
