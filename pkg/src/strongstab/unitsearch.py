"""Finite-dimensional units from the suboptimal parametrization.

With a first-order free parameter ``q(z) = (a z + b)/(z + c)`` the
interpolant ``f`` is a unit when

    (a z + b) Ptil(z) + (z + c) Qtil(z)          (numerator)
    (z + c) P(z) + (a z + b) Q(z)                (denominator)

have no roots in the closed unit disc.  For fixed c both are affine in
(a, b), so the (a, b) plane splits into regions of constant root count
bounded by two lines (real roots crossing at z = +1, -1) and a curve
(complex pairs crossing at e^(j theta)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .nevpick import InterpData, NPParametrization
from .rational import Polynomial, RationalFn, hinf_norm_axis, mobius_substitute

DEFAULT_C_GRID = (1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0, 30.0, -30.0, 100.0, -100.0)
ROOT_MARGIN = 1e-9


def in_dq(a: float, b: float, c: float) -> bool:
    """Membership in the first-order parameter set for ||q|| <= 1."""
    return abs(c) >= 1 and abs(a + b) <= abs(c + 1) and abs(a - b) <= abs(c - 1)


@dataclass(frozen=True)
class DqPoint:
    a: float
    b: float
    c: float

    @property
    def valid(self) -> bool:
        return in_dq(self.a, self.b, self.c)

    def q(self) -> RationalFn:
        return RationalFn([self.b, self.a], [self.c, 1.0], normalize=False)


def q_norm(a: float, b: float, c: float, n: int = 2048) -> float:
    """max |q(e^(j theta))| on a circle grid."""
    zc = np.exp(1j * np.linspace(0, 2 * np.pi, n, endpoint=False))
    den = zc + c
    if np.min(np.abs(den)) == 0:
        return float(np.inf) if abs(a * (-c) + b) > 0 else float(abs(a))
    return float(np.max(np.abs((a * zc + b) / den)))


def charpoly(p: NPParametrization, a: float, b: float, c: float) -> Polynomial:
    return Polynomial([b, a]) * p.Ptil + Polynomial([c, 1.0]) * p.Qtil


def denominator_poly(p: NPParametrization, a: float, b: float, c: float) -> Polynomial:
    return Polynomial([c, 1.0]) * p.P + Polynomial([b, a]) * p.Q


def _stack(p: NPParametrization, A: np.ndarray, B: np.ndarray, c: float, which: str) -> np.ndarray:
    """Coefficient rows of the numerator/denominator polynomial for arrays of (a, b)."""
    if which == "num":
        X, Y = p.Ptil.coeffs, p.Qtil.coeffs
    else:
        X, Y = p.Q.coeffs, p.P.coeffs
    deg = max(len(X), len(Y)) + 1
    zX = np.zeros(deg, dtype=complex)
    zX[1 : len(X) + 1] = X  # z * X
    X0 = np.zeros(deg, dtype=complex)
    X0[: len(X)] = X
    Yc = np.zeros(deg, dtype=complex)
    Yc[: len(Y)] += c * Y
    Yc[1 : len(Y) + 1] += Y
    return A[..., None] * zX + B[..., None] * X0 + Yc


def disc_root_counts(coeffs: np.ndarray, margin: float = ROOT_MARGIN) -> tuple:
    """Count roots with |r| <= 1 + margin and the distance of the closest root to the circle.

    ``coeffs`` is (..., deg+1) ascending; batched through companion eigenvalues.
    """
    shape = coeffs.shape[:-1]
    C = coeffs.reshape(-1, coeffs.shape[-1])
    scale = np.max(np.abs(C), axis=1, keepdims=True)
    C = C / np.where(scale == 0, 1, scale)
    counts = np.zeros(C.shape[0], dtype=int)
    dist = np.full(C.shape[0], np.inf)
    # group rows by effective degree so each batch has a nonzero leading coefficient
    eff = np.array([np.nonzero(np.abs(row) > 1e-13)[0].max(initial=0) for row in C])
    for d in np.unique(eff):
        rows = np.nonzero(eff == d)[0]
        if d == 0:
            continue
        sub = C[rows, : d + 1]
        comp = np.zeros((len(rows), d, d), dtype=complex)
        comp[:, 1:, :-1] = np.eye(d - 1)[None]
        comp[:, :, -1] = -sub[:, :d] / sub[:, d : d + 1]
        r = np.linalg.eigvals(comp)
        mod = np.abs(r)
        counts[rows] = np.sum(mod <= 1 + margin, axis=1)
        dist[rows] = np.min(np.abs(mod - 1), axis=1)
    return counts.reshape(shape), dist.reshape(shape)


@dataclass
class Region:
    count: int
    representative: tuple
    cells: int
    probes: list = field(default_factory=list)
    probe_counts: list = field(default_factory=list)
    in_dq: bool = False


@dataclass
class RegionMap:
    c: float
    line_plus: tuple  # (alpha, beta, const): alpha a + beta b + const = 0 at z = +1
    line_minus: tuple  # same at z = -1
    curve: np.ndarray  # (k, 3): theta, a, b
    regions: list
    a_grid: np.ndarray
    b_grid: np.ndarray
    counts: np.ndarray
    complex_coefficients: bool = False


def stability_boundaries(
    p: NPParametrization, c: float, n_theta: int = 400, resolution: int = 121, pad: float = 1.25
) -> RegionMap:
    """Root-crossing boundaries of the numerator polynomial for fixed c and its regions.

    Regions are connected components of constant disc-root count on a grid
    covering the D_q slice; each gets a representative (the cell deepest
    inside it) and three probe points.
    """
    if abs(c) < 1:
        raise ValueError("|c| must be at least 1")
    P1, Q1 = complex(p.Ptil(1.0)), complex(p.Qtil(1.0))
    Pm, Qm = complex(p.Ptil(-1.0)), complex(p.Qtil(-1.0))
    line_plus = (P1, P1, (1 + c) * Q1)
    line_minus = (-Pm, Pm, (c - 1) * Qm)

    curve = []
    for th in np.linspace(0, np.pi, n_theta + 2)[1:-1]:
        e = np.exp(1j * th)
        Pe, Qe = complex(p.Ptil(e)), complex(p.Qtil(e))
        rhs = -(e + c) * Qe
        M = np.array([[(e * Pe).real, Pe.real], [(e * Pe).imag, Pe.imag]])
        if np.linalg.cond(M) > 1e12:
            continue
        a, b = np.linalg.solve(M, [rhs.real, rhs.imag])
        curve.append((th, a, b))
    curve = np.array(curve).reshape(-1, 3)

    half = pad * 0.5 * (abs(c + 1) + abs(c - 1))
    a_grid = np.linspace(-half, half, resolution)
    b_grid = np.linspace(-half, half, resolution)
    A, B = np.meshgrid(a_grid, b_grid, indexing="ij")
    counts, _ = disc_root_counts(_stack(p, A, B, c, "num"))

    rng = np.random.default_rng(0)
    regions = []
    for k in np.unique(counts):
        labels, nlab = ndimage.label(counts == k)
        for lab in range(1, nlab + 1):
            mask = labels == lab
            depth = ndimage.distance_transform_edt(np.pad(mask, 1))[1:-1, 1:-1]
            order = np.argsort(depth.ravel())[::-1]
            i, j = np.unravel_index(order[0], mask.shape)
            rep = (float(a_grid[i]), float(b_grid[j]))
            interior = np.flatnonzero(depth.ravel() >= 2)
            picks = rng.choice(interior, size=min(3, interior.size), replace=False) if interior.size else []
            probes = [
                (float(a_grid[ii]), float(b_grid[jj])) for ii, jj in (np.unravel_index(x, mask.shape) for x in picks)
            ]
            pc = [int(disc_root_counts(charpoly(p, a, b, c).coeffs[None])[0][0]) for a, b in probes]
            regions.append(
                Region(
                    count=int(k),
                    representative=rep,
                    cells=int(mask.sum()),
                    probes=probes,
                    probe_counts=pc,
                    in_dq=bool(np.any(mask & _dq_mask(A, B, c))),
                )
            )
    return RegionMap(
        c=float(c),
        line_plus=line_plus,
        line_minus=line_minus,
        curve=curve,
        regions=regions,
        a_grid=a_grid,
        b_grid=b_grid,
        counts=counts,
        complex_coefficients=not p.real,
    )


def _dq_mask(A: np.ndarray, B: np.ndarray, c: float) -> np.ndarray:
    return (np.abs(A + B) <= abs(c + 1)) & (np.abs(A - B) <= abs(c - 1))


@dataclass
class UnitReport:
    hinf: float
    hinf_inv: float
    zeros: np.ndarray
    poles: np.ndarray
    residuals: np.ndarray
    is_unit: bool

    def as_dict(self) -> dict:
        return {
            "hinf": self.hinf,
            "hinf_inv": self.hinf_inv,
            "zeros": [[float(z.real), float(z.imag)] for z in self.zeros],
            "poles": [[float(z.real), float(z.imag)] for z in self.poles],
            "max_residual": float(np.max(np.abs(self.residuals), initial=0.0)),
            "is_unit": bool(self.is_unit),
        }


def verify_unit(F: RationalFn, data: Optional[InterpData] = None) -> UnitReport:
    """Norms, zeros, poles and interpolation residuals of a rational F."""
    zeros, poles = F.zeros(), F.poles()
    lhp = bool(np.all(zeros.real < 0) and np.all(poles.real < 0))
    hinf = hinf_norm_axis(F)
    hinf_inv = hinf_norm_axis(F.inverse()) if lhp and F.relative_degree == 0 else float("inf")
    residuals = np.zeros(0) if data is None else np.asarray(F(data.s)) - data.targets
    return UnitReport(
        hinf=hinf,
        hinf_inv=hinf_inv,
        zeros=zeros,
        poles=poles,
        residuals=residuals,
        is_unit=lhp and F.relative_degree == 0 and hinf <= 1.0,
    )


@dataclass
class UnitResult:
    point: DqPoint
    f: RationalFn
    F: RationalFn
    margin: float
    report: UnitReport
    region_map: Optional[RegionMap] = None


def find_unit(
    p: NPParametrization,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
    resolution: int = 121,
    keep_maps: bool = False,
) -> Optional[UnitResult]:
    """First c in ``c_grid`` admitting a unit; within it the best-conditioned (a, b).

    Returns None when no grid point yields a unit.
    """
    for c in c_grid:
        if abs(c) < 1:
            continue
        half = 0.5 * (abs(c + 1) + abs(c - 1))
        g = np.linspace(-half, half, resolution)
        A, B = np.meshgrid(g, g, indexing="ij")
        dq = _dq_mask(A, B, c)
        if not dq.any():
            continue
        Aq, Bq = A[dq], B[dq]
        n_cnt, n_dist = disc_root_counts(_stack(p, Aq, Bq, c, "num"))
        d_cnt, d_dist = disc_root_counts(_stack(p, Aq, Bq, c, "den"))
        ok = (n_cnt == 0) & (d_cnt == 0)
        if not ok.any():
            continue
        margin = np.minimum(n_dist, d_dist)
        for idx in np.argsort(np.where(ok, -margin, np.inf)):
            if not ok[idx]:
                break
            a, b = float(Aq[idx]), float(Bq[idx])
            if q_norm(a, b, c) > 1 + 1e-6:
                continue
            pt = DqPoint(a, b, float(c))
            f = p.f(pt.q())
            F = mobius_substitute(f)
            if not F.is_real:
                F = RationalFn(np.real(F.num.coeffs), np.real(F.den.coeffs))
            report = verify_unit(F, p.data)
            if not report.is_unit or np.max(np.abs(report.residuals)) > 1e-6:
                continue
            rmap = stability_boundaries(p, c, resolution=resolution) if keep_maps else None
            return UnitResult(point=pt, f=f, F=F, margin=float(margin[idx]), report=report, region_map=rmap)
    return None
