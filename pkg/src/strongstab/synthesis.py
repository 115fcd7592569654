"""Controller assembly and numerical verification of a design.

With a unit F the controller

    C = (W - gamma Md F) / (gamma Mn F) * Neps^-1

gives W (1 + P C)^-1 = gamma Md F exactly (when n_o = 0), so the
weighted sensitivity has modulus gamma |F(jw)| on the axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InputError, NumericalError
from .factorization import PlantFactorization
from .interpolants import ExpInterpolant, StripInterpolant
from .rational import RationalFn, axis_grid, axis_infimum, hinf_norm_axis
from .unitsearch import verify_unit


@dataclass(frozen=True)
class ControllerRealization:
    W: RationalFn
    gamma: float
    F: Callable
    fact: PlantFactorization
    epsilon: float
    zeros: tuple = ()

    def __call__(self, s):
        """Generic form with the regularized outer factor."""
        f = self.fact
        Fv = self.F(s)
        return (self.W(s) - self.gamma * f.Md(s) * Fv) / (self.gamma * f.Mn(s) * Fv) / f.Neps(s)

    def delay_form(self, s):
        """``(W T_c / (gamma F M_c) - T) / R`` with T_c = conjugate of T (case ii.a) or T (ii.b)
        and M_c its inner factor; algebraically equal to the generic form when n_o = 0."""
        f = self.fact
        Tc = f.Tbar if f.case == "ii.a" else f.T
        return (self.W(s) * Tc(s) / (self.gamma * self.F(s) * f.inner_T(s)) - f.T(s)) / f.R(s)

    def numerator(self, s):
        return self.W(s) - self.gamma * self.fact.Md(s) * self.F(s)

    def numerator_residuals(self) -> np.ndarray:
        s = np.asarray(self.zeros, dtype=complex)
        if s.size == 0:
            return np.zeros(0)
        return np.abs(self.numerator(s)) / np.abs(self.W(s))


def _unit_check(F) -> tuple:
    """(is acceptable, reason)."""
    if isinstance(F, RationalFn):
        rep = verify_unit(F)
        return rep.is_unit, "" if rep.is_unit else "F is not a unit"
    if isinstance(F, ExpInterpolant):
        return F.is_causal, "" if F.is_causal else "F^-1 unbounded: controller is non-causal"
    if isinstance(F, StripInterpolant):
        return True, ""
    return True, ""


def assemble_controller(
    W: RationalFn,
    gamma: float,
    F: Callable,
    fact: PlantFactorization,
    epsilon: Optional[float] = None,
    zeros: Optional[Sequence[complex]] = None,
    allow_noncausal: bool = False,
) -> ControllerRealization:
    """Controller for interpolant F designed at level gamma.

    ``zeros`` are the interpolation points F was built for (default: all
    zeros of Mn); the controller numerator must vanish there.
    """
    ok, reason = _unit_check(F)
    if not ok and not allow_noncausal:
        raise InputError(reason)
    eps = fact.epsilon if epsilon is None else epsilon
    if eps != fact.epsilon:
        fact = PlantFactorization(**{**fact.__dict__, "epsilon": eps})
    zs = tuple(complex(z) for z in (fact.Mn.zeros if zeros is None else zeros))
    C = ControllerRealization(W=W, gamma=float(gamma), F=F, fact=fact, epsilon=eps, zeros=zs)
    res = C.numerator_residuals()
    if res.size and np.max(res) > 1e-6:
        raise NumericalError("controller numerator does not vanish at the interpolation points")
    return C


def controller_norm_bound(rho: float, gamma: float, W: Callable, No: Callable) -> float:
    """``(1 + rho/gamma ||W||) / inf|No(jw)|``, the bound on ||C|| when ||F^-1|| <= rho.

    The reciprocal of the axis infimum of |No| is used for ||No||^-1:
    bounding |C| = |W/(gamma F Md) - 1| / |No| needs a lower bound
    on |No|.
    """
    if rho <= 1 or gamma <= 0:
        raise InputError("need rho > 1 and gamma > 0")
    inf_no = axis_infimum(No)
    if inf_no < 1e-9:
        raise NumericalError("outer not boundedly invertible")
    w_norm = hinf_norm_axis(W) if not _is_zero(W) else 0.0
    return (1.0 + rho / gamma * w_norm) / inf_no


def _is_zero(W) -> bool:
    return isinstance(W, RationalFn) and W.num.is_zero


@dataclass
class DesignReport:
    achieved_norm: float
    identity_residual: Optional[float]
    unit_verdict: Optional[bool]
    controller_norm_bound: Optional[float]
    controller_norm_sampled: float
    min_return_difference_axis: float
    min_return_difference_rhp: float
    low_frequency_S: dict
    controller_rhp_poles: list = field(default_factory=list)

    @property
    def strongly_stabilizing(self) -> bool:
        return bool(self.unit_verdict) and not self.controller_rhp_poles

    def as_dict(self) -> dict:
        return {
            "achieved_norm": self.achieved_norm,
            "identity_residual": self.identity_residual,
            "unit_verdict": self.unit_verdict,
            "controller_norm_bound": self.controller_norm_bound,
            "controller_norm_sampled": self.controller_norm_sampled,
            "min_return_difference_axis": self.min_return_difference_axis,
            "min_return_difference_rhp": self.min_return_difference_rhp,
            "low_frequency_S": {str(k): v for k, v in self.low_frequency_S.items()},
            "controller_rhp_poles": [[float(z.real), float(z.imag)] for z in self.controller_rhp_poles],
            "strongly_stabilizing": self.strongly_stabilizing,
        }


def _bound_rho(F) -> Optional[float]:
    if isinstance(F, StripInterpolant):
        return F.rho
    if isinstance(F, RationalFn):
        rep = verify_unit(F)
        return rep.hinf_inv if np.isfinite(rep.hinf_inv) and rep.hinf_inv > 1 else None
    return None


def verify_design(
    fact: PlantFactorization,
    C: Callable,
    W: Optional[RationalFn] = None,
    wmin: float = 1e-3,
    wmax: float = 1e3,
    n: int = 2000,
    rho: Optional[float] = None,
) -> DesignReport:
    """Check a controller against the plant ``R/T`` on the imaginary axis.

    For a :class:`ControllerRealization` the identity |W S| = gamma |F| is
    asserted; 1 + P C is screened on the axis and on a right-half-plane
    lattice (a necessary-condition screen, not a stability proof).
    """
    if W is None:
        W = C.W
    w = axis_grid(wmin, wmax, n)
    s = 1j * w
    P = fact.plant(s)
    Cv = np.asarray(C(s), dtype=complex)
    ret = 1 + P * Cv
    WS = W(s) / ret

    realized = isinstance(C, ControllerRealization)
    identity = None
    unit = None
    bound = None
    poles: list = []
    if realized:
        target = C.gamma * np.abs(C.F(s))
        identity = float(np.max(np.abs(np.abs(WS) - target)) / C.gamma)
        if identity > 1e-3:
            raise NumericalError("assembly inconsistent")
        unit = _unit_check(C.F)[0]
        if isinstance(C.F, StripInterpolant):
            from .strip import check_strip_interpolant

            chk = check_strip_interpolant(C.F)
            unit = chk["max_abs_F"] <= 1 + 1e-6 and chk["max_abs_Finv"] <= C.F.rho * (1 + 1e-6)
        r = rho if rho is not None else _bound_rho(C.F)
        if r is not None:
            bound = controller_norm_bound(r, C.gamma, W, fact.No)
        # R zeros where the numerator does not vanish become controller poles
        for z in fact.Mn.zeros:
            if abs(C.numerator(z)) > 1e-6 * abs(W(z)):
                poles.append(complex(z))

    def ws_fn(x):
        return W(x) / (1 + fact.plant(x) * np.asarray(C(x), dtype=complex))

    achieved = hinf_norm_axis(ws_fn, wmin, wmax, n)
    xs = np.logspace(-2, 1, 12)
    ys = np.linspace(-20, 20, 41)
    lattice = (xs[:, None] + 1j * ys[None, :]).ravel()
    ret_rhp = 1 + fact.plant(lattice) * np.asarray(C(lattice), dtype=complex)
    low = {}
    for wl in (1e-3, 1e-2, 1e-1):
        sl = np.array([1j * wl])
        low[wl] = float(np.abs(1 / (1 + fact.plant(sl) * np.asarray(C(sl), dtype=complex)))[0])
    return DesignReport(
        achieved_norm=float(achieved),
        identity_residual=identity,
        unit_verdict=unit,
        controller_norm_bound=bound,
        controller_norm_sampled=float(np.max(np.abs(Cv))),
        min_return_difference_axis=float(np.min(np.abs(ret))),
        min_return_difference_rhp=float(np.min(np.abs(ret_rhp[np.isfinite(ret_rhp)]))),
        low_frequency_S=low,
        controller_rhp_poles=poles,
    )
