"""Command-line front end.

Plant files are JSON with ``"format": 1``; coefficient lists in plant files
are descending (``[1, 2]`` is ``s + 2``), delays are rational strings such as
``"3"`` or ``"5/2"``.  Results are JSON, plot data CSV.  Exit codes: 0 ok,
2 infeasible, 3 input error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import InfeasibleError, InputError, StrongStabError
from .factorization import PlantFactorization, factorize
from .interpolants import StripInterpolant
from .nevpick import gamma_ss, interp_data, np_parametrization
from .quasipoly import QuasiPolynomial, classify
from .rational import RationalFn
from .strip import curve_gamma_vs_rho, gamma_ss_rho, strip_interpolant
from .synthesis import assemble_controller, verify_design
from .unitsearch import DEFAULT_C_GRID, find_unit, stability_boundaries
from .worked_example import select_zeros

FORMAT = 1
CONFIG_ENV = "STRONGSTAB_CONFIG"

DEFAULT_OPTIONS = {
    "epsilon": 1e-3,
    "ell_max": 2,
    "tolerances": {"gamma": 1e-6},
    "grid": {"wmin": 1e-3, "wmax": 1e3, "n": 2000},
    "omega": 50.0,
    "interpolation_zeros": None,
    "c_grid": list(DEFAULT_C_GRID),
    "resolution": 121,
}


# ---------------------------------------------------------------------------
# file formats


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno <= len(text.splitlines()) else ""
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    if doc.get("format") != FORMAT:
        raise InputError(f"{path}: unsupported or missing format (expected {FORMAT})")
    return doc


def _coeffs(x, what: str) -> list:
    if not isinstance(x, list) or not x or not all(isinstance(c, (int, float)) for c in x):
        raise InputError(f"{what}: expected a nonempty list of real numbers")
    return [float(c) for c in x][::-1]


def _rational(d: dict, what: str) -> RationalFn:
    if not isinstance(d, dict):
        raise InputError(f"{what}: expected an object with num and den")
    return RationalFn(_coeffs(d.get("num"), what + ".num"), _coeffs(d.get("den", [1]), what + ".den"))


def _parse_delay(x, what: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise InputError(f"{what}: delay must be a rational string like '3/2'")
    try:
        d = Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: delay {x!r} is not rational") from exc
    if d < 0:
        raise InputError(f"{what}: negative delay")
    return d


def parse_terms(terms, what: str) -> QuasiPolynomial:
    if not isinstance(terms, list) or not terms:
        raise InputError(f"{what}: expected a nonempty list of terms")
    out = []
    for i, t in enumerate(terms):
        out.append((_rational(t, f"{what}[{i}]"), _parse_delay(t.get("delay", "0"), f"{what}[{i}]")))
    return QuasiPolynomial(out)


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in (over or {}).items():
        out[k] = _merge(out[k], v) if isinstance(v, dict) and isinstance(out.get(k), dict) else v
    return out


@dataclass
class Problem:
    config: dict
    R: QuasiPolynomial
    T: QuasiPolynomial
    W: RationalFn
    options: dict
    _fact: Optional[PlantFactorization] = field(default=None, repr=False)

    @property
    def fact(self) -> PlantFactorization:
        if self._fact is None:
            self._fact = factorize(self.R, self.T, omega=self.options["omega"], epsilon=self.options["epsilon"])
        return self._fact

    @property
    def zeros(self) -> list:
        approx = self.options.get("interpolation_zeros")
        if not approx:
            return list(self.fact.Mn.zeros)
        try:
            return select_zeros(self.fact.Mn.zeros, [complex(*z) for z in approx])
        except (TypeError, ValueError) as exc:
            raise InputError(f"interpolation_zeros: {exc}") from exc

    @property
    def tol(self) -> float:
        return float(self.options["tolerances"]["gamma"])


def problem_from_config(cfg: dict) -> Problem:
    for key in ("numerator_terms", "denominator_terms", "weight"):
        if key not in cfg:
            raise InputError(f"missing field {key!r}")
    opts = _merge(DEFAULT_OPTIONS, cfg.get("options", {}))
    return Problem(
        config=cfg,
        R=parse_terms(cfg["numerator_terms"], "numerator_terms"),
        T=parse_terms(cfg["denominator_terms"], "denominator_terms"),
        W=_rational(cfg["weight"], "weight"),
        options=opts,
    )


def load_problem(path: Optional[str]) -> Problem:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        raise InputError(f"no plant file given and {CONFIG_ENV} is unset")
    return problem_from_config(_read_json(path))


def _cpx(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _rat_to_json(f: RationalFn) -> dict:
    enc = lambda c: [_cpx(x) for x in c[::-1]]
    return {"num": enc(f.num.coeffs), "den": enc(f.den.coeffs)}


def _rat_from_json(d: dict) -> RationalFn:
    dec = lambda c: [complex(*x) for x in c][::-1]
    return RationalFn(dec(d["num"]), dec(d["den"]), normalize=False)


# ---------------------------------------------------------------------------
# subcommands


def cmd_factorize(prob: Problem, args) -> dict:
    f = prob.fact
    return {
        "format": FORMAT,
        "case": f.case,
        "classification_T": classify(prob.T).value,
        "Mn_zeros": [_cpx(z) for z in f.Mn.zeros],
        "inner_T_zeros": [_cpx(z) for z in f.inner_T.zeros],
        "n_o": f.n_o,
        "interpolation_zeros": [_cpx(z) for z in prob.zeros],
        "checks": {"reconstruction_residual": _reconstruction(f)},
    }


def _reconstruction(f: PlantFactorization) -> float:
    s = 1j * np.logspace(-2, 2, 200)
    P = f.plant(s)
    return float(np.max(np.abs(f.Mn(s) / f.Md(s) * f.No(s) - P) / np.abs(P)))


def _rho_grid(spec: Optional[str]) -> np.ndarray:
    if not spec:
        return np.geomspace(2.2, np.exp(8), 30)
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            return np.geomspace(float(a), float(b), int(n))
        return np.array([float(x) for x in spec.split(",")])
    except ValueError as exc:
        raise InputError(f"bad --rho-grid {spec!r}") from exc


def cmd_gamma(prob: Problem, args):
    ell_max = int(prob.options["ell_max"])
    if args.mode == "unrestricted":
        res = gamma_ss(prob.W, prob.fact, prob.zeros, ell_max, prob.tol)
        return {"format": FORMAT, "mode": "unrestricted", "gamma": float(res.gamma), "ell": list(res.ell)}
    if args.mode == "strip":
        if args.rho is None:
            raise InputError("--rho is required in strip mode")
        res = gamma_ss_rho(prob.W, prob.fact, prob.zeros, args.rho, ell_max, prob.tol)
        return {"format": FORMAT, "mode": "strip", "rho": args.rho, "gamma": float(res.gamma), "ell": list(res.ell)}
    rows = curve_gamma_vs_rho(prob.W, prob.fact, prob.zeros, _rho_grid(args.rho_grid), ell_max, prob.tol)
    return [("rho", "gamma")] + [(r, "" if g is None else g) for r, g in rows]


def _design(prob: Problem, gamma: float, method: str, rho: Optional[float], allow_noncausal: bool):
    ell_max, tol = int(prob.options["ell_max"]), prob.tol
    if method == "strip":
        if rho is None:
            raise InputError("--rho is required for the strip method")
        lvl = gamma_ss_rho(prob.W, prob.fact, prob.zeros, rho, ell_max, tol)
        if gamma < lvl.gamma:
            raise InfeasibleError(f"below γ_ss,ρ = {float(lvl.gamma):.6g}")
        F = strip_interpolant(prob.W, prob.fact, prob.zeros, gamma, rho, lvl.ell)
        Fj = {"type": "strip", "sigma_o": F.sigma_o, "Gtil": _rat_to_json(F.Gtil)}
        extra = {"rho": rho, "ell": list(lvl.ell)}
    else:
        lvl = gamma_ss(prob.W, prob.fact, prob.zeros, ell_max, tol)
        if gamma <= lvl.gamma:
            raise InfeasibleError(f"below γ_ss = {float(lvl.gamma):.6g}")
        data = interp_data(prob.W, prob.fact, prob.zeros, gamma, lvl.ell)
        res = find_unit(
            np_parametrization(data), [float(c) for c in prob.options["c_grid"]], int(prob.options["resolution"])
        )
        if res is None:
            raise InfeasibleError("no first-order parameter yields a unit")
        F = res.F
        Fj = {"type": "rational", **_rat_to_json(F)}
        extra = {
            "ell": list(lvl.ell),
            "order": F.den.degree,
            "q": {"a": res.point.a, "b": res.point.b, "c": res.point.c},
            "unit": res.report.as_dict(),
        }
    C = assemble_controller(prob.W, gamma, F, prob.fact, zeros=prob.zeros, allow_noncausal=allow_noncausal)
    return C, Fj, extra


def cmd_design(prob: Problem, args) -> dict:
    C, Fj, extra = _design(prob, args.gamma, args.method, args.rho, args.allow_noncausal)
    g = prob.options["grid"]
    rep = verify_design(prob.fact, C, wmin=g["wmin"], wmax=g["wmax"], n=int(g["n"]))
    return {
        "format": FORMAT,
        "kind": "design",
        "plant": prob.config,
        "gamma": float(args.gamma),
        "method": args.method,
        "F": Fj,
        "interpolation_zeros": [_cpx(z) for z in prob.zeros],
        **extra,
        "report": rep.as_dict(),
    }


def controller_from_bundle(bundle: dict):
    """Rebuild (problem, controller) from a design bundle without re-running the search."""
    if bundle.get("kind") != "design":
        raise InputError("not a design bundle")
    prob = problem_from_config(bundle["plant"])
    Fj = bundle["F"]
    if Fj["type"] == "strip":
        F = StripInterpolant(Gtil=_rat_from_json(Fj["Gtil"]), sigma_o=float(Fj["sigma_o"]), gamma=bundle["gamma"])
    elif Fj["type"] == "rational":
        F = _rat_from_json(Fj)
        F = RationalFn(np.real(F.num.coeffs), np.real(F.den.coeffs))
    else:
        raise InputError(f"unknown interpolant type {Fj['type']!r}")
    zeros = [complex(*z) for z in bundle["interpolation_zeros"]]
    C = assemble_controller(prob.W, bundle["gamma"], F, prob.fact, zeros=zeros, allow_noncausal=True)
    return prob, C


def _freq_grid(spec: Optional[str]) -> np.ndarray:
    if not spec:
        return np.logspace(-2, 2, 400)
    try:
        a, b, n = spec.split(":")
        return np.logspace(np.log10(float(a)), np.log10(float(b)), int(n))
    except ValueError as exc:
        raise InputError(f"bad --grid {spec!r}, expected wmin:wmax:n") from exc


def cmd_freqresp(bundle: dict, args) -> list:
    prob, C = controller_from_bundle(bundle)
    w = _freq_grid(args.grid)
    s = 1j * w
    Fv = C.F(s)
    WS = prob.W(s) / (1 + prob.fact.plant(s) * C(s))
    rows = [("omega", "abs_F", "phase_F_deg", "abs_WS", "abs_C")]
    rows += zip(w, np.abs(Fv), np.degrees(np.unwrap(np.angle(Fv))), np.abs(WS), np.abs(C(s)))
    return rows


def cmd_regions(prob: Problem, args) -> list:
    lvl = gamma_ss(prob.W, prob.fact, prob.zeros, int(prob.options["ell_max"]), prob.tol)
    if args.gamma <= lvl.gamma:
        raise InfeasibleError(f"below γ_ss = {float(lvl.gamma):.6g}")
    p = np_parametrization(interp_data(prob.W, prob.fact, prob.zeros, args.gamma, lvl.ell))
    m = stability_boundaries(p, args.c, resolution=int(prob.options["resolution"]))
    rows = [("kind", "theta", "a", "b", "count", "in_dq", "cells")]
    for name, (al, be, c0) in (("line_plus", m.line_plus), ("line_minus", m.line_minus)):
        al, be, c0 = np.real(al), np.real(be), np.real(c0)
        for t in m.a_grid:
            if abs(be) >= abs(al):
                rows.append((name, "", t, -(al * t + c0) / be, "", "", ""))
            else:
                rows.append((name, "", -(be * t + c0) / al, t, "", "", ""))
    rows += [("curve", th, a, b, "", "", "") for th, a, b in m.curve]
    for r in m.regions:
        rows.append(("region", "", *r.representative, r.count, int(r.in_dq), r.cells))
        rows += [("probe", "", a, b, k, "", "") for (a, b), k in zip(r.probes, r.probe_counts)]
    return rows


# ---------------------------------------------------------------------------
# driver


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(InputError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="strongstab", description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", help="write to this file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    plant_help = f"plant JSON (default: ${CONFIG_ENV})"

    p = sub.add_parser("factorize", help="factor the plant and report its right-half-plane zeros")
    p.add_argument("plant", nargs="?", help=plant_help)

    p = sub.add_parser("gamma", help="optimal performance level")
    p.add_argument("plant", nargs="?", help=plant_help)
    p.add_argument("--mode", choices=("unrestricted", "strip", "curve"), default="unrestricted")
    p.add_argument("--rho", type=float)
    p.add_argument("--rho-grid", help="comma list or start:stop:n (geometric); curve mode, CSV output")

    p = sub.add_parser("design", help="interpolant, controller and verification report")
    p.add_argument("plant", nargs="?", help=plant_help)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--method", choices=("strip", "unit-search"), default="unit-search")
    p.add_argument("--rho", type=float)
    p.add_argument("--allow-noncausal", action="store_true")

    p = sub.add_parser("freqresp", help="CSV frequency response of a design bundle")
    p.add_argument("bundle")
    p.add_argument("--grid", help="wmin:wmax:n (logarithmic, default 1e-2:1e2:400)")

    p = sub.add_parser("regions", help="CSV root-count regions of the first-order parameter plane")
    p.add_argument("plant", nargs="?", help=plant_help)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--c", type=float, default=30.0)
    return ap


def _emit(result, path: Optional[str]) -> None:
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        if isinstance(result, dict):
            json.dump(result, fh, indent=2)
            fh.write("\n")
        else:
            csv.writer(fh).writerows(result)
    finally:
        if path:
            fh.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "freqresp":
            result = cmd_freqresp(_read_json(args.bundle), args)
        else:
            prob = load_problem(args.plant)
            result = {"factorize": cmd_factorize, "gamma": cmd_gamma, "design": cmd_design, "regions": cmd_regions}[
                args.command
            ](prob, args)
        _emit(result, args.output)
    except StrongStabError as exc:
        print(f"strongstab: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, TypeError, AttributeError) as exc:
        print(f"strongstab: malformed input: {exc!r}", file=sys.stderr)
        return InputError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
