"""The worked delay-plant example shipped with the package.

R has four zeros in the right half plane; the reference design interpolates
only the pair nearest the origin (``REFERENCE_ZEROS``), and the shipped config
restricts to it as well.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .quasipoly import QuasiPolynomial
from .rational import RationalFn

REFERENCE_ZEROS = (0.3125 + 0.8548j, 0.3125 - 0.8548j)


def config_path() -> str:
    return str(resources.files("strongstab") / "data" / "delay_example.json")


def plant() -> tuple:
    R = QuasiPolynomial([(RationalFn.const(1.0), 0), (RationalFn([4.0], [1.0, 1.0]), 3)])
    T = QuasiPolynomial([(RationalFn.const(1.0), 0), (RationalFn([-2.0, 2.0], [1.0, 1.0]), 2)])
    return R, T


def weight() -> RationalFn:
    return RationalFn([1.0, 0.1], [1.0, 1.0])


def select_zeros(candidates, approx=REFERENCE_ZEROS, tol: float = 1e-2) -> list:
    """Computed zeros nearest to each approximate location."""
    cand = np.asarray(list(candidates), dtype=complex)
    out = []
    for a in approx:
        if cand.size == 0:
            raise ValueError("no computed zeros to match")
        k = int(np.argmin(np.abs(cand - a)))
        if abs(cand[k] - a) > tol * max(1.0, abs(a)):
            raise ValueError(f"no computed zero near {a}")
        out.append(complex(cand[k]))
    return out


def example_problem():
    """(factorization, weight, interpolation zeros) for the example."""
    from .factorization import factorize

    R, T = plant()
    fact = factorize(R, T)
    return fact, weight(), select_zeros(fact.Mn.zeros)
