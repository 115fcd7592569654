"""Interpolating functions F(s) produced by the synthesis routes.

* :class:`ExpInterpolant` -- ``F = exp(-G)`` with G rational (classical route;
  ``G = k s`` at the optimum, giving a pure delay).
* :class:`StripInterpolant` -- ``F = exp(-psi_inv(Gtil(s)))`` (strip route).
* a plain :class:`~strongstab.rational.RationalFn` (unit search).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conformal import StripMaps
from .rational import RationalFn


@dataclass(frozen=True)
class ExpInterpolant:
    G: RationalFn
    gamma: float
    kind: str = "exp"

    def __call__(self, s):
        return np.exp(-self.G(s))

    @property
    def is_causal(self) -> bool:
        """F^-1 = exp(G) is bounded only if G has no pole at infinity."""
        return self.G.is_proper

    def delay_rate(self) -> Optional[float]:
        """k when G(s) ~ k s at infinity, else None."""
        if self.G.relative_degree != -1:
            return None
        return float(np.real(self.G.num.lead / self.G.den.lead))

    def inverse(self):
        return lambda s: np.exp(self.G(s))


@dataclass(frozen=True)
class StripInterpolant:
    """``F(s) = exp(-sigma_o/2 - j sigma_o/pi ln((1 + Gtil)/(1 - Gtil)))``.

    ``|Gtil| < 1`` on the open right half plane keeps ``(1+Gtil)/(1-Gtil)``
    in the right half plane, so the principal logarithm is continuous and
    no phase unwrapping is needed.
    """

    Gtil: RationalFn
    sigma_o: float
    gamma: float
    kind: str = "strip"

    @property
    def rho(self) -> float:
        return float(np.exp(self.sigma_o))

    def G(self, s):
        return StripMaps(self.sigma_o).psi_inv(self.Gtil(s), check=False)

    def __call__(self, s):
        return np.exp(-self.G(s))

    def inverse(self):
        return lambda s: np.exp(self.G(s))

    is_causal = True
