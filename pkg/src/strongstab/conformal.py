"""Conformal maps between the right half plane, the strip 0 < Re < sigma_o and the unit disc."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


def phi(s):
    """Right half plane -> unit disc, ``(s - 1)/(s + 1)``."""
    s = np.asarray(s, dtype=complex)
    out = (s - 1) / (s + 1)
    return out if np.ndim(out) else complex(out)


def phi_inv(z):
    z = np.asarray(z, dtype=complex)
    out = (1 + z) / (1 - z)
    return out if np.ndim(out) else complex(out)


@dataclass(frozen=True)
class StripMaps:
    """Maps between the strip ``0 < Re nu < sigma_o`` and the unit disc."""

    sigma_o: float

    def __post_init__(self):
        if not self.sigma_o > 0:
            raise InputError("strip width must be positive")

    @property
    def rho(self) -> float:
        return float(np.exp(self.sigma_o))

    def psi(self, nu, check: bool = True):
        nu = np.asarray(nu, dtype=complex)
        if check and np.any((nu.real <= 0) | (nu.real >= self.sigma_o)):
            raise InputError("argument outside the strip")
        w = 1j * np.exp(-1j * np.pi * nu / self.sigma_o)
        out = (w - 1) / (w + 1)
        return out if np.ndim(out) else complex(out)

    def psi_inv(self, zeta, check: bool = True):
        zeta = np.asarray(zeta, dtype=complex)
        if check and np.any(np.abs(zeta) >= 1):
            raise InputError("argument outside the unit disc")
        out = self.sigma_o / np.pi * (np.pi / 2 + 1j * np.log((1 + zeta) / (1 - zeta)))
        return out if np.ndim(out) else complex(out)


def psi(nu, sigma_o: float):
    return StripMaps(sigma_o).psi(nu)


def psi_inv(zeta, sigma_o: float):
    return StripMaps(sigma_o).psi_inv(zeta)
