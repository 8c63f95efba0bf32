"""Closed-form Jaynes-Cummings spectrum and the dispersive shift.

Each excitation block ``n`` is spanned by ``(|n+1, g>, |n, e>)`` in that
order.  The mixing pair is

    sin(Theta_n) = Omega_n / sqrt((Delta_n - delta)^2 + Omega_n^2)
    cos(Theta_n) = (Delta_n - delta) / sqrt((Delta_n - delta)^2 + Omega_n^2)

and for the block matrix with off-diagonal ``-g sqrt(n+1)`` the dressed
eigenvectors are

    |n, +> = sin(Theta_n) |n+1, g> - cos(Theta_n) |n, e>
    |n, -> = cos(Theta_n) |n+1, g> + sin(Theta_n) |n, e>
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeWarning
from .operators import Operator


@dataclass(frozen=True)
class JCBlock:
    n: int
    delta: float
    Omega_n: float
    Delta_n: float
    sin_theta: float
    cos_theta: float
    E_plus: float
    E_minus: float

    @property
    def plus_state(self) -> np.ndarray:
        """``|n,+>`` in the block basis ``(|n+1,g>, |n,e>)``."""
        return np.array([self.sin_theta, -self.cos_theta])

    @property
    def minus_state(self) -> np.ndarray:
        return np.array([self.cos_theta, self.sin_theta])

    @property
    def excited_swap_amplitude(self) -> float:
        """Peak population transferred out of a bare block state, ``Omega_n^2 / Delta_n^2``."""
        if self.Delta_n == 0:
            return 0.0
        return (self.Omega_n / self.Delta_n) ** 2


def _mixing(delta: float, Omega: float, Delta: float) -> tuple[float, float]:
    if Omega == 0:
        # g -> 0 limit; at delta = 0 the resonant value 1/sqrt(2) is the continuous one
        if delta > 0:
            return 1.0, 0.0
        if delta == 0:
            return math.sqrt(0.5), math.sqrt(0.5)
        return 0.0, 1.0
    # Delta - delta loses every digit for delta >> Omega; use the rationalized form
    d_minus = Omega * (Omega / (Delta + delta)) if delta > 0 else Delta - delta
    # rescale so subnormal couplings keep full precision
    scale = max(abs(d_minus), Omega)
    d_minus, Omega = d_minus / scale, Omega / scale
    norm = math.hypot(d_minus, Omega)
    return Omega / norm, d_minus / norm


def jc_block(n: int, omega_R: float, omega_T: float, g: float) -> JCBlock:
    """Detuning, Rabi frequencies, mixing pair and dressed energies of block ``n``."""
    if n < 0:
        raise DomainError(f"block index must be >= 0, got {n}")
    delta = omega_R - omega_T
    Omega = 2 * g * math.sqrt(n + 1)
    Delta = math.hypot(delta, Omega)
    sin_t, cos_t = _mixing(delta, Omega, Delta)
    centre = (n + 0.5) * omega_R
    return JCBlock(n, delta, Omega, Delta, sin_t, cos_t, centre + Delta / 2, centre - Delta / 2)


def jc_block_matrix(n: int, omega_R: float, omega_T: float, g: float) -> Operator:
    if n < 0:
        raise DomainError(f"block index must be >= 0, got {n}")
    c = -g * math.sqrt(n + 1)
    return Operator(
        np.array([[(n + 1) * omega_R - omega_T / 2, c], [c, n * omega_R + omega_T / 2]]),
        (2,),
    )


def dispersive_shift(g: float, Delta_qr: float) -> float:
    """``chi = g^2 / Delta`` with ``Delta = omega_q - omega_r``."""
    if Delta_qr == 0:
        raise DomainError("dispersive shift is undefined at resonance (Delta = 0)")
    if abs(Delta_qr) < 10 * abs(g):
        warnings.warn(
            f"|Delta| = {abs(Delta_qr):.3g} is not >> g = {abs(g):.3g}; outside the dispersive regime",
            RegimeWarning,
            stacklevel=2,
        )
    return g * g / Delta_qr
