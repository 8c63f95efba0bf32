"""Device formulas and Hamiltonian builders.

Units: hbar = 1, frequencies and energies in rad/ns, time in ns.  Only the
Josephson relations and :func:`cqedsim.readout.voltage_from_field` work in SI.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import constants

from .errors import ConfigError, DimensionError, DomainError, RegimeWarning
from .operators import (
    HamiltonianSpec,
    Operator,
    destroy,
    eigen_hermitian,
    identity,
    pauli,
    tensor,
)

TWO_PI = 2 * math.pi
#: von Klitzing constant h/e^2 in ohms.
R_K = constants.h / constants.e**2


def ghz_to_angular(f_ghz):
    """Linear frequency in GHz to angular frequency in rad/ns."""
    return TWO_PI * f_ghz


def angular_to_ghz(omega):
    return omega / TWO_PI


def _require_positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v!r}")


# -- resonator ---------------------------------------------------------------


def resonator_frequency(L: float, C: float) -> float:
    """Natural angular frequency ``1/sqrt(LC)`` of a lumped LC resonator."""
    _require_positive(L=L, C=C)
    return 1.0 / math.sqrt(L * C)


def resonator_impedance(L: float, C: float) -> float:
    """Characteristic impedance ``sqrt(L/C)``."""
    _require_positive(L=L, C=C)
    return math.sqrt(L / C)


@dataclass(frozen=True)
class ResonatorParams:
    omega_r: float
    L: float | None = None
    C: float | None = None

    def __post_init__(self):
        _require_positive(omega_r=self.omega_r)
        if (self.L is None) != (self.C is None):
            raise DomainError("L and C must be given together")
        if self.L is not None:
            expected = resonator_frequency(self.L, self.C)
            if abs(self.omega_r - expected) > 1e-12 * expected:
                raise DomainError("omega_r is inconsistent with 1/sqrt(LC)")

    @classmethod
    def from_lc(cls, L: float, C: float) -> ResonatorParams:
        return cls(resonator_frequency(L, C), L, C)

    @property
    def impedance(self) -> float:
        if self.L is None:
            raise DomainError("impedance needs L and C")
        return resonator_impedance(self.L, self.C)


# -- Josephson junction (SI) -------------------------------------------------


def josephson_current(I_c, phase):
    """DC Josephson relation ``I_c sin(phase)``."""
    return I_c * np.sin(phase)


def josephson_frequency(V):
    """AC Josephson relation: angular frequency ``2eV/hbar`` (rad/s) for V in volts."""
    return 2 * constants.e * V / constants.hbar


def critical_current(E_J: float) -> float:
    """Critical current ``2e E_J / hbar`` for a Josephson energy in joules."""
    _require_positive(E_J=E_J)
    return 2 * constants.e * E_J / constants.hbar


# -- transmon ----------------------------------------------------------------


@dataclass(frozen=True)
class TransmonParams:
    """Transmon energies in rad/ns.

    ``n_cut`` is the charge-basis cutoff (states ``-n_cut..n_cut``) and
    ``levels`` the Duffing-oscillator truncation.
    """

    E_J: float
    E_C: float
    n_cut: int = 20
    levels: int = 3

    def __post_init__(self):
        _require_positive(E_J=self.E_J, E_C=self.E_C)
        if self.n_cut < 5:
            raise DimensionError(f"charge cutoff n_cut must be >= 5, got {self.n_cut}")
        if self.levels < 2:
            raise DimensionError(f"levels must be >= 2, got {self.levels}")
        if self.E_J / self.E_C < 20:
            warnings.warn(
                f"E_J/E_C = {self.E_J / self.E_C:.3g} is outside the transmon regime",
                RegimeWarning,
                stacklevel=3,
            )


class TransmonFrequencies(NamedTuple):
    omega_q_asymptotic: float
    omega_01_numeric: float
    anharmonicity_numeric: float


def transmon_charge_hamiltonian(p: TransmonParams) -> Operator:
    """``4 E_C n^2 - E_J cos(phi)`` in the charge basis at zero offset charge.

    ``cos(phi)`` hops a single Cooper pair, giving ``-E_J/2`` on the first
    off-diagonals.
    """
    if p.n_cut < 5:
        raise DimensionError(f"charge cutoff n_cut must be >= 5, got {p.n_cut}")
    k = np.arange(-p.n_cut, p.n_cut + 1, dtype=float)
    hop = np.full(2 * p.n_cut, -p.E_J / 2)
    m = np.diag(4 * p.E_C * k**2) + np.diag(hop, 1) + np.diag(hop, -1)
    return Operator(m, (2 * p.n_cut + 1,))


def transmon_frequencies(p: TransmonParams) -> TransmonFrequencies:
    """Asymptotic ``sqrt(8 E_C E_J) - E_C`` next to charge-basis numbers.

    The anharmonicity is reported as ``(E1 - E0) - (E2 - E1)``, positive for a
    transmon (the level spacing shrinks).
    """
    evals, _ = eigen_hermitian(transmon_charge_hamiltonian(p))
    w01 = evals[1] - evals[0]
    w12 = evals[2] - evals[1]
    return TransmonFrequencies(math.sqrt(8 * p.E_C * p.E_J) - p.E_C, w01, w01 - w12)


def duffing_hamiltonian(omega_q: float, E_C: float, levels: int) -> Operator:
    """Fock-diagonal Kerr oscillator ``E_k = k omega_q - (E_C/2) k (k-1)``."""
    if levels < 2:
        raise DimensionError(f"levels must be >= 2, got {levels}")
    k = np.arange(levels, dtype=float)
    return Operator(np.diag(k * omega_q - 0.5 * E_C * k * (k - 1)), (levels,))


# -- coupled systems ---------------------------------------------------------


def jc_hamiltonian(omega_R: float, omega_T: float, g: float, N: int) -> HamiltonianSpec:
    """Jaynes-Cummings Hamiltonian on cavity (N) x qubit (2).

    ``w_R a^dag a - (w_T/2) sigma_z + g (a sigma_+ + a^dag sigma_-)``.
    """
    a = tensor([destroy(N), identity(2)])
    sz = tensor([identity(N), pauli("z")])
    sp = tensor([identity(N), pauli("plus")])
    sm = tensor([identity(N), pauli("minus")])
    H = omega_R * (a.dag() @ a) - (omega_T / 2) * sz + g * (a @ sp + a.dag() @ sm)
    return HamiltonianSpec(H)


def coupled_duffing_hamiltonian(
    omega_R: float, omega_T: float, E_C: float, g: float, N: int, levels: int
) -> HamiltonianSpec:
    """Resonator plus Duffing transmon with the full capacitive coupling.

    ``w_R a^dag a + w_T b^dag b - (E_C/2) b^dag b^dag b b - g (b^dag - b)(a^dag - a)``;
    the counter-rotating terms are kept.
    """
    if levels < 2:
        raise DimensionError(f"levels must be >= 2, got {levels}")
    a = tensor([destroy(N), identity(levels)])
    b = tensor([identity(N), destroy(levels)])
    ad, bd = a.dag(), b.dag()
    H = omega_R * (ad @ a) + omega_T * (bd @ b) - (E_C / 2) * (bd @ bd @ b @ b) - g * ((bd - b) @ (ad - a))
    return HamiltonianSpec(H)


def rwa_duffing_hamiltonian(
    omega_R: float, omega_T: float, E_C: float, g: float, N: int, levels: int
) -> HamiltonianSpec:
    """:func:`coupled_duffing_hamiltonian` with ``b^dag a^dag`` and ``b a`` dropped."""
    if levels < 2:
        raise DimensionError(f"levels must be >= 2, got {levels}")
    a = tensor([destroy(N), identity(levels)])
    b = tensor([identity(N), destroy(levels)])
    ad, bd = a.dag(), b.dag()
    H = omega_R * (ad @ a) + omega_T * (bd @ b) - (E_C / 2) * (bd @ bd @ b @ b) + g * (bd @ a + b @ ad)
    return HamiltonianSpec(H)


def coupling_constant(omega_r, C_g, C_T, E_J, E_C, Z_R) -> float:
    """Capacitive transmon-resonator coupling in the units of ``omega_r``.

    ``omega_r (C_g/C_T) (E_J/2E_C)^(1/4) sqrt(pi Z_R / 2 R_K)`` with Z_R in ohms.
    """
    if C_g < 0:
        raise DomainError(f"C_g must be non-negative, got {C_g!r}")
    _require_positive(omega_r=omega_r, C_T=C_T, E_J=E_J, E_C=E_C, Z_R=Z_R)
    return omega_r * (C_g / C_T) * (E_J / (2 * E_C)) ** 0.25 * math.sqrt(math.pi * Z_R / (2 * R_K))


# -- drives ------------------------------------------------------------------


@dataclass(frozen=True)
class DriveParams:
    """Coherent drive ``A (e^{-i w_d t} b^dag + e^{i w_d t} b)``.

    ``envelope`` is ``"constant"`` or ``"rectangular"``; the rectangular
    window is on for ``start <= t < stop``.
    """

    amplitude: float
    omega_d: float
    envelope: str = "constant"
    start: float = 0.0
    stop: float | None = None

    def __post_init__(self):
        if self.amplitude < 0:
            raise DomainError(f"drive amplitude must be >= 0, got {self.amplitude!r}")
        if self.envelope not in ("constant", "rectangular"):
            raise ConfigError(f"unknown envelope {self.envelope!r}", "drive.envelope")
        if self.envelope == "rectangular" and (self.stop is None or self.stop < self.start):
            raise ConfigError("rectangular envelope needs stop >= start", "drive.stop_ns")

    def envelope_at(self, t: float) -> float:
        if self.envelope == "constant":
            return 1.0
        return 1.0 if self.start <= t < self.stop else 0.0


def _drive_target(target: str, dims) -> Operator:
    dims = tuple(dims)
    if target == "cavity":
        ops = [destroy(dims[0])] + [identity(d) for d in dims[1:]]
    elif target == "qubit":
        if len(dims) != 2:
            raise DimensionError("qubit drive needs cavity x qubit dims")
        ops = [identity(dims[0]), destroy(dims[1])]
    else:
        raise ConfigError(f"unknown drive target {target!r}; expected 'cavity' or 'qubit'")
    return tensor(ops)


def drive_term(p: DriveParams, target: str, dims) -> list:
    """Lab-frame drive as ``[(b^dag, A e^{-i w_d t}), (b, A e^{i w_d t})]``.

    Returns an empty list for zero amplitude so the Hamiltonian stays static.
    """
    b = _drive_target(target, dims)
    if p.amplitude == 0:
        return []
    A, wd = p.amplitude, p.omega_d

    def raising(t):
        return A * p.envelope_at(t) * np.exp(-1j * wd * t)

    def lowering(t):
        return A * p.envelope_at(t) * np.exp(1j * wd * t)

    return [(b.dag(), raising), (b, lowering)]


def rotating_drive_hamiltonian(p: DriveParams, target: str, dims, omega_target: float) -> Operator:
    """Static drive Hamiltonian in the frame rotating at ``omega_d``.

    ``Delta n + (eps b^dag + eps* b)`` with ``Delta = omega_target - omega_d``
    and ``eps = A``.
    """
    b = _drive_target(target, dims)
    detuning = omega_target - p.omega_d
    eps = complex(p.amplitude)
    return detuning * (b.dag() @ b) + eps * b.dag() + eps.conjugate() * b
