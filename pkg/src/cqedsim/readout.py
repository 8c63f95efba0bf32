"""Input-output relations and dispersive readout.

A probe at angular frequency ``w`` is evaluated at the Laplace point
``s = -i w`` (consistent with ``e^{-i w t}`` time dependence), so the bare
resonance sits at ``s = -i omega_r`` where ``R = -1``.

The qubit-conditioned cavity follows

    d<a~>/dt = (-/+ i chi/2 - kappa_c/2) <a~> - sqrt(kappa_c) b~_in(t)

with the upper sign for the ground state, and the reflection resonance
of the ground-state curve sits at ``omega_r - chi/2`` (excited:
``omega_r + chi/2``).  Both assignments use the ``-/+`` ordering with the
ground state first.  Moving the shifted lab-frame equation into the
``omega_r`` frame would give the opposite rotation sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import constants

from .dynamics import TimeGrid, rk4_step
from .errors import DomainError, StepSizeError

# |z h| beyond which classical RK4 is unstable for a decaying linear ODE
_RK4_STABILITY = 2.78

_STATE_SIGN = {"g": -1.0, "e": 1.0}


@dataclass(frozen=True)
class ReadoutParams:
    omega_r: float
    kappa_c: float
    chi: float = 0.0
    epsilon_d: complex = 0.0
    omega_d: float | None = None

    def __post_init__(self):
        if not self.kappa_c > 0:
            raise DomainError(f"kappa_c must be positive, got {self.kappa_c!r}")

    @property
    def drive_frequency(self) -> float:
        return self.omega_r if self.omega_d is None else self.omega_d


@dataclass(frozen=True)
class ComplexTrace:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise DomainError("times and values must have equal length")


def _state_sign(qubit_state: str) -> float:
    try:
        return _STATE_SIGN[qubit_state]
    except KeyError:
        raise DomainError(f"qubit state must be 'g' or 'e', got {qubit_state!r}") from None


def reflection_coefficient(s, omega_r: float, kappa_c: float):
    """``R(s) = (s + i w_r - kappa_c/2) / (s + i w_r + kappa_c/2)``; ``s`` may be an array."""
    s = np.asarray(s, dtype=complex)
    den = s + 1j * omega_r + kappa_c / 2
    if np.any(np.abs(den) <= 1e-15):
        pole = complex(-kappa_c / 2, -omega_r)
        raise DomainError(f"s is at the pole s = {pole} (-i*omega_r - kappa_c/2)")
    R = (s + 1j * omega_r - kappa_c / 2) / den
    return R[()] if R.ndim == 0 else R


def dispersive_reflection_sweep(omega_probe, omega_r, kappa_c, chi, qubit_state):
    """Reflection of the qubit-shifted resonator at probe frequencies ``omega_probe``."""
    shifted = omega_r + _state_sign(qubit_state) * chi / 2
    return reflection_coefficient(-1j * np.asarray(omega_probe, dtype=float), shifted, kappa_c)


def steady_state_displacement(p: ReadoutParams) -> complex:
    """``xi_d = -i eps_d / (kappa/2 + i (omega_r - omega_d))``."""
    return -1j * p.epsilon_d / (p.kappa_c / 2 + 1j * (p.omega_r - p.drive_frequency))


def _check_stability(rate: complex, grid: TimeGrid):
    if abs(rate) * grid.step > _RK4_STABILITY:
        raise StepSizeError(
            f"step {grid.step:.3g} ns is too coarse for rate {abs(rate):.3g} rad/ns; increase substeps"
        )


def _integrate(rate: complex, drive: Callable[[float], complex], grid: TimeGrid) -> ComplexTrace:
    """RK4 for ``y' = rate * y + drive(t)`` from ``y(t_start) = 0``."""
    _check_stability(rate, grid)

    def f(t, y):
        return rate * y + drive(t)

    out = np.empty(grid.points, dtype=complex)
    y = 0j
    out[0] = y
    j = 0
    for i in range(1, grid.points):
        for _ in range(grid.substeps):
            y = rk4_step(f, grid.step_time(j), y, grid.step)
            j += 1
        out[i] = y
    return ComplexTrace(grid.times, out)


def displacement_trajectory(p: ReadoutParams, grid: TimeGrid) -> ComplexTrace:
    """``d xi/dt = -i Delta xi - kappa/2 xi - i eps_d`` from ``xi = 0``, ``Delta = w_r - w_d``."""
    rate = -1j * (p.omega_r - p.drive_frequency) - p.kappa_c / 2
    eps = complex(p.epsilon_d)
    return _integrate(rate, lambda t: -1j * eps, grid)


def conditioned_cavity_trajectory(
    p: ReadoutParams, qubit_state: str, b_in_baseband: Callable[[float], complex], grid: TimeGrid
) -> ComplexTrace:
    """Semiclassical cavity amplitude in the frame rotating at ``omega_r``."""
    rate = _state_sign(qubit_state) * 1j * p.chi / 2 - p.kappa_c / 2
    root = math.sqrt(p.kappa_c)
    return _integrate(rate, lambda t: -root * b_in_baseband(t), grid)


def conditioned_fixed_point(p: ReadoutParams, qubit_state: str, b_in: complex) -> complex:
    """Long-time limit ``-sqrt(kappa_c) b_in / (kappa_c/2 +/- i chi/2)`` for constant input."""
    sign = _state_sign(qubit_state)
    return -math.sqrt(p.kappa_c) * b_in / (p.kappa_c / 2 - sign * 1j * p.chi / 2)


def input_output(b_in_amplitude, a_amplitude, kappa_c: float):
    """``b_out = b_in + sqrt(kappa_c) a``."""
    return b_in_amplitude + math.sqrt(kappa_c) * a_amplitude


def voltage_from_field(omega_s: float, Z0: float, beta_s_magnitude: float) -> float:
    """RMS line voltage ``sqrt(hbar omega_s Z0) |beta_s|`` in SI units.

    ``omega_s`` in rad/s, ``Z0`` in ohms and ``|beta_s|^2`` in photons per second.
    """
    for name, v in (("omega_s", omega_s), ("Z0", Z0), ("beta_s_magnitude", beta_s_magnitude)):
        if v < 0:
            raise DomainError(f"{name} must be >= 0, got {v!r}")
    return math.sqrt(constants.hbar * omega_s * Z0) * beta_s_magnitude


def readout_separation(trace_g: ComplexTrace, trace_e: ComplexTrace) -> np.ndarray:
    """Pointwise distance ``|<a_g> - <a_e>|`` between two conditioned traces."""
    if len(trace_g.times) != len(trace_e.times) or not np.allclose(trace_g.times, trace_e.times, rtol=0, atol=1e-12):
        raise DomainError("traces must share the same time grid")
    return np.abs(trace_g.values - trace_e.values)
