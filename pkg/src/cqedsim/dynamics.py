"""Schrödinger and Lindblad time evolution with fixed-step RK4.

States are renormalized after every step (density matrices are also
symmetrized); the drift measured *before* that correction is kept in the
result diagnostics, and drift above ``hard_limit`` raises
:class:`StepSizeError`.

For a static Hamiltonian the RK4 step of the linear ODE ``y' = M y`` is the
fourth-order Taylor polynomial of ``hM``; it is formed once and applied as a
single matrix product per step.  Time-dependent Hamiltonians go through the
usual four stages, with coefficients sampled at ``t``, ``t + h/2`` and ``t + h``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError, DomainError, StepSizeError, TruncationWarning
from .operators import (
    HamiltonianSpec,
    Operator,
    QuantumState,
    destroy,
    identity,
    number,
    projector,
    tensor,
)

TRUNCATION_LIMIT = 1e-4


@dataclass(frozen=True)
class CollapseChannel:
    """Jump operator with its rate folded in (``sqrt(rate) * L``)."""

    operator: Operator
    label: str = ""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform output grid; each interval is split into ``substeps`` RK4 steps."""

    t_start: float
    t_end: float
    points: int
    substeps: int = 64

    def __post_init__(self):
        if self.points < 2:
            raise DomainError(f"time grid needs at least 2 points, got {self.points}")
        if self.substeps < 1:
            raise DomainError(f"substeps must be >= 1, got {self.substeps}")
        if not self.t_end > self.t_start:
            raise DomainError("time grid must be strictly increasing")

    @property
    def times(self) -> np.ndarray:
        span = self.t_end - self.t_start
        return self.t_start + span * np.arange(self.points) / (self.points - 1)

    @property
    def step(self) -> float:
        return (self.t_end - self.t_start) / ((self.points - 1) * self.substeps)

    def step_time(self, j: int) -> float:
        return self.t_start + j * self.step


@dataclass
class EvolutionResult:
    times: np.ndarray
    series: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    final_state: QuantumState | None = None

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]


def collapse_set(kappa: float, gamma: float, n_th: float, dims) -> list[CollapseChannel]:
    """Cavity loss, thermal absorption and qubit relaxation channels.

    ``sqrt(kappa (1 + n_th)) a``, ``sqrt(kappa n_th) a^dag`` and
    ``sqrt(gamma) sigma_-``; channels with zero rate are omitted.
    """
    for name, v in (("kappa", kappa), ("gamma", gamma), ("n_th", n_th)):
        if v < 0:
            raise DomainError(f"{name} must be >= 0, got {v!r}")
    N, levels = dims
    a = tensor([destroy(N), identity(levels)])
    b = tensor([identity(N), destroy(levels)])
    channels = []
    if kappa * (1 + n_th) > 0:
        channels.append(CollapseChannel(math.sqrt(kappa * (1 + n_th)) * a, "cavity_decay"))
    if kappa * n_th > 0:
        channels.append(CollapseChannel(math.sqrt(kappa * n_th) * a.dag(), "cavity_thermal"))
    if gamma > 0:
        channels.append(CollapseChannel(math.sqrt(gamma) * b, "qubit_relaxation"))
    return channels


def expected_observables_default(dims) -> dict[str, Operator]:
    """Cavity occupation, qubit excited population and top-Fock population."""
    N, levels = dims
    return {
        "n_cavity": tensor([number(N), identity(levels)]),
        "p_excited": tensor([identity(N), projector(levels, 1)]),
        "top_fock": tensor([projector(N, N - 1), identity(levels)]),
    }


def _matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)


def lindblad_rhs(H_at_t, rho: np.ndarray, channels) -> np.ndarray:
    """``-i[H, rho] + sum_k (L rho L^dag - {L^dag L, rho}/2)``."""
    H = _matrix(H_at_t)
    rho = np.asarray(rho)
    if H.shape != rho.shape:
        raise DimensionError(f"Hamiltonian shape {H.shape} does not match state shape {rho.shape}")
    out = -1j * (H @ rho - rho @ H)
    for ch in channels:
        L = _matrix(ch.operator)
        if L.shape != rho.shape:
            raise DimensionError("collapse operator dims do not match the state")
        LdL = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def rk4_step(f, t: float, y, h: float):
    """One classical RK4 step of ``y' = f(t, y)``."""
    k1 = f(t, y)
    k2 = f(t + h / 2, y + (h / 2) * k1)
    k3 = f(t + h / 2, y + (h / 2) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4_propagator(M: np.ndarray, h: float) -> np.ndarray:
    """``I + hM + (hM)^2/2 + (hM)^3/6 + (hM)^4/24`` in Horner form."""
    eye = np.eye(M.shape[0], dtype=complex)
    hM = h * M
    P = eye + hM / 4
    P = eye + (hM / 3) @ P
    P = eye + (hM / 2) @ P
    return eye + hM @ P


def _lindblad_superoperator(H: np.ndarray, channels) -> np.ndarray:
    # row-major vec: vec(A rho B) = kron(A, B.T) vec(rho)
    d = H.shape[0]
    eye = np.eye(d)
    Heff = H.astype(complex)
    S = np.zeros((d * d, d * d), dtype=complex)
    for ch in channels:
        L = _matrix(ch.operator)
        Heff = Heff - 0.5j * (L.conj().T @ L)
        S += np.kron(L, L.conj())
    S += -1j * (np.kron(Heff, eye) - np.kron(eye, Heff.conj()))
    return S


def _check_dims(H: HamiltonianSpec, dims, channels=()):
    if tuple(dims) != H.dims:
        raise DimensionError(f"state dims {tuple(dims)} do not match Hamiltonian dims {H.dims}")
    for ch in channels:
        if ch.operator.dims != H.dims:
            raise DimensionError(f"channel {ch.label!r} dims do not match the Hamiltonian")


def _truncation_projector(dims) -> np.ndarray | None:
    N = dims[0]
    if N < 3:
        return None
    rest = [identity(d) for d in dims[1:]]
    return tensor([projector(N, N - 2) + projector(N, N - 1)] + rest).matrix


def _warn_truncation(top: float):
    if top >= TRUNCATION_LIMIT:
        warnings.warn(
            f"population {top:.3g} in the top two Fock levels exceeds {TRUNCATION_LIMIT}",
            TruncationWarning,
            stacklevel=3,
        )


def evolve_master(
    H: HamiltonianSpec,
    rho0: QuantumState,
    channels,
    grid: TimeGrid,
    observables: dict[str, Operator] | None = None,
    hard_limit: float = 1e-6,
) -> EvolutionResult:
    """Integrate the Lindblad master equation and sample observables on ``grid``.

    A pure ``rho0`` is promoted to a density matrix.  Diagnostics:

    ``max_trace_deviation``
        largest ``|Tr rho - 1|`` after a step, before renormalization
    ``max_hermiticity_residue``
        largest ``max|rho - rho^dag|`` before symmetrization
    ``min_eigenvalue``
        smallest eigenvalue of rho over the output grid points
    ``max_top_population``
        largest population of the two highest Fock levels of the cavity
    """
    channels = list(channels)
    _check_dims(H, rho0.dims, channels)
    if observables is None:
        observables = expected_observables_default(H.dims)
    names = list(observables)
    obs = np.array([observables[k].matrix for k in names]).reshape(len(names), *H.static.matrix.shape)
    top_proj = _truncation_projector(H.dims)
    d = H.static.total
    h = grid.step

    rho = rho0.density_matrix()
    if H.is_static:
        P = _rk4_propagator(_lindblad_superoperator(H.static.matrix, channels), h)

        def advance(j, rho):
            return (P @ rho.reshape(-1)).reshape(d, d)

    else:

        def rhs(t, rho):
            return lindblad_rhs(H.at(t), rho, channels)

        def advance(j, rho):
            return rk4_step(rhs, grid.step_time(j), rho, h)

    n_out = grid.points
    values = np.empty((len(names), n_out))
    max_trace = 0.0
    max_herm = 0.0
    min_eig = np.inf
    max_top = 0.0

    def record(i, rho):
        nonlocal min_eig, max_top
        values[:, i] = np.einsum("kij,ji->k", obs, rho).real
        min_eig = min(min_eig, float(np.linalg.eigvalsh(rho)[0]))
        if top_proj is not None:
            max_top = max(max_top, float(np.einsum("ij,ji->", top_proj, rho).real))

    record(0, rho)
    j = 0
    for i in range(1, n_out):
        for _ in range(grid.substeps):
            rho = advance(j, rho)
            j += 1
            herm = float(np.max(np.abs(rho - rho.conj().T)))
            rho = (rho + rho.conj().T) / 2
            tr = np.trace(rho).real
            dev = abs(tr - 1)
            if dev > hard_limit:
                raise StepSizeError(
                    f"trace drift {dev:.3g} at t = {grid.step_time(j):.6g} ns exceeds {hard_limit}; "
                    "increase substeps"
                )
            max_trace = max(max_trace, dev)
            max_herm = max(max_herm, herm)
            rho = rho / tr
        record(i, rho)

    _warn_truncation(max_top)
    return EvolutionResult(
        times=grid.times,
        series={k: values[n] for n, k in enumerate(names)},
        diagnostics={
            "max_trace_deviation": max_trace,
            "max_hermiticity_residue": max_herm,
            "min_eigenvalue": min_eig,
            "max_top_population": max_top,
        },
        final_state=QuantumState(rho, H.dims),
    )


def evolve_schrodinger(
    H: HamiltonianSpec,
    psi0: QuantumState,
    grid: TimeGrid,
    observables: dict[str, Operator] | None = None,
    hard_limit: float = 1e-6,
) -> EvolutionResult:
    """Integrate ``i d psi/dt = H(t) psi`` and sample observables on ``grid``."""
    if not psi0.is_pure:
        raise ContractError("evolve_schrodinger needs a pure state")
    _check_dims(H, psi0.dims)
    if observables is None:
        observables = expected_observables_default(H.dims)
    names = list(observables)
    obs = np.array([observables[k].matrix for k in names]).reshape(len(names), *H.static.matrix.shape)
    top_proj = _truncation_projector(H.dims)
    h = grid.step

    psi = psi0.data.copy()
    if H.is_static:
        P = _rk4_propagator(-1j * H.static.matrix, h)

        def advance(j, psi):
            return P @ psi

    else:

        def rhs(t, psi):
            return -1j * (H.at(t) @ psi)

        def advance(j, psi):
            return rk4_step(rhs, grid.step_time(j), psi, h)

    n_out = grid.points
    values = np.empty((len(names), n_out))
    max_norm = 0.0
    max_top = 0.0

    def record(i, psi):
        nonlocal max_top
        values[:, i] = np.einsum("i,kij,j->k", psi.conj(), obs, psi).real
        if top_proj is not None:
            max_top = max(max_top, float(np.vdot(psi, top_proj @ psi).real))

    record(0, psi)
    j = 0
    for i in range(1, n_out):
        for _ in range(grid.substeps):
            psi = advance(j, psi)
            j += 1
            norm = np.linalg.norm(psi)
            dev = abs(norm - 1)
            if dev > hard_limit:
                raise StepSizeError(
                    f"norm drift {dev:.3g} at t = {grid.step_time(j):.6g} ns exceeds {hard_limit}; "
                    "increase substeps"
                )
            max_norm = max(max_norm, dev)
            psi = psi / norm
        record(i, psi)

    _warn_truncation(max_top)
    return EvolutionResult(
        times=grid.times,
        series={k: values[n] for n, k in enumerate(names)},
        diagnostics={"max_norm_deviation": max_norm, "max_top_population": max_top},
        final_state=QuantumState(psi, H.dims),
    )
