"""Truncated Hilbert-space operator algebra.

Conventions used throughout the package:

* Composite spaces are ordered cavity first, qubit second, so the basis
  state ``|n, s>`` is ``kron(|n>, |s>)``.
* Qubit basis order is ``|0> = ground``, ``|1> = excited`` and
  ``sigma_z = |0><0| - |1><1|``.  Under the qubit term ``-(w/2) sigma_z`` the
  ground state therefore has the lower energy.
* ``create(n)`` annihilates the top Fock level (no wraparound).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import ContractError, DimensionError, TruncationWarning

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10
POSITIVITY_SLACK = -1e-8


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"dimension list must be non-empty with entries >= 1, got {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix tagged with its subsystem dimension list."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = _check_dims(self.dims)
        m = np.array(self.matrix, dtype=complex)
        total = math.prod(dims)
        if m.shape != (total, total):
            raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
        m.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def total(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> Operator:
        return Operator(self.matrix.conj().T, self.dims)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def _same_dims(self, other: Operator):
        if self.dims != other.dims:
            raise DimensionError(f"dims mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other):
        if isinstance(other, Operator):
            self._same_dims(other)
            return Operator(self.matrix + other.matrix, self.dims)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._same_dims(other)
            return Operator(self.matrix - other.matrix, self.dims)
        return NotImplemented

    def __neg__(self):
        return Operator(-self.matrix, self.dims)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            return NotImplemented
        return Operator(self.matrix * complex(scalar), self.dims)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self.matrix / complex(scalar), self.dims)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._same_dims(other)
            return Operator(self.matrix @ other.matrix, self.dims)
        return self.matrix @ np.asarray(other)

    def __repr__(self):
        return f"Operator(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state vector or density matrix over a dimension list."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = _check_dims(self.dims)
        d = np.array(self.data, dtype=complex)
        total = math.prod(dims)
        if d.shape not in ((total,), (total, total)):
            raise DimensionError(f"state shape {d.shape} does not match dims {dims}")
        d.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", d)

    @property
    def kind(self) -> str:
        return "pure" if self.data.ndim == 1 else "mixed"

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data.copy()

    def to_mixed(self) -> QuantumState:
        return QuantumState(self.density_matrix(), self.dims)

    def validate(self, norm_tol=NORM_TOL, herm_tol=HERMITIAN_TOL, slack=POSITIVITY_SLACK):
        """Raise :class:`ContractError` if the state invariants do not hold."""
        if self.is_pure:
            norm = np.linalg.norm(self.data)
            if abs(norm - 1) > norm_tol:
                raise ContractError(f"state norm {norm!r} deviates from 1")
            return self
        rho = self.data
        tr = np.trace(rho)
        if abs(tr - 1) > norm_tol:
            raise ContractError(f"density matrix trace {tr!r} deviates from 1")
        if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
            raise ContractError("density matrix is not Hermitian")
        lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
        if lam < slack:
            raise ContractError(f"density matrix has eigenvalue {lam!r} below {slack}")
        return self


def destroy(n: int) -> Operator:
    """Annihilation operator on an ``n``-level Fock space."""
    if n < 2:
        raise DimensionError(f"truncation size must be >= 2, got {n}")
    return Operator(np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1), (n,))


def create(n: int) -> Operator:
    """Creation operator; the top level ``|n-1>`` is mapped to zero."""
    return destroy(n).dag()


def number(n: int) -> Operator:
    if n < 2:
        raise DimensionError(f"truncation size must be >= 2, got {n}")
    return Operator(np.diag(np.arange(n, dtype=float)), (n,))


def identity(n: int) -> Operator:
    return Operator(np.eye(n), (n,))


def projector(n: int, k: int) -> Operator:
    """``|k><k|`` on an ``n``-level space."""
    m = np.zeros((n, n))
    m[k, k] = 1.0
    return Operator(m, (n,))


_PAULI = {
    "z": [[1, 0], [0, -1]],
    "plus": [[0, 0], [1, 0]],   # |1><0|, raises ground to excited
    "minus": [[0, 1], [0, 0]],  # |0><1|
    "x": [[0, 1], [1, 0]],
    "y": [[0, -1j], [1j, 0]],
}


def pauli(which: str) -> Operator:
    """Two-level operator ``z``, ``plus``, ``minus`` (also ``x``, ``y``).

    The basis is ordered ground, excited and ``sigma_z |ground> = +|ground>``.
    """
    try:
        return Operator(np.array(_PAULI[which], dtype=complex), (2,))
    except KeyError:
        raise ValueError(f"unknown Pauli operator {which!r}") from None


def tensor(ops: Sequence[Operator]) -> Operator:
    """Kronecker product in list order, with dims concatenated."""
    ops = list(ops)
    if not ops:
        raise ValueError("tensor needs at least one operator")
    matrix = reduce(np.kron, (op.matrix for op in ops))
    dims = sum((op.dims for op in ops), ())
    return Operator(matrix, dims)


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def basis(n: int, k: int) -> QuantumState:
    if not 0 <= k < n:
        raise DimensionError(f"level {k} outside a {n}-level space")
    v = np.zeros(n, dtype=complex)
    v[k] = 1.0
    return QuantumState(v, (n,))


def product_state(dims: Sequence[int], levels: Sequence[int]) -> QuantumState:
    """Basis state ``|levels[0], levels[1], ...>`` on the composite space."""
    dims = _check_dims(dims)
    if len(levels) != len(dims):
        raise DimensionError("one level per subsystem is required")
    vec = reduce(np.kron, (basis(d, k).data for d, k in zip(dims, levels)))
    return QuantumState(vec, dims)


def expectation(obs: Operator, state: QuantumState, hermitian: bool | None = None):
    """``<psi|O|psi>`` or ``Tr(rho O)``.

    Hermitian observables (detected automatically unless ``hermitian`` is
    given) return a float; a leftover imaginary part above 1e-9 is a
    contract violation.
    """
    if obs.dims != state.dims:
        raise DimensionError(f"observable dims {obs.dims} do not match state dims {state.dims}")
    if state.is_pure:
        value = np.vdot(state.data, obs.matrix @ state.data)
    else:
        value = np.einsum("ij,ji->", obs.matrix, state.data)
    if hermitian is None:
        hermitian = obs.is_hermitian()
    if hermitian:
        if abs(value.imag) > 1e-9:
            raise ContractError(f"Hermitian expectation has imaginary part {value.imag!r}")
        return float(value.real)
    return complex(value)


def eigen_hermitian(op: Operator, tol: float = 1e-10):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    m = op.matrix
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise ContractError("eigen_hermitian requires a Hermitian operator")
    return np.linalg.eigh((m + m.conj().T) / 2)


def coherent_state(n: int, alpha: complex) -> QuantumState:
    """Truncated coherent state ``exp(-|a|^2/2) sum a^k/sqrt(k!) |k>``, renormalized."""
    if n < 2:
        raise DimensionError(f"truncation size must be >= 2, got {n}")
    alpha = complex(alpha)
    if abs(alpha) ** 2 > n / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} is large for a {n}-level truncation",
            TruncationWarning,
            stacklevel=2,
        )
    coeffs = np.empty(n, dtype=complex)
    coeffs[0] = 1.0
    for k in range(1, n):
        coeffs[k] = coeffs[k - 1] * alpha / math.sqrt(k)
    coeffs *= math.exp(-abs(alpha) ** 2 / 2)
    return QuantumState(coeffs / np.linalg.norm(coeffs), (n,))


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """Static operator plus ``(operator, coefficient(t))`` time-dependent terms.

    ``H(t) = static + sum_k coefficient_k(t) * operator_k``.  Coefficients are
    complex-valued callables of time in ns; Hermiticity of the sum is the
    caller's responsibility (drive terms come in conjugate pairs).
    """

    static: Operator
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((op, coeff) for op, coeff in self.terms)
        for op, _ in terms:
            if op.dims != self.static.dims:
                raise DimensionError(f"term dims {op.dims} do not match static dims {self.static.dims}")
        object.__setattr__(self, "terms", terms)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.static.dims

    @property
    def is_static(self) -> bool:
        return not self.terms

    def at(self, t: float) -> np.ndarray:
        m = self.static.matrix.copy()
        for op, coeff in self.terms:
            m += coeff(t) * op.matrix
        return m

    def with_terms(self, terms) -> HamiltonianSpec:
        return HamiltonianSpec(self.static, self.terms + tuple(terms))
