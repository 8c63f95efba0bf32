import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqedsim.circuits import jc_hamiltonian
from cqedsim.dynamics import (
    TimeGrid,
    collapse_set,
    evolve_master,
    evolve_schrodinger,
    expected_observables_default,
    lindblad_rhs,
    rk4_step,
)
from cqedsim.errors import ContractError, DimensionError, DomainError, StepSizeError, TruncationWarning
from cqedsim.operators import (
    HamiltonianSpec,
    Operator,
    destroy,
    identity,
    number,
    pauli,
    product_state,
    tensor,
)

TWO_PI = 2 * math.pi


def test_collapse_set_channels():
    dims = (4, 2)
    assert [c.label for c in collapse_set(0.1, 0.05, 0.0, dims)] == ["cavity_decay", "qubit_relaxation"]
    assert collapse_set(0.0, 0.0, 0.0, dims) == []
    chans = {c.label: c for c in collapse_set(0.2, 0.0, 1.0, dims)}
    assert set(chans) == {"cavity_decay", "cavity_thermal"}
    a = tensor([destroy(4), identity(2)]).matrix
    assert np.allclose(chans["cavity_decay"].operator.matrix, math.sqrt(0.4) * a)
    assert np.allclose(chans["cavity_thermal"].operator.matrix, math.sqrt(0.2) * a.conj().T)
    with pytest.raises(DomainError):
        collapse_set(-0.1, 0.0, 0.0, dims)


def test_time_grid():
    g = TimeGrid(0.0, 2.0, 5, substeps=4)
    assert np.allclose(g.times, [0, 0.5, 1, 1.5, 2])
    assert g.step == 0.125
    for bad in ((0.0, 1.0, 1, 1), (0.0, 1.0, 3, 0), (1.0, 1.0, 3, 1)):
        with pytest.raises(DomainError):
            TimeGrid(*bad)


def test_rk4_step_exact_for_cubic():
    y = rk4_step(lambda t, y: 3 * t * t, 0.0, 0.0, 0.5)
    assert y == pytest.approx(0.125, abs=1e-15)


def test_lindblad_rhs_stationary_cases():
    dims = (3, 2)
    H = jc_hamiltonian(2.0, 2.0, 0.3, 3).static
    vac = product_state(dims, (0, 0)).density_matrix()
    assert np.max(np.abs(lindblad_rhs(H, vac, collapse_set(0.3, 0.2, 0.0, dims)))) < 1e-15
    zero = np.zeros((6, 6))
    assert np.array_equal(lindblad_rhs(zero, vac, []), zero)
    with pytest.raises(DimensionError):
        lindblad_rhs(np.zeros((4, 4)), vac, [])


def test_cavity_occupation_decays_at_kappa():
    dims, kappa = (4, 2), 0.37
    rho = product_state(dims, (1, 0)).density_matrix()
    drho = lindblad_rhs(np.zeros((8, 8)), rho, collapse_set(kappa, 0.0, 0.0, dims))
    n_op = tensor([number(4), identity(2)]).matrix
    assert np.trace(n_op @ drho).real == pytest.approx(-kappa, abs=1e-14)
    assert abs(np.trace(drho)) < 1e-15


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_lindblad_rhs_is_traceless_and_hermitian(seed):
    rng = np.random.default_rng(seed)
    dims = (3, 2)
    X = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = X @ X.conj().T
    rho /= np.trace(rho)
    H = jc_hamiltonian(1.0, 1.3, 0.2, 3).static
    d = lindblad_rhs(H, rho, collapse_set(0.4, 0.1, 0.5, dims))
    assert abs(np.trace(d)) < 1e-13
    assert np.max(np.abs(d - d.conj().T)) < 1e-13


def test_resonant_exchange_short_grid(table):
    g, N = table["g"], 6
    H = jc_hamiltonian(table["omega_R"], table["omega_R"], g, N)
    grid = TimeGrid(0.0, 2.5, 81, substeps=32)
    res = evolve_schrodinger(H, product_state((N, 2), (0, 1)), grid, expected_observables_default((N, 2)))
    assert np.max(np.abs(res["p_excited"] - np.cos(g * grid.times) ** 2)) < 1e-6
    assert np.allclose(res["n_cavity"] + res["p_excited"], 1, atol=1e-9)
    assert res.diagnostics["max_norm_deviation"] < 1e-9


def test_single_photon_decay_matches_exponential():
    dims, kappa = (3, 2), TWO_PI * 0.1
    H = HamiltonianSpec(Operator(np.zeros((6, 6)), dims))
    grid = TimeGrid(0.0, 10.0, 41, substeps=16)
    with pytest.warns(TruncationWarning):
        res = evolve_master(H, product_state(dims, (1, 0)), collapse_set(kappa, 0, 0, dims), grid)
    assert np.max(np.abs(res["n_cavity"] - np.exp(-kappa * grid.times))) < 1e-6


def test_uncoupled_populations_are_constant(table):
    N = 5
    H = jc_hamiltonian(table["omega_R"], table["omega_T"], 0.0, N)
    grid = TimeGrid(0.0, 3.0, 31, substeps=16)
    res = evolve_master(H, product_state((N, 2), (1, 1)), [], grid)
    assert np.max(np.abs(res["n_cavity"] - 1)) < 1e-10
    assert np.max(np.abs(res["p_excited"] - 1)) < 1e-10


def test_master_and_schrodinger_agree_without_dissipation(table):
    N = 5
    H = jc_hamiltonian(table["omega_R"], table["omega_T"], table["g"], N)
    grid = TimeGrid(0.0, 2.0, 41, substeps=64)
    psi = product_state((N, 2), (0, 1))
    a = evolve_schrodinger(H, psi, grid)
    b = evolve_master(H, psi, [], grid)
    for name in ("n_cavity", "p_excited"):
        assert np.max(np.abs(a[name] - b[name])) < 1e-8


def test_time_dependent_path_matches_static():
    dims = (2, 2)
    sx = tensor([identity(2), pauli("x")])
    zero = Operator(np.zeros((4, 4)), dims)
    timed = HamiltonianSpec(zero, ((sx, lambda t: 0.8),))
    static = HamiltonianSpec(0.8 * sx)
    grid = TimeGrid(0.0, 3.0, 16, substeps=16)
    psi = product_state(dims, (0, 0))
    obs = {"p": tensor([identity(2), pauli("plus") @ pauli("minus")])}
    x = evolve_schrodinger(timed, psi, grid, obs)["p"]
    y = evolve_schrodinger(static, psi, grid, obs)["p"]
    assert np.max(np.abs(x - y)) < 1e-12
    assert np.max(np.abs(y - np.sin(0.8 * grid.times) ** 2)) < 1e-7


def test_closed_evolution_conserves_energy_and_excitations(table):
    N = 6
    H = jc_hamiltonian(table["omega_R"], table["omega_T"], table["g"], N)
    n_tot = tensor([number(N), identity(2)]) + tensor([identity(N), pauli("plus") @ pauli("minus")])
    grid = TimeGrid(0.0, 2.0, 21, substeps=64)
    res = evolve_schrodinger(H, product_state((N, 2), (1, 1)), grid, {"E": H.static, "N": n_tot})
    # RK4 is not symplectic; the energy drift is the truncation error of the step
    assert np.ptp(res["E"]) < 1e-6 * abs(res["E"][0])
    assert np.ptp(res["N"]) < 1e-9


def test_default_observables_recorded():
    H = jc_hamiltonian(1.0, 1.0, 0.1, 4)
    res = evolve_schrodinger(H, product_state((4, 2), (0, 1)), TimeGrid(0, 1, 5, 8))
    assert set(res.series) >= {"n_cavity", "p_excited", "top_fock"}
    assert res.final_state.is_pure


def test_master_diagnostics_present(table):
    dims = (4, 2)
    H = jc_hamiltonian(table["omega_R"], table["omega_R"], table["g"], 4)
    res = evolve_master(H, product_state(dims, (0, 1)), collapse_set(0.5, 0.3, 0.0, dims), TimeGrid(0, 2, 11, 32))
    d = res.diagnostics
    assert d["max_trace_deviation"] < 1e-8
    assert d["max_hermiticity_residue"] < 1e-10
    assert np.min(d["min_eigenvalue"]) >= -1e-8
    assert res.final_state.kind == "mixed"


def test_coarse_step_raises(table):
    H = jc_hamiltonian(table["omega_R"], table["omega_T"], table["g"], 4)
    with pytest.raises(StepSizeError):
        evolve_schrodinger(H, product_state((4, 2), (0, 1)), TimeGrid(0.0, 10.0, 3, substeps=1))


def test_schrodinger_rejects_mixed_state():
    H = jc_hamiltonian(1.0, 1.0, 0.1, 3)
    with pytest.raises(ContractError):
        evolve_schrodinger(H, product_state((3, 2), (0, 0)).to_mixed(), TimeGrid(0, 1, 3, 4))


def test_truncation_warning_for_populated_top_level():
    H = jc_hamiltonian(1.0, 1.0, 0.1, 3)
    with pytest.warns(TruncationWarning):
        evolve_schrodinger(H, product_state((3, 2), (2, 0)), TimeGrid(0, 0.1, 3, 4))
