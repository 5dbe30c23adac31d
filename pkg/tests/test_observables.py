import numpy as np
import pytest

from scatterqml.lattice import LatticeModel, build_hamiltonian, ground_state
from scatterqml.observables import (
    ObservableError,
    entanglement_entropy,
    entropy_profile,
    excess_density,
    excess_entropy,
    reduced_density_matrix,
    site_densities,
    von_neumann_entropy,
)

from oracles import dense_entropy, dense_reduced_density, dense_site_densities


def _random_state(rng, n_qubits):
    psi = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return psi / np.linalg.norm(psi)


def test_site_densities_match_dense_operators(rng):
    psi = _random_state(rng, 6)
    assert np.abs(site_densities(psi) - dense_site_densities(6, psi)).max() < 1e-12


def test_excess_density_of_vacuum_is_zero():
    model = LatticeModel(sites=6, mass=0.3, coupling=0.4)
    vac, _ = ground_state(build_hamiltonian(model))
    assert np.abs(excess_density(vac, vac)).max() == 0.0


def test_reduced_density_matrix_matches_partial_trace_oracle(rng):
    psi = _random_state(rng, 6)
    for cut in (1, 3, 5):
        rho = reduced_density_matrix(psi, cut)
        ref = dense_reduced_density(psi, cut)
        assert np.abs(rho - ref).max() < 1e-12
        vals = np.linalg.eigvalsh(rho)
        assert vals.min() > -1e-12
        assert abs(np.trace(rho).real - 1.0) < 1e-12


def test_product_state_has_zero_entropy():
    psi = np.zeros(16, complex)
    psi[0b1010] = 1.0
    for cut in (1, 2, 3):
        assert entanglement_entropy(psi, cut) < 1e-14


def test_bell_and_ghz_cuts_give_ln2():
    bell = np.zeros(4, complex)
    bell[0b00] = bell[0b11] = 1 / np.sqrt(2)
    assert abs(entanglement_entropy(bell, 1) - np.log(2)) < 1e-12
    ghz = np.zeros(16, complex)
    ghz[0b0000] = ghz[0b1111] = 1 / np.sqrt(2)
    assert abs(entanglement_entropy(ghz, 2) - np.log(2)) < 1e-12
    rho = reduced_density_matrix(ghz, 2)
    assert abs(von_neumann_entropy(rho) - np.log(2)) < 1e-12


def test_left_right_symmetry(rng):
    psi = _random_state(rng, 8)
    for cut in range(1, 8):
        left = entanglement_entropy(psi, cut)
        # complementary block entropy via the svd of the transposed split
        right = von_neumann_entropy(
            np.einsum(
                "ij,kj->ik",
                psi.reshape(1 << (8 - cut), 1 << cut),
                psi.reshape(1 << (8 - cut), 1 << cut).conj(),
            )
        )
        assert abs(left - right) < 1e-10


def test_entropy_matches_dense_oracle(rng):
    psi = _random_state(rng, 6)
    for cut in (1, 2, 3, 4, 5):
        assert abs(entanglement_entropy(psi, cut) - dense_entropy(psi, cut)) < 1e-10


def test_entropy_profile_and_excess(rng):
    model = LatticeModel(sites=6, mass=0.3, coupling=0.5)
    vac, _ = ground_state(build_hamiltonian(model))
    vac_entropies = np.array([entanglement_entropy(vac, c) for c in range(1, 6)])
    profile = entropy_profile(vac, vac_entropies)
    assert np.abs(profile).max() < 1e-14
    psi = _random_state(rng, 6)
    for i, cut in enumerate(range(1, 6)):
        assert abs(
            entropy_profile(psi, vac_entropies)[i] - excess_entropy(psi, vac, cut)
        ) < 1e-12


def test_invalid_cut_raises(rng):
    psi = _random_state(rng, 4)
    with pytest.raises(ObservableError):
        entanglement_entropy(psi, 0)
    with pytest.raises(ObservableError):
        entanglement_entropy(psi, 4)


def test_non_normalized_density_matrix_rejected():
    with pytest.raises(ObservableError):
        von_neumann_entropy(np.eye(2))
