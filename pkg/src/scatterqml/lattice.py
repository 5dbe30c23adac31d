"""Staggered lattice fermion model: Hamiltonian, modes, wave packets, vacuum.

The model is a one-dimensional staggered (Kogut-Susskind) fermion chain with
nearest-neighbour imaginary hopping i/2, alternating mass term and a
density-density coupling between neighbouring sites, mapped to qubits by the
Jordan-Wigner transformation with open boundaries.  Basis states are integers
whose bit n holds the occupation of site n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh


class LatticeError(ValueError):
    """Invalid lattice configuration or operator application."""


MAX_SITES = 14  # exact statevector memory cap


@dataclass(frozen=True)
class LatticeModel:
    """Lattice size and couplings; spacing is fixed to one lattice unit."""

    sites: int
    mass: float
    coupling: float
    spacing: float = 1.0

    def __post_init__(self):
        if self.sites % 2 != 0 or self.sites < 4:
            raise LatticeError(f"sites must be even and >= 4, got {self.sites}")
        if self.sites > MAX_SITES:
            raise LatticeError(f"sites must be <= {MAX_SITES}, got {self.sites}")
        if self.spacing != 1.0:
            raise LatticeError("lattice spacing is fixed to 1")


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian wave packet: species, position/momentum centre, momentum width."""

    species: str  # "fermion" | "antifermion"
    position_center: float
    momentum_center: float
    momentum_width: float = 0.4

    def __post_init__(self):
        if self.species not in ("fermion", "antifermion"):
            raise LatticeError(f"unknown species {self.species!r}")
        if self.momentum_width <= 0:
            raise LatticeError("momentum_width must be positive")
        if not (-np.pi < self.momentum_center <= np.pi):
            raise LatticeError("momentum_center outside the first Brillouin zone")


def _popcounts(nbits):
    """Table of bit counts for all integers below 2**nbits."""
    table = np.zeros(1 << nbits, dtype=np.int64)
    for b in range(nbits):
        table[(np.arange(1 << nbits) >> b) & 1 == 1] += 1
    return table


@dataclass
class SparseHamiltonian:
    """Sparse Hermitian Hamiltonian on the full 2^N qubit space."""

    model: LatticeModel
    matrix: sp.csr_matrix
    occupations: np.ndarray = field(repr=False)  # popcount per basis state

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def apply(self, psi):
        return self.matrix @ psi


def build_hamiltonian(model: LatticeModel) -> SparseHamiltonian:
    """Jordan-Wigner image of the staggered Hamiltonian with open boundaries.

    Hopping (i/2)(xi_{n+1}^dag xi_n - h.c.) carries no string sign on adjacent
    sites; mass and interaction terms are diagonal in the occupation basis.
    """
    N = model.sites
    dim = 1 << N
    states = np.arange(dim, dtype=np.int64)
    pops = _popcounts(N)

    diag = np.zeros(dim)
    for n in range(N):
        occ = (states >> n) & 1
        diag += (-1) ** n * model.mass * occ
    for n in range(N - 1):
        occ = ((states >> n) & 1) * ((states >> (n + 1)) & 1)
        diag += model.coupling * occ

    rows, cols, vals = [states], [states], [diag]
    for n in range(N - 1):
        # xi_{n+1}^dag xi_n : bit n set, bit n+1 clear
        mask = (((states >> n) & 1) == 1) & (((states >> (n + 1)) & 1) == 0)
        src = states[mask]
        dst = src ^ (1 << n) ^ (1 << (n + 1))
        amp = np.full(src.shape, 0.5j)
        rows.append(dst)
        cols.append(src)
        vals.append(amp)
        rows.append(src)
        cols.append(dst)
        vals.append(-amp)

    H = sp.coo_matrix(
        (np.concatenate(vals).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    return SparseHamiltonian(model=model, matrix=H, occupations=pops[states])


def single_particle_matrix(model: LatticeModel) -> np.ndarray:
    """N x N quadratic (coupling-independent) part of the Hamiltonian."""
    N = model.sites
    h = np.zeros((N, N), complex)
    for n in range(N - 1):
        h[n + 1, n] = 0.5j
        h[n, n + 1] = -0.5j
    for n in range(N):
        h[n, n] = (-1) ** n * model.mass
    return h


@dataclass
class SingleParticleModes:
    """Eigenmodes of the quadratic single-particle matrix.

    Positive-energy modes define fermion orbitals, negative-energy ones the
    filled Dirac sea (antifermion orbitals).  Momentum labels are the dominant
    discrete-Fourier components of each eigenvector.
    """

    hopping_matrix: np.ndarray
    energies: np.ndarray  # ascending
    vectors: np.ndarray  # orthonormal columns, matching energies
    momenta: np.ndarray  # dominant DFT momentum per mode

    @property
    def negative(self):
        return self.vectors[:, self.energies < 0]

    @property
    def positive(self):
        return self.vectors[:, self.energies > 0]


def free_modes(model: LatticeModel) -> SingleParticleModes:
    """Diagonalize the quadratic part and label modes by dominant momentum."""
    if model.mass <= 0:
        raise LatticeError("free_modes requires a positive mass")
    h = single_particle_matrix(model)
    energies, vectors = np.linalg.eigh(h)
    if np.min(np.abs(energies)) < 1e-10:
        raise LatticeError("zero single-particle energy: ambiguous particle/hole split")

    N = model.sites
    kgrid = 2 * np.pi * np.arange(-N // 2, N // 2) / N
    fourier = np.exp(-1j * np.outer(kgrid, np.arange(N))) / np.sqrt(N)
    weights = np.abs(fourier @ vectors) ** 2
    momenta = kgrid[np.argmax(weights, axis=0)]
    return SingleParticleModes(h, energies, vectors, momenta)


def momentum_coefficients(spec: WavepacketSpec, kgrid: np.ndarray) -> np.ndarray:
    """Normalized Gaussian momentum-space coefficients on a momentum grid."""
    phi = np.exp(-1j * kgrid * spec.position_center) * np.exp(
        -((kgrid - spec.momentum_center) ** 2) / (4 * spec.momentum_width**2)
    )
    return phi / np.linalg.norm(phi)


def gaussian_wavepacket(spec: WavepacketSpec, modes: SingleParticleModes) -> np.ndarray:
    """Position-space coefficients of a Gaussian wave packet, unit norm.

    The Gaussian momentum profile is Fourier-transformed to position space and
    projected onto the eigenspace of the matching species.  For the
    antifermion the packet describes the orbital removed from the Dirac sea:
    its orbital momentum centre sits at -(pi + mu_k), which folds back to the
    physical antifermion momentum mu_k in the reduced zone, and the returned
    coefficients are the conjugate of that orbital so that
    sum_n phi_n xi_n annihilates it.
    """
    N = modes.vectors.shape[0]
    if not (0 <= spec.position_center <= N - 1):
        raise LatticeError("position_center outside the lattice")
    kgrid = 2 * np.pi * np.arange(-N // 2, N // 2) / N

    if spec.species == "fermion":
        orbital_center = spec.momentum_center
        projector_basis = modes.positive
    else:
        orbital_center = -(np.pi + spec.momentum_center)
        if orbital_center <= -np.pi:
            orbital_center += 2 * np.pi
        projector_basis = modes.negative

    orbital_spec = WavepacketSpec(
        species=spec.species,
        position_center=spec.position_center,
        momentum_center=orbital_center,
        momentum_width=spec.momentum_width,
    )
    phi_k = momentum_coefficients(orbital_spec, kgrid)
    raw = np.exp(1j * np.outer(np.arange(N), kgrid)) @ phi_k
    projected = projector_basis @ (projector_basis.conj().T @ raw)
    norm = np.linalg.norm(projected)
    if norm < 1e-8:
        raise LatticeError("wave packet has no weight in the requested species band")
    orbital = projected / norm
    return orbital.conj() if spec.species == "antifermion" else orbital


def half_filling_indices(ham: SparseHamiltonian) -> np.ndarray:
    """Basis indices of the half-filling occupation sector."""
    return np.flatnonzero(ham.occupations == ham.model.sites // 2)


def ground_state(ham: SparseHamiltonian, tol: float = 1e-9, maxiter: int = 20000):
    """Ground state within the half-filling sector, embedded in the full space.

    Returns (statevector, energy).  Raises on non-convergence or degeneracy of
    the two lowest sector eigenvalues.
    """
    sector = half_filling_indices(ham)
    Hs = ham.matrix[np.ix_(sector, sector)].tocsr()
    k = min(2, Hs.shape[0] - 1)
    # deterministic start vector so repeated runs are bit-identical
    v0 = np.ones(Hs.shape[0]) / np.sqrt(Hs.shape[0])
    vals, vecs = eigsh(Hs, k=k, which="SA", tol=0, maxiter=maxiter, v0=v0)
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    if k == 2 and vals[1] - vals[0] < 1e-10:
        raise LatticeError("ground state degenerate within 1e-10")
    energy = vals[0]
    v = vecs[:, 0].astype(complex)
    pivot = np.argmax(np.abs(v))
    v *= np.exp(-1j * np.angle(v[pivot]))  # fix the global phase
    residual = np.linalg.norm(Hs @ v - energy * v)
    if residual > tol:
        raise LatticeError(f"ground-state residual {residual:.2e} above {tol:.0e}")
    psi = np.zeros(ham.dimension, complex)
    psi[sector] = v
    psi /= np.linalg.norm(psi)
    return psi, float(energy)


def apply_wavepacket_operator(state: np.ndarray, coeffs: np.ndarray, species: str) -> np.ndarray:
    """Apply sum_n phi_n xi_n^dag (fermion) or sum_n phi_n xi_n (antifermion).

    Jordan-Wigner sign strings run over sites below the acted site.  The
    result is not renormalized; a norm below 1e-8 raises.
    """
    N = int(round(np.log2(state.size)))
    if coeffs.shape != (N,):
        raise LatticeError("coefficient vector length does not match the state")
    states = np.arange(state.size, dtype=np.int64)
    pops = _popcounts(N)
    out = np.zeros_like(state)
    for n in range(N):
        if coeffs[n] == 0:
            continue
        bit = (states >> n) & 1
        mask = bit == 0 if species == "fermion" else bit == 1
        src = states[mask]
        dst = src ^ (1 << n)
        sign = 1.0 - 2.0 * (pops[src & ((1 << n) - 1)] & 1)
        np.add.at(out, dst, coeffs[n] * sign * state[src])
    if np.linalg.norm(out) < 1e-8:
        raise LatticeError("wave-packet operator annihilates the state")
    return out


def prepare_scattering_state(
    model: LatticeModel,
    fermion: WavepacketSpec,
    antifermion: WavepacketSpec,
    ham: SparseHamiltonian | None = None,
    vacuum: np.ndarray | None = None,
    modes: SingleParticleModes | None = None,
) -> np.ndarray:
    """Normalized scattering state: antifermion and fermion packets on the vacuum."""
    sigma_x = 1.0 / (2.0 * min(fermion.momentum_width, antifermion.momentum_width))
    if abs(fermion.position_center - antifermion.position_center) < 4 * sigma_x:
        raise LatticeError("wave packets are not spatially separated")
    if ham is None:
        ham = build_hamiltonian(model)
    if vacuum is None:
        vacuum, _ = ground_state(ham)
    if modes is None:
        modes = free_modes(model)
    phi_c = gaussian_wavepacket(fermion, modes)
    phi_d = gaussian_wavepacket(antifermion, modes)
    psi = apply_wavepacket_operator(vacuum, phi_c, "fermion")
    psi = apply_wavepacket_operator(psi, phi_d, "antifermion")
    return psi / np.linalg.norm(psi)


def total_number_expectation(ham: SparseHamiltonian, state: np.ndarray) -> float:
    """Expectation of the total fermion number operator."""
    return float(np.real(np.sum(ham.occupations * np.abs(state) ** 2)))
