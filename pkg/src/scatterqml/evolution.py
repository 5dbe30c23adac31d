"""Adaptive Krylov-subspace propagator for exp(-i H dt) on sparse Hamiltonians."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


class EvolutionError(RuntimeError):
    """Propagator failed to reach the requested tolerance."""


def krylov_expm(matvec, psi: np.ndarray, dt: float, tol: float = 1e-10, max_dim: int = 80):
    """Evolve psi by exp(-i H dt) using an adaptively sized Lanczos basis.

    matvec applies the Hermitian H to a vector.  The local error is estimated
    from the weight leaking into the last Krylov direction; the basis grows
    until the estimate drops below tol or max_dim is hit.
    """
    if dt == 0:
        return psi.copy()
    norm0 = np.linalg.norm(psi)
    v = psi / norm0
    basis = [v]
    alphas, betas = [], []

    w = matvec(v)
    alphas.append(np.real(np.vdot(v, w)))
    w = w - alphas[0] * v

    for j in range(1, max_dim):
        beta = np.linalg.norm(w)
        if beta < 1e-14:
            break  # happy breakdown: exact in the current subspace
        betas.append(beta)
        v = w / beta
        basis.append(v)
        w = matvec(v)
        alphas.append(np.real(np.vdot(v, w)))
        w = w - alphas[-1] * v - betas[-1] * basis[-2]
        # reorthogonalize against the basis to keep Lanczos stable
        for b in basis[:-1]:
            w -= np.vdot(b, w) * b

        m = len(alphas)
        T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        small = expm(-1j * dt * T)[:, 0]
        err = abs(small[-1]) * np.linalg.norm(w)
        if err < tol:
            out = np.zeros_like(psi)
            for coeff, b in zip(small, basis):
                out += coeff * b
            out *= norm0
            return out / np.linalg.norm(out) * norm0
    else:
        raise EvolutionError(f"Krylov dimension {max_dim} insufficient for tol {tol:.0e}")

    m = len(alphas)
    T = np.diag(alphas) + (np.diag(betas, 1) + np.diag(betas, -1) if betas else 0.0)
    small = expm(-1j * dt * T)[:, 0]
    out = np.zeros_like(psi)
    for coeff, b in zip(small, basis):
        out += coeff * b
    out *= norm0
    return out / np.linalg.norm(out) * norm0


def evolve(ham, state: np.ndarray, dt: float, tol: float = 1e-10, max_dim: int = 80) -> np.ndarray:
    """Return exp(-i H dt)|state>, norm preserved to the propagator tolerance."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return krylov_expm(ham.apply, state, dt, tol=tol, max_dim=max_dim)


def trajectory(ham, state: np.ndarray, times: np.ndarray, tol: float = 1e-10):
    """Yield (t, psi(t)) at the requested, ascending times starting from t=0."""
    psi = state.copy()
    t_prev = 0.0
    for t in times:
        psi = evolve(ham, psi, t - t_prev, tol=tol)
        t_prev = t
        yield t, psi
