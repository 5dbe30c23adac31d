"""Minimal batched statevector circuit simulator and data encodings.

States are arrays of shape (batch, 2**n) with qubit q stored in bit q of the
basis index.  Gates are small unitaries applied by tensor contraction, so a
whole batch of encoded samples moves through a circuit at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class CircuitError(ValueError):
    pass


def rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], complex)


def rz(theta):
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


# basis (control, target), control = first tensor factor
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], complex
)

_ROTATIONS = {"rx": rx, "ry": ry, "rz": rz}


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    kind is a rotation name or "cnot"; param points at a trainable parameter
    (None for fixed gates); the applied angle is param value + offset.
    """

    kind: str
    qubits: tuple
    param: int | None = None
    offset: float = 0.0

    def matrix(self, params, shift: float = 0.0):
        if self.kind == "cnot":
            return CNOT
        angle = self.offset + shift
        if self.param is not None:
            angle += params[self.param]
        return _ROTATIONS[self.kind](angle)


def zero_state(n_qubits: int, batch: int = 1) -> np.ndarray:
    state = np.zeros((batch, 1 << n_qubits), complex)
    state[:, 0] = 1.0
    return state


def apply_unitary(state: np.ndarray, U: np.ndarray, qubits: tuple) -> np.ndarray:
    """Apply a 2^k x 2^k unitary to the given qubits of a batched state."""
    batch, dim = state.shape
    n = dim.bit_length() - 1
    k = len(qubits)
    arr = state.reshape((batch,) + (2,) * n)
    axes = [1 + (n - 1 - q) for q in qubits]
    Ut = U.reshape((2,) * (2 * k))
    arr = np.tensordot(Ut, arr, axes=(list(range(k, 2 * k)), axes))
    arr = np.moveaxis(arr, list(range(k)), axes)
    return arr.reshape(batch, dim)


def run_program(
    gates: list[Gate],
    state: np.ndarray,
    params: np.ndarray,
    shift_at: int | None = None,
    shift: float = 0.0,
) -> np.ndarray:
    """Apply a gate program; optionally shift the angle of one gate occurrence."""
    out = state
    for i, gate in enumerate(gates):
        s = shift if i == shift_at else 0.0
        out = apply_unitary(out, gate.matrix(params, s), gate.qubits)
    return out


def z_expectation(state: np.ndarray, qubit: int) -> np.ndarray:
    """<Z> on one qubit for every state in the batch."""
    dim = state.shape[1]
    signs = 1.0 - 2.0 * ((np.arange(dim) >> qubit) & 1)
    return np.real(np.sum(signs * np.abs(state) ** 2, axis=1))


def encoding_program(n_qubits: int, kind: str) -> list[Gate]:
    """Angle-encoding circuit: one Ry per qubit per repetition.

    "tpe" is a single product layer with no entangling gates; "hee" repeats
    the rotation layer twice with a linear CNOT chain after each repetition.
    """
    if kind not in ("hee", "tpe"):
        raise CircuitError(f"unknown encoding {kind!r}")
    gates = []
    reps = 2 if kind == "hee" else 1
    for _ in range(reps):
        for q in range(n_qubits):
            gates.append(Gate("ry", (q,), param=q))
        if kind == "hee":
            for q in range(n_qubits - 1):
                gates.append(Gate("cnot", (q, q + 1)))
    return gates


def encode(angles: np.ndarray, n_qubits: int, kind: str) -> np.ndarray:
    """Encode a batch of angle vectors (rows) into statevectors."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    if angles.shape[1] != n_qubits:
        raise CircuitError(
            f"expected {n_qubits} angles per sample, got {angles.shape[1]}"
        )
    program = encoding_program(n_qubits, kind)
    states = []
    for row in angles:
        states.append(run_program(program, zero_state(n_qubits), row)[0])
    return np.array(states)


def count_cnots(gates: list[Gate]) -> int:
    return sum(1 for g in gates if g.kind == "cnot")


def count_parameters(gates: list[Gate]) -> int:
    return len({g.param for g in gates if g.param is not None})
