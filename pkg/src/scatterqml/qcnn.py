"""Layered variational circuit classifier with shared-weight convolution and
pooling blocks.

Each layer applies one 15-parameter, 3-CNOT two-qubit convolution unitary to
every adjacent pair of active qubits (weights shared within the layer),
followed by a 9-parameter, 1-CNOT pooling fragment that discards half of the
active qubits.  After log2(q) layers a single readout qubit remains; the
model output is its probability of reading |1>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import (
    CircuitError,
    Gate,
    encode,
    run_program,
    z_expectation,
)

HALF_PI = np.pi / 2

PARAMS_PER_CONV = 15
PARAMS_PER_POOL = 9
PARAMS_PER_LAYER = PARAMS_PER_CONV + PARAMS_PER_POOL


def _u3(qubit, base):
    """General single-qubit rotation Rz-Ry-Rz consuming three parameters."""
    return [
        Gate("rz", (qubit,), param=base),
        Gate("ry", (qubit,), param=base + 1),
        Gate("rz", (qubit,), param=base + 2),
    ]


def conv_block_gates(a: int, b: int, base: int) -> list[Gate]:
    """Two-qubit convolution block: 15 trainable rotations, 3 CNOTs.

    The middle section is a canonical-class entangler whose fixed +-pi/2
    offsets make the whole block the identity (up to a global phase) when all
    parameters vanish; the surrounding general rotations make it universal on
    two qubits.
    """
    gates = _u3(a, base) + _u3(b, base + 3)
    gates += [
        Gate("rz", (a,), offset=HALF_PI),
        Gate("cnot", (a, b)),
        Gate("rz", (b,), param=base + 6, offset=HALF_PI),
        Gate("ry", (a,), param=base + 7, offset=HALF_PI),
        Gate("cnot", (b, a)),
        Gate("ry", (a,), param=base + 8, offset=-HALF_PI),
        Gate("cnot", (a, b)),
        Gate("rz", (b,), offset=-HALF_PI),
    ]
    gates += _u3(a, base + 9) + _u3(b, base + 12)
    return gates


def pool_block_gates(source: int, target: int, base: int) -> list[Gate]:
    """Pooling fragment: 9 trainable rotations, 1 CNOT; the source qubit is
    never touched again afterwards."""
    if source == target:
        raise CircuitError("pool source and target must differ")
    return (
        _u3(source, base)
        + _u3(target, base + 3)
        + [Gate("cnot", (source, target))]
        + _u3(target, base + 6)
    )


def _gates_to_matrix(gates, params):
    """Dense two-qubit unitary of a gate list at the given parameters."""
    from .circuits import apply_unitary

    basis = np.eye(4, dtype=complex)  # rows = basis states, batch-evolved
    for g in gates:
        basis = apply_unitary(basis, g.matrix(params), g.qubits)
    return basis.T


def conv_block(params: np.ndarray) -> np.ndarray:
    """4x4 unitary of one convolution block; exact identity at zero parameters."""
    params = np.asarray(params, dtype=float)
    if params.shape != (PARAMS_PER_CONV,):
        raise CircuitError(f"conv block takes {PARAMS_PER_CONV} parameters")
    U = _gates_to_matrix(conv_block_gates(1, 0, 0), params)
    return U * np.exp(0.25j * np.pi)  # cancel the fixed offsets' global phase


def pool_block(params: np.ndarray) -> np.ndarray:
    """4x4 unitary of one pooling fragment (source = qubit 1, target = qubit 0)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (PARAMS_PER_POOL,):
        raise CircuitError(f"pool block takes {PARAMS_PER_POOL} parameters")
    return _gates_to_matrix(pool_block_gates(1, 0, 0), params)


@dataclass
class QcnnModel:
    """Trainable parameters plus the fixed layered architecture."""

    n_qubits: int
    encoding: str = "hee"
    params: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.n_qubits not in (4, 8, 16):
            raise CircuitError("supported widths are 4, 8 and 16 qubits")
        if self.params is None:
            self.params = np.zeros(self.n_parameters)
        self.params = np.asarray(self.params, dtype=float)
        if self.params.shape != (self.n_parameters,):
            raise CircuitError(
                f"expected {self.n_parameters} parameters, got {self.params.shape}"
            )

    @property
    def n_layers(self) -> int:
        return int(np.log2(self.n_qubits))

    @property
    def n_parameters(self) -> int:
        return PARAMS_PER_LAYER * self.n_layers

    @classmethod
    def random(cls, n_qubits, encoding="hee", seed=0):
        rng = np.random.default_rng(seed)
        n = PARAMS_PER_LAYER * int(np.log2(n_qubits))
        params = rng.uniform(-np.pi, np.pi, size=n)
        return cls(n_qubits=n_qubits, encoding=encoding, params=params)


def build_program(model: QcnnModel):
    """Gate program of the trainable part and the final readout qubit."""
    active = list(range(model.n_qubits))
    gates: list[Gate] = []
    for layer in range(model.n_layers):
        base = layer * PARAMS_PER_LAYER
        pairs = [(active[i], active[i + 1]) for i in range(0, len(active), 2)]
        for a, b in pairs:
            gates += conv_block_gates(a, b, base)
        for a, b in pairs:
            gates += pool_block_gates(a, b, base + PARAMS_PER_CONV)
        active = [b for _, b in pairs]
    if len(active) != 1:
        raise CircuitError("active set did not reduce to a single qubit")
    return gates, active[0]


def qcnn_forward(model: QcnnModel, states: np.ndarray) -> np.ndarray:
    """Class-1 probability p = (1 - <Z>)/2 for a batch of encoded states."""
    states = np.atleast_2d(states)
    if states.shape[1] != 1 << model.n_qubits:
        raise CircuitError("state dimension does not match the model width")
    gates, readout = build_program(model)
    out = run_program(gates, states, model.params)
    return 0.5 * (1.0 - z_expectation(out, readout))


def qcnn_predict(model: QcnnModel, angles: np.ndarray) -> np.ndarray:
    """Encode angle vectors and evaluate the model."""
    return qcnn_forward(model, encode(angles, model.n_qubits, model.encoding))


def parameter_shift_gradient(
    model: QcnnModel, states: np.ndarray, labels: np.ndarray
) -> np.ndarray:
    """Gradient of mean squared error via the two-point shift rule.

    Every occurrence of a shared parameter is shifted separately by +-pi/2
    and the contributions are accumulated, so weight sharing is handled
    exactly; the outer factor 2(p - y) comes from the chain rule through the
    readout probability.
    """
    states = np.atleast_2d(states)
    labels = np.asarray(labels, dtype=float)
    gates, readout = build_program(model)
    p0 = 0.5 * (1.0 - z_expectation(run_program(gates, states, model.params), readout))
    outer = 2.0 * (p0 - labels) / labels.size

    grad = np.zeros_like(model.params)
    for i, gate in enumerate(gates):
        if gate.param is None:
            continue
        plus = run_program(gates, states, model.params, shift_at=i, shift=HALF_PI)
        minus = run_program(gates, states, model.params, shift_at=i, shift=-HALF_PI)
        p_plus = 0.5 * (1.0 - z_expectation(plus, readout))
        p_minus = 0.5 * (1.0 - z_expectation(minus, readout))
        dp = 0.5 * (p_plus - p_minus)
        grad[gate.param] += np.sum(outer * dp)
    return grad


def _gate_generator(kind):
    if kind == "rx":
        return np.array([[0, 1], [1, 0]], complex)
    if kind == "ry":
        return np.array([[0, -1j], [1j, 0]])
    return np.diag([1.0, -1.0]).astype(complex)


def adjoint_gradient(model: QcnnModel, states: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Reverse-pass gradient of the mean squared error.

    Mathematically identical to the parameter-shift result (agreement to
    1e-8 is asserted in the tests) at a cost linear in the circuit depth.
    """
    from .circuits import apply_unitary

    states = np.atleast_2d(states)
    labels = np.asarray(labels, dtype=float)
    gates, readout = build_program(model)
    params = model.params

    psi = states
    for g in gates:
        psi = apply_unitary(psi, g.matrix(params), g.qubits)
    signs = 1.0 - 2.0 * ((np.arange(psi.shape[1]) >> readout) & 1)
    p = 0.5 * (1.0 - np.real(np.sum(signs * np.abs(psi) ** 2, axis=1)))
    outer = 2.0 * (p - labels) / labels.size

    # lam = (dL/dp) * P1 |psi>, with P1 the |1><1| projector on the readout qubit
    proj = 0.5 * (1.0 - signs)
    lam = (outer[:, None] * proj) * psi
    grad = np.zeros_like(params)
    for g in reversed(gates):
        U = g.matrix(params)
        psi = apply_unitary(psi, U.conj().T, g.qubits)
        if g.param is not None:
            gen = _gate_generator(g.kind)
            dU = (-0.5j * gen) @ U
            dpsi = apply_unitary(psi, dU, g.qubits)
            grad[g.param] += 2.0 * np.real(np.sum(np.conj(lam) * dpsi))
        lam = apply_unitary(lam, U.conj().T, g.qubits)
    return grad
