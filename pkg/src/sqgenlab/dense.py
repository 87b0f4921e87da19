"""Dense-matrix reference path.

Builds full 2^n x 2^n operators gate by gate.  This is the verification
route (small n only); the simulation hot path in :mod:`sqgenlab.statevector`
never constructs these matrices.
"""

from __future__ import annotations

import numpy as np

from .statevector import CircuitSpec, GateOp, gate_matrix


def gate_unitary(gate: GateOp, n_qubits: int) -> np.ndarray:
    """Full-register matrix of one (possibly controlled) gate."""
    dim = 1 << n_qubits
    u = gate_matrix(gate)
    out = np.eye(dim, dtype=complex)
    bpt = n_qubits - 1 - gate.target
    for i in range(dim):
        if ((i >> bpt) & 1) != 0:
            continue
        active = all(
            ((i >> (n_qubits - 1 - c)) & 1) == pol
            for c, pol in zip(gate.controls, gate.control_states)
        )
        j = i | (1 << bpt)
        if active:
            out[i, i] = u[0, 0]
            out[i, j] = u[0, 1]
            out[j, i] = u[1, 0]
            out[j, j] = u[1, 1]
    return out


def circuit_unitary(circuit: CircuitSpec) -> np.ndarray:
    """Product of all gate matrices, later gates on the left."""
    dim = 1 << circuit.n_qubits
    total = np.eye(dim, dtype=complex)
    for gate in circuit.gates:
        total = gate_unitary(gate, circuit.n_qubits) @ total
    return total


def is_unitary(matrix: np.ndarray, atol: float = 1e-10) -> bool:
    dim = matrix.shape[0]
    return bool(
        np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim))) < atol
    )
