"""Exact pure-state simulation: gates, circuits, probabilities, sampling.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of the basis-state index, so the top
  line of a circuit diagram is qubit 0 and bitstrings read top-down.
* Rotations follow the convention R(theta) = cos(theta)*I + i*sin(theta)*P
  for P in {Y, Z}.  Note this differs from the common exp(-i*theta*P/2)
  convention: RY(theta)|0> = (cos(theta), -sin(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

MAX_QUBITS = 24
NORM_ATOL = 1e-10

_SQRT2 = math.sqrt(2.0)


class DegeneratePostselectionError(ValueError):
    """Raised when post-selecting on a zero-probability branch."""


class UnsupportedGateError(ValueError):
    """Raised for gate kinds a routine cannot handle."""


_FIXED_GATES = frozenset({"x", "y", "z", "h"})
_ROTATION_GATES = frozenset({"ry", "rz", "phase"})
GATE_KINDS = _FIXED_GATES | _ROTATION_GATES


@dataclass(frozen=True)
class GateOp:
    """One gate: a single-qubit base operation plus optional controls.

    ``control_states`` gives the polarity of each control (1 = active on
    |1>, 0 = active on |0>), aligned with ``controls``.
    """

    kind: str
    target: int
    angle: float | None = None
    controls: tuple[int, ...] = ()
    control_states: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise UnsupportedGateError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ROTATION_GATES and self.angle is None:
            raise ValueError(f"{self.kind} requires an angle")
        if self.kind in _FIXED_GATES and self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")
        if len(self.controls) != len(self.control_states):
            raise ValueError("controls and control_states lengths differ")
        if any(s not in (0, 1) for s in self.control_states):
            raise ValueError("control polarities must be 0 or 1")
        involved = (self.target, *self.controls)
        if len(set(involved)) != len(involved):
            raise ValueError("target and control indices must be disjoint")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target, *self.controls)

    def inverse(self) -> "GateOp":
        if self.kind in _FIXED_GATES:
            return self
        return replace(self, angle=-self.angle)


def x(target: int, *, controls=(), control_states=None) -> GateOp:
    return _controlled("x", target, None, controls, control_states)


def y(target: int) -> GateOp:
    return GateOp("y", target)


def z(target: int) -> GateOp:
    return GateOp("z", target)


def h(target: int) -> GateOp:
    return GateOp("h", target)


def ry(angle: float, target: int, *, controls=(), control_states=None) -> GateOp:
    return _controlled("ry", target, angle, controls, control_states)


def rz(angle: float, target: int, *, controls=(), control_states=None) -> GateOp:
    return _controlled("rz", target, angle, controls, control_states)


def phase(angle: float, target: int, *, controls=(), control_states=None) -> GateOp:
    return _controlled("phase", target, angle, controls, control_states)


def cnot(control: int, target: int) -> GateOp:
    return x(target, controls=(control,))


def _controlled(kind, target, angle, controls, control_states):
    controls = tuple(controls)
    if control_states is None:
        control_states = (1,) * len(controls)
    return GateOp(kind, target, angle, controls, tuple(control_states))


def gate_matrix(gate: GateOp) -> np.ndarray:
    """2x2 matrix of the gate's base operation (controls excluded)."""
    k = gate.kind
    if k == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if k == "z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if k == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2
    t = gate.angle
    if k == "ry":
        c, s = math.cos(t), math.sin(t)
        return np.array([[c, s], [-s, c]], dtype=complex)
    if k == "rz":
        return np.array([[np.exp(1j * t), 0], [0, np.exp(-1j * t)]], dtype=complex)
    if k == "phase":
        return np.array([[1, 0], [0, np.exp(1j * t)]], dtype=complex)
    raise UnsupportedGateError(f"unknown gate kind {k!r}")


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered gate sequence on a fixed-width register."""

    n_qubits: int
    gates: tuple[GateOp, ...] = ()
    classical_label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise IndexError(f"qubit {q} outside register of {self.n_qubits}")

    def inverse(self) -> "CircuitSpec":
        return CircuitSpec(
            self.n_qubits,
            tuple(g.inverse() for g in reversed(self.gates)),
            self.classical_label,
        )

    def __add__(self, other: "CircuitSpec") -> "CircuitSpec":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different widths")
        return CircuitSpec(self.n_qubits, self.gates + other.gates, self.classical_label)


@dataclass(frozen=True)
class Statevector:
    """Normalized complex amplitudes over 2**n_qubits basis states."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state norm {norm} is not 1")
        object.__setattr__(self, "amplitudes", amps)

    def bit_position(self, qubit: int) -> int:
        return self.n_qubits - 1 - qubit


def init_zero(n_qubits: int) -> Statevector:
    """|0...0> on ``n_qubits`` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def _validate_indices(state: Statevector, gate: GateOp):
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise IndexError(f"qubit {q} outside register of {state.n_qubits}")


def apply_gate(state: Statevector, gate: GateOp) -> Statevector:
    """Apply one gate; returns a new state (input untouched)."""
    _validate_indices(state, gate)
    n = state.n_qubits
    amps = state.amplitudes.copy()
    bpt = n - 1 - gate.target
    idx = np.arange(1 << n)
    mask = ((idx >> bpt) & 1) == 0
    for c, pol in zip(gate.controls, gate.control_states):
        bpc = n - 1 - c
        mask &= ((idx >> bpc) & 1) == pol
    i0 = idx[mask]
    i1 = i0 | (1 << bpt)
    u = gate_matrix(gate)
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = u[0, 0] * a0 + u[0, 1] * a1
    amps[i1] = u[1, 0] * a0 + u[1, 1] * a1
    return Statevector(n, amps)


def apply_circuit(state: Statevector, circuit: CircuitSpec) -> Statevector:
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit width {circuit.n_qubits} != state width {state.n_qubits}"
        )
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state


def run_circuit(circuit: CircuitSpec) -> Statevector:
    """Convenience: apply ``circuit`` to |0...0>."""
    return apply_circuit(init_zero(circuit.n_qubits), circuit)


def probabilities(state: Statevector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def marginal_probability(state: Statevector, qubits, outcome) -> float:
    """Probability that Z-measuring ``qubits`` yields the bit pattern ``outcome``."""
    qubits = tuple(qubits)
    outcome = tuple(int(b) for b in outcome)
    if len(qubits) != len(outcome):
        raise ValueError("outcome length must match number of qubits")
    n = state.n_qubits
    idx = np.arange(1 << n)
    mask = np.ones(1 << n, dtype=bool)
    for q, b in zip(qubits, outcome):
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} outside register of {n}")
        mask &= ((idx >> (n - 1 - q)) & 1) == b
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


def postselect(state: Statevector, qubit: int, outcome: int) -> tuple[Statevector, float]:
    """Condition on one qubit's Z outcome.

    The qubit stays in the register, collapsed to ``outcome``; the second
    return value is the projection probability.
    """
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"qubit {qubit} outside register of {state.n_qubits}")
    n = state.n_qubits
    prob = marginal_probability(state, (qubit,), (outcome,))
    if prob <= 1e-14:
        raise DegeneratePostselectionError(
            f"outcome {outcome} on qubit {qubit} has zero probability"
        )
    bp = n - 1 - qubit
    idx = np.arange(1 << n)
    amps = state.amplitudes.copy()
    amps[((idx >> bp) & 1) != outcome] = 0.0
    return Statevector(n, amps / math.sqrt(prob)), prob


def sample_counts(state: Statevector, shots: int, seed: int) -> dict[str, int]:
    """Shot sampling via inverse CDF; deterministic for a fixed seed.

    Keys are MSB-first bitstrings (qubit 0 leftmost).
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = probabilities(state)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    counts: dict[str, int] = {}
    n = state.n_qubits
    for basis, cnt in zip(*np.unique(draws, return_counts=True)):
        counts[format(int(basis), f"0{n}b")] = int(cnt)
    return counts


def fidelity_pure(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2 for pure states."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different qubit counts")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
