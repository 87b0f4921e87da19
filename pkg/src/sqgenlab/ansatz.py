"""Parameterized unitary blocks, controlled-gate decomposition, depth.

The trainable block ("full-cascade") applies, for each qubit j, a ZYZ
triple of uniformly controlled rotations conditioned on qubits 0..j-1,
followed by one global-phase parameter.  Each uniformly controlled stage is
emitted directly in its decomposed form (single-qubit rotations interleaved
with CNOTs), and the trainable parameters are the angles of those physical
rotations.  Two consequences worth keeping:

* every parameter sits in exactly one single-qubit rotation, so two-point
  parameter-shift gradients are exact for any cost built on the block;
* at all-zero parameters the CNOTs cancel pairwise and the block is the
  identity.

Parameter count is 3*(2^n - 1) + 1 (4 for one qubit: RZ, RY, RZ, phase).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import (
    CircuitSpec,
    GateOp,
    UnsupportedGateError,
    cnot,
    h,
    phase,
    ry,
    rz,
    x,
)

STRUCTURES = ("full-cascade", "single-qubit-zyz")


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    structure: str = "full-cascade"

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.structure == "single-qubit-zyz" and self.n_qubits != 1:
            raise ValueError("single-qubit-zyz is defined for one qubit")

    @property
    def param_count(self) -> int:
        return param_count(self)


@dataclass(frozen=True)
class AnsatzParams:
    angles: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    def __len__(self) -> int:
        return len(self.angles)


def param_count(spec: AnsatzSpec) -> int:
    if spec.structure == "single-qubit-zyz":
        return 4
    return 3 * ((1 << spec.n_qubits) - 1) + 1


def _uc_rotation_gates(kind: str, target: int, controls: tuple[int, ...], angles):
    """Uniformly controlled rotation, decomposed form.

    ``angles[i]`` is the rotation applied when the control bits (controls[0]
    as most significant) spell ``i``.  Recursive construction: split on the
    first control, emitting half-sum/half-difference sub-stages around CNOTs.
    """
    angles = list(angles)
    if len(angles) != 1 << len(controls):
        raise ValueError("need one angle per control pattern")
    maker = {"ry": ry, "rz": rz}[kind]
    if not controls:
        return [maker(angles[0], target)]
    half = len(angles) // 2
    plus = [(a + b) / 2 for a, b in zip(angles[:half], angles[half:])]
    minus = [(a - b) / 2 for a, b in zip(angles[:half], angles[half:])]
    rest = controls[1:]
    out = _uc_rotation_gates(kind, target, rest, plus)
    out.append(cnot(controls[0], target))
    out += _uc_rotation_gates(kind, target, rest, minus)
    out.append(cnot(controls[0], target))
    return out


def _ladder_gates(kind: str, target: int, controls: tuple[int, ...], params):
    """Cascade stage with trainable angles placed on the physical rotations.

    Same gate layout as :func:`_uc_rotation_gates`, but parameters map one
    to one onto the emitted rotations (no multiplexing transform).
    """
    params = list(params)
    maker = {"ry": ry, "rz": rz}[kind]
    if not controls:
        return [maker(params[0], target)]
    half = len(params) // 2
    rest = controls[1:]
    out = _ladder_gates(kind, target, rest, params[:half])
    out.append(cnot(controls[0], target))
    out += _ladder_gates(kind, target, rest, params[half:])
    out.append(cnot(controls[0], target))
    return out


def _global_phase_gates(angle: float, qubit: int):
    # exp(i*t)*I = RZ(t) followed by PHASE(2t) on any one qubit.
    return [rz(angle, qubit), phase(2 * angle, qubit)]


def build_unitary_block(spec: AnsatzSpec, params: AnsatzParams) -> CircuitSpec:
    """Emit the trainable block as a circuit on ``spec.n_qubits`` qubits."""
    if len(params) != param_count(spec):
        raise ValueError(
            f"expected {param_count(spec)} parameters, got {len(params)}"
        )
    a = params.angles
    gates: list[GateOp] = []
    if spec.structure == "single-qubit-zyz":
        gates = [rz(a[0], 0), ry(a[1], 0), rz(a[2], 0)]
        gates += _global_phase_gates(a[3], 0)
        return CircuitSpec(1, tuple(gates))
    pos = 0
    for j in range(spec.n_qubits):
        controls = tuple(range(j))
        width = 1 << j
        for kind in ("rz", "ry", "rz"):
            gates += _ladder_gates(kind, j, controls, a[pos : pos + width])
            pos += width
    gates += _global_phase_gates(a[pos], 0)
    return CircuitSpec(spec.n_qubits, tuple(gates))


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Angles (rz_first, ry, rz_second, phase) reproducing a 2x2 unitary.

    The block applies RZ(a0) then RY(a1) then RZ(a2) then a global phase, so
    the matrix is exp(i*a3) * RZ(a2) @ RY(a1) @ RZ(a0).
    """
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    phi = 0.5 * np.angle(det)
    su = u * np.exp(-1j * phi)
    cb = abs(su[0, 0])
    sb = abs(su[0, 1])
    b = math.atan2(sb, cb)
    # su = [[cb e^{i(c2+c0)}, sb e^{i(c2-c0)}], ...] with c0/c2 the RZ angles.
    sum_angle = np.angle(su[0, 0]) if cb > 1e-12 else 0.0
    diff_angle = np.angle(su[0, 1]) if sb > 1e-12 else 0.0
    a2 = (sum_angle + diff_angle) / 2
    a0 = (sum_angle - diff_angle) / 2
    return (a0, b, a2, phi)


def single_qubit_block_params(u: np.ndarray, spec: AnsatzSpec) -> AnsatzParams:
    """Parameters making the one-qubit block act as the unitary ``u``."""
    if spec.n_qubits != 1:
        raise ValueError("only defined for one-qubit specs")
    a0, b, a2, phi = zyz_angles(u)
    return AnsatzParams((a0, b, a2, phi))


def _mcx_gates(controls: tuple[int, ...], target: int):
    if not controls:
        return [x(target)]
    if len(controls) == 1:
        return [cnot(controls[0], target)]
    return [h(target)] + _mcp_gates(math.pi, controls, target) + [h(target)]


def _mcp_gates(angle: float, controls: tuple[int, ...], target: int):
    if not controls:
        return [phase(angle, target)]
    if len(controls) == 1:
        return [phase(angle, target, controls=controls)]
    inner, last = controls[:-1], controls[-1]
    out = _mcp_gates(angle / 2, inner, target)
    out += _mcx_gates(inner, last)
    out.append(phase(-angle / 2, last, controls=(target,)))
    out += _mcx_gates(inner, last)
    out.append(phase(angle / 2, last, controls=(target,)))
    return out


def decompose_multicontrolled(gate: GateOp) -> tuple[GateOp, ...]:
    """Rewrite a (multi-)controlled RY/RZ/X/Z/PHASE gate over the basis
    {single-qubit rotations, CNOT, controlled-phase}.

    Gates with at most one control that are already in the basis pass
    through unchanged.  Control-on-0 polarities are absorbed with X wraps.
    """
    if not gate.controls:
        return (gate,)
    flips = [x(c) for c, pol in zip(gate.controls, gate.control_states) if pol == 0]
    core: list[GateOp]
    if gate.kind in ("ry", "rz"):
        pattern_angles = [0.0] * (1 << len(gate.controls))
        pattern_angles[-1] = gate.angle
        core = _uc_rotation_gates(gate.kind, gate.target, gate.controls, pattern_angles)
    elif gate.kind == "x":
        if len(gate.controls) == 1:
            core = [cnot(gate.controls[0], gate.target)]
        else:
            core = _mcx_gates(gate.controls, gate.target)
    elif gate.kind == "phase":
        if len(gate.controls) == 1:
            core = [phase(gate.angle, gate.target, controls=gate.controls)]
        else:
            core = _mcp_gates(gate.angle, gate.controls, gate.target)
    elif gate.kind == "z":
        if len(gate.controls) == 1:
            core = [phase(math.pi, gate.target, controls=gate.controls)]
        else:
            core = _mcp_gates(math.pi, gate.controls, gate.target)
    else:
        raise UnsupportedGateError(
            f"cannot decompose controlled {gate.kind!r} gate"
        )
    return tuple(flips + core + flips)


def _in_hardware_basis(gate: GateOp) -> bool:
    if not gate.controls:
        return True
    return (
        len(gate.controls) == 1
        and gate.control_states == (1,)
        and gate.kind in ("x", "phase")
    )


def decompose_circuit(circuit: CircuitSpec) -> CircuitSpec:
    """Rewrite onto {single-qubit gates, CNOT, controlled-phase}."""
    gates: list[GateOp] = []
    for g in circuit.gates:
        if _in_hardware_basis(g):
            gates.append(g)
        else:
            gates.extend(decompose_multicontrolled(g))
    return CircuitSpec(circuit.n_qubits, tuple(gates), circuit.classical_label)


def circuit_depth(circuit: CircuitSpec) -> int:
    """Longest chain when gates on disjoint qubits are layered greedily."""
    frontier = [0] * circuit.n_qubits
    depth = 0
    for gate in circuit.gates:
        level = 1 + max(frontier[q] for q in gate.qubits)
        for q in gate.qubits:
            frontier[q] = level
        depth = max(depth, level)
    return depth
