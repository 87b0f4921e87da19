"""Reduced two-qubit synergic circuit and trace-based rotation extraction.

Works in the half-angle rotation convention R(n, d) = cos(d/2) I
- i sin(d/2) (n . sigma); any 2x2 unitary is exp(i*omega) R(n, d).  The
composite X U^dag X U always has omega = 0 and n_x = 0, which lets its
controlled version collapse to one controlled-z-rotation conjugated by
fixed single-qubit rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ansatz import zyz_angles
from .statevector import CircuitSpec, GateOp, phase, ry, rz, x

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
X_MATRIX = SIGMA["x"]

UNITARY_ATOL = 1e-10
DEGENERATE_ATOL = 1e-9


@dataclass(frozen=True)
class RotationDecomposition:
    """exp(i*omega) (cos(delta/2) I - i sin(delta/2) axis.sigma)."""

    omega: float
    axis: tuple[float, float, float]
    delta: float
    degenerate: bool = False

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.omega) * rotation_matrix(self.axis, self.delta)


@dataclass(frozen=True)
class AxisAngles:
    """Spherical angles of a rotation axis: n = (sin(eta)cos(gamma),
    sin(eta)sin(gamma), cos(eta))."""

    eta: float
    gamma: float
    pole: bool = False


def rotation_matrix(axis, delta: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n_sigma = axis[0] * SIGMA["x"] + axis[1] * SIGMA["y"] + axis[2] * SIGMA["z"]
    return math.cos(delta / 2) * np.eye(2) - 1j * math.sin(delta / 2) * n_sigma


def _require_unitary(u: np.ndarray, name: str = "matrix") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > UNITARY_ATOL:
        raise ValueError(f"{name} is not unitary")
    return u


def compose_xudagxu(u: np.ndarray) -> np.ndarray:
    """X U-dagger X U (rightmost factor applied first)."""
    u = _require_unitary(u, "U")
    return X_MATRIX @ u.conj().T @ X_MATRIX @ u


def extract_rotation(v: np.ndarray) -> RotationDecomposition:
    """Solve the trace equations for (omega, axis, delta).

    Canonical form: omega in (-pi/2, pi/2], axis oriented so its first
    nonzero component is positive, delta signed accordingly.  V close to a
    multiple of the identity returns axis (0, 0, 1), flagged degenerate.
    """
    v = _require_unitary(v, "V")
    omega = 0.5 * float(np.angle(np.linalg.det(v)))
    w = v * np.exp(-1j * omega)
    cos_half = float(np.real(np.trace(w))) / 2.0
    cos_half = max(-1.0, min(1.0, cos_half))
    comps = np.array(
        [float(np.real(1j * np.trace(w @ SIGMA[j]) / 2.0)) for j in "xyz"]
    )
    sin_half = float(np.linalg.norm(comps))
    if sin_half < DEGENERATE_ATOL:
        delta = 0.0 if cos_half > 0 else 2.0 * math.pi
        return RotationDecomposition(omega, (0.0, 0.0, 1.0), delta, degenerate=True)
    axis = comps / sin_half
    for component in axis:
        if abs(component) > DEGENERATE_ATOL:
            if component < 0:
                axis = -axis
                sin_half = -sin_half
            break
    delta = 2.0 * math.atan2(sin_half, cos_half)
    return RotationDecomposition(omega, tuple(axis), delta)


def axis_angles(axis) -> AxisAngles:
    """Spherical angles of a unit axis; poles return gamma = 0, flagged."""
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-10:
        raise ValueError("axis must have unit norm")
    eta = math.acos(max(-1.0, min(1.0, axis[2])))
    if math.sin(eta) < DEGENERATE_ATOL:
        return AxisAngles(eta, 0.0, pole=True)
    return AxisAngles(eta, math.atan2(axis[1], axis[0]))


def _single_qubit_gates(u: np.ndarray, qubit: int) -> list[GateOp]:
    """Emit an arbitrary 2x2 unitary as RZ, RY, RZ plus a global phase."""
    a0, b, a2, phi = zyz_angles(u)
    return [
        rz(a0, qubit),
        ry(b, qubit),
        rz(a2, qubit),
        rz(phi, qubit),
        phase(2 * phi, qubit),
    ]


def _controlled_u_gates(u: np.ndarray, control: int, target: int) -> list[GateOp]:
    """Controlled arbitrary 2x2 unitary via controlled rotations plus a
    phase kickoff on the control line."""
    a0, b, a2, phi = zyz_angles(u)
    return [
        phase(phi, control),
        rz(a0, target, controls=(control,)),
        ry(b, target, controls=(control,)),
        rz(a2, target, controls=(control,)),
    ]


def _controlled_xudagxu_gates(u: np.ndarray, control: int, target: int) -> list[GateOp]:
    """Controlled X U-dag X U as fixed rotations around one controlled RZ.

    Uses R(n, delta) = R(z, gamma) R(y, eta) R(z, delta) R(y, eta)^dag
    R(z, gamma)^dag with (eta, gamma) the axis angles; only the middle
    z-rotation needs the control.
    """
    rot = extract_rotation(compose_xudagxu(u))
    if abs(rot.omega) > 1e-8:
        raise ValueError("composite phase is nonzero; not an XU(dag)XU product")
    if rot.degenerate:
        if rot.delta == 0.0:
            return []
        # V = -I: a controlled global sign = controlled-phase(pi) twice... it
        # is simply Z on the control line up to phase; emit via controlled rz.
        return [rz(-rot.delta / 2, target, controls=(control,))]
    angles = axis_angles(rot.axis)
    eta, gamma = angles.eta, angles.gamma
    gates: list[GateOp] = []
    # apply R(z,gamma)^dag R(y,eta)^dag first (paper convention: R(z,t) = rz(-t/2))
    gates.append(rz(gamma / 2, target))
    gates.append(ry(eta / 2, target))
    gates.append(rz(-rot.delta / 2, target, controls=(control,)))
    gates.append(ry(-eta / 2, target))
    gates.append(rz(-gamma / 2, target))
    return gates


def build_reference_circuit(
    u: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    g: np.ndarray,
    source_prep: CircuitSpec,
) -> CircuitSpec:
    """Two-qubit circuit with the explicit controlled-U sandwich: source on
    qubit 1; A on 0, B on 1; CU (control 1, target 0); X on 0; CU-dagger;
    A-dagger; B-dagger; inverse generator on qubit 1."""
    u = _require_unitary(u, "U")
    a = _require_unitary(a, "A")
    b = _require_unitary(b, "B")
    g = _require_unitary(g, "G")
    if source_prep.n_qubits != 1:
        raise ValueError("source preparation must be a one-qubit circuit")
    gates: list[GateOp] = []
    from dataclasses import replace

    for gate in source_prep.gates:
        gates.append(replace(gate, target=1))
    gates += _single_qubit_gates(a, 0)
    gates += _single_qubit_gates(b, 1)
    gates += _controlled_u_gates(u, 1, 0)
    gates.append(x(0))
    gates += _controlled_u_gates(u.conj().T, 1, 0)
    gates += _single_qubit_gates(a.conj().T, 0)
    gates += _single_qubit_gates(b.conj().T, 1)
    gates += _single_qubit_gates(g.conj().T, 1)
    return CircuitSpec(2, tuple(gates))


def build_minimal_circuit(
    u: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    g: np.ndarray,
    source_prep: CircuitSpec,
) -> CircuitSpec:
    """Reduced form: the two controlled-U blocks collapse into a single
    controlled X U-dag X U followed by the bare X."""
    u = _require_unitary(u, "U")
    a = _require_unitary(a, "A")
    b = _require_unitary(b, "B")
    g = _require_unitary(g, "G")
    if source_prep.n_qubits != 1:
        raise ValueError("source preparation must be a one-qubit circuit")
    gates: list[GateOp] = []
    from dataclasses import replace

    for gate in source_prep.gates:
        gates.append(replace(gate, target=1))
    gates += _single_qubit_gates(a, 0)
    gates += _single_qubit_gates(b, 1)
    gates += _controlled_xudagxu_gates(u, 1, 0)
    gates.append(x(0))
    gates += _single_qubit_gates(a.conj().T, 0)
    gates += _single_qubit_gates(b.conj().T, 1)
    gates += _single_qubit_gates(g.conj().T, 1)
    return CircuitSpec(2, tuple(gates))


def verify_mz_relations(u: np.ndarray) -> dict:
    """Numerically evaluate the axis/angle relations between U = R(m, phi)
    (up to phase) and V = X U-dag X U = R(n, delta).

    Returns residuals; nothing is asserted here.  The m_y/m_z identities
    cannot both hold for a general axis and are reported for inspection.
    """
    u = _require_unitary(u, "U")
    u_rot = extract_rotation(u)
    v_rot = extract_rotation(compose_xudagxu(u))
    m = np.asarray(u_rot.axis)
    n = np.asarray(v_rot.axis)
    phi = u_rot.delta
    delta = v_rot.delta
    two_pi = 2 * math.pi
    angle_gap = min(
        abs(abs(delta) - 2 * abs(phi)),
        abs(abs(delta) - (two_pi - 2 * abs(phi)) % two_pi),
        abs((two_pi - abs(delta)) % two_pi - 2 * abs(phi)),
    )
    return {
        "m_x": float(m[0]),
        "n_x": float(n[0]),
        "omega": float(v_rot.omega),
        "abs_delta_minus_two_phi": float(angle_gap),
        "m_y_minus_n_y": float(abs(abs(m[1]) - abs(n[1]))),
        "m_y_minus_n_z": float(abs(abs(m[1]) - abs(n[2]))),
        "m_z_minus_n_z": float(abs(abs(m[2]) - abs(n[2]))),
        "degenerate": u_rot.degenerate or v_rot.degenerate,
    }
