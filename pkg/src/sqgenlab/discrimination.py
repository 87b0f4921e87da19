"""Closed-form two-pure-state discrimination oracle.

Any two pure states span a real plane once the relative phase is absorbed;
with the angle between them beta, the optimal von Neumann basis (|a>, |b>)
sits at +/- pi/4 around their bisector and the success probability is
(1 + sin^2 beta) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import Statevector, fidelity_pure

BASIS_ATOL = 1e-9


@dataclass(frozen=True)
class PlanePair:
    """Two pure states plus the angle between them (beta in [0, pi/2])."""

    r: Statevector
    g: Statevector
    beta: float

    def __post_init__(self):
        if self.r.n_qubits != self.g.n_qubits:
            raise ValueError("states have different qubit counts")
        overlap = abs(np.vdot(self.r.amplitudes, self.g.amplitudes))
        beta = math.acos(min(1.0, overlap))
        if abs(beta - self.beta) > 1e-10:
            raise ValueError(
                f"beta {self.beta} inconsistent with |<r|g>| (expected {beta})"
            )


def plane_pair(r: Statevector, g: Statevector) -> PlanePair:
    overlap = abs(np.vdot(r.amplitudes, g.amplitudes))
    return PlanePair(r, g, math.acos(min(1.0, overlap)))


def _plane_frame(pair: PlanePair) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal frame (e1, e2) of the real span: e1 = r, g = cos(beta) e1
    + sin(beta) e2 after absorbing the relative phase into g."""
    r = pair.r.amplitudes
    g = pair.g.amplitudes
    inner = np.vdot(r, g)
    if abs(inner) > 1e-14:
        g = g * np.exp(-1j * np.angle(inner))
    residual = g - math.cos(pair.beta) * r
    norm = np.linalg.norm(residual)
    if norm < 1e-12:
        raise ValueError("states are parallel; no plane")
    return r, residual / norm


def optimal_basis(pair: PlanePair) -> tuple[Statevector, Statevector]:
    """Orthonormal (|a>, |b>) maximizing the discrimination probability."""
    if pair.beta <= 1e-12:
        raise ValueError("degenerate pair: beta = 0")
    e1, e2 = _plane_frame(pair)
    half = pair.beta / 2
    ang_a = half - math.pi / 4
    ang_b = half + math.pi / 4
    a = math.cos(ang_a) * e1 + math.sin(ang_a) * e2
    b = math.cos(ang_b) * e1 + math.sin(ang_b) * e2
    n = pair.r.n_qubits
    return Statevector(n, a), Statevector(n, b)


def discrimination_probability(beta: float) -> float:
    """(1 + sin^2 beta) / 2 for states separated by beta."""
    return 0.5 * (1.0 + math.sin(beta) ** 2)


def discrimination_probability_states(
    psi: Statevector, g: Statevector, a: Statevector, b: Statevector
) -> float:
    """Joint success probability of measuring both systems in {|a>, |b>}."""
    if abs(np.vdot(a.amplitudes, b.amplitudes)) > BASIS_ATOL:
        raise ValueError("measurement basis is not orthogonal")
    return fidelity_pure(psi, a) * fidelity_pure(g, b) + fidelity_pure(
        psi, b
    ) * fidelity_pure(g, a)
