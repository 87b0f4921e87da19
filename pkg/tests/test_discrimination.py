"""Closed-form state-discrimination oracle tests."""

import math

import numpy as np
import pytest

from sqgenlab import discrimination as dc
from sqgenlab import statevector as sv


def plane_state(angle, n=1, phase=0.0):
    """Single-qubit real-plane state cos(angle)|0> + sin(angle)|1>."""
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = math.cos(angle)
    amps[-1] = math.sin(angle) * np.exp(1j * phase)
    return sv.Statevector(n, amps)


def grid_search_basis(pair, steps=20001):
    """Brute-force maximization of the joint success probability over basis
    rotations within the plane."""
    e1, e2 = dc._plane_frame(pair)
    best, best_p = None, -1.0
    for t in np.linspace(-math.pi / 2, math.pi / 2, steps):
        a = math.cos(t) * e1 + math.sin(t) * e2
        b = -math.sin(t) * e1 + math.cos(t) * e2
        sa = sv.Statevector(pair.r.n_qubits, a)
        sb = sv.Statevector(pair.r.n_qubits, b)
        p = dc.discrimination_probability_states(pair.r, pair.g, sa, sb)
        if p > best_p:
            best_p, best = p, (sa, sb)
    return best, best_p


class TestOptimalBasis:
    def test_orthogonal_pair(self):
        zero = sv.init_zero(1)
        one = sv.apply_gate(zero, sv.x(0))
        pair = dc.plane_pair(zero, one)
        a, b = dc.optimal_basis(pair)
        assert abs(np.vdot(a.amplitudes, b.amplitudes)) < 1e-10
        # overlaps follow the bisector construction
        assert sv.fidelity_pure(zero, a) == pytest.approx(
            math.cos(math.pi / 4 - pair.beta / 2) ** 2, abs=1e-10
        )
        # cross-check against exhaustive maximization of the success probability
        _, best_p = grid_search_basis(pair, steps=2001)
        got = dc.discrimination_probability_states(zero, one, a, b)
        assert got >= best_p - 1e-6

    def test_sixty_degree_pair(self):
        beta = math.pi / 3
        r = plane_state(0.0)
        g = plane_state(beta)
        pair = dc.plane_pair(r, g)
        a, _ = dc.optimal_basis(pair)
        assert sv.fidelity_pure(r, a) == pytest.approx(
            math.cos(math.pi / 12) ** 2, abs=1e-10
        )
        assert sv.fidelity_pure(g, a) == pytest.approx(
            math.cos(math.pi / 4 + beta / 2) ** 2, abs=1e-10
        )

    def test_degenerate_pair(self):
        zero = sv.init_zero(1)
        with pytest.raises(ValueError):
            dc.optimal_basis(dc.plane_pair(zero, zero))


class TestDiscriminationProbability:
    def test_indistinguishable(self):
        assert dc.discrimination_probability(0.0) == 0.5

    def test_orthogonal(self):
        assert dc.discrimination_probability(math.pi / 2) == pytest.approx(1.0)

    def test_quarter_pi(self):
        # frozen from explicit projector arithmetic with the optimal basis
        beta = math.pi / 4
        r, g = plane_state(0.0), plane_state(beta)
        a, b = dc.optimal_basis(dc.plane_pair(r, g))
        explicit = dc.discrimination_probability_states(r, g, a, b)
        assert dc.discrimination_probability(beta) == pytest.approx(0.75, abs=1e-12)
        assert explicit == pytest.approx(0.75, abs=1e-10)

    def test_strictly_increasing(self):
        grid = np.linspace(1e-4, math.pi / 2, 300)
        vals = [dc.discrimination_probability(b) for b in grid]
        assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


class TestDiscriminationProbabilityStates:
    def test_perfect(self):
        zero = sv.init_zero(1)
        one = sv.apply_gate(zero, sv.x(0))
        assert dc.discrimination_probability_states(zero, one, zero, one) == 1.0

    def test_identical_states(self):
        zero = sv.init_zero(1)
        one = sv.apply_gate(zero, sv.x(0))
        assert dc.discrimination_probability_states(zero, zero, zero, one) == 0.0

    def test_non_orthogonal_basis(self):
        zero = sv.init_zero(1)
        plus = sv.apply_gate(zero, sv.h(0))
        with pytest.raises(ValueError):
            dc.discrimination_probability_states(zero, plus, zero, plus)

    def test_equals_closed_form_at_optimum(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            base = float(rng.uniform(0, math.pi))
            beta = float(rng.uniform(0.05, math.pi / 2))
            phi = float(rng.uniform(0, 2 * math.pi))
            r = plane_state(base, phase=phi)
            g_amps = math.cos(beta) * r.amplitudes
            perp = np.array(
                [-np.conj(r.amplitudes[1]), np.conj(r.amplitudes[0])], dtype=complex
            )
            g = sv.Statevector(1, g_amps + math.sin(beta) * perp)
            pair = dc.plane_pair(r, g)
            a, b = dc.optimal_basis(pair)
            got = dc.discrimination_probability_states(r, g, a, b)
            assert got == pytest.approx(
                dc.discrimination_probability(pair.beta), abs=1e-9
            )
