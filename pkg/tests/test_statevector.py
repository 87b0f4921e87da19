"""Simulator core tests: gates, circuits, marginals, post-selection, sampling."""

import math

import numpy as np
import pytest

from sqgenlab import statevector as sv
from sqgenlab.dense import circuit_unitary, gate_unitary, is_unitary

INV_SQRT2 = 1 / math.sqrt(2)


def ghz_circuit(n):
    gates = [sv.h(0)] + [sv.cnot(q, q + 1) for q in range(n - 1)]
    return sv.CircuitSpec(n, tuple(gates))


def random_state(n, rng):
    z = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return sv.Statevector(n, z / np.linalg.norm(z))


class TestInitZero:
    def test_one_qubit(self):
        assert np.allclose(sv.init_zero(1).amplitudes, [1, 0])

    def test_two_qubits(self):
        assert np.allclose(sv.init_zero(2).amplitudes, [1, 0, 0, 0])

    def test_ghz_three_qubits(self):
        state = sv.apply_circuit(sv.init_zero(3), ghz_circuit(3))
        expected = np.zeros(8, dtype=complex)
        expected[0] = expected[7] = INV_SQRT2
        assert np.allclose(state.amplitudes, expected, atol=1e-12)

    @pytest.mark.parametrize("n", [0, -1, 25])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            sv.init_zero(n)


class TestApplyGate:
    def test_h_on_zero(self):
        state = sv.apply_gate(sv.init_zero(1), sv.h(0))
        assert np.allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2])

    def test_x_on_zero(self):
        state = sv.apply_gate(sv.init_zero(1), sv.x(0))
        assert np.allclose(state.amplitudes, [0, 1])

    def test_ry_half_pi_flips_zero(self):
        # R_y(t) = cos(t) I + i sin(t) Y, so R_y(pi/2)|0> lies entirely on |1>.
        u = np.cos(np.pi / 2) * np.eye(2) + 1j * np.sin(np.pi / 2) * np.array(
            [[0, -1j], [1j, 0]]
        )
        expected = u @ np.array([1, 0])
        state = sv.apply_gate(sv.init_zero(1), sv.ry(np.pi / 2, 0))
        assert np.allclose(state.amplitudes, expected, atol=1e-12)
        assert abs(state.amplitudes[1]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            sv.apply_gate(sv.init_zero(1), sv.x(1))

    def test_controlled_polarity(self):
        # X on qubit 1 active when qubit 0 is |0>.
        gate = sv.x(1, controls=(0,), control_states=(0,))
        state = sv.apply_gate(sv.init_zero(2), gate)
        assert np.allclose(state.amplitudes, [0, 1, 0, 0])

    def test_norm_preserved_over_random_circuit(self):
        rng = np.random.default_rng(7)
        state = random_state(4, rng)
        for _ in range(60):
            kind = rng.choice(["x", "h", "ry", "rz", "phase", "cnot"])
            q = int(rng.integers(4))
            if kind == "cnot":
                t = int(rng.integers(4))
                if t == q:
                    continue
                gate = sv.cnot(q, t)
            elif kind in ("ry", "rz", "phase"):
                gate = getattr(sv, kind)(float(rng.uniform(-np.pi, np.pi)), q)
            else:
                gate = getattr(sv, kind)(q)
            state = sv.apply_gate(state, gate)
        assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1) < 1e-10

    def test_every_gate_matrix_is_unitary(self):
        gates = [sv.x(0), sv.y(0), sv.z(0), sv.h(0), sv.ry(0.7, 0), sv.rz(-1.2, 0),
                 sv.phase(2.5, 0)]
        for g in gates:
            u = sv.gate_matrix(g)
            assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-12


class TestApplyCircuit:
    def test_empty_circuit_is_identity(self):
        rng = np.random.default_rng(0)
        state = random_state(2, rng)
        out = sv.apply_circuit(state, sv.CircuitSpec(2, ()))
        assert np.allclose(out.amplitudes, state.amplitudes)

    def test_h_then_x_keeps_plus(self):
        circ = sv.CircuitSpec(1, (sv.h(0), sv.x(0)))
        out = sv.apply_circuit(sv.init_zero(1), circ)
        assert np.allclose(out.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-12)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            sv.apply_circuit(sv.init_zero(2), sv.CircuitSpec(3, ()))

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = 3
        gates = []
        for _ in range(10):
            q = int(rng.integers(n))
            roll = rng.random()
            if roll < 0.3:
                t = int(rng.integers(n))
                if t == q:
                    t = (t + 1) % n
                gates.append(sv.cnot(q, t))
            elif roll < 0.6:
                gates.append(sv.ry(float(rng.uniform(-np.pi, np.pi)), q))
            elif roll < 0.8:
                gates.append(sv.rz(float(rng.uniform(-np.pi, np.pi)), q))
            else:
                gates.append(sv.h(q))
        circ = sv.CircuitSpec(n, tuple(gates))
        state = random_state(n, rng)
        fast = sv.apply_circuit(state, circ).amplitudes
        dense = circuit_unitary(circ) @ state.amplitudes
        assert np.max(np.abs(fast - dense)) < 1e-10

    def test_inverse_circuit_roundtrip(self):
        rng = np.random.default_rng(3)
        circ = ghz_circuit(3) + sv.CircuitSpec(3, (sv.ry(0.4, 1), sv.rz(-0.9, 2)))
        state = random_state(3, rng)
        back = sv.apply_circuit(sv.apply_circuit(state, circ), circ.inverse())
        assert np.max(np.abs(back.amplitudes - state.amplitudes)) < 1e-10


class TestProbabilities:
    def test_basis_state(self):
        assert np.allclose(sv.probabilities(sv.init_zero(1)), [1, 0])

    def test_plus_state(self):
        state = sv.apply_gate(sv.init_zero(1), sv.h(0))
        assert np.allclose(sv.probabilities(state), [0.5, 0.5])

    def test_ghz(self):
        state = sv.apply_circuit(sv.init_zero(3), ghz_circuit(3))
        probs = sv.probabilities(state)
        assert probs[0] == pytest.approx(0.5, abs=1e-12)
        assert probs[7] == pytest.approx(0.5, abs=1e-12)
        assert np.sum(probs) == pytest.approx(1.0, abs=1e-10)


class TestMarginalProbability:
    def test_ghz_single_qubit(self):
        state = sv.apply_circuit(sv.init_zero(2), ghz_circuit(2))
        assert sv.marginal_probability(state, (0,), (0,)) == pytest.approx(0.5)

    def test_all_zero(self):
        assert sv.marginal_probability(sv.init_zero(3), (0, 1, 2), (0, 0, 0)) == 1.0

    def test_product_of_marginals(self):
        state = sv.apply_circuit(
            sv.init_zero(2), sv.CircuitSpec(2, (sv.h(0), sv.h(1)))
        )
        assert sv.marginal_probability(state, (0, 1), (0, 1)) == pytest.approx(0.25)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            sv.marginal_probability(sv.init_zero(2), (0, 1), (0,))


class TestPostselect:
    def test_plus_state(self):
        state = sv.apply_gate(sv.init_zero(1), sv.h(0))
        collapsed, prob = sv.postselect(state, 0, 0)
        assert prob == pytest.approx(0.5)
        assert np.allclose(collapsed.amplitudes, [1, 0])

    def test_ghz_two_qubits(self):
        state = sv.apply_circuit(sv.init_zero(2), ghz_circuit(2))
        collapsed, prob = sv.postselect(state, 0, 1)
        assert prob == pytest.approx(0.5)
        # remaining qubit is |1>: collapsed joint state is |11>
        assert np.allclose(collapsed.amplitudes, [0, 0, 0, 1])
        assert sv.marginal_probability(collapsed, (1,), (1,)) == pytest.approx(1.0)

    def test_zero_probability_branch(self):
        with pytest.raises(sv.DegeneratePostselectionError):
            sv.postselect(sv.init_zero(2), 0, 1)

    def test_probability_equals_marginal(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            state = random_state(3, rng)
            q = int(rng.integers(3))
            b = int(rng.integers(2))
            expected = sv.marginal_probability(state, (q,), (b,))
            if expected < 1e-12:
                continue
            _, prob = sv.postselect(state, q, b)
            assert prob == expected


class TestSampleCounts:
    def test_deterministic_state(self):
        counts = sv.sample_counts(sv.init_zero(1), 100, seed=1)
        assert counts == {"0": 100}

    def test_plus_state_frequency(self):
        state = sv.apply_gate(sv.init_zero(1), sv.h(0))
        shots = 32000
        counts = sv.sample_counts(state, shots, seed=5)
        se = math.sqrt(0.25 / shots)
        assert abs(counts["0"] / shots - 0.5) < 3 * se

    def test_same_seed_same_counts(self):
        rng = np.random.default_rng(2)
        state = random_state(3, rng)
        assert sv.sample_counts(state, 500, seed=9) == sv.sample_counts(state, 500, seed=9)

    def test_zero_shots(self):
        with pytest.raises(ValueError):
            sv.sample_counts(sv.init_zero(1), 0, seed=0)

    def test_counts_sum_to_shots(self):
        rng = np.random.default_rng(4)
        state = random_state(3, rng)
        counts = sv.sample_counts(state, 4096, seed=3)
        assert sum(counts.values()) == 4096

    def test_large_shot_convergence(self):
        rng = np.random.default_rng(8)
        state = random_state(3, rng)
        shots = 10**6
        counts = sv.sample_counts(state, shots, seed=21)
        probs = sv.probabilities(state)
        for basis, p in enumerate(probs):
            freq = counts.get(format(basis, "03b"), 0) / shots
            se = math.sqrt(max(p * (1 - p), 1e-12) / shots)
            assert abs(freq - p) < 5 * se + 1e-9


class TestFidelityPure:
    def test_identical(self):
        rng = np.random.default_rng(6)
        state = random_state(2, rng)
        assert sv.fidelity_pure(state, state) == pytest.approx(1.0)

    def test_orthogonal(self):
        one = sv.apply_gate(sv.init_zero(1), sv.x(0))
        assert sv.fidelity_pure(sv.init_zero(1), one) == 0.0

    def test_zero_vs_plus(self):
        plus = sv.apply_gate(sv.init_zero(1), sv.h(0))
        assert sv.fidelity_pure(sv.init_zero(1), plus) == pytest.approx(0.5)

    def test_symmetric(self):
        rng = np.random.default_rng(10)
        a, b = random_state(2, rng), random_state(2, rng)
        assert sv.fidelity_pure(a, b) == pytest.approx(sv.fidelity_pure(b, a))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            sv.fidelity_pure(sv.init_zero(1), sv.init_zero(2))


class TestDenseHelpers:
    def test_controlled_gate_unitary(self):
        u = gate_unitary(sv.cnot(0, 1), 2)
        expected = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
        assert np.allclose(u, expected)

    def test_is_unitary(self):
        assert is_unitary(circuit_unitary(ghz_circuit(3)))
