"""Adversarial baseline circuits, register audit, and round training."""

import math

import numpy as np
import pytest

from sqgenlab import qgan
from sqgenlab import sqgen as sq
from sqgenlab import statevector as sv
from sqgenlab.ansatz import AnsatzParams, AnsatzSpec, single_qubit_block_params

H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def pointer_unitary(target):
    a, b = target
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]], dtype=complex)


def joint_zero(circ):
    state = sv.run_circuit(circ)
    return sv.marginal_probability(
        state, tuple(range(circ.n_qubits)), (0,) * circ.n_qubits
    )


def make_disc(u, theta=math.pi / 2):
    params = single_qubit_block_params(u, AnsatzSpec(1))
    return sq.DiscriminatorModel(AnsatzSpec(1), {"x": params}, theta)


def make_gen(u):
    params = single_qubit_block_params(u, AnsatzSpec(1))
    return sq.GeneratorModel(AnsatzSpec(1), {"x": params})


class TestDiscRealCircuit:
    def test_optimal_discriminator(self):
        src = sq.pauli_source("x")
        disc = make_disc(H_MATRIX)
        circ = qgan.build_qgan_disc_real(src, disc, "x", 0)
        assert joint_zero(circ) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_pointer(self):
        src = sq.pauli_source("x")
        minus = np.array([1, -1]) / math.sqrt(2)
        disc = make_disc(pointer_unitary(minus))
        circ = qgan.build_qgan_disc_real(src, disc, "x", 0)
        assert joint_zero(circ) == pytest.approx(0.0, abs=1e-12)

    def test_random_matches_closed_form(self):
        rng = np.random.default_rng(14)
        src = sq.pauli_source("x")
        for _ in range(20):
            vec = rng.normal(size=2) + 1j * rng.normal(size=2)
            vec /= np.linalg.norm(vec)
            disc = make_disc(pointer_unitary(vec))
            expected = sq.disc_response_p(
                src.state(0), disc, sq.RegimeMode.DISCRIMINATOR, "x"
            )
            circ = qgan.build_qgan_disc_real(src, disc, "x", 0)
            assert joint_zero(circ) == pytest.approx(expected, abs=1e-9)


class TestDiscFakeCircuit:
    def test_generator_equals_source(self):
        gen = make_gen(H_MATRIX)
        disc = make_disc(H_MATRIX)
        circ = qgan.build_qgan_disc_fake(gen, disc, "x", 0)
        assert joint_zero(circ) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_generator(self):
        minus = np.array([1, -1]) / math.sqrt(2)
        gen = make_gen(pointer_unitary(minus))
        disc = make_disc(H_MATRIX)
        circ = qgan.build_qgan_disc_fake(gen, disc, "x", 0)
        assert joint_zero(circ) == pytest.approx(0.0, abs=1e-12)

    def test_random_matches_closed_form(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            g_vec = rng.normal(size=2) + 1j * rng.normal(size=2)
            g_vec /= np.linalg.norm(g_vec)
            d_vec = rng.normal(size=2) + 1j * rng.normal(size=2)
            d_vec /= np.linalg.norm(d_vec)
            gen = make_gen(pointer_unitary(g_vec))
            disc = make_disc(pointer_unitary(d_vec))
            expected = sq.disc_response_p(
                gen.state("x", 0), disc, sq.RegimeMode.DISCRIMINATOR, "x"
            )
            circ = qgan.build_qgan_disc_fake(gen, disc, "x", 0)
            assert joint_zero(circ) == pytest.approx(expected, abs=1e-9)


class TestFidelityCircuit:
    def test_equal(self):
        src = sq.pauli_source("x")
        gen = make_gen(H_MATRIX)
        circ = qgan.build_qgan_fidelity(src, gen, "x", 0, 0)
        assert joint_zero(circ) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal(self):
        src = sq.pauli_source("x")
        minus = np.array([1, -1]) / math.sqrt(2)
        gen = make_gen(pointer_unitary(minus))
        circ = qgan.build_qgan_fidelity(src, gen, "x", 0, 0)
        assert joint_zero(circ) == pytest.approx(0.0, abs=1e-12)

    def test_ghz_vs_identity_generator(self):
        src = sq.ghz_source(2)
        spec = AnsatzSpec(2)
        gen = sq.GeneratorModel(spec, {"e": AnsatzParams((0.0,) * spec.param_count)})
        circ = qgan.build_qgan_fidelity(src, gen, "e", 0, 0)
        # |<00|GHZ>|^2 computed by amplitude arithmetic
        assert joint_zero(circ) == pytest.approx(0.5, abs=1e-12)


class TestRegisterAudit:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_totals(self, n):
        audit = qgan.register_audit(n)
        assert audit["sqgen"]["total"] == n + 1
        assert audit["sqgen_with_fidelity_monitor"]["total"] == n + 2
        assert audit["qgan_suite"]["total"] == 3 * n + 2
        assert audit["sqgen_swap_variant"]["total"] == 2 * n + 4


class TestTrainQgan:
    def test_ghz2_best_of_seeds(self):
        src = sq.ghz_source(2)
        problem = qgan.QganProblem(src, ("e",), AnsatzSpec(2))
        best = 0.0
        for seed in range(5):
            result = qgan.train_qgan(problem, epochs=20, seed=seed)
            best = max(best, result.records[-1].fidelity)
            if best >= 0.99:
                break
        assert best >= 0.99

    def test_pq_approach_each_other(self):
        src = sq.pauli_source("x")
        problem = qgan.QganProblem(src, ("x",), AnsatzSpec(1))
        result = qgan.train_qgan(problem, epochs=20, seed=1)
        gaps = [abs(r.p - r.q) for r in result.records]
        assert np.mean(gaps[-5:]) <= np.mean(gaps[:5]) + 1e-9

    def test_phases_freeze_other_network(self):
        src = sq.pauli_source("x")
        problem = qgan.QganProblem(src, ("x",), AnsatzSpec(1))
        result = qgan.train_qgan(problem, epochs=3, seed=0, record_params=True)
        prev_gen, prev_disc = None, None
        for phase, gen_vec, disc_vec in result.phase_history:
            if prev_gen is not None:
                if phase == "disc":
                    assert np.array_equal(gen_vec, prev_gen)
                else:
                    assert np.array_equal(disc_vec, prev_disc)
            prev_gen, prev_disc = gen_vec, disc_vec

    def test_eta_term_changes_disc_objective(self):
        src = sq.pauli_source("x")
        plain = qgan.QganProblem(src, ("x",), AnsatzSpec(1), eta=0.0)
        tilted = qgan.QganProblem(src, ("x",), AnsatzSpec(1), eta=0.5)
        rng = np.random.default_rng(2)
        gen_vec = plain.random_start(rng)
        disc_vec = plain.random_start(rng)
        p, q = plain.pq(gen_vec, disc_vec)
        assert tilted.disc_objective(gen_vec, disc_vec) == pytest.approx(
            plain.disc_objective(gen_vec, disc_vec) - 0.5 * p
        )

    def test_hyperparams_validation(self):
        with pytest.raises(ValueError):
            qgan.QganHyperparams(disc_iters_per_epoch=0)
        with pytest.raises(ValueError):
            qgan.QganHyperparams(eta=-1.0)
