"""Adversarial baseline: evaluation circuits and round-based training.

Three circuits are used per evaluation suite: discriminator-on-real
(measures p), discriminator-on-fake (measures q), and the fidelity
comparison (measures F).  Each training epoch runs a discriminator phase
(maximize |p - q| + eta * p over discriminator parameters) followed by a
generator phase (minimize 1 - F over generator parameters); the two phases
never touch each other's parameters.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import optim
from .ansatz import AnsatzParams, AnsatzSpec
from .sqgen import (
    DiscriminatorModel,
    GeneratorModel,
    RegimeMode,
    SourceSpec,
    disc_response_p,
    eval_fidelity_F,
    mean_fidelity,
    response_circuit,
)
from .statevector import CircuitSpec


@dataclass(frozen=True)
class QganHyperparams:
    disc_iters_per_epoch: int = 1
    gen_iters_per_epoch: int = 1
    eta: float = 0.0
    optimizer: str = "bfgs"

    def __post_init__(self):
        if self.disc_iters_per_epoch < 1 or self.gen_iters_per_epoch < 1:
            raise ValueError("iteration counts must be >= 1")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")


def build_qgan_disc_real(
    source: SourceSpec, disc: DiscriminatorModel, label: str, z_r: int
) -> CircuitSpec:
    """p-circuit: source prep, D at theta = pi/2, inverse source prep."""
    prep, _ = source.variants[z_r]
    return response_circuit(prep, disc.with_theta(math.pi / 2), label)


def build_qgan_disc_fake(
    gen: GeneratorModel, disc: DiscriminatorModel, label: str, z_g: int
) -> CircuitSpec:
    """q-circuit: generator prep, D at theta = pi/2, inverse generator prep."""
    return response_circuit(gen.circuit(label, z_g), disc.with_theta(math.pi / 2), label)


def build_qgan_fidelity(
    source: SourceSpec, gen: GeneratorModel, label: str, z_r: int, z_g: int
) -> CircuitSpec:
    """F-circuit on the data register only: source prep then inverse generator."""
    prep, _ = source.variants[z_r]
    return prep + gen.circuit(label, z_g).inverse()


def register_audit(n_data_qubits: int) -> dict[str, dict[str, int]]:
    """Register layouts and totals for each method at a given data width.

    The adversarial suite instantiates all three evaluation circuits (two
    source/generator registers with ancillas plus the comparison register);
    the synergic circuit reuses one data register with one ancilla, plus a
    decision qubit when the fidelity branch is monitored in-circuit.
    """
    n = n_data_qubits
    sqgen = {"discriminator_ancilla": 1, "data": n}
    sqgen_f = dict(sqgen, decision=1)
    qgan = {
        "p_circuit_ancilla": 1,
        "p_circuit_data": n,
        "q_circuit_ancilla": 1,
        "q_circuit_data": n,
        "fidelity_data": n,
    }
    swap = {
        "data": n,
        "copy": n,
        "discriminator_ancilla": 1,
        "swap_ancilla": 1,
        "decision": 1,
        "fidelity_ancilla": 1,
    }
    audit = {
        "sqgen": sqgen,
        "sqgen_with_fidelity_monitor": sqgen_f,
        "qgan_suite": qgan,
        "sqgen_swap_variant": swap,
    }
    return {
        name: dict(regs, total=sum(regs.values())) for name, regs in audit.items()
    }


@dataclass
class QganProblem:
    """Separate generator/discriminator parameter vectors over the labels."""

    source: SourceSpec
    labels: tuple[str, ...]
    spec: AnsatzSpec
    eta: float = 0.0
    gen_flips: dict | None = None

    def __post_init__(self):
        self.block_size = self.spec.param_count
        self.bank = len(self.labels) * self.block_size

    def _bank_params(self, vector) -> dict[str, AnsatzParams]:
        vector = np.asarray(vector, dtype=float)
        if vector.size != self.bank:
            raise ValueError(f"expected {self.bank} parameters")
        out = {}
        for i, label in enumerate(self.labels):
            out[label] = AnsatzParams(
                tuple(vector[i * self.block_size : (i + 1) * self.block_size])
            )
        return out

    def generator(self, gen_vector) -> GeneratorModel:
        flips = self.gen_flips or {0: (None, 1.0)}
        return GeneratorModel(self.spec, self._bank_params(gen_vector), flips)

    def discriminator(self, disc_vector) -> DiscriminatorModel:
        return DiscriminatorModel(
            self.spec, self._bank_params(disc_vector), math.pi / 2
        )

    def pq(self, gen_vector, disc_vector) -> tuple[float, float]:
        gen = self.generator(gen_vector)
        disc = self.discriminator(disc_vector)
        regime = RegimeMode.DISCRIMINATOR
        p_vals, q_vals = [], []
        for label in self.labels:
            p = sum(
                q_prob * disc_response_p(self.source.state(z_r), disc, regime, label)
                for z_r, (_, q_prob) in self.source.variants.items()
            )
            q = sum(
                p_prob * disc_response_p(gen.state(label, z_g), disc, regime, label)
                for z_g, (_, p_prob) in gen.flips.items()
            )
            p_vals.append(p)
            q_vals.append(q)
        return float(np.mean(p_vals)), float(np.mean(q_vals))

    def fidelity(self, gen_vector) -> float:
        gen = self.generator(gen_vector)
        return float(
            np.mean([mean_fidelity(self.source, gen, label) for label in self.labels])
        )

    def disc_objective(self, gen_vector, disc_vector) -> float:
        """Minimized by the discriminator phase: -(|p - q| + eta * p)."""
        p, q = self.pq(gen_vector, disc_vector)
        return -(abs(p - q) + self.eta * p)

    def disc_gradient(self, gen_vector, disc_vector) -> np.ndarray:
        p, q = self.pq(gen_vector, disc_vector)
        sign = 1.0 if p >= q else -1.0
        grad_p = optim.parameter_shift_gradient(
            lambda v: self.pq(gen_vector, v)[0], disc_vector
        )
        grad_q = optim.parameter_shift_gradient(
            lambda v: self.pq(gen_vector, v)[1], disc_vector
        )
        return -(sign * (grad_p - grad_q) + self.eta * grad_p)

    def gen_objective(self, gen_vector) -> float:
        """Minimized by the generator phase: 1 - F."""
        return 1.0 - self.fidelity(gen_vector)

    def gen_gradient(self, gen_vector) -> np.ndarray:
        return optim.parameter_shift_gradient(self.gen_objective, gen_vector)

    def random_start(self, rng) -> np.ndarray:
        return rng.uniform(-math.pi / 2, math.pi / 2, self.bank)


@dataclass
class QganEpochRecord:
    epoch: int
    p: float
    q: float
    fidelity: float
    disc_evaluations: int
    gen_evaluations: int
    wall_s: float


@dataclass
class QganTrainResult:
    records: list[QganEpochRecord]
    gen_params: np.ndarray
    disc_params: np.ndarray
    converged: bool
    phase_history: list[tuple[str, np.ndarray, np.ndarray]] = field(
        default_factory=list
    )


def train_qgan(
    problem: QganProblem,
    hyper: QganHyperparams = QganHyperparams(),
    *,
    epochs: int = 20,
    seed: int = 0,
    record_params: bool = False,
) -> QganTrainResult:
    """Alternating-round training.

    Curvature estimates persist within one phase (its iterations) and reset
    between phases, since each phase optimizes against the other network's
    newly moved parameters.
    """
    if hyper.optimizer != "bfgs":
        raise ValueError("round-based training supports the bfgs optimizer")
    rng = np.random.default_rng(seed)
    gen_vec = problem.random_start(rng)
    disc_vec = problem.random_start(rng)
    records: list[QganEpochRecord] = []
    history: list[tuple[str, np.ndarray, np.ndarray]] = []
    disc_evals = 0
    gen_evals = 0
    for epoch in range(1, epochs + 1):
        t0 = time.perf_counter()
        frozen_gen = gen_vec.copy()
        disc_solver = optim.Bfgs(
            lambda v: problem.disc_objective(frozen_gen, v),
            lambda v: problem.disc_gradient(frozen_gen, v),
            disc_vec,
        )
        disc_solver.run(hyper.disc_iters_per_epoch)
        disc_vec = disc_solver.x.copy()
        disc_evals += disc_solver.f.evaluation_count
        if record_params:
            history.append(("disc", gen_vec.copy(), disc_vec.copy()))

        gen_solver = optim.Bfgs(
            problem.gen_objective, problem.gen_gradient, gen_vec
        )
        gen_solver.run(hyper.gen_iters_per_epoch)
        gen_vec = gen_solver.x.copy()
        gen_evals += gen_solver.f.evaluation_count
        if record_params:
            history.append(("gen", gen_vec.copy(), disc_vec.copy()))

        wall = time.perf_counter() - t0
        p, q = problem.pq(gen_vec, disc_vec)
        records.append(
            QganEpochRecord(
                epoch=epoch,
                p=p,
                q=q,
                fidelity=problem.fidelity(gen_vec),
                disc_evaluations=disc_evals,
                gen_evaluations=gen_evals,
                wall_s=wall,
            )
        )
    converged = records[-1].fidelity > 0.99 if records else False
    return QganTrainResult(records, gen_vec, disc_vec, converged, history)
