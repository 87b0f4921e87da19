"""Synergic circuit construction, cost functions, metrics, and training.

Register layout for the synergic circuit: qubit 0 is the discriminator
ancilla, qubits 1..n hold the data register.  The decision branch is
emulated by evaluating the two branch circuits separately and mixing them
with a configurable branch probability (default 0.5), which is exactly
equivalent to measuring a bottom decision qubit prepared in an even
superposition.

The discriminator unitary applies its pointer rotation on the ancilla,
active on the orthogonal complement of the pointer state |phi> = U|0...0>:

    D = 1 (x) |phi><phi|  +  R_y(theta) (x) (1 - |phi><phi|)

and the branch-1 circuit conjugates a pointer-conditional X with D, so the
joint all-zeros amplitude is (1+sin 2theta)<g|phi><phi|r> - sin(2theta)<g|r>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import optim
from .ansatz import AnsatzParams, AnsatzSpec, build_unitary_block
from .statevector import (
    CircuitSpec,
    Statevector,
    apply_circuit,
    fidelity_pure,
    h,
    init_zero,
    marginal_probability,
    phase,
    ry,
    run_circuit,
    sample_counts,
    x,
)

THETA_DISCRIMINATOR = math.pi / 2
THETA_COMPARATOR = math.pi / 4

PROB_ATOL = 1e-12


class RegimeMode(Enum):
    """Ancilla rotation regimes and their probability normalizations."""

    DISCRIMINATOR = "discriminator"  # theta = pi/2, p' = p
    COMPARATOR = "comparator"        # theta = pi/4, p' = 2p - 1

    @property
    def theta(self) -> float:
        if self is RegimeMode.DISCRIMINATOR:
            return THETA_DISCRIMINATOR
        return THETA_COMPARATOR

    def normalize(self, p: float) -> float:
        if self is RegimeMode.DISCRIMINATOR:
            return p
        return 2.0 * p - 1.0


@dataclass(frozen=True)
class SourceSpec:
    """Labeled assemblage: per internal value z_R a preparation circuit with
    its probability."""

    label: str
    n_data_qubits: int
    variants: dict[int, tuple[CircuitSpec, float]]

    def __post_init__(self):
        total = sum(p for _, p in self.variants.values())
        if abs(total - 1.0) > PROB_ATOL:
            raise ValueError(f"variant probabilities sum to {total}, not 1")
        for circ, _ in self.variants.values():
            if circ.n_qubits != self.n_data_qubits:
                raise ValueError("variant circuit width != n_data_qubits")

    def state(self, z_r: int) -> Statevector:
        circ, _ = self.variants[z_r]
        return run_circuit(circ)


def _flip_circuit(n: int, z: int) -> CircuitSpec:
    """X on the data qubits spelled by the bits of ``z`` (qubit 0 = MSB)."""
    gates = [x(q) for q in range(n) if (z >> (n - 1 - q)) & 1]
    return CircuitSpec(n, tuple(gates))


def pauli_source(label: str, probs=(1.0,)) -> SourceSpec:
    """Single-qubit source emitting eigenstates of the labeled Pauli basis,
    with the internal value z selecting the eigenstate via an input flip."""
    if label not in ("x", "y", "z"):
        raise ValueError("label must be one of x, y, z")
    variants = {}
    for z_val, p in enumerate(probs):
        if p == 0.0:
            continue
        gates = list(_flip_circuit(1, z_val).gates)
        if label == "x":
            gates.append(h(0))
        elif label == "y":
            gates += [h(0), phase(math.pi / 2, 0)]
        variants[z_val] = (CircuitSpec(1, tuple(gates)), float(p))
    return SourceSpec(label, 1, variants)


def ghz_source(n: int) -> SourceSpec:
    """Maximally entangled n-qubit source, label "e"."""
    from .statevector import cnot

    gates = [h(0)] + [cnot(q, q + 1) for q in range(n - 1)]
    return SourceSpec("e", n, {0: (CircuitSpec(n, tuple(gates)), 1.0)})


def computational_pair_source() -> SourceSpec:
    """Equiprobable |0> / |1> single-qubit assemblage (label "z")."""
    return SourceSpec(
        "z",
        1,
        {
            0: (CircuitSpec(1, ()), 0.5),
            1: (CircuitSpec(1, (x(0),)), 0.5),
        },
    )


@dataclass(frozen=True)
class GeneratorModel:
    """Trainable generator: per-label ansatz parameters plus an input-flip
    distribution over the internal value z_G."""

    spec: AnsatzSpec
    params: dict[str, AnsatzParams]
    flips: dict[int, tuple[CircuitSpec | None, float]] = field(
        default_factory=lambda: {0: (None, 1.0)}
    )

    def __post_init__(self):
        total = sum(p for _, p in self.flips.values())
        if abs(total - 1.0) > PROB_ATOL:
            raise ValueError(f"flip probabilities sum to {total}, not 1")

    def circuit(self, label: str, z_g: int) -> CircuitSpec:
        flip, _ = self.flips[z_g]
        block = build_unitary_block(self.spec, self.params[label])
        if flip is None:
            return block
        return flip + block

    def state(self, label: str, z_g: int) -> Statevector:
        return run_circuit(self.circuit(label, z_g))


@dataclass(frozen=True)
class DiscriminatorModel:
    """Trainable discriminator: pointer-block parameters per label, the
    ancilla rotation angle theta, and an internal-state distribution g."""

    spec: AnsatzSpec
    params: dict[str, AnsatzParams]
    theta: float = THETA_COMPARATOR
    variants: dict[int, tuple[CircuitSpec | None, float]] = field(
        default_factory=lambda: {0: (None, 1.0)}
    )

    def __post_init__(self):
        total = sum(p for _, p in self.variants.values())
        if abs(total - 1.0) > PROB_ATOL:
            raise ValueError(f"internal-state probabilities sum to {total}, not 1")

    def with_theta(self, theta: float) -> "DiscriminatorModel":
        return DiscriminatorModel(self.spec, self.params, theta, self.variants)

    def pointer_circuit(self, label: str, z_d: int) -> CircuitSpec:
        flip, _ = self.variants[z_d]
        block = build_unitary_block(self.spec, self.params[label])
        if flip is None:
            return block
        return flip + block

    def pointer_state(self, label: str, z_d: int) -> Statevector:
        return run_circuit(self.pointer_circuit(label, z_d))


@dataclass(frozen=True)
class SqgenMetrics:
    """Per-epoch metric set.  ``j_signed`` lives in [-1, 1]; the trace files
    record the rescaled unit-interval form."""

    j_signed: float
    fidelity: float
    p: float
    q: float

    @property
    def j_unit(self) -> float:
        return 0.5 * (1.0 + self.j_signed)


def _embed_on_data(circ: CircuitSpec, n_total: int) -> CircuitSpec:
    """Shift a data-register circuit up by one qubit (ancilla is qubit 0)."""
    from dataclasses import replace

    gates = []
    for g in circ.gates:
        gates.append(
            replace(
                g,
                target=g.target + 1,
                controls=tuple(c + 1 for c in g.controls),
            )
        )
    return CircuitSpec(n_total, tuple(gates))


def discriminator_unitary(
    disc: DiscriminatorModel, label: str, z_d: int = 0
) -> CircuitSpec:
    """Circuit for D on [ancilla, data]: U-dagger on data, ancilla rotation
    active on the complement of |0...0>, U on data."""
    n_data = disc.spec.n_qubits
    n_total = n_data + 1
    pointer = disc.pointer_circuit(label, z_d)
    data = tuple(range(1, n_total))
    zeros = (0,) * n_data
    theta = disc.theta
    gates = list(_embed_on_data(pointer.inverse(), n_total).gates)
    gates.append(ry(theta, 0))
    gates.append(ry(-theta, 0, controls=data, control_states=zeros))
    gates += list(_embed_on_data(pointer, n_total).gates)
    return CircuitSpec(n_total, tuple(gates))


def _conditional_flip_stage(
    disc: DiscriminatorModel, label: str, z_d: int
) -> CircuitSpec:
    """X on the ancilla, active on the data-register complement of the
    pointer state (the decision-conditioned flip between D and D-dagger)."""
    n_data = disc.spec.n_qubits
    n_total = n_data + 1
    pointer = disc.pointer_circuit(label, z_d)
    data = tuple(range(1, n_total))
    zeros = (0,) * n_data
    gates = list(_embed_on_data(pointer.inverse(), n_total).gates)
    gates.append(x(0))
    gates.append(x(0, controls=data, control_states=zeros))
    gates += list(_embed_on_data(pointer, n_total).gates)
    return CircuitSpec(n_total, tuple(gates))


def build_sqgen_circuit(
    source: SourceSpec,
    gen: GeneratorModel,
    disc: DiscriminatorModel,
    label: str,
    z_r: int,
    z_g: int,
    decision_branch: int,
    z_d: int = 0,
) -> CircuitSpec:
    """Branch circuit on [ancilla, data].

    Branch 0: source preparation then inverse generator (fidelity branch).
    Branch 1: source prep, D, pointer-conditional X, D-dagger, inverse
    generator.
    """
    n_data = source.n_data_qubits
    n_total = n_data + 1
    prep, _ = source.variants[z_r]
    gates = list(_embed_on_data(prep, n_total).gates)
    if decision_branch:
        d_circ = discriminator_unitary(disc, label, z_d)
        gates += list(d_circ.gates)
        gates += list(_conditional_flip_stage(disc, label, z_d).gates)
        gates += list(d_circ.inverse().gates)
    gates += list(_embed_on_data(gen.circuit(label, z_g).inverse(), n_total).gates)
    return CircuitSpec(n_total, tuple(gates), classical_label=label)


def _all_zero_probability(circ: CircuitSpec, shots=None, seed=0) -> float:
    state = run_circuit(circ)
    if shots is None:
        return marginal_probability(
            state, tuple(range(circ.n_qubits)), (0,) * circ.n_qubits
        )
    counts = sample_counts(state, shots, seed)
    return counts.get("0" * circ.n_qubits, 0) / shots


def disc_response_p(
    state: Statevector,
    disc: DiscriminatorModel,
    regime: RegimeMode,
    label: str,
) -> float:
    """Closed-form regime-normalized response p' for one input state.

    p(alpha) = |(1 - alpha^2) cos(theta) + alpha^2|^2 with alpha^2 the
    overlap of the state with the pointer; averaged over the internal-state
    distribution.  Comparator values below 1/2 normalize to negative p',
    returned raw.
    """
    theta = regime.theta
    total = 0.0
    for z_d, (_, g_prob) in disc.variants.items():
        pointer = disc.pointer_state(label, z_d)
        alpha_sq = fidelity_pure(pointer, state)
        p = abs((1.0 - alpha_sq) * math.cos(theta) + alpha_sq) ** 2
        total += g_prob * regime.normalize(p)
    return total


def response_circuit(
    prep: CircuitSpec, disc: DiscriminatorModel, label: str, z_d: int = 0
) -> CircuitSpec:
    """Measurement circuit for p/q: prep, D, inverse prep on [ancilla, data].

    The response equals the joint probability of ancilla 0 and data |0...0>.
    """
    n_total = prep.n_qubits + 1
    gates = list(_embed_on_data(prep, n_total).gates)
    gates += list(discriminator_unitary(disc, label, z_d).gates)
    gates += list(_embed_on_data(prep.inverse(), n_total).gates)
    return CircuitSpec(n_total, tuple(gates), classical_label=label)


def _measured_response(
    prep: CircuitSpec,
    disc: DiscriminatorModel,
    regime: RegimeMode,
    label: str,
    shots=None,
    seed=0,
) -> float:
    disc = disc.with_theta(regime.theta)
    total = 0.0
    for z_d, (_, g_prob) in disc.variants.items():
        raw = _all_zero_probability(
            response_circuit(prep, disc, label, z_d), shots, seed + z_d
        )
        total += g_prob * regime.normalize(raw)
    return total


def eval_fidelity_F(
    source: SourceSpec,
    gen: GeneratorModel,
    label: str,
    z_r: int = 0,
    z_g: int = 0,
    shots=None,
    seed=0,
) -> float:
    """All-zeros probability of the branch-0 circuit (source prep then
    inverse generator); equals |<g|r>|^2 exactly in exact mode."""
    prep, _ = source.variants[z_r]
    circ = prep + gen.circuit(label, z_g).inverse()
    return _all_zero_probability(circ, shots, seed)


def mean_fidelity(
    source: SourceSpec, gen: GeneratorModel, label: str, shots=None, seed=0
) -> float:
    total = 0.0
    for z_r, (_, q_prob) in source.variants.items():
        for z_g, (_, p_prob) in gen.flips.items():
            total += q_prob * p_prob * eval_fidelity_F(
                source, gen, label, z_r, z_g, shots, seed
            )
    return total


def eval_pq(
    source: SourceSpec,
    gen: GeneratorModel,
    disc: DiscriminatorModel,
    label: str,
    shots=None,
    seed=0,
) -> tuple[float, float]:
    """(p, q): mean discriminator-regime responses on real / generated states.

    Measured at theta = pi/2 regardless of the discriminator's training
    regime angle.
    """
    regime = RegimeMode.DISCRIMINATOR
    p_val = 0.0
    for z_r, (prep, q_prob) in source.variants.items():
        if shots is None:
            p_val += q_prob * disc_response_p(
                source.state(z_r), disc.with_theta(regime.theta), regime, label
            )
        else:
            p_val += q_prob * _measured_response(prep, disc, regime, label, shots, seed)
    q_val = 0.0
    for z_g, (_, p_prob) in gen.flips.items():
        if shots is None:
            q_val += p_prob * disc_response_p(
                gen.state(label, z_g), disc.with_theta(regime.theta), regime, label
            )
        else:
            q_val += p_prob * _measured_response(
                gen.circuit(label, z_g), disc, regime, label, shots, seed + 1
            )
    return p_val, q_val


def eval_cost_J(
    source: SourceSpec,
    gen: GeneratorModel,
    disc: DiscriminatorModel,
    label: str,
    shots=None,
    seed=0,
    branch1_weight: float = 0.5,
) -> float:
    """Signed synergic cost in [-1, 1].

    1 - 2 * sum over (z_G, z_R, z_D) of p*q*g times the branch-mixed joint
    all-zeros probability.  ``branch1_weight`` is the decision-branch
    probability of including the discriminator sandwich; 1.0 evaluates the
    pure branch-1 form.
    """
    if shots is not None and shots < 1:
        raise ValueError("shots must be >= 1")
    if not 0.0 <= branch1_weight <= 1.0:
        raise ValueError("branch1_weight must lie in [0, 1]")
    total = 0.0
    sub = 0
    for z_g, (_, p_prob) in gen.flips.items():
        for z_r, (_, q_prob) in source.variants.items():
            weight = p_prob * q_prob
            mixed = 0.0
            if branch1_weight < 1.0:
                circ0 = build_sqgen_circuit(source, gen, disc, label, z_r, z_g, 0)
                mixed += (1.0 - branch1_weight) * _all_zero_probability(
                    circ0, shots, seed + sub
                )
                sub += 1
            if branch1_weight > 0.0:
                branch1 = 0.0
                for z_d, (_, g_prob) in disc.variants.items():
                    circ1 = build_sqgen_circuit(
                        source, gen, disc, label, z_r, z_g, 1, z_d
                    )
                    branch1 += g_prob * _all_zero_probability(circ1, shots, seed + sub)
                    sub += 1
                mixed += branch1_weight * branch1
            total += weight * mixed
    return 1.0 - 2.0 * total


def cost_j_unit(j_signed: float) -> float:
    """Rescale the signed cost to [0, 1]."""
    return 0.5 * (1.0 + j_signed)


def discriminator_alignment_cost(
    source: SourceSpec, disc: DiscriminatorModel, label: str
) -> float:
    """The discriminator's own objective against the source assemblage:
    1 - sum q(z_R) g(z_D) (<phi_{z_D}| rho_{z_R} |phi_{z_D}>)^2."""
    total = 0.0
    for z_r, (_, q_prob) in source.variants.items():
        state = source.state(z_r)
        for z_d, (_, g_prob) in disc.variants.items():
            alpha_sq = fidelity_pure(disc.pointer_state(label, z_d), state)
            total += q_prob * g_prob * alpha_sq**2
    return 1.0 - total


def eval_cost_j_factored(
    source: SourceSpec,
    gen: GeneratorModel,
    disc: DiscriminatorModel,
    label: str,
) -> float:
    """Signed closed-form cost in its factored (response x overlap) form:

    1 - 2 * sum p*q*g * (<phi_{z_D}|sigma_{z_G}|phi_{z_D}>)^2
                      * Tr(sigma_{z_G} rho_{z_R}).

    This is the analytic oracle used for assemblage comparisons; it agrees
    with the circuit cost at the trained point sigma = rho but differs away
    from it.
    """
    total = 0.0
    for z_g, (_, p_prob) in gen.flips.items():
        gen_state = gen.state(label, z_g)
        for z_d, (_, g_prob) in disc.variants.items():
            response = fidelity_pure(disc.pointer_state(label, z_d), gen_state) ** 2
            for z_r, (_, q_prob) in source.variants.items():
                overlap = fidelity_pure(gen_state, source.state(z_r))
                total += p_prob * q_prob * g_prob * response * overlap
    return 1.0 - 2.0 * total


def eval_cost_j_generator_only(
    source: SourceSpec, gen: GeneratorModel, label: str
) -> float:
    """Mean-overlap generator cost 1 - Tr(sigma_bar rho_bar) in [0, 1]."""
    dim = 1 << source.n_data_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    for z_r, (_, q_prob) in source.variants.items():
        amps = source.state(z_r).amplitudes
        rho += q_prob * np.outer(amps, amps.conj())
    sigma = np.zeros_like(rho)
    for z_g, (_, p_prob) in gen.flips.items():
        amps = gen.state(label, z_g).amplitudes
        sigma += p_prob * np.outer(amps, amps.conj())
    return 1.0 - float(np.real(np.trace(sigma @ rho)))


@dataclass
class SqgenProblem:
    """Joint parameter-vector view of a (source, generator, discriminator)
    training instance: a single concatenated vector covers the generator and
    discriminator banks of every label."""

    source: SourceSpec
    labels: tuple[str, ...]
    spec: AnsatzSpec
    theta: float = THETA_COMPARATOR
    branch1_weight: float = 0.5
    gen_flips: dict | None = None

    def __post_init__(self):
        self.block_size = self.spec.param_count
        self.arity = 2 * len(self.labels) * self.block_size

    def split(self, vector) -> tuple[GeneratorModel, DiscriminatorModel]:
        vector = np.asarray(vector, dtype=float)
        if vector.size != self.arity:
            raise ValueError(f"expected {self.arity} parameters")
        gen_params, disc_params = {}, {}
        pos = 0
        for label in self.labels:
            gen_params[label] = AnsatzParams(tuple(vector[pos : pos + self.block_size]))
            pos += self.block_size
        for label in self.labels:
            disc_params[label] = AnsatzParams(tuple(vector[pos : pos + self.block_size]))
            pos += self.block_size
        flips = self.gen_flips or {0: (None, 1.0)}
        gen = GeneratorModel(self.spec, gen_params, flips)
        disc = DiscriminatorModel(self.spec, disc_params, self.theta)
        return gen, disc

    def join(self, gen: GeneratorModel, disc: DiscriminatorModel) -> np.ndarray:
        chunks = [gen.params[label].angles for label in self.labels]
        chunks += [disc.params[label].angles for label in self.labels]
        return np.concatenate([np.asarray(c) for c in chunks])

    def cost(self, vector, shots=None, seed=0) -> float:
        gen, disc = self.split(vector)
        values = [
            eval_cost_J(
                self.source,
                gen,
                disc,
                label,
                shots=shots,
                seed=seed,
                branch1_weight=self.branch1_weight,
            )
            for label in self.labels
        ]
        return float(np.mean(values))

    def metrics(self, vector) -> SqgenMetrics:
        gen, disc = self.split(vector)
        j_vals, f_vals, p_vals, q_vals = [], [], [], []
        for label in self.labels:
            j_vals.append(
                eval_cost_J(
                    self.source, gen, disc, label, branch1_weight=self.branch1_weight
                )
            )
            f_vals.append(mean_fidelity(self.source, gen, label))
            p, q = eval_pq(self.source, gen, disc, label)
            p_vals.append(p)
            q_vals.append(q)
        return SqgenMetrics(
            j_signed=float(np.mean(j_vals)),
            fidelity=float(np.mean(f_vals)),
            p=float(np.mean(p_vals)),
            q=float(np.mean(q_vals)),
        )

    def random_start(self, rng) -> np.ndarray:
        return rng.uniform(-math.pi / 2, math.pi / 2, self.arity)


@dataclass
class EpochRecord:
    epoch: int
    metrics: SqgenMetrics
    evaluations: int
    wall_s: float


def train_sqgen(
    problem: SqgenProblem,
    *,
    optimizer: str = "nelder-mead",
    epochs: int = 15,
    iters_per_epoch: int | None = None,
    shots: int | None = None,
    seed: int = 0,
    simplex_step: float = 0.5,
    tol: float = 1e-10,
    epoch_callback=None,
):
    """Jointly optimize generator and discriminator against the synergic
    cost; returns (records, report, final_vector).

    One epoch is ``iters_per_epoch`` optimizer iterations (default 5 for
    Nelder-Mead, 1 for BFGS); metric evaluations at epoch boundaries do not
    touch the optimizer's evaluation counter.
    """
    import time as _time

    rng = np.random.default_rng(seed)
    x0 = problem.random_start(rng)
    if iters_per_epoch is None:
        iters_per_epoch = 5 if optimizer == "nelder-mead" else 1

    eval_state = {"n": 0}

    def cost(vector):
        value = problem.cost(vector, shots=shots, seed=seed * 100003 + eval_state["n"])
        eval_state["n"] += 1
        return value

    if optimizer == "nelder-mead":
        solver = optim.NelderMead(cost, x0, simplex_step=simplex_step, tol=tol)
    elif optimizer == "bfgs":
        def grad(vector):
            return optim.parameter_shift_gradient(lambda v: problem.cost(v, shots=shots, seed=seed), vector)

        solver = optim.Bfgs(cost, grad, x0, tol=tol)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")

    records: list[EpochRecord] = []
    for epoch in range(1, epochs + 1):
        t0 = _time.perf_counter()
        solver.run(iters_per_epoch)
        wall = _time.perf_counter() - t0
        best = solver.best_params if hasattr(solver, "best_params") else solver.x
        metrics = problem.metrics(np.asarray(best))
        records.append(
            EpochRecord(
                epoch=epoch,
                metrics=metrics,
                evaluations=solver.f.evaluation_count,
                wall_s=wall,
            )
        )
        if epoch_callback is not None:
            epoch_callback(epoch, np.asarray(best))
        if getattr(solver, "converged", False):
            break
    report = solver.report()
    return records, report, report.best_params
