"""Estimator-style front ends for the two training methods.

Both learners follow the scikit-learn protocol (``get_params`` /
``set_params`` / ``fit`` / ``score``) so they compose with ``clone``,
pipelines, and parameter sweeps.  ``fit`` consumes a
:class:`~sqgenlab.sqgen.SourceSpec`; the fitted generator, discriminator,
and per-epoch history hang off trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .ansatz import AnsatzSpec
from .qgan import QganHyperparams, QganProblem, train_qgan
from .sqgen import (
    THETA_COMPARATOR,
    RegimeMode,
    SourceSpec,
    SqgenProblem,
    disc_response_p,
    mean_fidelity,
    train_sqgen,
)
from .statevector import Statevector


def _check_source(source) -> SourceSpec:
    if not isinstance(source, SourceSpec):
        raise TypeError("expected a SourceSpec")
    return source


class SqgenLearner(BaseEstimator):
    """Fits a generator and discriminator jointly against the synergic cost.

    Parameters mirror the experiment configuration: optimizer name, epoch
    budget, iterations per epoch (defaults: 5 for nelder-mead, 1 for bfgs),
    shot count (None = exact amplitudes), branch-1 weight of the decision
    mix, and the training regime angle theta.
    """

    def __init__(
        self,
        optimizer: str = "nelder-mead",
        epochs: int = 15,
        iters_per_epoch: int | None = None,
        shots: int | None = None,
        seed: int = 0,
        simplex_step: float = 0.5,
        theta: float = THETA_COMPARATOR,
        branch1_weight: float = 0.5,
    ):
        self.optimizer = optimizer
        self.epochs = epochs
        self.iters_per_epoch = iters_per_epoch
        self.shots = shots
        self.seed = seed
        self.simplex_step = simplex_step
        self.theta = theta
        self.branch1_weight = branch1_weight

    def fit(self, X, y=None):
        source = _check_source(X)
        labels = (source.label,)
        spec = AnsatzSpec(source.n_data_qubits)
        problem = SqgenProblem(
            source,
            labels,
            spec,
            theta=self.theta,
            branch1_weight=self.branch1_weight,
        )
        records, report, best = train_sqgen(
            problem,
            optimizer=self.optimizer,
            epochs=self.epochs,
            iters_per_epoch=self.iters_per_epoch,
            shots=self.shots,
            seed=self.seed,
            simplex_step=self.simplex_step,
        )
        self.problem_ = problem
        self.history_ = records
        self.report_ = report
        self.generator_, self.discriminator_ = problem.split(best)
        self.converged_ = report.converged
        return self

    def _require_fitted(self):
        if not hasattr(self, "generator_"):
            raise NotFittedError("call fit first")

    def generate(self, z_g: int = 0) -> Statevector:
        """Output state of the fitted generator."""
        self._require_fitted()
        return self.generator_.state(self.problem_.labels[0], z_g)

    def discriminate(self, state: Statevector) -> float:
        """Regime-normalized probability of the state being tagged real,
        measured in the discriminator regime."""
        self._require_fitted()
        disc = self.discriminator_.with_theta(RegimeMode.DISCRIMINATOR.theta)
        return disc_response_p(
            state, disc, RegimeMode.DISCRIMINATOR, self.problem_.labels[0]
        )

    def score(self, X=None, y=None) -> float:
        """Mean fidelity between the fitted generator and the source."""
        self._require_fitted()
        source = self.problem_.source if X is None else _check_source(X)
        return mean_fidelity(source, self.generator_, self.problem_.labels[0])


class QganLearner(BaseEstimator):
    """Round-based adversarial trainer with the same estimator surface."""

    def __init__(
        self,
        epochs: int = 20,
        disc_iters_per_epoch: int = 1,
        gen_iters_per_epoch: int = 1,
        eta: float = 0.0,
        seed: int = 0,
    ):
        self.epochs = epochs
        self.disc_iters_per_epoch = disc_iters_per_epoch
        self.gen_iters_per_epoch = gen_iters_per_epoch
        self.eta = eta
        self.seed = seed

    def fit(self, X, y=None):
        source = _check_source(X)
        problem = QganProblem(
            source, (source.label,), AnsatzSpec(source.n_data_qubits), eta=self.eta
        )
        hyper = QganHyperparams(
            disc_iters_per_epoch=self.disc_iters_per_epoch,
            gen_iters_per_epoch=self.gen_iters_per_epoch,
            eta=self.eta,
        )
        result = train_qgan(problem, hyper, epochs=self.epochs, seed=self.seed)
        self.problem_ = problem
        self.history_ = result.records
        self.generator_ = problem.generator(result.gen_params)
        self.discriminator_ = problem.discriminator(result.disc_params)
        self.converged_ = result.converged
        return self

    def _require_fitted(self):
        if not hasattr(self, "generator_"):
            raise NotFittedError("call fit first")

    def generate(self, z_g: int = 0) -> Statevector:
        self._require_fitted()
        return self.generator_.state(self.problem_.labels[0], z_g)

    def score(self, X=None, y=None) -> float:
        self._require_fitted()
        source = self.problem_.source if X is None else _check_source(X)
        return mean_fidelity(source, self.generator_, self.problem_.labels[0])


def estimator_config(estimator) -> dict:
    """Flat parameter echo for run metadata files."""
    params = estimator.get_params()
    return {k: params[k] for k in sorted(params)}
