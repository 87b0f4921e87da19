"""Derivative-free and quasi-Newton optimizers with evaluation accounting,
plus gradient operators for rotation-parameterized circuit costs.

Both optimizers are resumable state machines so that an "epoch" can mean
"run exactly k more iterations" while metrics are read off in between; the
curvature/simplex state survives across calls on the same instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NM_REFLECT = 1.0
NM_EXPAND = 2.0
NM_CONTRACT = 0.5
NM_SHRINK = 0.5

# Shift rules for costs built on R(t) = cos(t) I + i sin(t) P rotations.
# A parameter sitting in one rotation gives a single harmonic at 2t, for
# which [f(t + pi/4) - f(t - pi/4)] is the exact derivative.  A parameter
# entering only through a pointer projector |phi(t)><phi(t)| (the
# discriminator banks) adds a 4t harmonic; the exact rule is then the
# four-point equidistant stencil below (weights solve the {2t, 4t} system).
SHIFT = math.pi / 4
SHIFT_SCALE = 1.0
_W1 = (2.0 + math.sqrt(2.0)) / 2.0
_W2 = (math.sqrt(2.0) - 2.0) / 2.0
FOUR_TERM_RULE = (
    (math.pi / 8, _W1),
    (-math.pi / 8, -_W1),
    (3 * math.pi / 8, _W2),
    (-3 * math.pi / 8, -_W2),
)


class NumericError(ArithmeticError):
    """Raised when a cost evaluation returns a non-finite value."""


class UnsupportedParameterError(ValueError):
    """Raised when a parameter is not rotation-embedded."""


class CostHandle:
    """Callable wrapper counting evaluations (one increment per call)."""

    def __init__(self, fn, arity: int):
        self._fn = fn
        self.arity = arity
        self.evaluation_count = 0

    def evaluate(self, params) -> float:
        self.evaluation_count += 1
        value = float(self._fn(np.asarray(params, dtype=float)))
        if not math.isfinite(value):
            raise NumericError(f"cost returned non-finite value {value}")
        return value

    __call__ = evaluate


def as_cost_handle(f, arity: int) -> CostHandle:
    return f if isinstance(f, CostHandle) else CostHandle(f, arity)


@dataclass
class OptimizerReport:
    best_params: np.ndarray
    best_value: float
    iterations: int
    evaluations: int
    converged: bool


class NelderMead:
    """Simplex minimizer with the standard (1, 2, 0.5, 0.5) coefficients.

    Deterministic: identical inputs produce identical iterates.  Termination
    is by value spread across the simplex or by the iteration budget.
    """

    def __init__(self, f, x0, simplex_step: float = 0.5, tol: float = 1e-9):
        if simplex_step <= 0:
            raise ValueError("simplex_step must be positive")
        x0 = np.asarray(x0, dtype=float)
        self.f = as_cost_handle(f, x0.size)
        self.tol = tol
        self.iterations = 0
        n = x0.size
        self.simplex = [x0.copy()]
        for i in range(n):
            vertex = x0.copy()
            vertex[i] += simplex_step
            self.simplex.append(vertex)
        self.values = [self.f(v) for v in self.simplex]
        self.converged = False

    def _order(self):
        order = np.argsort(self.values, kind="stable")
        self.simplex = [self.simplex[i] for i in order]
        self.values = [self.values[i] for i in order]

    def step(self):
        """One reflection/expansion/contraction/shrink iteration."""
        self._order()
        if self.spread() < self.tol:
            self.converged = True
            return
        best, worst = self.values[0], self.values[-1]
        second_worst = self.values[-2]
        centroid = np.mean(self.simplex[:-1], axis=0)
        reflected = centroid + NM_REFLECT * (centroid - self.simplex[-1])
        f_reflected = self.f(reflected)
        if best <= f_reflected < second_worst:
            self.simplex[-1], self.values[-1] = reflected, f_reflected
        elif f_reflected < best:
            expanded = centroid + NM_EXPAND * (reflected - centroid)
            f_expanded = self.f(expanded)
            if f_expanded < f_reflected:
                self.simplex[-1], self.values[-1] = expanded, f_expanded
            else:
                self.simplex[-1], self.values[-1] = reflected, f_reflected
        else:
            if f_reflected < worst:
                contracted = centroid + NM_CONTRACT * (reflected - centroid)
                f_contracted = self.f(contracted)
                accept = f_contracted <= f_reflected
            else:
                contracted = centroid - NM_CONTRACT * (centroid - self.simplex[-1])
                f_contracted = self.f(contracted)
                accept = f_contracted < worst
            if accept:
                self.simplex[-1], self.values[-1] = contracted, f_contracted
            else:
                lowest = self.simplex[0]
                for i in range(1, len(self.simplex)):
                    self.simplex[i] = lowest + NM_SHRINK * (self.simplex[i] - lowest)
                    self.values[i] = self.f(self.simplex[i])
        self.iterations += 1

    def run(self, max_iter: int):
        for _ in range(max_iter):
            if self.converged:
                break
            self.step()
        self._order()
        return self.report()

    def spread(self) -> float:
        return max(self.values) - min(self.values)

    @property
    def best_params(self) -> np.ndarray:
        i = int(np.argmin(self.values))
        return self.simplex[i].copy()

    @property
    def best_value(self) -> float:
        return min(self.values)

    def report(self) -> OptimizerReport:
        return OptimizerReport(
            best_params=self.best_params,
            best_value=self.best_value,
            iterations=self.iterations,
            evaluations=self.f.evaluation_count,
            converged=self.converged,
        )


def nelder_mead(
    f, x0, simplex_step: float = 0.5, max_iter: int = 400, tol: float = 1e-9
) -> OptimizerReport:
    solver = NelderMead(f, x0, simplex_step=simplex_step, tol=tol)
    return solver.run(max_iter)


class Bfgs:
    """Quasi-Newton minimizer with backtracking (Armijo) line search.

    ``run(k)`` performs exactly k iterations and may be called repeatedly;
    the inverse-Hessian approximation persists across calls.
    """

    def __init__(self, f, grad, x0, tol: float = 1e-8):
        x0 = np.asarray(x0, dtype=float)
        self.f = as_cost_handle(f, x0.size)
        self.grad = grad
        self.tol = tol
        self.x = x0.copy()
        self.fx = self.f(self.x)
        self.g = np.asarray(grad(self.x), dtype=float)
        self.h_inv = np.eye(x0.size)
        self.iterations = 0
        self.converged = False
        self.line_search_failed = False

    def step(self):
        if np.linalg.norm(self.g) < self.tol:
            self.converged = True
            return
        direction = -self.h_inv @ self.g
        slope = float(self.g @ direction)
        if slope >= 0:  # stale curvature; restart from steepest descent
            self.h_inv = np.eye(self.x.size)
            direction = -self.g
            slope = float(self.g @ direction)
        alpha, accepted = 1.0, False
        for _ in range(40):
            candidate = self.x + alpha * direction
            f_candidate = self.f(candidate)
            if f_candidate <= self.fx + 1e-4 * alpha * slope:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            self.line_search_failed = True
            return
        g_new = np.asarray(self.grad(candidate), dtype=float)
        s = candidate - self.x
        y_vec = g_new - self.g
        sy = float(s @ y_vec)
        if sy > 1e-12:
            rho = 1.0 / sy
            eye = np.eye(self.x.size)
            left = eye - rho * np.outer(s, y_vec)
            self.h_inv = left @ self.h_inv @ left.T + rho * np.outer(s, s)
        self.x, self.fx, self.g = candidate, f_candidate, g_new
        self.iterations += 1
        if np.linalg.norm(self.g) < self.tol:
            self.converged = True

    def run(self, max_iter: int) -> OptimizerReport:
        for _ in range(max_iter):
            if self.converged or self.line_search_failed:
                break
            self.step()
        return self.report()

    def report(self) -> OptimizerReport:
        return OptimizerReport(
            best_params=self.x.copy(),
            best_value=self.fx,
            iterations=self.iterations,
            evaluations=self.f.evaluation_count,
            converged=self.converged,
        )


def bfgs(f, grad, x0, max_iter: int = 200, tol: float = 1e-8) -> OptimizerReport:
    solver = Bfgs(f, grad, x0, tol=tol)
    return solver.run(max_iter)


def finite_difference_gradient(f, x, eps: float = 1e-6) -> np.ndarray:
    """Central differences, component-wise."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        up, down = x.copy(), x.copy()
        up[i] += eps
        down[i] -= eps
        grad[i] = (float(f(up)) - float(f(down))) / (2 * eps)
    if not np.all(np.isfinite(grad)):
        raise NumericError("finite-difference gradient is non-finite")
    return grad


def check_rotation_embedded(f, x, index: int, harmonics: int = 2, atol: float = 1e-7) -> bool:
    """True when f restricted to coordinate ``index`` is a trig polynomial
    with harmonics at 2t..2*harmonics*t, as the shift rules require."""
    x = np.asarray(x, dtype=float)
    ts = x[index] + np.linspace(0.0, math.pi, 4 * harmonics + 5, endpoint=False)
    samples = []
    for t in ts:
        probe = x.copy()
        probe[index] = t
        samples.append(float(f(probe)))
    columns = [np.ones_like(ts)]
    for k in range(1, harmonics + 1):
        columns += [np.cos(2 * k * ts), np.sin(2 * k * ts)]
    design = np.column_stack(columns)
    coeffs, *_ = np.linalg.lstsq(design, np.asarray(samples), rcond=None)
    residual = np.max(np.abs(design @ coeffs - samples))
    scale = 1.0 + np.max(np.abs(samples))
    return residual <= atol * scale


def parameter_shift_gradient(f, x, harmonics: int = 2, validate: bool = False) -> np.ndarray:
    """Shift-rule gradient, exact for rotation-embedded parameters.

    ``harmonics=1`` is the classic two-point rule (parameters sitting in one
    rotation); the default ``harmonics=2`` adds the pointer-projector
    harmonic and remains exact for single-harmonic parameters.  With
    ``validate=True`` each coordinate is first checked for the trig
    structure and an :class:`UnsupportedParameterError` raised where it
    fails (e.g. parameters entering polynomially).
    """
    if harmonics not in (1, 2):
        raise ValueError("harmonics must be 1 or 2")
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    if harmonics == 1:
        rule = ((SHIFT, SHIFT_SCALE), (-SHIFT, -SHIFT_SCALE))
    else:
        rule = FOUR_TERM_RULE
    for i in range(x.size):
        if validate and not check_rotation_embedded(f, x, i, harmonics):
            raise UnsupportedParameterError(
                f"parameter {i} is not rotation-embedded"
            )
        acc = 0.0
        for shift, weight in rule:
            probe = x.copy()
            probe[i] += shift
            acc += weight * float(f(probe))
        grad[i] = acc
    if not np.all(np.isfinite(grad)):
        raise NumericError("parameter-shift gradient is non-finite")
    return grad


def calibrate_shift_scale(f, x, atol: float = 1e-5) -> tuple[float, float]:
    """One-time calibration of the shift rule against central differences.

    Returns (shift, scale) and raises if the configured rule disagrees with
    finite differences at the probe point, which would indicate a rotation
    convention mismatch.
    """
    shift_grad = parameter_shift_gradient(f, x)
    fd_grad = finite_difference_gradient(f, x, eps=1e-6)
    err = float(np.max(np.abs(shift_grad - fd_grad)))
    if err > atol * (1.0 + float(np.max(np.abs(fd_grad)))):
        raise UnsupportedParameterError(
            f"shift rule (pi/4, 1.0) disagrees with finite differences by {err}"
        )
    return SHIFT, SHIFT_SCALE
