"""Stochastic absolute value equation instances and their residual calculus.

An instance is the equation family A(w) x - |x| = b(w), with both coefficient
families affine in the random vector w:

    A(w) = A_base + sum_j w_j * A_terms[j]
    b(w) = b_base + sum_j w_j * b_terms[j]

w is either uniform on [0,1]^m (unit density) or supported on finitely many
weighted scenarios.  The module evaluates residuals, the weighted
sample-average squared-residual objective, and the smoothed objective obtained
by replacing |x| with sqrt(x^2 + mu), together with the exact Jacobian and
gradient of the smoothed residual.

All operations are pure functions of their inputs; problem and sample objects
are treated as read-only after construction, so they are safe to share across
concurrent solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NonsmoothPointError",
    "UniformBox",
    "FiniteScenarios",
    "StochasticProblem",
    "SampleSet",
    "eval_A",
    "eval_b",
    "residual",
    "smooth_abs",
    "erm_objective",
    "smoothed_objective",
    "smoothed_jacobian",
    "smoothed_gradient",
]

# absolute tolerance for scenario probabilities summing to one
PROBABILITY_TOL = 1e-12


class NonsmoothPointError(ValueError):
    """Derivative of |.| requested at a kink (mu = 0 with some x_j = 0)."""


@dataclass(frozen=True)
class UniformBox:
    """w uniform on [0,1]^m with density identically one."""


@dataclass(eq=False)
class FiniteScenarios:
    """Discrete distribution: point omegas[i] occurs with probability probs[i].

    omegas is (k, m); a 1-D input of k scalars is treated as k points in R^1.
    Probabilities must be strictly positive and sum to one.
    """

    omegas: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        if omegas.ndim == 1:
            omegas = omegas[:, None]
        if omegas.ndim != 2:
            raise ValueError("scenario points must form a (count, dim) array")
        probs = np.asarray(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise ValueError("at least one scenario is required")
        if omegas.shape[0] != probs.size:
            raise ValueError(
                f"{omegas.shape[0]} scenario points but {probs.size} probabilities"
            )
        if np.any(probs <= 0.0):
            raise ValueError("scenario probabilities must be strictly positive")
        total = probs.sum()
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"scenario probabilities sum to {total!r}, not 1")
        self.omegas = omegas
        self.probs = probs

    @property
    def count(self) -> int:
        return self.probs.size


@dataclass(eq=False)
class StochasticProblem:
    """Affine-in-w coefficient family plus the distribution of w.

    A_terms and b_terms must each have m entries; m = 0 gives a deterministic
    equation.  Shapes are validated on construction and the term stacks are
    cached for batch evaluation.
    """

    A_base: np.ndarray
    A_terms: list[np.ndarray]
    b_base: np.ndarray
    b_terms: list[np.ndarray]
    distribution: UniformBox | FiniteScenarios = field(default_factory=UniformBox)

    def __post_init__(self):
        A_base = np.asarray(self.A_base, dtype=float)
        if A_base.ndim != 2 or A_base.shape[0] != A_base.shape[1]:
            raise ValueError(f"A_base must be square, got shape {A_base.shape}")
        n = A_base.shape[0]
        b_base = np.asarray(self.b_base, dtype=float).ravel()
        if b_base.size != n:
            raise ValueError(f"b_base has length {b_base.size}, expected {n}")
        A_terms = [np.asarray(t, dtype=float) for t in self.A_terms]
        for j, term in enumerate(A_terms):
            if term.shape != (n, n):
                raise ValueError(
                    f"A_terms[{j}] has shape {term.shape}, expected ({n}, {n})"
                )
        b_terms = [np.asarray(t, dtype=float).ravel() for t in self.b_terms]
        for j, term in enumerate(b_terms):
            if term.size != n:
                raise ValueError(
                    f"b_terms[{j}] has length {term.size}, expected {n}"
                )
        if len(A_terms) != len(b_terms):
            raise ValueError(
                f"{len(A_terms)} A_terms but {len(b_terms)} b_terms"
            )
        m = len(A_terms)
        if isinstance(self.distribution, FiniteScenarios):
            if self.distribution.omegas.shape[1] != m:
                raise ValueError(
                    f"scenario points have dimension "
                    f"{self.distribution.omegas.shape[1]}, expected {m}"
                )
        elif not isinstance(self.distribution, UniformBox):
            raise ValueError("distribution must be UniformBox or FiniteScenarios")
        self.A_base = A_base
        self.A_terms = A_terms
        self.b_base = b_base
        self.b_terms = b_terms
        # stacked copies for vectorized evaluation over many samples
        self._A_stack = np.stack(A_terms) if m else np.zeros((0, n, n))
        self._b_stack = np.stack(b_terms) if m else np.zeros((0, n))

    @property
    def n(self) -> int:
        return self.A_base.shape[0]

    @property
    def m(self) -> int:
        return len(self.A_terms)


@dataclass(eq=False)
class SampleSet:
    """Weighted observation points: points is (N, m), weights is (N,).

    Weights are the density values carried through the sample average: 1 for
    uniform-box draws, count * p_i for finite scenarios so the weighted mean
    reproduces the exact expectation.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise ValueError("sample points must form a (count, dim) array")
        if points.shape[0] < 1:
            raise ValueError("a sample set needs at least one point")
        weights = np.asarray(self.weights, dtype=float).ravel()
        if weights.size != points.shape[0]:
            raise ValueError(
                f"{points.shape[0]} points but {weights.size} weights"
            )
        if np.any(weights <= 0.0):
            raise ValueError("sample weights must be strictly positive")
        self.points = points
        self.weights = weights

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _check_vector(v, size: int, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size != size:
        raise ValueError(f"{name} has length {arr.size}, expected {size}")
    return arr


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not mu >= 0.0:
        raise ValueError(f"mu must be nonnegative, got {mu!r}")
    return mu


def _check_samples(problem: StochasticProblem, samples: SampleSet) -> None:
    if samples.dim != problem.m:
        raise ValueError(
            f"sample points have dimension {samples.dim}, "
            f"expected {problem.m}"
        )


def eval_A(problem: StochasticProblem, omega) -> np.ndarray:
    """Coefficient matrix A_base + sum_j omega_j * A_terms[j]."""
    omega = _check_vector(omega, problem.m, "omega")
    if problem.m == 0:
        return problem.A_base.copy()
    return problem.A_base + np.tensordot(omega, problem._A_stack, axes=1)


def eval_b(problem: StochasticProblem, omega) -> np.ndarray:
    """Right-hand side b_base + sum_j omega_j * b_terms[j]."""
    omega = _check_vector(omega, problem.m, "omega")
    if problem.m == 0:
        return problem.b_base.copy()
    return problem.b_base + omega @ problem._b_stack


def residual(problem: StochasticProblem, x, omega) -> np.ndarray:
    """A(w) x - |x| - b(w) with the absolute value taken componentwise."""
    x = _check_vector(x, problem.n, "x")
    return eval_A(problem, omega) @ x - np.abs(x) - eval_b(problem, omega)


def smooth_abs(t, mu: float):
    """sqrt(t^2 + mu), the smooth stand-in for |t|; exact at mu = 0.

    Accepts a scalar or an array and matches the input shape.
    """
    mu = _check_mu(mu)
    t_arr = np.asarray(t, dtype=float)
    out = np.sqrt(t_arr * t_arr + mu)
    return float(out) if out.ndim == 0 else out


def _residual_matrix(problem, samples, x, psi):
    """Rows are A(w_i) x - psi - b(w_i), assembled through the affine terms."""
    base = problem.A_base @ x - psi - problem.b_base
    span = problem._A_stack @ x - problem._b_stack  # (m, n)
    return base[None, :] + samples.points @ span


def _weighted_mean_square(R, samples):
    sq = np.einsum("ij,ij->i", R, R)
    return float(sq @ samples.weights / samples.N)


def erm_objective(problem: StochasticProblem, samples: SampleSet, x) -> float:
    """Weighted sample average of ||A(w_i) x - |x| - b(w_i)||^2.

    The value is (1/N) * sum_i w_i ||r_i||^2; with the count * p_i weight
    convention for finite scenarios this equals the exact expectation
    sum_i p_i ||r_i||^2.
    """
    _check_samples(problem, samples)
    x = _check_vector(x, problem.n, "x")
    R = _residual_matrix(problem, samples, x, np.abs(x))
    return _weighted_mean_square(R, samples)


def smoothed_objective(
    problem: StochasticProblem, samples: SampleSet, x, mu: float
) -> float:
    """erm_objective with |x| replaced by sqrt(x^2 + mu); equal at mu = 0."""
    mu = _check_mu(mu)
    _check_samples(problem, samples)
    x = _check_vector(x, problem.n, "x")
    psi = np.sqrt(x * x + mu)
    R = _residual_matrix(problem, samples, x, psi)
    return _weighted_mean_square(R, samples)


def _check_smooth_point(x: np.ndarray, mu: float) -> None:
    if mu == 0.0 and np.any(x == 0.0):
        raise NonsmoothPointError(
            "the smoothed residual is not differentiable at mu = 0 "
            "with a zero component in x"
        )


def smoothed_jacobian(problem: StochasticProblem, x, omega, mu: float) -> np.ndarray:
    """Jacobian of the smoothed residual: A(w) - diag(x_j / sqrt(x_j^2 + mu)).

    mu = 0 is accepted only when no component of x vanishes; otherwise the
    point is a kink of |.| and a NonsmoothPointError is raised.
    """
    mu = _check_mu(mu)
    x = _check_vector(x, problem.n, "x")
    _check_smooth_point(x, mu)
    J = eval_A(problem, omega)
    d = x / np.sqrt(x * x + mu)
    J[np.diag_indices_from(J)] -= d
    return J


def smoothed_gradient(
    problem: StochasticProblem, samples: SampleSet, x, mu: float
) -> np.ndarray:
    """Exact gradient of smoothed_objective in x.

    Equals (2/N) * sum_i w_i J_i^T r_i with J_i the smoothed-residual Jacobian
    at w_i; evaluated through the affine structure so no per-sample matrix is
    materialized.
    """
    mu = _check_mu(mu)
    _check_samples(problem, samples)
    x = _check_vector(x, problem.n, "x")
    _check_smooth_point(x, mu)
    psi = np.sqrt(x * x + mu)
    R = _residual_matrix(problem, samples, x, psi)
    WR = R * samples.weights[:, None]
    s0 = WR.sum(axis=0)
    g = problem.A_base.T @ s0 - (x / psi) * s0
    if problem.m:
        # sum_j A_j^T (sum_i w_i omega_ij r_i)
        g += np.einsum("jkl,jk->l", problem._A_stack, samples.points.T @ WR)
    return (2.0 / samples.N) * g
