"""Expected-value route for stochastic absolute value equations.

The equation A x - |x| = b is equivalent to the complementarity system

    (A + I) x - b >= 0,   (A - I) x - b >= 0,
    ((A + I) x - b)^T ((A - I) x - b) = 0.

Taking expectations of the coefficients gives a deterministic system in the
expected matrices; for a finite-scenario distribution the per-scenario
nonnegativity constraints are kept alongside it.  The componentwise residual

    phi(a, b) = sqrt(a^2 + b^2) - a - b

vanishes exactly on the complementarity set, so the whole system becomes a
square constrained root-finding problem.  Its slack variables enter linearly
with nonnegativity bounds, and minimizing them out analytically leaves an
unconstrained least-squares objective in x that the smoothing gradient
machinery can handle directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FiniteScenarios,
    NonsmoothPointError,
    StochasticProblem,
    UniformBox,
    eval_A,
    eval_b,
    residual,
)
from .solver import SolveReport, SolverConfig, minimize_smoothed

__all__ = [
    "EvInstance",
    "fb",
    "smoothed_fb",
    "expected_instance",
    "ev_objective",
    "ev_gradient",
    "ev_residual",
    "ev_solve",
    "verify_glcp",
    "verify_save",
]


@dataclass(eq=False)
class EvInstance:
    """Expected coefficients plus the per-scenario constraint blocks."""

    A_bar: np.ndarray
    b_bar: np.ndarray
    scenarios: list[tuple[np.ndarray, np.ndarray]]

    def __post_init__(self):
        A_bar = np.asarray(self.A_bar, dtype=float)
        if A_bar.ndim != 2 or A_bar.shape[0] != A_bar.shape[1]:
            raise ValueError(f"A_bar must be square, got shape {A_bar.shape}")
        n = A_bar.shape[0]
        b_bar = np.asarray(self.b_bar, dtype=float).ravel()
        if b_bar.size != n:
            raise ValueError(f"b_bar has length {b_bar.size}, expected {n}")
        scenarios = []
        for i, (A_i, b_i) in enumerate(self.scenarios):
            A_i = np.asarray(A_i, dtype=float)
            b_i = np.asarray(b_i, dtype=float).ravel()
            if A_i.shape != (n, n) or b_i.size != n:
                raise ValueError(f"scenario {i} has mismatched shapes")
            scenarios.append((A_i, b_i))
        self.A_bar = A_bar
        self.b_bar = b_bar
        self.scenarios = scenarios

    @property
    def n(self) -> int:
        return self.A_bar.shape[0]


def fb(a, b):
    """sqrt(a^2 + b^2) - a - b; zero exactly when a, b >= 0 and a b = 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.sqrt(a * a + b * b) - a - b
    return float(out) if out.ndim == 0 else out


def smoothed_fb(a, b, mu: float):
    """sqrt(a^2 + b^2 + mu) - a - b, a smooth perturbation of fb."""
    mu = float(mu)
    if not mu >= 0.0:
        raise ValueError(f"mu must be nonnegative, got {mu!r}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.sqrt(a * a + b * b + mu) - a - b
    return float(out) if out.ndim == 0 else out


def expected_instance(problem: StochasticProblem) -> EvInstance:
    """Expected coefficients of a problem, with scenario constraint blocks.

    For a finite distribution the expectation is the probability-weighted sum
    and every scenario contributes a constraint block.  For the uniform box
    each w_j has mean 1/2, which is exact for the affine coefficient family;
    no constraint blocks are emitted there.
    """
    dist = problem.distribution
    if isinstance(dist, FiniteScenarios):
        scenarios = [
            (eval_A(problem, omega), eval_b(problem, omega)) for omega in dist.omegas
        ]
        A_bar = sum(p * A_i for (A_i, _), p in zip(scenarios, dist.probs))
        b_bar = sum(p * b_i for (_, b_i), p in zip(scenarios, dist.probs))
        return EvInstance(A_bar, b_bar, scenarios)
    half = np.full(problem.m, 0.5)
    return EvInstance(eval_A(problem, half), eval_b(problem, half), [])


def _complementarity_pair(inst: EvInstance, x: np.ndarray):
    Ax = inst.A_bar @ x
    return Ax + x - inst.b_bar, Ax - x - inst.b_bar


def _scenario_slacks(inst: EvInstance, x: np.ndarray):
    """Negative parts of every scenario constraint row, as one flat vector."""
    parts = []
    for A_i, b_i in inst.scenarios:
        Ax = A_i @ x
        parts.append(np.minimum(0.0, Ax + x - b_i))
        parts.append(np.minimum(0.0, Ax - x - b_i))
    return parts


def ev_objective(inst: EvInstance, x, mu: float) -> float:
    """Half the squared norm of the reduced expected-value system.

    Equals 0.5 ||Phi_mu(x)||^2 + 0.5 * sum of squared negative parts of the
    scenario constraint rows, where Phi_mu applies smoothed_fb to the
    componentwise pairs of (A_bar + I) x - b_bar and (A_bar - I) x - b_bar.
    This is the exact minimum over the nonnegative slack variables of half
    the squared constrained-system residual.
    """
    mu = float(mu)
    if not mu >= 0.0:
        raise ValueError(f"mu must be nonnegative, got {mu!r}")
    x = np.asarray(x, dtype=float).ravel()
    if x.size != inst.n:
        raise ValueError(f"x has length {x.size}, expected {inst.n}")
    G, H = _complementarity_pair(inst, x)
    phi = np.sqrt(G * G + H * H + mu) - G - H
    value = 0.5 * float(phi @ phi)
    for part in _scenario_slacks(inst, x):
        value += 0.5 * float(part @ part)
    return value


def ev_gradient(inst: EvInstance, x, mu: float) -> np.ndarray:
    """Exact gradient of ev_objective in x (mu > 0, or mu = 0 away from
    points where both complementarity arguments vanish)."""
    mu = float(mu)
    if not mu >= 0.0:
        raise ValueError(f"mu must be nonnegative, got {mu!r}")
    x = np.asarray(x, dtype=float).ravel()
    G, H = _complementarity_pair(inst, x)
    s = np.sqrt(G * G + H * H + mu)
    if mu == 0.0 and np.any(s == 0.0):
        raise NonsmoothPointError(
            "the complementarity residual is not differentiable where both "
            "arguments vanish with mu = 0"
        )
    phi = s - G - H
    # d phi_k / dx = (G_k/s_k - 1) * row_k(A_bar + I) + (H_k/s_k - 1) * row_k(A_bar - I)
    cg = (G / s - 1.0) * phi
    ch = (H / s - 1.0) * phi
    g = inst.A_bar.T @ (cg + ch) + (cg - ch)
    for A_i, b_i in inst.scenarios:
        Ax = A_i @ x
        np_pos = np.minimum(0.0, Ax + x - b_i)
        np_neg = np.minimum(0.0, Ax - x - b_i)
        g += A_i.T @ (np_pos + np_neg) + (np_pos - np_neg)
    return g


def ev_residual(inst: EvInstance, x, y) -> np.ndarray:
    """Stacked residual of the constrained system at (x, y).

    The first block is the unsmoothed complementarity residual; then, per
    scenario, the rows (A_i + I) x - b_i - y_{2i} and (A_i - I) x - b_i -
    y_{2i+1}.  y holds one length-n slack block per constraint row group and
    may be passed flat or as a (2 * scenarios, n) array.
    """
    x = np.asarray(x, dtype=float).ravel()
    k = len(inst.scenarios)
    y = np.asarray(y, dtype=float).reshape(2 * k, inst.n) if k else np.zeros((0, inst.n))
    G, H = _complementarity_pair(inst, x)
    blocks = [np.atleast_1d(fb(G, H))]
    for i, (A_i, b_i) in enumerate(inst.scenarios):
        Ax = A_i @ x
        blocks.append(Ax + x - b_i - y[2 * i])
        blocks.append(Ax - x - b_i - y[2 * i + 1])
    return np.concatenate(blocks)


def ev_solve(inst: EvInstance, x0, cfg: SolverConfig | None = None) -> SolveReport:
    """Minimize ev_objective with the smoothing gradient machinery.

    The reported f_final is half the squared constrained-system residual
    reconstructed with the optimal slacks y = max(0, constraint rows), which
    is exactly ev_objective at mu = 0.
    """
    return minimize_smoothed(
        lambda z, mu: ev_objective(inst, z, mu),
        lambda z, mu: ev_gradient(inst, z, mu),
        x0,
        cfg,
        raw_objective=lambda z: ev_objective(inst, z, 0.0),
    )


def verify_glcp(A, b, x, tol: float) -> bool:
    """Check (A+I)x - b >= 0, (A-I)x - b >= 0 and orthogonality, within tol."""
    tol = float(tol)
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    Ax = A @ x
    u = Ax + x - b
    v = Ax - x - b
    return bool(u.min() >= -tol and v.min() >= -tol and abs(float(u @ v)) <= tol)


def verify_save(problem: StochasticProblem, x, omega, tol: float) -> bool:
    """Check that the equation residual at (x, omega) has norm at most tol."""
    tol = float(tol)
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    return bool(np.linalg.norm(residual(problem, x, omega)) <= tol)
