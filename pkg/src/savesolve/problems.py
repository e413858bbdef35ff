"""Built-in benchmark instances and problem-file ingestion.

Problem files are UTF-8 JSON documents:

    {
      "n": 2, "m": 1,
      "A_base": [[2, 1], [5, 1]], "A_terms": [[[1, 0], [0, 1]]],
      "b_base": [4, 5], "b_terms": [[1, 3]],
      "distribution": {"kind": "uniform_box"},
      "solver":  {"mu0": 0.01, "epsilon": 1e-5, ...},      # optional
      "sampler": {"kind": "halton", "count": 100, ...}     # optional
    }

A finite distribution uses kind "finite_scenarios" with
"scenarios": [{"omega": [...], "p": ...}, ...].  Shape mismatches are
rejected with the offending field in the message.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .analytic import ClosedFormInstance
from .core import FiniteScenarios, StochasticProblem, UniformBox
from .sampling import KINDS, SamplerSpec
from .solver import SolverConfig

__all__ = [
    "ProblemFormatError",
    "EXAMPLE_IDS",
    "builtin_example",
    "problem_from_dict",
    "problem_to_dict",
    "load_problem_file",
    "case2_from_dict",
    "load_case2_file",
]

EXAMPLE_IDS = ("ex2_1", "ex4_1", "ex4_2", "ex4_3", "ex4_4")


class ProblemFormatError(ValueError):
    """A problem document failed validation."""


# 10 x 10 base matrix of the ex4_3 instance; the fractions are written as
# ratios so the stored doubles are the correctly rounded exact values.
_EX4_3_BASE = [
    [5, 0, 0, 0, 0, 2, 1, 0, 0, 3],
    [1 / 2, 2, 0, 1 / 2, 1, 0, 1, 0, 6, 0],
    [0, 1 / 4, 7, 3 / 4, 0, 2, 0, 0, 1 / 2, 1 / 2],
    [1, 1, 2, 2, 1 / 2, 0, 3 / 2, 2, 0, 1],
    [0, 0, 2 / 5, 1 / 4, 6, 2, 0, 1, 7 / 20, 1],
    [2, 1 / 2, 4, 0, 0, 1, 1 / 2, 2, 1, 0],
    [0, 5, 0, 2 / 3, 0, 2 / 3, 3, 1 / 4, 1, 5 / 12],
    [2, 1, 1, 1, 1, 1 / 2, 0, 4, 1 / 2, 0],
    [1 / 7, 5 / 7, 0, 0, 1, 0, 1 / 7, 0, 9, 0],
    [3, 0, 2, 1, 5 / 2, 0, 1 / 2, 1 / 4, 1 / 4, 1],
]


def builtin_example(example_id: str, n: int | None = None) -> StochasticProblem:
    """Construct one of the built-in benchmark instances.

    ex2_1  4x4 with w scaling the diagonal and the rhs, two scenarios
           w in {0, 2} with probability 1/2 each; solved by the all-ones
           vector.
    ex4_1  2x2, w uniform on [0,1] on the diagonal and rhs; solved by (1, 3)
           for every w.
    ex4_2  4x4 block instance, w uniform; solved by the all-ones vector.
    ex4_3  10x10 dense instance with fractional entries, w uniform; has no
           exact solution, the residual minimum is positive.
    ex4_4  tridiagonal family of user-chosen dimension n >= 2, w uniform;
           solved by the all-ones vector.
    """
    if example_id != "ex4_4" and n is not None:
        raise ValueError("the dimension argument applies only to ex4_4")
    if example_id == "ex2_1":
        A0 = np.array(
            [[10, 1, 2, 0], [1, 11, 3, 1], [0, 2, 12, 1], [1, 7, 0, 13]], dtype=float
        )
        return StochasticProblem(
            A_base=A0,
            A_terms=[np.eye(4)],
            b_base=np.array([12.0, 15.0, 14.0, 20.0]),
            b_terms=[np.ones(4)],
            distribution=FiniteScenarios([[0.0], [2.0]], [0.5, 0.5]),
        )
    if example_id == "ex4_1":
        return StochasticProblem(
            A_base=np.array([[2.0, 1.0], [5.0, 1.0]]),
            A_terms=[np.eye(2)],
            b_base=np.array([4.0, 5.0]),
            b_terms=[np.array([1.0, 3.0])],
        )
    if example_id == "ex4_2":
        A0 = np.array(
            [[2, 1, 0, 0], [2, 1, 0, 0], [0, 0, 2, 1], [0, 2, 0, 1]], dtype=float
        )
        return StochasticProblem(
            A_base=A0,
            A_terms=[np.eye(4)],
            b_base=np.full(4, 2.0),
            b_terms=[np.ones(4)],
        )
    if example_id == "ex4_3":
        return StochasticProblem(
            A_base=np.array(_EX4_3_BASE, dtype=float),
            A_terms=[np.eye(10)],
            b_base=np.full(10, 10.0),
            b_terms=[np.ones(10)],
        )
    if example_id == "ex4_4":
        if n is None:
            raise ValueError("ex4_4 requires the dimension n")
        if n < 2:
            raise ValueError(f"ex4_4 needs n >= 2, got {n}")
        A0 = 2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
        b0 = np.full(n, 3.0)
        b0[0] = b0[-1] = 2.0
        return StochasticProblem(
            A_base=A0,
            A_terms=[np.eye(n)],
            b_base=b0,
            b_terms=[np.ones(n)],
        )
    raise ValueError(f"unknown example {example_id!r}; valid ids: {EXAMPLE_IDS}")


def _require(data: dict, key: str):
    if key not in data:
        raise ProblemFormatError(f"{key}: missing required field")
    return data[key]


def _int_field(data: dict, key: str, minimum: int) -> int:
    value = _require(data, key)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ProblemFormatError(f"{key}: expected an integer >= {minimum}, got {value!r}")
    return value


def _array_field(value, shape: tuple[int, ...], label: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{label}: not a numeric array ({exc})") from None
    if arr.shape != shape:
        raise ProblemFormatError(f"{label}: expected shape {shape}, got {arr.shape}")
    return arr


def problem_from_dict(data) -> StochasticProblem:
    """Validate a parsed problem document and build the instance."""
    if not isinstance(data, dict):
        raise ProblemFormatError("top level: expected a JSON object")
    known = {"n", "m", "A_base", "A_terms", "b_base", "b_terms", "distribution",
             "solver", "sampler"}
    for key in data:
        if key not in known:
            raise ProblemFormatError(f"{key}: unknown field")
    n = _int_field(data, "n", minimum=1)
    m = _int_field(data, "m", minimum=0)
    A_base = _array_field(_require(data, "A_base"), (n, n), "A_base")
    b_base = _array_field(_require(data, "b_base"), (n,), "b_base")
    A_terms_raw = _require(data, "A_terms")
    b_terms_raw = _require(data, "b_terms")
    if not isinstance(A_terms_raw, list) or len(A_terms_raw) != m:
        raise ProblemFormatError(f"A_terms: expected a list of {m} matrices")
    if not isinstance(b_terms_raw, list) or len(b_terms_raw) != m:
        raise ProblemFormatError(f"b_terms: expected a list of {m} vectors")
    A_terms = [
        _array_field(t, (n, n), f"A_terms[{j}]") for j, t in enumerate(A_terms_raw)
    ]
    b_terms = [
        _array_field(t, (n,), f"b_terms[{j}]") for j, t in enumerate(b_terms_raw)
    ]
    dist_raw = _require(data, "distribution")
    if not isinstance(dist_raw, dict) or "kind" not in dist_raw:
        raise ProblemFormatError("distribution: expected an object with a kind")
    kind = dist_raw["kind"]
    if kind == "uniform_box":
        distribution = UniformBox()
    elif kind == "finite_scenarios":
        raw = dist_raw.get("scenarios")
        if not isinstance(raw, list) or not raw:
            raise ProblemFormatError(
                "distribution.scenarios: expected a non-empty list"
            )
        omegas, probs = [], []
        for i, sc in enumerate(raw):
            if not isinstance(sc, dict) or "omega" not in sc or "p" not in sc:
                raise ProblemFormatError(
                    f"distribution.scenarios[{i}]: expected omega and p fields"
                )
            omegas.append(
                _array_field(sc["omega"], (m,), f"distribution.scenarios[{i}].omega")
            )
            probs.append(sc["p"])
        try:
            distribution = FiniteScenarios(np.array(omegas).reshape(len(raw), m), probs)
        except ValueError as exc:
            raise ProblemFormatError(f"distribution.scenarios: {exc}") from None
    else:
        raise ProblemFormatError(
            f"distribution.kind: expected uniform_box or finite_scenarios, got {kind!r}"
        )
    try:
        return StochasticProblem(A_base, A_terms, b_base, b_terms, distribution)
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from None


def problem_to_dict(problem: StochasticProblem) -> dict:
    """Inverse of problem_from_dict, modulo the optional solver/sampler keys."""
    if isinstance(problem.distribution, FiniteScenarios):
        dist = {
            "kind": "finite_scenarios",
            "scenarios": [
                {"omega": omega.tolist(), "p": float(p)}
                for omega, p in zip(
                    problem.distribution.omegas, problem.distribution.probs
                )
            ],
        }
    else:
        dist = {"kind": "uniform_box"}
    return {
        "n": problem.n,
        "m": problem.m,
        "A_base": problem.A_base.tolist(),
        "A_terms": [t.tolist() for t in problem.A_terms],
        "b_base": problem.b_base.tolist(),
        "b_terms": [t.tolist() for t in problem.b_terms],
        "distribution": dist,
    }


def _solver_from_dict(raw) -> SolverConfig:
    if not isinstance(raw, dict):
        raise ProblemFormatError("solver: expected an object")
    fields = {f.name for f in dataclasses.fields(SolverConfig)}
    for key in raw:
        if key not in fields:
            raise ProblemFormatError(f"solver.{key}: unknown parameter")
    try:
        return SolverConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"solver: {exc}") from None


def _sampler_from_dict(raw, m: int) -> SamplerSpec:
    if not isinstance(raw, dict):
        raise ProblemFormatError("sampler: expected an object")
    allowed = {"kind", "count", "seed", "offset"}
    for key in raw:
        if key not in allowed:
            raise ProblemFormatError(f"sampler.{key}: unknown parameter")
    if raw.get("kind") not in KINDS:
        raise ProblemFormatError(f"sampler.kind: expected one of {KINDS}")
    try:
        return SamplerSpec(dim=m, **raw)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"sampler: {exc}") from None


def load_problem_file(path):
    """Read a problem file; returns (problem, solver config or None,
    sampler spec or None)."""
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON: {exc}") from None
    problem = problem_from_dict(data)
    cfg = _solver_from_dict(data["solver"]) if "solver" in data else None
    spec = _sampler_from_dict(data["sampler"], problem.m) if "sampler" in data else None
    return problem, cfg, spec


def case2_from_dict(data) -> ClosedFormInstance:
    """Build a closed-form oracle instance from {A, b_tilde, T}."""
    if not isinstance(data, dict):
        raise ProblemFormatError("top level: expected a JSON object")
    for key in data:
        if key not in {"A", "b_tilde", "T"}:
            raise ProblemFormatError(f"{key}: unknown field")
    A = _require(data, "A")
    try:
        A = np.asarray(A, dtype=float)
    except (TypeError, ValueError):
        raise ProblemFormatError("A: not a numeric matrix") from None
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ProblemFormatError(f"A: expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    b_tilde = _array_field(_require(data, "b_tilde"), (n,), "b_tilde")
    T = _require(data, "T")
    try:
        return ClosedFormInstance(A, b_tilde, T)
    except ValueError as exc:
        raise ProblemFormatError(f"T: {exc}") from None


def load_case2_file(path) -> ClosedFormInstance:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON: {exc}") from None
    return case2_from_dict(data)
