"""Higher-dimensional validation of evolved functions.

A 2-D tree ``h`` is lifted to ``D`` dimensions by averaging it over
consecutive coordinate pairs, then each optimizer is run repeatedly and
the two sets of best solutions are compared in decision space (``delta_x``)
and objective space (``delta_f``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .behavior import default_streams
from .expr import Domain, Node, evaluate_batch, to_sexpr, variables
from .optim import OptimizerConfig, as_objective, run


@dataclass(frozen=True)
class LiftedFunction:
    """``h^D(x) = mean_i base(x_i, x_{i+1})`` for ``i = 0 .. D-2``."""

    base: Node
    dimension: int

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = sum(evaluate_batch(self.base, X[:, i:i + 2]) for i in range(self.dimension - 1))
        return total / (self.dimension - 1)

    def evaluate(self, point) -> float:
        return float(self(np.asarray(point, dtype=float)[None, :])[0])

    def __str__(self):
        return to_sexpr(self.base)


def lift(base: Node, D: int) -> LiftedFunction:
    if D < 2:
        raise ValueError("D must be >= 2")
    extra = {i for i in variables(base) if i > 1}
    if extra:
        raise ValueError(f"base function uses variables beyond x1: {sorted(extra)}")
    return LiftedFunction(base, D)


def delta_x(A, B, domain: Domain) -> float:
    """Mean pairwise distance between two point sets over the domain diameter."""
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    dists = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=-1)
    dim = A.shape[1]
    return float(dists.mean() / (math.sqrt(dim) * domain.width))


def delta_f(fa, fb) -> float:
    """Mean pairwise |f(a) - f(b)| over the fitness range of both sets (0 if flat)."""
    fa, fb = np.asarray(fa, dtype=float), np.asarray(fb, dtype=float)
    both = np.concatenate([fa, fb])
    spread = both.max() - both.min()
    if spread == 0:
        return 0.0
    return float(np.abs(fa[:, None] - fb[None, :]).mean() / spread)


@dataclass
class ValidationReport:
    function: str
    dimension: int
    repetitions: int
    budget: int
    delta_x: float
    delta_f: float
    A: list = field(default_factory=list)
    B: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "dimension": self.dimension,
            "repetitions": self.repetitions,
            "budget": self.budget,
            "delta_x": self.delta_x,
            "delta_f": self.delta_f,
            "A": [{"x": list(map(float, x)), "f": float(f)} for x, f in self.A],
            "B": [{"x": list(map(float, x)), "f": float(f)} for x, f in self.B],
        }


def validate(function, opt1: OptimizerConfig, opt2: OptimizerConfig, domain: Domain,
             repetitions: int = 21, budget=None, seed=0, streams=None,
             name=None) -> ValidationReport:
    """Compare the best solutions of ``opt1`` and ``opt2`` over repeated runs.

    Each repetition gives each optimizer its own initial population; when
    both configurations are identical they share one stream and so produce
    identical best sets.  ``budget`` overrides both configs' budgets.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if budget is not None:
        opt1, opt2 = opt1.replace(budget=budget), opt2.replace(budget=budget)
    slots = streams if streams is not None else default_streams(opt1, opt2)
    objective = as_objective(function)
    best = ([], [])
    for k in range(repetitions):
        for which, (cfg, slot) in enumerate(zip((opt1, opt2), slots)):
            init = domain.sample(_rng.stream(seed, k, _rng.INIT, slot), cfg.population_size)
            trace = run(cfg, objective, domain, init, _rng.stream(seed, k, _rng.OPTIMIZER, slot))
            best[which].append((trace.best_point, trace.best_fitness))
    A, B = best
    if name is None:
        name = getattr(function, "__name__", None) or str(function)
    return ValidationReport(
        name, domain.dimension, repetitions, opt1.budget,
        delta_x([a for a, _ in A], [b for b, _ in B], domain),
        delta_f([f for _, f in A], [f for _, f in B]),
        A, B)


# -- classic baselines (unshifted, unrotated) ---------------------------------

def sphere(X):
    X = np.atleast_2d(X)
    return np.sum(X**2, axis=1)


def rastrigin(X):
    X = np.atleast_2d(X)
    return 10 * X.shape[1] + np.sum(X**2 - 10 * np.cos(2 * np.pi * X), axis=1)


def ackley(X):
    X = np.atleast_2d(X)
    d = X.shape[1]
    a = -20 * np.exp(-0.2 * np.sqrt(np.sum(X**2, axis=1) / d))
    b = -np.exp(np.sum(np.cos(2 * np.pi * X), axis=1) / d)
    return a + b + 20 + np.e


def rosenbrock(X):
    X = np.atleast_2d(X)
    return np.sum(100 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (1 - X[:, :-1]) ** 2, axis=1)


def griewank(X):
    X = np.atleast_2d(X)
    i = np.arange(1, X.shape[1] + 1)
    return 1 + np.sum(X**2, axis=1) / 4000 - np.prod(np.cos(X / np.sqrt(i)), axis=1)


BASELINES = {f.__name__: f for f in (sphere, rastrigin, ackley, rosenbrock, griewank)}


def baseline(name: str):
    try:
        return BASELINES[name]
    except KeyError:
        raise KeyError(f"unknown baseline {name!r}; known: {sorted(BASELINES)}") from None
