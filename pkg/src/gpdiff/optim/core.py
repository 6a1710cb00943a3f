from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from ..expr import Const, Domain, Op, Var, evaluate_batch

ALGORITHMS = ("DE", "SHADE", "CMAES")

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OptimizerConfig:
    """Identity and parameters of one optimizer.

    Only the fields relevant to ``algorithm`` are used: ``F``/``CR`` for DE,
    ``H``/``p_max`` for SHADE and ``sigma0`` for CMA-ES.
    """

    algorithm: str
    population_size: int = 20
    budget: int = 500
    F: float = 0.5
    CR: float = 0.9
    H: int = 20
    p_max: float = 0.2
    sigma0: float = 6.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.budget < self.population_size:
            raise ValueError("budget must be >= population_size")
        if self.algorithm in ("DE", "SHADE") and self.population_size < 4:
            raise ValueError(f"{self.algorithm} needs population_size >= 4")
        if not 0.0 <= self.CR <= 1.0:
            raise ValueError("CR must lie in [0, 1]")
        if self.H < 1:
            raise ValueError("H must be positive")
        if not 0.0 < self.p_max <= 1.0:
            raise ValueError("p_max must lie in (0, 1]")
        if self.sigma0 <= 0:
            raise ValueError("sigma0 must be positive")

    def replace(self, **changes) -> "OptimizerConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        return cls(**d)


PRESETS: dict[str, OptimizerConfig] = {
    "de-f05": OptimizerConfig("DE", 20, 500, F=0.5, CR=0.9),
    "de-f03": OptimizerConfig("DE", 20, 500, F=0.3, CR=0.9),
    "shade-default": OptimizerConfig("SHADE", 20, 500, H=20, p_max=0.2),
    "cmaes-default": OptimizerConfig("CMAES", 20, 500, sigma0=6.0),
    # long validation runs
    "de-f05-test": OptimizerConfig("DE", 20, 100_000, F=0.5, CR=0.9),
    "de-f03-test": OptimizerConfig("DE", 20, 100_000, F=0.3, CR=0.9),
    "shade-test": OptimizerConfig("SHADE", 100, 100_000, H=100, p_max=0.2),
    "cmaes-test": OptimizerConfig("CMAES", 200, 100_000, sigma0=6.0),
}


def preset(name: str, **overrides) -> OptimizerConfig:
    try:
        cfg = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown optimizer preset {name!r}; known: {sorted(PRESETS)}") from None
    return cfg.replace(**overrides) if overrides else cfg


def as_objective(fn) -> Objective:
    """Turn an expression tree or batch callable into an ``(n, D) -> (n,)`` function."""
    if isinstance(fn, (Op, Var, Const)):
        return partial(evaluate_batch, fn)
    return fn


def initial_population(rng: np.random.Generator, domain: Domain, size: int) -> np.ndarray:
    return domain.sample(rng, size)


@dataclass
class SolutionTrace:
    """Every point an optimizer evaluated, in order, with its fitness."""

    points: np.ndarray
    fitnesses: np.ndarray

    def __len__(self):
        return len(self.fitnesses)

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.fitnesses))

    @property
    def best_point(self) -> np.ndarray:
        return self.points[self.best_index]

    @property
    def best_fitness(self) -> float:
        return float(self.fitnesses[self.best_index])

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.fitnesses)

    def to_csv(self, path) -> None:
        dim = self.points.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eval_index", *[f"x_{i}" for i in range(dim)], "fitness"])
            for i, (x, f) in enumerate(zip(self.points, self.fitnesses)):
                w.writerow([i, *map(repr, x.tolist()), repr(float(f))])


class Recorder:
    """Budget-limited objective wrapper that logs every evaluation.

    Calling it with ``k`` points evaluates at most ``remaining`` of them (a
    prefix) and returns only those fitnesses.  Non-finite values become
    ``+inf``.
    """

    def __init__(self, objective, budget: int):
        self.objective = as_objective(objective)
        self.budget = budget
        self._points: list[np.ndarray] = []
        self._fitnesses: list[np.ndarray] = []
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)[: self.remaining]
        if len(X) == 0:
            return np.empty(0)
        with np.errstate(all="ignore"):
            f = np.asarray(self.objective(X), dtype=float).reshape(len(X))
        f = np.where(np.isfinite(f), f, np.inf)
        self._points.append(X.copy())
        self._fitnesses.append(f)
        self.used += len(X)
        return f

    def trace(self) -> SolutionTrace:
        return SolutionTrace(np.concatenate(self._points), np.concatenate(self._fitnesses))


def binomial_crossover(rng: np.random.Generator, parents: np.ndarray, mutants: np.ndarray,
                       CR) -> np.ndarray:
    """Per-coordinate mix of mutant and parent; one mutant coordinate is always kept.

    ``CR`` may be a scalar or one rate per individual.
    """
    n, dim = parents.shape
    CR = np.asarray(CR, dtype=float)
    if CR.ndim:
        CR = CR[:, None]
    mask = rng.random((n, dim)) < CR
    mask[np.arange(n), rng.integers(dim, size=n)] = True
    return np.where(mask, mutants, parents)
