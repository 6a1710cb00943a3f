"""Behavioural distance between two optimizers on one function.

Both optimizers are run from a shared random initial population; the
distance is the per-coordinate 1-Wasserstein distance between the sets of
every point each optimizer sampled, averaged over coordinates and then over
repetitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .expr import Domain
from .optim import OptimizerConfig, SolutionTrace, as_objective, run

EPS_BEST = 0.005


def wasserstein_1d(u, v) -> float:
    """1-Wasserstein distance between two empirical distributions on the line.

    Computed as the integral of ``|F_u - F_v|`` over the merged support.
    """
    u = np.sort(np.asarray(u, dtype=float).ravel())
    v = np.sort(np.asarray(v, dtype=float).ravel())
    if u.size == 0 or v.size == 0:
        raise ValueError("empty sample set")
    allv = np.concatenate([u, v])
    allv.sort(kind="mergesort")
    deltas = np.diff(allv)
    cdf_u = np.searchsorted(u, allv[:-1], side="right") / u.size
    cdf_v = np.searchsorted(v, allv[:-1], side="right") / v.size
    return float(np.sum(np.abs(cdf_u - cdf_v) * deltas))


def behavioral_distance(U, V) -> float:
    """Mean over coordinates of :func:`wasserstein_1d` of the projections."""
    U, V = np.atleast_2d(U), np.atleast_2d(V)
    if U.shape[1] != V.shape[1]:
        raise ValueError(f"dimension mismatch: {U.shape[1]} vs {V.shape[1]}")
    return float(np.mean([wasserstein_1d(U[:, i], V[:, i]) for i in range(U.shape[1])]))


@dataclass
class BehaviorScore:
    d: float
    best_f1: float
    best_f2: float
    equal_best: bool
    valid: bool = True
    distances: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"d": self.d, "best_f1": self.best_f1, "best_f2": self.best_f2,
                "equal_best": self.equal_best}


def default_streams(opt1: OptimizerConfig, opt2: OptimizerConfig) -> tuple[int, int]:
    """Identical configurations share a random stream so they trace identically."""
    return (0, 0) if opt1 == opt2 else (0, 1)


def run_pair(h, opt1: OptimizerConfig, opt2: OptimizerConfig, domain: Domain, seed,
             repetition: int, streams=None) -> tuple[SolutionTrace, SolutionTrace]:
    """One repetition: draw a shared initial population and run both optimizers.

    If population sizes differ, each optimizer takes a prefix of the same draw.
    """
    s1, s2 = streams if streams is not None else default_streams(opt1, opt2)
    objective = as_objective(h)
    size = max(opt1.population_size, opt2.population_size)
    X = domain.sample(_rng.stream(seed, repetition, _rng.INIT), size)
    t1 = run(opt1, objective, domain, X[: opt1.population_size],
             _rng.stream(seed, repetition, _rng.OPTIMIZER, s1))
    t2 = run(opt2, objective, domain, X[: opt2.population_size],
             _rng.stream(seed, repetition, _rng.OPTIMIZER, s2))
    return t1, t2


def evaluate_pair(h, opt1: OptimizerConfig, opt2: OptimizerConfig, domain: Domain = Domain(),
                  n: int = 3, seed=0, *, pooled: bool = False, streams=None,
                  eps_best: float = EPS_BEST) -> BehaviorScore:
    """Score how differently ``opt1`` and ``opt2`` behave on ``h``.

    Parameters
    ----------
    h : tree or callable
        Function to minimise.
    n : int
        Repetitions, each with a fresh shared initial population.
    seed : int or tuple of int
        Root of all random streams used here.
    pooled : bool
        If true, measure one distance between the unions of all repetitions'
        samples instead of averaging per-repetition distances.
    streams : (int, int), optional
        Stream ids of the two optimizers.  Defaults to ``(0, 1)``, or
        ``(0, 0)`` when the configurations are identical.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    traces = [run_pair(h, opt1, opt2, domain, seed, k, streams) for k in range(n)]
    distances = [behavioral_distance(t1.points, t2.points) for t1, t2 in traces]
    if pooled:
        d = behavioral_distance(np.concatenate([t.points for t, _ in traces]),
                                np.concatenate([t.points for _, t in traces]))
    else:
        d = float(np.mean(distances))
    b1 = min(t.best_fitness for t, _ in traces)
    b2 = min(t.best_fitness for _, t in traces)
    valid = bool(
        all(np.isfinite(t.points).all() for pair in traces for t in pair)
        and np.isfinite([b1, b2, d]).all())
    equal_best = bool(abs(b1 - b2) <= eps_best)
    return BehaviorScore(d, b1, b2, equal_best, valid, distances)
