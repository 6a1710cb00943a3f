"""Classic differential evolution, rand/1/bin with greedy replacement."""
from __future__ import annotations

import numpy as np

from ..expr import Domain
from .core import OptimizerConfig, Recorder, binomial_crossover


def differential_mutation(x1, x2, x3, F):
    """``x1 + F * (x2 - x3)``."""
    return x1 + F * (x2 - x3)


def distinct_others(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """For each row ``i`` of an ``n``-population, ``k`` distinct indices != i."""
    picks = np.argsort(rng.random((n, n - 1)), axis=1)[:, :k]
    # shift indices at or above i up by one to skip i itself
    return picks + (picks >= np.arange(n)[:, None])


def de_step(population: np.ndarray, fitness: np.ndarray, F: float, CR: float,
            rng: np.random.Generator, domain: Domain, evaluate):
    """One generation.  Returns the new ``(population, fitness)``.

    ``evaluate`` may score only a prefix of the trial vectors (budget
    exhausted); unscored individuals keep their parent.
    """
    n = len(population)
    r = distinct_others(rng, n, 3)
    mutants = differential_mutation(population[r[:, 0]], population[r[:, 1]],
                                     population[r[:, 2]], F)
    trials = domain.clip(binomial_crossover(rng, population, mutants, CR))
    f = evaluate(trials)
    m = len(f)
    population, fitness = population.copy(), fitness.copy()
    accept = f <= fitness[:m]
    population[:m][accept] = trials[:m][accept]
    fitness[:m][accept] = f[accept]
    return population, fitness


def run_de(config: OptimizerConfig, rec: Recorder, domain: Domain, init: np.ndarray,
           rng: np.random.Generator) -> None:
    pop = np.array(init, dtype=float)
    fit = rec(pop)
    while rec.remaining > 0:
        pop, fit = de_step(pop, fit, config.F, config.CR, rng, domain, rec)
