"""Optimizers run under a fixed evaluation budget, recording every sample.

>>> from gpdiff.expr import Domain, parse
>>> rng = np.random.default_rng(0)
>>> dom = Domain()
>>> cfg = preset("de-f05")
>>> trace = run(cfg, parse("(add (mul x0 x0) (mul x1 x1))"), dom,
...             initial_population(rng, dom, cfg.population_size), rng)
>>> len(trace) == cfg.budget
True
"""
from __future__ import annotations

import numpy as np

from ..expr import Domain
from .cmaes import CMAState, cmaes_step, repair_covariance, run_cmaes
from .core import (
    ALGORITHMS,
    PRESETS,
    OptimizerConfig,
    Recorder,
    SolutionTrace,
    as_objective,
    binomial_crossover,
    initial_population,
    preset,
)
from .de import de_step, differential_mutation, distinct_others, run_de
from .shade import ShadeState, pbest_count, run_shade, shade_step

_RUNNERS = {"DE": run_de, "SHADE": run_shade, "CMAES": run_cmaes}


def run(config: OptimizerConfig, objective, domain: Domain, init: np.ndarray,
        rng: np.random.Generator) -> SolutionTrace:
    """Minimise ``objective`` over ``domain`` using exactly ``config.budget`` evaluations.

    ``init`` is evaluated first and counts towards the budget.  CMA-ES uses
    only its centroid as the initial mean.
    """
    init = np.asarray(init, dtype=float)
    if init.shape != (config.population_size, domain.dimension):
        raise ValueError(
            f"initial population has shape {init.shape}, expected "
            f"{(config.population_size, domain.dimension)}")
    rec = Recorder(objective, config.budget)
    _RUNNERS[config.algorithm](config, rec, domain, init, rng)
    return rec.trace()


__all__ = [
    "ALGORITHMS", "PRESETS", "OptimizerConfig", "SolutionTrace", "Recorder", "CMAState",
    "ShadeState", "as_objective", "binomial_crossover", "cmaes_step", "de_step",
    "differential_mutation", "distinct_others", "initial_population", "pbest_count",
    "preset", "repair_covariance", "run", "shade_step",
]
