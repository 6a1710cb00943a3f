"""Success-history based adaptive DE (SHADE).

Per individual, F is drawn from Cauchy(M_F[r], 0.1) and CR from
Normal(M_CR[r], 0.1) for a random memory slot r.  Mutation is
current-to-pbest/1 with an external archive of replaced parents.  After
each generation the (F, CR) pairs of strictly improving trials are folded
into one memory slot (weighted Lehmer mean for F, weighted arithmetic mean
for CR), slots being overwritten round-robin.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..expr import Domain
from .core import OptimizerConfig, Recorder, binomial_crossover

SCALE_F = 0.1
SCALE_CR = 0.1


@dataclass
class ShadeState:
    population: np.ndarray
    fitness: np.ndarray
    memory_f: np.ndarray
    memory_cr: np.ndarray
    p_max: float = 0.2
    archive: np.ndarray = field(default=None)
    slot: int = 0

    def __post_init__(self):
        if self.archive is None:
            self.archive = np.empty((0, self.population.shape[1]))

    @classmethod
    def start(cls, population, fitness, H: int, p_max: float) -> "ShadeState":
        return cls(np.asarray(population, float), np.asarray(fitness, float),
                   np.full(H, 0.5), np.full(H, 0.5), p_max)


def pbest_count(p, n: int):
    """Size of the top-``p`` fraction used for pbest selection (at least 2)."""
    return np.clip(np.rint(np.asarray(p) * n).astype(int), 2, n)


def sample_f(rng: np.random.Generator, loc: np.ndarray) -> np.ndarray:
    """Cauchy draws, regenerated while <= 0 and truncated at 1."""
    F = loc + SCALE_F * rng.standard_cauchy(len(loc))
    bad = F <= 0
    while bad.any():
        F[bad] = loc[bad] + SCALE_F * rng.standard_cauchy(int(bad.sum()))
        bad = F <= 0
    return np.minimum(F, 1.0)


def sample_cr(rng: np.random.Generator, loc: np.ndarray) -> np.ndarray:
    return np.clip(rng.normal(loc, SCALE_CR), 0.0, 1.0)


def _second_donor(rng, n, n_union, r1):
    # index into population+archive, distinct from i and from r1
    i = np.arange(n)
    r2 = rng.integers(n_union, size=n)
    bad = (r2 == i) | (r2 == r1)
    while bad.any():
        r2[bad] = rng.integers(n_union, size=int(bad.sum()))
        bad = (r2 == i) | (r2 == r1)
    return r2


def success_weights(delta: np.ndarray) -> np.ndarray:
    inf = np.isinf(delta)
    w = inf.astype(float) if inf.any() else delta
    return w / w.sum()


def shade_step(state: ShadeState, rng: np.random.Generator, domain: Domain,
               evaluate) -> ShadeState:
    pop, fit = state.population, state.fitness
    n = len(pop)
    H = len(state.memory_f)

    r = rng.integers(H, size=n)
    CR = sample_cr(rng, state.memory_cr[r])
    F = sample_f(rng, state.memory_f[r])

    p_min = 2.0 / n
    p = rng.uniform(p_min, max(state.p_max, p_min), size=n)
    order = np.argsort(fit, kind="stable")
    pbest = order[rng.integers(0, pbest_count(p, n))]

    r1 = (np.arange(n) + 1 + rng.integers(n - 1, size=n)) % n
    union = np.vstack([pop, state.archive])
    r2 = _second_donor(rng, n, len(union), r1)

    Fc = F[:, None]
    mutants = pop + Fc * (pop[pbest] - pop) + Fc * (pop[r1] - union[r2])
    trials = domain.clip(binomial_crossover(rng, pop, mutants, CR))

    f = evaluate(trials)
    m = len(f)
    improved = np.zeros(n, bool)
    improved[:m] = f < fit[:m]
    accept = np.zeros(n, bool)
    accept[:m] = f <= fit[:m]

    archive = np.vstack([state.archive, pop[improved]])
    if len(archive) > n:
        keep = np.sort(rng.choice(len(archive), n, replace=False))
        archive = archive[keep]

    memory_f, memory_cr, slot = state.memory_f, state.memory_cr, state.slot
    if improved.any():
        delta = fit[improved] - f[improved[:m]]
        w = success_weights(delta)
        sf, scr = F[improved], CR[improved]
        memory_f, memory_cr = memory_f.copy(), memory_cr.copy()
        memory_f[slot] = np.sum(w * sf**2) / np.sum(w * sf)
        memory_cr[slot] = np.sum(w * scr)
        slot = (slot + 1) % H

    new_pop, new_fit = pop.copy(), fit.copy()
    new_pop[:m][accept[:m]] = trials[:m][accept[:m]]
    new_fit[:m][accept[:m]] = f[accept[:m]]
    return replace(state, population=new_pop, fitness=new_fit, memory_f=memory_f,
                   memory_cr=memory_cr, archive=archive, slot=slot)


def run_shade(config: OptimizerConfig, rec: Recorder, domain: Domain, init: np.ndarray,
              rng: np.random.Generator) -> ShadeState:
    pop = np.array(init, dtype=float)
    state = ShadeState.start(pop, rec(pop), config.H, config.p_max)
    while rec.remaining > 0:
        state = shade_step(state, rng, domain, rec)
    return state
