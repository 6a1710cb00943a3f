"""The three optimizers on a 2-D sphere, with their exact evaluation traces."""
import numpy as np

from gpdiff import Domain, preset, run

domain = Domain()


def sphere(X):
    return np.sum(np.atleast_2d(X) ** 2, axis=1)


for name in ("de-f05", "de-f03", "shade-default", "cmaes-default"):
    cfg = preset(name)
    rng = np.random.default_rng(42)
    init = domain.sample(rng, cfg.population_size)
    trace = run(cfg, sphere, domain, init, rng)
    curve = trace.best_so_far()
    # every evaluation is recorded, never more than the budget
    print(f"{name:14s} evals={len(trace)}  best={trace.best_fitness:.2e}  "
          f"after 100/250/500: {curve[99]:.1e} {curve[249]:.1e} {curve[-1]:.1e}")

# Budgets need not be a multiple of the population size; the last
# generation is simply cut short.
trace = run(preset("shade-default", budget=137), sphere, domain,
            domain.sample(np.random.default_rng(0), 20), np.random.default_rng(1))
print("budget 137 ->", len(trace), "evaluations")
