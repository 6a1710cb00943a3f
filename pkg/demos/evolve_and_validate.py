"""A small MAP-Elites run that searches for functions separating DE with
F=0.5 from DE with F=0.3, then a 10-D check of the best find.

Takes roughly fifteen seconds on one core.
"""
from gpdiff import (Domain, EngineConfig, best_separating, evaluate_pair, evolve, lift, parse,
                    preset, validate)

config = EngineConfig(seed=1, opt1=preset("de-f05", budget=200), opt2=preset("de-f03", budget=200),
                      population_size=20, max_generations=50, repetitions=2)


def report(rec):
    if rec["generation"] % 10 == 9:
        print(f"gen {rec['generation'] + 1:3d}: {rec['filled']} cells, max d {rec['max_d']:.3f}")


archive = evolve(config, report)
best = best_separating(archive)
print("\nbest separating function:", best.expr)
print(f"d = {best.d:.3f}, bests {best.score.best_f1:.3g} vs {best.score.best_f2:.3g}, cell {best.bin}")

sphere = parse("(add (mul x0 x0) (mul x1 x1))")
ref = evaluate_pair(sphere, config.opt1, config.opt2, config.domain, 2, seed=config.seed)
print(f"sphere under the same protocol: d = {ref.d:.3f}")

# Lift both functions to ten dimensions and compare where each DE ends up.
dom10 = Domain(dimension=10)
for name, tree in (("evolved", best.tree), ("sphere", sphere)):
    rep = validate(lift(tree, 10), preset("de-f05"), preset("de-f03"), dom10,
                   repetitions=11, budget=5000)
    print(f"10-D {name:8s} delta_x = {rep.delta_x:.3f}  delta_f = {rep.delta_f:.3f}")

# Archive coverage, rows are FDC bins and columns neutrality bins.
grid = archive.heatmap(0)
print("\nlayer 0 occupancy:")
for row in grid[::-1]:
    print("".join("#" if v == v else "." for v in row))
