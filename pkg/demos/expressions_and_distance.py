"""Parse a function, watch two DE configurations optimise it, and measure
how differently they searched."""
import numpy as np

from gpdiff import Domain, evaluate_batch, evaluate_pair, parse, preset, random_tree, to_sexpr

domain = Domain(-5, 5, 2)

# Functions are plain s-expressions over x0, x1 and integer constants.
h = parse("(add (mul x0 x0) (mul 3 (sin x1)))")
print("h =", h, "height", h.height, "size", h.size)
X = np.array([[0.0, 0.0], [1.0, -1.5], [4.0, 2.0]])
print("h(X) =", evaluate_batch(h, X))

# Random trees come from ramped half-and-half; every operator is total.
rng = np.random.default_rng(0)
for _ in range(3):
    print("random:", to_sexpr(random_tree(rng, domain)))

# Behavioural distance: run both optimizers from a shared initial population
# and compare, per coordinate, the distributions of every point they sampled.
de5, de3 = preset("de-f05"), preset("de-f03")
for name, f in [("sphere", parse("(add (mul x0 x0) (mul x1 x1))")), ("h", h)]:
    s = evaluate_pair(f, de5, de3, domain, n=3, seed=1)
    print(f"{name:7s} d={s.d:.3f}  best {s.best_f1:.3g} vs {s.best_f2:.3g}  equal_best={s.equal_best}")

# Identical configurations share one random stream, so d is exactly zero.
print("same optimizer:", evaluate_pair(h, de5, de5, domain, n=3, seed=1).d)
