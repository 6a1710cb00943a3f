"""Landscape descriptors (fitness distance correlation, neutrality) and archive binning."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expr import Domain
from .optim import as_objective

N_BINS = 20
N_SAMPLES = 5000
WALK_STEPS = 5000
EPS = 0.005
STEP = 0.1


def fdc_from_samples(points, fitness, full_output=False):
    """Pearson correlation between fitness and distance to the best sample.

    Returns nan if any fitness is non-finite.  A constant fitness or
    distance gives 0; with ``full_output`` the pair ``(r, degenerate)``
    is returned instead.
    """
    points = np.asarray(points, dtype=float)
    f = np.asarray(fitness, dtype=float)
    if not np.isfinite(f).all():
        return (math.nan, True) if full_output else math.nan
    dist = np.linalg.norm(points - points[np.argmin(f)], axis=1)
    fc, dc = f - f.mean(), dist - dist.mean()
    s_f, s_d = np.sqrt(np.mean(fc**2)), np.sqrt(np.mean(dc**2))
    if s_f == 0 or s_d == 0:
        return (0.0, True) if full_output else 0.0
    r = float(np.clip(np.mean(fc * dc) / (s_f * s_d), -1.0, 1.0))
    return (r, False) if full_output else r


def fdc(h, domain: Domain, n_samples: int = N_SAMPLES, rng=None, full_output=False):
    """FDC of ``h`` from ``n_samples`` uniform samples of ``domain``."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    rng = np.random.default_rng(rng)
    X = domain.sample(rng, n_samples)
    with np.errstate(all="ignore"):
        f = as_objective(h)(X)
    return fdc_from_samples(X, f, full_output)


def random_walk(rng, domain: Domain, steps: int, step: float = STEP) -> np.ndarray:
    """Clamped uniform random walk of ``steps`` points.

    Each move perturbs every coordinate by U(-step*w, step*w), ``w`` being
    the domain width.
    """
    rng = np.random.default_rng(rng)
    moves = rng.uniform(-step * domain.width, step * domain.width,
                        size=(steps - 1, domain.dimension))
    lo, hi = domain.lower, domain.upper
    cur = domain.sample(rng, 1)[0].tolist()
    walk = [cur]
    # scalar loop: far cheaper than per-step numpy calls at this size
    for move in moves.tolist():
        cur = [min(max(c + m, lo), hi) for c, m in zip(cur, move)]
        walk.append(cur)
    return np.array(walk)


def neutrality_from_walk(fitness, eps: float = EPS) -> float:
    """Fraction of consecutive pairs with ``|f_i - f_{i+1}| < eps``."""
    f = np.asarray(fitness, dtype=float)
    with np.errstate(invalid="ignore"):
        diff = np.abs(np.diff(f))
    # non-finite pairs (nan differences) never count as neutral
    return float(np.mean(diff < eps))


def neutrality(h, domain: Domain, T: int = WALK_STEPS, eps: float = EPS, rng=None,
               step: float = STEP) -> float:
    if T < 2:
        raise ValueError("T must be >= 2")
    walk = random_walk(rng, domain, T, step)
    with np.errstate(all="ignore"):
        f = as_objective(h)(walk)
    return neutrality_from_walk(f, eps)


def to_bin(fdc: float, neutrality: float, equal_best: bool, bins: int = N_BINS):
    """Archive cell ``(i, j, k)`` for a descriptor triple (floor, then clamp)."""
    if not (math.isfinite(fdc) and math.isfinite(neutrality)):
        raise ValueError("undefined descriptor")
    i = min(max(math.floor((fdc + 1) / 2 * bins), 0), bins - 1)
    j = min(max(math.floor(neutrality * bins), 0), bins - 1)
    return i, j, int(bool(equal_best))


@dataclass(frozen=True)
class DescriptorVector:
    fdc: float
    neutrality: float
    equal_best: bool

    @property
    def finite(self) -> bool:
        return math.isfinite(self.fdc) and math.isfinite(self.neutrality)

    @property
    def bin(self) -> tuple[int, int, int]:
        return to_bin(self.fdc, self.neutrality, self.equal_best)


def describe(h, domain: Domain, equal_best: bool, fdc_rng, walk_rng,
             n_samples: int = N_SAMPLES, steps: int = WALK_STEPS,
             eps: float = EPS) -> DescriptorVector:
    return DescriptorVector(fdc(h, domain, n_samples, fdc_rng),
                            neutrality(h, domain, steps, eps, walk_rng),
                            bool(equal_best))
