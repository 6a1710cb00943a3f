"""Batched MAP-Elites over expression trees.

Each generation produces ``N`` candidate functions: random trees while the
archive has fewer than ``s`` filled cells, otherwise children of uniformly
selected elites (pairwise subtree crossover, then per-child subtree
mutation).  A candidate is scored by the behavioural distance between the
two configured optimizers and filed under its (FDC, neutrality, equal-best)
cell, replacing the incumbent only if its distance is strictly larger.
"""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _rng, expr, fla
from .behavior import EPS_BEST, BehaviorScore, evaluate_pair
from .expr import Domain, Node
from .optim import OptimizerConfig, preset

log = logging.getLogger(__name__)

N_CELLS = fla.N_BINS * fla.N_BINS * 2


@dataclass
class EngineConfig:
    seed: int
    opt1: OptimizerConfig = field(default_factory=lambda: preset("de-f05"))
    opt2: OptimizerConfig = field(default_factory=lambda: preset("de-f03"))
    domain: Domain = field(default_factory=Domain)
    population_size: int = 50
    max_generations: int = 1000
    crossover_rate: float = 0.9
    mutation_rate: float = 0.3
    random_init_threshold: int = 200
    repetitions: int = 3
    init_height: tuple = expr.INIT_HEIGHT
    max_height: int = expr.MAX_HEIGHT
    fdc_samples: int = fla.N_SAMPLES
    walk_steps: int = fla.WALK_STEPS
    eps: float = fla.EPS
    eps_best: float = EPS_BEST
    pooled: bool = False

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("seed required")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 2")
        if not 0 <= self.random_init_threshold <= N_CELLS:
            raise ValueError(f"random_init_threshold must lie in [0, {N_CELLS}]")
        if self.max_generations < 0 or self.repetitions < 1:
            raise ValueError("max_generations must be >= 0 and repetitions >= 1")
        self.init_height = tuple(self.init_height)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["init_height"] = list(self.init_height)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        d = dict(d)
        for key in ("opt1", "opt2"):
            if isinstance(d.get(key), dict):
                d[key] = OptimizerConfig.from_dict(d[key])
        if isinstance(d.get("domain"), dict):
            d["domain"] = Domain(**d["domain"])
        return cls(**d)


@dataclass
class Elite:
    tree: Node
    score: BehaviorScore
    descriptors: fla.DescriptorVector
    generation_found: int

    @property
    def d(self) -> float:
        return self.score.d

    @property
    def bin(self) -> tuple[int, int, int]:
        return self.descriptors.bin

    @property
    def expr(self) -> str:
        return expr.to_sexpr(self.tree)

    def to_dict(self) -> dict:
        return {
            "bin": list(self.bin),
            "expr": self.expr,
            "d": self.score.d,
            "best_f1": self.score.best_f1,
            "best_f2": self.score.best_f2,
            "fdc": self.descriptors.fdc,
            "neutrality": self.descriptors.neutrality,
            "equal_best": self.descriptors.equal_best,
            "generation_found": self.generation_found,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Elite":
        score = BehaviorScore(d["d"], d["best_f1"], d["best_f2"], d["equal_best"])
        desc = fla.DescriptorVector(d["fdc"], d["neutrality"], d["equal_best"])
        elite = cls(expr.parse(d["expr"]), score, desc, d["generation_found"])
        if "bin" in d and tuple(d["bin"]) != elite.bin:
            raise ValueError(f"elite {d['expr']} filed under {d['bin']}, expected {elite.bin}")
        return elite


class Archive:
    """Grid of at most one elite per ``(fdc_bin, neutrality_bin, equal_best)`` cell."""

    def __init__(self):
        self.cells: dict[tuple[int, int, int], Elite] = {}
        self.history: list[dict] = []

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.elites())

    def elites(self) -> list[Elite]:
        return [self.cells[b] for b in sorted(self.cells)]

    def insert(self, candidate: Elite) -> bool:
        """File ``candidate``; True if it took the cell (empty, or strictly larger d)."""
        if not candidate.score.valid or not np.isfinite(candidate.d) or not candidate.descriptors.finite:
            return False
        b = candidate.bin
        incumbent = self.cells.get(b)
        if incumbent is None or candidate.d > incumbent.d:
            self.cells[b] = candidate
            return True
        return False

    def sample(self, rng: np.random.Generator, n: int) -> list[Elite]:
        elites = self.elites()
        return [elites[i] for i in rng.integers(len(elites), size=n)]

    def heatmap(self, layer: int) -> np.ndarray:
        """20x20 grid of d (rows: FDC bin, columns: neutrality bin); nan where empty."""
        grid = np.full((fla.N_BINS, fla.N_BINS), np.nan)
        for (i, j, k), e in self.cells.items():
            if k == layer:
                grid[i, j] = e.d
        return grid

    def stats(self) -> dict:
        ds = [e.d for e in self.cells.values()]
        return {"filled": len(ds),
                "max_d": max(ds) if ds else float("nan"),
                "mean_d": float(np.mean(ds)) if ds else float("nan")}

    def to_dict(self, config: Optional[EngineConfig] = None) -> dict:
        out = {}
        if config is not None:
            out["config"] = config.to_dict()
            out["seed"] = config.seed
        out["cells"] = [e.to_dict() for e in self.elites()]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Archive":
        archive = cls()
        for cell in d.get("cells", []):
            e = Elite.from_dict(cell)
            archive.cells[e.bin] = e
        return archive


def generate_batch(archive: Archive, config: EngineConfig, rng: np.random.Generator) -> list[Node]:
    """Next ``N`` candidate trees."""
    N = config.population_size
    if len(archive) < config.random_init_threshold:
        return [expr.random_tree(rng, config.domain, config.init_height) for _ in range(N)]
    parents = [e.tree for e in archive.sample(rng, N)]
    children = []
    for a, b in zip(parents[0::2], parents[1::2]):
        if rng.random() < config.crossover_rate:
            a, b = expr.subtree_crossover(rng, a, b, config.max_height)
        children += [a, b]
    n_vars = config.domain.dimension
    return [
        expr.subtree_mutation(rng, c, n_vars, config.max_height)
        if rng.random() < config.mutation_rate else c
        for c in children
    ]


def evaluate_candidate(tree: Node, config: EngineConfig, generation: int, index: int) -> Elite:
    """Score and describe one candidate using streams keyed by (seed, generation, index)."""
    key = (config.seed, generation, index)
    score = evaluate_pair(tree, config.opt1, config.opt2, config.domain, config.repetitions,
                          seed=(key, _rng.BEHAVIOR), pooled=config.pooled,
                          eps_best=config.eps_best)
    desc = fla.describe(tree, config.domain, score.equal_best,
                        _rng.stream(key, _rng.FDC), _rng.stream(key, _rng.WALK),
                        config.fdc_samples, config.walk_steps, config.eps)
    if not desc.finite:
        score.valid = False
    return Elite(tree, score, desc, generation)


def _evaluate_job(args):
    return evaluate_candidate(*args)


def evolve(config: EngineConfig, progress: Optional[Callable[[dict], None]] = None,
           workers: int = 1, archive: Optional[Archive] = None) -> Archive:
    """Run ``config.max_generations`` generations and return the archive.

    After every generation a record ``{generation, filled, max_d, mean_d,
    inserted, invalid}`` is appended to ``archive.history`` and passed to
    ``progress``.  Results do not depend on ``workers``: candidates are
    inserted in index order.
    """
    archive = Archive() if archive is None else archive
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for g in range(config.max_generations):
            batch = generate_batch(archive, config, _rng.stream(config.seed, g, _rng.VARIATION))
            jobs = [(tree, config, g, i) for i, tree in enumerate(batch)]
            results = pool.map(_evaluate_job, jobs) if pool else map(_evaluate_job, jobs)
            inserted = invalid = 0
            for elite in results:
                if not elite.score.valid:
                    invalid += 1
                    log.debug("discarding invalid candidate %s", elite.expr)
                    continue
                inserted += archive.insert(elite)
            record = {"generation": g, **archive.stats(), "inserted": inserted, "invalid": invalid}
            archive.history.append(record)
            log.info("gen %d: %d cells, max d %.4f", g, record["filled"], record["max_d"])
            if progress is not None:
                progress(record)
    finally:
        if pool is not None:
            pool.shutdown()
    return archive


def best_separating(archive: Archive, require_unequal_best: bool = True) -> Elite:
    """Elite with the largest d, optionally among those with differing best fitness."""
    pool = [e for e in archive.elites()
            if not (require_unequal_best and e.descriptors.equal_best)]
    if not pool:
        raise LookupError("no separating elite")
    return max(pool, key=lambda e: e.d)
