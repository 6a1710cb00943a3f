"""(mu/mu_w, lambda)-CMA-ES with default strategy parameters.

Samples are clamped into the box before evaluation and the clamped points
drive the update, so the mean never leaves the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..expr import Domain
from .core import OptimizerConfig, Recorder

EIG_FLOOR = 1e-12


@dataclass(frozen=True)
class CMAParams:
    lam: int
    mu: int
    weights: np.ndarray
    mueff: float
    cc: float
    cs: float
    c1: float
    cmu: float
    damps: float
    chi_n: float

    @classmethod
    def default(cls, dim: int, lam: int) -> "CMAParams":
        mu = max(lam // 2, 1)
        w = math.log((lam + 1) / 2) - np.log(np.arange(1, mu + 1))
        w = w / w.sum()
        mueff = 1.0 / np.sum(w**2)
        n = dim
        cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        cs = (mueff + 2) / (n + mueff + 5)
        c1 = 2 / ((n + 1.3) ** 2 + mueff)
        cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
        chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))
        return cls(lam, mu, w, mueff, cc, cs, c1, cmu, damps, chi_n)


@dataclass
class CMAState:
    mean: np.ndarray
    sigma: float
    C: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    params: CMAParams
    generation: int = 0

    @classmethod
    def start(cls, mean, sigma0: float, lam: int) -> "CMAState":
        mean = np.asarray(mean, dtype=float)
        n = len(mean)
        return cls(mean, float(sigma0), np.eye(n), np.zeros(n), np.zeros(n),
                   CMAParams.default(n, lam))


def repair_covariance(C: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrise ``C`` and floor its eigenvalues at ``EIG_FLOOR * max``.

    Returns ``(C, eigenvalues, eigenvectors)`` of the repaired matrix.
    """
    C = (C + C.T) / 2
    vals, vecs = np.linalg.eigh(C)
    top = max(vals.max(), np.finfo(float).tiny)
    floor = EIG_FLOOR * top
    if vals.min() < floor:
        vals = np.maximum(vals, floor)
        C = (vecs * vals) @ vecs.T
    return C, vals, vecs


def cmaes_step(state: CMAState, rng: np.random.Generator, domain: Domain,
               evaluate) -> CMAState:
    par = state.params
    n = len(state.mean)
    C, vals, B = repair_covariance(state.C)
    D = np.sqrt(vals)

    z = rng.standard_normal((par.lam, n))
    x = domain.clip(state.mean + state.sigma * (z * D) @ B.T)
    f = evaluate(x)
    if len(f) < par.lam:
        # budget ran out mid-generation; nothing left to adapt for
        return replace(state, C=C)

    y = (x - state.mean) / state.sigma
    sel = np.argsort(f, kind="stable")[: par.mu]
    y_w = par.weights @ y[sel]
    mean = state.mean + state.sigma * y_w

    inv_sqrt = (B / D) @ B.T
    ps = (1 - par.cs) * state.p_sigma + math.sqrt(par.cs * (2 - par.cs) * par.mueff) * inv_sqrt @ y_w
    g = state.generation + 1
    ps_norm = np.linalg.norm(ps)
    hsig = ps_norm / math.sqrt(1 - (1 - par.cs) ** (2 * g)) < (1.4 + 2 / (n + 1)) * par.chi_n
    pc = (1 - par.cc) * state.p_c + hsig * math.sqrt(par.cc * (2 - par.cc) * par.mueff) * y_w

    rank_mu = (y[sel].T * par.weights) @ y[sel]
    C = ((1 - par.c1 - par.cmu) * C
         + par.c1 * (np.outer(pc, pc) + (1 - hsig) * par.cc * (2 - par.cc) * C)
         + par.cmu * rank_mu)
    sigma = state.sigma * math.exp(par.cs / par.damps * (ps_norm / par.chi_n - 1))
    return replace(state, mean=mean, sigma=sigma, C=C, p_sigma=ps, p_c=pc, generation=g)


def run_cmaes(config: OptimizerConfig, rec: Recorder, domain: Domain, init: np.ndarray,
              rng: np.random.Generator) -> CMAState:
    init = np.asarray(init, dtype=float)
    rec(init)
    state = CMAState.start(init.mean(axis=0), config.sigma0, config.population_size)
    while rec.remaining > 0:
        state = cmaes_step(state, rng, domain, rec)
    return state
