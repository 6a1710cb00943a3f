import json

import numpy as np
import pytest

from gpdiff import engine, fla
from gpdiff.behavior import BehaviorScore
from gpdiff.engine import Archive, Elite, EngineConfig, best_separating, evolve, generate_batch
from gpdiff.expr import Const, Var, parse
from gpdiff.optim import preset


def small_config(**kw):
    base = dict(seed=7, opt1=preset("de-f05", budget=40, population_size=10),
                opt2=preset("de-f03", budget=40, population_size=10),
                population_size=6, max_generations=3, repetitions=1,
                random_init_threshold=4, fdc_samples=200, walk_steps=200)
    base.update(kw)
    return EngineConfig(**base)


def make_elite(d, bin_=(0, 0, 0), equal_best=None, tree=None):
    i, j, k = bin_
    # descriptor values at the lower edge of the requested cell
    fdc = (i + 0.5) / 10 - 1
    neu = (j + 0.5) / 20
    eb = bool(k) if equal_best is None else equal_best
    score = BehaviorScore(d, 0.0, 0.0 if eb else 1.0, eb)
    return Elite(tree or Var(0), score, fla.DescriptorVector(fdc, neu, eb), 0)


def test_config_validation():
    with pytest.raises(ValueError, match="seed required"):
        EngineConfig(seed=None)
    with pytest.raises(ValueError):
        EngineConfig(seed=0, population_size=5)
    with pytest.raises(ValueError):
        EngineConfig(seed=0, crossover_rate=1.5)
    with pytest.raises(ValueError):
        EngineConfig(seed=0, random_init_threshold=801)


def test_config_round_trip():
    cfg = small_config()
    assert EngineConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


# -- generate_batch -----------------------------------------------------------

def test_empty_archive_gives_random_trees():
    cfg = small_config()
    batch = generate_batch(Archive(), cfg, np.random.default_rng(0))
    assert len(batch) == cfg.population_size
    assert all(3 <= t.height <= 6 for t in batch)


def test_threshold_is_strict():
    cfg = small_config(random_init_threshold=3, crossover_rate=0, mutation_rate=0)
    archive = Archive()
    for i in range(2):
        archive.insert(make_elite(1.0, (i, 0, 0), tree=Const(i)))
    batch = generate_batch(archive, cfg, np.random.default_rng(0))
    # s - 1 filled cells: still random initialization, so no bare constants
    assert not all(t in (Const(0), Const(1)) for t in batch)
    archive.insert(make_elite(1.0, (2, 0, 0), tree=Const(2)))
    batch = generate_batch(archive, cfg, np.random.default_rng(0))
    assert all(t in (Const(0), Const(1), Const(2)) for t in batch)


def test_identity_variation_returns_selected_parents():
    cfg = small_config(random_init_threshold=2, crossover_rate=0, mutation_rate=0)
    archive = Archive()
    trees = [parse("(add x0 1)"), parse("(sin x1)"), parse("(neg x0)")]
    for i, t in enumerate(trees):
        archive.insert(make_elite(1.0, (i, 0, 0), tree=t))
    rng = np.random.default_rng(4)
    expected = [e.tree for e in archive.sample(np.random.default_rng(4), cfg.population_size)]
    assert generate_batch(archive, cfg, rng) == expected


# -- archive_insert -----------------------------------------------------------

def test_insert_examples():
    a = Archive()
    assert a.insert(make_elite(5.0))
    assert not a.insert(make_elite(5.0))
    assert a.cells[(0, 0, 0)].d == 5.0

    b = Archive()
    b.insert(make_elite(1.0))
    assert b.insert(make_elite(2.0))
    assert b.cells[(0, 0, 0)].d == 2.0
    assert not b.insert(make_elite(1.5))


def test_insert_rejects_invalid():
    a = Archive()
    bad = make_elite(3.0)
    bad.score.valid = False
    assert not a.insert(bad)
    assert not a.insert(make_elite(float("nan")))
    assert len(a) == 0


# -- evolve -------------------------------------------------------------------

def test_zero_generations_empty():
    assert len(evolve(small_config(max_generations=0))) == 0


def test_evolve_deterministic():
    a = evolve(small_config())
    b = evolve(small_config())
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    assert len(a) > 0


def test_evolve_workers_do_not_change_result():
    a = evolve(small_config(max_generations=2))
    b = evolve(small_config(max_generations=2), workers=2)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


def test_monotone_archive_and_no_misfiling():
    cfg = small_config(max_generations=5)
    archive = Archive()
    snapshots = []
    evolve(cfg, progress=lambda rec: snapshots.append({b: e.d for b, e in archive.cells.items()}),
           archive=archive)
    for before, after in zip(snapshots, snapshots[1:]):
        assert len(after) >= len(before)
        for b, d in before.items():
            assert after[b] >= d
    for b, e in archive.cells.items():
        assert b == fla.to_bin(e.descriptors.fdc, e.descriptors.neutrality, e.descriptors.equal_best)
    assert [r["filled"] for r in archive.history] == [len(s) for s in snapshots]


def test_evaluation_accounting(monkeypatch):
    from gpdiff import behavior
    calls = {"pair": 0, "run": 0}
    real_pair, real_run = engine.evaluate_pair, behavior.run

    def counting_pair(*a, **kw):
        calls["pair"] += 1
        return real_pair(*a, **kw)

    def counting_run(*a, **kw):
        calls["run"] += 1
        return real_run(*a, **kw)

    monkeypatch.setattr(engine, "evaluate_pair", counting_pair)
    monkeypatch.setattr(behavior, "run", counting_run)
    cfg = small_config(max_generations=2, repetitions=2)
    evolve(cfg)
    G, N, n = 2, cfg.population_size, cfg.repetitions
    assert calls["pair"] == G * N
    assert calls["run"] == 2 * n * G * N


# -- best_separating / persistence --------------------------------------------

def test_best_separating_examples():
    single = Archive()
    single.insert(make_elite(1.0))
    assert best_separating(single).d == 1.0

    eq = Archive()
    eq.insert(make_elite(4.0, (0, 0, 1)))
    with pytest.raises(LookupError, match="no separating elite"):
        best_separating(eq, require_unequal_best=True)

    a = Archive()
    for i, d in enumerate([1, 7, 3]):
        a.insert(make_elite(float(d), (i, 0, 0)))
    assert best_separating(a, require_unequal_best=False).d == 7


def test_archive_json_round_trip():
    cfg = small_config()
    archive = evolve(cfg)
    text = json.dumps(archive.to_dict(cfg))
    back = Archive.from_dict(json.loads(text))
    assert json.dumps(back.to_dict(cfg)) == text
    doc = json.loads(text)
    assert doc["seed"] == cfg.seed and "config" in doc
    assert set(doc["cells"][0]) == {"bin", "expr", "d", "best_f1", "best_f2", "fdc",
                                    "neutrality", "equal_best", "generation_found"}


def test_from_dict_detects_misfiled_elite():
    cell = make_elite(1.0).to_dict()
    cell["bin"] = [5, 5, 0]
    with pytest.raises(ValueError):
        Archive.from_dict({"cells": [cell]})


def test_heatmap_layout():
    a = Archive()
    a.insert(make_elite(2.5, (0, 0, 0)))
    a.insert(make_elite(1.5, (3, 7, 1)))
    h0, h1 = a.heatmap(0), a.heatmap(1)
    assert h0.shape == (20, 20) and h0[0, 0] == 2.5
    assert np.isnan(h0).sum() == 399
    assert h1[3, 7] == 1.5
