import json

import pytest

from foawave.config import RunConfig
from foawave.errors import ConfigError
from foawave.grid import Grid


def test_defaults_resolve_to_dw():
    cfg = RunConfig().resolved()
    assert (cfg.m, cfg.d, cfg.c, cfg.tau) == (1 / 25000, 1 / 100, 1.0, 0.04)
    assert (cfg.alpha1, cfg.alpha2, cfg.lam, cfg.k) == (1.0, 1.0, 5.0, 250000.0)
    assert cfg.n_scanpaths == 5


def test_h_preset():
    p = RunConfig(model="H").pde_params()
    assert (p.m, p.d, p.c) == (0.0, 1 / 2500, 1.0)


def test_explicit_values_override_preset():
    p = RunConfig(model="H", d=0.5, tau=0.01).pde_params()
    assert (p.m, p.d, p.tau) == (0.0, 0.5, 0.01)


def test_custom_needs_m_and_d():
    with pytest.raises(ConfigError):
        RunConfig(model="custom", m=1.0)
    assert RunConfig(model="custom", m=1.0, d=0.1).pde_params().m == 1.0


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="lamda"):
        RunConfig.from_dict({"lamda": 3})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"lam": 3})


def test_lambda_key_and_round_trip(tmp_path):
    cfg = RunConfig.from_dict({"lambda": 3.0, "seed": 9, "bench_sizes": [32]})
    assert cfg.lam == 3.0 and cfg.bench_sizes == (32,)
    doc = cfg.as_dict()
    assert doc["lambda"] == 3.0 and "lam" not in doc
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    assert RunConfig.load(path) == cfg.resolved()


def test_bad_values():
    for bad in ({"model": "W"}, {"scheme": "rk4"}, {"n_scanpaths": 0}, {"duration": 0}):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(bad)


def test_load_errors(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(p)
    p.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.load(p)


def test_override_ignores_none():
    cfg = RunConfig(seed=3)
    assert cfg.override(seed=None, duration=2.0) == RunConfig(seed=3, duration=2.0)


def test_component_params():
    cfg = RunConfig(normalize_mass=True, jitter=2.0, regions_rows=3, stde_k=1)
    assert cfg.mass_params().normalize
    assert cfg.dynamics_params(seed=11).seed == 11
    assert cfg.dynamics_params().jitter == 2.0
    ev = cfg.eval_config(Grid(64, 48))
    assert ev.regions == (3, 5) and ev.stde_k == 1 and ev.sigma_for() == 2.0
