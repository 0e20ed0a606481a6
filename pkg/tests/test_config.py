import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfheat.config import ConfigError, RunConfig


def test_defaults_validate():
    cfg = RunConfig()
    cfg.validate()
    assert cfg.surface == "right_helicoid"
    assert isinstance(cfg.r_grid, tuple)


def test_json_round_trip():
    cfg = RunConfig(surface="hyperbolic_helicoid", alpha=0.4, points=((0.1, 0.2),), t_grid=(0.1,))
    back = RunConfig.from_json(cfg.to_json())
    assert back == cfg
    assert back.digest() == cfg.digest()


def test_to_json_is_sorted():
    keys = list(json.loads(RunConfig().to_json()))
    assert keys == sorted(keys)


def test_load_from_file(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"surface": "catenoid", "r_grid": [0.5, 1.0]}))
    cfg = RunConfig.load(p)
    assert cfg.surface == "catenoid" and cfg.r_grid == (0.5, 1.0)


@pytest.mark.parametrize("bad", [
    {"r_grid": []}, {"r_grid": [0.5, -1]}, {"t_grid": [0]}, {"u_count": 0},
    {"u_range": [1, 2, 3]}, {"points": [[1, 2, 3]]}, {"alpha": -1.0}, {"format": "xml"},
    {"density_method": "guess"}, {"density_order": 1},
])
def test_validation_errors(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(bad)


def test_unknown_keys_and_bad_json():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"surfac": "catenoid"})
    with pytest.raises(ConfigError):
        RunConfig.from_json("{not json")


def test_replace_skips_none():
    cfg = RunConfig().replace(surface="catenoid", alpha=None)
    assert cfg.surface == "catenoid" and cfg.alpha is None


def test_digest_ignores_output_and_threads():
    a = RunConfig()
    assert a.digest() == a.replace(output="x.csv", threads=4).digest()
    assert a.digest() != a.replace(seed=1).digest()
    assert len(a.digest()) == 16


@given(seed=st.integers(0, 2 ** 31), n=st.integers(1, 50))
def test_digest_deterministic(seed, n):
    a = RunConfig(seed=seed, n_points=n)
    assert a.digest() == RunConfig.from_json(a.to_json()).digest()
