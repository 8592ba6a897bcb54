import math

import pytest

from fptmc import ConfigError, parse_config, parse_config_text, serialize_config
from fptmc.config import apply_overrides

GOOD = """
m = 2
x0 = [0.0, 0.0]
mu = [-0.002, -0.012]
sigma = [[0.2, 0.0], [0.0, 0.2]]
lambda = 1.0
jump_mean = [0.0, 0.0]
jump_sd = [0.2, 0.12]
barrier_intercept = [-0.10536051565782628, -0.05129329438755058]
barrier_slope = [-0.002, -0.012]
horizon = 1.0
engine = both
runs = 1000
dt = 0.001
seed = 7
workers = 2
out = /tmp/fptmc_demo
"""


def test_parse_bundled_example1():
    cfg = parse_config("configs/example1.cfg")
    assert cfg.m == 2
    assert cfg.x0 == (0.0, 0.0)
    assert cfg.mu == (-0.002, -0.012)
    assert cfg.sigma == ((0.2, 0.0), (0.0, 0.2))
    assert cfg.jump_rate == 1.0
    assert cfg.jump_mean == (0.0, 0.0)
    assert cfg.jump_sd == (0.2, 0.12)
    assert cfg.barrier_intercept == (math.log(0.9), math.log(0.95))
    assert cfg.barrier_slope == (-0.002, -0.012)
    assert cfg.horizon == 1.0
    assert cfg.runs == 100_000
    assert cfg.dt == 0.0002
    assert cfg.engine == "both"


def test_bundled_examples_differ_only_in_rate():
    cfgs = [parse_config(f"configs/example{i}.cfg") for i in (1, 2, 3)]
    assert [c.jump_rate for c in cfgs] == [1.0, 3.0, 8.0]
    for c in cfgs[1:]:
        assert c.sigma == cfgs[0].sigma
        assert c.barrier_intercept == cfgs[0].barrier_intercept


def test_parse_good_text():
    cfg = parse_config_text(GOOD)
    assert cfg.workers == 2
    assert cfg.out == "/tmp/fptmc_demo"
    assert cfg.grid_1d == 512  # default


def test_missing_required_key():
    broken = GOOD.replace("x0 = [0.0, 0.0]\n", "")
    with pytest.raises(ConfigError, match="missing required key 'x0'"):
        parse_config_text(broken)


def test_dimension_mismatch():
    broken = GOOD.replace(
        "barrier_slope = [-0.002, -0.012]", "barrier_slope = [-0.002, -0.012, 0.0]"
    )
    with pytest.raises(ConfigError, match="dimension mismatch"):
        parse_config_text(broken)


def test_sigma_shape_mismatch():
    broken = GOOD.replace(
        "sigma = [[0.2, 0.0], [0.0, 0.2]]", "sigma = [[0.2, 0.0]]"
    )
    with pytest.raises(ConfigError, match="sigma"):
        parse_config_text(broken)


def test_degenerate_sigma_row():
    broken = GOOD.replace(
        "sigma = [[0.2, 0.0], [0.0, 0.2]]", "sigma = [[0.0, 0.0], [0.0, 0.2]]"
    )
    with pytest.raises(ConfigError, match="degenerate diffusion row"):
        parse_config_text(broken)


def test_x0_not_above_barrier():
    broken = GOOD.replace("x0 = [0.0, 0.0]", "x0 = [0.0, -0.06]")
    with pytest.raises(ConfigError, match="not above its barrier"):
        parse_config_text(broken)


def test_rate_dt_product_bound():
    broken = GOOD.replace("lambda = 1.0", "lambda = 8.0").replace(
        "dt = 0.001", "dt = 0.2"
    )
    with pytest.raises(ConfigError, match="must be < 1"):
        parse_config_text(broken)


def test_dt_required_for_baseline():
    broken = GOOD.replace("dt = 0.001\n", "")
    with pytest.raises(ConfigError, match="missing required key 'dt'"):
        parse_config_text(broken)
    # pure bridge engine needs no dt
    ok = broken.replace("engine = both", "engine = unif")
    assert parse_config_text(ok).dt is None


def test_unknown_engine():
    broken = GOOD.replace("engine = both", "engine = fast")
    with pytest.raises(ConfigError, match="engine must be one of"):
        parse_config_text(broken)


def test_unknown_key_and_syntax():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text(GOOD + "\ncolour = blue\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config_text(GOOD + "\njust some words\n")
    with pytest.raises(ConfigError, match="duplicate key"):
        parse_config_text(GOOD + "\nm = 2\n")


def test_error_reports_line_number():
    broken = GOOD.replace("mu = [-0.002, -0.012]", "mu = oops")
    line = broken.splitlines().index("mu = oops") + 1
    with pytest.raises(ConfigError, match=f":{line}: mu must be a list of numbers"):
        parse_config_text(broken)


def test_roundtrip_identity():
    cfg = parse_config_text(GOOD)
    again = parse_config_text(serialize_config(cfg))
    assert again == cfg


def test_roundtrip_bundled_configs():
    for i in (1, 2, 3):
        cfg = parse_config(f"configs/example{i}.cfg")
        assert parse_config_text(serialize_config(cfg)) == cfg


def test_overrides_applied_and_revalidated():
    cfg = parse_config_text(GOOD)
    bumped = apply_overrides(cfg, runs=5000, engine="unif")
    assert bumped.runs == 5000
    assert bumped.engine == "unif"
    assert bumped.sigma == cfg.sigma
    with pytest.raises(ConfigError, match="must be < 1"):
        apply_overrides(parse_config_text(GOOD.replace("lambda = 1.0", "lambda = 8.0")), dt=0.2)


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read config"):
        parse_config("/nonexistent/path.cfg")
