import math

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from gamowlab import ConfigError, ParseError
from gamowlab.config import (
    ContourSection,
    ExperimentConfig,
    GridSection,
    Level,
    ModelSection,
    EffectiveSection,
    ResonanceSection,
    StateSection,
    TolerancesSection,
    default_config,
    loads,
    parse_yaml,
    validate,
)


def raw_default():
    return default_config().to_dict()


def fields(violations):
    return [v.field for v in violations]


def test_default_is_valid():
    assert validate(default_config()) == []
    assert validate(default_config().to_yaml()) == []


def test_theta_zero():
    raw = raw_default()
    raw["contour"]["theta"] = 0.0
    assert fields(validate(raw)) == ["contour.theta"]


def test_theta_upper_end_is_allowed():
    raw = raw_default()
    raw["contour"]["theta"] = math.pi / 4
    assert validate(raw) == []
    raw["contour"]["theta"] = 0.8
    assert fields(validate(raw)) == ["contour.theta"]


def test_negative_pole_tol():
    raw = raw_default()
    raw["tolerances"]["pole_tol"] = -1e-12
    assert fields(validate(raw)) == ["tolerances.pole_tol"]


def test_negative_start_time():
    raw = raw_default()
    raw["time_grid"]["t_min"] = -1.0
    assert fields(validate(raw)) == ["time_grid.t_min"]


def test_growing_kind_flips_the_half_line():
    raw = raw_default()
    assert fields(validate(raw, kind="growing")) == ["time_grid.t_max"]
    raw["time_grid"].update(t_min=-3.0, t_max=0.0)
    assert validate(raw, kind="growing") == []
    assert fields(validate(raw)) == ["time_grid.t_min"]


def test_every_violation_is_reported():
    raw = raw_default()
    raw["model"]["a"] = 0.0
    raw["region"]["im_max"] = 0.5
    raw["state"]["poles"] = [[1.0, -1.0]]
    raw["contour"]["node_count"] = 3
    raw["energy_grid"]["n_points"] = 0
    raw["tolerances"]["recon_tol"] = 0.0
    raw["output"]["format"] = "xml"
    raw["extra"] = {}
    assert sorted(fields(validate(raw))) == sorted(
        [
            "model.a",
            "region.im_max",
            "state.poles[0]",
            "contour.node_count",
            "energy_grid.n_points",
            "tolerances.recon_tol",
            "output.format",
            "extra",
        ]
    )


def test_missing_and_unknown_keys():
    raw = raw_default()
    del raw["model"]["a"]
    raw["contour"]["angle"] = 0.3
    assert sorted(fields(validate(raw))) == ["contour.angle", "model.a"]


def test_missing_section():
    raw = raw_default()
    del raw["tolerances"]
    assert fields(validate(raw)) == ["tolerances"]


def test_type_errors():
    raw = raw_default()
    raw["model"]["lambda"] = "ten"
    raw["time_grid"]["n_points"] = 2.5
    raw["state"]["powers"] = [True]
    assert sorted(fields(validate(raw))) == ["model.lambda", "state.powers", "time_grid.n_points"]


def test_normalizability_condition():
    raw = raw_default()
    raw["state"]["zeros"] = [[0.0, 0.0], [1.0, 0.0]]
    assert fields(validate(raw)) == ["state.powers"]


def test_optional_sections():
    raw = raw_default()
    raw["resonance"] = {"E_R": 5.0, "Gamma": -1.0}
    raw["effective"] = {"levels": [{"z": [5.0, 0.5], "c": [1.0, 0.0]}], "n_levels": 0}
    assert sorted(fields(validate(raw))) == ["effective.levels[0].z", "effective.n_levels", "resonance.Gamma"]


def test_not_a_mapping():
    assert fields(validate([1, 2])) == ["<root>"]


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        loads("model:\n  lambda: [1, 2\n  a: 1\n")
    assert info.value.line is not None and info.value.column is not None
    assert info.value.line >= 2


def test_exponent_without_dot_is_a_float():
    assert parse_yaml("x: 1e-12")["x"] == 1e-12


def test_config_error_carries_violations():
    raw = raw_default()
    raw["contour"]["theta"] = 0.0
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict(raw)
    assert fields(info.value.violations) == ["contour.theta"]


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
positive = st.floats(1e-300, 1e6, allow_nan=False, allow_infinity=False)
upper = st.builds(complex, finite, positive)


@st.composite
def configs(draw):
    n_poles = draw(st.integers(1, 3))
    powers = tuple(draw(st.integers(1, 4)) for _ in range(n_poles))
    n_zeros = draw(st.integers(0, sum(powers) - 1))
    t0 = draw(st.floats(0, 1e3))
    e0 = draw(finite)
    n_levels = draw(st.integers(0, 3))
    levels = tuple(
        Level(complex(draw(finite), -draw(positive)), complex(draw(finite), draw(finite)), draw(st.none() | st.text(max_size=5)))
        for _ in range(n_levels)
    )
    return ExperimentConfig(
        model=ModelSection(draw(finite), draw(positive)),
        state=StateSection(
            tuple(complex(draw(finite), draw(finite)) for _ in range(n_zeros)),
            tuple(draw(upper) for _ in range(n_poles)),
            powers,
        ),
        contour=ContourSection(draw(st.floats(1e-9, math.pi / 4)), draw(positive), draw(st.integers(16, 10_000))),
        time_grid=GridSection(t0, t0 + draw(st.floats(0, 1e3)), draw(st.integers(1, 10_000))),
        energy_grid=GridSection(e0, e0 + draw(st.floats(0, 1e3)), draw(st.integers(1, 10_000))),
        tolerances=TolerancesSection(draw(positive), draw(positive), draw(positive)),
        resonance=draw(st.none() | st.builds(ResonanceSection, finite, positive)),
        effective=EffectiveSection(levels, draw(st.none() | st.just("poles.csv")), draw(st.integers(1, 5))),
    )


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(configs())
def test_round_trip_is_lossless(cfg):
    assert validate(cfg) == []
    assert loads(cfg.to_yaml()) == cfg
