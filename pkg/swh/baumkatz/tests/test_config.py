# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import pytest

from swh.baumkatz.classes import DependenceRegime
from swh.baumkatz.config import (
    index_list,
    merge,
    number,
    number_list,
    parse_function,
    parse_params,
    parse_process,
    positive_int,
    read,
    require_seed,
)
from swh.baumkatz.exception import ConfigurationError, ValidationError
from swh.baumkatz.funclib import DyadicFunction, LogTower
from swh.baumkatz.generators import ProcessKind


def test_read_json(swh_config, swh_baumkatz_config):
    assert read(swh_config) == swh_baumkatz_config


def test_read_yaml(tmp_path):
    path = tmp_path / "experiment.yml"
    path.write_text("r: 1\np: 3\nregime: MDS\nsimulate:\n  trials: 10\n")
    assert read(str(path)) == {
        "r": 1,
        "p": 3,
        "regime": "MDS",
        "simulate": {"trials": 10},
    }


def test_read_empty(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert read(str(path)) == {}
    assert read(None) == {}


@pytest.mark.parametrize("content", ["[1, 2]", "{r: [1, 2"])
def test_read_invalid(tmp_path, content):
    path = tmp_path / "broken.yml"
    path.write_text(content)
    with pytest.raises(ConfigurationError):
        read(str(path))


def test_merge_precedence():
    config = {"seed": 1, "trials": 5, "simulate": {"trials": 7}, "oracle": {"K": 3}}
    assert merge(config, "simulate") == {"seed": 1, "trials": 7}
    assert merge(config, "simulate", {"trials": 9, "seed": None}) == {
        "seed": 1,
        "trials": 9,
    }
    assert merge(config, "oracle") == {"seed": 1, "trials": 5, "K": 3}


def test_merge_unknown_keys():
    with pytest.raises(ConfigurationError, match="unknown configuration keys: colour"):
        merge({"colour": "blue"}, "simulate")
    with pytest.raises(ConfigurationError, match="must be a mapping"):
        merge({"simulate": 3}, "simulate")


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True, "42"])
def test_require_seed_invalid(seed):
    with pytest.raises(ConfigurationError):
        require_seed({"seed": seed})


def test_require_seed():
    assert require_seed({"seed": 2**64 - 1}) == 2**64 - 1
    with pytest.raises(ConfigurationError, match="missing configuration key 'seed'"):
        require_seed({})


def test_positive_int():
    assert positive_int({"trials": 3}, "trials") == 3
    assert positive_int({}, "trials", 10) == 10
    with pytest.raises(ConfigurationError):
        positive_int({"trials": 0}, "trials")
    with pytest.raises(ConfigurationError):
        positive_int({}, "trials")


def test_number():
    assert number({"a_factor": 0.25}, "a_factor") == 0.25
    assert number({}, "alpha", 0.5) == 0.5
    with pytest.raises(ConfigurationError, match="a_factor must be a number"):
        number({"a_factor": "x"}, "a_factor")
    with pytest.raises(ConfigurationError, match="must be a number"):
        number({"alpha": True}, "alpha")
    with pytest.raises(ConfigurationError, match="missing"):
        number({}, "target")


def test_number_list():
    assert number_list({"t_grid": [1, 2.5]}, "t_grid") == [1.0, 2.5]
    with pytest.raises(ConfigurationError, match="list of numbers"):
        number_list({"t_grid": [1, "2"]}, "t_grid")
    with pytest.raises(ConfigurationError, match="list of numbers"):
        number_list({"t_grid": 3}, "t_grid")


def test_index_list():
    assert index_list({"n_grid": [16, 64]}, "n_grid") == [16, 64]
    assert index_list({}, "n_grid", [32]) == [32]
    for bad in ([0], [1.5], [True], ["4"], 4):
        with pytest.raises(ConfigurationError, match="positive integers"):
            index_list({"n_grid": bad}, "n_grid")


def test_parse_params():
    params = parse_params({"r": 1, "p": 3, "regime": "mds", "eps": 0.5})
    assert params.regime is DependenceRegime.MDS
    assert params.eps == 0.5
    with pytest.raises(ConfigurationError, match="missing"):
        parse_params({"r": 1})
    with pytest.raises(ConfigurationError, match="invalid exponents"):
        parse_params({"r": "one", "p": 1})
    with pytest.raises(ValidationError, match="p must be at least"):
        parse_params({"r": 1, "p": 0.5})


def test_parse_function():
    assert parse_function({}) == LogTower(m=1, eps=0.0)
    assert parse_function({"f": {"log_tower": {"m": 2, "eps": 1}}}) == LogTower(2, 1.0)
    dyadic = parse_function({"f": {"dyadic": [1, 2, 3], "below_2": 0.5}})
    assert isinstance(dyadic, DyadicFunction)
    assert dyadic(1.0) == 0.5
    constant = parse_function({"f": {"constant": 2.0, "horizon": 5}})
    assert constant.horizon == 5
    with pytest.raises(ConfigurationError, match="unknown form"):
        parse_function({"f": {"power": 2}})
    with pytest.raises(ConfigurationError, match="mapping"):
        parse_function({"f": "log"})
    with pytest.raises(ConfigurationError, match="invalid f"):
        parse_function({"f": {"log_tower": {"m": 1, "eps": "x"}}})
    with pytest.raises(ConfigurationError, match="invalid f"):
        parse_function({"f": {"dyadic": ["x", 1]}})


def test_parse_process(swh_baumkatz_config):
    spec = parse_process(swh_baumkatz_config)
    assert spec.kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT
    assert spec.horizon == 64
    assert spec.k0 == 1


def test_parse_process_baseline(rademacher_config):
    spec = parse_process(rademacher_config)
    assert spec.kind is ProcessKind.IID_DISCRETE
    assert spec.atoms == (-1.0, 1.0)
    with pytest.raises(ConfigurationError, match="missing configuration key 'probs'"):
        parse_process({"horizon": 4, "process": {"kind": "IIDDiscrete", "atoms": [1]}})
    with pytest.raises(ConfigurationError, match="invalid process"):
        parse_process(
            {
                "horizon": 4,
                "process": {"kind": "IIDDiscrete", "atoms": ["x"], "probs": [1]},
            }
        )


def test_parse_process_defaults():
    spec = parse_process({"r": 1, "p": 1, "horizon": 16})
    assert spec.kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT
    with pytest.raises(ConfigurationError, match="horizon"):
        parse_process({"r": 1, "p": 1})
