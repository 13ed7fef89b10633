# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import json
import os
from typing import Any, Callable, Dict

import pytest

from swh.baumkatz.classes import DependenceRegime, ExponentParams
from swh.baumkatz.funclib import LogTower
from swh.baumkatz.generators import (
    ProcessKind,
    ProcessSpec,
    build_counterexample,
    rademacher,
)


@pytest.fixture
def f1() -> LogTower:
    """``f_1 = log+``, the slowest correction of the divergent side."""
    return LogTower(m=1, eps=0.0)


@pytest.fixture
def f11() -> LogTower:
    """``f_{1,1}``, summable."""
    return LogTower(m=1, eps=1.0)


@pytest.fixture
def counter_params() -> ExponentParams:
    return ExponentParams(r=1, p=1)


@pytest.fixture
def counter_spec(counter_params, f1) -> ProcessSpec:
    return build_counterexample(
        ProcessKind.COUNTEREXAMPLE_INDEPENDENT, counter_params, f1, 64
    )


@pytest.fixture
def mds_params() -> ExponentParams:
    return ExponentParams(r=1, p=3, regime=DependenceRegime.MDS)


@pytest.fixture
def mds_spec(mds_params, f1) -> ProcessSpec:
    return build_counterexample(ProcessKind.COUNTEREXAMPLE_MDS, mds_params, f1, 256)


@pytest.fixture
def arbitrary_params() -> ExponentParams:
    return ExponentParams(r=0.5, p=1, regime=DependenceRegime.ARBITRARY)


@pytest.fixture
def arbitrary_spec(arbitrary_params, f1) -> ProcessSpec:
    return build_counterexample(
        ProcessKind.COUNTEREXAMPLE_ARBITRARY, arbitrary_params, f1, 64
    )


@pytest.fixture
def rademacher_spec() -> ProcessSpec:
    return rademacher(256)


@pytest.fixture
def swh_baumkatz_config() -> Dict[str, Any]:
    return {
        "r": 1,
        "p": 1,
        "seed": 42,
        "horizon": 64,
        "f": {"log_tower": {"m": 1, "eps": 0}},
        "process": {"kind": "CounterexampleIndependent"},
        "simulate": {"trials": 2000, "n_grid": [4, 16, 32], "statistic": "M"},
    }


@pytest.fixture
def write_config(tmp_path) -> Callable[[Dict[str, Any]], str]:
    """Write a configuration as JSON and return its path."""
    counter = iter(range(1000))

    def write(config: Dict[str, Any]) -> str:
        path = os.path.join(str(tmp_path), f"experiment-{next(counter)}.json")
        with open(path, "w") as f:
            json.dump(config, f)
        return path

    return write


@pytest.fixture
def swh_config(swh_baumkatz_config, write_config, monkeypatch) -> str:
    conffile = write_config(swh_baumkatz_config)
    monkeypatch.setenv("SWH_CONFIG_FILENAME", conffile)
    return conffile
