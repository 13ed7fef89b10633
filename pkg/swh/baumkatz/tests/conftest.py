# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import csv
import io
from typing import Any, Callable, Dict, List, Tuple

import pytest

from swh.baumkatz.classes import DependenceRegime, ExponentParams
from swh.baumkatz.generators import ProcessSpec, build_counterexample_mds

ParsedCsv = Tuple[Dict[str, str], List[Dict[str, str]]]


def parse_csv(text: str) -> ParsedCsv:
    """Split a result file into its metadata and its rows."""
    meta = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        else:
            lines.append(line)
    return meta, list(csv.DictReader(io.StringIO("\n".join(lines))))


@pytest.fixture
def read_csv() -> Callable[[str], ParsedCsv]:
    return parse_csv


@pytest.fixture
def frequent_mds_spec(f1) -> ProcessSpec:
    """Martingale counterexample whose third block is active with p_3 = 1/4."""
    params = ExponentParams(r=1.5, p=2, regime=DependenceRegime.MDS)
    return build_counterexample_mds(params, f1, 63)


@pytest.fixture
def rademacher_config() -> Dict[str, Any]:
    return {
        "r": 1,
        "p": 2,
        "seed": 7,
        "horizon": 128,
        "process": {"kind": "IIDDiscrete", "atoms": [-1, 1], "probs": [0.5, 0.5]},
    }
