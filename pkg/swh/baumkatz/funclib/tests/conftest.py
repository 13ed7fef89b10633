# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import numpy as np
import pytest

from swh.baumkatz.funclib import DyadicFunction, LogTower


@pytest.fixture
def f1_dyadic() -> DyadicFunction:
    """``f_1`` on ``2^1..2^30``, without summability witness."""
    return DyadicFunction.from_log_tower(LogTower(m=1, eps=0.0), 30)


@pytest.fixture
def f11_dyadic() -> DyadicFunction:
    """``f_{1,1}`` on ``2^1..2^60``, with its tail majorant as witness."""
    return DyadicFunction.from_log_tower(LogTower(m=1, eps=1.0), 60)


@pytest.fixture
def geometric_dyadic() -> DyadicFunction:
    """``g(2^n) = 2^n`` with ``sum_{n >= m} 2^{-n} = 2^{1-m}``."""
    return DyadicFunction.from_values(
        np.ldexp(1.0, np.arange(1, 21)), witness=lambda m: 2.0 ** (1 - m)
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260101)
