# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import math

from hypothesis import given
from hypothesis import strategies as st
import numpy as np
import pytest

from swh.baumkatz.exception import ValidationError
from swh.baumkatz.funclib import LogTower, eval_log_tower, log_plus
from swh.baumkatz.funclib.logtower import tower_or_none

depths = st.integers(min_value=1, max_value=4)
exponents = st.floats(min_value=0, max_value=3, allow_nan=False)
points = st.floats(min_value=0, max_value=1e300, allow_nan=False)


@pytest.mark.parametrize(
    "m,eps,x,expected",
    [
        (1, 0, 1.0, 1.0),
        (1, 0, 0.0, 1.0),
        (1, 0, math.e, 1.0),
        (1, 0, 32.0, math.log(32)),
        (1, 1, 16.0, math.log(16) ** 2),
        (2, 0, math.e**math.e, math.e),
    ],
)
def test_eval_log_tower(m, eps, x, expected):
    assert eval_log_tower(m, eps, x) == pytest.approx(expected, rel=1e-12)


def test_eval_log_tower_vectorized():
    x = np.array([0.0, 1.0, 32.0, 1e6])
    actual = eval_log_tower(1, 0, x)
    assert actual.shape == x.shape
    assert actual[2] == pytest.approx(math.log(32), rel=1e-12)


@pytest.mark.parametrize("m,eps", [(0, 0), (1.5, 0), (1, -0.5)])
def test_eval_log_tower_invalid(m, eps):
    with pytest.raises(ValidationError):
        eval_log_tower(m, eps, 3.0)


def test_eval_log_tower_negative_point():
    with pytest.raises(ValidationError, match="defined on"):
        eval_log_tower(1, 0, -1.0)


@given(depths, exponents, points, points)
def test_log_tower_monotone_and_at_least_one(m, eps, x, y):
    low, high = sorted((x, y))
    f_low = eval_log_tower(m, eps, low)
    assert f_low >= 1
    assert f_low <= eval_log_tower(m, eps, high) * (1 + 1e-12)


@given(depths, exponents, st.floats(min_value=1e-300, max_value=1e300))
def test_log_tower_at_log_agrees(m, eps, x):
    tower = LogTower(m=m, eps=eps)
    assert math.isclose(tower.at_log(math.log(x)), tower(x), rel_tol=1e-12)


def test_log_tower_at_log_beyond_binary64():
    # 4^{10^6} overflows, its logarithm does not
    tower = LogTower(m=1, eps=0)
    assert tower.at_log(10**6 * math.log(4)) == pytest.approx(10**6 * math.log(4))


def test_log_plus_array():
    assert list(log_plus(np.array([0.0, 1.0, math.e**3]))) == pytest.approx(
        [1.0, 1.0, 3.0]
    )


def test_reciprocal_tail_bound_m1():
    tower = LogTower(m=1, eps=1.0)
    exact = sum(1 / float(tower.at_log(n * math.log(2))) for n in range(10, 100_000))
    assert exact <= tower.reciprocal_tail_bound(10)
    # the majorant is the integral from m: close for a slowly varying tail
    assert tower.reciprocal_tail_bound(10) < exact * 1.2


def test_reciprocal_tail_bound_m2():
    tower = LogTower(m=2, eps=1.0)
    partial = sum(1 / float(tower.at_log(n * math.log(2))) for n in range(4, 100_000))
    assert partial <= tower.reciprocal_tail_bound(4)


def test_reciprocal_tail_bound_divergent():
    with pytest.raises(ValidationError, match="diverges"):
        LogTower(m=1, eps=0).reciprocal_tail_bound(3)


def test_tower_or_none(f11_dyadic):
    assert tower_or_none(LogTower(m=2)) == LogTower(m=2)
    assert tower_or_none(f11_dyadic) == LogTower(m=1, eps=1.0)
    assert tower_or_none(3.0) is None


def test_describe():
    assert LogTower(m=2, eps=0.5).describe() == {"log_tower": {"m": 2, "eps": 0.5}}
