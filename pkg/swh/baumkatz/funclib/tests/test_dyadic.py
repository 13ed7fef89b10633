# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import math

import numpy as np
import pytest

from swh.baumkatz.exception import HorizonExceeded, ValidationError
from swh.baumkatz.funclib import (
    DyadicFunction,
    Interpolation,
    LogTower,
    SummableSeqSpec,
    SumForm,
    dyadic_sum_test,
    evaluate_at_log,
)

LN2 = math.log(2)


def test_dyadic_function_piecewise_constant():
    f = DyadicFunction.from_values([1.0, 2.0, 5.0], below_2=0.5)
    assert f.horizon == 3
    assert f.upper == 8.0
    assert f(0.0) == 0.5
    assert f(1.99) == 0.5
    assert f(2.0) == 1.0
    assert f(3.5) == 1.0
    assert f(4.0) == 2.0
    assert f(8.0) == 5.0
    assert list(f(np.array([2.0, 7.9]))) == [1.0, 2.0]


def test_dyadic_function_below_2_defaults_to_f2():
    assert DyadicFunction.from_values([3.0, 4.0])(1.0) == 3.0


@pytest.mark.parametrize(
    "values,below_2,match",
    [
        ([], None, "at least one"),
        ([1.0, 0.0], None, "positive"),
        ([2.0, 1.0], None, "decrease"),
        ([1.0, 2.0], 1.5, "below 2"),
    ],
)
def test_dyadic_function_invariants(values, below_2, match):
    with pytest.raises(ValidationError, match=match):
        DyadicFunction.from_values(values, below_2)


def test_dyadic_function_never_extrapolates():
    f = DyadicFunction.from_values([1.0, 2.0])
    with pytest.raises(HorizonExceeded):
        f(4.5)
    with pytest.raises(HorizonExceeded):
        f.at_log(math.log(5.0))
    with pytest.raises(HorizonExceeded):
        f.at_dyadic(3)
    with pytest.raises(ValidationError):
        f(-1.0)


def test_dyadic_function_at_log_dyadic_points():
    f = DyadicFunction.from_values([1.0, 2.0, 3.0])
    # n ln 2 may round below the dyadic point
    assert [f.at_log(n * LN2) for n in (1, 2, 3)] == [1.0, 2.0, 3.0]
    assert f.at_log(0.0) == 1.0


def test_dyadic_function_from_log_tower(f11_dyadic):
    assert f11_dyadic.interpolation is Interpolation.ANALYTIC
    assert f11_dyadic.at_dyadic(4) == pytest.approx((4 * LN2) ** 2, rel=1e-12)
    assert f11_dyadic(100.0) == pytest.approx(math.log(100.0) ** 2, rel=1e-12)
    assert f11_dyadic.witness is not None
    assert f11_dyadic.describe() == {
        "log_tower": {"m": 1, "eps": 1.0},
        "horizon": 60,
    }


def test_dyadic_function_from_function():
    f = DyadicFunction.from_function(lambda x: np.sqrt(x), 4)
    assert list(f.dyadic_values) == pytest.approx([2**0.5, 2.0, 8**0.5, 4.0])
    assert f(9.0) == 3.0


def test_evaluate_at_log_dispatch():
    assert evaluate_at_log(LogTower(m=1), math.log(32)) == pytest.approx(
        math.log(32)
    )
    assert evaluate_at_log(DyadicFunction.constant(2.0, 5), 3.0) == 2.0


def test_dyadic_sum_test_f1():
    sums = dyadic_sum_test(LogTower(m=1), SumForm.DYADIC, 1, 1, 2)
    assert sums == pytest.approx([1.0, 1.72135], abs=1e-5)
    assert sums[1] == pytest.approx(1 + 1 / math.log(4), rel=1e-12)


def test_dyadic_sum_test_constant():
    f = DyadicFunction.constant(1.0, 3)
    assert dyadic_sum_test(f, SumForm.DYADIC, 1, 1, 3) == [1.0, 2.0, 3.0]


def test_dyadic_sum_test_f11_tail():
    sums = dyadic_sum_test(LogTower(m=1, eps=1.0), SumForm.DYADIC, 1, 1, 5000)
    for start in (10, 100, 1000):
        tail = sums[-1] - sums[start - 2]
        assert tail <= 1 / (LN2**2 * (start - 1))


@pytest.mark.parametrize("form", list(SumForm))
def test_dyadic_sum_test_forms_increase(form):
    sums = dyadic_sum_test(LogTower(m=1), form, 0.5, 0.25, 50)
    assert len(sums) == 50
    assert all(b > a for a, b in zip(sums, sums[1:]))


def test_dyadic_sum_test_harmonic_form():
    sums = dyadic_sum_test(LogTower(m=1), SumForm.HARMONIC, 1, 1, 3)
    # f_1(1) = f_1(2) = 1, f_1(3) = ln 3
    assert sums == pytest.approx([1.0, 1.5, 1.5 + 1 / (3 * math.log(3))])


def test_dyadic_sum_test_horizon():
    with pytest.raises(HorizonExceeded):
        dyadic_sum_test(DyadicFunction.constant(1.0, 3), SumForm.DYADIC, 1, 1, 4)


@pytest.mark.parametrize("c,eps,N", [(0, 1, 3), (1, 0, 3), (1, 1, 0)])
def test_dyadic_sum_test_invalid(c, eps, N):
    with pytest.raises(ValidationError):
        dyadic_sum_test(LogTower(m=1), SumForm.DYADIC, c, eps, N)


def test_summable_sequence_invariants():
    with pytest.raises(ValidationError, match="increases"):
        SummableSeqSpec(lambda n: float(n), lambda m: 1e9, 5)
    with pytest.raises(ValidationError, match="tail bound"):
        SummableSeqSpec(lambda n: 2.0**-n, lambda m: 0.0, 5)
    with pytest.raises(ValidationError, match="positive"):
        SummableSeqSpec(lambda n: 0.0, lambda m: 1.0, 5)


def test_summable_sequence_builtins():
    geometric = SummableSeqSpec.geometric(0.5, 10)
    assert list(geometric.terms()) == [2.0**-n for n in range(1, 11)]
    assert geometric.tail_bound(3) == 0.25
    inverse = SummableSeqSpec.inverse_n_log_squared(1000)
    assert inverse.terms()[0] == pytest.approx(1 / LN2**2)
    assert sum(inverse.terms()[99:]) <= inverse.tail_bound(100)


def test_summable_sequence_reciprocal_of(geometric_dyadic, f1_dyadic):
    a = SummableSeqSpec.reciprocal_of(geometric_dyadic)
    assert a.terms()[2] == 0.125
    with pytest.raises(ValidationError, match="witness"):
        SummableSeqSpec.reciprocal_of(f1_dyadic)
