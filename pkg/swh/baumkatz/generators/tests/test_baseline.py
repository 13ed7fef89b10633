# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import pytest

from swh.baumkatz.exception import ValidationError
from swh.baumkatz.generators import (
    ProcessKind,
    build_baseline,
    constant_one,
    exact_moment,
    rademacher,
)


def test_rademacher():
    spec = rademacher(16)
    assert spec.kind is ProcessKind.IID_DISCRETE
    assert spec.atoms == (-1.0, 1.0)
    assert spec.horizon == 16
    assert rademacher(16, ProcessKind.NA_VIA_INDEPENDENT).is_independent


def test_asymmetric_centered_law():
    spec = build_baseline(ProcessKind.IID_DISCRETE, [-1, 3], [0.75, 0.25], 8)
    assert spec.probs == (0.75, 0.25)
    assert spec.second_moment_sum(8) == pytest.approx(8 * 3.0)


def test_baseline_mean():
    assert rademacher(4).is_centered
    skewed = build_baseline(ProcessKind.IID_DISCRETE, [-1, 3], [0.75, 0.25], 8)
    assert skewed.is_centered
    uncentered = constant_one(4)
    assert uncentered.mean == 1.0
    assert not uncentered.is_centered


def test_constant_one():
    spec = constant_one(10)
    assert spec.atoms == (1.0,)
    assert exact_moment(spec, 3, 2.0) == 1.0


@pytest.mark.parametrize(
    "atoms,probs,match",
    [
        ([], [], "non-empty"),
        ([1.0, -1.0], [0.5], "equal length"),
        ([float("inf"), -1.0], [0.5, 0.5], "finite"),
        ([1.0, -1.0, 0.0], [0.6, 0.6, -0.2], "non-negative"),
        ([1.0, -1.0], [0.5, 0.4], "sum to"),
        ([1.0, 0.0], [0.5, 0.5], "not centered"),
    ],
)
def test_baseline_validation(atoms, probs, match):
    with pytest.raises(ValidationError, match=match):
        build_baseline(ProcessKind.IID_DISCRETE, atoms, probs, 8)


def test_baseline_kind():
    with pytest.raises(ValidationError, match="not a baseline"):
        build_baseline(ProcessKind.COUNTEREXAMPLE_MDS, [-1, 1], [0.5, 0.5], 8)
