# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import logging
from typing import Sequence

import numpy as np

from swh.baumkatz.exception import ValidationError
from swh.baumkatz.generators.process import LAW_TOLERANCE, ProcessKind, ProcessSpec

logger = logging.getLogger(__name__)

BASELINE_KINDS = (ProcessKind.IID_DISCRETE, ProcessKind.NA_VIA_INDEPENDENT)


def build_baseline(
    kind: ProcessKind,
    atoms: Sequence[float],
    probs: Sequence[float],
    n_max: int,
    require_centered: bool = True,
) -> ProcessSpec:
    """Independent identically distributed sequence over a discrete law.

    ``NAViaIndependent`` is the same sampler tagged negatively associated
    (independent sequences are).

    Args:
        kind: one of the baseline kinds
        atoms: values of the law
        probs: their probabilities, summing to 1
        n_max: horizon of the process
        require_centered: whether the law must have mean 0

    Raises:
        ValidationError: non-normalised or non-centred law, wrong kind

    >>> build_baseline(ProcessKind.IID_DISCRETE, [-1, 3], [0.75, 0.25], 8).atoms
    (-1.0, 3.0)

    """
    if kind not in BASELINE_KINDS:
        raise ValidationError(f"{kind.value} is not a baseline process kind")
    values = np.asarray(atoms, dtype=float)
    weights = np.asarray(probs, dtype=float)
    if values.ndim != 1 or values.shape != weights.shape or not values.size:
        raise ValidationError("atoms and probs must be non-empty and of equal length")
    if not np.all(np.isfinite(values)):
        raise ValidationError("atoms must be finite")
    if np.any(weights < 0):
        raise ValidationError("probabilities must be non-negative")
    total = float(np.sum(weights))
    if abs(total - 1) > LAW_TOLERANCE:
        raise ValidationError(f"probabilities sum to {total!r}, not 1")
    mean = float(np.dot(values, weights))
    if require_centered and abs(mean) > LAW_TOLERANCE:
        raise ValidationError(f"law is not centered: mean {mean!r}")
    logger.debug("baseline %s over %s atoms, mean %s", kind.value, values.size, mean)
    return ProcessSpec(kind, n_max, atoms=values.tolist(), probs=weights.tolist())


def rademacher(n_max: int, kind: ProcessKind = ProcessKind.IID_DISCRETE) -> ProcessSpec:
    return build_baseline(kind, [-1.0, 1.0], [0.5, 0.5], n_max)


def constant_one(n_max: int) -> ProcessSpec:
    """``X_n = 1``: for ``r >= 1`` it breaks every arbitrary-dependence
    convergence statement, since ``M_n = n > eps n^{1/r}`` eventually.

    """
    return build_baseline(
        ProcessKind.IID_DISCRETE, [1.0], [1.0], n_max, require_centered=False
    )
