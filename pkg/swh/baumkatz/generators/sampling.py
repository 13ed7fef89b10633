# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Vectorised sampling of ``X_1..X_n`` replicas.

Factors are drawn in index order, each with a fixed number of calls to the
generator, so a replica batch only depends on the generator state and the
batch size.

"""

import logging
from typing import TYPE_CHECKING, Tuple

import numpy as np

from swh.baumkatz.generators.process import (
    IIDBlockFactor,
    ProcessSpec,
    SamplePath,
    SharedBlockFactor,
    SignedBlockFactor,
)

if TYPE_CHECKING:
    from swh.baumkatz.montecarlo import RandomStream

logger = logging.getLogger(__name__)


def draw_increments(
    spec: ProcessSpec, n: int, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Draw ``size`` independent replicas of ``X_1..X_n``.

    Returns:
        array of shape ``(size, n)``

    Raises:
        HorizonExceeded: when ``n`` is beyond the horizon of the spec

    """
    spec.check_length(n)
    x = np.zeros((size, n), dtype=float)
    for factor in spec.factors(n):
        columns = slice(factor.start, factor.stop)
        if isinstance(factor, IIDBlockFactor):
            x[:, columns] = rng.choice(
                np.asarray(factor.values),
                size=(size, factor.length),
                p=np.asarray(factor.probs),
            )
        elif isinstance(factor, SharedBlockFactor):
            coin = rng.choice(
                np.asarray(factor.values), size=size, p=np.asarray(factor.probs)
            )
            x[:, columns] = coin[:, np.newaxis]
        elif isinstance(factor, SignedBlockFactor):
            z = np.where(rng.random(size) < factor.prob, factor.magnitude, 0.0)
            signs = 2.0 * rng.integers(0, 2, size=(size, factor.length)) - 1.0
            x[:, columns] = signs * z[:, np.newaxis]
        else:
            raise TypeError(f"unknown factor {factor!r}")
    return x


def path_statistics(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """``|S_n|`` and ``M_n`` of every replica (row) of ``x``."""
    if x.shape[-1] == 0:
        zeros = np.zeros(x.shape[:-1])
        return zeros, zeros
    s = np.cumsum(x, axis=-1)
    return np.abs(s[..., -1]), np.max(np.abs(s), axis=-1)


def sample_path(spec: ProcessSpec, n: int, stream: "RandomStream") -> SamplePath:
    """One path ``X_1..X_n`` of ``spec`` drawn from ``stream``.

    The same stream always gives the same path.

    """
    x = draw_increments(spec, n, stream.generator(), 1)[0]
    return SamplePath.from_increments(x)
