# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Reproducible Monte Carlo estimation of ``P(M_n > t)`` and ``P(|S_n| > t)``.

Replicas are split into chunks whose size only depends on ``n``; chunk ``j``
of a cell draws from the counter-based substream ``(seed, stream_id, j)``. Hits
are integer counts, so the result does not depend on how the chunks are
scheduled over worker threads.

"""

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
import hashlib
import logging
import math
from typing import Callable, List, Sequence, Tuple

import attr
import numpy as np
from scipy.stats import norm

from swh.baumkatz.classes import ExponentParams, threshold
from swh.baumkatz.exception import ValidationError
from swh.baumkatz.generators import ProcessSpec, draw_increments, path_statistics

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95
MAX_CHUNK = 8192
# number of variables drawn per chunk, at most
CHUNK_BUDGET = 2**22
SEED_LIMIT = 2**64

TAIL_COLUMNS = (
    "n",
    "t",
    "statistic",
    "trials",
    "hits",
    "p_hat",
    "ci_low",
    "ci_high",
    "provenance",
)


class Statistic(Enum):
    M = "M"
    """``M_n = max_{i<=n} |S_i|``"""
    S = "S"
    """``|S_n|``"""

    @classmethod
    def parse(cls, name: str) -> "Statistic":
        try:
            return cls(name.upper())
        except ValueError:
            raise ValidationError(f"unknown statistic {name!r}, expected M or S")


class Provenance(Enum):
    EXACT = "exact"
    MONTECARLO = "montecarlo"


def stream_id_for(*key) -> int:
    """64-bit substream identifier of a cell key.

    >>> stream_id_for(4, "M") == stream_id_for(4, "M") != stream_id_for(8, "M")
    True

    """
    digest = hashlib.blake2b(repr(key).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _check_seed(instance, attribute, value):
    if not 0 <= value < SEED_LIMIT:
        raise ValidationError(f"{attribute.name} must be a 64-bit unsigned integer")


@attr.s(frozen=True)
class RandomStream:
    """A counter-based random substream.

    ``(seed, stream_id)`` determines the numbers drawn; distinct identifiers
    select independent Philox streams.

    """

    seed = attr.ib(type=int, converter=int, validator=_check_seed)
    stream_id = attr.ib(type=int, default=0, converter=int, validator=_check_seed)

    def generator(self, chunk: int = 0) -> np.random.Generator:
        """Generator of the chunk ``chunk`` of the stream."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, chunk))
        return np.random.Generator(np.random.Philox(sequence))

    @classmethod
    def for_cell(cls, seed: int, *key) -> "RandomStream":
        return cls(seed, stream_id_for(*key))


def wilson_interval(
    hits: int, trials: int, confidence: float = CONFIDENCE
) -> Tuple[float, float]:
    """Wilson score interval of a binomial proportion.

    The bounds are widened, if rounding requires it, so that they enclose
    ``hits / trials``.

    >>> wilson_interval(0, 10)[0]
    0.0
    >>> low, high = wilson_interval(9, 10)
    >>> round(low, 3), round(high, 3)
    (0.596, 0.982)

    """
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    if not 0 <= hits <= trials:
        raise ValidationError(f"hits must lie in [0, {trials}], got {hits}")
    z = float(norm.ppf(1 - (1 - confidence) / 2))
    p_hat = hits / trials
    denominator = 1 + z**2 / trials
    center = (p_hat + z**2 / (2 * trials)) / denominator
    margin = (z / denominator) * math.sqrt(
        p_hat * (1 - p_hat) / trials + z**2 / (4 * trials**2)
    )
    low = min(max(0.0, center - margin), p_hat)
    high = max(min(1.0, center + margin), p_hat)
    return low, high


@attr.s(frozen=True)
class TailEstimate:
    """Estimate of ``P(statistic > t)`` at index ``n``."""

    n = attr.ib(type=int)
    t = attr.ib(type=float)
    statistic = attr.ib(type=Statistic)
    trials = attr.ib(type=int)
    """Number of replicas, 0 for exact values"""
    hits = attr.ib(type=int)
    p_hat = attr.ib(type=float)
    ci_low = attr.ib(type=float)
    ci_high = attr.ib(type=float)
    provenance = attr.ib(type=Provenance)

    def __attrs_post_init__(self):
        if not 0 <= self.ci_low <= self.p_hat <= self.ci_high <= 1:
            raise ValidationError(
                f"inconsistent tail estimate: {self.ci_low} <= {self.p_hat} "
                f"<= {self.ci_high} must hold within [0, 1]"
            )
        if self.provenance is Provenance.EXACT and not (
            self.ci_low == self.p_hat == self.ci_high
        ):
            raise ValidationError("exact tail values have a degenerate interval")

    @classmethod
    def from_hits(
        cls, n: int, t: float, statistic: Statistic, trials: int, hits: int
    ) -> "TailEstimate":
        low, high = wilson_interval(hits, trials)
        return cls(
            n,
            t,
            statistic,
            trials,
            hits,
            hits / trials,
            low,
            high,
            Provenance.MONTECARLO,
        )

    @classmethod
    def exact(
        cls, n: int, t: float, statistic: Statistic, probability: float
    ) -> "TailEstimate":
        # sums of probabilities may overshoot [0, 1] by rounding
        p = min(max(float(probability), 0.0), 1.0)
        return cls(n, t, statistic, 0, 0, p, p, p, Provenance.EXACT)

    @property
    def standard_error(self) -> float:
        """Binomial standard error of ``p_hat``, 0 for exact values."""
        if self.trials == 0:
            return 0.0
        return math.sqrt(self.p_hat * (1 - self.p_hat) / self.trials)

    def as_row(self) -> List[object]:
        return [
            self.n,
            self.t,
            self.statistic.value,
            self.trials,
            self.hits,
            self.p_hat,
            self.ci_low,
            self.ci_high,
            self.provenance.value,
        ]


def chunk_size(n: int) -> int:
    """Replicas per chunk, a function of the path length only.

    >>> chunk_size(1), chunk_size(1024), chunk_size(10**7)
    (8192, 4096, 1)

    """
    return max(1, min(MAX_CHUNK, CHUNK_BUDGET // max(n, 1)))


Reducer = Callable[[np.ndarray], np.ndarray]


def count_hits(
    spec: ProcessSpec,
    n: int,
    trials: int,
    stream: RandomStream,
    reducer: Reducer,
    threads: int = 1,
) -> np.ndarray:
    """Run ``trials`` replicas of ``X_1..X_n`` and count hits.

    Args:
        spec: the process
        n: path length
        trials: number of replicas
        stream: substream of the cell
        reducer: maps a ``(replicas, n)`` batch of increments to a boolean
          ``(replicas, m)`` array of hits
        threads: worker threads; they only schedule chunks

    Returns:
        the ``m`` hit counts

    """
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}")
    if threads < 1:
        raise ValidationError(f"need at least one thread, got {threads}")
    spec.check_length(n)
    size = chunk_size(n)
    chunks = [
        (index, min(size, trials - start))
        for index, start in enumerate(range(0, trials, size))
    ]

    def run(chunk: Tuple[int, int]) -> np.ndarray:
        index, count = chunk
        x = draw_increments(spec, n, stream.generator(index), count)
        return np.sum(reducer(x), axis=0, dtype=np.int64)

    logger.debug(
        "stream %s: %s replicas of length %s in %s chunks on %s threads",
        stream.stream_id,
        trials,
        n,
        len(chunks),
        threads,
    )
    if threads == 1 or len(chunks) == 1:
        counts = [run(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            counts = list(executor.map(run, chunks))
    return np.sum(np.stack(counts), axis=0)


def estimate_tails(
    spec: ProcessSpec,
    n: int,
    ts: Sequence[float],
    statistic: Statistic,
    trials: int,
    seed: int,
    threads: int = 1,
) -> List[TailEstimate]:
    """Estimate ``P(statistic > t)`` for every ``t`` of ``ts`` from the same
    replicas, so hit counts are non-increasing in ``t``.

    The substream only depends on ``(n, statistic)``.

    Raises:
        HorizonExceeded: when ``n`` is beyond the horizon of the spec

    """
    if n < 1:
        raise ValidationError(f"path length must be positive, got {n}")
    thresholds = np.asarray(ts, dtype=float)

    def reducer(x: np.ndarray) -> np.ndarray:
        final, maximum = path_statistics(x)
        values = maximum if statistic is Statistic.M else final
        return values[:, np.newaxis] > thresholds[np.newaxis, :]

    stream = RandomStream.for_cell(seed, n, statistic.value)
    hits = count_hits(spec, n, trials, stream, reducer, threads)
    return [
        TailEstimate.from_hits(n, float(t), statistic, trials, int(h))
        for t, h in zip(thresholds, hits)
    ]


def estimate_tail(
    spec: ProcessSpec,
    n: int,
    t: float,
    statistic: Statistic,
    trials: int,
    seed: int,
    threads: int = 1,
) -> TailEstimate:
    return estimate_tails(spec, n, [t], statistic, trials, seed, threads)[0]


def estimate_grid(
    spec: ProcessSpec,
    params: ExponentParams,
    n_grid: Sequence[int],
    statistic: Statistic,
    trials: int,
    seed: int,
    threads: int = 1,
) -> List[TailEstimate]:
    """One estimate per ``n`` of the grid at ``t = eps n^{1/r}``."""
    grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("n_grid must be sorted ascending")
    return [
        estimate_tail(spec, n, threshold(params, n), statistic, trials, seed, threads)
        for n in grid
    ]
