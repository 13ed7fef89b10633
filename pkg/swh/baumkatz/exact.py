# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Exact laws of ``S_n`` and ``M_n`` for the block-structured discrete processes.

The law of ``S_n`` is the convolution of the laws of the block sums of the
independent factors of the process. Path maxima need the joint outcomes and
are only computed by full enumeration, for short paths.

"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np
from scipy.stats import binom

from swh.baumkatz.exception import (
    EnumerationLimitExceeded,
    SupportCapExceeded,
    ValidationError,
)
from swh.baumkatz.generators import (
    Factor,
    IIDBlockFactor,
    ProcessSpec,
    SharedBlockFactor,
    SignedBlockFactor,
)

logger = logging.getLogger(__name__)

DEFAULT_SUPPORT_CAP = 10**6
DEFAULT_ENUMERATION_LIMIT = 12
MERGE_RTOL = 1e-9
NORMALIZATION_ATOL = 1e-9
# relative slack of threshold comparisons, absorbing the rounding of atoms
COMPARE_RTOL = 1e-12
# lattice indices must stay exactly representable
_LATTICE_MAX = 2.0**52

Law = Tuple[np.ndarray, np.ndarray]


def _compress(values: np.ndarray, probs: np.ndarray) -> Law:
    """Sort a law, drop null atoms and merge values closer than
    ``1e-9 max |value|``."""
    values = np.asarray(values, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    keep = probs > 0
    values, probs = values[keep], probs[keep]
    if not values.size:
        return values, probs
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    tol = MERGE_RTOL * float(np.max(np.abs(values)))
    starts = np.concatenate([[0], np.flatnonzero(np.diff(values) > tol) + 1])
    return values[starts], np.add.reduceat(probs, starts)


@attr.s(frozen=True, eq=False)
class SupportTable:
    """Exact law of a discrete random variable, as sorted distinct values and
    their positive probabilities."""

    values = attr.ib(type=np.ndarray)
    probs = attr.ib(type=np.ndarray)

    def __attrs_post_init__(self):
        if self.values.shape != self.probs.shape or self.values.ndim != 1:
            raise ValidationError("support values and probabilities must match")
        if np.any(self.probs <= 0):
            raise ValidationError("support probabilities must be positive")
        if np.any(np.diff(self.values) <= 0):
            raise ValidationError("support values must be sorted and distinct")
        total = float(np.sum(self.probs))
        if abs(total - 1) > NORMALIZATION_ATOL:
            raise ValidationError(f"support probabilities sum to {total!r}")

    @classmethod
    def from_law(
        cls, values: Sequence[float], probs: Sequence[float]
    ) -> "SupportTable":
        return cls(*_compress(np.asarray(values), np.asarray(probs)))

    @property
    def entries(self) -> List[Tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def __len__(self) -> int:
        return int(self.values.size)

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def tail(self, t: float, strict: bool = True) -> float:
        """``P(|V| > t)``, or ``P(|V| >= t)`` when not ``strict``."""
        return float(np.sum(self.probs[_exceeds(np.abs(self.values), t, strict)]))


def _exceeds(values: np.ndarray, t: float, strict: bool) -> np.ndarray:
    slack = COMPARE_RTOL * max(1.0, abs(t))
    if strict:
        return values > t + slack
    return values >= t - slack


def _common_step(*laws: Law) -> Optional[float]:
    """Lattice step shared by the supports of ``laws``, if any."""
    values = np.concatenate([law[0] for law in laws])
    nonzero = np.abs(values[values != 0])
    if not nonzero.size:
        return 1.0
    step = float(np.min(nonzero))
    ratios = values / step
    if np.max(np.abs(ratios)) > _LATTICE_MAX:
        return None
    rounded = np.rint(ratios)
    if np.any(np.abs(ratios - rounded) > MERGE_RTOL * np.maximum(1.0, np.abs(ratios))):
        return None
    return step * float(np.gcd.reduce(rounded.astype(np.int64)))


def _lattice_index(law: Law, step: float) -> np.ndarray:
    return np.rint(law[0] / step).astype(np.int64)


def _dense(index: np.ndarray, probs: np.ndarray) -> np.ndarray:
    dense = np.zeros(int(index.max() - index.min()) + 1)
    np.add.at(dense, index - index.min(), probs)
    return dense


def convolve_laws(left: Law, right: Law, support_cap: int = DEFAULT_SUPPORT_CAP) -> Law:
    """Law of the sum of two independent discrete variables.

    Supports on a common lattice are convolved as dense arrays, the others by
    the outer sum of their atoms.

    Raises:
        SupportCapExceeded: when the sum has more than ``support_cap`` candidate
          support points

    """
    step = _common_step(left, right)
    if step is not None:
        index1, index2 = _lattice_index(left, step), _lattice_index(right, step)
        low = int(index1.min() + index2.min())
        size = int(index1.max() + index2.max()) - low + 1
        if size <= support_cap:
            probs = np.convolve(_dense(index1, left[1]), _dense(index2, right[1]))
            values = (low + np.arange(size)) * step
            return _compress(values, probs)
    size = left[0].size * right[0].size
    if size > support_cap:
        raise SupportCapExceeded(
            f"sum law needs {size} support points, above the cap {support_cap}"
        )
    return _compress(
        np.add.outer(left[0], right[0]), np.multiply.outer(left[1], right[1])
    )


def _power(law: Law, count: int, support_cap: int) -> Law:
    """Law of the sum of ``count`` independent copies, by repeated squaring."""
    result: Law = (np.zeros(1), np.ones(1))
    base = law
    while count:
        if count & 1:
            result = convolve_laws(result, base, support_cap)
        count >>= 1
        if count:
            base = convolve_laws(base, base, support_cap)
    return result


def _symmetric_three_point(factor: IIDBlockFactor) -> Optional[Tuple[float, float]]:
    """``(a, p)`` when the factor law is ``P(+-a) = p``, ``P(0) = 1 - 2p``."""
    law = dict(zip(factor.values, factor.probs))
    if len(law) != 3 or 0.0 not in law:
        return None
    magnitudes = sorted({abs(v) for v in law if v != 0})
    if len(magnitudes) != 1:
        return None
    a = magnitudes[0]
    if law.get(a) != law.get(-a):
        return None
    return a, law[a]


def _three_point_block_law(a: float, p: float, length: int, support_cap: int) -> Law:
    """Multinomial law of ``a (#plus - #minus)`` over ``length`` variables.

    The number ``j`` of non-zero variables is binomial ``(length, 2p)``; given
    ``j``, the number of plus signs is binomial ``(j, 1/2)``.

    """
    if 2 * length + 1 > support_cap:
        raise SupportCapExceeded(
            f"block of {length} variables exceeds the support cap {support_cap}"
        )
    counts = np.arange(length + 1)
    weights = binom.pmf(counts, length, 2 * p)
    probs = np.zeros(2 * length + 1)
    for j in counts[weights > 0]:
        plus = np.arange(j + 1)
        # d = #plus - #minus = 2 plus - j, stored at offset d + length
        probs[2 * plus - j + length] += weights[j] * binom.pmf(plus, j, 0.5)
    return _compress((np.arange(2 * length + 1) - length) * a, probs)


def factor_sum_law(factor: Factor, support_cap: int = DEFAULT_SUPPORT_CAP) -> Law:
    """Law of the sum of the variables driven by one factor."""
    length = factor.length
    if isinstance(factor, SharedBlockFactor):
        return _compress(np.asarray(factor.values) * length, np.asarray(factor.probs))
    if isinstance(factor, SignedBlockFactor):
        plus = np.arange(length + 1)
        values = np.concatenate([[0.0], factor.magnitude * (2 * plus - length)])
        probs = np.concatenate(
            [[1 - factor.prob], factor.prob * binom.pmf(plus, length, 0.5)]
        )
        return _compress(values, probs)
    three_point = _symmetric_three_point(factor)
    if three_point is not None:
        return _three_point_block_law(*three_point, length, support_cap)
    law = _compress(np.asarray(factor.values), np.asarray(factor.probs))
    return _power(law, length, support_cap)


def exact_sum_law(
    spec: ProcessSpec, n: int, support_cap: int = DEFAULT_SUPPORT_CAP
) -> SupportTable:
    """Exact law of ``S_n``, convolving the block sums of the factors of the
    process in index order.

    Raises:
        HorizonExceeded: when ``n`` is beyond the horizon of the spec
        SupportCapExceeded: when an intermediate law grows beyond the cap

    """
    law: Law = (np.zeros(1), np.ones(1))
    for factor in spec.factors(n):
        law = convolve_laws(law, factor_sum_law(factor, support_cap), support_cap)
    logger.debug("law of S_%s: %s support points", n, law[0].size)
    return SupportTable(*law)


def exact_tail_S(
    spec: ProcessSpec,
    n: int,
    t: float,
    strict: bool = True,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> float:
    """``P(|S_n| > t)`` (``P(|S_n| >= t)`` when not ``strict``)."""
    return exact_sum_law(spec, n, support_cap).tail(t, strict)


def _factor_outcomes(factor: Factor) -> Tuple[np.ndarray, np.ndarray]:
    """Joint outcomes of the variables of a factor with their probabilities."""
    length = factor.length
    if isinstance(factor, SharedBlockFactor):
        values, probs = _compress(np.asarray(factor.values), np.asarray(factor.probs))
        return np.repeat(values[:, np.newaxis], length, axis=1), probs
    if isinstance(factor, SignedBlockFactor):
        # the block coin and the signs: Z = 0 once, then every sign pattern
        signs = 1.0 - 2.0 * ((np.arange(2**length)[:, None] >> np.arange(length)) & 1)
        rows = np.vstack([np.zeros((1, length)), factor.magnitude * signs])
        probs = np.concatenate(
            [[1 - factor.prob], np.full(2**length, factor.prob / 2**length)]
        )
        return rows, probs
    values, probs = _compress(np.asarray(factor.values), np.asarray(factor.probs))
    grids = np.meshgrid(*([np.arange(values.size)] * length), indexing="ij")
    index = np.stack(grids, axis=-1).reshape(-1, length)
    return values[index], np.prod(probs[index], axis=1)


def enumerate_paths(
    spec: ProcessSpec, n: int, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> Tuple[np.ndarray, np.ndarray]:
    """Every outcome of ``X_1..X_n`` with positive probability.

    Returns:
        the outcomes, one per row, and their probabilities

    Raises:
        EnumerationLimitExceeded: when ``n`` is above ``limit``

    """
    if n > limit:
        raise EnumerationLimitExceeded(
            f"full enumeration is limited to n <= {limit}, got n={n}"
        )
    spec.check_length(n)
    rows = np.zeros((1, 0))
    probs = np.ones(1)
    columns: List[int] = []
    for factor in spec.factors(n):
        block_rows, block_probs = _factor_outcomes(factor)
        rows = np.hstack(
            [
                np.repeat(rows, block_probs.size, axis=0),
                np.tile(block_rows, (probs.size, 1)),
            ]
        )
        probs = np.multiply.outer(probs, block_probs).ravel()
        columns.extend(range(factor.start, factor.stop))
    paths = np.zeros((probs.size, n))
    paths[:, columns] = rows
    keep = probs > 0
    return paths[keep], probs[keep]


def exact_tail_M(
    spec: ProcessSpec,
    n: int,
    t: float,
    strict: bool = True,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> float:
    """``P(M_n > t)`` (``P(M_n >= t)`` when not ``strict``) by full enumeration."""
    if n == 0:
        return 0.0 if strict or t > 0 else 1.0
    paths, probs = enumerate_paths(spec, n, limit)
    maxima = np.max(np.abs(np.cumsum(paths, axis=1)), axis=1)
    return float(np.sum(probs[_exceeds(maxima, t, strict)]))


def conditional_mean_check(
    spec: ProcessSpec, n: int, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> float:
    """Largest ``|E(X_n | X_1..X_{n-1})|`` over the histories of positive
    probability.

    Zero for a martingale difference sequence; any spec is accepted so that
    other processes can be checked against it.

    """
    if n < 1:
        raise ValidationError(f"conditional means start at n=1, got {n}")
    paths, probs = enumerate_paths(spec, n, limit)
    if n == 1:
        groups = np.zeros(probs.size, dtype=np.int64)
    else:
        _, groups = np.unique(paths[:, :-1], axis=0, return_inverse=True)
        groups = np.asarray(groups).ravel()
    mass = np.bincount(groups, weights=probs)
    first = np.bincount(groups, weights=probs * paths[:, -1])
    return float(np.max(np.abs(first / mass)))


def binomial_ge(m: int, threshold: int) -> float:
    """Probability that a sum of ``m`` Rademacher variables is ``>= threshold``.

    >>> binomial_ge(1, 1), binomial_ge(2, 2), binomial_ge(4, 2)
    (0.5, 0.25, 0.3125)

    """
    if m < 1:
        raise ValidationError(f"need at least one Rademacher variable, got {m}")
    # sum = 2 H - m with H binomial (m, 1/2)
    heads = math.ceil((m + threshold) / 2)
    return float(binom.sf(heads - 1, m, 0.5))
