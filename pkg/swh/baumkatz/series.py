# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Partial sums of ``sum n^{p/r-2} P(M_n > eps n^{1/r})`` and the analytic
certificates of divergence of the counterexamples.

"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np
from scipy.stats import norm

from swh.baumkatz.classes import ExponentParams, series_weight, threshold
from swh.baumkatz.exception import ParameterMismatch, ValidationError
from swh.baumkatz.exact import binomial_ge
from swh.baumkatz.funclib import evaluate_at_log
from swh.baumkatz.funclib.logtower import tower_or_none
from swh.baumkatz.generators import LN4, ProcessKind, ProcessSpec
from swh.baumkatz.montecarlo import (
    TAIL_COLUMNS,
    Provenance,
    RandomStream,
    Statistic,
    TailEstimate,
    count_hits,
    estimate_tail,
    wilson_interval,
)

logger = logging.getLogger(__name__)

LEDGER_COLUMNS = TAIL_COLUMNS + (
    "weight",
    "increment",
    "cum_sum",
    "cum_low",
    "cum_high",
)

DIVERGENCE_DETECTED = "divergence detected"
NO_DIVERGENCE_DETECTED = "no divergence detected"

# beyond this block, Rademacher tails come from the Berry-Esseen bound
EXACT_BINOMIAL_BLOCKS = 25
BERRY_ESSEEN = 0.4748


@attr.s(frozen=True)
class LedgerRow:
    n = attr.ib(type=int)
    weight = attr.ib(type=float)
    tail = attr.ib(type=TailEstimate)
    increment = attr.ib(type=float)
    cum_sum = attr.ib(type=float)
    cum_low = attr.ib(type=float)
    cum_high = attr.ib(type=float)

    def as_row(self) -> List[object]:
        return self.tail.as_row() + [
            self.weight,
            self.increment,
            self.cum_sum,
            self.cum_low,
            self.cum_high,
        ]


@attr.s(frozen=True)
class SeriesLedger:
    rows = attr.ib(type=Tuple[LedgerRow, ...], converter=tuple)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def cum_sum(self) -> float:
        return self.rows[-1].cum_sum if self.rows else 0.0

    @property
    def increments(self) -> np.ndarray:
        return np.array([row.increment for row in self.rows])

    @property
    def ns(self) -> np.ndarray:
        return np.array([row.n for row in self.rows])


def assemble(
    params: ExponentParams,
    tails: Sequence[TailEstimate],
    weights: Optional[Sequence[float]] = None,
) -> SeriesLedger:
    """Accumulate ``weight * p_hat`` over tails sorted by ``n``.

    The confidence limits are propagated as ``sum weight * ci_low`` and
    ``sum weight * ci_high``.

    Args:
        params: exponents, giving the default weights ``n^{p/r-2}``
        tails: the tail estimates
        weights: explicit weights, one per tail

    Raises:
        ValidationError: unsorted tails or mismatching weights

    """
    if any(b.n < a.n for a, b in zip(tails, tails[1:])):
        raise ValidationError("tails must be sorted by n")
    if weights is None:
        weights = [series_weight(params, tail.n) for tail in tails]
    elif len(weights) != len(tails):
        raise ValidationError("one weight per tail is needed")
    rows = []
    cum_sum = cum_low = cum_high = 0.0
    for weight, tail in zip(weights, tails):
        if tail.provenance is Provenance.MONTECARLO and tail.hits == 0:
            logger.warning("no hit at n=%s, t=%s: increment 0", tail.n, tail.t)
        increment = weight * tail.p_hat
        cum_sum += increment
        cum_low += weight * tail.ci_low
        cum_high += weight * tail.ci_high
        rows.append(
            LedgerRow(tail.n, weight, tail, increment, cum_sum, cum_low, cum_high)
        )
    return SeriesLedger(rows)


@attr.s(frozen=True, eq=False)
class DivergenceCertificate:
    """Per-block lower bounds on the series, ``sum_{n in block k} n^{p/r-2}
    P(|S_n| > n^{1/r}) >= term_k``, for ``k0 < k <= K``."""

    kind = attr.ib(type=ProcessKind)
    k = attr.ib(type=np.ndarray)
    terms = attr.ib(type=np.ndarray)
    partial_sums = attr.ib(type=np.ndarray)

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1]) if self.partial_sums.size else 0.0

    def term(self, k: int) -> float:
        return float(self.terms[k - int(self.k[0])])


def _block_log_argument(spec: ProcessSpec) -> Tuple[float, float]:
    """``(alpha, beta)`` such that ``f`` is evaluated at ``exp(alpha k + beta)``
    on block ``k``."""
    assert spec.params is not None
    r = spec.params.r
    if spec.kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT:
        return LN4 / r, 0.0
    if spec.kind is ProcessKind.COUNTEREXAMPLE_MDS:
        return (1 / r - 0.5) * LN4, 0.0
    return (1 / r - 1) * LN4, LN4


def _block_constant(spec: ProcessSpec) -> float:
    """Constant factor of the certificate terms, an upper bound of it for the
    martingale construction."""
    assert spec.params is not None
    ratio = spec.params.p / spec.params.r
    if spec.kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT:
        assert spec.c_const is not None
        return spec.c_const * 2.0 ** (-2 * ratio - 3)
    return 2.0 ** (-2 * ratio - 1)


def _rademacher_block_bound(k: int) -> float:
    """Lower bound of ``P(Y_1 + ... + Y_m >= 2^k)`` over ``m > 4^{k-1}``.

    The probability is non-decreasing in ``m`` within each parity, so the two
    smallest ``m`` are enough.

    """
    if k <= EXACT_BINOMIAL_BLOCKS:
        m0 = 4 ** (k - 1) + 1
        return min(binomial_ge(m0, 2**k), binomial_ge(m0 + 1, 2**k))
    bounds = []
    for extra in (1, 2):
        # 2^k / sqrt(4^{k-1} + extra) and 1 / sqrt(4^{k-1} + extra)
        scale = math.sqrt(1 + extra * 4.0 ** (1 - k))
        bounds.append(
            float(norm.sf(2 / scale)) - BERRY_ESSEEN * 2.0 ** (1 - k) / scale
        )
    return max(0.0, min(bounds))


def divergence_certificate(spec: ProcessSpec, K: int) -> DivergenceCertificate:
    """Analytic lower bounds of the block contributions to the series of a
    counterexample, for ``k0 < k <= K``.

    ``f`` is evaluated in the log domain, so ``K`` may be far beyond the
    horizon for log towers.

    Raises:
        ValidationError: when ``spec`` is not a counterexample

    """
    if not spec.kind.is_counterexample:
        raise ValidationError(f"no divergence certificate for {spec.kind.value}")
    assert spec.f is not None
    k = np.arange(spec.k0 + 1, max(K, spec.k0) + 1)
    alpha, beta = _block_log_argument(spec)
    f_values = np.asarray(evaluate_at_log(spec.f, alpha * k + beta), dtype=float)
    terms = _block_constant(spec) / f_values
    if spec.kind is ProcessKind.COUNTEREXAMPLE_MDS:
        terms = terms * np.array([_rademacher_block_bound(int(j)) for j in k])
    return DivergenceCertificate(spec.kind, k, terms, np.cumsum(terms))


def certificate_tail_bound(spec: ProcessSpec, K: int) -> float:
    """Integral majorant of ``sum_{k >= K} term_k`` for ``f = f_{m,eps}``,
    ``m`` in ``{1, 2}``, ``eps > 0``.

    Raises:
        ValidationError: for other corrections, or when the logarithms at
          block ``K - 1`` are still floored

    """
    if not spec.kind.is_counterexample:
        raise ValidationError(f"no divergence certificate for {spec.kind.value}")
    tower = tower_or_none(spec.f)
    if tower is None or tower.m not in (1, 2) or not tower.summable:
        raise ValidationError(
            "certificate tails need f = f_{m,eps} with m <= 2, eps > 0"
        )
    alpha, beta = _block_log_argument(spec)
    start = alpha * (K - 1) + beta
    if tower.m == 1:
        if start < 1:
            raise ValidationError(f"block {K - 1} is below the logarithm floor")
        integral = start**-tower.eps / (alpha * tower.eps)
    else:
        if start < math.e:
            raise ValidationError(f"block {K - 1} is below the logarithm floor")
        integral = math.log(start) ** -tower.eps / (alpha * tower.eps)
    return _block_constant(spec) * integral


@attr.s(frozen=True)
class DivergenceDiagnostic:
    slope = attr.ib(type=float)
    """Fitted log-log slope of the increments against ``n``"""
    partial_sum = attr.ib(type=float)
    exceeds_target = attr.ib(type=bool)
    label = attr.ib(type=str)


def diagnose(
    ledger: SeriesLedger, target: float, delta: float = 0.1, window: int = 8
) -> DivergenceDiagnostic:
    """Label a ledger: "divergence detected" when the partial sum exceeds
    ``target`` and the last ``window`` positive increments decay slower than
    ``n^{-1-delta}``. This is a diagnostic, never a proof.

    """
    if window < 2:
        raise ValidationError(f"slope fit needs a window of 2 at least, got {window}")
    ns, increments = ledger.ns, ledger.increments
    positive = increments > 0
    ns, increments = ns[positive][-window:], increments[positive][-window:]
    if ns.size >= 2 and np.unique(ns).size >= 2:
        slope = float(np.polyfit(np.log(ns), np.log(increments), 1)[0])
    else:
        slope = -math.inf
    exceeds = ledger.cum_sum > target
    detected = exceeds and slope > -1 - delta
    return DivergenceDiagnostic(
        slope,
        ledger.cum_sum,
        exceeds,
        DIVERGENCE_DETECTED if detected else NO_DIVERGENCE_DETECTED,
    )


def statement1_dyadic(
    spec: ProcessSpec,
    params: ExponentParams,
    trials: int,
    seed: int,
    N_dyadic: int,
    threads: int = 1,
) -> SeriesLedger:
    """Partial sums of ``sum_j P(M_{2^j} > eps 2^{j/p})`` for ``j = 0..N_dyadic``.

    Raises:
        ParameterMismatch: unless ``p = r``
        HorizonExceeded: when ``2^N_dyadic`` is beyond the horizon

    """
    if params.p != params.r:
        raise ParameterMismatch(
            f"the dyadic form needs p = r, got r={params.r}, p={params.p}"
        )
    spec.check_length(2**N_dyadic)
    tails = [
        estimate_tail(
            spec, 2**j, threshold(params, 2**j), Statistic.M, trials, seed, threads
        )
        for j in range(N_dyadic + 1)
    ]
    return assemble(params, tails, weights=[1.0] * len(tails))


@attr.s(frozen=True)
class RateEstimate:
    """Estimate of ``P(sup_{n <= k <= K} k^{-1/r} |S_k| > eps)``, a lower bound of
    the supremum over all ``k >= n``."""

    anchor = attr.ib(type=int)
    window = attr.ib(type=int)
    trials = attr.ib(type=int)
    hits = attr.ib(type=int)
    p_hat = attr.ib(type=float)
    ci_low = attr.ib(type=float)
    ci_high = attr.ib(type=float)
    comparison = attr.ib(type=float)
    """``n^{1-p/r}``"""

    @property
    def normalized(self) -> float:
        """``p_hat / n^{1-p/r}``"""
        return self.p_hat / self.comparison


def statement1_rate(
    spec: ProcessSpec,
    params: ExponentParams,
    n_anchor: Sequence[int],
    K_window: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> List[RateEstimate]:
    """Estimate the windowed suprema for every anchor from the same replicas,
    so the estimates are non-increasing in the anchor.

    Raises:
        ParameterMismatch: unless ``p > r``
        HorizonExceeded: when ``K_window`` is beyond the horizon

    """
    if not params.p > params.r:
        raise ParameterMismatch(
            f"the rate form needs p > r, got r={params.r}, p={params.p}"
        )
    anchors = [int(n) for n in n_anchor]
    if any(not 1 <= n <= K_window for n in anchors):
        raise ValidationError(f"anchors must lie in [1, {K_window}]")
    scale = np.arange(1, K_window + 1, dtype=float) ** (-1 / params.r)
    columns = np.array(anchors) - 1

    def reducer(x: np.ndarray) -> np.ndarray:
        scaled = np.abs(np.cumsum(x, axis=1)) * scale
        # sup over k >= n within the window
        suffix = np.maximum.accumulate(scaled[:, ::-1], axis=1)[:, ::-1]
        return suffix[:, columns] > params.eps

    stream = RandomStream.for_cell(seed, "rate", K_window)
    hits = count_hits(spec, K_window, trials, stream, reducer, threads)
    rows = []
    for anchor, count in zip(anchors, hits):
        low, high = wilson_interval(int(count), trials)
        rows.append(
            RateEstimate(
                anchor,
                K_window,
                trials,
                int(count),
                int(count) / trials,
                low,
                high,
                float(anchor) ** (1 - params.p / params.r),
            )
        )
    return rows
