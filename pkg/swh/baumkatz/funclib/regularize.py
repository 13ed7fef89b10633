# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Regularization of summable sequences.

A positive non-increasing summable ``a_n`` is replaced by ``b_n >= a_n`` whose
consecutive ratios stay above ``c_k`` on the k-th block ``(n_k, n_{k+1}]``,
while ``sum_{n >= n_1} b_n`` stays below 3. Taking ``f(2^n) = 1/b_n`` turns a
summable ``1/g(2^n)`` into a dominated ``f`` with ``f(2^{n+1})/f(2^n) -> 1``.

"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

import attr
import numpy as np

from swh.baumkatz.exception import InfeasibleSchedule, ValidationError
from swh.baumkatz.funclib.dyadic import DyadicFunction, SummableSeqSpec

logger = logging.getLogger(__name__)

# slack on the bound 3 = 3 sum_k 2^{-k} of the regularized tail
TAIL_SLACK = 1e-9


def default_c(k: int) -> float:
    """``c_k = 1 - 1/(k+1)``."""
    return 1.0 - 1.0 / (k + 1)


@attr.s(frozen=True)
class ScheduleRule:
    """How to pick the ratios ``c_k`` and the block boundaries ``n_k``."""

    c = attr.ib(type=Callable[[int], float], default=default_c)
    forced_breaks = attr.ib(type=Optional[List[int]], default=None)
    """Block boundaries to use instead of the greedy selection"""


@attr.s(frozen=True)
class RegularizationSchedule:
    c = attr.ib(type=Callable[[int], float])
    n_breaks = attr.ib(type=List[int])

    def __attrs_post_init__(self):
        if not self.n_breaks:
            raise ValidationError("a schedule needs at least one block boundary")
        if any(b <= a for a, b in zip(self.n_breaks, self.n_breaks[1:])):
            raise ValidationError("block boundaries must be strictly increasing")
        if self.n_breaks[0] < 1:
            raise ValidationError("block boundaries must be positive")
        cs = [self.c(k) for k in range(1, len(self.n_breaks) + 2)]
        if any(not 0 < ck < 1 for ck in cs):
            raise ValidationError("ratios c_k must lie in (0, 1)")
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise ValidationError("ratios c_k must be strictly increasing")

    def block_of(self, n: int) -> int:
        """Index ``k`` of the block ``(n_k, n_{k+1}]`` holding ``n``, 0 before
        ``n_1``.

        """
        return int(np.searchsorted(self.n_breaks, n, side="left"))

    def violations(self, a: SummableSeqSpec) -> List[str]:
        """Schedule inequalities that fail for ``a`` within its horizon."""
        found = []
        for k, n_k in enumerate(self.n_breaks, start=1):
            limit = 2.0**-k * (1 - self.c(k + 1))
            if not a.tail_bound(n_k) < limit:
                found.append(f"tail bound at n_{k}={n_k} is not below {limit!r}")
            if k < len(self.n_breaks):
                gap = self.n_breaks[k] - n_k
                if self.c(k) ** gap > limit:
                    found.append(f"c_{k}^{gap} exceeds {limit!r}")
        return found


def _greedy_breaks(a: SummableSeqSpec, c: Callable[[int], float]) -> List[int]:
    horizon = a.horizon
    n = 1
    while n <= horizon and not a.tail_bound(n) < 0.5 * (1 - c(2)):
        n += 1
    if n > horizon:
        raise InfeasibleSchedule(
            f"tail bound never drops below {0.5 * (1 - c(2))!r} up to n={horizon}"
        )
    breaks = [n]
    while True:
        k = len(breaks)
        tail_limit = 2.0 ** -(k + 1) * (1 - c(k + 2))
        gap_limit = 2.0**-k * (1 - c(k + 1))
        m = breaks[-1] + 1
        while m <= horizon and not (
            a.tail_bound(m) < tail_limit and c(k) ** (m - breaks[-1]) <= gap_limit
        ):
            m += 1
        if m > horizon:
            break
        breaks.append(m)
    logger.debug("regularization block boundaries: %s", breaks)
    return breaks


def regularize_sequence(
    a: SummableSeqSpec, schedule_rule: Optional[ScheduleRule] = None
) -> Tuple[np.ndarray, RegularizationSchedule]:
    """Regularize ``a`` with ``b_n = max(a_n, c_k b_{n-1})`` past ``n_1``.

    Args:
        a: the summable sequence with its tail majorant
        schedule_rule: ratios and optional forced block boundaries; by default
          ``c_k = 1 - 1/(k+1)`` and boundaries chosen greedily as the smallest
          integers satisfying both schedule inequalities

    Returns:
        the regularized sequence ``b_1..b_N`` and the schedule used

    Raises:
        InfeasibleSchedule: when ``n_1`` cannot be placed within the horizon

    """
    rule = schedule_rule or ScheduleRule()
    if rule.forced_breaks:
        breaks = list(rule.forced_breaks)
    else:
        breaks = _greedy_breaks(a, rule.c)
    schedule = RegularizationSchedule(rule.c, breaks)
    if breaks[0] > a.horizon:
        raise InfeasibleSchedule(f"n_1={breaks[0]} is beyond the horizon")

    terms = a.terms()
    b = terms.copy()
    block = 0
    for n in range(breaks[0] + 1, a.horizon + 1):
        while block + 1 < len(breaks) and n > breaks[block + 1]:
            block += 1
        b[n - 1] = max(terms[n - 1], rule.c(block + 1) * b[n - 2])
    return b, schedule


def regularization_report(
    a: SummableSeqSpec, b: np.ndarray, schedule: RegularizationSchedule
) -> Dict[str, object]:
    """Evaluate the postconditions of :func:`regularize_sequence`."""
    terms = a.terms()
    ratios = b[1:] / b[:-1]
    n = np.arange(2, b.size + 1)
    c_of_n = np.array([schedule.c(max(k, 1)) for k in map(schedule.block_of, n)])
    past_first = n > schedule.n_breaks[0]
    tail = float(np.sum(b[schedule.n_breaks[0] - 1 :]))
    return {
        "dominates": bool(np.all(b >= terms)),
        "non_increasing": bool(np.all(ratios <= 1.0)),
        "ratio_lower_bound": bool(np.all(ratios[past_first] >= c_of_n[past_first])),
        "tail_sum": tail,
        "tail_within_bound": tail <= 3.0 + TAIL_SLACK,
        "schedule_violations": schedule.violations(a),
    }


def ratio_smooth_schedule(
    g: DyadicFunction,
    tail_bound: Optional[Callable[[int], float]] = None,
    schedule_rule: Optional[ScheduleRule] = None,
) -> Tuple[DyadicFunction, RegularizationSchedule]:
    """Build ``f(2^n) = 1/b_n`` from the regularization of ``a_n = 1/g(2^n)``.

    The result is piecewise constant, right continuous, below ``g`` at every
    dyadic point and has ratios ``f(2^{n+1})/f(2^n) <= 1/c_k`` on block k.

    """
    a = SummableSeqSpec.reciprocal_of(g, tail_bound)
    b, schedule = regularize_sequence(a, schedule_rule)
    values = 1.0 / b
    partial = np.cumsum(b[::-1])[::-1]

    def witness(m: int) -> float:
        return float(partial[m - 1]) if m <= b.size else 0.0

    return DyadicFunction.from_values(values, witness=witness), schedule


def ratio_smooth(
    g: DyadicFunction,
    tail_bound: Optional[Callable[[int], float]] = None,
    schedule_rule: Optional[ScheduleRule] = None,
) -> DyadicFunction:
    f, _ = ratio_smooth_schedule(g, tail_bound, schedule_rule)
    return f
