# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Iterated-logarithm corrections ``f_m`` and ``f_{m,eps}``.

``log+(x) = max(1, ln x)`` with ``log+(0) = 1``; ``log+_k`` is its k-th
iterate, ``f_m = log+_1 ... log+_m`` and ``f_{m,eps} = f_m (log+_m)^eps``.

"""

import math
from typing import Any, Dict, Optional, Union

import attr
import numpy as np

from swh.baumkatz.exception import ValidationError

ArrayLike = Union[float, np.ndarray]

LN2 = math.log(2.0)


def log_plus(x: ArrayLike) -> ArrayLike:
    """Evaluate ``max(1, ln x)``, with value 1 on ``[0, e]``.

    >>> log_plus(0.0)
    1.0
    >>> round(log_plus(math.e ** 2), 12)
    2.0

    """
    if np.ndim(x) == 0:
        return max(1.0, math.log(x)) if x > 1.0 else 1.0
    arr = np.asarray(x, dtype=float)
    return np.maximum(1.0, np.log(np.maximum(arr, 1.0)))


def _tower_from_first_level(m: int, eps: float, level: ArrayLike) -> ArrayLike:
    """Finish a tower evaluation given ``log+_1(x)``."""
    product = level
    for _ in range(m - 1):
        level = log_plus(level)
        product = product * level
    if eps:
        product = product * level**eps
    return product


def _check_tower(m: int, eps: float) -> None:
    if int(m) != m or m < 1:
        raise ValidationError(f"log tower depth must be a positive integer, got {m}")
    if not eps >= 0:
        raise ValidationError(f"log tower exponent must be non-negative, got {eps}")


def eval_log_tower(m: int, eps: float, x: ArrayLike) -> ArrayLike:
    """Evaluate ``f_{m,eps}(x)``.

    Args:
        m: depth of the tower (number of iterated logarithms)
        eps: extra exponent on the innermost logarithm
        x: non-negative point(s) of evaluation

    Returns:
        the value(s), all greater or equal to 1

    Raises:
        ValidationError: on invalid depth, exponent or negative points

    >>> eval_log_tower(1, 0, 1.0)
    1.0
    >>> round(eval_log_tower(1, 0, 32.0), 4)
    3.4657

    """
    _check_tower(m, eps)
    if np.any(np.asarray(x) < 0):
        raise ValidationError("log towers are defined on [0, inf)")
    return _tower_from_first_level(m, eps, log_plus(x))


@attr.s(frozen=True)
class LogTower:
    """The log-tower function ``f_{m,eps}`` as a callable."""

    m = attr.ib(type=int, default=1)
    eps = attr.ib(type=float, default=0.0, converter=float)

    @m.validator
    @eps.validator
    def _check(self, attribute, value):
        _check_tower(self.m, self.eps)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return eval_log_tower(self.m, self.eps, x)

    def at_log(self, log_x: ArrayLike) -> ArrayLike:
        """Evaluate the tower at ``exp(log_x)`` without forming the argument."""
        if np.ndim(log_x) == 0:
            first: ArrayLike = max(1.0, float(log_x))
        else:
            first = np.maximum(1.0, np.asarray(log_x, dtype=float))
        return _tower_from_first_level(self.m, self.eps, first)

    @property
    def summable(self) -> bool:
        """Whether ``sum 1/f(2^n)`` converges (``eps > 0``)."""
        return self.eps > 0

    def reciprocal_tail_bound(self, m: int) -> float:
        """Upper bound on ``sum_{n >= m} 1/f(2^n)``.

        Terms before the point where the logarithms exceed their floor are summed
        explicitly, the rest is majorized by the integral of the decreasing
        continuous extension.

        Raises:
            ValidationError: when the series diverges or no majorant is known
              for this depth

        """
        if not self.summable:
            raise ValidationError(f"sum of 1/f(2^n) diverges for {self.describe()}")
        if self.m == 1:
            start = max(m, 2)
            tail = LN2 ** -(1 + self.eps) * start**-self.eps / self.eps
        elif self.m == 2:
            # ln(x ln 2) >= 1 from x = 4 on
            start = max(m, 4)
            tail = math.log(start * LN2) ** -self.eps / (self.eps * LN2)
        else:
            raise ValidationError(f"no analytic tail majorant for depth {self.m}")
        head = sum(1.0 / self.at_log(n * LN2) for n in range(m, start + 1))
        return float(head + tail)

    def describe(self) -> Dict[str, Any]:
        return {"log_tower": {"m": self.m, "eps": self.eps}}


def tower_or_none(f: Any) -> Optional[LogTower]:
    """Return the log tower behind ``f`` if there is one."""
    if isinstance(f, LogTower):
        return f
    formula = getattr(f, "formula", None)
    if isinstance(formula, LogTower):
        return formula
    return None
