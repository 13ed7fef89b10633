# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

from enum import Enum
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import attr
import numpy as np

from swh.baumkatz.exception import HorizonExceeded, ValidationError
from swh.baumkatz.funclib.logtower import LN2, ArrayLike, LogTower, tower_or_none
from swh.baumkatz.utils import cached_method

logger = logging.getLogger(__name__)


class Interpolation(Enum):
    """How a :class:`DyadicFunction` is evaluated between dyadic points."""

    PIECEWISE_CONSTANT = "piecewise-constant-right-continuous"
    ANALYTIC = "analytic-formula"


def _as_float_array(values: Sequence[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@attr.s(frozen=True, eq=False)
class DyadicFunction:
    """A positive non-decreasing function on ``[0, 2^N]`` known through its values
    at the dyadic points ``2^1, ..., 2^N``.

    """

    dyadic_values = attr.ib(type=np.ndarray, converter=_as_float_array)
    """Values at ``2^n`` for ``n = 1..N``"""
    below_2 = attr.ib(type=float, default=None)
    """Value on ``[0, 2)``; defaults to the value at 2"""
    interpolation = attr.ib(
        type=Interpolation, default=Interpolation.PIECEWISE_CONSTANT
    )
    formula = attr.ib(type=Optional[Callable[[ArrayLike], ArrayLike]], default=None)
    """Closed form used by the analytic interpolation"""
    witness = attr.ib(type=Optional[Callable[[int], float]], default=None, kw_only=True)
    """Upper bound ``m -> sum_{n >= m} 1/f(2^n)`` certifying summability"""

    def __attrs_post_init__(self):
        values = self.dyadic_values
        if values.ndim != 1 or values.size == 0:
            raise ValidationError("a dyadic function needs at least one dyadic value")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValidationError("dyadic values must be finite and positive")
        if np.any(np.diff(values) < 0):
            first = int(np.flatnonzero(np.diff(values) < 0)[0]) + 1
            raise ValidationError(f"dyadic values decrease after 2^{first}")
        if self.below_2 is None:
            object.__setattr__(self, "below_2", float(values[0]))
        if not 0 < self.below_2 <= values[0]:
            raise ValidationError(
                f"value below 2 must lie in (0, f(2)], got {self.below_2}"
            )
        if self.interpolation is Interpolation.ANALYTIC and self.formula is None:
            raise ValidationError("analytic interpolation requires a formula")

    @property
    def horizon(self) -> int:
        return int(self.dyadic_values.size)

    @property
    def upper(self) -> float:
        """Right end ``2^N`` of the evaluation domain."""
        return math.ldexp(1.0, self.horizon)

    def at_dyadic(self, n: int) -> float:
        """Value at ``2^n``, ``1 <= n <= N``."""
        if not 1 <= n <= self.horizon:
            raise HorizonExceeded(f"2^{n} is outside [2, 2^{self.horizon}]")
        return float(self.dyadic_values[n - 1])

    def check_domain(self, x: ArrayLike) -> None:
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise ValidationError("dyadic functions are defined on [0, 2^N]")
        if np.any(arr > self.upper):
            raise HorizonExceeded(
                f"evaluation at {float(np.max(arr))!r} beyond 2^{self.horizon}"
            )

    def __call__(self, x: ArrayLike) -> ArrayLike:
        self.check_domain(x)
        if self.interpolation is Interpolation.ANALYTIC:
            assert self.formula is not None
            return self.formula(x)
        arr = np.asarray(x, dtype=float)
        # frexp gives x = mant * 2^exp with mant in [0.5, 1), so floor(log2 x) = exp - 1
        _, exponent = np.frexp(np.where(arr > 0, arr, 1.0))
        index = np.clip(exponent - 1, 1, self.horizon) - 1
        result = np.where(arr < 2.0, self.below_2, self.dyadic_values[index])
        if np.ndim(x) == 0:
            return float(result)
        return result

    def at_log(self, log_x: ArrayLike) -> ArrayLike:
        """Evaluate at ``exp(log_x)``, in the log domain whenever possible."""
        log_arr = np.asarray(log_x, dtype=float)
        position = log_arr / LN2
        if np.any(position > self.horizon * (1 + 1e-12)):
            raise HorizonExceeded(f"evaluation beyond 2^{self.horizon}")
        tower = tower_or_none(self)
        if tower is not None:
            return tower.at_log(log_x)
        if self.interpolation is Interpolation.ANALYTIC:
            assert self.formula is not None
            return self.formula(np.minimum(np.exp(log_x), self.upper))
        # rounding of log_x must not move a dyadic point into the previous block
        index = np.floor(position + 1e-12).astype(int)
        result = np.where(
            index < 1,
            self.below_2,
            self.dyadic_values[np.clip(index, 1, self.horizon) - 1],
        )
        if np.ndim(log_x) == 0:
            return float(result)
        return result

    def describe(self) -> Dict[str, Any]:
        tower = tower_or_none(self)
        if tower is not None:
            return {**tower.describe(), "horizon": self.horizon}
        return {
            "dyadic": [float(v) for v in self.dyadic_values],
            "below_2": self.below_2,
        }

    @cached_method
    def reciprocal_partial_sums(self) -> np.ndarray:
        """Partial sums of ``1/f(2^n)`` over the horizon."""
        return np.cumsum(1.0 / self.dyadic_values)

    @classmethod
    def from_values(
        cls,
        values: Sequence[float],
        below_2: Optional[float] = None,
        witness: Optional[Callable[[int], float]] = None,
    ) -> "DyadicFunction":
        return cls(values, below_2, witness=witness)

    @classmethod
    def from_function(
        cls,
        func: Callable[[ArrayLike], ArrayLike],
        horizon: int,
        witness: Optional[Callable[[int], float]] = None,
    ) -> "DyadicFunction":
        """Sample ``func`` at dyadic points and keep it as the closed form."""
        points = np.ldexp(1.0, np.arange(1, horizon + 1))
        values = np.asarray(func(points), dtype=float)
        return cls(
            values,
            None,
            Interpolation.ANALYTIC,
            func,
            witness=witness,
        )

    @classmethod
    def from_log_tower(cls, tower: LogTower, horizon: int) -> "DyadicFunction":
        """Dyadic view of ``f_{m,eps}``; values computed in the log domain."""
        values = tower.at_log(np.arange(1, horizon + 1) * LN2)
        witness = tower.reciprocal_tail_bound if tower.summable else None
        if tower.summable and tower.m > 2:
            witness = None
        return cls(values, None, Interpolation.ANALYTIC, tower, witness=witness)

    @classmethod
    def constant(cls, value: float, horizon: int) -> "DyadicFunction":
        return cls(np.full(horizon, float(value)))


SlowFunction = Union[DyadicFunction, LogTower]


def evaluate_at_log(f: SlowFunction, log_x: ArrayLike) -> ArrayLike:
    """Evaluate a log tower or dyadic function at ``exp(log_x)``."""
    return f.at_log(log_x)


class SumForm(Enum):
    """The four equivalent summability tests for a non-decreasing ``f``."""

    DYADIC = 1
    """``sum 1/f(2^{cn})``"""
    SCALED_DYADIC = 2
    """``sum 1/f(eps 2^{cn})``"""
    HARMONIC = 3
    """``sum 1/(n f(n^c))``"""
    SCALED_HARMONIC = 4
    """``sum 1/(n f(eps n^c))``"""


def dyadic_sum_test(
    f: SlowFunction, form: SumForm, c: float, eps: float, N: int
) -> List[float]:
    """Partial sums of one of the four index-transform forms, up to ``N``.

    Raises:
        ValidationError: on non-positive ``c``, ``eps`` or ``N``
        HorizonExceeded: when a dyadic function would be evaluated beyond its
          horizon

    """
    form = SumForm(form)
    if c <= 0 or eps <= 0 or N < 1:
        raise ValidationError("dyadic sum test needs c > 0, eps > 0 and N >= 1")
    n = np.arange(1, N + 1, dtype=float)
    if form in (SumForm.DYADIC, SumForm.SCALED_DYADIC):
        log_arg = c * n * LN2
    else:
        log_arg = c * np.log(n)
    if form in (SumForm.SCALED_DYADIC, SumForm.SCALED_HARMONIC):
        log_arg = log_arg + math.log(eps)
    terms = 1.0 / np.asarray(evaluate_at_log(f, log_arg), dtype=float)
    if form in (SumForm.HARMONIC, SumForm.SCALED_HARMONIC):
        terms = terms / n
    logger.debug("dyadic sum test %s, c=%s, eps=%s, N=%s", form.name, c, eps, N)
    return [float(v) for v in np.cumsum(terms)]


@attr.s(frozen=True, eq=False)
class SummableSeqSpec:
    """A positive non-increasing sequence with a certified tail majorant."""

    term = attr.ib(type=Callable[[int], float])
    tail_bound = attr.ib(type=Callable[[int], float])
    horizon = attr.ib(type=int)

    def __attrs_post_init__(self):
        if self.horizon < 1:
            raise ValidationError("summable sequence horizon must be positive")
        terms = self.terms()
        if np.any(terms <= 0) or not np.all(np.isfinite(terms)):
            raise ValidationError("summable sequence terms must be positive")
        if np.any(np.diff(terms) > 0):
            first = int(np.flatnonzero(np.diff(terms) > 0)[0]) + 2
            raise ValidationError(f"sequence increases at n={first}")
        for m in range(1, self.horizon + 1):
            if self.tail_bound(m) < terms[m - 1]:
                raise ValidationError(f"tail bound at m={m} is below a_m")

    @cached_method
    def terms(self) -> np.ndarray:
        values = np.array(
            [self.term(n) for n in range(1, self.horizon + 1)], dtype=float
        )
        values.setflags(write=False)
        return values

    @classmethod
    def geometric(cls, ratio: float, horizon: int) -> "SummableSeqSpec":
        """``a_n = ratio^n``."""
        if not 0 < ratio < 1:
            raise ValidationError("geometric ratio must be in (0, 1)")
        return cls(
            lambda n: ratio**n, lambda m: ratio**m / (1 - ratio), horizon
        )

    @classmethod
    def inverse_n_log_squared(cls, horizon: int) -> "SummableSeqSpec":
        """``a_n = 1/(n ln^2(n+1))``."""

        def term(n: int) -> float:
            return 1.0 / (n * math.log(n + 1) ** 2)

        def tail_bound(m: int) -> float:
            # a_m + integral from m of dx/(x ln^2 x), which needs m >= 2
            if m == 1:
                return term(1) + term(2) + 1.0 / LN2
            return term(m) + 1.0 / math.log(m)

        return cls(term, tail_bound, horizon)

    @classmethod
    def log_tower_reciprocal(cls, tower: LogTower, horizon: int) -> "SummableSeqSpec":
        """``a_n = 1/f_{m,eps}(2^n)``."""
        return cls(
            lambda n: 1.0 / float(tower.at_log(n * LN2)),
            tower.reciprocal_tail_bound,
            horizon,
        )

    @classmethod
    def reciprocal_of(
        cls, g: DyadicFunction, tail_bound: Optional[Callable[[int], float]] = None
    ) -> "SummableSeqSpec":
        """``a_n = 1/g(2^n)`` with the witness carried by ``g`` by default."""
        bound = tail_bound or g.witness
        if bound is None:
            raise ValidationError("summability witness required for 1/g(2^n)")
        return cls(lambda n: 1.0 / g.at_dyadic(n), bound, g.horizon)
