# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Dependence regimes, exponent parameters and critical moment orders."""

from enum import Enum
import logging

import attr

from swh.baumkatz.exception import UnsupportedCombination, ValidationError

logger = logging.getLogger(__name__)


class DependenceRegime(Enum):
    ARBITRARY = "Arbitrary"
    PAIRWISE_NQD = "PairwiseNQD"
    NEGATIVELY_ASSOCIATED = "NegativelyAssociated"
    MDS = "MDS"
    INDEPENDENT_CENTERED = "IndependentCentered"

    @classmethod
    def parse(cls, name: str) -> "DependenceRegime":
        """Look a regime up by value or member name, case insensitively.

        >>> DependenceRegime.parse("mds")
        <DependenceRegime.MDS: 'MDS'>
        >>> DependenceRegime.parse("independent_centered").value
        'IndependentCentered'

        """
        wanted = name.replace("_", "").replace("-", "").lower()
        for regime in cls:
            if wanted in (regime.value.lower(), regime.name.replace("_", "").lower()):
                return regime
        raise ValidationError(f"unknown dependence regime {name!r}")


def _check_r(instance, attribute, value):
    if not 0 < value < 2:
        raise ValidationError(f"r must lie in (0, 2), got {value}")


def _check_eps(instance, attribute, value):
    if not value > 0:
        raise ValidationError(f"eps must be positive, got {value}")


@attr.s(frozen=True)
class ExponentParams:
    """The exponents of ``sum n^{p/r-2} P(M_n > eps n^{1/r})`` and the regime of
    the sequence.

    """

    r = attr.ib(type=float, converter=float, validator=_check_r)
    p = attr.ib(type=float, converter=float)
    eps = attr.ib(type=float, default=1.0, converter=float, validator=_check_eps)
    regime = attr.ib(
        type=DependenceRegime, default=DependenceRegime.INDEPENDENT_CENTERED
    )

    @p.validator
    def _check_p(self, attribute, value):
        if not value >= self.r:
            raise ValidationError(f"p must be at least r={self.r}, got {value}")

    @regime.validator
    def _check_regime(self, attribute, value):
        if value is DependenceRegime.ARBITRARY and self.r >= 1:
            raise ValidationError(
                "arbitrary sequences need r < 1: X_n = 1 makes the series diverge "
                "for every r >= 1"
            )

    @property
    def q(self) -> float:
        return critical_exponent(self.regime, self.r, self.p)


def critical_exponent(regime: DependenceRegime, r: float, p: float) -> float:
    """Smallest uniform moment order ``q`` such that
    ``sup_n E|X_n|^q f(|X_n|) < inf`` makes the series converge.

    Args:
        regime: dependence structure of the sequence
        r: Marcinkiewicz-Zygmund exponent, in ``(0, 2)``
        p: rate exponent, at least ``r``

    Raises:
        ValidationError: when ``r`` or ``p`` are out of range
        UnsupportedCombination: when no convergence result covers the regime
          at these exponents

    >>> critical_exponent(DependenceRegime.MDS, 1, 3)
    4.0
    >>> critical_exponent(DependenceRegime.ARBITRARY, 0.5, 1.5)
    2.0

    """
    _check_r(None, None, r)
    if not p >= r:
        raise ValidationError(f"p must be at least r={r}, got {p}")
    r, p = float(r), float(p)
    if regime is DependenceRegime.ARBITRARY:
        if r >= 1:
            raise UnsupportedCombination(
                "arbitrary sequences need r < 1: the constant sequence X_n = 1 "
                "violates the series for r >= 1"
            )
        return max(p, (p - r) / (1 - r))
    if regime is DependenceRegime.MDS:
        return p if p <= 2 else 2 * (p - r) / (2 - r)
    if regime is DependenceRegime.PAIRWISE_NQD and not 1 <= p < 2:
        raise UnsupportedCombination(
            "pairwise NQD sequences are covered for 1 <= p < 2 only, "
            "by the pairwise NQD result for identical moment envelopes"
        )
    if regime is DependenceRegime.NEGATIVELY_ASSOCIATED and p < 2:
        raise UnsupportedCombination(
            "negatively associated sequences are covered for p >= 2 only, "
            "by the maximal inequality for independent and NA sequences; "
            "use the pairwise NQD regime for 1 <= p < 2"
        )
    return p


def series_weight(params: ExponentParams, n: int) -> float:
    """``n^{p/r-2}``.

    >>> series_weight(ExponentParams(r=1, p=3), 2)
    2.0

    """
    if n < 1:
        raise ValidationError(f"series index must be positive, got {n}")
    return float(n) ** (params.p / params.r - 2)


def threshold(params: ExponentParams, n: int) -> float:
    """``eps n^{1/r}``.

    >>> threshold(ExponentParams(r=0.5, p=1, eps=1), 9)
    81.0

    """
    if n < 1:
        raise ValidationError(f"series index must be positive, got {n}")
    return params.eps * float(n) ** (1 / params.r)
