# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Closed-form maximal inequalities and their comparison with tail estimates."""

import logging
import math
from typing import List, Sequence

import attr
import numpy as np

from swh.baumkatz.classes import ExponentParams, series_weight, threshold
from swh.baumkatz.exception import ValidationError
from swh.baumkatz.funclib import PowerEnvelope
from swh.baumkatz.generators import ProcessSpec, SignedBlockFactor
from swh.baumkatz.montecarlo import TailEstimate

logger = logging.getLogger(__name__)

SHAO_ALPHA = 0.5


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValidationError(f"{attribute.name} must be positive, got {value}")


def _alpha(instance, attribute, value):
    if not 0 < value < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {value}")


def _probability(instance, attribute, value):
    if not 0 <= value <= 1:
        raise ValidationError(f"{attribute.name} must lie in [0, 1], got {value}")


@attr.s(frozen=True)
class ShaoInputs:
    x = attr.ib(type=float, converter=float, validator=_positive)
    a = attr.ib(type=float, converter=float, validator=_positive)
    alpha = attr.ib(type=float, converter=float, validator=_alpha)
    B_n = attr.ib(type=float, converter=float, validator=_positive)
    """``sum_{i <= n} E X_i^2``"""
    p_max = attr.ib(type=float, converter=float, validator=_probability)
    """``P(max_{i <= n} |X_i| > a)``"""


def shao_exponential(inp: ShaoInputs) -> float:
    """The exponential factor of Shao's inequality (natural logarithm)."""
    ratio = inp.a * inp.x / inp.B_n
    rate = inp.x**2 * inp.alpha / (2 * (inp.a * inp.x + inp.B_n))
    return math.exp(-rate * (1 + 2 / 3 * math.log1p(ratio)))


def shao_bound(inp: ShaoInputs) -> float:
    """Shao's maximal inequality for negatively associated sequences:
    ``P(M_n >= x) <= 2 p_max + 2/(1 - alpha) exp(...)``.

    >>> round(shao_bound(ShaoInputs(x=1, a=1, alpha=0.5, B_n=1, p_max=0)), 4)
    3.3319

    """
    return 2 * inp.p_max + 2 / (1 - inp.alpha) * shao_exponential(inp)


def doob_bound(moment_p: float, t: float, p: float) -> float:
    """Doob's inequality ``P(M_n >= t) <= E|S_n|^p / t^p`` for martingales.

    >>> doob_bound(100, 20, 2)
    0.25

    """
    if not p >= 1:
        raise ValidationError(f"Doob's inequality needs p >= 1, got {p}")
    if not t > 0:
        raise ValidationError(f"threshold must be positive, got {t}")
    if moment_p < 0:
        raise ValidationError(f"moments are non-negative, got {moment_p}")
    return moment_p / t**p


def markov_bound(g_moment: float, g_at_t: float) -> float:
    """``P(g(V) > g(t)) <= E g(V) / g(t)``."""
    if not g_at_t > 0:
        raise ValidationError(f"g(t) must be positive, got {g_at_t}")
    if g_moment < 0:
        raise ValidationError(f"moments are non-negative, got {g_moment}")
    return g_moment / g_at_t


@attr.s(frozen=True)
class ViolationReport:
    bound = attr.ib(type=float)
    ci_low = attr.ib(type=float)
    margin = attr.ib(type=float)
    """``bound - ci_low``"""
    violated = attr.ib(type=bool)
    """Whether the bound is significantly breached"""


def empirical_violation(bound: float, est: TailEstimate) -> ViolationReport:
    """Compare a bound with the lower confidence limit of a tail estimate."""
    margin = bound - est.ci_low
    if margin < 0:
        logger.warning(
            "bound %s below the lower confidence limit %s at n=%s, t=%s",
            bound,
            est.ci_low,
            est.n,
            est.t,
        )
    return ViolationReport(bound, est.ci_low, margin, margin < 0)


def p_max_exact(spec: ProcessSpec, n: int, a: float) -> float:
    """``P(max_{i <= n} |X_i| > a) = 1 - prod (1 - P(|X_i| > a))`` for an
    independent process.

    """
    if not spec.is_independent:
        raise ValidationError(
            f"exact p_max needs independent variables, got {spec.kind.value}"
        )
    log_none = 0.0
    for factor in spec.factors(n):
        assert not isinstance(factor, SignedBlockFactor)
        values, probs = np.abs(np.asarray(factor.values)), np.asarray(factor.probs)
        single = float(np.sum(probs[values > a]))
        if single >= 1:
            return 1.0
        log_none += factor.length * math.log1p(-single)
    if log_none == 0:
        return 0.0
    return -math.expm1(log_none)


def arbitrary_sum_bound(
    params: ExponentParams, envelope: PowerEnvelope, moment_sup: float, n: int
) -> float:
    """Bound on ``P(|S_n| > eps n^{1/r})`` valid under any dependence.

    ``envelope`` is a concave non-decreasing ``g_p``, hence subadditive, so
    ``E g_p(|S_n|) <= n sup_i E g_p(|X_i|)``; Markov's inequality concludes.

    Args:
        params: exponents of the series
        envelope: concave power envelope
        moment_sup: ``sup_i E g_p(|X_i|)``
        n: index

    """
    if envelope.at_zero < 0:
        raise ValidationError("the envelope must be non-negative at 0")
    return markov_bound(n * moment_sup, float(envelope(threshold(params, n))))


def shao_truncation(params: ExponentParams) -> float:
    """``N = 8p/(2-r)``: truncating at ``a = x/N`` makes the exponential term of
    Shao's inequality of order ``n^{-p/r}``."""
    return 8 * params.p / (2 - params.r)


@attr.s(frozen=True)
class IndependentTerm:
    n = attr.ib(type=int)
    x = attr.ib(type=float)
    a = attr.ib(type=float)
    B_n = attr.ib(type=float)
    p_max = attr.ib(type=float)
    bound = attr.ib(type=float)
    weight = attr.ib(type=float)
    term = attr.ib(type=float)
    """``n^{p/r-2}`` times the bound"""
    comparison = attr.ib(type=float)
    """``n^{-p/r}``"""


def indep_series_terms(
    params: ExponentParams, spec: ProcessSpec, n_grid: Sequence[int]
) -> List[IndependentTerm]:
    """Shao's bound at ``x = eps n^{1/r}``, ``a = x/N``, ``alpha = 1/2`` for every
    ``n`` of the grid, with the exact ``B_n`` and ``p_max`` of an independent
    process.

    """
    truncation = shao_truncation(params)
    rows = []
    for n in n_grid:
        x = threshold(params, n)
        a = x / truncation
        b_n = spec.second_moment_sum(n)
        if not b_n > 0:
            raise ValidationError(f"B_{n} vanishes: Shao's bound needs B_n > 0")
        p_max = p_max_exact(spec, n, a)
        bound = shao_bound(ShaoInputs(x, a, SHAO_ALPHA, b_n, p_max))
        weight = series_weight(params, n)
        rows.append(
            IndependentTerm(
                n,
                x,
                a,
                b_n,
                p_max,
                bound,
                weight,
                weight * bound,
                float(n) ** (-params.p / params.r),
            )
        )
    return rows
