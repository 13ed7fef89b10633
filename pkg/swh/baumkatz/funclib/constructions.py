# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Envelope constructions run end to end, with their postcondition reports."""

import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

import attr
import numpy as np

from swh.baumkatz.exception import HorizonExceeded, ValidationError
from swh.baumkatz.funclib.convex import convex_linear_envelope, sqrt_compose
from swh.baumkatz.funclib.dyadic import DyadicFunction, SlowFunction, SummableSeqSpec
from swh.baumkatz.funclib.logtower import LogTower
from swh.baumkatz.funclib.regularize import (
    ratio_smooth_schedule,
    regularization_report,
    regularize_sequence,
)
from swh.baumkatz.funclib.smooth import (
    PowerEnvelope,
    derivative_errors,
    growth_violations,
    power_concave,
    power_convex,
    random_interior_points,
    smooth_c2_envelope,
)

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 1000


@attr.s(frozen=True)
class ConstructionResult:
    columns = attr.ib(type=Sequence[str])
    rows = attr.ib(type=List[List[Any]])
    report = attr.ib(type=Dict[str, Any])
    """Postconditions, by name"""


def as_dyadic(f: SlowFunction, horizon: int) -> DyadicFunction:
    """Dyadic view of ``f`` on ``2^1..2^horizon``."""
    if isinstance(f, LogTower):
        return DyadicFunction.from_log_tower(f, horizon)
    if horizon > f.horizon:
        raise HorizonExceeded(f"f is known up to 2^{f.horizon}, asked 2^{horizon}")
    return f


def _levels(g: DyadicFunction) -> np.ndarray:
    return np.arange(1, g.horizon + 1)


def _regularize(f, horizon, q_exp, seed, points) -> ConstructionResult:
    # the construction runs on a_n = 1/(n ln^2(n+1)); f is not used
    a = SummableSeqSpec.inverse_n_log_squared(horizon)
    b, schedule = regularize_sequence(a)
    report = regularization_report(a, b, schedule)
    violations = report.pop("schedule_violations")
    report["schedule_violations"] = len(violations)
    report["n_1"] = schedule.n_breaks[0]
    report["blocks"] = len(schedule.n_breaks)
    n = np.arange(1, horizon + 1)
    rows = [
        [int(i), float(ai), float(bi), schedule.block_of(int(i))]
        for i, ai, bi in zip(n, a.terms(), b)
    ]
    return ConstructionResult(["n", "a", "b", "block"], rows, report)


def _ratio_smooth(f, horizon, q_exp, seed, points) -> ConstructionResult:
    g = as_dyadic(f, horizon)
    smoothed, schedule = ratio_smooth_schedule(g)
    values = smoothed.dyadic_values
    ratios = values[1:] / values[:-1]
    report = {
        "dominated": bool(np.all(values <= g.dyadic_values)),
        "max_ratio": float(np.max(ratios)) if ratios.size else 1.0,
        "n_1": schedule.n_breaks[0],
    }
    rows = [
        [int(n), float(gn), float(fn)]
        for n, gn, fn in zip(_levels(g), g.dyadic_values, values)
    ]
    return ConstructionResult(["n", "g", "f"], rows, report)


def _smooth(f, horizon, q_exp, seed, points) -> ConstructionResult:
    g = as_dyadic(f, horizon)
    env = smooth_c2_envelope(g)
    sample = random_interior_points(env, points, np.random.default_rng(seed))
    errors = derivative_errors(env, sample)
    growth = growth_violations(env, sample)
    report = {
        "points": points,
        "deriv1_error": errors["deriv1"],
        "deriv2_error": errors["deriv2"],
        "derivative_violations": int(errors["deriv1"] > 1) + int(errors["deriv2"] > 1),
        "growth_first_violations": growth["first"],
        "growth_second_violations": growth["second"],
    }
    levels = _levels(g)
    # block midpoints; the last one is clipped to 2^N where both derivatives vanish
    middle = np.minimum(np.ldexp(1.5, levels), env.upper)
    table = zip(
        levels,
        g.dyadic_values,
        env.value(np.ldexp(1.0, levels)),
        env.deriv1(middle),
        env.deriv2(middle),
    )
    rows = [[int(n)] + [float(v) for v in values] for n, *values in table]
    columns = ["n", "g", "value", "deriv1_mid", "deriv2_mid"]
    return ConstructionResult(columns, rows, report)


def _convex(f, horizon, q_exp, seed, points) -> ConstructionResult:
    g = as_dyadic(f, horizon)
    env = convex_linear_envelope(g)
    report = env.postconditions()
    rows = [
        [int(n), float(an), float(bn), float(dn)]
        for n, an, bn, dn in zip(_levels(g), env.a, env.b, env.d[1:])
    ]
    return ConstructionResult(["n", "a", "b", "d"], rows, report)


def _power_report(envelope: PowerEnvelope) -> Dict[str, Any]:
    return {
        "exponent": envelope.exponent,
        "threshold": envelope.threshold,
        "at_zero": envelope.at_zero,
        "continuity_gap": envelope.continuity_gap(),
        "shape_violations": envelope.shape_violations(envelope.scan_grid()),
    }


def _power_rows(g: DyadicFunction, envelope: PowerEnvelope) -> List[List[Any]]:
    points = np.ldexp(1.0, _levels(g))
    values = envelope.value(points)
    return [
        [int(n), float(gn), float(v)]
        for n, gn, v in zip(_levels(g), g.dyadic_values, values)
    ]


def _exponent(q_exp: Optional[float], name: str) -> float:
    if q_exp is None:
        raise ValidationError(f"construction {name} needs q_exp")
    return float(q_exp)


def _power_concave(f, horizon, q_exp, seed, points) -> ConstructionResult:
    g = as_dyadic(f, horizon)
    envelope = power_concave(smooth_c2_envelope(g), _exponent(q_exp, "power_concave"))
    return ConstructionResult(
        ["n", "g", "envelope"], _power_rows(g, envelope), _power_report(envelope)
    )


def _power_convex(f, horizon, q_exp, seed, points) -> ConstructionResult:
    g = as_dyadic(f, horizon)
    envelope = power_convex(smooth_c2_envelope(g), _exponent(q_exp, "power_convex"))
    return ConstructionResult(
        ["n", "g", "envelope"], _power_rows(g, envelope), _power_report(envelope)
    )


def _sqrt(f, horizon, q_exp, seed, points) -> ConstructionResult:
    g = as_dyadic(f, horizon)
    composed, f_q, n_q = sqrt_compose(g, 1.0 if q_exp is None else float(q_exp))
    report = {
        "N_q": n_q,
        "at_zero": f_q.at_zero,
        "shape_violations": f_q.shape_violations(f_q.scan_grid()),
    }
    table = zip(
        _levels(g),
        g.dyadic_values,
        composed.dyadic_values,
        f_q.value(np.ldexp(1.0, _levels(g))),
    )
    rows = [[int(n)] + [float(v) for v in values] for n, *values in table]
    return ConstructionResult(["n", "g", "f", "f_q"], rows, report)


Construction = Callable[..., ConstructionResult]

CONSTRUCTIONS: Dict[str, Construction] = {
    "regularize": _regularize,
    "ratio_smooth": _ratio_smooth,
    "smooth": _smooth,
    "convex": _convex,
    "power_concave": _power_concave,
    "power_convex": _power_convex,
    "sqrt": _sqrt,
}


def run_construction(
    construction: str,
    f: SlowFunction,
    horizon: int,
    q_exp: Optional[float] = None,
    seed: int = 0,
    points: int = DEFAULT_POINTS,
) -> ConstructionResult:
    """Given a construction name, run it on ``f`` up to ``horizon``.

    Args:
        construction: one of :data:`CONSTRUCTIONS`
        f: the function to dominate (ignored by ``regularize``, which works on
          ``1/(n ln^2(n+1))``)
        horizon: number of dyadic levels, or of terms for ``regularize``
        q_exp: exponent of the power transforms and of ``sqrt``
        seed: seed of the random points of the derivative checks
        points: number of random points of the derivative checks

    """
    if construction not in CONSTRUCTIONS:
        raise ValidationError(
            "Invalid construction %s: only supported constructions are %s"
            % (construction, ", ".join(CONSTRUCTIONS))
        )
    logger.debug("envelope construction %s up to %s", construction, horizon)
    return CONSTRUCTIONS[construction](f, horizon, q_exp, seed, points)
