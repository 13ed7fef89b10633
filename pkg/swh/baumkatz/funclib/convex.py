# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import logging
import math
from typing import Dict, Tuple

import attr
import numpy as np

from swh.baumkatz.exception import HorizonExceeded, ValidationError
from swh.baumkatz.funclib.dyadic import DyadicFunction, Interpolation
from swh.baumkatz.funclib.logtower import ArrayLike
from swh.baumkatz.funclib.smooth import (
    Curvature,
    PowerEnvelope,
    power_convex,
    smooth_c2_envelope,
)

logger = logging.getLogger(__name__)


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


@attr.s(frozen=True, eq=False)
class PiecewiseConvexEnvelope:
    """Envelope ``f`` of ``g`` such that ``h(x) = x f(x)`` is convex and piecewise
    linear, with ``h(2^n) = 2^n b_n`` and slope ``d_n`` on ``[2^n, 2^{n+1}]``.

    """

    a = attr.ib(type=np.ndarray, converter=_readonly)
    """``g(2^n)`` for ``n = 1..N``"""
    b = attr.ib(type=np.ndarray, converter=_readonly)
    d = attr.ib(type=np.ndarray, converter=_readonly)
    """``d_0 = b_1`` then ``d_n = 2 b_{n+1} - b_n``"""

    @property
    def horizon(self) -> int:
        return int(self.b.size)

    @property
    def upper(self) -> float:
        return math.ldexp(1.0, self.horizon)

    def _locate(self, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0):
            raise ValidationError("envelopes are defined on [0, 2^N]")
        if np.any(arr > self.upper):
            raise HorizonExceeded(f"evaluation beyond 2^{self.horizon}")
        _, exponent = np.frexp(np.where(arr > 0, arr, 1.0))
        n = np.clip(exponent - 1, 1, max(self.horizon - 1, 1))
        return arr, n, arr - np.ldexp(1.0, n)

    def h(self, x: ArrayLike) -> ArrayLike:
        arr, n, u = self._locate(x)
        b = self.b
        d = np.concatenate([self.d, [0.0]])
        linear = b[n - 1] * np.ldexp(1.0, n) + d[np.minimum(n, d.size - 1)] * u
        result = np.where(arr < 2.0, b[0] * arr, linear)
        if self.horizon == 1:
            result = b[0] * arr
        if np.ndim(x) == 0:
            return float(result)
        return result

    def f(self, x: ArrayLike) -> ArrayLike:
        arr, n, u = self._locate(x)
        b = self.b
        upper = np.minimum(n, self.horizon - 1)
        inner = b[n - 1] + 2 * (b[upper] - b[n - 1]) * u / np.where(arr > 0, arr, 1.0)
        result = np.where(arr < 2.0, b[0], inner)
        if np.ndim(x) == 0:
            return float(result)
        return result

    value = f
    __call__ = f

    def postconditions(self) -> Dict[str, object]:
        n = np.arange(1, self.horizon + 1)
        left = self.b[:-1] * np.ldexp(1.0, n[:-1]) + self.d[1:] * np.ldexp(1.0, n[:-1])
        right = self.b[1:] * np.ldexp(1.0, n[1:])
        gaps = np.abs(left - right) / right if right.size else np.zeros(0)
        return {
            "b_non_decreasing": bool(np.all(np.diff(self.b) >= 0)),
            "max_b_over_a": float(np.max(self.b / self.a)),
            "slopes_non_decreasing": bool(np.all(np.diff(self.d) >= 0)),
            "h_continuity_gap": float(np.max(gaps)) if gaps.size else 0.0,
        }


def convex_linear_envelope(g: DyadicFunction) -> PiecewiseConvexEnvelope:
    """Dominate ``g`` by ``f`` with ``x f(x)`` convex, losing at most a factor 2.

    ``b_1 = g(2)``, ``b_2 = g(4)`` and
    ``b_{n+2} = max(a_{n+2}, 3/2 b_{n+1} - 1/2 b_n)``.

    """
    if g.witness is None:
        logger.debug("convex envelope of a dyadic function without witness")
    a = np.asarray(g.dyadic_values, dtype=float)
    b = a.copy()
    for i in range(2, a.size):
        b[i] = max(a[i], 1.5 * b[i - 1] - 0.5 * b[i - 2])
    d = np.concatenate([[b[0]], 2 * b[1:] - b[:-1]])
    return PiecewiseConvexEnvelope(a, b, d)


def sqrt_compose(
    g: DyadicFunction, q: float
) -> Tuple[DyadicFunction, PowerEnvelope, float]:
    """Build ``f(x) = f*(x^2)`` where ``x^q f*(x)`` has a convex envelope.

    ``f*`` is built on ``g*(x) = g(sqrt x)`` over twice the horizon of ``g``:
    by the piecewise convex envelope when ``q = 1``, by the C² envelope and its
    convex power transform when ``q > 1``.

    Returns:
        ``f`` on the horizon of ``g``, the convex envelope ``f_q`` of
        ``x^q f*(x)`` and its threshold ``N_q``

    """
    if not q >= 1:
        raise ValidationError(f"square-root composition needs q >= 1, got {q}")
    horizon = 2 * g.horizon
    half_powers = np.ldexp(1.0, np.arange(1, horizon + 1) // 2) * np.where(
        np.arange(1, horizon + 1) % 2, math.sqrt(2.0), 1.0
    )
    g_star = DyadicFunction.from_values(np.asarray(g(half_powers), dtype=float))
    if q == 1:
        envelope = convex_linear_envelope(g_star)
        # h = b_1 x on [0, 2]; a half slope keeps the value at 0 positive
        f_q = PowerEnvelope(1.0, 2.0, envelope.b[0] / 2, envelope, Curvature.CONVEX)
        f_star = envelope.f
    else:
        smooth = smooth_c2_envelope(g_star)
        f_q = power_convex(smooth, q)
        f_star = smooth.value

    def formula(x: ArrayLike) -> ArrayLike:
        return f_star(np.asarray(x, dtype=float) ** 2)

    values = np.asarray(f_star(np.ldexp(1.0, 2 * np.arange(1, g.horizon + 1))))
    f = DyadicFunction(values, None, Interpolation.ANALYTIC, formula)
    logger.debug("square-root composition with q=%s: N_q=%s", q, f_q.threshold)
    return f, f_q, f_q.threshold
