# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Twice differentiable envelopes and their power transforms.

On ``[2^n, 2^{n+1}]`` the envelope of ``f`` has derivative
``q_n (1 - cos(2^{1-n} pi (x - 2^n)))`` with ``q_n = 2^{-n}(f(2^{n+1}) - f(2^n))``,
so it interpolates ``f`` at every dyadic point with a vanishing derivative there.

"""

from enum import Enum
import logging
import math
from typing import Dict, Tuple

import attr
import numpy as np

from swh.baumkatz.exception import ScanFailed, ValidationError
from swh.baumkatz.funclib.dyadic import DyadicFunction
from swh.baumkatz.funclib.logtower import ArrayLike
from swh.baumkatz.utils import cached_method, geometric_grid

logger = logging.getLogger(__name__)

DERIVATIVE_RTOL = 1e-5


def _scalar_or_array(template: ArrayLike, result: np.ndarray) -> ArrayLike:
    if np.ndim(template) == 0:
        return float(result)
    return result


@attr.s(frozen=True, eq=False)
class SmoothEnvelope:
    """C² interpolation of a dyadic function."""

    base = attr.ib(type=DyadicFunction)

    @property
    def horizon(self) -> int:
        return self.base.horizon

    @property
    def upper(self) -> float:
        return self.base.upper

    @cached_method
    def q(self) -> np.ndarray:
        values = self.base.dyadic_values
        q = np.diff(values) * np.ldexp(1.0, -np.arange(1, values.size))
        q.setflags(write=False)
        return q

    def _locate(self, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Block index ``n``, offset ``x - 2^n`` and the mask of points lying
        strictly inside ``[2, 2^N)``.

        """
        self.base.check_domain(x)
        arr = np.asarray(x, dtype=float)
        _, exponent = np.frexp(np.where(arr > 0, arr, 1.0))
        n = np.clip(exponent - 1, 1, max(self.horizon - 1, 1))
        inside = (arr >= 2.0) & (arr < self.upper) & (self.horizon > 1)
        return n, arr - np.ldexp(1.0, n), inside

    def growth_ratio(self, x: ArrayLike) -> ArrayLike:
        """``f(2^{n+1})/f(2^n)`` for the block ``[2^n, 2^{n+1}]`` holding ``x``."""
        n, _, _ = self._locate(x)
        values = self.base.dyadic_values
        upper = np.minimum(n, values.size - 1)
        return _scalar_or_array(x, values[upper] / values[n - 1])

    def value(self, x: ArrayLike) -> ArrayLike:
        n, u, inside = self._locate(x)
        values = self.base.dyadic_values
        q = np.concatenate([self.q(), [0.0]])[n - 1]
        half = np.ldexp(1.0, n - 1)
        smooth = values[n - 1] + q * (u - half / np.pi * np.sin(np.pi * u / half))
        arr = np.asarray(x, dtype=float)
        result = np.where(inside, smooth, np.where(arr < 2.0, values[0], values[-1]))
        return _scalar_or_array(x, result)

    def deriv1(self, x: ArrayLike) -> ArrayLike:
        n, u, inside = self._locate(x)
        q = np.concatenate([self.q(), [0.0]])[n - 1]
        half = np.ldexp(1.0, n - 1)
        result = np.where(inside, q * (1.0 - np.cos(np.pi * u / half)), 0.0)
        return _scalar_or_array(x, result)

    def deriv2(self, x: ArrayLike) -> ArrayLike:
        n, u, inside = self._locate(x)
        q = np.concatenate([self.q(), [0.0]])[n - 1]
        half = np.ldexp(1.0, n - 1)
        result = np.where(inside, q * (np.pi / half) * np.sin(np.pi * u / half), 0.0)
        return _scalar_or_array(x, result)

    __call__ = value


def smooth_c2_envelope(g: DyadicFunction) -> SmoothEnvelope:
    """Build the C² envelope agreeing with ``g`` at every dyadic point.

    The value on ``[0, 2]`` is ``g(2)``.

    """
    if g.witness is None:
        logger.debug("smoothing a dyadic function without summability witness")
    return SmoothEnvelope(g)


def random_interior_points(
    env: SmoothEnvelope, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw points uniformly in log scale, away from the dyadic points."""
    n = rng.integers(1, env.horizon, size=count)
    frac = rng.uniform(0.01, 0.99, size=count)
    return np.ldexp(1.0 + frac, n)


def derivative_errors(
    env: SmoothEnvelope, points: np.ndarray, step: float = 1e-4
) -> Dict[str, float]:
    """Largest normalized gaps between the derivative evaluators and centered
    finite differences.

    The tolerance is relative to each block, not to each point: on
    ``[2^n, 2^{n+1}]`` a gap is divided by :data:`DERIVATIVE_RTOL` times the
    largest size of the derivative on the block (``2 q_n`` for ``f'``,
    ``pi q_n / 2^{n-1}`` for ``f''``), plus the rounding noise of the
    difference quotient. Both derivatives vanish at the ends of a block, where
    pointwise relative gaps only measure the truncation error of the quotient.
    A value at most 1 means the evaluators agree within the tolerance; flat
    blocks give 0.

    """
    points = np.asarray(points, dtype=float)
    h = step * np.ldexp(1.0, np.frexp(points)[1] - 1)
    fd1 = (env.value(points + h) - env.value(points - h)) / (2 * h)
    fd2 = (env.deriv1(points + h) - env.deriv1(points - h)) / (2 * h)
    n, _, _ = env._locate(points)
    q = np.concatenate([env.q(), [0.0]])[n - 1]
    rounding = 64 * np.finfo(float).eps / h
    scale1 = DERIVATIVE_RTOL * 2 * q + rounding * np.abs(env.value(points))
    scale2 = DERIVATIVE_RTOL * q * math.pi / np.ldexp(1.0, n - 1) + rounding * 2 * q
    # flat blocks have exactly zero derivatives and differences
    scale1 = scale1 + np.finfo(float).tiny
    scale2 = scale2 + np.finfo(float).tiny
    err1 = np.abs(env.deriv1(points) - fd1) / scale1
    err2 = np.abs(env.deriv2(points) - fd2) / scale2
    return {"deriv1": float(np.max(err1)), "deriv2": float(np.max(err2))}


def growth_violations(env: SmoothEnvelope, points: np.ndarray) -> Dict[str, int]:
    """Count points breaking ``x f'/f <= 4(ratio - 1)`` or
    ``x^2 |f''|/f <= 8 pi (ratio - 1)``.

    """
    points = np.asarray(points, dtype=float)
    value = env.value(points)
    excess = env.growth_ratio(points) - 1.0
    slack = 1e-12 * (1 + excess)
    first = points * env.deriv1(points) / value > 4 * excess + slack
    second = points**2 * np.abs(env.deriv2(points)) / value > 8 * np.pi * excess + slack
    return {"first": int(np.sum(first)), "second": int(np.sum(second))}


class Curvature(Enum):
    CONCAVE = "concave"
    CONVEX = "convex"


def power_derivatives(
    base: SmoothEnvelope, exponent: float, x: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, first and second derivative of ``x^e f(x)``."""
    f = base.value(x)
    f1 = base.deriv1(x)
    f2 = base.deriv2(x)
    xe = x**exponent
    value = xe * f
    d1 = exponent * x ** (exponent - 1) * f + xe * f1
    d2 = (
        exponent * (exponent - 1) * x ** (exponent - 2) * f
        + 2 * exponent * x ** (exponent - 1) * f1
        + xe * f2
    )
    return value, d1, d2


@attr.s(frozen=True, eq=False)
class PowerEnvelope:
    """``x^e f(x)`` above a threshold, continued affinely down to 0.

    ``base`` is the envelope of ``f`` (anything with a vectorized ``value``).

    """

    exponent = attr.ib(type=float)
    threshold = attr.ib(type=float)
    affine_slope = attr.ib(type=float)
    base = attr.ib()
    curvature = attr.ib(type=Curvature)

    def power_value(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        return _scalar_or_array(x, arr**self.exponent * self.base.value(arr))

    @property
    def threshold_value(self) -> float:
        return float(self.power_value(self.threshold))

    def value(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        affine = self.threshold_value + self.affine_slope * (arr - self.threshold)
        above = np.maximum(arr, self.threshold)
        power = above**self.exponent * self.base.value(above)
        return _scalar_or_array(x, np.where(arr >= self.threshold, power, affine))

    __call__ = value

    @property
    def at_zero(self) -> float:
        return self.threshold_value - self.affine_slope * self.threshold

    def continuity_gap(self) -> float:
        """Relative gap between both pieces at the threshold."""
        affine = self.at_zero + self.affine_slope * self.threshold
        return abs(affine - self.threshold_value) / abs(self.threshold_value)

    def shape_violations(self, grid: np.ndarray) -> int:
        """Sampled triples above the threshold whose divided second difference
        has the wrong sign.

        """
        grid = np.asarray(grid, dtype=float)
        grid = grid[grid >= self.threshold]
        if grid.size < 3:
            return 0
        values = self.value(grid)
        slopes = np.diff(values) / np.diff(grid)
        change = np.diff(slopes)
        tol = 1e-10 * np.maximum(np.abs(slopes[1:]), np.abs(slopes[:-1]))
        if self.curvature is Curvature.CONCAVE:
            return int(np.sum(change > tol))
        return int(np.sum(change < -tol))

    def scan_grid(self) -> np.ndarray:
        return geometric_grid(2.0, self.base.upper)


def _settled_from(grid: np.ndarray, holds: np.ndarray, what: str) -> float:
    """First grid point after which ``holds`` stays true up to the end."""
    failing = np.flatnonzero(~holds)
    if failing.size == 0:
        return float(grid[0])
    last = int(failing[-1])
    if last == grid.size - 1:
        raise ScanFailed(
            f"{what} still fails at the horizon; largest violating sample "
            f"{float(grid[last])!r}"
        )
    return float(grid[last + 1])


def power_concave(f: SmoothEnvelope, p: float) -> PowerEnvelope:
    """Concave envelope of ``x^p f(x)`` for ``0 < p < 1``.

    The threshold is ``max(K_p, L_p)`` where ``K_p`` starts the region of
    negative second derivative and ``L_p`` the region where
    ``x (x^p f)' < x^p f``; below it the envelope is the tangent line.

    Raises:
        ValidationError: unless ``0 < p < 1``
        ScanFailed: when either region does not start within the horizon

    """
    if not 0 < p < 1:
        raise ValidationError(f"concave power needs 0 < p < 1, got {p}")
    grid = geometric_grid(2.0, f.upper)
    value, d1, d2 = power_derivatives(f, p, grid)
    k_p = _settled_from(grid, d2 < 0, "concavity")
    l_p = _settled_from(grid, grid * d1 < value, "sublinear growth")
    threshold = max(k_p, l_p)
    _, slope, _ = power_derivatives(f, p, np.array([threshold]))
    logger.debug("concave power %s: K_p=%s, L_p=%s", p, k_p, l_p)
    return PowerEnvelope(p, threshold, float(slope[0]), f, Curvature.CONCAVE)


def power_convex(f, q: float) -> PowerEnvelope:
    """Convex envelope of ``x^q f(x)`` for ``q > 1``.

    Below the threshold ``N_q`` the envelope is affine with slope
    ``min(f_q'(N_q)/2, f_q(N_q)/(2 N_q))``, which keeps it convex, increasing
    and positive at 0.

    """
    if not q > 1:
        raise ValidationError(f"convex power needs q > 1, got {q}")
    grid = geometric_grid(2.0, f.upper)
    _, d1, d2 = power_derivatives(f, q, grid)
    threshold = _settled_from(grid, (d2 > 0) & (d1 > 0), "convexity")
    value, slope, _ = power_derivatives(f, q, np.array([threshold]))
    eps_q = min(float(slope[0]) / 2, float(value[0]) / threshold / 2)
    return PowerEnvelope(q, threshold, eps_q, f, Curvature.CONVEX)


def decreasing_after(f: SmoothEnvelope, c: float) -> float:
    """Smallest grid point from which ``x^{-c} f(x)`` decreases up to the horizon.

    Raises:
        ScanFailed: when ``x^{-c} f(x)`` still increases at the horizon

    """
    if not c > 0:
        raise ValidationError(f"decay exponent must be positive, got {c}")
    grid = geometric_grid(2.0, f.upper)
    # sign of d/dx x^{-c} f(x) is the sign of x f'(x) - c f(x)
    return _settled_from(grid, grid * f.deriv1(grid) < c * f.value(grid), "decay")
