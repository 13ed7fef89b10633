# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Processes whose Baum-Katz series diverge although ``sup_n E g(|X_n|)`` is
finite for the critical moment ``g(x) = x^q f(x)`` with ``sum 1/f(2^n) = inf``.

Every construction is identically 0 on the blocks ``k <= k0`` and puts mass
``p_k`` on one large atom per block afterwards:

* independent: ``P(X_n = +-4^{k/r}) = p_k``, ``p_k = 4^{-kp/r}/f(4^{k/r})``;
* martingale differences: ``X_n = Y_n Z_k`` with Rademacher ``Y_n`` and
  ``P(Z_k = 4^{k(1/r-1/2)}) = p_k = 4^{k(1-p/r)}/f(4^{k(1/r-1/2)})``;
* arbitrary: one shared variable per block,
  ``P(X = 4^{1+k(1/r-1)}) = p_k = 4^{k(1-p/r)}/f(4^{1+k(1/r-1)})``.

"""

import logging
import math
from typing import Callable, Optional, Tuple

from swh.baumkatz.classes import ExponentParams
from swh.baumkatz.exception import InfeasibleStartBlock, ValidationError
from swh.baumkatz.funclib import SlowFunction, evaluate_at_log
from swh.baumkatz.generators.process import (
    LN4,
    Block,
    ProcessKind,
    ProcessSpec,
    block_index,
)

logger = logging.getLogger(__name__)

# the martingale construction needs at least two zero blocks
MDS_MIN_K0 = 2


def _block_law(
    f: SlowFunction, k: int, log_atom: float, log_mass: float
) -> Tuple[float, float]:
    """Atom ``exp(log_atom)`` and ``p_k = exp(log_mass) / f(atom)``."""
    f_value = float(evaluate_at_log(f, log_atom))
    return math.exp(log_atom), math.exp(log_mass) / f_value


def _start_block(
    last: int, admissible: Callable[[int], bool], minimum: int = 1
) -> int:
    """Smallest ``k0 >= minimum`` such that every block ``k0..last`` is admissible."""
    k0 = last
    while k0 >= minimum and admissible(k0):
        k0 -= 1
    k0 += 1
    if k0 > last:
        raise InfeasibleStartBlock(
            f"block {last} fails the block conditions: no start block up to it"
        )
    return max(k0, minimum)


def block_formula(
    kind: ProcessKind, params: ExponentParams, f: SlowFunction, k: int
) -> Tuple[float, float]:
    """Atom and ``p_k`` of block ``k`` of a counterexample, active or not."""
    r, p = params.r, params.p
    if kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT:
        return _block_law(f, k, k * LN4 / r, -k * p / r * LN4)
    if kind is ProcessKind.COUNTEREXAMPLE_MDS:
        return _block_law(f, k, k * (1 / r - 0.5) * LN4, k * (1 - p / r) * LN4)
    if kind is ProcessKind.COUNTEREXAMPLE_ARBITRARY:
        return _block_law(f, k, (1 + k * (1 / r - 1)) * LN4, k * (1 - p / r) * LN4)
    raise ValidationError(f"{kind.value} is not a counterexample")


def _check_horizon(horizon: int) -> int:
    if horizon < 1:
        raise ValidationError(f"horizon must be positive, got {horizon}")
    return block_index(horizon)


def build_counterexample_independent(
    params: ExponentParams, f: SlowFunction, horizon: int
) -> ProcessSpec:
    """Independent counterexample: symmetric atoms ``+-4^{k/r}`` with mass ``p_k``.

    ``c_const = exp(-3/f(4^{1/r}))``; ``k0`` is the smallest block from which
    ``p_k < 1/2`` and ``(1-2p_k)^{4^k} >= c_const`` hold up to the horizon.

    Raises:
        InfeasibleStartBlock: when the last block within the horizon already
          breaks the conditions

    """
    r, p = params.r, params.p
    last = _check_horizon(horizon)
    c_const = math.exp(-3.0 / float(evaluate_at_log(f, LN4 / r)))
    kind = ProcessKind.COUNTEREXAMPLE_INDEPENDENT
    laws = {k: block_formula(kind, params, f, k) for k in range(1, last + 1)}

    def admissible(k: int) -> bool:
        prob = laws[k][1]
        if not prob < 0.5:
            return False
        # (1 - 2p)^{4^k} in the log domain
        return 4.0**k * math.log1p(-2 * prob) >= math.log(c_const)

    k0 = _start_block(last, admissible)
    blocks = []
    for k in range(k0 + 1, last + 1):
        atom, prob = laws[k]
        certified = -2 * 4.0**k * prob / (1 - 2 * prob) >= math.log(c_const)
        blocks.append(Block(k, atom, prob, certified))
    logger.debug(
        "independent counterexample r=%s p=%s: k0=%s, c=%s", r, p, k0, c_const
    )
    return ProcessSpec(kind, horizon, params, f, k0=k0, c_const=c_const, blocks=blocks)


def build_counterexample_mds(
    params: ExponentParams, f: SlowFunction, horizon: int
) -> ProcessSpec:
    """Martingale difference counterexample ``X_n = Y_n Z_k`` for ``r < 2 <= p``."""
    r, p = params.r, params.p
    if not (0 < r < 2 <= p):
        raise ValidationError(
            f"martingale construction needs r < 2 <= p, got r={r}, p={p}"
        )
    last = _check_horizon(horizon)
    kind = ProcessKind.COUNTEREXAMPLE_MDS
    laws = {k: block_formula(kind, params, f, k) for k in range(1, last + 1)}
    k0 = _start_block(last, lambda k: laws[k][1] < 1, minimum=MDS_MIN_K0)
    blocks = [Block(k, *laws[k]) for k in range(k0 + 1, last + 1)]
    return ProcessSpec(kind, horizon, params, f, k0=k0, blocks=blocks)


def build_counterexample_arbitrary(
    params: ExponentParams, f: SlowFunction, horizon: int
) -> ProcessSpec:
    """Counterexample for arbitrary dependence, ``r < 1 <= p``: within block ``k``
    every ``X_n`` is the same variable.

    """
    r, p = params.r, params.p
    if not (0 < r < 1 <= p):
        raise ValidationError(
            f"arbitrary construction needs r < 1 <= p, got r={r}, p={p}"
        )
    last = _check_horizon(horizon)
    kind = ProcessKind.COUNTEREXAMPLE_ARBITRARY
    laws = {k: block_formula(kind, params, f, k) for k in range(1, last + 1)}
    k0 = _start_block(last, lambda k: laws[k][1] < 1)
    blocks = [Block(k, *laws[k]) for k in range(k0 + 1, last + 1)]
    return ProcessSpec(kind, horizon, params, f, k0=k0, blocks=blocks)


def critical_moment_order(spec: ProcessSpec) -> float:
    """Moment order whose uniform bound the counterexample keeps finite."""
    assert spec.params is not None
    r, p = spec.params.r, spec.params.p
    if spec.kind is ProcessKind.COUNTEREXAMPLE_MDS:
        return 2 * (p - r) / (2 - r)
    if spec.kind is ProcessKind.COUNTEREXAMPLE_ARBITRARY:
        return (p - r) / (1 - r)
    return p


def expected_moment(spec: ProcessSpec) -> Optional[float]:
    """The constant ``sup_n E|X_n|^q f(|X_n|)`` of a counterexample."""
    if spec.kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT:
        return 2.0
    if spec.kind is ProcessKind.COUNTEREXAMPLE_MDS:
        return 1.0
    if spec.kind is ProcessKind.COUNTEREXAMPLE_ARBITRARY:
        return 4.0 ** critical_moment_order(spec)
    return None
