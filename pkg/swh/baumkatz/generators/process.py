# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Block-structured discrete processes.

Indices ``4^{k-1} <= n < 4^k`` form block ``k``. A process is described by the
independent random sources ("factors") it is built from: each factor drives a
contiguous range of indices and is independent of all the others.

"""

from enum import Enum
import logging
import math
from typing import Any, Dict, List, Optional, Tuple, Union

import attr
import numpy as np

from swh.baumkatz.classes import ExponentParams
from swh.baumkatz.exception import HorizonExceeded, ValidationError
from swh.baumkatz.funclib import SlowFunction, evaluate_at_log
from swh.baumkatz.utils import cached_method

logger = logging.getLogger(__name__)

LAW_TOLERANCE = 1e-12

LN4 = math.log(4.0)


class ProcessKind(Enum):
    IID_DISCRETE = "IIDDiscrete"
    COUNTEREXAMPLE_INDEPENDENT = "CounterexampleIndependent"
    COUNTEREXAMPLE_MDS = "CounterexampleMDS"
    COUNTEREXAMPLE_ARBITRARY = "CounterexampleArbitrary"
    NA_VIA_INDEPENDENT = "NAViaIndependent"

    @property
    def is_counterexample(self) -> bool:
        return self.name.startswith("COUNTEREXAMPLE")

    @classmethod
    def parse(cls, name: str) -> "ProcessKind":
        wanted = name.replace("_", "").replace("-", "").lower()
        for kind in cls:
            if wanted in (kind.value.lower(), kind.name.replace("_", "").lower()):
                return kind
        raise ValidationError(f"unknown process kind {name!r}")


def block_index(n: int) -> int:
    """Block ``k`` such that ``4^{k-1} <= n < 4^k``.

    >>> [block_index(n) for n in (1, 3, 4, 15, 16)]
    [1, 1, 2, 2, 3]

    """
    if n < 1:
        raise ValidationError(f"indices start at 1, got {n}")
    return (int(n).bit_length() - 1) // 2 + 1


def block_start(k: int) -> int:
    return 4 ** (k - 1)


@attr.s(frozen=True)
class Block:
    """An active block of a counterexample."""

    k = attr.ib(type=int)
    atom = attr.ib(type=float)
    """Non-zero value taken by the variables of the block"""
    prob = attr.ib(type=float)
    """``p_k``"""
    certified = attr.ib(type=bool, default=True)
    """Whether the analytic sufficient condition on the block holds"""

    @property
    def start(self) -> int:
        return block_start(self.k)

    @property
    def stop(self) -> int:
        """First index after the block."""
        return 4**self.k


@attr.s(frozen=True)
class IIDBlockFactor:
    """Independent identically distributed variables on ``[start, stop)``
    (0-based columns).

    """

    start = attr.ib(type=int)
    stop = attr.ib(type=int)
    values = attr.ib(type=Tuple[float, ...], converter=tuple)
    probs = attr.ib(type=Tuple[float, ...], converter=tuple)

    @property
    def length(self) -> int:
        return self.stop - self.start


@attr.s(frozen=True)
class SharedBlockFactor:
    """One variable copied on every column of ``[start, stop)``."""

    start = attr.ib(type=int)
    stop = attr.ib(type=int)
    values = attr.ib(type=Tuple[float, ...], converter=tuple)
    probs = attr.ib(type=Tuple[float, ...], converter=tuple)

    @property
    def length(self) -> int:
        return self.stop - self.start


@attr.s(frozen=True)
class SignedBlockFactor:
    """``Y_i Z`` on ``[start, stop)`` with independent Rademacher ``Y_i`` and one
    ``Z`` equal to ``magnitude`` with probability ``prob``, else 0.

    """

    start = attr.ib(type=int)
    stop = attr.ib(type=int)
    magnitude = attr.ib(type=float)
    prob = attr.ib(type=float)

    @property
    def length(self) -> int:
        return self.stop - self.start


Factor = Union[IIDBlockFactor, SharedBlockFactor, SignedBlockFactor]


@attr.s(frozen=True, eq=False)
class ProcessSpec:
    """Full description of a discrete random sequence ``X_1, X_2, ...``."""

    kind = attr.ib(type=ProcessKind)
    horizon = attr.ib(type=int)
    """Largest index that may be sampled"""
    params = attr.ib(type=Optional[ExponentParams], default=None)
    f = attr.ib(type=Optional[SlowFunction], default=None)
    k0 = attr.ib(type=int, default=0)
    """Blocks ``k <= k0`` are identically 0"""
    c_const = attr.ib(type=Optional[float], default=None)
    blocks = attr.ib(type=Tuple[Block, ...], default=(), converter=tuple)
    atoms = attr.ib(type=Tuple[float, ...], default=(), converter=tuple)
    """Law of every variable, for baselines"""
    probs = attr.ib(type=Tuple[float, ...], default=(), converter=tuple)

    def __attrs_post_init__(self):
        if self.horizon < 1:
            raise ValidationError("process horizon must be positive")
        if self.kind.is_counterexample:
            independent = self.kind is ProcessKind.COUNTEREXAMPLE_INDEPENDENT
            limit = 0.5 if independent else 1
            for block in self.blocks:
                if block.k <= self.k0:
                    raise ValidationError(f"block {block.k} precedes k0={self.k0}")
                if not 0 < block.prob < limit:
                    raise ValidationError(
                        f"p_{block.k}={block.prob!r} outside (0, {limit})"
                    )
        elif not self.atoms:
            raise ValidationError("baseline processes need atoms")

    @cached_method
    def block_table(self) -> Dict[int, Block]:
        return {block.k: block for block in self.blocks}

    def block(self, k: int) -> Optional[Block]:
        """The active block ``k``, None when its variables vanish."""
        return self.block_table().get(k)

    def check_length(self, n: int) -> None:
        if n < 0:
            raise ValidationError(f"path length must be non-negative, got {n}")
        if n > self.horizon:
            raise HorizonExceeded(f"n={n} is beyond the process horizon {self.horizon}")

    def marginal(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Atoms and probabilities of ``X_n``."""
        self.check_length(n)
        if not self.kind.is_counterexample:
            return np.array(self.atoms), np.array(self.probs)
        block = self.block(block_index(n))
        if block is None:
            return np.zeros(1), np.ones(1)
        if self.kind is ProcessKind.COUNTEREXAMPLE_ARBITRARY:
            return np.array([0.0, block.atom]), np.array([1 - block.prob, block.prob])
        if self.kind is ProcessKind.COUNTEREXAMPLE_MDS:
            half = block.prob / 2
            return (
                np.array([-block.atom, 0.0, block.atom]),
                np.array([half, 1 - block.prob, half]),
            )
        return (
            np.array([-block.atom, 0.0, block.atom]),
            np.array([block.prob, 1 - 2 * block.prob, block.prob]),
        )

    def factors(self, n: int) -> List[Factor]:
        """Independent sources driving ``X_1..X_n``, in index order.

        Sources that are identically 0 are omitted.

        """
        self.check_length(n)
        if n == 0:
            return []
        if not self.kind.is_counterexample:
            return [IIDBlockFactor(0, n, self.atoms, self.probs)]
        found: List[Factor] = []
        for block in self.blocks:
            if block.start > n:
                break
            start, stop = block.start - 1, min(block.stop - 1, n)
            if self.kind is ProcessKind.COUNTEREXAMPLE_ARBITRARY:
                found.append(
                    SharedBlockFactor(
                        start, stop, (0.0, block.atom), (1 - block.prob, block.prob)
                    )
                )
            elif self.kind is ProcessKind.COUNTEREXAMPLE_MDS:
                found.append(SignedBlockFactor(start, stop, block.atom, block.prob))
            else:
                found.append(
                    IIDBlockFactor(
                        start,
                        stop,
                        (-block.atom, 0.0, block.atom),
                        (block.prob, 1 - 2 * block.prob, block.prob),
                    )
                )
        return found

    @property
    def is_independent(self) -> bool:
        return self.kind in (
            ProcessKind.IID_DISCRETE,
            ProcessKind.NA_VIA_INDEPENDENT,
            ProcessKind.COUNTEREXAMPLE_INDEPENDENT,
        )

    @property
    def mean(self) -> float:
        """Common mean of the variables, 0 for the symmetric counterexamples."""
        if self.kind.is_counterexample:
            return 0.0
        return float(np.dot(self.atoms, self.probs))

    @property
    def is_centered(self) -> bool:
        return abs(self.mean) <= LAW_TOLERANCE

    def second_moment_sum(self, n: int) -> float:
        """``B_n = sum_{i <= n} E X_i^2``."""
        self.check_length(n)
        total = 0.0
        for factor in self.factors(n):
            if isinstance(factor, SignedBlockFactor):
                per_index = factor.prob * factor.magnitude**2
            else:
                per_index = float(
                    np.dot(np.square(factor.values), np.asarray(factor.probs))
                )
            total += per_index * factor.length
        return total

    def describe(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "horizon": self.horizon}
        if self.params is not None:
            data["params"] = {
                "r": self.params.r,
                "p": self.params.p,
                "eps": self.params.eps,
                "regime": self.params.regime.value,
            }
        if self.kind.is_counterexample:
            data["k0"] = self.k0
            data["c_const"] = self.c_const
            data["blocks"] = [
                {"k": b.k, "atom": b.atom, "p_k": b.prob, "certified": b.certified}
                for b in self.blocks
            ]
        else:
            data["atoms"] = list(self.atoms)
            data["probs"] = list(self.probs)
        return data


def exact_moment(
    spec: ProcessSpec, n: int, q_exp: float, f: Optional[SlowFunction] = None
) -> float:
    """``E |X_n|^{q_exp} f(|X_n|)`` summed over the atoms of ``X_n``.

    Args:
        spec: the process
        n: index of the variable
        q_exp: moment order, positive
        f: correction, defaults to the one the process was built with
          (identically 1 when there is none)

    """
    if not q_exp > 0:
        raise ValidationError(f"moment order must be positive, got {q_exp}")
    f = f if f is not None else spec.f
    values, probs = spec.marginal(n)
    total = 0.0
    for value, prob in zip(np.abs(values), probs):
        if value == 0 or prob == 0:
            continue
        weight = 1.0 if f is None else float(evaluate_at_log(f, math.log(value)))
        total += value**q_exp * weight * prob
    return total


@attr.s(frozen=True)
class MomentRow:
    k = attr.ib(type=int)
    atom = attr.ib(type=float)
    prob = attr.ib(type=float)
    moment = attr.ib(type=float)


def moment_table(spec: ProcessSpec, q_exp: float) -> List[MomentRow]:
    """Exact moment of the variables of every active block."""
    return [
        MomentRow(
            block.k,
            block.atom,
            block.prob,
            exact_moment(spec, min(block.start, spec.horizon), q_exp),
        )
        for block in spec.blocks
        if block.start <= spec.horizon
    ]


@attr.s(frozen=True, eq=False)
class SamplePath:
    """A realization ``X_1..X_n`` with ``S_i`` and ``M_i = max_{j<=i} |S_j|``."""

    x = attr.ib(type=np.ndarray)
    s = attr.ib(type=np.ndarray)
    m = attr.ib(type=np.ndarray)

    @classmethod
    def from_increments(cls, x: np.ndarray) -> "SamplePath":
        x = np.asarray(x, dtype=float)
        s = np.cumsum(x)
        m = np.maximum.accumulate(np.abs(s)) if s.size else s.copy()
        return cls(x, s, m)

    def __len__(self) -> int:
        return int(self.x.size)
