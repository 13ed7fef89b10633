# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import logging
from typing import Callable, Dict

from swh.baumkatz.classes import ExponentParams
from swh.baumkatz.exception import ValidationError
from swh.baumkatz.funclib import SlowFunction
from swh.baumkatz.generators.baseline import (  # noqa: F401
    BASELINE_KINDS,
    build_baseline,
    constant_one,
    rademacher,
)
from swh.baumkatz.generators.counterexamples import (  # noqa: F401
    block_formula,
    build_counterexample_arbitrary,
    build_counterexample_independent,
    build_counterexample_mds,
    critical_moment_order,
    expected_moment,
)
from swh.baumkatz.generators.process import (  # noqa: F401
    LN4,
    Block,
    Factor,
    IIDBlockFactor,
    MomentRow,
    ProcessKind,
    ProcessSpec,
    SamplePath,
    SharedBlockFactor,
    SignedBlockFactor,
    block_index,
    block_start,
    exact_moment,
    moment_table,
)
from swh.baumkatz.generators.sampling import (  # noqa: F401
    draw_increments,
    path_statistics,
    sample_path,
)

logger = logging.getLogger(__name__)

CounterexampleBuilder = Callable[[ExponentParams, SlowFunction, int], ProcessSpec]

COUNTEREXAMPLES: Dict[ProcessKind, CounterexampleBuilder] = {
    ProcessKind.COUNTEREXAMPLE_INDEPENDENT: build_counterexample_independent,
    ProcessKind.COUNTEREXAMPLE_MDS: build_counterexample_mds,
    ProcessKind.COUNTEREXAMPLE_ARBITRARY: build_counterexample_arbitrary,
}


def build_counterexample(
    kind: ProcessKind, params: ExponentParams, f: SlowFunction, horizon: int
) -> ProcessSpec:
    """Given a counterexample kind, build its process.

    Args:
        kind: one of the counterexample kinds
        params: exponents of the series
        f: correction function, with ``sum 1/f(2^n) = inf``
        horizon: largest index the process will be sampled at

    """
    if kind not in COUNTEREXAMPLES:
        raise ValidationError(
            "Invalid counterexample %s: only supported kinds are %s"
            % (kind.value, ", ".join(k.value for k in COUNTEREXAMPLES))
        )
    builder = COUNTEREXAMPLES[kind]
    logger.debug("counterexample builder: %s", builder.__name__)
    return builder(params, f, horizon)
