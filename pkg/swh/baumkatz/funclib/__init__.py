# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Slowly growing corrections ``f`` and the envelopes built from them."""

from swh.baumkatz.funclib.convex import (  # noqa: F401
    PiecewiseConvexEnvelope,
    convex_linear_envelope,
    sqrt_compose,
)
from swh.baumkatz.funclib.dyadic import (  # noqa: F401
    DyadicFunction,
    Interpolation,
    SlowFunction,
    SummableSeqSpec,
    SumForm,
    dyadic_sum_test,
    evaluate_at_log,
)
from swh.baumkatz.funclib.logtower import (  # noqa: F401
    LogTower,
    eval_log_tower,
    log_plus,
)
from swh.baumkatz.funclib.regularize import (  # noqa: F401
    RegularizationSchedule,
    ScheduleRule,
    ratio_smooth,
    ratio_smooth_schedule,
    regularization_report,
    regularize_sequence,
)
from swh.baumkatz.funclib.smooth import (  # noqa: F401
    Curvature,
    PowerEnvelope,
    SmoothEnvelope,
    decreasing_after,
    power_concave,
    power_convex,
    smooth_c2_envelope,
)
