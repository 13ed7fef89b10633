# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information


class BaumKatzError(ValueError):
    """Base class of the errors raised by the laboratory.

    Each subclass carries the process exit code the command line reports for it
    and a short machine-readable reason.

    """

    exit_code = 1
    reason = "error"


class ValidationError(BaumKatzError):
    """An exception raised when parameters or inputs violate their invariants."""

    exit_code = 2
    reason = "validation"


class ConfigurationError(ValidationError):
    """An exception raised when an experiment configuration cannot be parsed."""

    reason = "configuration"


class UnsupportedCombination(ValidationError):
    """An exception raised when a (regime, r, p) combination is not covered by any
    known complete convergence result.

    """

    reason = "unsupported-combination"


class ParameterMismatch(ValidationError):
    """An exception raised when a diagnostic is asked for outside of its case."""

    reason = "parameter-mismatch"


class InfeasibleError(BaumKatzError):
    """An exception raised when a construction has no solution within its horizon."""

    exit_code = 3
    reason = "infeasible"


class InfeasibleSchedule(InfeasibleError):
    """An exception raised when no regularization schedule fits in the horizon."""

    reason = "infeasible-schedule"


class InfeasibleStartBlock(InfeasibleError):
    """An exception raised when no start block k0 satisfies the block conditions."""

    reason = "infeasible-start-block"


class ScanFailed(InfeasibleError):
    """An exception raised when a threshold scan does not settle before the horizon."""

    reason = "scan-failed"


class LimitExceeded(BaumKatzError):
    """An exception raised when a computation would leave its configured limits."""

    exit_code = 4
    reason = "limit-exceeded"


class HorizonExceeded(LimitExceeded):
    """An exception raised when evaluating beyond the horizon of a function or
    process."""

    reason = "horizon-exceeded"


class SupportCapExceeded(LimitExceeded):
    """An exception raised when an exact law outgrows the support cap."""

    reason = "support-cap-exceeded"


class EnumerationLimitExceeded(LimitExceeded):
    """An exception raised when full path enumeration is asked beyond its threshold."""

    reason = "enumeration-limit-exceeded"
