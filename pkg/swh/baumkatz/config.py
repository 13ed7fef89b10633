# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Experiment configuration.

A configuration is a JSON (or YAML) mapping. Top-level keys are shared by all
the subcommands; a block named after a subcommand overrides them for it::

    {
      "r": 1, "p": 1, "seed": 42,
      "f": {"log_tower": {"m": 1, "eps": 0}},
      "simulate": {"trials": 100000, "n_grid": [4, 8, 16]}
    }

"""

from contextlib import contextmanager
import logging
from typing import Any, Dict, Iterator, List, Mapping, Optional

import yaml

from swh.baumkatz.classes import DependenceRegime, ExponentParams
from swh.baumkatz.exception import BaumKatzError, ConfigurationError
from swh.baumkatz.funclib import DyadicFunction, LogTower, SlowFunction
from swh.baumkatz.generators import (
    BASELINE_KINDS,
    ProcessKind,
    ProcessSpec,
    build_baseline,
    build_counterexample,
)

logger = logging.getLogger(__name__)

COMMANDS = (
    "exponent",
    "envelope",
    "spec",
    "moments",
    "oracle",
    "simulate",
    "bounds-check",
    "series",
    "statement1",
    "indep-proof",
)

KNOWN_KEYS = frozenset(
    [
        "regime",
        "r",
        "p",
        "eps",
        "f",
        "process",
        "horizon",
        "trials",
        "seed",
        "n_grid",
        "t_grid",
        "x_grid",
        "statistic",
        "K",
        "K_tail",
        "construction",
        "support_cap",
        "enumeration_limit",
        "threads",
        "target",
        "delta",
        "window",
        "anchors",
        "n_dyadic",
        "a_factor",
        "alpha",
        "rows",
        "q_exp",
        "moment_p",
        "points",
    ]
)

DEFAULT_TRIALS = 10**4
DEFAULT_THREADS = 1


def read(path: Optional[str]) -> Dict[str, Any]:
    """Read a configuration file; no path gives an empty configuration.

    Raises:
        ConfigurationError: when the file is not a mapping

    """
    if not path:
        return {}
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"cannot parse {path}: {e}".replace("\n", " "))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} does not hold a mapping")
    return data


def merge(
    config: Mapping[str, Any],
    command: str,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """Effective configuration of ``command``: shared keys, then the block of
    the command, then the non-None ``overrides``.

    >>> merge({"seed": 1, "trials": 5, "simulate": {"trials": 7}}, "simulate")
    {'seed': 1, 'trials': 7}

    Raises:
        ConfigurationError: on unknown keys

    """
    effective = {
        key: value
        for key, value in config.items()
        if not (key in COMMANDS and isinstance(value, dict))
    }
    block = config.get(command) or {}
    if not isinstance(block, dict):
        raise ConfigurationError(f"block {command!r} must be a mapping")
    effective.update(block)
    effective.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(effective) - KNOWN_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")
    return effective


def required(conf: Mapping[str, Any], key: str) -> Any:
    if key not in conf:
        raise ConfigurationError(f"missing configuration key {key!r}")
    return conf[key]


def require_seed(conf: Mapping[str, Any]) -> int:
    """Stochastic commands need an explicit seed."""
    seed = required(conf, "seed")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigurationError(
            f"seed must be a 64-bit unsigned integer, got {seed!r}"
        )
    return seed


def positive_int(
    conf: Mapping[str, Any], key: str, default: Optional[int] = None
) -> int:
    value = conf.get(key, default)
    if value is None:
        raise ConfigurationError(f"missing configuration key {key!r}")
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigurationError(f"{key} must be a positive integer, got {value!r}")
    return value


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def number(
    conf: Mapping[str, Any], key: str, default: Optional[float] = None
) -> float:
    """A real-valued key.

    >>> number({"alpha": 1}, "alpha"), number({}, "delta", 0.1)
    (1.0, 0.1)

    """
    value = conf.get(key, default)
    if value is None:
        raise ConfigurationError(f"missing configuration key {key!r}")
    if not _is_number(value):
        raise ConfigurationError(f"{key} must be a number, got {value!r}")
    return float(value)


def number_list(conf: Mapping[str, Any], key: str) -> List[float]:
    values = required(conf, key)
    if not isinstance(values, list) or not all(_is_number(v) for v in values):
        raise ConfigurationError(f"{key} must be a list of numbers, got {values!r}")
    return [float(v) for v in values]


def index_list(
    conf: Mapping[str, Any], key: str, default: Optional[List[int]] = None
) -> List[int]:
    """A list of positive integers, such as ``n_grid`` or ``anchors``."""
    values = conf.get(key, default)
    if values is None:
        raise ConfigurationError(f"missing configuration key {key!r}")
    if not isinstance(values, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in values
    ):
        raise ConfigurationError(
            f"{key} must be a list of positive integers, got {values!r}"
        )
    return list(values)


@contextmanager
def _coerced(what: str) -> Iterator[None]:
    """Report values of the wrong type as configuration errors."""
    try:
        yield
    except BaumKatzError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"invalid {what}: {e}")


def parse_params(conf: Mapping[str, Any]) -> ExponentParams:
    regime = DependenceRegime.parse(str(conf.get("regime", "IndependentCentered")))
    with _coerced("exponents"):
        params = ExponentParams(
            r=required(conf, "r"),
            p=required(conf, "p"),
            eps=conf.get("eps", 1.0),
            regime=regime,
        )
    return params


def parse_function(conf: Mapping[str, Any]) -> SlowFunction:
    """The correction ``f``, ``f_1 = log+`` unless configured.

    Accepted forms: ``{"log_tower": {"m": 1, "eps": 0}}``,
    ``{"dyadic": [f(2), f(4), ...], "below_2": v}`` and
    ``{"constant": v, "horizon": N}``.

    """
    spec = conf.get("f", {"log_tower": {"m": 1, "eps": 0}})
    if not isinstance(spec, dict):
        raise ConfigurationError("f must be a mapping")
    with _coerced("f"):
        if "log_tower" in spec:
            tower = spec["log_tower"] or {}
            return LogTower(m=tower.get("m", 1), eps=tower.get("eps", 0.0))
        if "dyadic" in spec:
            return DyadicFunction.from_values(spec["dyadic"], spec.get("below_2"))
        if "constant" in spec:
            horizon = positive_int(spec, "horizon")
            return DyadicFunction.constant(spec["constant"], horizon)
    raise ConfigurationError(
        f"unknown form of f {sorted(spec)}: expected log_tower, dyadic or constant"
    )


def parse_process(conf: Mapping[str, Any]) -> ProcessSpec:
    """Build the process described by ``process`` (a counterexample by default).

    ``{"kind": "CounterexampleMDS"}`` builds from the configured exponents and
    ``f``; baselines take ``atoms``, ``probs`` and ``require_centered``.

    """
    default = {"kind": ProcessKind.COUNTEREXAMPLE_INDEPENDENT.value}
    process = conf.get("process", default)
    if not isinstance(process, dict):
        raise ConfigurationError("process must be a mapping")
    kind = ProcessKind.parse(str(required(process, "kind")))
    horizon = positive_int(conf, "horizon")
    if kind in BASELINE_KINDS:
        with _coerced("process"):
            baseline = build_baseline(
                kind,
                required(process, "atoms"),
                required(process, "probs"),
                horizon,
                require_centered=process.get("require_centered", True),
            )
        return baseline
    return build_counterexample(kind, parse_params(conf), parse_function(conf), horizon)
