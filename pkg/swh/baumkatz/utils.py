# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import functools
import hashlib
import json
import logging
import math
from typing import Any, Callable, Dict, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

# relative tolerance of identities that hold exactly in real arithmetic
EXACT_RTOL = 1e-12

GRID_POINTS_PER_OCTAVE = 64


_UNDEFINED = object()
TSelf = TypeVar("TSelf")
TReturn = TypeVar("TReturn")


def cached_method(f: Callable[[TSelf], TReturn]) -> Callable[[TSelf], TReturn]:
    """Cache the result of a method without arguments on its instance.

    Works on frozen attrs instances: the cache slot is written with
    :func:`object.__setattr__` and is not part of the attrs fields, so it does
    not take part in equality or hashing.

    """
    cache_name = f"_cached_{f.__name__}"

    @functools.wraps(f)
    def newf(self):
        value = self.__dict__.get(cache_name, _UNDEFINED)
        if value is _UNDEFINED:
            value = f(self)
            object.__setattr__(self, cache_name, value)
        return value

    return newf


def format_number(value: Any) -> str:
    """Serialize a number with 17 significant digits (binary64 round-trip).

    >>> format_number(0.1)
    '0.10000000000000001'
    >>> format_number(4.0)
    '4'
    >>> format_number(3)
    '3'

    """
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def canonical_json(data: Any) -> str:
    """Dump ``data`` as JSON with sorted keys and compact separators."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(config: Dict[str, Any]) -> str:
    """Compute the SHA-256 hex digest of the canonical JSON form of a config."""
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def relative_close(a: float, b: float, rtol: float = EXACT_RTOL) -> bool:
    """Check ``a`` and ``b`` agree to ``rtol`` relative to the larger magnitude.

    >>> relative_close(1.0, 1.0 + 1e-14)
    True
    >>> relative_close(0.0, 1e-300)
    False

    """
    return math.isclose(a, b, rel_tol=rtol, abs_tol=0.0)


def geometric_grid(
    start: float, stop: float, per_octave: int = GRID_POINTS_PER_OCTAVE
) -> np.ndarray:
    """Sample ``[start, stop]`` geometrically with ``per_octave`` points per
    doubling. Both ends are included.

    """
    if not 0 < start <= stop:
        raise ValueError(f"Invalid grid range [{start}, {stop}]")
    octaves = math.log2(stop / start)
    count = max(int(math.ceil(octaves * per_octave)), 1)
    grid = start * np.exp2(np.arange(count + 1) * (octaves / count))
    grid[0] = start
    grid[-1] = stop
    return grid
