# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("swh.baumkatz")
except PackageNotFoundError:
    __version__ = "devel"
