"""Exact-arithmetic toolkit for logarithmic decomposition formulas.

The layers build bottom-up: integer lattices and cones (``lattice``), cone
complexes with a base map (``complex``), combinatorial types of tropical
curves (``curve``), tropical maps, rigidity and the decomposition ledger
(``tropmap``), basic monoids (``monoid``) and log enhancements of transverse
maps (``enhance``).
"""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("logdecomp")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.0.0"

__all__ = ["__version__"]
