"""Worked examples shipped with logdecomp, one directory per fixture."""

from __future__ import annotations

__all__ = ["__path__"]
