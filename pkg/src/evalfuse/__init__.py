"""Dual-engine assessment of candidates from imprecise expert opinions."""

from .problemfile import ENGINE_VERSION as __version__  # noqa: F401
