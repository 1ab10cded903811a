"""Bundled fixture builders used by tests, scripts and demos."""

from caselift.fixtures.aspen import build_aspen_repository, fig8_fragment, fig6_fragment

__all__ = ["build_aspen_repository", "fig8_fragment", "fig6_fragment"]
