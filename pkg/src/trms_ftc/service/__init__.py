"""HTTP service exposing linearization, gain design, simulation and metrics."""

from .app import create_app

__all__ = ["create_app"]
