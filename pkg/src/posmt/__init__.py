"""Desk-scale workbench for positive model theory over finite structures."""

from __future__ import annotations

__version__ = "0.1.0"
