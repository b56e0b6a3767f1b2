"""Compile rule descriptions of multi-agent action situations into games and solve them."""

from __future__ import annotations

__version__ = "0.1.0"
