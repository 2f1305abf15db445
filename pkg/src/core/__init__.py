"""
Core module for the statemerge toolkit.

Exports the process settings; logging, exceptions and handlers are imported
from their own modules.
"""

from core.config import settings

__all__ = [
    # Config
    "settings",
]
