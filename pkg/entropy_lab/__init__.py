"""Numerical laboratory for sharp Lp-entropy and Lp-Nash inequalities."""

from .core.constants import TOOL_VERSION
from .logging_config import get_logger

__version__ = TOOL_VERSION

logger = get_logger(__name__)
