# qpma/utils/__init__.py
"""Utilities for qpma"""

from .environment import detect_thread_count, get_environment_config
from .logger import get_logger
from .parallel import parallel_map

__all__ = [
    "detect_thread_count",
    "get_environment_config",
    "get_logger",
    "parallel_map",
]
