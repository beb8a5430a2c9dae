"""
Environment-driven runtime settings.
"""

import os
from typing import Dict, Any


def detect_thread_count() -> int:
    """
    Worker cap from QPMA_THREADS.

    Returns:
        int: Number of workers, at least 1. Defaults to the CPU count.
    """
    raw = os.getenv('QPMA_THREADS', '').strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def get_environment_config() -> Dict[str, Any]:
    """
    Runtime settings read from the environment.

    Returns:
        Dict: worker count and log level name
    """
    return {
        'threads': detect_thread_count(),
        'log_level': os.getenv('QPMA_LOG_LEVEL', 'INFO').upper(),
    }
