"""Unit tests for utils environment module."""
import os
from unittest.mock import patch

from qpma.utils.environment import detect_thread_count, get_environment_config


class TestEnvironmentUtils:
    """Test cases for environment utilities."""

    def test_thread_count_from_variable(self):
        with patch.dict(os.environ, {'QPMA_THREADS': '3'}):
            assert detect_thread_count() == 3

    def test_thread_count_defaults_to_cpus(self):
        with patch.dict(os.environ, {}, clear=True), patch('qpma.utils.environment.os.cpu_count', return_value=6):
            assert detect_thread_count() == 6

    def test_thread_count_ignores_garbage(self):
        with patch.dict(os.environ, {'QPMA_THREADS': 'many'}), \
                patch('qpma.utils.environment.os.cpu_count', return_value=None):
            assert detect_thread_count() == 1

    def test_thread_count_at_least_one(self):
        with patch.dict(os.environ, {'QPMA_THREADS': '0'}):
            assert detect_thread_count() == 1

    def test_environment_config(self):
        with patch.dict(os.environ, {'QPMA_THREADS': '2', 'QPMA_LOG_LEVEL': 'debug'}):
            assert get_environment_config() == {'threads': 2, 'log_level': 'DEBUG'}

    def test_environment_config_defaults(self):
        with patch.dict(os.environ, {'QPMA_THREADS': '1'}, clear=True):
            assert get_environment_config()['log_level'] == 'INFO'
