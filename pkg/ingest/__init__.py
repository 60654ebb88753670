"""
Readers for run configuration files and numeric tables.
"""

from .config_loader import build_config, load_config, read_sections, validation_message
from .tables import load_kernel_table, load_profiles, load_table

__all__ = [
    'build_config', 'load_config', 'load_kernel_table', 'load_profiles', 'load_table',
    'read_sections', 'validation_message',
]
