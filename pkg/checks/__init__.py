"""
Programmatic property battery for the `check` subcommand.
"""

from .properties import PropertyBattery, PropertyResult, brute_force_B, run_property_battery

__all__ = ['PropertyBattery', 'PropertyResult', 'brute_force_B', 'run_property_battery']
