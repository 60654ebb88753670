"""
CSV outputs and the JSON-lines run manifest.
"""

from .csv_store import CsvStore, write_csv
from .manifest import RunManifest, append_manifest, config_hash

__all__ = ['CsvStore', 'RunManifest', 'append_manifest', 'config_hash', 'write_csv']
