# reports/csv_store.py

import logging
import os
from typing import List, Sequence

import numpy as np
import numpy.typing as npt

from config import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)


def write_csv(file_path: str, header: Sequence[str], columns: Sequence[npt.ArrayLike]) -> str:
    """Write equal-length columns with a one-line header at full double precision."""
    arrays = [np.asarray(c, dtype=float).ravel() for c in columns]
    if len(arrays) != len(header):
        raise ValueError(f"{len(header)} header names for {len(arrays)} columns")
    lengths = {a.size for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    np.savetxt(file_path, np.column_stack(arrays), delimiter=",", header=",".join(header),
               comments="", fmt=CSV_FLOAT_FORMAT)
    return file_path


class CsvStore:
    """Output directory that remembers every file it wrote."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self.written: List[str] = []

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write(self, name: str, header: Sequence[str], columns: Sequence[npt.ArrayLike]) -> str:
        file_path = write_csv(self.path(name), header, columns)
        self.written.append(file_path)
        logger.info("wrote %s (%d columns)", file_path, len(header))
        return file_path
