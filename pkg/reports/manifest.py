# reports/manifest.py

import hashlib
import json
import logging
import os
from datetime import datetime, timezone
from typing import Any, Dict, List

from pydantic import BaseModel, Field, model_validator

from config import RUNS_LOG_NAME

logger = logging.getLogger(__name__)


def config_hash(file_path: str) -> str:
    """SHA-256 of the config file bytes."""
    digest = hashlib.sha256()
    with open(file_path, "rb") as f:
        digest.update(f.read())
    return digest.hexdigest()


class RunManifest(BaseModel):
    """One line of runs.log."""
    config_hash: str = Field(..., description="SHA-256 of the config file")
    subcommand: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    wall_time: float = Field(..., ge=0.0, description="Seconds")
    finished_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @model_validator(mode="after")
    def _outputs_exist(self) -> "RunManifest":
        missing = [path for path in self.outputs if not os.path.isfile(path)]
        if missing:
            raise ValueError(f"listed outputs do not exist: {missing}")
        return self


def append_manifest(out_dir: str, manifest: RunManifest) -> str:
    """Append the manifest as a JSON line to <out_dir>/runs.log."""
    os.makedirs(out_dir, exist_ok=True)
    log_path = os.path.join(out_dir, RUNS_LOG_NAME)
    with open(log_path, "a", encoding="utf-8") as f:
        f.write(json.dumps(manifest.model_dump(), sort_keys=True) + "\n")
    logger.debug("appended %s run to %s", manifest.subcommand, log_path)
    return log_path
