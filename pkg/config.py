import os
from functools import lru_cache
from typing import Mapping, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from model.errors import ConfigError

load_dotenv()

RUNS_LOG_NAME = "runs.log"
CSV_FLOAT_FORMAT = "%.17g"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Environment settings; AGESTRUCT_THREADS = 0 means one worker per CPU."""

    threads: int = Field(0, ge=0, description="Worker threads for scans and batteries")
    output_dir: str = Field("out", min_length=1)
    config_path: str = Field("configs/harvesting.cfg", min_length=1)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def known_level(cls, v: str) -> str:
        level = v.strip().upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"must be one of {', '.join(LOG_LEVELS)}")
        return level

    @property
    def worker_count(self) -> int:
        return self.threads or (os.cpu_count() or 1)


ENV_FIELDS = {
    "AGESTRUCT_THREADS": "threads",
    "AGESTRUCT_OUTPUT_DIR": "output_dir",
    "AGESTRUCT_CONFIG": "config_path",
    "AGESTRUCT_LOG_LEVEL": "log_level",
}


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    environ = os.environ if environ is None else environ
    values = {field: environ[key] for key, field in ENV_FIELDS.items() if environ.get(key, "").strip()}
    try:
        return Settings(**values)
    except ValidationError as e:
        err = e.errors()[0]
        field = err["loc"][0] if err["loc"] else "?"
        key = next(k for k, f in ENV_FIELDS.items() if f == field)
        raise ConfigError(f"environment {key}={environ.get(key)!r}: {err['msg']}") from None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
