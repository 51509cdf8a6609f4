import os
from pathlib import Path
from typing import Optional

from pydantic import Field, PositiveInt
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).resolve().parents[2]
ENV_PATH = PROJECT_ROOT / ".env"

load_dotenv(dotenv_path=ENV_PATH)


class Settings(BaseSettings):
    threads: Optional[PositiveInt] = Field(
        default=None, validation_alias="SEPDISCORD_THREADS"
    )

    model_config = SettingsConfigDict(
        env_file=str(ENV_PATH),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def worker_count(self, requested: Optional[int] = None) -> int:
        """Explicit request, then SEPDISCORD_THREADS, then the CPU count."""
        if requested is not None:
            return max(1, int(requested))
        if self.threads is not None:
            return self.threads
        return os.cpu_count() or 1


SETTINGS = Settings()
