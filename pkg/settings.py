"""
Runtime configuration.
Values come from MICROSLICE_* environment variables or a local .env file; none are required.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from models import InstantiationMode


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="MICROSLICE_",
        env_file=".env",
        extra="ignore",
    )

    log_level: str = Field(default="WARNING", description="Root log level for the CLI")
    default_format: str = Field(default="text", pattern="^(text|structured)$")
    auto_plan_mode: InstantiationMode = Field(
        default=InstantiationMode.PREDEFINED,
        description="Mode used when a document has requests but no events",
    )
    shared_nssi_capacity: int = Field(
        default=10, ge=1, description="Capacity given to freshly created sharable NSSIs"
    )
    golden_dir: str = Field(default="golden", description="Directory holding the golden corpus")


@lru_cache
def get_settings() -> Settings:
    return Settings()
