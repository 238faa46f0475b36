import os
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()

ENV_PREFIX = "GROUNDING_"


def _env(name: str, default: str) -> str:
    """GROUNDING_<name>, or the default when unset or empty."""
    v = os.getenv(ENV_PREFIX + name)
    return v if v else default


def _env_int(name: str, default: int) -> int:
    raw = _env(name, str(default))
    try:
        return int(raw)
    except ValueError:
        return default


class Settings(BaseSettings):
    """Toolkit settings; run-level choices live in the JSON config documents."""

    log_level: str = _env("LOG_LEVEL", "INFO")
    log_dir: str = _env("LOG_DIR", "logs")

    output_dir: str = _env("OUTPUT_DIR", "out")
    default_seed: int = _env_int("DEFAULT_SEED", 0)

    # random instances per `verify` suite
    verify_trials: int = _env_int("VERIFY_TRIALS", 100)

    # threads for per-scale robustness estimation
    estimator_workers: int = _env_int("ESTIMATOR_WORKERS", 1)

    toolkit_version: str = "1.0.0"

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level")
    @classmethod
    def _level(cls, v: str) -> str:
        v = v.upper()
        if v not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
            return "INFO"
        return v

    @field_validator("verify_trials", "estimator_workers")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        return max(1, v)


settings = Settings()
