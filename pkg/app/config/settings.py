"""
Core configuration
"""

from typing import Literal

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.coroutine.enums import UnblockOrder


# Load environment variables from .env file
load_dotenv()


class AppSettings(BaseSettings):
    """Settings Class"""

    model_config = SettingsConfigDict(extra="ignore")

    PROJECT_NAME: str = "Backjump Lab"
    ENVIRONMENT: Literal["local", "ci"] = "local"

    # Corpus Configuration
    BJLAB_SEED: int = 20240
    CORPUS_SIZE: int = 500

    # Engine Configuration
    MAX_STEPS: int = 10_000_000
    TRACE_BUILTINS: bool = True
    CHECK_INVARIANTS: bool = False
    UNBLOCK_ORDER: UnblockOrder = UnblockOrder.PRESERVE

    LOG_LEVEL: str = "WARNING"


settings = AppSettings()
