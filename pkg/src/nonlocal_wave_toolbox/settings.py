import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Settings:
    output_dir: Path
    log_level: str
    workers: int


def get_settings() -> Settings:
    """Defaults read from the environment (or a .env file) at call time."""
    return Settings(output_dir=Path(os.getenv('NONLOCAL_WAVES_OUTPUT_DIR', 'runs')),
                    log_level=os.getenv('NONLOCAL_WAVES_LOG_LEVEL', 'INFO').upper(),
                    workers=max(1, int(os.getenv('NONLOCAL_WAVES_WORKERS', '1'))))
