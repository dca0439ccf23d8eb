"""Configuration: constants, environment variables and the run config."""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from dotenv import load_dotenv

load_dotenv()

TOOL_VERSION = "1.0.0"

COMMANDS = ("mub", "geometry", "mes", "verify", "king", "track")
SUITES = ("mub", "geometry", "mes", "balance", "protocols", "all")
FORMATS = ("json", "csv", "text")
DEFAULT_FORMAT = "json"
MAX_DIMENSION = 10 ** 6
# above this, line states are checked against the computational-basis Weyl form only
WEYL_ALL_BASES_MAX_DIMENSION = 7

OUTPUT_DIR_ENV = "MESLAB_OUT"
LOG_FILE_ENV = "MESLAB_LOG_FILE"
WORKERS_ENV = "MESLAB_WORKERS"


def default_output_dir() -> Optional[str]:
    return os.getenv(OUTPUT_DIR_ENV) or None


def default_log_file() -> Optional[str]:
    return os.getenv(LOG_FILE_ENV) or None


def default_workers() -> int:
    try:
        return max(1, int(os.getenv(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation."""
    command: str
    d: int
    seed: Optional[int] = None
    fmt: str = DEFAULT_FORMAT
    output: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def output_path(self) -> Optional[str]:
        """Where the report goes; None means stdout.

        An explicit --output wins ('-' forces stdout), then $MESLAB_OUT.
        """
        if self.output == "-":
            return None
        if self.output:
            return self.output
        out_dir = default_output_dir()
        if out_dir:
            return os.path.join(out_dir, f"{self.command}_d{self.d}.{self.fmt if self.fmt != 'text' else 'txt'}")
        return None
