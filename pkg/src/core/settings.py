"""Configuration read from the environment (and a local .env file)."""
import os
import logging
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()
logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}; using {default}")
        return default


@dataclass(frozen=True)
class Settings:
    fuel: int
    procs: int
    seed: int
    load_prelude: bool
    trials: int


def get_settings() -> Settings:
    """Snapshot of the current environment; flags on the command line win over these."""
    return Settings(
        fuel=_int_env("PRIML_FUEL", 10_000_000),
        procs=_int_env("PRIML_PROCS", 1),
        seed=_int_env("PRIML_SEED", 0),
        load_prelude=_int_env("PRIML_PRELUDE", 1) != 0,
        trials=_int_env("PRIML_TRIALS", 10_000),
    )
