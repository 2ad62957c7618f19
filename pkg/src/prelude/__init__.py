"""The bundled PriML prelude."""
import logging
import pathlib
from functools import lru_cache

from src.syntax.parser import parse_library
from src.syntax.surface import Program

logger = logging.getLogger(__name__)

PRELUDE_PATH = pathlib.Path(__file__).with_name("prelude.priml")


@lru_cache(maxsize=1)
def load_prelude() -> Program:
    text = PRELUDE_PATH.read_text(encoding="utf-8")
    prelude = parse_library(text, str(PRELUDE_PATH))
    logger.debug(f"Loaded prelude: {len(prelude.toplevels)} declarations")
    return prelude
