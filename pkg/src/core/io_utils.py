"""Utility functions for reading PriML sources, input streams and DAG files."""
import logging
import pathlib
from typing import List

logger = logging.getLogger(__name__)


def read_text(path_like) -> str:
    """Read a UTF-8 text file; raises FileNotFoundError with the expanded path."""
    path = pathlib.Path(path_like).expanduser()
    if not path.exists():
        raise FileNotFoundError(f"File {path} does not exist.")
    return path.read_text(encoding="utf-8")


def load_source(path_like) -> str:
    """Load a PriML program."""
    text = read_text(path_like)
    logger.info(f"Loaded source ({len(text.splitlines())} lines) from {path_like}")
    return text


def load_inputs(path_like) -> List[int]:
    """Load the naturals consumed by `input`, whitespace separated."""
    text = read_text(path_like)
    values = []
    for k, token in enumerate(text.split(), start=1):
        if not token.isdigit():
            raise ValueError(f"{path_like}: input #{k} is not a natural number: {token!r}")
        values.append(int(token))
    logger.info(f"Loaded {len(values)} inputs from {path_like}")
    return values
