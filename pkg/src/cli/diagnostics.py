"""Turning toolchain errors into diagnostics for the terminal."""
from dataclasses import dataclass
from typing import Optional

from rich.text import Text

from src.core.errors import PrimlError, SourceSpan


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    span: Optional[SourceSpan]
    code: str
    message: str

    @classmethod
    def from_error(cls, err: PrimlError, severity: str = "error") -> "Diagnostic":
        return cls(severity, err.span, err.code, err.message)

    def render(self, path: Optional[str] = None) -> str:
        """`path:l.c-l.c: error[CODE]: message`"""
        where = path or "<input>"
        if self.span is not None:
            if self.span.source != "<input>":
                where = self.span.source
            where = f"{where}:{self.span}"
        return f"{where}: {self.severity}[{self.code}]: {self.message}"

    def rich(self, path: Optional[str] = None) -> Text:
        line = self.render(path)
        location, _, rest = line.partition(f": {self.severity}[")
        text = Text(location, style="bold")
        text.append(": ")
        text.append(f"{self.severity}[{self.code}]", style="bold red" if self.severity == "error" else "yellow")
        text.append(rest.split("]", 1)[1] if "]" in rest else "")
        return text
