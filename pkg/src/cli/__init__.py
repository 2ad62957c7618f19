from src.cli.cli import main, build_parser, compile_file
from src.cli.diagnostics import Diagnostic
