from src.syntax.parser import parse, parse_program, parse_library, strip_comments
from src.syntax.printer import print_program, print_expr, print_type, print_cmd
