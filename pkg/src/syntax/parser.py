"""
Parser for PriML source text.

The grammar lives in grammar.lark and is parsed with lark's Earley parser; a
Transformer turns the parse tree into the frozen surface AST of
src.syntax.surface, attaching a SourceSpan to every node.
"""
import logging
from functools import lru_cache
from typing import FrozenSet, List, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError
from lark.lexer import PatternStr

from src.core.errors import PrimlSyntaxError, SourceSpan
from src.syntax import surface as S

logger = logging.getLogger(__name__)


# ------------------------- comments -------------------------

def strip_comments(text: str, source: str = "<input>") -> str:
    """
    Blank out nested `(* ... *)` comments, keeping newlines so that every
    position in the result matches the original text.
    """
    out: List[str] = []
    depth = 0
    i = 0
    opened: List[Tuple[int, int]] = []
    line, col = 1, 1
    n = len(text)
    while i < n:
        pair = text[i:i + 2]
        if pair == "(*":
            depth += 1
            opened.append((line, col))
            out.append("  ")
            i += 2
            col += 2
            continue
        if pair == "*)" and depth > 0:
            depth -= 1
            opened.pop()
            out.append("  ")
            i += 2
            col += 2
            continue
        ch = text[i]
        if ch == "\n":
            out.append(ch)
            line, col = line + 1, 1
        else:
            out.append(" " if depth > 0 and not ch.isspace() else ch)
            col += 1
        i += 1
    if depth > 0:
        start_line, start_col = opened[0]
        raise PrimlSyntaxError("unterminated comment",
                               SourceSpan(start_line, start_col, start_line, start_col + 1, source))
    return "".join(out)


# ------------------------- tree -> surface AST -------------------------

@v_args(meta=True)
class SurfaceBuilder(Transformer):
    """Builds surface nodes from the lark parse tree."""

    def __init__(self, source: str = "<input>"):
        super().__init__()
        self.source = source

    def _span(self, meta):
        if getattr(meta, "empty", True):
            return None
        return SourceSpan(meta.line, meta.column, meta.end_line, max(meta.end_column - 1, meta.column), self.source)

    # programs and toplevels
    def start(self, meta, children):
        *toplevels, main = children
        return S.Program(tuple(toplevels), main, self._span(meta))

    def library(self, meta, children):
        return S.Program(tuple(children), None, self._span(meta))

    def main(self, meta, children):
        return children[0]

    def priority_decl(self, meta, children):
        return S.PriorityDecl(str(children[0]), self._span(meta))

    def order_decl(self, meta, children):
        lo, hi = children
        return S.OrderDecl(str(lo), str(hi), self._span(meta))

    def type_decl(self, meta, children):
        name, ty = children
        return S.TypeDecl(str(name), ty, self._span(meta))

    def val_decl(self, meta, children):
        name, ty, expr = children
        return S.ValDecl(str(name), ty, expr, self._span(meta))

    def fun_decl(self, meta, children):
        name, *params, result, body = children
        return S.FunDecl(str(name), tuple(params), result, body, self._span(meta))

    def poly_fun_decl(self, meta, children):
        *head, result, body = children
        prio_params = tuple(c for c in head if isinstance(c, S.PrioParam))
        name = next(c for c in head if isinstance(c, Token))
        params = tuple(c for c in head if isinstance(c, S.Param))
        return S.PolyFunDecl(prio_params, str(name), params, result, body, self._span(meta))

    def param(self, meta, children):
        name, ty = children
        return S.Param(str(name), ty, self._span(meta))

    def prio_param(self, meta, children):
        name, constraint = children
        return S.PrioParam(str(name), constraint or (), self._span(meta))

    def constraint(self, meta, children):
        return tuple(children)

    def prio_le(self, meta, children):
        lhs, rhs = children
        return S.SLe(lhs, rhs, self._span(meta))

    def prio(self, meta, children):
        return S.PrioRef(str(children[0]), self._span(meta))

    # types
    def ty_arrow(self, meta, children):
        return S.TyArrow(children[0], children[1], self._span(meta))

    def ty_forall(self, meta, children):
        name, constraint, body = children
        return S.TyForall(str(name), constraint or (), body, self._span(meta))

    def ty_sum(self, meta, children):
        return S.TySum(children[0], children[1], self._span(meta))

    def ty_prod(self, meta, children):
        return S.TyProd(children[0], children[1], self._span(meta))

    def ty_thread(self, meta, children):
        return S.TyThread(children[0], children[1], self._span(meta))

    def ty_cmd(self, meta, children):
        return S.TyCmd(children[0], children[1], self._span(meta))

    def ty_unit(self, meta, children):
        return S.TyUnit(self._span(meta))

    def ty_nat(self, meta, children):
        return S.TyNat(self._span(meta))

    def ty_alias(self, meta, children):
        return S.TyAlias(str(children[0]), self._span(meta))

    # expressions
    def fn_plain(self, meta, children):
        name, body = children
        return S.FnExpr(str(name), None, body, self._span(meta))

    def fn_annot(self, meta, children):
        name, ty, body = children
        return S.FnExpr(str(name), ty, body, self._span(meta))

    def case_expr(self, meta, children):
        scrutinee, x, left, y, right = children
        return S.CaseExpr(scrutinee, str(x), left, str(y), right, self._span(meta))

    def ifz_expr(self, meta, children):
        value, if_zero, x, if_succ = children
        return S.IfzExpr(value, if_zero, str(x), if_succ, self._span(meta))

    def fix_expr(self, meta, children):
        name, ty, body = children
        return S.FixExpr(str(name), ty, body, self._span(meta))

    def apply(self, meta, children):
        return S.ApplyExpr(children[0], children[1], self._span(meta))

    def fst_expr(self, meta, children):
        return S.FstExpr(children[0], self._span(meta))

    def snd_expr(self, meta, children):
        return S.SndExpr(children[0], self._span(meta))

    def inl_expr(self, meta, children):
        return S.InlExpr(children[0], self._span(meta))

    def inr_expr(self, meta, children):
        return S.InrExpr(children[0], self._span(meta))

    def succ_expr(self, meta, children):
        return S.SuccExpr(children[0], self._span(meta))

    def output_expr(self, meta, children):
        return S.OutputExpr(children[0], self._span(meta))

    def prio_app(self, meta, children):
        *prios, value = children
        span = self._span(meta)
        for prio in prios:
            value = S.PrioAppExpr(value, prio, span)
        return value

    def ident(self, meta, children):
        return S.Ident(str(children[0]), self._span(meta))

    def nat_lit(self, meta, children):
        return S.NatLit(int(children[0]), self._span(meta))

    def unit_lit(self, meta, children):
        return S.UnitLit(self._span(meta))

    def pair_expr(self, meta, children):
        return S.PairExpr(children[0], children[1], self._span(meta))

    def annot_expr(self, meta, children):
        return S.AnnotExpr(children[0], children[1], self._span(meta))

    def input_expr(self, meta, children):
        return S.InputExpr(self._span(meta))

    def cmd_expr(self, meta, children):
        prio, cmd = children
        return S.CmdExpr(prio, cmd, self._span(meta))

    def let_expr(self, meta, children):
        *decls, body = children
        return S.LetExpr(tuple(decls), body, self._span(meta))

    # commands
    def command(self, meta, children):
        *steps, last = children
        return S.SurfaceCmd(tuple(steps), last, self._span(meta))

    def bind_step(self, meta, children):
        name, instr = children
        return S.CmdStep(str(name), instr, self._span(meta))

    def seq_step(self, meta, children):
        return S.CmdStep(None, children[0], self._span(meta))

    def do_instr(self, meta, children):
        return S.DoInstr(children[0], self._span(meta))

    def sync_instr(self, meta, children):
        return S.SyncInstr(children[0], self._span(meta))

    def spawn_instr(self, meta, children):
        prio, body = children
        return S.SpawnInstr(prio, body, self._span(meta))

    def ret_instr(self, meta, children):
        return S.RetInstr(children[0], self._span(meta))


# ------------------------- entry points -------------------------

@lru_cache(maxsize=1)
def get_parser() -> Lark:
    return Lark.open(
        "grammar.lark",
        rel_to=__file__,
        start=["start", "library"],
        parser="earley",
        lexer="basic",
        propagate_positions=True,
        maybe_placeholders=True,
    )


def _describe(parser: Lark, terminal: str) -> str:
    try:
        pattern = parser.get_terminal(terminal).pattern
    except KeyError:
        return terminal
    if isinstance(pattern, PatternStr):
        return repr(pattern.value)
    return terminal


def _end_position(text: str) -> Tuple[int, int]:
    """Line and column of the last non-blank character (1.1 for blank input)."""
    lines = text.rstrip().split("\n")
    return len(lines), max(len(lines[-1]), 1)


def _syntax_error(err: UnexpectedInput, text: str, source: str) -> PrimlSyntaxError:
    parser = get_parser()
    expected: FrozenSet[str] = frozenset()
    if isinstance(err, UnexpectedToken):
        expected = frozenset(_describe(parser, t) for t in err.expected)
        token = err.token
        if token.type == "$END" or token.line is None:
            line, col = _end_position(text)
            span = SourceSpan(line, col, line, col, source)
            found = "end of input"
        else:
            span = SourceSpan(token.line, token.column, token.end_line, max(token.end_column - 1, token.column), source)
            found = repr(str(token))
    elif isinstance(err, UnexpectedCharacters):
        expected = frozenset(_describe(parser, t) for t in (err.allowed or ()))
        span = SourceSpan(err.line, err.column, err.line, err.column, source)
        found = repr(text[err.pos_in_stream]) if err.pos_in_stream < len(text) else "end of input"
    else:
        expected = frozenset(_describe(parser, t) for t in getattr(err, "expected", ()) or ())
        line, col = _end_position(text)
        span = SourceSpan(line, col, line, col, source)
        found = "end of input"
    message = f"syntax error at {span}: unexpected {found}"
    if expected:
        message += f"; expected one of {', '.join(sorted(expected))}"
    return PrimlSyntaxError(message, span, expected)


def _parse(text: str, start: str, source: str) -> S.Program:
    cleaned = strip_comments(text, source)
    try:
        tree = get_parser().parse(cleaned, start=start)
    except (UnexpectedToken, UnexpectedCharacters, UnexpectedEOF) as e:
        raise _syntax_error(e, cleaned, source) from None
    try:
        program = SurfaceBuilder(source).transform(tree)
    except VisitError as e:
        raise e.orig_exc from None
    logger.debug(f"Parsed {source}: {len(program.toplevels)} toplevel declarations")
    return program


def parse_program(text: str, source: str = "<input>") -> S.Program:
    """Parse a complete program (toplevel declarations followed by `main { ... }`)."""
    return _parse(text, "start", source)


def parse_library(text: str, source: str = "<library>") -> S.Program:
    """Parse a sequence of toplevel declarations with no main block (the prelude)."""
    return _parse(text, "library", source)


def parse(text: str, source: str = "<input>") -> S.Program:
    return parse_program(text, source)
