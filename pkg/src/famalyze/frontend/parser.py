"""Lexer and recursive-descent parser for program-family source files.

Input layout::

    #feature B bool
    #feature SIZE in [1,4]
    #constraint SIZE != 2
    int x := 10, y := 0;
    while (x != 0) { ... }

Parsing is followed by a scope check and by location labelling, so the
result of :func:`parse` is always a fully labelled :class:`Program`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DomainError, ParseError, ScopeError
from . import ast as A
from .labels import label

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<directive>\#[A-Za-z_]+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>:=|==|!=|<=|>=|&&|\|\||[-+*<>=!(){}\[\],;])
    """,
    re.VERBOSE | re.DOTALL,
)

KEYWORDS = {"skip", "int", "if", "else", "while", "assert", "in", "bool", "true", "false"}
DIRECTIVES = {"#feature", "#constraint", "#if", "#else", "#endif"}
CMP_OPS = {"==", "!=", "<", "<=", ">", ">=", "="}


@dataclass(frozen=True)
class Token:
    kind: str  # int, ident, kw, directive, op, eof
    text: str
    offset: int
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1, pos)
        kind, text = m.lastgroup, m.group()
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        if kind == "directive" and text not in DIRECTIVES:
            raise ParseError(f"unknown directive {text}", line, pos - line_start + 1, pos)
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, pos, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", pos, line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.col, tok.offset)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("kw", "op", "directive") and self.tok.text in texts

    def accept(self, *texts: str) -> Token | None:
        if self.at(*texts):
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            raise self.error(f"expected {text!r}")
        return tok

    def expect_ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error("expected an identifier")
        name = self.tok.text
        self.pos += 1
        return name

    def signed_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "int":
            raise self.error("expected an integer")
        value = int(self.tok.text)
        self.pos += 1
        return sign * value

    # -- program structure ----------------------------------------------------

    def program(self) -> A.Program:
        features: list[A.FeatureDecl] = []
        while self.at("#feature"):
            start = self.tok
            self.pos += 1
            name = self.expect_ident()
            if self.accept("bool"):
                features.append(A.FeatureDecl(name, 0, 1, boolean=True))
                continue
            self.expect("in")
            self.expect("[")
            lo = self.signed_int()
            self.expect(",")
            hi = self.signed_int()
            self.expect("]")
            if lo > hi:
                raise DomainError(f"{start.line}:{start.col}: feature {name} has empty domain [{lo},{hi}]")
            features.append(A.FeatureDecl(name, lo, hi))
        constraints: list[A.BExpr] = []
        while self.accept("#constraint"):
            constraints.append(self.bexpr(allow_rand=False))
        stmts = self.stmt_list(stop=("eof",), allow_decl=True)
        if self.tok.kind != "eof":
            raise self.error("expected a statement")
        if len(stmts) == 1 and isinstance(stmts[0], A.Block):
            body = stmts[0]
        else:
            body = A.Block(tuple(stmts))
        return A.Program(tuple(features), tuple(constraints), body)

    def _at_stop(self, stop: tuple[str, ...]) -> bool:
        return ("eof" in stop and self.tok.kind == "eof") or self.at(*[s for s in stop if s != "eof"])

    def stmt_list(self, stop: tuple[str, ...], allow_decl: bool) -> list[A.Stmt]:
        stmts: list[A.Stmt] = []
        while not self._at_stop(stop):
            if self.at("int"):
                if not allow_decl:
                    raise self.error("declarations are only allowed at the top of a block")
                stmts.append(self.decl())
                continue
            allow_decl = False
            stmts.append(self.stmt())
        return stmts

    def block(self) -> A.Block:
        if self.accept("{"):
            stmts = self.stmt_list(stop=("}",), allow_decl=True)
            self.expect("}")
            return A.Block(tuple(stmts))
        return A.Block((self.stmt(),))

    def decl(self) -> A.Decl:
        self.expect("int")
        items = []
        while True:
            name = self.expect_ident()
            init = self.expr() if self.accept(":=") else None
            items.append((name, init))
            if not self.accept(","):
                break
        self.expect(";")
        return A.Decl(tuple(items))

    def stmt(self) -> A.Stmt:
        tok = self.tok
        if self.accept("skip"):
            self.expect(";")
            return A.Skip()
        if self.at("{"):
            return self.block()
        if self.accept("if"):
            cond = self.paren_bexpr()
            then = self.block()
            orelse = self.block() if self.accept("else") else A.Block()
            return A.If(cond, then, orelse)
        if self.accept("while"):
            cond = self.paren_bexpr()
            return A.While(cond, self.block())
        if self.accept("assert"):
            cond = self.paren_bexpr()
            self.expect(";")
            return A.Assert(cond)
        if self.accept("#if"):
            cond = self.bexpr(allow_rand=False)
            then = self.stmt_list(stop=("#else", "#endif"), allow_decl=False)
            orelse: list[A.Stmt] = []
            if self.accept("#else"):
                orelse = self.stmt_list(stop=("#endif",), allow_decl=False)
            self.expect("#endif")
            return A.IfDef(cond, A.Block(tuple(then)), A.Block(tuple(orelse)))
        if tok.kind == "ident":
            name = self.expect_ident()
            self.expect(":=")
            value = self.expr()
            self.expect(";")
            return A.Assign(name, value)
        if self.tok.kind == "eof":
            raise self.error("unexpected end of input")
        raise self.error("expected a statement")

    def paren_bexpr(self) -> A.BExpr:
        self.expect("(")
        cond = self.bexpr(allow_rand=False)
        self.expect(")")
        return cond

    # -- expressions ------------------------------------------------------------

    def bexpr(self, allow_rand: bool) -> A.BExpr:
        left = self.conj(allow_rand)
        while self.accept("||"):
            left = A.Or(left, self.conj(allow_rand))
        return left

    def conj(self, allow_rand: bool) -> A.BExpr:
        left = self.bunary(allow_rand)
        while self.accept("&&"):
            left = A.And(left, self.bunary(allow_rand))
        return left

    def bunary(self, allow_rand: bool) -> A.BExpr:
        if self.accept("!"):
            return A.Not(self.bunary(allow_rand))
        if self.accept("true"):
            return A.TRUE
        if self.accept("false"):
            return A.FALSE
        saved = self.pos
        if self.at("("):
            # "(e) < 3" and "(b && c)" share a prefix: try the arithmetic reading first
            try:
                return self.comparison(allow_rand)
            except ParseError:
                self.pos = saved
            self.expect("(")
            inner = self.bexpr(allow_rand)
            self.expect(")")
            return inner
        return self.comparison(allow_rand)

    def comparison(self, allow_rand: bool) -> A.BExpr:
        left = self.expr(allow_rand)
        if self.at(*CMP_OPS):
            op = self.tok.text
            self.pos += 1
            right = self.expr(allow_rand)
            if self.at(*CMP_OPS):
                raise self.error("comparisons cannot be chained")
            return A.Cmp("==" if op == "=" else op, left, right)
        return A.Cmp("!=", left, A.Num(0))

    def expr(self, allow_rand: bool = True) -> A.Expr:
        left = self.term(allow_rand)
        while self.at("+", "-"):
            op = self.tok.text
            self.pos += 1
            left = A.BinOp(op, left, self.term(allow_rand))
        return left

    def term(self, allow_rand: bool) -> A.Expr:
        left = self.unary(allow_rand)
        while self.accept("*"):
            left = A.BinOp("*", left, self.unary(allow_rand))
        return left

    def unary(self, allow_rand: bool) -> A.Expr:
        if self.accept("-"):
            operand = self.unary(allow_rand)
            if isinstance(operand, A.Num):
                return A.Num(-operand.value)
            return A.Neg(operand)
        return self.atom(allow_rand)

    def atom(self, allow_rand: bool) -> A.Expr:
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            return A.Num(int(tok.text))
        if tok.kind == "ident":
            self.pos += 1
            return A.Var(tok.text)
        if self.accept("("):
            inner = self.expr(allow_rand)
            self.expect(")")
            return inner
        if self.at("["):
            if not allow_rand:
                raise self.error("interval literals are not allowed in conditions")
            self.pos += 1
            lo = self.signed_int()
            self.expect(",")
            hi = self.signed_int()
            close = self.expect("]")
            if lo > hi:
                raise ParseError(f"empty interval literal [{lo},{hi}]", close.line, close.col, close.offset)
            return A.Rand(lo, hi)
        raise self.error("expected an expression")


# -- scope checking -------------------------------------------------------------

def _check_names(e, allowed: set[str], other: set[str], what: str) -> None:
    for name in A.expr_names(e):
        if name in allowed:
            continue
        if name in other:
            raise ScopeError(f"{name} cannot be used in a {what}")
        raise ScopeError(f"undeclared name {name}")


def check_scopes(program: A.Program) -> tuple[str, ...]:
    """Validate name usage and return the declared program variables in order."""
    features = set(program.feature_names)
    if len(features) != len(program.features):
        raise ScopeError("duplicate feature declaration")
    declared: list[str] = []

    for c in program.constraints:
        _check_names(c, features, set(), "feature expression")

    def visit(stmt: A.Stmt, scope: set[str]) -> None:
        if isinstance(stmt, A.Block):
            inner = set(scope)
            for s in stmt.stmts:
                if isinstance(s, A.Decl):
                    for name, init in s.items:
                        if init is not None:
                            _check_names(init, inner, features, "program expression")
                        if name in features:
                            raise ScopeError(f"{name} is a feature and cannot be declared as a variable")
                        if name in declared:
                            raise ScopeError(f"variable {name} is declared twice")
                        declared.append(name)
                        inner.add(name)
                else:
                    visit(s, inner)
        elif isinstance(stmt, A.Assign):
            if stmt.var not in scope:
                if stmt.var in features:
                    raise ScopeError(f"cannot assign to feature {stmt.var}")
                raise ScopeError(f"undeclared variable {stmt.var}")
            _check_names(stmt.expr, scope, features, "program expression")
        elif isinstance(stmt, (A.If, A.While)):
            _check_names(stmt.cond, scope, features, "program condition")
            if isinstance(stmt, A.If):
                visit(stmt.then, scope)
                visit(stmt.orelse, scope)
            else:
                visit(stmt.body, scope)
        elif isinstance(stmt, A.Assert):
            _check_names(stmt.cond, scope, features, "program condition")
        elif isinstance(stmt, A.IfDef):
            _check_names(stmt.cond, features, scope, "feature expression")
            visit(stmt.then, scope)
            visit(stmt.orelse, scope)
        elif isinstance(stmt, A.Decl):
            raise ScopeError("declaration outside of a block")

    visit(program.body, set())
    return tuple(declared)


def parse(source: str, name: str = "") -> A.Program:
    """Parse, scope-check and label a program-family source text."""
    program = Parser(source).program()
    variables = check_scopes(program)
    program = A.Program(program.features, program.constraints, program.body, variables, name=name)
    return label(program)


def parse_feature_expr(text: str, feature_names: set[str] | None = None) -> A.BExpr:
    """Parse a stand-alone feature expression such as ``SIZE <= 3 && B``."""
    p = Parser(text)
    cond = p.bexpr(allow_rand=False)
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    if feature_names is not None:
        _check_names(cond, set(feature_names), set(), "feature expression")
    return cond
