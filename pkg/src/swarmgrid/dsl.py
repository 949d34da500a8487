"""Reward description language: lexer, recursive-descent parser, validator.

Grammar (binding):
    program     = { statement } ;
    statement   = symbol_decl | rule_decl ;
    symbol_decl = "symbol" IDENT ":" IDENT "[" index "]" ;
    index       = "any" | "all" | INTEGER ;
    rule_decl   = "rule" "on" expr "receiver" ident_list "value" number_list ;
    expr        = and_expr { "or" and_expr } ;
    and_expr    = unary { "and" unary } ;
    unary       = [ "not" ] atom ;
    atom        = event | "(" expr ")" ;
    event       = ("attack"|"kill"|"collide") "(" IDENT "," IDENT ")"
                | "die" "(" IDENT ")"
                | "in" "(" IDENT "," INTEGER "," INTEGER "," INTEGER "," INTEGER ")" ;

Precedence not > and > or.  "#" starts a comment to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DslError, DslValidationError

KEYWORDS = {
    "symbol", "rule", "on", "receiver", "value",
    "any", "all", "and", "or", "not",
    "attack", "kill", "collide", "die", "in",
}

EVENT_ARITY = {"attack": 2, "kill": 2, "collide": 2, "die": 1, "in": 1}

ANY = "any"
ALL = "all"


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolDecl:
    name: str
    group: str
    index: object  # ANY | ALL | int
    line: int = 0


@dataclass(frozen=True)
class EventAtom:
    kind: str
    args: tuple  # symbol names
    rect: tuple | None = None  # (x0, y0, x1, y1) for "in"


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    expr: object


@dataclass(frozen=True)
class RewardRule:
    trigger: object
    receivers: tuple
    values: tuple
    line: int = 0


@dataclass
class Program:
    symbols: list = field(default_factory=list)
    rules: list = field(default_factory=list)

    def symbol(self, name: str) -> SymbolDecl | None:
        for s in self.symbols:
            if s.name == name:
                return s
        return None


# -- Lexer -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>[+-]?\d+(\.\d+)?([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[:\[\](),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "keyword" | "ident" | "number" | punct char | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup == "number":
            tokens.append(Token("number", lexeme, line, col))
        elif m.lastgroup == "ident":
            kind = "keyword" if lexeme in KEYWORDS else "ident"
            tokens.append(Token(kind, lexeme, line, col))
        elif m.lastgroup == "punct":
            tokens.append(Token(lexeme, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# -- Parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected: str):
        t = self.peek()
        got = t.text if t.kind != "eof" else "end of input"
        raise DslError(f"expected {expected}, got {got!r}", t.line, t.col)

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if t.kind == "keyword" and t.text == word:
            return self.next()
        self.fail(f"'{word}'")

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind == kind:
            return self.next()
        self.fail(kind if len(kind) > 1 else f"'{kind}'")

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "keyword" and t.text == word

    def program(self) -> Program:
        prog = Program()
        while self.peek().kind != "eof":
            if self.at_kw("symbol"):
                prog.symbols.append(self.symbol_decl())
            elif self.at_kw("rule"):
                prog.rules.append(self.rule_decl())
            else:
                self.fail("'symbol' or 'rule'")
        return prog

    def symbol_decl(self) -> SymbolDecl:
        t0 = self.expect_kw("symbol")
        name = self.expect("ident").text
        self.expect(":")
        group = self.expect("ident").text
        self.expect("[")
        t = self.peek()
        if t.kind == "keyword" and t.text in (ANY, ALL):
            index = self.next().text
        elif t.kind == "number":
            index = self.integer("symbol index")
        else:
            self.fail("'any', 'all', or an integer index")
        self.expect("]")
        return SymbolDecl(name=name, group=group, index=index, line=t0.line)

    def integer(self, what: str) -> int:
        t = self.expect("number")
        try:
            if "." in t.text or "e" in t.text or "E" in t.text:
                raise ValueError
            return int(t.text)
        except ValueError:
            raise DslError(f"{what} must be an integer, got {t.text!r}", t.line, t.col)

    def rule_decl(self) -> RewardRule:
        t0 = self.expect_kw("rule")
        self.expect_kw("on")
        trigger = self.expr()
        self.expect_kw("receiver")
        receivers = [self.expect("ident").text]
        while self.peek().kind == ",":
            self.next()
            receivers.append(self.expect("ident").text)
        self.expect_kw("value")
        values = [float(self.expect("number").text)]
        while self.peek().kind == ",":
            self.next()
            values.append(float(self.expect("number").text))
        return RewardRule(
            trigger=trigger, receivers=tuple(receivers), values=tuple(values),
            line=t0.line,
        )

    def expr(self):
        e = self.and_expr()
        while self.at_kw("or"):
            self.next()
            e = Or(e, self.and_expr())
        return e

    def and_expr(self):
        e = self.unary()
        while self.at_kw("and"):
            self.next()
            e = And(e, self.unary())
        return e

    def unary(self):
        if self.at_kw("not"):
            self.next()
            return Not(self.unary())
        return self.atom()

    def atom(self):
        t = self.peek()
        if t.kind == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "keyword" and t.text in EVENT_ARITY:
            return self.event()
        self.fail("an event or '('")

    def event(self) -> EventAtom:
        kw = self.next()
        kind = kw.text
        self.expect("(")
        args = [self.expect("ident").text]
        if kind in ("attack", "kill", "collide"):
            self.expect(",")
            args.append(self.expect("ident").text)
        rect = None
        if kind == "in":
            coords = []
            for _ in range(4):
                self.expect(",")
                coords.append(self.integer("region coordinate"))
            rect = tuple(coords)
        self.expect(")")
        return EventAtom(kind=kind, args=tuple(args), rect=rect)


def parse_program(text: str) -> Program:
    return _Parser(tokenize(text)).program()


# -- Pretty printer ----------------------------------------------------------

def _fmt_num(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() else repr(v)


def _fmt_expr(e, parent_prec: int = 0) -> str:
    # precedence ranks: or 1, and 2, not 3, atom 4
    if isinstance(e, EventAtom):
        if e.kind == "in":
            inner = ", ".join([e.args[0]] + [str(c) for c in e.rect])
        else:
            inner = ", ".join(e.args)
        return f"{e.kind}({inner})"
    if isinstance(e, Not):
        s = f"not {_fmt_expr(e.expr, 3)}"
        prec = 3
    elif isinstance(e, And):
        s = f"{_fmt_expr(e.left, 2)} and {_fmt_expr(e.right, 3)}"
        prec = 2
    elif isinstance(e, Or):
        s = f"{_fmt_expr(e.left, 1)} or {_fmt_expr(e.right, 2)}"
        prec = 1
    else:
        raise TypeError(f"not an expression node: {e!r}")
    return f"({s})" if prec < parent_prec else s


def pretty_print(program: Program) -> str:
    lines = []
    for s in program.symbols:
        lines.append(f"symbol {s.name}: {s.group}[{s.index}]")
    for r in program.rules:
        recv = ", ".join(r.receivers)
        vals = ", ".join(_fmt_num(v) for v in r.values)
        lines.append(f"rule on {_fmt_expr(r.trigger)} receiver {recv} value {vals}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- Validation --------------------------------------------------------------

@dataclass(frozen=True)
class GroupSchema:
    """World-side schema the program is validated against."""

    groups: tuple  # group names
    width: int
    height: int


def _atoms(e):
    if isinstance(e, EventAtom):
        yield e, False
    elif isinstance(e, Not):
        for a, _ in _atoms(e.expr):
            yield a, True
    elif isinstance(e, (And, Or)):
        yield from _atoms(e.left)
        yield from _atoms(e.right)


def referenced_symbols(e):
    return {name for a, _ in _atoms(e) for name in a.args}


def validate(program: Program, schema: GroupSchema) -> None:
    """Static checks; collects every violation before raising."""
    violations = []
    seen = {}
    for s in program.symbols:
        if s.name in seen:
            violations.append(f"symbol {s.name!r} (line {s.line}): duplicate name")
        seen[s.name] = s
        if s.group not in schema.groups:
            violations.append(
                f"symbol {s.name!r} (line {s.line}): unknown group {s.group!r}"
            )
        if isinstance(s.index, int) and s.index < 0:
            violations.append(
                f"symbol {s.name!r} (line {s.line}): concrete index must be >= 0"
            )
    for ri, rule in enumerate(program.rules):
        where = f"rule {ri + 1} (line {rule.line})"
        positive, anywhere = set(), set()
        for atom, under_not in _atoms(rule.trigger):
            for name in atom.args:
                anywhere.add(name)
                if not under_not:
                    positive.add(name)
            if atom.kind == "in":
                x0, y0, x1, y1 = atom.rect
                for label, v, hi in (
                    ("x0", x0, schema.width), ("x1", x1, schema.width),
                    ("y0", y0, schema.height), ("y1", y1, schema.height),
                ):
                    if not 0 <= v < hi:
                        violations.append(
                            f"{where}: in-region {label}={v} out of map bounds "
                            f"(must be in [0, {hi - 1}])"
                        )
        for name in sorted(anywhere):
            if name not in seen:
                violations.append(f"{where}: undefined symbol {name!r}")
            elif seen[name].index == ANY and name not in positive:
                violations.append(
                    f"{where}: unsafe negation, symbol {name!r} is bound only "
                    f"under 'not'"
                )
        for name in rule.receivers:
            if name not in seen:
                violations.append(f"{where}: undefined receiver {name!r}")
        if len(rule.receivers) != len(rule.values):
            violations.append(
                f"{where}: {len(rule.receivers)} receivers but "
                f"{len(rule.values)} values"
            )
    if violations:
        raise DslValidationError(violations)
