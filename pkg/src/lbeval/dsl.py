"""Parser and formatter for ``.nmx`` model files.

A file holds one or more model blocks::

    # sine map, model G
    model G {
        lags = 3;
        init = 0.5, 0.5, 0.5, 0.5;
        update = 2.6868*x[0] - 0.2462*x[0]^3;
    }

``x[p]`` is the output ``p`` steps before the newest one, ``u[q]`` the input
``q`` steps before the current step.  A model that reads ``u[]`` must declare
``input = k_u;`` (its deepest input lag).

Operator precedence, tightest first: ``^`` (positive integer exponent only,
expanded to left-folded multiplication), unary ``-``, ``*`` ``/``, ``+`` ``-``.
Binary operators are left-associative and parentheses are kept as written, so
``(a*b)*c`` and ``a*(b*c)`` give different trees.  ``pi`` is the binary64
value 3.141592653589793.  ``#`` starts a comment.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .expr import (BinaryOp, Constant, Expression, LaggedInput, LaggedOutput,
                   ModelDefinition, Neg, Pow, UnaryCall, UNARY_FUNCTIONS,
                   uses_input)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" or "warning"
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class ModelFile:
    source: str
    models: dict[str, ModelDefinition]
    warnings: list[ParseDiagnostic] = field(default_factory=list)

    def __getitem__(self, name: str) -> ModelDefinition:
        return self.models[name]

    def __iter__(self):
        return iter(self.models.values())


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\]{},;=])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError([ParseDiagnostic(
                "error", line, col, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col, pos))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, pos))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError([ParseDiagnostic("error", tok.line, tok.column,
                                          message)])

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "ident"):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind not in ("op", "ident"):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    # expression grammar

    def expression(self) -> Expression:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinaryOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinaryOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            # a bare literal folds into a negative constant (negation is exact)
            if self.tok.kind == "number" and self.peek().text != "^":
                return Constant(-self.number())
            return Neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.error("unary '+' is not supported")
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            tok = self.tok
            if tok.kind != "number" or not tok.text.isdigit():
                self.error("exponent must be a positive integer literal")
            exponent = int(tok.text)
            if exponent < 1:
                self.error("exponent must be a positive integer literal")
            self.advance()
            return Pow(base, exponent)
        return base

    def number(self) -> float:
        tok = self.advance()
        value = float(tok.text)
        if not math.isfinite(value):
            self.error(f"literal {tok.text} overflows binary64", tok)
        return value

    def lag_index(self) -> int:
        self.expect("[")
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            self.error("lag must be a nonnegative integer")
        self.advance()
        self.expect("]")
        return int(tok.text)

    def atom(self) -> Expression:
        tok = self.tok
        if tok.kind == "number":
            return Constant(self.number())
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expression()
            self.expect(")")
            return node
        if tok.kind == "ident":
            name = tok.text
            if name == "x":
                self.advance()
                return LaggedOutput(self.lag_index())
            if name == "u":
                self.advance()
                return LaggedInput(self.lag_index())
            if name == "pi":
                self.advance()
                return Constant(math.pi)
            if name in UNARY_FUNCTIONS:
                self.advance()
                self.expect("(")
                arg = self.expression()
                self.expect(")")
                return UnaryCall(name, arg)
            self.error(f"unknown identifier {name!r}")
        found = tok.text or "end of input"
        self.error(f"expected an operand, found {found!r}")


def parse_expression(text: str) -> Expression:
    """Parse a bare update expression."""
    parser = _Parser(tokenize(text))
    node = parser.expression()
    if parser.tok.kind != "eof":
        parser.error(f"unexpected {parser.tok.text!r}")
    return node


def _parse_block(parser: _Parser):
    warnings = []
    start = parser.expect("model")
    name_tok = parser.tok
    if name_tok.kind != "ident":
        parser.error("expected a model name")
    parser.advance()
    parser.expect("{")
    fields: dict[str, object] = {}
    positions: dict[str, Token] = {}
    update_span = (0, 0)
    while not parser.accept("}"):
        key_tok = parser.tok
        if key_tok.kind == "eof":
            parser.error(f"unterminated model block {name_tok.text!r}", start)
        if key_tok.kind != "ident" or key_tok.text not in (
                "lags", "init", "input", "update"):
            parser.error(f"unknown declaration {key_tok.text!r}; expected "
                         "lags, init, input or update")
        key = key_tok.text
        if key in fields:
            parser.error(f"duplicate declaration {key!r}")
        parser.advance()
        parser.expect("=")
        positions[key] = key_tok
        if key in ("lags", "input"):
            tok = parser.tok
            if tok.kind != "number" or not tok.text.isdigit():
                parser.error(f"{key} must be a nonnegative integer")
            parser.advance()
            fields[key] = int(tok.text)
        elif key == "init":
            values = [_signed_number(parser)]
            while parser.accept(","):
                values.append(_signed_number(parser))
            fields[key] = values
        else:
            first = parser.i
            fields[key] = parser.expression()
            update_span = (first, parser.i)
        parser.expect(";")

    for key in ("lags", "init", "update"):
        if key not in fields:
            parser.error(f"model {name_tok.text!r} is missing {key!r}",
                         name_tok)
    lags = fields["lags"]
    init = fields["init"]
    update = fields["update"]
    if len(init) != lags + 1:
        parser.error(f"init has {len(init)} values but lags = {lags} "
                     f"requires {lags + 1}", positions["init"])
    k_u = fields.get("input")
    lo, hi = update_span
    for tok_k in range(lo, hi):
        tok = parser.tokens[tok_k]
        if tok.kind == "ident" and tok.text in ("x", "u"):
            lag = int(parser.tokens[tok_k + 2].text)
            if tok.text == "x" and lag > lags:
                parser.error(f"x[{lag}] exceeds declared lags = {lags}", tok)
            if tok.text == "u":
                if k_u is None:
                    parser.error("u[] used but no 'input' declared", tok)
                if lag > k_u:
                    parser.error(f"u[{lag}] exceeds declared input = {k_u}",
                                 tok)
    if k_u is not None and not uses_input(update):
        t = positions["input"]
        warnings.append(ParseDiagnostic(
            "warning", t.line, t.column,
            f"model {name_tok.text!r} declares an input it never reads"))
    model = ModelDefinition(
        name=name_tok.text, max_output_lag=lags, initial_conditions=init,
        update=update, max_input_lag=k_u or 0,
        requires_input=k_u is not None)
    return model, warnings, name_tok


def _signed_number(parser: _Parser) -> float:
    sign = -1.0 if parser.accept("-") else 1.0
    if parser.tok.kind != "number":
        parser.error("expected a number")
    return sign * parser.number()


def parse_model_file(text: str) -> ModelFile:
    """Parse ``.nmx`` source.  Raises :class:`ParseError` on any error."""
    parser = _Parser(tokenize(text))
    models: dict[str, ModelDefinition] = {}
    warnings: list[ParseDiagnostic] = []
    while parser.tok.kind != "eof":
        model, warns, name_tok = _parse_block(parser)
        if model.name in models:
            parser.error(f"duplicate model name {model.name!r}", name_tok)
        models[model.name] = model
        warnings.extend(warns)
    if not models:
        parser.error("no model blocks found")
    return ModelFile(text, models, warnings)


def load_model_file(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model_file(fh.read())


# formatting

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node: Expression) -> int:
    if isinstance(node, BinaryOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    if isinstance(node, Pow):
        return _POW_PREC
    if isinstance(node, Constant) and math.copysign(1.0, node.value) < 0:
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(text: str, cond: bool) -> str:
    return f"({text})" if cond else text


def format_expression(expr: Expression) -> str:
    """Canonical text for ``expr``; reparses to a structurally equal tree.

    Grouping inside products is always spelled out, so ``(a*b)*c`` keeps its
    parentheses even though they are implied by left-associativity.
    """
    if isinstance(expr, Constant):
        return repr(expr.value)
    if isinstance(expr, LaggedOutput):
        return f"x[{expr.lag}]"
    if isinstance(expr, LaggedInput):
        return f"u[{expr.lag}]"
    if isinstance(expr, UnaryCall):
        return f"{expr.function}({format_expression(expr.argument)})"
    if isinstance(expr, Pow):
        base = format_expression(expr.base)
        return f"{_wrap(base, _prec(expr.base) < _ATOM_PREC)}^{expr.exponent}"
    if isinstance(expr, Neg):
        inner = format_expression(expr.operand)
        # "-2.0" would refold into a constant, "--" reads badly
        paren = (_prec(expr.operand) < _POW_PREC
                 or isinstance(expr.operand, Constant))
        return "-" + _wrap(inner, paren)
    if isinstance(expr, BinaryOp):
        p = _PREC[expr.op]
        lp, rp = _prec(expr.left), _prec(expr.right)
        left = format_expression(expr.left)
        right = format_expression(expr.right)
        if p == 1:
            left = _wrap(left, lp < p)
        else:
            left = _wrap(left, lp <= p)
        right = _wrap(right, rp <= p)
        if p == 1:
            return f"{left} {expr.op} {right}"
        return f"{left}{expr.op}{right}"
    raise TypeError(f"not an expression node: {expr!r}")


def format_model(model: ModelDefinition) -> str:
    lines = [f"model {model.name} {{",
             f"    lags = {model.max_output_lag};",
             "    init = " + ", ".join(repr(v) for v in
                                       model.initial_conditions) + ";"]
    if model.requires_input:
        lines.append(f"    input = {model.max_input_lag};")
    lines.append(f"    update = {format_expression(model.update)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_model_file(models) -> str:
    return "\n".join(format_model(m) for m in models)
