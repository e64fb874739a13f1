"""Expression language for metric ingredients.

Grammar (whitespace-insensitive)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := ['-'] INT ('^' exponent)? | '(' ['-'] INT ')' ('^' exponent)?
    atom     := NUMBER | 'i' | VAR | FUNC '(' expr ')' | '(' expr ')'

VAR is ``z<k>`` or ``eta<k>`` with k >= 1, FUNC one of ``conj abs2 sqrt exp
log``.  Exponents are integer literals only; fractional powers go through
``sqrt``.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass

from .errors import ArityError, DomainError, ExprSyntaxError, UnboundVariable, UnknownIdentifier

FUNCTIONS = ("conj", "abs2", "sqrt", "exp", "log")
VARIABLE_RE = re.compile(r"(z|eta)([1-9][0-9]*)$")
_TINY = 1e-300


class Expr:
    """Base class of AST nodes; nodes are immutable and hashable."""

    def __add__(self, other):
        return Binary("+", self, as_expr(other))

    def __radd__(self, other):
        return Binary("+", as_expr(other), self)

    def __sub__(self, other):
        return Binary("-", self, as_expr(other))

    def __rsub__(self, other):
        return Binary("-", as_expr(other), self)

    def __mul__(self, other):
        return Binary("*", self, as_expr(other))

    def __rmul__(self, other):
        return Binary("*", as_expr(other), self)

    def __truediv__(self, other):
        return Binary("/", self, as_expr(other))

    def __rtruediv__(self, other):
        return Binary("/", as_expr(other), self)

    def __neg__(self):
        return Unary("neg", self)

    def __pow__(self, k: int):
        return Pow(self, int(k))

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True, repr=True)
class Num(Expr):
    value: complex


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    name: str  # "z" or "eta"
    index: int  # 1-based


@dataclass(frozen=True, eq=True, repr=True)
class Unary(Expr):
    op: str  # "neg" or a FUNCTIONS entry
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Pow(Expr):
    base: Expr
    exponent: int


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return parse(x)
    return Num(complex(x))


def conj(e) -> Expr:
    return Unary("conj", as_expr(e))


def abs2(e) -> Expr:
    return Unary("abs2", as_expr(e))


def sqrt(e) -> Expr:
    return Unary("sqrt", as_expr(e))


def exp(e) -> Expr:
    return Unary("exp", as_expr(e))


def log(e) -> Expr:
    return Unary("log", as_expr(e))


# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "NUM", "IDENT", an operator character, or "EOF"
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    data = text.encode("utf-8")
    # offsets are byte offsets; work on the decoded string but map positions
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            skip = len(rest) - len(rest.lstrip())
            bad = pos + skip
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", len(text[:bad].encode("utf-8")),
                                  frozenset({"NUMBER", "IDENT", "OPERATOR"}))
        kind = m.lastgroup
        start = m.start(kind)
        offset = len(text[:start].encode("utf-8"))
        tok = m.group(kind)
        tokens.append(Token("NUM" if kind == "num" else "IDENT" if kind == "ident" else tok, tok, offset))
        pos = m.end()
    tokens.append(Token("EOF", "", len(data)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail(f"unexpected {self._describe(self.tok)}", {kind})
        return self.take()

    def fail(self, msg: str, expected, cls=ExprSyntaxError, token=None):
        token = token or self.tok
        raise cls(msg, token.offset, frozenset(expected))

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "EOF" else repr(t.text)

    def parse(self) -> Expr:
        if self.tok.kind == "EOF":
            self.fail("empty expression", {"NUMBER", "IDENT", "(", "-"})
        e = self.expr()
        if self.tok.kind != "EOF":
            self.fail(f"unexpected {self._describe(self.tok)}", {"+", "-", "*", "/", "^", "EOF"})
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take().kind
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.take().kind
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.tok.kind == "-":
            self.take()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def _int_literal(self) -> int:
        sign = 1
        if self.tok.kind == "-":
            self.take()
            sign = -1
        t = self.tok
        if t.kind != "NUM" or not t.text.isdigit():
            self.fail("exponent must be an integer literal (use sqrt for fractional powers)", {"INTEGER"})
        self.take()
        return sign * int(t.text)

    def exponent(self) -> int:
        if self.tok.kind == "(":
            self.take()
            k = self._int_literal()
            if self.tok.kind != ")":
                self.fail("exponent must be an integer literal (use sqrt for fractional powers)", {")"})
            self.take()
        else:
            k = self._int_literal()
        if self.tok.kind == "^":
            self.take()
            k = k ** self.exponent()
            if not isinstance(k, int):
                self.fail("exponent must evaluate to an integer", {"INTEGER"})
        return k

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "NUM":
            self.take()
            return Num(complex(float(t.text)))
        if t.kind == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "IDENT":
            self.take()
            name = t.text
            if name == "i":
                return Num(1j)
            if name in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.tok.kind == ",":
                    self.take()
                    args.append(self.expr())
                close = self.expect(")")
                if len(args) != 1:
                    raise ArityError(f"{name} takes 1 argument, got {len(args)}", t.offset, frozenset({")"}))
                del close
                return Unary(name, args[0])
            m = VARIABLE_RE.match(name)
            if m:
                return Var(m.group(1), int(m.group(2)))
            raise UnknownIdentifier(f"unknown identifier {name!r}", t.offset,
                                    frozenset({"z<k>", "eta<k>", "i", *FUNCTIONS}))
        self.fail(f"unexpected {self._describe(t)}", {"NUMBER", "IDENT", "(", "-"})


def parse(text: str) -> Expr:
    """Parse expression text into an AST."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _num_text(v: complex) -> str:
    re_, im = v.real, v.imag
    if im == 0.0:
        s = repr(float(re_))
        return f"({s})" if re_ < 0 or s.startswith("-") else s
    if re_ == 0.0:
        return "i" if im == 1.0 else f"({float(im)!r}*i)"
    return f"({float(re_)!r}+{float(im)!r}*i)"


def to_text(e: Expr) -> str:
    """Render an AST as text that parses back to an equivalent tree."""
    return _fmt(e, 0)


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return f"{e.name}{e.index}"
    if isinstance(e, Unary):
        if e.op == "neg":
            s = "-" + _fmt(e.arg, 3)
            return f"({s})" if ctx > 3 else s
        return f"{e.op}({_fmt(e.arg, 0)})"
    if isinstance(e, Pow):
        s = f"{_fmt(e.base, 5)}^{e.exponent}" if e.exponent >= 0 else f"{_fmt(e.base, 5)}^({e.exponent})"
        return f"({s})" if ctx > 4 else s
    if isinstance(e, Binary):
        p = _PREC[e.op]
        s = f"{_fmt(e.left, p)} {e.op} {_fmt(e.right, p + 1)}"
        return f"({s})" if ctx > p else s
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# evaluation

def variables(e: Expr) -> set[tuple[str, int]]:
    out: set[tuple[str, int]] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add((node.name, node.index))
        elif isinstance(node, Unary):
            stack.append(node.arg)
        elif isinstance(node, Binary):
            stack.extend((node.left, node.right))
        elif isinstance(node, Pow):
            stack.append(node.base)
    return out


def substitute(e: Expr, mapping: dict) -> Expr:
    """Replace variables by expressions; ``mapping`` keys are ``(name, index)``."""
    if isinstance(e, Var):
        return mapping.get((e.name, e.index), e)
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, mapping))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), e.exponent)
    return e


def _lead(x):
    c = getattr(x, "c", None)
    return c[..., 0] if c is not None else x


def _check_nonzero(x, node):
    if abs(_lead(x)) < _TINY:
        raise DomainError(f"{node.op if isinstance(node, Unary) else 'division'} at zero", to_text(node))


def evaluate(e: Expr, env: dict):
    """Evaluate with ``env[(name, index)]`` holding a complex number or a Jet.

    Jets carry their own conjugation (variable swap); plain numbers are
    conjugated directly.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[(e.name, e.index)]
        except KeyError:
            raise UnboundVariable(f"no value bound for {e.name}{e.index}") from None
    if isinstance(e, Binary):
        a = evaluate(e.left, env)
        b = evaluate(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if abs(_lead(b)) < _TINY:
            raise DomainError("division by zero", to_text(e))
        return a / b
    if isinstance(e, Pow):
        a = evaluate(e.base, env)
        if e.exponent < 0 and abs(_lead(a)) < _TINY:
            raise DomainError("negative power of zero", to_text(e))
        return a ** e.exponent
    if isinstance(e, Unary):
        a = evaluate(e.arg, env)
        op = e.op
        if op == "neg":
            return -a
        if op == "conj":
            return a.conj() if hasattr(a, "basis") else complex(a).conjugate()
        if op == "abs2":
            ac = a.conj() if hasattr(a, "basis") else complex(a).conjugate()
            return a * ac
        if op in ("sqrt", "log"):
            _check_nonzero(a, e)
        if hasattr(a, "basis"):
            return getattr(a, op)()
        return getattr(cmath, op)(a)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate_at(e: Expr, z, eta=()) -> complex:
    """Plain complex evaluation with ``z``/``eta`` given as sequences (1-based names)."""
    env = {("z", k + 1): complex(v) for k, v in enumerate(z)}
    env.update({("eta", k + 1): complex(v) for k, v in enumerate(eta)})
    return complex(evaluate(e, env))
