"""Text input for potentials and states.

Potentials are polynomials over the rationals in ``x1 .. xD`` built from
``+ - * ^``, parentheses and integer or ``p/q`` literals.  States are sums of
rational multiples of normally ordered monomials such as ``2 :dx1 psi1:`` or
``-1/2 :d^2 y1 x2:``; ``1`` is the vacuum.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .algebra import AlgebraContext, Kind, Symbol, VAElement, _canon, vacuum, zero
from .brst import Potential
from .polyvector import Polyvector


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")


class OddSquareWarning(UserWarning):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<gen>(?:d(?:\^(?P<order>\d+))?\s*)?(?P<name>phi|psi|x|y)_?(?P<index>\d+))
  | (?P<op>[-+*^/():])
""", re.VERBOSE)

_KIND = {"x": Kind.X, "y": Kind.Y, "phi": Kind.PHI, "psi": Kind.PSI}


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    symbol: tuple | None = None  # (name, index, order) for generators


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = mt.lastgroup if mt.lastgroup in ("ws", "num", "op") else "gen"
        if kind == "gen":
            order = mt.group("order")
            prefix = text[pos:mt.start("name")].strip()
            deriv = int(order) if order else (1 if prefix else 0)
            out.append(Token("gen", mt.group(0), pos, (mt.group("name"), int(mt.group("index")), deriv)))
        elif kind != "ws":
            out.append(Token(kind, mt.group(0), pos))
        pos = mt.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            self.fail(f"expected {op!r}")

    def fail(self, message: str):
        tok = self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos)

    def number(self) -> Fraction:
        tok = self.take()
        if tok.kind != "num":
            self.i -= 1
            self.fail("expected a number")
        value = Fraction(int(tok.text))
        if self.accept("/"):
            den = self.take()
            if den.kind != "num":
                self.i -= 1
                self.fail("expected a denominator")
            if int(den.text) == 0:
                raise ParseError("division by zero", self.text, den.pos)
            value /= int(den.text)
        return value


class _PotentialParser(_Parser):
    def __init__(self, text: str, D: int):
        super().__init__(text)
        self.D = D

    def parse(self) -> Polyvector:
        if self.tok.kind == "end":
            self.fail("empty potential")
        out = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected input")
        return out

    def expr(self) -> Polyvector:
        out = self.term()
        while True:
            if self.accept("+"):
                out = out + self.term()
            elif self.accept("-"):
                out = out - self.term()
            else:
                return out

    def term(self) -> Polyvector:
        out = self.unary()
        while True:
            if self.accept("*"):
                out = out * self.unary()
            elif self.accept("/"):
                tok = self.tok
                den = self.power()
                c = _constant_value(den)
                if c is None or c == 0:
                    raise ParseError("can only divide by a nonzero constant", self.text, tok.pos)
                out = out * (1 / c)
            else:
                return out

    def unary(self) -> Polyvector:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Polyvector:
        base = self.atom()
        if self.accept("^"):
            tok = self.take()
            if tok.kind != "num":
                self.i -= 1
                self.fail("expected a nonnegative integer exponent")
            return base ** int(tok.text)
        return base

    def atom(self) -> Polyvector:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Polyvector.const(self.D, Fraction(int(tok.text)))
        if tok.kind == "gen":
            name, index, deriv = tok.symbol
            if name != "x" or deriv:
                raise ParseError(f"potentials are polynomials in x1..x{self.D}, not {tok.text!r}",
                                 self.text, tok.pos)
            if not 1 <= index <= self.D:
                raise ParseError(f"x{index} is out of range for D={self.D}", self.text, tok.pos)
            self.i += 1
            return Polyvector.x(self.D, index)
        if self.accept("("):
            out = self.expr()
            self.expect(")")
            return out
        self.fail("expected a number, variable or '('")


def _constant_value(p: Polyvector) -> Fraction | None:
    items = list(p.items())
    if not items:
        return Fraction(0)
    if len(items) == 1 and not any(items[0][0][0]) and not items[0][0][1]:
        return items[0][1]
    return None


def parse_polynomial(text: str, D: int) -> Polyvector:
    return _PotentialParser(text, D).parse()


def parse_potential(text: str, D: int, weights=None, a: int | None = None) -> Potential:
    """Parse ``text`` and validate homogeneity under ``weights`` when given."""
    return Potential(parse_polynomial(text, D), tuple(weights) if weights is not None else None, a,
                     source=text.strip())


class _StateParser(_Parser):
    def __init__(self, text: str, ctx: AlgebraContext):
        super().__init__(text)
        self.ctx = ctx

    def parse(self) -> VAElement:
        if self.tok.kind == "end":
            self.fail("empty state")
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        out = sign * self.term()
        while self.tok.kind != "end":
            if self.accept("+"):
                out = out + self.term()
            elif self.accept("-"):
                out = out - self.term()
            else:
                self.fail("expected '+' or '-'")
        return out

    def term(self) -> VAElement:
        coeff = Fraction(1)
        has_coeff = False
        if self.tok.kind == "num":
            coeff = self.number()
            has_coeff = True
            self.accept("*")
        if self.tok.kind == "op" and self.tok.text == ":":
            factors = self.normal()
        elif self.tok.kind == "gen":
            factors = [self.generator()]
        elif has_coeff:
            return coeff * vacuum(self.ctx)
        else:
            self.fail("expected a coefficient, generator or ':'")
        sign, mono = _canon(self.ctx, factors)
        if not sign:
            warnings.warn(f"odd generator squared in {self.text!r}; the term is zero",
                          OddSquareWarning, stacklevel=3)
            return zero(self.ctx)
        return VAElement(self.ctx, {mono: sign * coeff})

    def normal(self) -> list:
        self.expect(":")
        factors = []
        while self.tok.kind == "gen":
            factors.append(self.generator())
        self.expect(":")
        return factors

    def generator(self) -> Symbol:
        tok = self.take()
        name, index, deriv = tok.symbol
        if not 1 <= index <= self.ctx.D:
            raise ParseError(f"index {index} is out of range for D={self.ctx.D}", self.text, tok.pos)
        return Symbol(_KIND[name], index, deriv)


def parse_state(text: str, ctx: AlgebraContext) -> VAElement:
    """Parse a state; an odd square gives zero with an :class:`OddSquareWarning`."""
    return _StateParser(text, ctx).parse()
