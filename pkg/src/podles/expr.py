"""Textual expression syntax for algebra elements.

Grammar:

    expr   := term (('+' | '-') term)*
    term   := factor (['*'] factor)*        -- juxtaposition multiplies
    factor := atom ('^' int)?
    atom   := generator | rational | 'q' | '(' expr ')' | '-' factor
    generator := 'a' | 'a*' | 'b' | 'w' | 'w*'
    rational  := int ('/' int)?

A '*' immediately after 'a' or 'w' (no space) is the adjoint and belongs
to the generator token; anywhere else '*' is multiplication, and plain
juxtaposition multiplies too.  So "ba" = "b*a" = b.a, "a*a" = adjoint(a).a,
"aa*" = a.adjoint(a), and "q^-4b^2" = q^-4 b^2.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .laurent import LaurentQ
from .qalgebra import Alphabet, AlphabetError, GENERATORS, NCPoly

_TOKEN = re.compile(
    r"\s*(?:(?P<gen>a\*|w\*|a|b|w)|(?P<q>q)|(?P<num>\d+)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot tokenize {text[pos:]!r}")
        tokens.append(m.group(m.lastgroup) if m.lastgroup != "op" else m.group("op"))
        if m.lastgroup == "gen":
            tokens[-1] = ("gen", m.group("gen"))
        elif m.lastgroup == "q":
            tokens[-1] = ("q", "q")
        elif m.lastgroup == "num":
            tokens[-1] = ("num", m.group("num"))
        else:
            tokens[-1] = ("op", m.group("op"))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, alphabet: Alphabet):
        self.toks = tokens
        self.i = 0
        self.alphabet = alphabet

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val):
        kind, v = self.take()
        if v != val:
            raise ValueError(f"expected {val!r}, got {v!r}")

    def parse(self) -> NCPoly:
        x = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.i}: {self.toks[self.i:]}")
        return x

    def expr(self) -> NCPoly:
        x = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            y = self.term()
            x = x + y if op == "+" else x - y
        return x

    def term(self) -> NCPoly:
        x = self.factor()
        while True:
            kind, v = self.peek()
            if kind == "op" and v == "*":
                self.take()
                x = x * self.factor()
            elif kind in ("gen", "q", "num") or (kind == "op" and v == "("):
                x = x * self.factor()
            else:
                return x

    def factor(self) -> NCPoly:
        x = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            n = self._signed_int()
            if n < 0:
                raise ValueError("negative powers are only allowed on q")
            x = x**n
        return x

    def _signed_int(self) -> int:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        kind, v = self.take()
        if kind != "num":
            raise ValueError(f"expected integer exponent, got {v!r}")
        return sign * int(v)

    def atom(self) -> NCPoly:
        kind, v = self.peek()
        if kind == "op" and v == "-":
            self.take()
            return -self.factor()
        if kind == "op" and v == "(":
            self.take()
            x = self.expr()
            self.expect(")")
            return x
        if kind == "gen":
            self.take()
            if v not in GENERATORS[self.alphabet]:
                raise AlphabetError(f"generator {v!r} not in alphabet {self.alphabet!r}")
            return NCPoly.gen(v, self.alphabet)
        if kind == "q":
            self.take()
            k = 1
            if self.peek() == ("op", "^"):
                self.take()
                k = self._signed_int()
            return NCPoly.one(self.alphabet).scale(LaurentQ.q_power(k))
        if kind == "num":
            self.take()
            num = int(v)
            if self.peek() == ("op", "/"):
                self.take()
                k2, v2 = self.take()
                if k2 != "num":
                    raise ValueError("expected denominator")
                return NCPoly.one(self.alphabet).scale(Fraction(num, int(v2)))
            return NCPoly.one(self.alphabet).scale(num)
        raise ValueError(f"unexpected token {v!r}")


def parse_expr(text: str, alphabet: Alphabet = "sphere") -> NCPoly:
    """Parse an algebra element from the textual syntax."""
    return _Parser(_tokenize(text), alphabet).parse()
