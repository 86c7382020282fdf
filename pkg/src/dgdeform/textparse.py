"""Tokenizer and parser for polynomial strings such as ``1/2*t1^2 - (1+i)*th1*t2``."""

from __future__ import annotations

import re

from .errors import ParseError
from .scalars import ExactScalar, ONE, parse_scalar

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?i?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, 1, tok[2])

    def series(self):
        terms = []
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        terms.append(self.term(sign))
        while True:
            kind, val, _ = self.peek()
            if kind == "end":
                break
            if kind == "op" and val in "+-":
                self.take()
                terms.append(self.term(-1 if val == "-" else 1))
            else:
                self.fail(f"expected '+' or '-', found {val!r}")
        return terms

    def term(self, sign):
        coeff = ONE * sign
        factors = []
        self.factor(factors, coeff_box := [coeff])
        while self.peek()[:2] == ("op", "*"):
            self.take()
            self.factor(factors, coeff_box)
        return coeff_box[0], factors

    def factor(self, factors, coeff_box):
        kind, val, col = self.take()
        if kind == "num":
            coeff_box[0] = coeff_box[0] * parse_scalar(val)
            return
        if kind == "name":
            if val == "i":
                coeff_box[0] = coeff_box[0] * ExactScalar(0, 1)
                return
            if self.names is not None and val not in self.names:
                raise ParseError(f"unknown variable {val!r}", 1, col)
            exp = 1
            if self.peek()[:2] == ("op", "^"):
                self.take()
                k2, v2, c2 = self.take()
                if k2 != "num" or not v2.isdigit():
                    raise ParseError("exponent must be a nonnegative integer", 1, c2)
                exp = int(v2)
            factors.append((val, exp))
            return
        if kind == "op" and val == "(":
            start = self.i
            depth = 1
            while depth:
                k, v, c = self.take()
                if k == "end":
                    raise ParseError("unbalanced parenthesis", 1, col)
                if v == "(":
                    depth += 1
                elif v == ")":
                    depth -= 1
            inner = "".join(v for _, v, _ in self.toks[start:self.i - 1])
            try:
                coeff_box[0] = coeff_box[0] * parse_scalar(inner)
            except ValueError:
                raise ParseError(f"parenthesised factor must be a scalar: {inner!r}", 1, col)
            return
        self.fail(f"unexpected token {val!r}", (kind, val, col))


def parse_terms(text: str, names=None):
    """Parse a polynomial string into ``[(coeff, [(name, exponent), ...]), ...]``.

    Factor order is preserved so that callers can apply Koszul signs for odd
    variables.  ``names`` restricts the accepted variable names.
    """
    text = str(text)
    if not text.strip():
        raise ParseError("empty polynomial", 1, 1)
    return _Parser(text, None if names is None else set(names)).series()
