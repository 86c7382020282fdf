"""Gaussian rationals: the exact base field Q(i)."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

__all__ = ["ExactScalar", "scalar", "ZERO", "ONE", "I"]


class ExactScalar:
    """An exact complex number ``re + im*i`` with rational parts.

    Instances are immutable and hashable.  Arithmetic accepts ints and
    Fractions on either side.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "ExactScalar":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    def __reduce__(self):
        return (ExactScalar, (self.re, self.im))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, ExactScalar):
            return ExactScalar._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Rational)):
            return ExactScalar._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._raw(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, ExactScalar):
            return ExactScalar._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Rational)):
            return ExactScalar._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExactScalar):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return ExactScalar._raw(a * c, b)
            return ExactScalar._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Rational)):
            return ExactScalar._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero scalar")
        return ExactScalar._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, ExactScalar):
            return self * other.inverse()
        if isinstance(other, (int, Rational)):
            return ExactScalar._raw(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar._raw(self.re, -self.im)

    # -- comparison -------------------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other):
        if isinstance(other, ExactScalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- text -------------------------------------------------------------

    def __str__(self):
        re_part, im_part = self.re, self.im
        if not im_part:
            return _frac_str(re_part)
        if im_part == 1:
            im_text = "i"
        elif im_part == -1:
            im_text = "-i"
        else:
            im_text = _frac_str(im_part) + "i"
        if not re_part:
            return im_text
        sign = "" if im_text.startswith("-") else "+"
        return f"{_frac_str(re_part)}{sign}{im_text}"

    def __repr__(self):
        return f"ExactScalar({self})"

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        return parse_scalar(text)


def _frac_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_RAT = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?P<re>[+-]?{_RAT})?(?:(?P<isign>[+-])?(?P<im>{_RAT})?\*?(?P<i>i))?$"
)


def parse_scalar(text: str) -> ExactScalar:
    """Parse ``3``, ``-1/2``, ``i``, ``2i``, ``1/2-3/4i`` and similar forms."""
    if isinstance(text, ExactScalar):
        return text
    if isinstance(text, (int, Fraction)):
        return ExactScalar(text)
    s = str(text).replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    m = _SCALAR_RE.match(s)
    if not s or m is None:
        raise ValueError(f"not an exact scalar: {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    if not m.group("i"):
        if not m.group("re"):
            raise ValueError(f"not an exact scalar: {text!r}")
        return ExactScalar(re_part)
    im_part = Fraction(m.group("im")) if m.group("im") else Fraction(1)
    if m.group("isign") == "-":
        im_part = -im_part
    elif m.group("isign") is None and m.group("re") and m.group("im") is None:
        # "2i" parses as re="2" followed by a bare "i"
        return ExactScalar(0, re_part)
    return ExactScalar(re_part, im_part)


def scalar(value) -> ExactScalar:
    """Coerce ints, Fractions, strings and scalars to ExactScalar."""
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    return ExactScalar(value)


ZERO = ExactScalar(0)
ONE = ExactScalar(1)
I = ExactScalar(0, 1)
