"""Truncated graded-commutative polynomial algebras (Artin local algebras).

A monomial is a tuple of exponents, one per declared variable, read in
declaration order.  Odd variables carry exponent 0 or 1 and all Koszul signs
are resolved when two monomials are multiplied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import StructuralError
from .scalars import ExactScalar, ONE, ZERO, scalar
from .textparse import parse_terms

__all__ = [
    "Variable",
    "GradedArtinAlgebra",
    "SeriesElement",
    "alg_mul",
    "alg_derive",
    "nilpotency_index",
]


@dataclass(frozen=True)
class Variable:
    name: str
    degree: int = 0

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class GradedArtinAlgebra:
    """K[t_1..t_n] graded-commutative, modulo (t)^(N+1) and extra monomials.

    ``variables`` is a sequence of ``Variable`` or ``(name, degree)`` pairs.
    ``relations`` lists monomials that are declared zero, given as exponent
    tuples or as strings like ``"t1^2"``.
    """

    def __init__(self, variables: Iterable, truncation: int, relations: Iterable = ()):
        vs = []
        for v in variables:
            if not isinstance(v, Variable):
                name, deg = v
                v = Variable(str(name), int(deg))
            vs.append(v)
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in {names}")
        if truncation < 0:
            raise StructuralError("truncation must be nonnegative")
        self.variables = tuple(vs)
        self.truncation = int(truncation)
        self._index = {v.name: k for k, v in enumerate(vs)}
        self._odd = tuple(v.odd for v in vs)
        rels = []
        for r in relations:
            if isinstance(r, str):
                r = self._parse_relation(r)
            r = tuple(int(e) for e in r)
            if len(r) != len(vs):
                raise StructuralError(f"relation {r} has wrong length")
            rels.append(r)
        self.relations = tuple(rels)
        self._basis = None
        self._mul_cache = {}
        self._nilp = None

    def _parse_relation(self, text):
        terms = parse_terms(text, self._index)
        if len(terms) != 1:
            raise StructuralError(f"relation must be a single monomial: {text!r}")
        exps = [0] * len(self.variables)
        for name, e in terms[0][1]:
            exps[self._index[name]] += e
        return tuple(exps)

    # -- bookkeeping ------------------------------------------------------

    def __repr__(self):
        vs = ", ".join(f"{v.name}:{v.degree}" for v in self.variables)
        return f"GradedArtinAlgebra([{vs}], N={self.truncation}, relations={list(self.relations)})"

    def __eq__(self, other):
        return (
            isinstance(other, GradedArtinAlgebra)
            and self.variables == other.variables
            and self.truncation == other.truncation
            and set(self.relations) == set(other.relations)
        )

    def __hash__(self):
        return hash((self.variables, self.truncation, frozenset(self.relations)))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"unknown variable {name!r}") from None

    def degree(self, mono) -> int:
        return sum(e * v.degree for e, v in zip(mono, self.variables))

    @staticmethod
    def order(mono) -> int:
        return sum(mono)

    def parity(self, mono) -> int:
        return sum(e for e, odd in zip(mono, self._odd) if odd) % 2

    def is_valid(self, mono) -> bool:
        if sum(mono) > self.truncation:
            return False
        for e, odd in zip(mono, self._odd):
            if odd and e > 1:
                return False
        for r in self.relations:
            if all(a >= b for a, b in zip(mono, r)):
                return False
        return True

    def mul_monomials(self, m1, m2):
        """Return ``(sign, m1*m2)`` or ``None`` when the product vanishes."""
        key = (m1, m2)
        hit = self._mul_cache.get(key)
        if hit is not None or key in self._mul_cache:
            return hit
        out = tuple(a + b for a, b in zip(m1, m2))
        if not self.is_valid(out):
            self._mul_cache[key] = None
            return None
        sign = 1
        odd = self._odd
        # move each odd factor of m2 left past the odd factors of m1 with larger index
        passed = 0
        for k in range(len(out) - 1, -1, -1):
            if odd[k]:
                if m2[k] and passed % 2:
                    sign = -sign
                passed += m1[k]
        res = (sign, out)
        self._mul_cache[key] = res
        return res

    def basis(self):
        """All nonzero monomials, graded by order then reverse-lexicographic."""
        if self._basis is None:
            found = []

            def rec(k, prefix, remaining):
                if k == self.nvars:
                    mono = tuple(prefix)
                    if self.is_valid(mono):
                        found.append(mono)
                    return
                top = 1 if self._odd[k] else remaining
                for e in range(min(top, remaining) + 1):
                    prefix.append(e)
                    rec(k + 1, prefix, remaining - e)
                    prefix.pop()

            rec(0, [], self.truncation)
            found.sort(key=lambda m: (sum(m), tuple(-e for e in m)))
            self._basis = tuple(found)
        return self._basis

    def ideal_basis(self):
        """Monomial basis of the maximal ideal."""
        return tuple(m for m in self.basis() if sum(m) >= 1)

    def dim(self) -> int:
        return len(self.basis())

    def unit_monomial(self):
        return (0,) * self.nvars

    # -- elements ---------------------------------------------------------

    def zero(self) -> "SeriesElement":
        return SeriesElement(self, {})

    def one(self) -> "SeriesElement":
        return SeriesElement(self, {self.unit_monomial(): ONE})

    def constant(self, c) -> "SeriesElement":
        return SeriesElement(self, {self.unit_monomial(): scalar(c)})

    def gen(self, name: str) -> "SeriesElement":
        k = self.index(name)
        mono = tuple(1 if j == k else 0 for j in range(self.nvars))
        return SeriesElement(self, {mono: ONE})

    def monomial(self, mono, coeff=1) -> "SeriesElement":
        return SeriesElement(self, {tuple(mono): scalar(coeff)})

    def element(self, coeffs) -> "SeriesElement":
        return SeriesElement(self, {tuple(m): scalar(c) for m, c in dict(coeffs).items()})

    def parse(self, text: str) -> "SeriesElement":
        """Parse a polynomial string; factor order fixes signs of odd variables."""
        total = self.zero()
        for coeff, factors in parse_terms(text, self._index):
            term = self.constant(coeff)
            for name, e in factors:
                g = self.gen(name)
                for _ in range(e):
                    term = term * g
            total = total + term
        return total

    def monomial_str(self, mono) -> str:
        parts = []
        for e, v in zip(mono, self.variables):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts)

    def nilpotency_index(self) -> int:
        if self._nilp is None:
            self._nilp = nilpotency_index(self)
        return self._nilp


class SeriesElement:
    """Element of a GradedArtinAlgebra stored as ``{monomial: ExactScalar}``."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GradedArtinAlgebra, coeffs=None):
        self.algebra = algebra
        clean = {}
        if coeffs:
            for m, c in coeffs.items():
                m = tuple(m)
                if not isinstance(c, ExactScalar):
                    c = scalar(c)
                if c and algebra.is_valid(m):
                    clean[m] = clean.get(m, ZERO) + c
        self.coeffs = {m: c for m, c in clean.items() if c}

    @classmethod
    def _from_clean(cls, algebra, coeffs):
        obj = object.__new__(cls)
        obj.algebra = algebra
        obj.coeffs = coeffs
        return obj

    def _check(self, other):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise StructuralError("elements belong to different algebras")

    def _coerce(self, other):
        if isinstance(other, SeriesElement):
            self._check(other)
            return other
        return self.algebra.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return SeriesElement._from_clean(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return SeriesElement._from_clean(self.algebra, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SeriesElement":
        c = scalar(c)
        if not c:
            return self.algebra.zero()
        return SeriesElement._from_clean(self.algebra, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, SeriesElement):
            return self.scale(other)
        return alg_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, SeriesElement):
            return self.algebra == other.algebra and self.coeffs == other.coeffs
        if isinstance(other, (int, ExactScalar)) or hasattr(other, "denominator"):
            return self.coeffs == self.algebra.constant(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- structure --------------------------------------------------------

    def constant_term(self) -> ExactScalar:
        return self.coeffs.get(self.algebra.unit_monomial(), ZERO)

    def is_unit(self) -> bool:
        return bool(self.constant_term())

    def inverse(self) -> "SeriesElement":
        """Inverse of a unit via the terminating geometric series."""
        c = self.constant_term()
        if not c:
            raise ZeroDivisionError("element is not a unit (zero constant term)")
        cinv = c.inverse()
        nil = self.scale(cinv) - 1
        out = self.algebra.one()
        power = self.algebra.one()
        for _ in range(self.algebra.truncation):
            power = -(power * nil)
            if not power:
                break
            out = out + power
        return out.scale(cinv)

    def homogeneous(self, order: int) -> "SeriesElement":
        return SeriesElement._from_clean(
            self.algebra, {m: c for m, c in self.coeffs.items() if sum(m) == order}
        )

    def truncate(self, order: int) -> "SeriesElement":
        return SeriesElement._from_clean(
            self.algebra, {m: c for m, c in self.coeffs.items() if sum(m) <= order}
        )

    def low_order(self):
        """Smallest order carrying a nonzero coefficient, or None for zero."""
        if not self.coeffs:
            return None
        return min(sum(m) for m in self.coeffs)

    def degree(self):
        """Z-degree if the element is homogeneous, otherwise None."""
        degs = {self.algebra.degree(m) for m in self.coeffs}
        if len(degs) == 1:
            return degs.pop()
        return 0 if not degs else None

    def derive(self, var: str) -> "SeriesElement":
        return alg_derive(self, var)

    def map_coeffs(self, fn) -> "SeriesElement":
        return SeriesElement(self.algebra, {m: fn(c) for m, c in self.coeffs.items()})

    def conjugate(self) -> "SeriesElement":
        return self.map_coeffs(lambda c: c.conjugate())

    def sorted_terms(self):
        return sorted(self.coeffs.items(), key=lambda mc: (sum(mc[0]), tuple(-e for e in mc[0])))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = self.algebra.monomial_str(m)
            ctext = str(c)
            if "+" in ctext[1:] or "-" in ctext[1:]:
                ctext = f"({ctext})"
            if not mono:
                parts.append(ctext)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{ctext}*{mono}")
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __repr__(self):
        return f"SeriesElement({self})"


def alg_mul(a: SeriesElement, b: SeriesElement) -> SeriesElement:
    """Graded-commutative truncated product."""
    if not isinstance(a, SeriesElement) or not isinstance(b, SeriesElement):
        raise StructuralError("alg_mul expects two SeriesElements")
    a._check(b)
    alg = a.algebra
    out = {}
    mul = alg.mul_monomials
    for m1, c1 in a.coeffs.items():
        for m2, c2 in b.coeffs.items():
            r = mul(m1, m2)
            if r is None:
                continue
            sign, m = r
            v = c1 * c2
            if sign < 0:
                v = -v
            prev = out.get(m)
            out[m] = v if prev is None else prev + v
    return SeriesElement._from_clean(alg, {m: c for m, c in out.items() if c})


def alg_derive(f: SeriesElement, var: str) -> SeriesElement:
    """Graded left partial derivative with respect to ``var``."""
    alg = f.algebra
    k = alg.index(var)
    odd = alg._odd
    out = {}
    for m, c in f.coeffs.items():
        e = m[k]
        if not e:
            continue
        sign = 1
        if odd[k]:
            before = sum(m[j] for j in range(k) if odd[j])
            if before % 2:
                sign = -1
        new = m[:k] + (e - 1,) + m[k + 1:]
        out[new] = c * (e * sign)
    return SeriesElement(alg, out)


def nilpotency_index(A: GradedArtinAlgebra) -> int:
    """Smallest n with m_A^n = 0, by building monomial bases of ideal powers."""
    ideal = set(A.ideal_basis())
    power = set(ideal)
    n = 1
    while power:
        nxt = set()
        for m1 in power:
            for m2 in ideal:
                r = A.mul_monomials(m1, m2)
                if r is not None:
                    nxt.add(r[1])
        power = nxt
        n += 1
    return n
