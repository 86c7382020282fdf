"""Commutative polynomials over Q(i) with optional truncation of variable groups.

Used for polyvector coefficients (z, zbar, t) and for almost complex
structures written in real coordinates (x, y, t).  A truncated group is a set
of variables whose monomials of total order above a bound vanish, so every
element that is a nonzero constant modulo those groups is a unit.
"""

from __future__ import annotations

from .errors import StructuralError
from .scalars import ExactScalar, ONE, ZERO, scalar
from .textparse import parse_terms

__all__ = ["PolyRing", "Poly"]


class PolyRing:
    def __init__(self, names, truncations=()):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise StructuralError(f"duplicate variable names {self.names}")
        self._index = {n: k for k, n in enumerate(self.names)}
        groups = []
        for group, bound in truncations:
            idx = tuple(self.index(n) for n in group)
            groups.append((idx, int(bound)))
        self.truncations = tuple(groups)
        self._nilpotent = frozenset(i for idx, _ in groups for i in idx)

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.names == other.names
                and self.truncations == other.truncations)

    def __hash__(self):
        return hash((self.names, self.truncations))

    def __repr__(self):
        return f"PolyRing({list(self.names)}, truncations={self.truncations})"

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name) -> int:
        if isinstance(name, int):
            return name
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"unknown variable {name!r}") from None

    def valid(self, mono) -> bool:
        for idx, bound in self.truncations:
            if sum(mono[i] for i in idx) > bound:
                return False
        return True

    def group_order(self, mono, group: int = 0) -> int:
        idx, _ = self.truncations[group]
        return sum(mono[i] for i in idx)

    def zero(self) -> "Poly":
        return Poly._raw(self, {})

    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c) -> "Poly":
        c = scalar(c)
        return Poly._raw(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name) -> "Poly":
        k = self.index(name)
        mono = tuple(1 if j == k else 0 for j in range(self.nvars))
        return Poly(self, {mono: ONE})

    def monomial(self, mono, coeff=1) -> "Poly":
        return Poly(self, {tuple(mono): scalar(coeff)})

    def parse(self, text: str) -> "Poly":
        out = self.zero()
        for coeff, factors in parse_terms(text, self._index):
            exps = [0] * self.nvars
            for name, e in factors:
                exps[self._index[name]] += e
            out = out + Poly(self, {tuple(exps): coeff})
        return out

    def mono_str(self, mono) -> str:
        parts = []
        for e, n in zip(mono, self.names):
            if e == 1:
                parts.append(n)
            elif e > 1:
                parts.append(f"{n}^{e}")
        return "*".join(parts)


class Poly:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PolyRing, coeffs=None):
        self.ring = ring
        out = {}
        for m, c in (coeffs or {}).items():
            m = tuple(m)
            c = scalar(c)
            if c and ring.valid(m):
                out[m] = out.get(m, ZERO) + c
        self.coeffs = {m: c for m, c in out.items() if c}

    @classmethod
    def _raw(cls, ring, coeffs):
        obj = object.__new__(cls)
        obj.ring = ring
        obj.coeffs = coeffs
        return obj

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise StructuralError("polynomials from different rings")
            return other
        return self.ring.constant(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ring, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = scalar(other)
            if not c:
                return self.ring.zero()
            return Poly._raw(self.ring, {m: v * c for m, v in self.coeffs.items()})
        other = self._lift(other)
        ring = self.ring
        out = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if not ring.valid(m):
                    continue
                v = out.get(m)
                v = c1 * c2 if v is None else v + c1 * c2
                out[m] = v
        return Poly._raw(ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return self * other.inverse()
        return self * scalar(other).inverse()

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, ExactScalar)) or hasattr(other, "denominator"):
            return self.coeffs == self.ring.constant(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- ring structure ---------------------------------------------------

    def constant_term(self) -> ExactScalar:
        return self.coeffs.get((0,) * self.ring.nvars, ZERO)

    def is_unit(self) -> bool:
        """Nonzero constant plus terms that each contain a truncated variable."""
        if not self.constant_term():
            return False
        nil = self.ring._nilpotent
        for m in self.coeffs:
            if any(m) and not any(m[i] for i in nil):
                return False
        return True

    def inverse(self) -> "Poly":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit")
        c0 = self.constant_term()
        inv0 = c0.inverse()
        n = (self - c0) * inv0
        out = self.ring.one()
        power = self.ring.one()
        while True:
            power = power * (-n)
            if not power:
                break
            out = out + power
        return out * inv0

    def derive(self, name) -> "Poly":
        k = self.ring.index(name)
        out = {}
        for m, c in self.coeffs.items():
            e = m[k]
            if e:
                out[m[:k] + (e - 1,) + m[k + 1:]] = c * e
        return Poly._raw(self.ring, out)

    def euler(self, name) -> "Poly":
        """u ∂/∂u for the variable u."""
        k = self.ring.index(name)
        return Poly._raw(self.ring, {m: c * m[k] for m, c in self.coeffs.items() if m[k]})

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.ring, {m: fn(c) for m, c in self.coeffs.items()})

    def group_part(self, order: int, group: int = 0) -> "Poly":
        return Poly._raw(self.ring, {m: c for m, c in self.coeffs.items()
                                     if self.ring.group_order(m, group) == order})

    def max_group_order(self, group: int = 0):
        if not self.coeffs:
            return None
        return max(self.ring.group_order(m, group) for m in self.coeffs)

    def substitute(self, images: dict, target: PolyRing) -> "Poly":
        """Replace each variable by a polynomial of ``target``.

        Variables missing from ``images`` map to the variable of the same name
        in ``target``.
        """
        gens = []
        for n in self.ring.names:
            img = images.get(n)
            gens.append(target.var(n) if img is None else img)
        cache = {}

        def power(k, e):
            key = (k, e)
            if key not in cache:
                cache[key] = target.one() if e == 0 else power(k, e - 1) * gens[k]
            return cache[key]

        out = target.zero()
        for m, c in self.coeffs.items():
            term = target.constant(c)
            for k, e in enumerate(m):
                if e:
                    term = term * power(k, e)
                    if not term:
                        break
            out = out + term
        return out

    def sorted_terms(self):
        return sorted(self.coeffs.items(), key=lambda mc: (sum(mc[0]), tuple(-e for e in mc[0])))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = self.ring.mono_str(m)
            cs = str(c)
            if not mono:
                text = cs if c.is_real() or not c.re else f"({cs})"
            elif c == 1:
                text = mono
            elif c == -1:
                text = "-" + mono
            elif c.is_real() or not c.re:
                text = f"{cs}*{mono}"
            else:
                text = f"({cs})*{mono}"
            parts.append(text)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"Poly({self})"
