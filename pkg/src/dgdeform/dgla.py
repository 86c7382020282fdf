"""Finite-rank DGLAs given by structure constants, and their tensor products
with graded Artin algebras."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .artin import GradedArtinAlgebra, SeriesElement
from .errors import PreconditionError, StructuralError
from .linalg import CochainComplex, Contraction, GradedVectorSpace, LinearMap, vec_add
from .scalars import ONE, ZERO, scalar

__all__ = [
    "Dgla",
    "AxiomReport",
    "check_axioms",
    "DglaOverArtin",
    "TensorElement",
    "tensor_artin",
    "deformed_differential",
]


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


class Dgla:
    """DGLA on a graded basis.

    ``d`` maps a source index to ``{target index: coeff}``.  ``bracket`` maps
    a pair ``(i, j)`` with ``i <= j`` to ``{k: coeff}``; the remaining pairs
    follow from graded antisymmetry.  Names may be used instead of indices.
    """

    def __init__(self, space, d=None, bracket=None):
        if not isinstance(space, GradedVectorSpace):
            space = GradedVectorSpace(space)
        self.space = space
        n = space.dim
        idx = self._idx
        dmap = {}
        for src, out in (d or {}).items():
            i = idx(src)
            for tgt, c in dict(out).items():
                j = idx(tgt)
                c = scalar(c)
                if not c:
                    continue
                if space.degree(j) != space.degree(i) + 1:
                    raise StructuralError(
                        f"d({space.name(i)}) has a component {space.name(j)} of the wrong degree"
                    )
                dmap.setdefault(i, {})
                dmap[i][j] = dmap[i].get(j, ZERO) + c
        self._d = {i: {j: c for j, c in v.items() if c} for i, v in dmap.items()}
        self._d = {i: v for i, v in self._d.items() if v}
        upper = {}
        for key, out in (bracket or {}).items():
            a, b = key
            i, j = idx(a), idx(b)
            if i > j:
                raise StructuralError(
                    f"bracket entries are given for ordered pairs only: ({space.name(i)}, {space.name(j)})"
                )
            for tgt, c in dict(out).items():
                k = idx(tgt)
                c = scalar(c)
                if not c:
                    continue
                if space.degree(k) != space.degree(i) + space.degree(j):
                    raise StructuralError(
                        f"[{space.name(i)}, {space.name(j)}] has a component "
                        f"{space.name(k)} of the wrong degree"
                    )
                upper.setdefault((i, j), {})
                upper[(i, j)][k] = upper[(i, j)].get(k, ZERO) + c
        self._upper = {key: {k: c for k, c in v.items() if c} for key, v in upper.items()}
        self._upper = {key: v for key, v in self._upper.items() if v}
        full = {}
        deg = space.degree
        for (i, j), out in self._upper.items():
            full[(i, j)] = dict(out)
            if i != j:
                s = -_sign(deg(i) * deg(j))
                full[(j, i)] = {k: c * s for k, c in out.items()}
        self._full = full
        self._n = n

    def _idx(self, key) -> int:
        if isinstance(key, str):
            return self.space.index(key)
        k = int(key)
        if not 0 <= k < self.space.dim:
            raise StructuralError(f"basis index {k} out of range")
        return k

    # -- basic data -------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.space.dim

    def degree(self, i) -> int:
        return self.space.degree(self._idx(i))

    def name(self, i: int) -> str:
        return self.space.name(i)

    def d_basis(self, i: int) -> dict:
        return self._d.get(i, {})

    def bracket_basis(self, i: int, j: int) -> dict:
        return self._full.get((i, j), {})

    def upper_brackets(self) -> dict:
        return dict(self._upper)

    def d_entries(self) -> dict:
        return {i: dict(v) for i, v in self._d.items()}

    def is_abelian(self) -> bool:
        return not self._full

    # -- vectors ----------------------------------------------------------

    def vector(self, entries) -> dict:
        return self.space.vector(entries)

    def d(self, v: dict) -> dict:
        out = {}
        for i, c in v.items():
            for j, a in self._d.get(i, {}).items():
                out = vec_add(out, {j: a * c})
        return out

    def bracket(self, u: dict, v: dict) -> dict:
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                br = self._full.get((i, j))
                if br:
                    ab = a * b
                    for k, c in br.items():
                        out = vec_add(out, {k: c * ab})
        return out

    def vec_degree(self, v: dict):
        degs = {self.space.degree(i) for i in v}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else None

    def differential_map(self) -> LinearMap:
        entries = {}
        for i, out in self._d.items():
            for j, c in out.items():
                entries[(j, i)] = c
        return LinearMap(self.space, self.space, entries, 1)

    def complex(self) -> CochainComplex:
        if not hasattr(self, "_complex"):
            self._complex = CochainComplex(self.space, self.differential_map())
        return self._complex

    def contraction(self) -> Contraction:
        if not hasattr(self, "_contraction"):
            self._contraction = Contraction(self.complex())
        return self._contraction

    def format_vector(self, v: dict) -> str:
        if not v:
            return "0"
        parts = []
        for i in sorted(v):
            c = v[i]
            parts.append(f"{c}*{self.name(i)}" if c != 1 else self.name(i))
        return " + ".join(parts)

    def __repr__(self):
        return f"Dgla(dim={self.dim}, degrees={[d for _, d in self.space.basis]})"


@dataclass
class AxiomReport:
    ok: bool
    axiom: str | None = None
    witness: tuple = ()
    detail: str = ""

    def __bool__(self):
        return self.ok


def check_axioms(L: Dgla) -> AxiomReport:
    """Check d^2 = 0, antisymmetry, Leibniz and Jacobi on all basis tuples."""
    n = L.dim
    deg = L.space.degree
    nm = L.name
    for i in range(n):
        dd = L.d(L.d({i: ONE}))
        if dd:
            return AxiomReport(False, "d^2=0", (nm(i),), f"d(d({nm(i)})) = {L.format_vector(dd)}")
    for i in range(n):
        if deg(i) % 2 == 0 and L.bracket_basis(i, i):
            return AxiomReport(
                False, "antisymmetry", (nm(i), nm(i)),
                f"[{nm(i)},{nm(i)}] must vanish for an even element",
            )
    for i, j in iproduct(range(n), repeat=2):
        if i > j:
            continue
        ei, ej = {i: ONE}, {j: ONE}
        lhs = L.d(L.bracket(ei, ej))
        rhs = vec_add(L.bracket(L.d(ei), ej), L.bracket(ei, L.d(ej)), _sign(deg(i)))
        if lhs != rhs:
            return AxiomReport(
                False, "leibniz", (nm(i), nm(j)),
                f"d[{nm(i)},{nm(j)}] = {L.format_vector(lhs)} but "
                f"[d{nm(i)},{nm(j)}] ± [{nm(i)},d{nm(j)}] = {L.format_vector(rhs)}",
            )
    for i, j, k in iproduct(range(n), repeat=3):
        if not (i <= j <= k):
            continue
        for a, b, c in {(i, j, k), (j, k, i), (k, i, j)}:
            ea, eb, ec = {a: ONE}, {b: ONE}, {c: ONE}
            lhs = L.bracket(ea, L.bracket(eb, ec))
            rhs = vec_add(L.bracket(L.bracket(ea, eb), ec),
                          L.bracket(eb, L.bracket(ea, ec)), _sign(deg(a) * deg(b)))
            if lhs != rhs:
                return AxiomReport(
                    False, "jacobi", (nm(a), nm(b), nm(c)),
                    f"[{nm(a)},[{nm(b)},{nm(c)}]] = {L.format_vector(lhs)} differs from "
                    f"{L.format_vector(rhs)}",
                )
    return AxiomReport(True)


# ---------------------------------------------------------------------------
# tensoring with Artin algebras


class TensorElement:
    """Element of L⊗A stored as ``{(basis index, monomial): coeff}``."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: "DglaOverArtin", terms=None):
        self.ambient = ambient
        clean = {}
        alg = ambient.algebra
        for (i, m), c in (terms or {}).items():
            c = scalar(c)
            m = tuple(m)
            if c and alg.is_valid(m):
                clean[(i, m)] = clean.get((i, m), ZERO) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def _raw(cls, ambient, terms):
        obj = object.__new__(cls)
        obj.ambient = ambient
        obj.terms = terms
        return obj

    def _same(self, other):
        if not isinstance(other, TensorElement) or other.ambient is not self.ambient:
            if not (isinstance(other, TensorElement) and other.ambient == self.ambient):
                raise StructuralError("elements live in different DGLAs")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return TensorElement._raw(self.ambient, out)

    __radd__ = __add__

    def __neg__(self):
        return TensorElement._raw(self.ambient, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = scalar(c)
        if not c:
            return self.ambient.zero()
        return TensorElement._raw(self.ambient, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous(self, order: int) -> "TensorElement":
        return TensorElement._raw(self.ambient, {(i, m): c for (i, m), c in self.terms.items()
                                                if sum(m) == order})

    def truncate(self, order: int) -> "TensorElement":
        return TensorElement._raw(self.ambient, {(i, m): c for (i, m), c in self.terms.items()
                                                if sum(m) <= order})

    def low_order(self):
        if not self.terms:
            return None
        return min(sum(m) for (_, m) in self.terms)

    def by_monomial(self) -> dict:
        """``{monomial: sparse L-vector}``."""
        out = {}
        for (i, m), c in self.terms.items():
            out.setdefault(m, {})[i] = c
        return out

    def coefficient_series(self, i) -> SeriesElement:
        """The A-coefficient of basis element ``i``."""
        i = self.ambient.base._idx(i)
        return SeriesElement(self.ambient.algebra, {m: c for (j, m), c in self.terms.items()
                                                    if j == i})

    def degree(self):
        return self.ambient.degree(self)

    def __str__(self):
        return self.ambient.format(self)

    def __repr__(self):
        return f"TensorElement({self})"


class DglaOverArtin:
    """The DGLA L⊗A with (L⊗A)^k = sum over i - j = k of L^i ⊗ A^(j).

    d(x⊗a) = dx⊗a and [x⊗a, y⊗b] = (-1)^{|a||y|} [x, y]⊗ab.  Elements of the
    maximal-ideal part L⊗m_A are those without a constant monomial.
    """

    def __init__(self, base: Dgla, algebra: GradedArtinAlgebra):
        self.base = base
        self.algebra = algebra

    def __eq__(self, other):
        return (isinstance(other, DglaOverArtin) and other.base is self.base
                and other.algebra == self.algebra)

    def __hash__(self):
        return hash((id(self.base), self.algebra))

    def __repr__(self):
        return f"DglaOverArtin({self.base!r}, {self.algebra!r})"

    # -- constructors -----------------------------------------------------

    def zero(self) -> TensorElement:
        return TensorElement._raw(self, {})

    def tensor(self, vec, series) -> TensorElement:
        """x⊗a for a sparse L-vector (or basis name) x and a series a."""
        if isinstance(vec, (str, int)):
            vec = {self.base._idx(vec): ONE}
        elif not isinstance(vec, dict):
            raise StructuralError("expected a sparse vector or a basis name")
        else:
            vec = self.base.vector(vec)
        if isinstance(series, str):
            series = self.algebra.parse(series)
        elif not isinstance(series, SeriesElement):
            series = self.algebra.constant(series)
        terms = {}
        for i, c in vec.items():
            for m, a in series.coeffs.items():
                terms[(i, m)] = c * a
        return TensorElement(self, terms)

    def element(self, entries) -> TensorElement:
        """Sum of ``{basis name: series or string}``."""
        out = self.zero()
        for name, series in dict(entries).items():
            out = out + self.tensor(name, series)
        return out

    def from_monomial_vectors(self, parts: dict) -> TensorElement:
        terms = {}
        for m, vec in parts.items():
            for i, c in vec.items():
                if c:
                    terms[(i, tuple(m))] = c
        return TensorElement(self, terms)

    # -- structure --------------------------------------------------------

    @property
    def nilpotency(self) -> int:
        """Brackets of this many elements of L⊗m_A vanish."""
        return self.algebra.nilpotency_index()

    def term_degree(self, i: int, m) -> int:
        return self.base.space.degree(i) - self.algebra.degree(m)

    def degree(self, x: TensorElement):
        degs = {self.term_degree(i, m) for (i, m) in x.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else None

    def in_ideal(self, x: TensorElement) -> bool:
        return all(sum(m) >= 1 for (_, m) in x.terms)

    def d(self, x: TensorElement) -> TensorElement:
        out = {}
        base = self.base
        for (i, m), c in x.terms.items():
            for j, a in base.d_basis(i).items():
                key = (j, m)
                v = out.get(key)
                v = a * c if v is None else v + a * c
                out[key] = v
        return TensorElement._raw(self, {k: v for k, v in out.items() if v})

    def bracket(self, x: TensorElement, y: TensorElement) -> TensorElement:
        base = self.base
        alg = self.algebra
        deg = base.space.degree
        out = {}
        for (i, m1), c1 in x.terms.items():
            dm1 = alg.degree(m1) % 2
            for (j, m2), c2 in y.terms.items():
                br = base.bracket_basis(i, j)
                if not br:
                    continue
                r = alg.mul_monomials(m1, m2)
                if r is None:
                    continue
                sign, m = r
                if dm1 and deg(j) % 2:
                    sign = -sign
                cc = c1 * c2
                if sign < 0:
                    cc = -cc
                for k, a in br.items():
                    key = (k, m)
                    v = out.get(key)
                    v = a * cc if v is None else v + a * cc
                    out[key] = v
        return TensorElement._raw(self, {k: v for k, v in out.items() if v})

    def format(self, x: TensorElement) -> str:
        if not x.terms:
            return "0"
        parts = []
        for i in range(self.base.dim):
            s = x.coefficient_series(i)
            if s:
                text = str(s)
                if " " in text:
                    text = f"({text})"
                parts.append(f"{self.base.name(i)}⊗{text}")
        return " + ".join(parts)

    # -- expansion over the base field -------------------------------------

    def expanded(self, ideal_only: bool = True) -> Dgla:
        """L⊗m_A (or L⊗A) written out as a Dgla over the base field."""
        monos = self.algebra.ideal_basis() if ideal_only else self.algebra.basis()
        keys = [(i, m) for m in monos for i in range(self.base.dim)]
        pos = {k: n for n, k in enumerate(keys)}
        names = [self._key_name(i, m) for i, m in keys]
        space = GradedVectorSpace([(nm, self.term_degree(i, m)) for nm, (i, m) in zip(names, keys)])
        d = {}
        for n, (i, m) in enumerate(keys):
            img = self.d(TensorElement._raw(self, {(i, m): ONE}))
            if img:
                d[n] = {pos[k]: c for k, c in img.terms.items()}
        br = {}
        for a in range(len(keys)):
            xa = TensorElement._raw(self, {keys[a]: ONE})
            for b in range(a, len(keys)):
                xb = TensorElement._raw(self, {keys[b]: ONE})
                img = self.bracket(xa, xb)
                if img:
                    br[(a, b)] = {pos[k]: c for k, c in img.terms.items()}
        return Dgla(space, d, br)

    def _key_name(self, i, m) -> str:
        mono = self.algebra.monomial_str(m) or "1"
        return f"{self.base.name(i)}⊗{mono}"

    def to_vector(self, x: TensorElement, ideal_only=True) -> dict:
        monos = self.algebra.ideal_basis() if ideal_only else self.algebra.basis()
        keys = [(i, m) for m in monos for i in range(self.base.dim)]
        pos = {k: n for n, k in enumerate(keys)}
        return {pos[k]: c for k, c in x.terms.items()}

    def field_complex(self, gamma: TensorElement | None = None, ideal_only=False) -> CochainComplex:
        """(L⊗A, d + [gamma, ·]) written out as a complex over the base field."""
        monos = self.algebra.ideal_basis() if ideal_only else self.algebra.basis()
        keys = [(i, m) for m in monos for i in range(self.base.dim)]
        pos = {k: n for n, k in enumerate(keys)}
        space = GradedVectorSpace([(self._key_name(i, m), self.term_degree(i, m)) for i, m in keys])
        entries = {}
        for n, key in enumerate(keys):
            e = TensorElement._raw(self, {key: ONE})
            img = self.d(e)
            if gamma is not None:
                img = img + self.bracket(gamma, e)
            for k, c in img.terms.items():
                entries[(pos[k], n)] = c
        return CochainComplex(space, LinearMap(space, space, entries, 1))


def tensor_artin(L: Dgla, A: GradedArtinAlgebra) -> DglaOverArtin:
    return DglaOverArtin(L, A)


def deformed_differential(Lm: DglaOverArtin, gamma: TensorElement) -> LinearMap:
    """d_γ = d + [γ, ·] as an A-linear map on L⊗A (entries in A).

    Raises PreconditionError carrying the residual when γ is not Maurer-Cartan.
    """
    from .mc import mc_residual

    if Lm.degree(gamma) not in (1, None) or (gamma and Lm.degree(gamma) is None):
        raise StructuralError("γ must be homogeneous of degree 1")
    if not Lm.in_ideal(gamma):
        raise StructuralError("γ must lie in L⊗m_A")
    res = mc_residual(gamma)
    if res:
        raise PreconditionError(f"γ is not Maurer-Cartan: residual {res}", witness=res)
    base = Lm.base
    alg = Lm.algebra
    unit = alg.unit_monomial()
    cols = {}
    for j in range(base.dim):
        e = TensorElement._raw(Lm, {(j, unit): ONE})
        img = Lm.d(e) + Lm.bracket(gamma, e)
        for (k, m), c in img.terms.items():
            cols.setdefault((k, j), {})[m] = c
    entries = {key: SeriesElement(alg, val) for key, val in cols.items()}
    return RingLinearMap(base.space, base.space, entries, 1)


class RingLinearMap(LinearMap):
    """LinearMap whose entries lie in a graded Artin algebra.

    An entry of degree δ joins basis vectors whose degrees differ by
    shift + δ, matching the grading of L⊗A.
    """

    def __init__(self, source, target, entries, shift=0):
        self.source = source
        self.target = target
        self.shift = int(shift)
        clean = {}
        for (r, c), v in entries.items():
            if not v:
                continue
            dv = v.degree()
            if dv is None:
                raise StructuralError("ring entries must be homogeneous")
            if target.degree(r) - source.degree(c) != self.shift + dv:
                raise StructuralError(
                    f"entry {target.name(r)} <- {source.name(c)} breaks the degree rule"
                )
            clean[(r, c)] = v
        self.entries = clean
        rows = [dict() for _ in range(target.dim)]
        for (r, c), v in clean.items():
            rows[r][c] = v
        self._rows = rows

    def apply_series(self, v: dict) -> dict:
        out = {}
        for r, row in enumerate(self._rows):
            acc = None
            for c, a in row.items():
                x = v.get(c)
                if x is not None:
                    acc = a * x if acc is None else acc + a * x
            if acc:
                out[r] = acc
        return out
