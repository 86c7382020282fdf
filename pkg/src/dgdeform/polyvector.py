"""Polyvector fields Ω^{0,q}(∧^p T^{1,0}) on a coordinate patch.

An element is a sum of terms f · dzbar_I ⊗ ∂_J with I, J strictly increasing
index tuples (0-based) and f a polynomial.  Internally dzbar_k and ∂/∂z_k
behave as odd symbols η_k and θ_k and every term is kept in the normal order
f η_I θ_J.  With that convention the wedge product is graded commutative for
the parity p+q, and the Lie degree of a (p, q) term is q-p+1.

Two charts are supported.  ``affine`` uses polynomial coefficients in
z_k, zbar_k.  ``mode`` uses polynomials in u_k with ∂/∂z_k and ∂/∂zbar_k both
acting as u_k ∂/∂u_k, truncated at total u-order ``mode_order``; the
truncation ideal is stable under every operation, so this chart gives finite
dGBV models whose ∂bar-cohomology is the u-constant part.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .dgla import Dgla
from .errors import StructuralError
from .linalg import (ChainMap, GradedVectorSpace, LinearMap, kernel_basis,
                     solve_field)
from .poly import Poly, PolyRing
from .scalars import scalar

__all__ = [
    "PolyvectorSpace",
    "PolyVector",
    "dbar",
    "bv_delta",
    "pv_wedge",
    "schouten_bracket",
    "merge_sign",
    "FiniteKsModel",
    "finite_ks_model",
    "tt_residual",
    "tt_audit",
    "TtAudit",
]


def merge_sign(a: tuple, b: tuple):
    """Sign and sorted result of the odd product x_a x_b, or (0, None)."""
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


class PolyvectorSpace:
    def __init__(self, n: int, chart: str = "affine", t_names=("t",), t_order: int = 0,
                 mode_order: int | None = None):
        if n < 1:
            raise StructuralError("patch dimension must be positive")
        self.n = n
        self.chart = chart
        self.t_names = tuple(t_names)
        self.t_order = int(t_order)
        if chart == "affine":
            fnames = [f"z{k + 1}" for k in range(n)] + [f"zb{k + 1}" for k in range(n)]
            truncs = [(self.t_names, self.t_order)] if self.t_names else []
            self.mode_order = None
        elif chart == "mode":
            if mode_order is None:
                raise StructuralError("mode chart needs a mode_order")
            self.mode_order = int(mode_order)
            fnames = [f"u{k + 1}" for k in range(n)]
            truncs = [(tuple(fnames), self.mode_order)]
            if self.t_names:
                truncs.append((self.t_names, self.t_order))
        else:
            raise StructuralError(f"unknown chart {chart!r}")
        self.func_names = tuple(fnames)
        self.ring = PolyRing(fnames + list(self.t_names), truncs)

    def __eq__(self, other):
        return (isinstance(other, PolyvectorSpace) and self.n == other.n
                and self.chart == other.chart and self.ring == other.ring)

    def __hash__(self):
        return hash((self.n, self.chart, self.ring))

    def __repr__(self):
        extra = f", mode_order={self.mode_order}" if self.chart == "mode" else ""
        return f"PolyvectorSpace(n={self.n}, chart={self.chart!r}, t={self.t_names}<={self.t_order}{extra})"

    # -- coordinate derivatives -------------------------------------------

    def dz(self, k: int, f: Poly) -> Poly:
        if self.chart == "affine":
            return f.derive(k)
        return f.euler(k)

    def dzb(self, k: int, f: Poly) -> Poly:
        if self.chart == "affine":
            return f.derive(self.n + k)
        return f.euler(k)

    # -- constructors -----------------------------------------------------

    def zero(self) -> "PolyVector":
        return PolyVector(self, {})

    def poly(self, f) -> Poly:
        if isinstance(f, Poly):
            return f
        if isinstance(f, str):
            return self.ring.parse(f)
        return self.ring.constant(f)

    def term(self, dzbar=(), ddz=(), coeff=1) -> "PolyVector":
        """coeff · dzbar_I ⊗ ∂_J with 0-based indices given in any order."""
        f = self.poly(coeff)
        sign = 1
        I = ()
        for k in dzbar:
            self._check_index(k)
            s, I2 = merge_sign(I, (k,))
            if not s:
                return self.zero()
            sign *= s
            I = I2
        J = ()
        for k in ddz:
            self._check_index(k)
            s, J2 = merge_sign(J, (k,))
            if not s:
                return self.zero()
            sign *= s
            J = J2
        return PolyVector(self, {(I, J): f * sign})

    def _check_index(self, k):
        if not 0 <= k < self.n:
            raise StructuralError(f"index {k} outside 0..{self.n - 1}")

    # -- DGLA protocol ----------------------------------------------------

    def d(self, x: "PolyVector") -> "PolyVector":
        return dbar(x)

    def bracket(self, x, y) -> "PolyVector":
        return schouten_bracket(x, y)

    def degree(self, x: "PolyVector"):
        return x.degree()


class PolyVector:
    __slots__ = ("space", "terms")

    def __init__(self, space: PolyvectorSpace, terms=None):
        self.space = space
        out = {}
        for (I, J), f in (terms or {}).items():
            f = space.poly(f)
            if not f:
                continue
            key = (tuple(I), tuple(J))
            out[key] = out[key] + f if key in out else f
        self.terms = {k: f for k, f in out.items() if f}

    @classmethod
    def _raw(cls, space, terms):
        obj = object.__new__(cls)
        obj.space = space
        obj.terms = terms
        return obj

    @property
    def ambient(self) -> PolyvectorSpace:
        return self.space

    def _check(self, other):
        if not isinstance(other, PolyVector) or (other.space is not self.space
                                                 and other.space != self.space):
            raise StructuralError("polyvectors from different spaces")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.terms)
        for k, f in other.terms.items():
            v = out[k] + f if k in out else f
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return PolyVector._raw(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyVector._raw(self.space, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Poly):
            return PolyVector._raw(self.space, {k: v for k, f in self.terms.items()
                                                if (v := f * c)})
        c = scalar(c)
        if not c:
            return self.space.zero()
        return PolyVector._raw(self.space, {k: f * c for k, f in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def bidegrees(self) -> set:
        """Set of (p, q) occurring."""
        return {(len(J), len(I)) for (I, J) in self.terms}

    def degree(self):
        degs = {len(I) - len(J) + 1 for (I, J) in self.terms}
        if len(degs) != 1:
            return None
        return degs.pop()

    def parity(self):
        ps = {(len(I) + len(J)) % 2 for (I, J) in self.terms}
        if len(ps) != 1:
            return None
        return ps.pop()

    def t_part(self, order: int) -> "PolyVector":
        grp = 0 if self.space.chart == "affine" else 1
        return PolyVector._raw(self.space, {k: v for k, f in self.terms.items()
                                            if (v := f.group_part(order, grp))})

    def truncate_t(self, order: int) -> "PolyVector":
        out = self.space.zero()
        for k in range(order + 1):
            out = out + self.t_part(k)
        return out

    def low_t_order(self):
        grp = 0 if self.space.chart == "affine" else 1
        orders = [self.space.ring.group_order(m, grp)
                  for f in self.terms.values() for m in f.coeffs]
        return min(orders) if orders else None

    def coefficient(self, dzbar=(), ddz=()) -> Poly:
        return self.terms.get((tuple(dzbar), tuple(ddz)), self.space.ring.zero())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (I, J) in sorted(self.terms, key=lambda k: (len(k[1]), len(k[0]), k)):
            f = self.terms[(I, J)]
            frame = "*".join([f"dzb{i + 1}" for i in I] + [f"d/dz{j + 1}" for j in J])
            fs = str(f)
            if not frame:
                parts.append(fs)
            else:
                if fs == "1":
                    parts.append(frame)
                else:
                    parts.append(f"({fs})*{frame}")
        return " + ".join(parts)

    def __repr__(self):
        return f"PolyVector({self})"


def _poly_space(x: PolyVector, y: PolyVector) -> PolyvectorSpace:
    x._check(y)
    return x.space


def pv_wedge(a: PolyVector, b: PolyVector) -> PolyVector:
    """(f η_I θ_J)(g η_K θ_L) = (-1)^{|J||K|} f g η_I η_K θ_J θ_L."""
    S = _poly_space(a, b)
    out = {}
    for (I, J), f in a.terms.items():
        for (K, L), g in b.terms.items():
            s1, IK = merge_sign(I, K)
            if not s1:
                continue
            s2, JL = merge_sign(J, L)
            if not s2:
                continue
            sign = s1 * s2 * (-1 if (len(J) * len(K)) % 2 else 1)
            fg = f * g
            if not fg:
                continue
            key = (IK, JL)
            v = fg * sign
            out[key] = out[key] + v if key in out else v
    return PolyVector._raw(S, {k: v for k, v in out.items() if v})


def dbar(a: PolyVector) -> PolyVector:
    """Σ_k ∂f/∂zbar_k dzbar_k ∧ dzbar_I ⊗ ∂_J."""
    S = a.space
    out = {}
    for (I, J), f in a.terms.items():
        for k in range(S.n):
            s, kI = merge_sign((k,), I)
            if not s:
                continue
            df = S.dzb(k, f)
            if not df:
                continue
            key = (kI, J)
            v = df * s
            out[key] = out[key] + v if key in out else v
    return PolyVector._raw(S, {k: v for k, v in out.items() if v})


def bv_delta(a: PolyVector) -> PolyVector:
    """Divergence with respect to dz_1∧...∧dz_n.

    f η_I θ_J  ↦  Σ_r (-1)^{q+p-r} ∂f/∂z_{j_r} η_I θ_{J minus j_r}, r counted from 1.
    """
    S = a.space
    out = {}
    for (I, J), f in a.terms.items():
        p, q = len(J), len(I)
        for r, j in enumerate(J, start=1):
            df = S.dz(j, f)
            if not df:
                continue
            sign = -1 if (q + p - r) % 2 else 1
            key = (I, J[:r - 1] + J[r:])
            v = df * sign
            out[key] = out[key] + v if key in out else v
    return PolyVector._raw(S, {k: v for k, v in out.items() if v})


def _theta_right_derivative(J: tuple, k: int):
    """∂^R/∂θ_k of θ_J: (sign, J minus k) or (0, None)."""
    if k not in J:
        return 0, None
    r = J.index(k) + 1
    return (-1 if (len(J) - r) % 2 else 1), J[:r - 1] + J[r:]


def _sn_pair(S: PolyvectorSpace, f: Poly, J: tuple, g: Poly, L: tuple, out: dict, pref: int,
             I: tuple):
    """Accumulate pref · η_I · [f θ_J, g θ_L]_SN into ``out``."""
    p, pp = len(J), len(L)
    swap = -1 if ((p - 1) * (pp - 1)) % 2 else 1
    for k in range(S.n):
        s1, Jk = _theta_right_derivative(J, k)
        if s1:
            dg = S.dz(k, g)
            if dg:
                s2, JL = merge_sign(Jk, L)
                if s2:
                    v = f * dg * (pref * s1 * s2)
                    if v:
                        key = (I, JL)
                        out[key] = out[key] + v if key in out else v
        s1, Lk = _theta_right_derivative(L, k)
        if s1:
            df = S.dz(k, f)
            if df:
                s2, LJ = merge_sign(Lk, J)
                if s2:
                    v = g * df * (-pref * swap * s1 * s2)
                    if v:
                        key = (I, LJ)
                        out[key] = out[key] + v if key in out else v


def schouten_bracket(a: PolyVector, b: PolyVector) -> PolyVector:
    """Extended Schouten-Nijenhuis bracket.

    [f dzbar_I ∂_J, g dzbar_K ∂_L] = (-1)^{|K|(|J|-1)} dzbar_I ∧ dzbar_K ∧ [f ∂_J, g ∂_L]
    where the polyvector bracket is
    [P, Q] = Σ_k ∂^R_{θk}P · ∂_{z_k}Q - (-1)^{(p-1)(p'-1)} ∂^R_{θk}Q · ∂_{z_k}P.
    """
    S = _poly_space(a, b)
    out = {}
    for (I, J), f in a.terms.items():
        for (K, L), g in b.terms.items():
            s, IK = merge_sign(I, K)
            if not s:
                continue
            sign = s * (-1 if (len(K) * (len(J) - 1)) % 2 else 1)
            _sn_pair(S, f, J, g, L, out, sign, IK)
    return PolyVector._raw(S, {k: v for k, v in out.items() if v})


# ---------------------------------------------------------------------------
# finite models as Dgla


@dataclass
class FiniteKsModel:
    """A finite-dimensional polyvector model written out on a monomial basis.

    ``basis`` lists PolyVectors (one per Dgla basis element); ``dgla`` uses
    ∂bar and the bracket; ``wedge`` holds product structure constants
    ``{(i, j): {k: c}}`` and ``parity`` the wedge parity p+q of each basis
    element.
    """

    space: PolyvectorSpace
    basis: list
    names: list
    dgla: Dgla
    wedge: dict
    parity: list

    def coordinates(self, x: PolyVector) -> dict:
        return _coordinates(self, x)

    def element(self, vec: dict) -> PolyVector:
        out = self.space.zero()
        for i, c in vec.items():
            out = out + self.basis[i] * c
        return out

    def delta_map(self) -> LinearMap:
        entries = {}
        for j, e in enumerate(self.basis):
            for i, c in self.coordinates(bv_delta(e)).items():
                entries[(i, j)] = c
        # Δ lowers p by one, so it raises the Lie degree q-p+1 by one
        sp = self.dgla.space
        return LinearMap(sp, sp, entries, 1)

    def kernel_delta(self) -> "KernelDeltaModel":
        return _kernel_delta(self)


def _coordinates(model: FiniteKsModel, x: PolyVector) -> dict:
    out = {}
    index = model._index
    for (I, J), f in x.terms.items():
        for m, c in f.coeffs.items():
            key = (I, J, m)
            if key not in index:
                raise StructuralError(f"term {key} lies outside the finite model")
            out[index[key]] = c
    return out


def _basis_name(S: PolyvectorSpace, I, J, m) -> str:
    parts = []
    mono = S.ring.mono_str(m)
    if mono:
        parts.append(mono)
    parts += [f"eta{i + 1}" for i in I] + [f"theta{j + 1}" for j in J]
    return "*".join(parts) if parts else "1"


def finite_ks_model(S: PolyvectorSpace) -> FiniteKsModel:
    """Write a finite chart out as a Dgla with wedge structure constants.

    The mode chart (without t variables) is finite.  For the affine chart
    only the constant-coefficient part is used, which is the translation
    invariant model of a complex torus: ∂bar and the bracket vanish there.
    """
    if S.t_names:
        raise StructuralError("finite models are built without deformation variables")
    idx_sets = [c for r in range(S.n + 1) for c in combinations(range(S.n), r)]
    if S.chart == "mode":
        monos = []

        def rec(k, prefix, left):
            if k == S.n:
                monos.append(tuple(prefix))
                return
            for e in range(left + 1):
                rec(k + 1, prefix + [e], left - e)

        rec(0, [], S.mode_order)
        monos.sort(key=lambda m: (sum(m), tuple(-e for e in m)))
    else:
        monos = [(0,) * S.ring.nvars]
    keys = []
    for m in monos:
        for J in sorted(idx_sets, key=lambda s: (len(s), s)):
            for I in sorted(idx_sets, key=lambda s: (len(s), s)):
                keys.append((I, J, m))
    # order by Lie degree, then by the listing above
    keys.sort(key=lambda k: len(k[0]) - len(k[1]))
    basis = [PolyVector(S, {(I, J): S.ring.monomial(m)}) for (I, J, m) in keys]
    names = [_basis_name(S, I, J, m) for (I, J, m) in keys]
    degrees = [len(I) - len(J) + 1 for (I, J, _) in keys]
    space = GradedVectorSpace(list(zip(names, degrees)))
    model = FiniteKsModel(S, basis, names, None, {}, [(len(I) + len(J)) % 2 for I, J, _ in keys])
    model._index = {k: i for i, k in enumerate(keys)}
    d = {}
    for i, e in enumerate(basis):
        img = _coordinates(model, dbar(e))
        if img:
            d[i] = img
    br = {}
    wedge = {}
    for i, e in enumerate(basis):
        for j in range(len(basis)):
            f = basis[j]
            if j >= i:
                img = _coordinates(model, schouten_bracket(e, f))
                if img:
                    br[(i, j)] = img
            w = _coordinates(model, pv_wedge(e, f))
            if w:
                wedge[(i, j)] = w
    model.dgla = Dgla(space, d, br)
    model.wedge = wedge
    return model


@dataclass
class KernelDeltaModel:
    """ker Δ inside a finite model, as a sub-DGLA with its inclusion."""

    ambient: FiniteKsModel
    vectors: list
    dgla: Dgla
    inclusion: ChainMap


def _kernel_delta(model: FiniteKsModel) -> KernelDeltaModel:
    L = model.dgla
    sp = L.space
    D = model.delta_map()
    vectors = []
    names = []
    for k in sp.degrees():
        src, tgt, rows = D.block(k)
        for n, z in enumerate(kernel_basis(rows, len(src))):
            vectors.append({src[j]: v for j, v in z.items()})
            names.append((f"k{k}_{n}", k))
    sub = GradedVectorSpace(names)
    # coordinates in the kernel basis by solving against the stacked vectors
    cols = vectors

    def coords(v: dict) -> dict:
        if not v:
            return {}
        rows = [dict() for _ in range(sp.dim)]
        for c, vec in enumerate(cols):
            for i, x in vec.items():
                rows[i][c] = x
        sol = solve_field(rows, len(cols), v)
        if sol is None:
            raise StructuralError("ker Δ is not closed under the operation")
        return sol

    d = {}
    br = {}
    for a, va in enumerate(vectors):
        img = coords(L.d(va))
        if img:
            d[a] = img
        for b in range(a, len(vectors)):
            img = coords(L.bracket(va, vectors[b]))
            if img:
                br[(a, b)] = img
    K = Dgla(sub, d, br)
    entries = {}
    for c, vec in enumerate(vectors):
        for i, x in vec.items():
            entries[(i, c)] = x
    inc = ChainMap(K.complex(), L.complex(), LinearMap(sub, sp, entries, 0))
    return KernelDeltaModel(model, vectors, K, inc)


# -- Tian-Todorov identity ------------------------------------------------

def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _pure_parts(a: PolyVector) -> dict:
    parts = {}
    for (I, J), f in a.terms.items():
        key = (len(J), len(I))
        parts.setdefault(key, {})[(I, J)] = f
    return {k: PolyVector._raw(a.space, v) for k, v in parts.items()}


def tt_residual(a: PolyVector, b: PolyVector, form: str = "derived") -> PolyVector:
    """LHS minus RHS of the Tian-Todorov identity, summed over bidegrees.

    ``form="displayed"`` is (-1)^q [a,b] = Δ(ab) - Δa·b - (-1)^{p+q} a·Δb.
    ``form="derived"`` is the version that holds for Δ = η^{-1} ∂ η with the
    conventions of this module:
    (-1)^{q+p'} [a,b] = Δ(ab) - (-1)^{p'} Δa·b - (-1)^q a·Δb,
    where a has bidegree (p, q) and b has (p', q').
    """
    if form not in ("displayed", "derived"):
        raise StructuralError(f"unknown Tian-Todorov form {form!r}")
    out = _poly_space(a, b).zero()
    for (p, q), x in _pure_parts(a).items():
        for (p2, _q2), y in _pure_parts(b).items():
            lhs = schouten_bracket(x, y)
            rhs = bv_delta(pv_wedge(x, y))
            if form == "displayed":
                lhs = lhs * _sign(q)
                rhs = rhs - pv_wedge(bv_delta(x), y) - pv_wedge(x, bv_delta(y)) * _sign(p + q)
            else:
                lhs = lhs * _sign(q + p2)
                rhs = (rhs - pv_wedge(bv_delta(x), y) * _sign(p2)
                       - pv_wedge(x, bv_delta(y)) * _sign(q))
            out = out + lhs - rhs
    return out


@dataclass
class TtAudit:
    n: int
    checked: int
    displayed_failures: int
    derived_failures: int
    counterexample: tuple | None  # (a, b, residual) for the displayed form
    failing_bidegrees: list

    @property
    def ok(self) -> bool:
        return self.displayed_failures == 0 and self.derived_failures == 0


def _small_terms(S: PolyvectorSpace, max_p: int, max_q: int):
    """Monomial terms of coefficient degree at most one, smallest first."""
    idx = range(S.n)
    coeffs = [S.ring.one()] + [S.ring.var(name) for name in S.func_names]
    out = []
    for size in range(max_p + max_q + 2):
        for p in range(min(max_p, S.n) + 1):
            for q in range(min(max_q, S.n) + 1):
                for f in coeffs:
                    deg = 0 if f == 1 else 1
                    if p + q + deg != size:
                        continue
                    for I in combinations(idx, q):
                        for J in combinations(idx, p):
                            out.append(PolyVector(S, {(I, J): f}))
    return out


def tt_audit(n: int = 2, max_p: int = 2, max_q: int = 1) -> TtAudit:
    """Check both forms of the identity on all pairs of small monomial terms.

    The first failing pair, in order of increasing size, is returned as the
    minimal counterexample for the displayed form.
    """
    S = PolyvectorSpace(n, t_names=())
    terms = _small_terms(S, max_p, max_q)
    checked = bad_displayed = bad_derived = 0
    example = None
    failing = set()
    pairs = sorted(((x, y) for x in terms for y in terms),
                   key=lambda xy: _term_size(xy[0]) + _term_size(xy[1]))
    for x, y in pairs:
        checked += 1
        r = tt_residual(x, y, "displayed")
        if r:
            bad_displayed += 1
            (px, qx), = _pure_parts(x).keys()
            (py, qy), = _pure_parts(y).keys()
            failing.add((px, qx, py, qy))
            if example is None:
                example = (x, y, r)
        if tt_residual(x, y, "derived"):
            bad_derived += 1
    return TtAudit(n, checked, bad_displayed, bad_derived, example, sorted(failing))


def _term_size(x: PolyVector) -> int:
    (I, J), f = next(iter(x.terms.items()))
    m = next(iter(f.coeffs))
    return len(I) + len(J) + sum(m)
