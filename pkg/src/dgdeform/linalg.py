"""Graded vector spaces, sparse exact matrices, complexes and their cohomology.

Vectors are sparse dicts ``{basis index: value}``.  Matrices are lists of such
dicts (one per row).  Pivots are always chosen in basis order so every
computed basis is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import PreconditionError, StructuralError
from .scalars import ExactScalar, ZERO, scalar

__all__ = [
    "GradedVectorSpace",
    "LinearMap",
    "CochainComplex",
    "ChainMap",
    "CohomologyBasis",
    "QuasiIsoReport",
    "Contraction",
    "rref",
    "rank",
    "kernel_basis",
    "solve_field",
    "solve_linear",
    "cohomology_basis",
    "check_quasi_iso",
    "vec_add",
    "vec_scale",
    "vec_sub",
]


# ---------------------------------------------------------------------------
# sparse vector helpers


def vec_add(u: dict, v: dict, c=None) -> dict:
    """Return u + c*v (c defaults to 1)."""
    out = dict(u)
    for k, x in v.items():
        if c is not None:
            x = c * x
        y = out.get(k)
        y = x if y is None else y + x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vec_sub(u: dict, v: dict) -> dict:
    return vec_add(u, v, -1)


def vec_scale(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items() if c * x}


# ---------------------------------------------------------------------------
# field elimination


def rref(rows: Sequence[dict], ncols: int | None = None):
    """Reduced row echelon form over the base field.

    Returns ``(rows, pivots)`` where ``rows[i]`` has a 1 in column
    ``pivots[i]`` and zeros in every other pivot column.
    """
    work = [{k: scalar(v) for k, v in r.items() if v} for r in rows]
    work = [r for r in work if r]
    out_rows: list[dict] = []
    pivots: list[int] = []
    while work:
        col = min(min(r) for r in work)
        idx = next(i for i, r in enumerate(work) if col in r)
        prow = work.pop(idx)
        inv = prow[col].inverse()
        prow = {k: v * inv for k, v in prow.items()}
        new_work = []
        for r in work:
            c = r.get(col)
            if c is not None:
                r = vec_add(r, prow, -c)
            if r:
                new_work.append(r)
        work = new_work
        for i, r in enumerate(out_rows):
            c = r.get(col)
            if c is not None:
                out_rows[i] = vec_add(r, prow, -c)
        out_rows.append(prow)
        pivots.append(col)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [out_rows[i] for i in order], [pivots[i] for i in order]


def rank(rows: Sequence[dict]) -> int:
    return len(rref(rows)[1])


def kernel_basis(rows: Sequence[dict], ncols: int) -> list[dict]:
    """Basis of {x : Mx = 0}, one vector per free column."""
    rr, piv = rref(rows, ncols)
    pivset = set(piv)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = {free: ExactScalar(1)}
        for r, p in zip(rr, piv):
            c = r.get(free)
            if c:
                v[p] = -c
        basis.append(v)
    return basis


def solve_field(rows: Sequence[dict], ncols: int, rhs: dict):
    """Some x with Mx = rhs (free variables set to zero), or None."""
    aug = []
    n = len(rows)
    for i in range(n):
        r = {k: scalar(v) for k, v in rows[i].items() if v}
        b = rhs.get(i)
        if b:
            r[ncols] = scalar(b)
        aug.append(r)
    for i in rhs:
        if i >= n and rhs[i]:
            return None
    rr, piv = rref(aug, ncols + 1)
    x = {}
    for r, p in zip(rr, piv):
        if p == ncols:
            return None
        b = r.get(ncols)
        if b:
            x[p] = b
    return x


def transpose(rows: Sequence[dict], ncols: int) -> list[dict]:
    cols = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, v in r.items():
            cols[j][i] = v
    return cols


def mat_vec(rows: Sequence[dict], v: dict) -> dict:
    out = {}
    for i, r in enumerate(rows):
        acc = None
        for j, x in v.items():
            a = r.get(j)
            if a is not None:
                acc = a * x if acc is None else acc + a * x
        if acc:
            out[i] = acc
    return out


# ---------------------------------------------------------------------------
# local ring elimination


def _ring_is_unit(x) -> bool:
    if isinstance(x, ExactScalar):
        return bool(x)
    return x.is_unit()


def _ring_inv(x):
    if isinstance(x, ExactScalar):
        return x.inverse()
    return x.inverse()


def _solve_local(rows: Sequence[dict], ncols: int, rhs: dict, one):
    """Unit-pivot elimination over a local ring with nilpotent maximal ideal.

    Pivots are taken only on units (nonzero constant term).  What is left
    after all unit pivots is a block with entries in the maximal ideal; it is
    solved by expanding over the coefficient basis when the ring is finite
    dimensional.
    """
    nrows = len(rows)
    work = [dict((k, v) for k, v in r.items() if v) for r in rows]
    b = [rhs.get(i, one * 0) for i in range(nrows)]
    for i in rhs:
        if i >= nrows and rhs[i]:
            return None
    pivot_of_row = {}
    used = set()
    for col in range(ncols):
        r = next((i for i in range(nrows) if i not in used and col in work[i]
                  and _ring_is_unit(work[i][col])), None)
        if r is None:
            continue
        inv = _ring_inv(work[r][col])
        work[r] = {k: inv * v for k, v in work[r].items()}
        work[r] = {k: v for k, v in work[r].items() if v}
        b[r] = inv * b[r]
        for i in range(nrows):
            if i == r:
                continue
            c = work[i].get(col)
            if c is None:
                continue
            for k, v in work[r].items():
                nv = work[i].get(k)
                nv = -(c * v) if nv is None else nv - c * v
                if nv:
                    work[i][k] = nv
                else:
                    work[i].pop(k, None)
            b[i] = b[i] - c * b[r]
        used.add(r)
        pivot_of_row[r] = col
    rest_rows = [i for i in range(nrows) if i not in used]
    pivot_cols = set(pivot_of_row.values())
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    residual_nonzero = any(work[i].get(c) for i in rest_rows for c in free_cols)
    y = {}
    if not residual_nonzero:
        if any(b[i] for i in rest_rows):
            return None
    else:
        y = _solve_expanded([work[i] for i in rest_rows], free_cols,
                            [b[i] for i in rest_rows], one)
        if y is None:
            return None
    x = {}
    for r, col in pivot_of_row.items():
        val = b[r]
        for c, yc in y.items():
            a = work[r].get(c)
            if a is not None:
                val = val - a * yc
        if val:
            x[col] = val
    for c, yc in y.items():
        if yc:
            x[c] = yc
    return x


def _solve_expanded(rows, cols, rhs, one):
    """Solve a ring-valued system by expanding every unknown over the ring basis."""
    alg = getattr(one, "algebra", None)
    if alg is None or not hasattr(alg, "basis"):
        raise PreconditionError("no unit pivot available and the ring is not finite dimensional")
    mbasis = alg.basis()
    mindex = {m: k for k, m in enumerate(mbasis)}
    nb = len(mbasis)
    big_rows = {}
    for i, r in enumerate(rows):
        for jpos, c in enumerate(cols):
            a = r.get(c)
            if not a:
                continue
            for k, m in enumerate(mbasis):
                prod = a * alg.monomial(m)
                for m2, v in prod.coeffs.items():
                    key = i * nb + mindex[m2]
                    big_rows.setdefault(key, {})[jpos * nb + k] = v
    nrows = len(rows) * nb
    mat = [big_rows.get(i, {}) for i in range(nrows)]
    vec = {}
    for i, bi in enumerate(rhs):
        for m2, v in bi.coeffs.items():
            vec[i * nb + mindex[m2]] = v
    sol = solve_field(mat, len(cols) * nb, vec)
    if sol is None:
        return None
    y = {}
    for key, v in sol.items():
        jpos, k = divmod(key, nb)
        c = cols[jpos]
        y[c] = y.get(c, one * 0) + alg.monomial(mbasis[k], v)
    return {c: v for c, v in y.items() if v}


# ---------------------------------------------------------------------------
# graded spaces, maps and complexes


class GradedVectorSpace:
    """Finite basis of named, Z-graded vectors."""

    def __init__(self, basis: Sequence):
        items = []
        for b in basis:
            if isinstance(b, dict):
                items.append((str(b["name"]), int(b["degree"])))
            else:
                name, deg = b
                items.append((str(name), int(deg)))
        names = [n for n, _ in items]
        if len(set(names)) != len(names):
            raise StructuralError(f"basis names must be unique: {names}")
        self.basis = tuple(items)
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, GradedVectorSpace) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"GradedVectorSpace({list(self.basis)})"

    def name(self, i: int) -> str:
        return self.basis[i][0]

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"unknown basis element {name!r}") from None

    def indices(self, k: int) -> list[int]:
        return [i for i, (_, d) in enumerate(self.basis) if d == k]

    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.basis})

    def vector(self, entries) -> dict:
        """Build a sparse vector from ``{name or index: coeff}``."""
        out = {}
        for k, v in dict(entries).items():
            i = self.index(k) if isinstance(k, str) else int(k)
            v = scalar(v)
            if v:
                out[i] = v
        return out


class LinearMap:
    """Sparse matrix between graded spaces with a fixed degree shift.

    ``entries`` maps ``(target index, source index)`` to an ExactScalar or to
    an element of a local ring.
    """

    def __init__(self, source: GradedVectorSpace, target: GradedVectorSpace,
                 entries: dict, shift: int = 0):
        self.source = source
        self.target = target
        self.shift = int(shift)
        clean = {}
        for (r, c), v in dict(entries).items():
            if isinstance(v, (int, str)) or hasattr(v, "denominator"):
                v = scalar(v)
            if not v:
                continue
            if not (0 <= r < target.dim and 0 <= c < source.dim):
                raise StructuralError(f"entry {(r, c)} out of range")
            if target.degree(r) - source.degree(c) != self.shift:
                raise StructuralError(
                    f"entry {target.name(r)} <- {source.name(c)} breaks degree shift {self.shift}"
                )
            clean[(r, c)] = v
        self.entries = clean
        rows = [dict() for _ in range(target.dim)]
        for (r, c), v in clean.items():
            rows[r][c] = v
        self._rows = rows

    def rows(self) -> list[dict]:
        return [dict(r) for r in self._rows]

    def apply(self, v: dict) -> dict:
        return mat_vec(self._rows, v)

    def __call__(self, v: dict) -> dict:
        return self.apply(v)

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self ∘ other."""
        if other.target != self.source:
            raise StructuralError("cannot compose: spaces differ")
        entries = {}
        cols = transpose(other._rows, other.source.dim)
        for r, row in enumerate(self._rows):
            for c, col in enumerate(cols):
                acc = None
                for k, a in row.items():
                    b = col.get(k)
                    if b is not None:
                        acc = a * b if acc is None else acc + a * b
                if acc:
                    entries[(r, c)] = acc
        return LinearMap(other.source, self.target, entries, self.shift + other.shift)

    def block(self, k: int):
        """Rows/columns restricted to source degree k (and target degree k+shift)."""
        src = self.source.indices(k)
        tgt = self.target.indices(k + self.shift)
        spos = {j: n for n, j in enumerate(src)}
        rows = []
        for i in tgt:
            rows.append({spos[j]: v for j, v in self._rows[i].items() if j in spos})
        return src, tgt, rows

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, LinearMap) and self.source == other.source
                and self.target == other.target and self.entries == other.entries)

    def __repr__(self):
        return f"LinearMap(shift={self.shift}, nnz={len(self.entries)})"


def solve_linear(M: LinearMap, v) -> dict | None:
    """Return some x with Mx = v, or None when v is not in the image.

    Over the base field this is row reduction.  Over a local truncated ring
    the elimination pivots only on units.
    """
    if not isinstance(v, dict):
        v = {i: x for i, x in enumerate(v) if x}
    for i in v:
        if not (0 <= i < M.target.dim):
            raise StructuralError(f"vector index {i} outside the target space")
    values = list(M.entries.values()) + [x for x in v.values() if x]
    ring_vals = [x for x in values if not isinstance(x, ExactScalar)]
    if not ring_vals:
        return solve_field(M._rows, M.source.dim, v)
    one = ring_vals[0].algebra.one() if hasattr(ring_vals[0], "algebra") else ring_vals[0] * 0 + 1
    rows = [{c: (x if not isinstance(x, ExactScalar) else one * x) for c, x in r.items()}
            for r in M._rows]
    rhs = {i: (x if not isinstance(x, ExactScalar) else one * x) for i, x in v.items()}
    return _solve_local(rows, M.source.dim, rhs, one)


class CochainComplex:
    """A graded space with a degree +1 differential squaring to zero."""

    def __init__(self, space: GradedVectorSpace, d: LinearMap):
        if d.shift != 1 or d.source != space or d.target != space:
            raise StructuralError("differential must be an endomorphism of degree +1")
        self.space = space
        self.d = d
        dd = d.compose(d)
        if dd.entries:
            (r, c), val = min(dd.entries.items())
            raise PreconditionError(
                f"d∘d != 0: coefficient {val} of {space.name(r)} in dd({space.name(c)})",
                witness=(space.name(c), space.name(r), val),
            )
        self._cache = {}

    @classmethod
    def from_blocks(cls, dims: dict, blocks: dict, prefix="e"):
        """Build from ``{degree: dim}`` and ``{degree: rows}`` of d^k."""
        basis = []
        offset = {}
        for k in sorted(dims):
            offset[k] = len(basis)
            basis += [(f"{prefix}{k}_{j}", k) for j in range(dims[k])]
        space = GradedVectorSpace(basis)
        entries = {}
        for k, rows in blocks.items():
            for i, r in enumerate(rows):
                for j, val in (r.items() if isinstance(r, dict) else enumerate(r)):
                    if val:
                        entries[(offset[k + 1] + i, offset[k] + j)] = val
        return cls(space, LinearMap(space, space, entries, 1))

    def block(self, k: int):
        return self.d.block(k)

    def cohomology(self, k: int) -> "CohomologyBasis":
        if k not in self._cache:
            self._cache[k] = _cohomology(self, k)
        return self._cache[k]

    def betti(self) -> dict:
        return {k: len(self.cohomology(k).representatives) for k in self.space.degrees()}

    def is_closed(self, v: dict) -> bool:
        return not self.d.apply(v)


@dataclass
class CohomologyBasis:
    """Representatives of H^k plus the data needed to project closed vectors."""

    complex: CochainComplex
    degree: int
    representatives: list
    boundary_rows: list = field(repr=False)
    boundary_pivots: list = field(repr=False)
    rep_pivots: list = field(repr=False)
    cocycle_dim: int = 0
    boundary_dim: int = 0

    def __len__(self):
        return len(self.representatives)

    def reduce(self, v: dict) -> dict:
        """Remove the boundary component along the echelon basis of im d."""
        v = dict(v)
        for r, p in zip(self.boundary_rows, self.boundary_pivots):
            c = v.get(p)
            if c:
                v = vec_add(v, r, -c)
        return v

    def project(self, v: dict) -> list:
        """Coordinates of the class of a closed vector."""
        C = self.complex
        for i in v:
            if C.space.degree(i) != self.degree and v[i]:
                raise PreconditionError(f"vector has a component outside degree {self.degree}")
        dv = C.d.apply(v)
        if dv:
            raise PreconditionError("projection of a non-closed element", witness=dv)
        red = self.reduce(v)
        coords = [red.get(p, ZERO) for p in self.rep_pivots]
        check = {}
        for c, r in zip(coords, self.representatives):
            check = vec_add(check, r, c)
        if check != red:
            raise AssertionError("cohomology projection inconsistent")
        return coords

    def include(self, coords) -> dict:
        out = {}
        for c, r in zip(coords, self.representatives):
            if c:
                out = vec_add(out, r, c)
        return out


def _cohomology(C: CochainComplex, k: int) -> CohomologyBasis:
    idx_k = C.space.indices(k)
    pos = {j: n for n, j in enumerate(idx_k)}
    # cocycles
    _, _, rows_k = C.d.block(k)
    Z_local = kernel_basis(rows_k, len(idx_k))
    Z = [{idx_k[j]: v for j, v in z.items()} for z in Z_local]
    # boundaries: images of degree k-1 basis vectors
    src = C.space.indices(k - 1)
    images = [C.d.apply({j: ExactScalar(1)}) for j in src]
    brows, bpiv = rref(images)
    reps = []
    for z in Z:
        red = dict(z)
        for r, p in zip(brows, bpiv):
            c = red.get(p)
            if c:
                red = vec_add(red, r, -c)
        if red:
            reps.append(red)
    hrows, hpiv = rref(reps)
    _ = pos
    return CohomologyBasis(C, k, hrows, brows, bpiv, hpiv, len(Z), len(brows))


def cohomology_basis(C: CochainComplex, k: int):
    """Return ``(representatives, projection)`` for H^k(C)."""
    H = C.cohomology(k)
    return H.representatives, H.project


# ---------------------------------------------------------------------------
# contraction onto cohomology (used by the perturbation lemma)


class Contraction:
    """Splitting C^k = B^k + H^k + S^k with S^k a complement of the cocycles.

    ``p`` projects to cohomology coordinates, ``i`` includes representatives
    and ``h`` inverts d from B^{k+1} back to S^k.  These satisfy
    ``dh + hd = 1 - ip`` together with ``hi = 0``, ``ph = 0`` and ``hh = 0``.
    """

    def __init__(self, C: CochainComplex):
        self.complex = C
        sp = C.space
        self.H = {}
        self._S = {}
        self._B = {}
        self._inv = {}
        self._cols = {}
        for k in sp.degrees():
            self.H[k] = C.cohomology(k)
        for k in sp.degrees():
            idx = sp.indices(k)
            _, _, rows_k = C.d.block(k)
            zl = kernel_basis(rows_k, len(idx))
            _, zpiv = rref(zl)
            zpiv_set = set(zpiv)
            self._S[k] = [{idx[j]: ExactScalar(1)} for j in range(len(idx)) if j not in zpiv_set]
        for k in sp.degrees():
            self._B[k] = [C.d.apply(s) for s in self._S.get(k - 1, [])]
        for k in sp.degrees():
            idx = sp.indices(k)
            cols = self._B[k] + list(self.H[k].representatives) + self._S[k]
            if len(cols) != len(idx):
                raise AssertionError("splitting has the wrong dimension")
            self._cols[k] = (len(self._B[k]), len(self.H[k].representatives), len(self._S[k]))
            pos = {j: n for n, j in enumerate(idx)}
            mat = [dict() for _ in idx]
            for c, vec in enumerate(cols):
                for j, v in vec.items():
                    mat[pos[j]][c] = v
            self._inv[k] = (idx, pos, _invert(mat, len(idx)))

    def coordinates(self, k: int, v: dict):
        idx, pos, inv = self._inv[k]
        local = {pos[j]: x for j, x in v.items()}
        coords = mat_vec(inv, local)
        nb, nh, ns = self._cols[k]
        b = {c: x for c, x in coords.items() if c < nb}
        h = {c - nb: x for c, x in coords.items() if nb <= c < nb + nh}
        s = {c - nb - nh: x for c, x in coords.items() if c >= nb + nh}
        return b, h, s

    def split_by_degree(self, v: dict) -> dict:
        out = {}
        for j, x in v.items():
            out.setdefault(self.complex.space.degree(j), {})[j] = x
        return out

    def p(self, v: dict) -> dict:
        """Cohomology coordinates, keyed by (degree, position)."""
        out = {}
        for k, part in self.split_by_degree(v).items():
            _, h, _ = self.coordinates(k, part)
            for c, x in h.items():
                out[(k, c)] = x
        return out

    def i(self, coords: dict) -> dict:
        out = {}
        for (k, c), x in coords.items():
            out = vec_add(out, self.H[k].representatives[c], x)
        return out

    def h(self, v: dict) -> dict:
        out = {}
        for k, part in self.split_by_degree(v).items():
            b, _, _ = self.coordinates(k, part)
            for c, x in b.items():
                out = vec_add(out, self._S[k - 1][c], x)
        return out

    def h_labels(self):
        return [(k, c) for k in sorted(self.H) for c in range(len(self.H[k].representatives))]


def _invert(mat: list, n: int) -> list:
    aug = []
    for i, r in enumerate(mat):
        row = dict(r)
        row[n + i] = ExactScalar(1)
        aug.append(row)
    rr, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise AssertionError("matrix is singular")
    return [{c - n: v for c, v in r.items() if c >= n} for r in rr[:n]]


# ---------------------------------------------------------------------------
# quasi-isomorphism check


@dataclass
class ChainMap:
    source: CochainComplex
    target: CochainComplex
    f: LinearMap


@dataclass
class QuasiIsoReport:
    chain_map: bool
    offending: str | None = None
    degrees: dict = field(default_factory=dict)

    @property
    def quasi_iso(self) -> bool:
        return self.chain_map and all(v["iso"] for v in self.degrees.values())


def check_quasi_iso(f: ChainMap) -> QuasiIsoReport:
    """Report whether f is a chain map and whether it is iso on each H^k."""
    S, T, F = f.source, f.target, f.f
    if F.shift != 0:
        raise StructuralError("a chain map has degree 0")
    for j in range(S.space.dim):
        e = {j: ExactScalar(1)}
        lhs = T.d.apply(F.apply(e))
        rhs = F.apply(S.d.apply(e))
        if lhs != rhs:
            return QuasiIsoReport(False, offending=S.space.name(j))
    degrees = {}
    for k in sorted(set(S.space.degrees()) | set(T.space.degrees())):
        HS = S.cohomology(k) if k in S.space.degrees() else None
        HT = T.cohomology(k) if k in T.space.degrees() else None
        ns = len(HS) if HS else 0
        nt = len(HT) if HT else 0
        cols = []
        if HS is not None and HT is not None:
            for rep in HS.representatives:
                cols.append({i: c for i, c in enumerate(HT.project(F.apply(rep))) if c})
        r = rank(transpose(cols, nt)) if cols else 0
        degrees[k] = {"source_dim": ns, "target_dim": nt, "rank": r, "iso": ns == nt == r}
    return QuasiIsoReport(True, degrees=degrees)
