"""Almost complex structures on R^2n given by polynomial matrices.

Real coordinates are interleaved as x1, y1, ..., xn, yn and the standard
structure J0 sends ∂x_k to ∂y_k.  With ∂z = (∂x - i∂y)/2 and
∂zbar = (∂x + i∂y)/2, the antiholomorphic tangent space of J is ker(J + i).
A family carries extra variables t, truncated at a fixed total order, so
every matrix with an invertible constant part is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, StructuralError
from .poly import Poly, PolyRing
from .polyvector import PolyVector, PolyvectorSpace
from .scalars import I, ExactScalar, scalar

__all__ = [
    "real_ring",
    "AlmostComplexFamily",
    "standard_structure",
    "family_from_encoding",
    "nonintegrable_family",
    "lie_bracket",
    "nijenhuis_tensor",
    "nijenhuis_order",
    "encoding_map",
    "torus_family",
    "IntegrabilityReport",
    "integrability_crosscheck",
]

HALF = ExactScalar(1) / 2


def real_ring(n: int, t_names=("t",), t_order: int = 0) -> PolyRing:
    names = []
    for k in range(1, n + 1):
        names += [f"x{k}", f"y{k}"]
    t_names = tuple(t_names)
    truncs = [(t_names, t_order)] if t_names else []
    return PolyRing(names + list(t_names), truncs)


# -- small matrix helpers over a local ring ----------------------------------

def _matmul(A, B):
    ring_zero = A[0][0].ring.zero()
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = ring_zero
            for k, a in enumerate(row):
                if a and B[k][j]:
                    acc = acc + a * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def _matvec(A, v):
    out = []
    for row in A:
        acc = row[0].ring.zero()
        for a, x in zip(row, v):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return out


def _identity(ring, m, c=1):
    return [[ring.constant(c if i == j else 0) for j in range(m)] for i in range(m)]


def _solve_local(M, rhs):
    """Solve M X = rhs (rhs a list of columns) with unit pivots."""
    m = len(M)
    A = [list(M[i]) + [col[i] for col in rhs] for i in range(m)]
    for c in range(m):
        piv = next((r for r in range(c, m) if A[r][c].is_unit()), None)
        if piv is None:
            raise PreconditionError("order-zero block is singular", witness=c)
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for r in range(m):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [[A[i][m + j] for i in range(m)] for j in range(len(rhs))]


def _inverse(M):
    ring = M[0][0].ring
    cols = _solve_local(M, [[ring.constant(1 if i == j else 0) for i in range(len(M))]
                            for j in range(len(M))])
    return [[cols[j][i] for j in range(len(M))] for i in range(len(M))]


# -- the family ---------------------------------------------------------------

class AlmostComplexFamily:
    """J_t as a 2n x 2n matrix of polynomials in x, y and t.

    Column j of the matrix is J applied to the j-th coordinate field.
    """

    def __init__(self, n: int, matrix, ring: PolyRing | None = None, check: bool = True):
        self.n = n
        self.ring = ring or real_ring(n)
        m = 2 * n
        if len(matrix) != m or any(len(row) != m for row in matrix):
            raise StructuralError(f"J must be {m}x{m}")
        self.matrix = [[self._poly(e) for e in row] for row in matrix]
        if check:
            self.check()

    def _poly(self, e) -> Poly:
        if isinstance(e, Poly):
            if e.ring != self.ring:
                raise StructuralError("matrix entry from another ring")
            return e
        if isinstance(e, str):
            return self.ring.parse(e)
        return self.ring.constant(e)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def t_names(self):
        if not self.ring.truncations:
            return ()
        return tuple(self.ring.names[i] for i in self.ring.truncations[0][0])

    @property
    def t_order(self) -> int:
        return self.ring.truncations[0][1] if self.ring.truncations else 0

    def square_defect(self):
        """J^2 + 1, which must vanish."""
        sq = _matmul(self.matrix, self.matrix)
        for k in range(self.dim):
            sq[k][k] = sq[k][k] + 1
        return sq

    def check(self):
        sq = self.square_defect()
        if any(e for row in sq for e in row):
            raise PreconditionError("J^2 != -1", witness=sq)

    def apply(self, X):
        return _matvec(self.matrix, X)

    def at_zero(self):
        """Entries with every t set to zero."""
        t_idx = [self.ring.index(t) for t in self.t_names]
        return [[Poly._raw(self.ring, {m: c for m, c in e.coeffs.items()
                                       if not any(m[i] for i in t_idx)})
                 for e in row] for row in self.matrix]

    def is_standard_at_zero(self) -> bool:
        return self.at_zero() == _standard_matrix(self.ring, self.n)

    def __eq__(self, other):
        return isinstance(other, AlmostComplexFamily) and self.matrix == other.matrix

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(e) for e in row) + "]"
                                 for row in self.matrix) + "]"


def _standard_matrix(ring, n):
    M = [[ring.zero() for _ in range(2 * n)] for _ in range(2 * n)]
    for k in range(n):
        M[2 * k + 1][2 * k] = ring.one()
        M[2 * k][2 * k + 1] = ring.constant(-1)
    return M


def standard_structure(n: int, t_names=("t",), t_order: int = 0) -> AlmostComplexFamily:
    ring = real_ring(n, t_names, t_order)
    return AlmostComplexFamily(n, _standard_matrix(ring, n), ring)


# -- complex frames ----------------------------------------------------------

def _dz_real(ring, n, k):
    """Real components of ∂z_k."""
    v = [ring.zero() for _ in range(2 * n)]
    v[2 * k] = ring.constant(HALF)
    v[2 * k + 1] = ring.constant(-HALF * I)
    return v


def _dzb_real(ring, n, k):
    v = [ring.zero() for _ in range(2 * n)]
    v[2 * k] = ring.constant(HALF)
    v[2 * k + 1] = ring.constant(HALF * I)
    return v


def _complex_components(v, n):
    """Split a real-basis vector into its ∂z and ∂zbar coordinates."""
    a = [(v[2 * k] + v[2 * k + 1] * I) * HALF for k in range(n)]
    b = [(v[2 * k] - v[2 * k + 1] * I) * HALF for k in range(n)]
    return a, b


def _z_images(S: PolyvectorSpace, real: PolyRing):
    """x_k, y_k written in z, zbar (and t unchanged)."""
    images = {}
    for k in range(1, S.n + 1):
        z, zb = S.ring.var(f"z{k}"), S.ring.var(f"zb{k}")
        images[f"x{k}"] = (z + zb) * HALF
        images[f"y{k}"] = (z - zb) * (-HALF * I)
    return images


def _real_images(S: PolyvectorSpace, real: PolyRing):
    images = {}
    for k in range(1, S.n + 1):
        x, y = real.var(f"x{k}"), real.var(f"y{k}")
        images[f"z{k}"] = x + y * I
        images[f"zb{k}"] = x - y * I
    return images


def _conj(f: Poly) -> Poly:
    return f.map_coeffs(lambda c: c.conjugate())


def family_from_encoding(phi: PolyVector) -> AlmostComplexFamily:
    """The structure whose (0,1) space is spanned by ∂zbar_k + phi(∂zbar_k).

    phi must be a (1,1) polyvector on an affine chart.  The (1,0) space is the
    complex conjugate, and J = P diag(i, -i) P^-1.
    """
    S = phi.space
    if S.chart != "affine":
        raise StructuralError("family_from_encoding needs the affine chart")
    if any(len(I_) != 1 or len(J) != 1 for (I_, J) in phi.terms):
        raise StructuralError("encoding map must have bidegree (1,1)")
    n = S.n
    real = real_ring(n, S.t_names, S.t_order)
    to_real = _real_images(S, real)
    cols01 = []
    for k in range(n):
        v = _dzb_real(real, n, k)
        for l in range(n):
            c = phi.terms.get(((k,), (l,)))
            if c is None:
                continue
            c = c.substitute(to_real, real)
            v = [a + c * b for a, b in zip(v, _dz_real(real, n, l))]
        cols01.append(v)
    cols10 = [[_conj(e) for e in v] for v in cols01]
    cols = cols10 + cols01
    P = [[cols[j][i] for j in range(2 * n)] for i in range(2 * n)]
    D = [[real.constant((I if i < n else -I) if i == j else 0) for j in range(2 * n)]
         for i in range(2 * n)]
    J = _matmul(_matmul(P, D), _inverse(P))
    return AlmostComplexFamily(n, J, real)


def nonintegrable_family(t_order: int = 2) -> AlmostComplexFamily:
    """Four-dimensional family from phi_t = t (z2 dzbar1⊗∂1 + z1 dzbar2⊗∂2).

    phi_1 is ∂bar-closed but [phi_1, phi_1] does not vanish, so the family is
    integrable to first order and fails at order two.
    """
    S = PolyvectorSpace(2, t_order=t_order)
    phi = S.term((0,), (0,), "t*z2") + S.term((1,), (1,), "t*z1")
    return family_from_encoding(phi)


# -- Nijenhuis tensor ---------------------------------------------------------

def lie_bracket(ring: PolyRing, X, Y):
    """[X, Y] of vector fields given by real components."""
    m = len(X)
    names = ring.names[:m]
    out = []
    for i in range(m):
        acc = ring.zero()
        for j in range(m):
            if X[j]:
                acc = acc + X[j] * Y[i].derive(names[j])
            if Y[j]:
                acc = acc - Y[j] * X[i].derive(names[j])
        out.append(acc)
    return out


def nijenhuis_tensor(J: AlmostComplexFamily, X, Y):
    """N(X,Y) = [X,Y] + J([JX,Y] + [X,JY]) - [JX,JY]."""
    J.check()
    ring = J.ring
    X = [J._poly(e) for e in X]
    Y = [J._poly(e) for e in Y]
    if len(X) != J.dim or len(Y) != J.dim:
        raise StructuralError(f"vector fields must have {J.dim} components")
    JX, JY = J.apply(X), J.apply(Y)
    inner = [a + b for a, b in zip(lie_bracket(ring, JX, Y), lie_bracket(ring, X, JY))]
    return [a + b - c for a, b, c in zip(lie_bracket(ring, X, Y), J.apply(inner),
                                         lie_bracket(ring, JX, JY))]


def _coordinate_field(ring, m, k):
    return [ring.constant(1 if j == k else 0) for j in range(m)]


def nijenhuis_order(J: AlmostComplexFamily):
    """Lowest t-order at which N_J is nonzero on a coordinate pair, or None."""
    ring = J.ring
    lowest = None
    for a in range(J.dim):
        for b in range(a + 1, J.dim):
            N = nijenhuis_tensor(J, _coordinate_field(ring, J.dim, a),
                                 _coordinate_field(ring, J.dim, b))
            for e in N:
                o = _min_t_order(e, J)
                if o is not None and (lowest is None or o < lowest):
                    lowest = o
    return lowest


def _min_t_order(f: Poly, J: AlmostComplexFamily):
    if not f:
        return None
    if not J.ring.truncations:
        return 0
    return min(J.ring.group_order(m) for m in f.coeffs)


# -- encoding map -------------------------------------------------------------

def encoding_map(J: AlmostComplexFamily, space: PolyvectorSpace | None = None) -> PolyVector:
    """phi_t with (1 + phi_t)(T^{0,1}) = ker(J_t + i).

    For each k the vector ∂zbar_k + Σ_l phi_k^l ∂z_l must be killed by J + i.
    The ∂z coordinates of that condition form a linear system whose matrix
    is 2i at t = 0; the remaining coordinates are checked afterwards.
    """
    J.check()
    if not J.is_standard_at_zero():
        raise PreconditionError("J_0 is not the standard structure")
    n, ring = J.n, J.ring
    if space is None:
        space = PolyvectorSpace(n, t_names=J.t_names, t_order=J.t_order)
    Jp = [[e + (I if i == j else 0) for j, e in enumerate(row)]
          for i, row in enumerate(J.matrix)]
    images_dz = [_complex_components(_matvec(Jp, _dz_real(ring, n, l)), n)
                 for l in range(n)]
    M = [[images_dz[l][0][r] for l in range(n)] for r in range(n)]
    rhs, rest = [], []
    for k in range(n):
        a, b = _complex_components(_matvec(Jp, _dzb_real(ring, n, k)), n)
        rhs.append([-x for x in a])
        rest.append(b)
    sols = _solve_local(M, rhs)
    for k in range(n):
        for r in range(n):
            val = rest[k][r]
            for l in range(n):
                val = val + images_dz[l][1][r] * sols[k][l]
            if val:
                raise PreconditionError("ker(J + i) is not a graph over T^{0,1}", witness=val)
    to_z = _z_images(space, ring)
    phi = space.zero()
    for k in range(n):
        for l in range(n):
            c = sols[k][l]
            if c:
                phi = phi + PolyVector(space, {((k,), (l,)): c.substitute(to_z, space.ring)})
    return phi


# -- torus ----------------------------------------------------------------------

def torus_family(tau, t_order: int | None = None, t_name: str = "t") -> AlmostComplexFamily:
    """J_t = Df · Jbar_t · Df^{-1} for the lattice Z + Z tau(t).

    ``tau`` is a list of coefficients [tau_0, tau_1, ...] or a Poly in t.
    With R = Re tau and I = Im tau this is
    [[-R/I, -I - R^2/I], [1/I, R/I]].
    """
    if isinstance(tau, Poly):
        if tau.ring.nvars != 1:
            raise StructuralError("tau must be a series in one variable")
        coeffs = {}
        for m, c in tau.coeffs.items():
            coeffs[m[0]] = c
        top = max(coeffs, default=0)
        tau = [coeffs.get(k, 0) for k in range(top + 1)]
    tau = [scalar(c) for c in tau] or [scalar(0)]
    if t_order is None:
        t_order = max(len(tau) - 1, 1)
    ring = real_ring(1, (t_name,), t_order)
    t = ring.var(t_name)
    R = ring.zero()
    Im = ring.zero()
    for k, c in enumerate(tau):
        R = R + t ** k * c.re
        Im = Im + t ** k * c.im
    if tau[0].im != 1:
        raise PreconditionError("Im tau(0) must be 1", witness=tau[0])
    Ii = Im.inverse()
    matrix = [[-R * Ii, -Im - R * R * Ii], [Ii, R * Ii]]
    return AlmostComplexFamily(1, matrix, ring)


def torus_df(tau, t_order: int | None = None, t_name: str = "t"):
    """Df = [[1, -R/I], [0, 1/I]] and Jbar = [[0, -1], [1, 0]] for checks."""
    fam = torus_family(tau, t_order, t_name)
    ring = fam.ring
    Ii = fam.matrix[1][0]
    R_over_I = fam.matrix[1][1]
    Df = [[ring.one(), -R_over_I], [ring.zero(), Ii]]
    return Df, _standard_matrix(ring, 1)


# -- integrability ---------------------------------------------------------------

@dataclass
class IntegrabilityReport:
    phi: PolyVector
    nijenhuis_order: int | None   # lowest order where N != 0
    mc_order: int | None          # lowest order where the MC residual != 0
    max_order: int

    @property
    def nijenhuis_ok(self) -> bool:
        return self.nijenhuis_order is None

    @property
    def mc_ok(self) -> bool:
        return self.mc_order is None

    @property
    def agree(self) -> bool:
        return self.nijenhuis_order == self.mc_order

    def describe(self) -> str:
        def verdict(o):
            return "vanishes" if o is None else f"fails at order {o}"
        return (f"Nijenhuis tensor {verdict(self.nijenhuis_order)}; "
                f"Maurer-Cartan {verdict(self.mc_order)}; "
                f"{'agree' if self.agree else 'DISAGREE'} (to order {self.max_order})")


def integrability_crosscheck(J: AlmostComplexFamily, order: int | None = None) -> IntegrabilityReport:
    from .mc import mc_residual

    if order is not None and order > J.t_order:
        raise StructuralError(f"order {order} exceeds the truncation {J.t_order}")
    max_order = J.t_order if order is None else order
    phi = encoding_map(J)
    n_order = nijenhuis_order(J)
    res = mc_residual(phi) if phi else phi
    m_order = res.low_t_order() if res else None
    if n_order is not None and n_order > max_order:
        n_order = None
    if m_order is not None and m_order > max_order:
        m_order = None
    return IntegrabilityReport(phi, n_order, m_order, max_order)
