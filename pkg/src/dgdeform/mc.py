"""Maurer-Cartan solving, gauge action, BCH and deformation-functor bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import comb, factorial

from .artin import GradedArtinAlgebra
from .dgla import Dgla, DglaOverArtin, TensorElement
from .errors import PreconditionError, StructuralError
from .linalg import kernel_basis, solve_field
from .scalars import ExactScalar, ONE, ZERO, scalar

__all__ = [
    "mc_residual",
    "McSolution",
    "ObstructionReport",
    "extend_order",
    "solve_mc",
    "bernoulli",
    "bch_product",
    "ExactMatrix",
    "MatrixLieAlgebra",
    "gauge_act",
    "gauge_equivalent",
    "AbelianFunctorBasis",
    "abelian_functor_eval",
    "tangent_space",
    "SmoothnessReport",
    "smoothness_probe",
    "DeformedCohomology",
    "deformed_cohomology",
    "HodgeTable",
    "ExtendedDims",
    "extended_moduli_dims",
]

HALF = ExactScalar(Fraction(1, 2))


def _ambient(x):
    amb = getattr(x, "ambient", None)
    if amb is None:
        raise StructuralError("element carries no ambient DGLA")
    return amb


def _require_degree(x, k: int, what: str):
    if not x:
        return
    deg = _ambient(x).degree(x)
    if deg != k:
        raise StructuralError(f"{what} must be homogeneous of degree {k}, got {deg}")


def mc_residual(x):
    """dx + ½[x, x]."""
    _require_degree(x, 1, "Maurer-Cartan input")
    amb = _ambient(x)
    return amb.d(x) + amb.bracket(x, x) * HALF


# ---------------------------------------------------------------------------
# order-by-order solving


@dataclass
class McSolution:
    ambient: DglaOverArtin
    element: TensorElement
    order: int

    def residual(self):
        return mc_residual(self.element)

    def term(self, k: int) -> TensorElement:
        return self.element.homogeneous(k)

    def __str__(self):
        return f"{self.element} (order {self.order})"


@dataclass
class ObstructionReport:
    """Failure to extend an order-k solution to order k+1.

    ``cochain`` is the order-(k+1) part of the residual; ``classes`` maps each
    monomial whose component is not exact to its coordinates in the echelon
    basis of H^(2+deg monomial).
    """

    order: int
    cochain: TensorElement
    classes: dict
    partial: McSolution | None = None

    @property
    def nonzero(self) -> bool:
        return any(any(c for c in coords) for coords in self.classes.values())

    def describe(self) -> str:
        amb = self.cochain.ambient
        parts = []
        for m, coords in sorted(self.classes.items()):
            mono = amb.algebra.monomial_str(m) or "1"
            parts.append(f"{mono}: [{', '.join(str(c) for c in coords)}]")
        return f"obstructed at order {self.order}: " + "; ".join(parts)


def _split_residual(amb: DglaOverArtin, R: TensorElement):
    """Per monomial: (closed?, H coordinates, h(R_m)) from the base contraction."""
    K = amb.base.contraction()
    out = {}
    for m, vec in R.by_monomial().items():
        deg = 2 + amb.algebra.degree(m)
        if deg not in K.H:
            # the degree is absent from L, so the component must be zero
            raise AssertionError("residual component in a degree outside L")
        b, hcoords, s = K.coordinates(deg, vec)
        out[m] = (not s, [hcoords.get(c, ZERO) for c in range(len(K.H[deg]))], K.h(vec))
    return out


def extend_order(s: McSolution):
    """Extend an order-k solution to order k+1, or report the obstruction."""
    amb = s.ambient
    k = s.order
    R = mc_residual(s.element)
    low = R.truncate(k)
    if low:
        raise PreconditionError(f"input is not Maurer-Cartan to order {k}: residual {low}",
                                witness=low)
    if k + 1 > amb.algebra.truncation:
        return McSolution(amb, s.element, k + 1)
    Rk = R.homogeneous(k + 1)
    parts = _split_residual(amb, Rk)
    classes = {}
    correction = {}
    for m, (closed, hcoords, hR) in parts.items():
        if not closed:
            raise AssertionError(
                "obstruction cochain is not closed; the input violates the DGLA axioms"
            )
        if any(hcoords):
            classes[m] = hcoords
        else:
            correction[m] = {i: -c for i, c in hR.items()}
    if classes:
        return ObstructionReport(k + 1, Rk, classes, s)
    phi = s.element + amb.from_monomial_vectors(correction)
    return McSolution(amb, phi, k + 1)


def _seed_element(amb: DglaOverArtin, seed, var):
    L = amb.base
    A = amb.algebra
    if isinstance(seed, TensorElement):
        return seed
    if var is None:
        var = A.variables[0].name
    j = A.variables[A.index(var)].degree
    deg = 1 + j
    if isinstance(seed, (list, tuple)):
        H = L.complex().cohomology(deg)
        if len(seed) != len(H.representatives):
            raise StructuralError(f"seed needs {len(H.representatives)} coordinates")
        vec = H.include([scalar(c) for c in seed])
    else:
        if isinstance(seed, (str, int)):
            seed = {seed: 1}
        vec = L.vector(seed)
    for i in vec:
        if L.space.degree(i) != deg:
            raise PreconditionError(f"seed must lie in degree {deg}")
    if L.d(vec):
        raise PreconditionError("seed is not closed", witness=L.format_vector(L.d(vec)))
    return amb.tensor(vec, A.gen(var))


def solve_mc(L: Dgla, A: GradedArtinAlgebra, seed, max_order: int, var: str | None = None):
    """Integrate a first-order class order by order.

    ``seed`` is a coordinate list in the echelon H^1 basis, a closed vector
    (dict or basis name) or an explicit first-order TensorElement.  The seed is
    tensored with ``var`` (default: the first variable).
    """
    amb = L if isinstance(L, DglaOverArtin) else DglaOverArtin(L, A)
    phi = _seed_element(amb, seed, var)
    _require_degree(phi, 1, "seed")
    if not amb.in_ideal(phi):
        raise PreconditionError("seed must lie in L⊗m_A")
    first = mc_residual(phi).truncate(1)
    if first:
        raise PreconditionError("seed is not closed", witness=first)
    sol = McSolution(amb, phi.truncate(1), 1)
    top = min(max_order, amb.algebra.truncation)
    while sol.order < top:
        nxt = extend_order(sol)
        if isinstance(nxt, ObstructionReport):
            return nxt
        sol = nxt
    return sol


# ---------------------------------------------------------------------------
# Baker-Campbell-Hausdorff


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / Fraction(m + 1))
    return B[n]


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def bch_product(a, b, context=None):
    """a • b = log(exp a exp b) in a nilpotent Lie algebra.

    ``context`` supplies ``bracket``, ``zero`` and ``nilpotency`` (brackets of
    that many elements vanish); for TensorElements it defaults to the ambient
    L⊗m_A.  Uses the Goldberg-Varadarajan recursion for the homogeneous parts.
    """
    if context is None:
        context = _ambient(a)
        _require_degree(a, 0, "bch input")
        _require_degree(b, 0, "bch input")
    br = context.bracket
    N = int(context.nilpotency)
    s = a + b
    diff = a - b
    Z = {1: s}
    total = s
    for n in range(1, N):
        acc = br(diff, Z[n]) * HALF
        for p in range(1, n // 2 + 1):
            coef = bernoulli(2 * p) / factorial(2 * p)
            inner = context.zero()
            for ks in _compositions(n, 2 * p):
                if any(not Z[k] for k in ks):
                    continue
                term = s
                for k in reversed(ks):
                    term = br(Z[k], term)
                    if not term:
                        break
                inner = inner + term
            if inner:
                acc = acc + inner * ExactScalar(coef)
        Z[n + 1] = acc * ExactScalar(Fraction(1, n + 1))
        total = total + Z[n + 1]
    if Z[N]:
        raise StructuralError(
            f"BCH series did not terminate within the nilpotency bound {N}"
        )
    return total


class ExactMatrix:
    """Square matrix over ExactScalar, stored as a tuple of row tuples."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(scalar(x) for x in r) for r in rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def zeros(cls, n):
        return cls([[ZERO] * n for _ in range(n)])

    @classmethod
    def identity(cls, n):
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return ExactMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    __radd__ = __add__

    def __sub__(self, other):
        return ExactMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return ExactMatrix([[-x for x in r] for r in self.rows])

    def __mul__(self, c):
        c = scalar(c)
        return ExactMatrix([[x * c for x in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = ZERO
                for x, y in zip(r, c):
                    if x and y:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return ExactMatrix(out)

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __bool__(self):
        return any(x for r in self.rows for x in r)

    def __repr__(self):
        return "ExactMatrix(" + str([[str(x) for x in r] for r in self.rows]) + ")"


class MatrixLieAlgebra:
    """Commutator bracket on n×n matrices, for use as a BCH context."""

    def __init__(self, n: int, nilpotency: int | None = None):
        self.n = n
        self.nilpotency = n if nilpotency is None else nilpotency

    def zero(self):
        return ExactMatrix.zeros(self.n)

    def bracket(self, x, y):
        return x @ y - y @ x


# ---------------------------------------------------------------------------
# gauge action


def gauge_act(a, b):
    """exp(a) * b = b + Σ_{n≥0} ad_a^n/(n+1)! ([a, b] - da)."""
    amb = _ambient(a)
    _require_degree(a, 0, "gauge parameter")
    _require_degree(b, 1, "gauge target")
    if not amb.in_ideal(a):
        raise StructuralError("gauge parameter must lie in L⊗m_A")
    seed = amb.bracket(a, b) - amb.d(a)
    out = b
    term = seed
    n = 0
    bound = amb.nilpotency
    while term:
        if n >= bound:
            raise StructuralError("gauge series did not terminate")
        out = out + term * ExactScalar(Fraction(1, factorial(n + 1)))
        n += 1
        term = amb.bracket(a, term)
    return out


def gauge_equivalent(x, y, max_order: int | None = None):
    """Some degree-0 a with gauge_act(a, x) = y up to ``max_order``, or None.

    At order k the new term a_k enters linearly through -d a_k, so it is
    h(difference) plus a closed part.  The closed part of a_(k-1) is chosen
    one step ahead so that the order-k difference becomes exact; among the
    admissible choices the basic solution (free coordinates zero) is used.
    """
    amb = _ambient(x)
    if _ambient(y) != amb:
        raise StructuralError("elements live in different DGLAs")
    _require_degree(x, 1, "gauge_equivalent input")
    _require_degree(y, 1, "gauge_equivalent input")
    A = amb.algebra
    L = amb.base
    N = A.truncation if max_order is None else min(max_order, A.truncation)
    K = L.contraction()
    by_order = {}
    for m in A.ideal_basis():
        by_order.setdefault(sum(m), []).append(m)

    def diff_at(a, k):
        return (gauge_act(a, x) - y).homogeneous(k)

    def constraint_coords(vecs_by_mono, monos):
        """Flatten H and S coordinates of each monomial component."""
        out = {}
        pos = 0
        for m in monos:
            deg = 1 + A.degree(m)
            nh = len(K.H.get(deg, ())) if deg in K.H else 0
            idx = L.space.indices(deg)
            width = len(idx)
            vec = vecs_by_mono.get(m, {})
            if vec and deg in K.H:
                _, h, s = K.coordinates(deg, vec)
                for c, v in h.items():
                    out[pos + c] = v
                for c, v in s.items():
                    out[pos + nh + c] = v
            pos += width
        return out

    def cocycles(monos):
        gens = []
        for m in monos:
            deg = A.degree(m)
            idx = L.space.indices(deg)
            if not idx:
                continue
            _, _, rows = L.complex().d.block(deg)
            for z in kernel_basis(rows, len(idx)):
                gens.append(amb.from_monomial_vectors({m: {idx[j]: v for j, v in z.items()}}))
        return gens

    a = amb.zero()
    for k in range(1, N + 1):
        monos = by_order.get(k, [])
        c = diff_at(a, k)
        gens = cocycles(by_order.get(k - 1, [])) if k > 1 else []
        base = constraint_coords(c.by_monomial(), monos)
        if gens and base:
            cols = []
            for g in gens:
                delta = diff_at(a + g, k) - c
                cols.append(constraint_coords(delta.by_monomial(), monos))
            nrows = 1 + max([max(col, default=-1) for col in cols] + [max(base, default=-1)])
            rows = [dict() for _ in range(nrows)]
            for j, col in enumerate(cols):
                for r, v in col.items():
                    rows[r][j] = v
            lam = solve_field(rows, len(gens), {r: -v for r, v in base.items()})
            if lam is None:
                return None
            for j, v in lam.items():
                a = a + gens[j] * v
            c = diff_at(a, k)
        elif base:
            return None
        parts = {}
        for m, vec in c.by_monomial().items():
            deg = 1 + A.degree(m)
            _, h, s = K.coordinates(deg, vec)
            if h or s:
                return None
            parts[m] = K.h(vec)
        a = a + amb.from_monomial_vectors(parts)
    if (gauge_act(a, x) - y).truncate(N):
        return None
    return a


# ---------------------------------------------------------------------------
# deformation functor bookkeeping


@dataclass
class AbelianFunctorBasis:
    """Basis of Def_L(A) = ⊕_{i-j=1} H^i(L) ⊗ m_A^(j) for abelian L."""

    ambient: DglaOverArtin
    elements: list
    labels: list

    @property
    def dim(self) -> int:
        return len(self.elements)

    def by_bidegree(self) -> dict:
        out = {}
        for i, j, _, _ in self.labels:
            out[(i, j)] = out.get((i, j), 0) + 1
        return out


def abelian_functor_eval(L: Dgla, A: GradedArtinAlgebra) -> AbelianFunctorBasis:
    if not L.is_abelian():
        raise PreconditionError("abelian_functor_eval needs a zero bracket")
    amb = DglaOverArtin(L, A)
    C = L.complex()
    elements = []
    labels = []
    for m in A.ideal_basis():
        j = A.degree(m)
        i = 1 + j
        if not L.space.indices(i):
            continue
        H = C.cohomology(i)
        for r, rep in enumerate(H.representatives):
            elements.append(amb.tensor(rep, A.monomial(m)))
            labels.append((i, j, A.monomial_str(m), r))
    return AbelianFunctorBasis(amb, elements, labels)


def tangent_space(L: Dgla) -> list:
    return list(L.complex().cohomology(1).representatives)


@dataclass
class ClassVerdict:
    index: int
    representative: dict
    extends: bool
    solution: McSolution | None = None
    obstruction: ObstructionReport | None = None


@dataclass
class SmoothnessReport:
    max_order: int
    verdicts: list = field(default_factory=list)

    @property
    def all_extend(self) -> bool:
        return all(v.extends for v in self.verdicts)


def smoothness_probe(L: Dgla, max_order: int, variable: str = "t") -> SmoothnessReport:
    """Try to integrate each echelon H^1 basis class to ``max_order``."""
    A = GradedArtinAlgebra([(variable, 0)], max_order)
    amb = DglaOverArtin(L, A)
    H1 = L.complex().cohomology(1)
    report = SmoothnessReport(max_order)
    for r, rep in enumerate(H1.representatives):
        out = solve_mc(amb, A, rep, max_order)
        if isinstance(out, ObstructionReport):
            report.verdicts.append(ClassVerdict(r, rep, False, obstruction=out))
        else:
            report.verdicts.append(ClassVerdict(r, rep, True, solution=out))
    return report


@dataclass
class DeformedCohomology:
    """Cohomology of (L⊗A, d + [γ, ·]) compared with H(L, d).

    Over a local Artin A the deformed cohomology is free of rank
    ``base_rank`` exactly when its dimension over the field is
    ``base_rank * dim A``; otherwise it is strictly smaller.
    """

    base_rank: dict          # degree -> dim H^k(L)
    deformed_dim: dict       # degree -> dim over the field of H^k(L⊗A, d_γ)
    algebra_dim: int

    @property
    def free(self) -> bool:
        return all(self.deformed_dim.get(k, 0) == r * self.algebra_dim
                   for k, r in self.base_rank.items()) and \
            sum(self.deformed_dim.values()) == sum(self.base_rank.values()) * self.algebra_dim

    @property
    def rank(self) -> int:
        return sum(self.base_rank.values())


def deformed_cohomology(gamma: TensorElement) -> DeformedCohomology:
    """Raises PreconditionError if d_γ does not square to zero."""
    amb = gamma.ambient
    if mc_residual(gamma):
        raise PreconditionError("γ is not Maurer-Cartan", witness=mc_residual(gamma))
    base = amb.base.complex().betti()
    C = amb.field_complex(gamma)
    deformed = C.betti()
    return DeformedCohomology({k: v for k, v in base.items() if v},
                              {k: v for k, v in deformed.items() if v}, amb.algebra.dim())


# ---------------------------------------------------------------------------
# extended moduli bookkeeping


@dataclass
class HodgeTable:
    n: int
    values: dict

    def __post_init__(self):
        if self.n < 0:
            raise StructuralError("dimension must be nonnegative")
        clean = {}
        for (p, q), v in dict(self.values).items():
            p, q, v = int(p), int(q), int(v)
            if not (0 <= p <= self.n and 0 <= q <= self.n):
                raise StructuralError(f"h^{{{p},{q}}} outside 0..{self.n}")
            if v < 0:
                raise StructuralError(f"h^{{{p},{q}}} is negative")
            if (p, q) in clean:
                raise StructuralError(f"h^{{{p},{q}}} given twice")
            clean[(p, q)] = v
        self.values = clean

    def complete(self) -> bool:
        return all((p, q) in self.values for p in range(self.n + 1) for q in range(self.n + 1))

    def missing(self) -> list:
        return [(p, q) for p in range(self.n + 1) for q in range(self.n + 1)
                if (p, q) not in self.values]

    def __getitem__(self, pq):
        return self.values[pq]


@dataclass
class ExtendedDims:
    groups: dict
    by_degree: dict
    total: int
    metadata: dict


def extended_moduli_dims(h: HodgeTable) -> ExtendedDims:
    """Graded dimensions of H = ⊕ H^{0,q}(∧^p T) from a Hodge table.

    dim H^{0,q}(∧^p T) = h^{n-p,q}; the group sits in degree q-p+1 and the
    shift [1] lowers that to q-p.
    """
    if not h.complete():
        raise StructuralError(f"incomplete Hodge table, missing {h.missing()}")
    n = h.n
    groups = {}
    by_degree = {}
    for p, q in iproduct(range(n + 1), repeat=2):
        dim = h[(n - p, q)]
        groups[(p, q)] = dim
        deg = q - p
        by_degree[deg] = by_degree.get(deg, 0) + dim
    total = sum(groups.values())
    meta = {
        "duality": "dim H^{0,q}(wedge^p T) = h^{n-p,q}",
        "degree": "q-p+1 shifted by [1] to q-p",
        "n": n,
    }
    return ExtendedDims(groups, by_degree, total, meta)
