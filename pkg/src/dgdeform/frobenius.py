"""Frobenius algebras, potentials, WDVV and Frobenius families.

A structure tensor is a dict ``{(i, j): {k: SeriesElement}}`` giving
t_i * t_j = Σ_k A_ij^k t_k with coefficients in a GradedArtinAlgebra.  The
coordinates of a potential are the variables of its algebra, read as the
g-duals of the basis in order, so variable k belongs to basis element k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .artin import GradedArtinAlgebra, SeriesElement, alg_derive
from .dgla import DglaOverArtin, TensorElement
from .errors import PreconditionError, StructuralError
from .linalg import rank, solve_field
from .scalars import ExactScalar, ONE, ZERO, scalar

__all__ = [
    "FrobeniusData",
    "FrobeniusReport",
    "check_frobenius_algebra",
    "constant_algebra",
    "potential_to_tensor",
    "lower_tensor",
    "raise_tensor",
    "WdvvReport",
    "wdvv_check",
    "NotPotential",
    "tensor_to_potential",
    "WedgeDgla",
    "FamilyResult",
    "frobenius_family",
    "top_form_trace",
]


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def constant_algebra() -> GradedArtinAlgebra:
    """The ground field as an Artin algebra with no variables."""
    return GradedArtinAlgebra([], 0)


def _matrix_inverse(g):
    n = len(g)
    cols = []
    rows = [{j: scalar(v) for j, v in enumerate(r) if v} for r in g]
    for k in range(n):
        sol = solve_field(rows, n, {k: ONE})
        if sol is None:
            raise PreconditionError("metric is degenerate", witness=g)
        cols.append(sol)
    return [[cols[j].get(i, ZERO) for j in range(n)] for i in range(n)]


class FrobeniusData:
    """Graded basis, metric and a structure tensor over an Artin algebra."""

    def __init__(self, names, degrees, g, tensor=None, algebra=None, unit=None,
                 potential=None):
        self.names = list(names)
        self.degrees = [int(d) for d in degrees]
        n = len(self.names)
        if len(self.degrees) != n:
            raise StructuralError("names and degrees differ in length")
        if len(set(self.names)) != n:
            raise StructuralError("duplicate basis names")
        if len(g) != n or any(len(r) != n for r in g):
            raise StructuralError(f"metric must be {n}x{n}")
        self.g = [[scalar(v) for v in r] for r in g]
        if potential is not None:
            algebra = potential.algebra if algebra is None else algebra
        self.algebra = algebra or constant_algebra()
        self.potential = potential
        if tensor is None and potential is not None:
            tensor = raise_tensor(potential_to_tensor(potential), self.g)
        self.tensor = {}
        for key, out in (tensor or {}).items():
            i, j = (self.index(x) for x in key)
            row = {}
            for k, c in out.items():
                if not isinstance(c, SeriesElement):
                    c = self.algebra.constant(c)
                if c:
                    row[self.index(k)] = c
            if row:
                self.tensor[(i, j)] = row
        if self.tensor:
            algs = {c.algebra for row in self.tensor.values() for c in row.values()}
            if len(algs) == 1:
                self.algebra = algs.pop()
        self.unit = None if unit is None else self.index(unit)

    def index(self, key) -> int:
        if isinstance(key, int):
            if not 0 <= key < len(self.names):
                raise StructuralError(f"basis index {key} out of range")
            return key
        try:
            return self.names.index(key)
        except ValueError:
            raise StructuralError(f"unknown basis element {key!r}") from None

    @property
    def dim(self) -> int:
        return len(self.names)

    def parity(self, i: int) -> int:
        return self.degrees[i] % 2

    def structure_constants(self):
        """A_ij^k at t = 0 as ``{(i, j): {k: scalar}}``."""
        out = {}
        for key, row in self.tensor.items():
            r = {k: c.constant_term() for k, c in row.items() if c.constant_term()}
            if r:
                out[key] = r
        return out

    def at_zero(self) -> "FrobeniusData":
        return FrobeniusData(self.names, self.degrees, self.g, self.structure_constants(),
                             constant_algebra(), self.unit)

    def multiply(self, u: dict, v: dict) -> dict:
        """Product of two constant vectors using A(0)."""
        sc = self.structure_constants()
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in sc.get((i, j), {}).items():
                    out[k] = out.get(k, ZERO) + a * b * c
        return {k: c for k, c in out.items() if c}

    def pair(self, u: dict, v: dict) -> ExactScalar:
        acc = ZERO
        for i, a in u.items():
            for j, b in v.items():
                acc = acc + a * b * self.g[i][j]
        return acc


# -- Frobenius algebra axioms -------------------------------------------------

@dataclass
class FrobeniusReport:
    verdicts: dict
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        lines = []
        for name, v in self.verdicts.items():
            w = self.witnesses.get(name)
            extra = f" at {w}" if (w is not None and not v) else ""
            lines.append(f"{name}: {'pass' if v else 'FAIL'}{extra}")
        return "\n".join(lines)


def check_frobenius_algebra(F: FrobeniusData) -> FrobeniusReport:
    """Axioms of the algebra at t = 0, each with its first failing triple."""
    n = F.dim
    c = F.structure_constants()
    g = F.g
    par = [F.parity(i) for i in range(n)]

    def coef(i, j, k):
        return c.get((i, j), {}).get(k, ZERO)

    verdicts = {}
    witnesses = {}

    def first(name, gen):
        for w in gen:
            verdicts[name] = False
            witnesses[name] = w
            return
        verdicts[name] = True

    first("metric symmetry", ((i, j) for i in range(n) for j in range(n)
                              if g[i][j] != _sign(par[i] * par[j]) * g[j][i]))
    rows = [{j: v for j, v in enumerate(r) if v} for r in g]
    verdicts["nondegeneracy"] = rank(rows) == n
    if not verdicts["nondegeneracy"]:
        witnesses["nondegeneracy"] = f"rank {rank(rows)} < {n}"
    first("graded commutativity", ((i, j, k) for i in range(n) for j in range(n)
                                   for k in range(n)
                                   if coef(j, i, k) != _sign(par[i] * par[j]) * coef(i, j, k)))

    def triple(x, y, z):
        """Both bracketings of e_x e_y e_z, as sparse vectors."""
        left, right = {}, {}
        for e, c1 in c.get((x, y), {}).items():
            for d, c2 in c.get((e, z), {}).items():
                left[d] = left.get(d, ZERO) + c1 * c2
        for e, c1 in c.get((y, z), {}).items():
            for d, c2 in c.get((x, e), {}).items():
                right[d] = right.get(d, ZERO) + c1 * c2
        return {d: v for d, v in left.items() if v}, {d: v for d, v in right.items() if v}

    def assoc_failures():
        for a, b, cc in product(range(n), repeat=3):
            left, right = triple(a, b, cc)
            if left != right:
                d = min(k for k in set(left) | set(right) if left.get(k) != right.get(k))
                yield (a, b, cc, d)

    first("associativity", assoc_failures())

    def invariance(a, b, cc):
        # <ab, c> = <a, bc>
        left = ZERO
        for e, x in c.get((a, b), {}).items():
            left = left + x * g[e][cc]
        right = ZERO
        for e, x in c.get((b, cc), {}).items():
            right = right + x * g[a][e]
        return left != right

    first("invariance", ((a, b, cc) for a, b, cc in product(range(n), repeat=3)
                         if invariance(a, b, cc)))
    if F.unit is not None:
        u = F.unit
        first("unit", ((u, a, k) for a in range(n) for k in range(n)
                       if coef(u, a, k) != (ONE if a == k else ZERO)
                       or coef(a, u, k) != (ONE if a == k else ZERO)))
    return FrobeniusReport(verdicts, witnesses)


# -- potentials -------------------------------------------------------------------

def _coordinate_names(alg: GradedArtinAlgebra):
    return [v.name for v in alg.variables]


def _retruncate(f: SeriesElement, target: GradedArtinAlgebra) -> SeriesElement:
    return SeriesElement(target, {m: c for m, c in f.coeffs.items() if target.is_valid(m)})


def potential_to_tensor(phi: SeriesElement) -> dict:
    """Lowered tensor A_ijk = ∂_i ∂_j ∂_k Φ as ``{(i, j, k): SeriesElement}``.

    Derivatives are left derivatives applied right to left.  The result
    lives in the algebra truncated three orders lower, which is where it is
    exactly determined by the truncated potential.
    """
    alg = phi.algebra
    if alg.truncation < 3:
        raise StructuralError("a potential needs truncation at least 3")
    low = GradedArtinAlgebra(alg.variables, alg.truncation - 3, alg.relations)
    names = _coordinate_names(alg)
    n = len(names)
    first = [alg_derive(phi, v) for v in names]
    second = {}
    out = {}
    for k in range(n):
        for j in range(n):
            second[(j, k)] = alg_derive(first[k], names[j])
            for i in range(n):
                val = alg_derive(second[(j, k)], names[i])
                if val:
                    out[(i, j, k)] = _retruncate(val, low)
    return {key: v for key, v in out.items() if v}


def raise_tensor(lowered: dict, g) -> dict:
    """A_ij^k = Σ_l A_ijl (g^-1)_lk."""
    ginv = _matrix_inverse(g)
    n = len(g)
    out = {}
    for (i, j, l), v in lowered.items():
        for k in range(n):
            c = ginv[l][k]
            if c:
                row = out.setdefault((i, j), {})
                row[k] = row[k] + v.scale(c) if k in row else v.scale(c)
    return {key: {k: c for k, c in row.items() if c} for key, row in out.items()
            if any(row.values())}


def lower_tensor(tensor: dict, g) -> dict:
    """A_ijk = Σ_l A_ij^l g_lk."""
    out = {}
    n = len(g)
    for (i, j), row in tensor.items():
        for l, c in row.items():
            for k in range(n):
                gk = scalar(g[l][k])
                if gk:
                    key = (i, j, k)
                    out[key] = out[key] + c.scale(gk) if key in out else c.scale(gk)
    return {k: v for k, v in out.items() if v}


# -- WDVV ------------------------------------------------------------------------

@dataclass
class WdvvReport:
    ok: bool
    commutativity: tuple | None   # (a, b, c, order) of the first failure
    associativity: tuple | None   # (a, b, c, d, order) of the first failure

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "WDVV holds"
        parts = []
        if self.commutativity:
            a, b, c, o = self.commutativity
            parts.append(f"graded commutativity fails for (a,b,c)=({a},{b},{c}) at order {o}")
        if self.associativity:
            a, b, c, d, o = self.associativity
            parts.append(f"associativity fails for (a,b,c,d)=({a},{b},{c},{d}) at order {o}")
        return "; ".join(parts)


def _tensor_algebra(tensor):
    for row in tensor.values():
        for c in row.values():
            return c.algebra
    return constant_algebra()


def wdvv_check(tensor: dict, degrees, max_order: int | None = None) -> WdvvReport:
    """Check A_ba^c = (-1)^{ab} A_ab^c and
    Σ_e A_ab^e A_ec^d = (-1)^{a(b+c)} Σ_e A_bc^e A_ea^d order by order.

    The reported failure is the one of lowest order, ties broken by index.
    """
    n = len(degrees)
    par = [int(d) % 2 for d in degrees]
    alg = _tensor_algebra(tensor)
    zero = alg.zero()
    bound = alg.truncation if max_order is None else max_order

    def A(i, j, k):
        return tensor.get((i, j), {}).get(k, zero)

    def low(x):
        o = x.low_order()
        return None if o is None or o > bound else o

    comm = None
    for a, b, c in product(range(n), repeat=3):
        o = low(A(b, a, c) - A(a, b, c).scale(_sign(par[a] * par[b])))
        if o is not None and (comm is None or o < comm[3]):
            comm = (a, b, c, o)
    assoc = None
    for a, b, c in product(range(n), repeat=3):
        left, right = {}, {}
        for e, x in tensor.get((a, b), {}).items():
            for d, y in tensor.get((e, c), {}).items():
                left[d] = left[d] + x * y if d in left else x * y
        for e, x in tensor.get((b, c), {}).items():
            for d, y in tensor.get((e, a), {}).items():
                right[d] = right[d] + x * y if d in right else x * y
        s = _sign(par[a] * (par[b] + par[c]))
        for d in sorted(set(left) | set(right)):
            o = low(left.get(d, zero) - right.get(d, zero).scale(s))
            if o is not None and (assoc is None or o < assoc[4]):
                assoc = (a, b, c, d, o)
    return WdvvReport(comm is None and assoc is None, comm, assoc)


@dataclass
class NotPotential:
    reason: str
    witness: object

    def __bool__(self):
        return False

    def describe(self) -> str:
        return f"not a potential: {self.reason} ({self.witness})"


def tensor_to_potential(tensor: dict, g, algebra: GradedArtinAlgebra | None = None):
    """Φ with ∂_i∂_j∂_k Φ = A_ijk, without terms of order at most two.

    The coordinates are the variables of the coefficient algebra (or of
    ``algebra`` for a constant tensor).  Returns a NotPotential certificate
    when the lowered tensor is not graded symmetric or the system has no
    solution.
    """
    alg = algebra or _tensor_algebra(tensor)
    n = len(g)
    if alg.nvars != n:
        raise StructuralError(f"need {n} coordinates, the algebra has {alg.nvars}")
    tensor = {key: {k: (c if isinstance(c, SeriesElement) else alg.constant(c))
                    for k, c in row.items()} for key, row in tensor.items()}
    low = lower_tensor(tensor, g)
    par = [v.degree % 2 for v in alg.variables]
    zero = alg.zero()
    for i, j, k in product(range(n), repeat=3):
        a = low.get((i, j, k), zero)
        if low.get((j, i, k), zero) != a.scale(_sign(par[i] * par[j])):
            return NotPotential("A_ijk is not graded symmetric in i, j", (i, j, k))
        if low.get((i, k, j), zero) != a.scale(_sign(par[j] * par[k])):
            return NotPotential("A_ijk is not graded symmetric in j, k", (i, j, k))
    big = GradedArtinAlgebra(alg.variables, alg.truncation + 3, alg.relations)
    names = _coordinate_names(big)
    cols = [m for m in big.basis() if sum(m) >= 3]
    row_index = {}
    rows = []
    for c, m in enumerate(cols):
        mono = big.monomial(m)
        for k in range(n):
            dk = alg_derive(mono, names[k])
            if not dk:
                continue
            for j in range(n):
                djk = alg_derive(dk, names[j])
                if not djk:
                    continue
                for i in range(n):
                    val = alg_derive(djk, names[i])
                    for mm, v in val.coeffs.items():
                        key = (i, j, k, mm)
                        r = row_index.get(key)
                        if r is None:
                            r = row_index[key] = len(rows)
                            rows.append({})
                        rows[r][c] = rows[r].get(c, ZERO) + v
    rhs = {}
    for (i, j, k), v in low.items():
        for mm, x in v.coeffs.items():
            key = (i, j, k, mm)
            r = row_index.get(key)
            if r is None:
                return NotPotential("coefficient cannot be matched by any monomial",
                                    (i, j, k, alg.monomial_str(mm)))
            rhs[r] = x
    sol = solve_field(rows, len(cols), rhs)
    if sol is None:
        return NotPotential("the third-derivative system is inconsistent", None)
    return SeriesElement(big, {cols[c]: v for c, v in sol.items()})


# -- Frobenius families from a dGBV-type model ------------------------------------------

@dataclass
class WedgeDgla:
    """A Dgla together with an associative graded product on the same basis.

    ``wedge`` is ``{(i, j): {k: c}}`` and ``parity`` the product parity of
    each basis element.
    """

    dgla: object
    wedge: dict
    parity: list


def top_form_trace(model) -> dict:
    """ε for a finite polyvector model: the coefficient of the mode-0 top
    element η_1..η_n θ_1..θ_n."""
    S = model.space
    full = tuple(range(S.n))
    for i, e in enumerate(model.basis):
        ((I, J), f), = e.terms.items()
        if I == full and J == full and not any(next(iter(f.coeffs))):
            return {i: ONE}
    raise StructuralError("model has no top element")


@dataclass
class FamilyResult:
    free: bool
    rank: int
    data: FrobeniusData | None
    delta_infinity: dict            # {(a): {b: SeriesElement}} of the transferred differential
    labels: list                    # (degree, position) of each cohomology class
    representatives: list           # deformed representatives, TensorElements

    def describe(self) -> str:
        if not self.free:
            return (f"degenerate family: deformed cohomology is not free of rank {self.rank}")
        return f"free family of rank {self.rank}"


def _apply_field(amb: DglaOverArtin, fn, x: TensorElement) -> TensorElement:
    return amb.from_monomial_vectors({m: fn(v) for m, v in x.by_monomial().items()})


def _wedge_tensor(amb: DglaOverArtin, wedge: dict, parity, x, y):
    alg = amb.algebra
    out = {}
    for (i, m1), c1 in x.terms.items():
        p1 = alg.parity(m1)
        for (j, m2), c2 in y.terms.items():
            w = wedge.get((i, j))
            if not w:
                continue
            r = alg.mul_monomials(m1, m2)
            if r is None:
                continue
            sign, m = r
            if p1 and parity[j]:
                sign = -sign
            cc = c1 * c2 * sign
            for k, a in w.items():
                key = (k, m)
                out[key] = out.get(key, ZERO) + a * cc
    return TensorElement(amb, {k: v for k, v in out.items() if v})


def frobenius_family(model, gamma: TensorElement, trace: dict | None = None, g=None,
                     names=None) -> FamilyResult:
    """Product on the cohomology of d + [gamma, -] over the coefficient ring.

    The perturbation lemma transfers the deformed differential to the
    undeformed cohomology H.  When the transferred differential vanishes the
    deformed cohomology is free with basis the deformed representatives and
    the product of two classes is read off by the deformed projection.
    Otherwise the family is reported as degenerate.

    The metric is ``g`` or, given a trace ε on the model, ε(a ∧ b) on
    undeformed representatives.
    """
    from .mc import mc_residual

    L = model.dgla
    amb = gamma.ambient
    if amb.base is not L:
        raise StructuralError("gamma does not live over the model's Dgla")
    if mc_residual(gamma):
        raise PreconditionError("gamma is not Maurer-Cartan", witness=mc_residual(gamma))
    C = L.contraction()
    labels = C.h_labels()
    pos = {lab: a for a, lab in enumerate(labels)}
    alg = amb.algebra
    one = alg.unit_monomial()

    def delta(x):
        return amb.bracket(gamma, x)

    def minus_h(v):
        return {i: -c for i, c in C.h(v).items()}

    def i_inf(a):
        x = amb.from_monomial_vectors({one: C.i({labels[a]: ONE})})
        acc = x
        while x:
            x = _apply_field(amb, minus_h, delta(x))
            acc = acc + x
        return acc

    def p_inf(x):
        """Coordinates Σ p(-δh)^n x as {label index: SeriesElement}."""
        out = {}
        while x:
            for m, v in x.by_monomial().items():
                for lab, c in C.p(v).items():
                    a = pos[lab]
                    out[a] = out.get(a, alg.zero()) + alg.monomial(m, c)
            x = delta(_apply_field(amb, minus_h, x))
        return {a: s for a, s in out.items() if s}

    reps = [i_inf(a) for a in range(len(labels))]
    dinf = {}
    for a, r in enumerate(reps):
        img = _transfer(C, amb, pos, delta(r))
        if img:
            dinf[a] = img
    n = len(labels)
    if dinf:
        return FamilyResult(False, n, None, dinf, labels, reps)
    for a, r in enumerate(reps):
        if amb.d(r) + delta(r):
            raise AssertionError("deformed representative is not closed")
    parity = list(model.parity)
    par_h = []
    for a in range(n):
        ps = {parity[i] for i in C.i({labels[a]: ONE})}
        if len(ps) != 1:
            raise StructuralError("cohomology class of mixed product parity")
        par_h.append(ps.pop())
    tensor = {}
    for a in range(n):
        for b in range(n):
            w = _wedge_tensor(amb, model.wedge, parity, reps[a], reps[b])
            if amb.d(w) + delta(w):
                raise PreconditionError("d + [gamma, -] is not a derivation of the product",
                                        witness=(a, b))
            coords = p_inf(w)
            if coords:
                tensor[(a, b)] = coords
    if g is None:
        if trace is None:
            raise StructuralError("frobenius_family needs a metric or a trace")
        g = [[ZERO] * n for _ in range(n)]
        base_reps = [C.i({lab: ONE}) for lab in labels]
        for a in range(n):
            for b in range(n):
                acc = ZERO
                for i, x in base_reps[a].items():
                    for j, y in base_reps[b].items():
                        for k, c in model.wedge.get((i, j), {}).items():
                            t = trace.get(k)
                            if t:
                                acc = acc + x * y * c * t
                g[a][b] = acc
    if names is None:
        names = [f"h{k}_{c}" for k, c in labels]
    data = FrobeniusData(names, par_h, g, tensor, alg)
    data.algebra = alg
    data.unit = _find_unit(data)
    return FamilyResult(True, n, data, {}, labels, reps)


def _transfer(C, amb, pos, x):
    """Plain projection p, used for δ∞ = p δ i∞."""
    alg = amb.algebra
    out = {}
    for m, v in x.by_monomial().items():
        for lab, c in C.p(v).items():
            a = pos[lab]
            out[a] = out.get(a, alg.zero()) + alg.monomial(m, c)
    return {a: s for a, s in out.items() if s}


def _find_unit(F: FrobeniusData):
    sc = F.structure_constants()
    for u in range(F.dim):
        if all(sc.get((u, a), {}) == {a: ONE} and sc.get((a, u), {}) == {a: ONE}
               for a in range(F.dim)):
            # the unit must also be a unit for the deformed product
            if all(F.tensor.get((u, a), {}) == {a: F.algebra.one()} for a in range(F.dim)):
                return u
    return None
