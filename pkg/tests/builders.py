"""Random and hand-built objects shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from dgdeform.artin import GradedArtinAlgebra
from dgdeform.dgla import Dgla, DglaOverArtin
from dgdeform.frobenius import FrobeniusData
from dgdeform.polyvector import PolyVector, PolyvectorSpace
from dgdeform.scalars import ExactScalar


def small_scalar(rng: random.Random, gaussian: bool = False) -> ExactScalar:
    re = Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2, 3]))
    im = Fraction(rng.randint(-2, 2), rng.choice([1, 2])) if gaussian else 0
    return ExactScalar(re, im)


def random_poly(ring, rng, names, max_deg=2, terms=3, gaussian=False):
    f = ring.zero()
    idx = [ring.index(v) for v in names]
    for _ in range(rng.randint(0, terms)):
        mono = [0] * ring.nvars
        for _ in range(rng.randint(0, max_deg)):
            mono[rng.choice(idx)] += 1
        f = f + ring.monomial(tuple(mono), small_scalar(rng, gaussian))
    return f


def random_polyvector(S: PolyvectorSpace, rng, bideg=None, terms=3, max_deg=2, gaussian=False):
    """Sum of random terms; ``bideg`` = (p, q) fixes the bidegree."""
    out = {}
    for _ in range(terms):
        if bideg is None:
            p, q = rng.randint(0, S.n), rng.randint(0, S.n)
        else:
            p, q = bideg
        I = tuple(sorted(rng.sample(range(S.n), q)))
        J = tuple(sorted(rng.sample(range(S.n), p)))
        f = random_poly(S.ring, rng, S.func_names, max_deg, 2, gaussian)
        out[(I, J)] = out[(I, J)] + f if (I, J) in out else f
    return PolyVector(S, out)


def homogeneous_polyvector(S, rng, degree, terms=3, max_deg=2):
    """Random element of a single Lie degree q - p + 1."""
    choices = [(p, q) for p in range(S.n + 1) for q in range(S.n + 1) if q - p + 1 == degree]
    out = S.zero()
    for _ in range(terms):
        out = out + random_polyvector(S, rng, rng.choice(choices), 1, max_deg)
    return out


# -- random DGLAs ------------------------------------------------------------------

def end_dgla(dims: dict, dv: dict) -> Dgla:
    """End(V) of a cochain complex V with the graded commutator.

    ``dims`` maps degree -> dim V^k, ``dv`` maps (row, col) of the flattened
    basis to the entries of the differential of V.
    """
    vdeg = []
    for k in sorted(dims):
        vdeg += [k] * dims[k]
    n = len(vdeg)
    basis = [(f"E{i}{j}", vdeg[i] - vdeg[j]) for i in range(n) for j in range(n)]
    pos = {(i, j): i * n + j for i in range(n) for j in range(n)}
    deg = {pos[i, j]: vdeg[i] - vdeg[j] for i in range(n) for j in range(n)}

    def comm(a, b):
        (i, j), (k, l) = a, b
        out = {}
        if j == k:
            out[pos[i, l]] = out.get(pos[i, l], 0) + 1
        if l == i:
            s = -1 if (deg[pos[a]] * deg[pos[b]]) % 2 else 1
            out[pos[k, j]] = out.get(pos[k, j], 0) - s
        return {x: c for x, c in out.items() if c}

    d = {}
    for (i, j) in pos:
        img = {}
        # d a = δ a - (-1)^{|a|} a δ
        for (r, c), v in dv.items():
            if c == i:
                img[pos[r, j]] = img.get(pos[r, j], 0) + v
            if r == j:
                s = -1 if deg[pos[i, j]] % 2 else 1
                img[pos[i, c]] = img.get(pos[i, c], 0) - s * v
        img = {x: c for x, c in img.items() if c}
        if img:
            d[pos[i, j]] = img
    br = {}
    keys = sorted(pos, key=lambda k: pos[k])
    for a in keys:
        for b in keys:
            if pos[a] <= pos[b]:
                out = comm(a, b)
                if out:
                    br[(pos[a], pos[b])] = out
    return Dgla(basis, d, br)


def random_end_dgla(rng) -> Dgla:
    """End of V = V^0 ⊕ V^1 with a random rank ≤ 1 differential."""
    a, b = rng.randint(1, 2), rng.randint(1, 2)
    dv = {}
    if rng.random() < 0.7:
        dv[(a + rng.randrange(b), rng.randrange(a))] = rng.choice([1, 2, -1])
    return end_dgla({0: a, 1: b}, dv)


def random_surjective_dgla(rng, max_rank=10) -> Dgla:
    """Degrees 0, 1, 2 with d: L^1 -> L^2 onto, so H^2 = 0.

    L^1 = X ⊕ W with d: W ≅ L^2 and [L^1, L^1] ⊂ L^2 random; L^0 maps into
    a central part of X, and acts trivially.
    """
    while True:
        nx = rng.randint(1, 3)
        nz = rng.randint(0, min(2, nx))
        ny = rng.randint(1, 3)
        if nz + nx + 2 * ny <= max_rank:
            break
    basis = [(f"u{k}", 0) for k in range(nz)] + [(f"x{k}", 1) for k in range(nx)] \
        + [(f"w{k}", 1) for k in range(ny)] + [(f"y{k}", 2) for k in range(ny)]
    d = {}
    for k in range(nz):
        d[f"u{k}"] = {f"x{k}": 1}
    for k in range(ny):
        d[f"w{k}"] = {f"y{k}": 1}
        if k + 1 < ny and rng.random() < 0.5:
            d[f"w{k}"][f"y{k + 1}"] = rng.randint(-2, 2)
    central = {f"x{k}" for k in range(nz)}
    odd = [name for name, deg in basis if deg == 1 and name not in central]
    bracket = {}
    names = [name for name, _ in basis]
    for i, a in enumerate(odd):
        for b in odd[i:]:
            if rng.random() < 0.6:
                out = {f"y{rng.randrange(ny)}": Fraction(rng.randint(-3, 3), rng.choice([1, 2]))}
                key = (a, b) if names.index(a) <= names.index(b) else (b, a)
                bracket[key] = out
    return Dgla(basis, d, bracket)


def truncated(order: int, var: str = "t") -> GradedArtinAlgebra:
    return GradedArtinAlgebra([(var, 0)], order)


def random_artin(rng) -> GradedArtinAlgebra:
    kind = rng.randrange(3)
    if kind == 0:
        return truncated(rng.randint(1, 3))
    if kind == 1:
        return GradedArtinAlgebra([("s", 0), ("t", 0)], 2)
    return GradedArtinAlgebra([("t", 0), ("e", 0)], 3, relations=["e^2"])


def over(L: Dgla, A: GradedArtinAlgebra) -> DglaOverArtin:
    return DglaOverArtin(L, A)


# -- abelian complexes -------------------------------------------------------------

def _unimodular(rng, n):
    """Random integer matrix with determinant ±1, as a list of rows."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1, 2])
        m[i] = [a + c * b for a, b in zip(m[i], m[j])]
    if rng.random() < 0.5 and n:
        m[0] = [-a for a in m[0]]
    return m


def _inverse_int(m):
    """Exact inverse of a unimodular integer matrix."""
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c])
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = [[x for x in r[n:]] for r in a]
    assert all(x.denominator == 1 for r in out for x in r)
    return [[int(x) for x in r] for r in out]


def _matmul_int(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def random_abelian_complex(rng, degrees=(-1, 0, 1, 2, 3), max_dim=2):
    """Abelian Dgla with an integral differential whose rank is the same
    over Q and over every F_p: a normal form conjugated by unimodular
    matrices.  Returns (Dgla, {degree: integer block of d^k})."""
    # per degree: cohomology h, image b (from below) and c (maps onto b above)
    dims, split = {}, {}
    prev_c = 0
    for k in degrees:
        b = prev_c
        c = 0 if k == degrees[-1] else rng.randint(0, 1)
        h = rng.randint(0, max_dim)
        split[k] = (b, c, h)
        dims[k] = b + c + h
        prev_c = c
    change = {k: _unimodular(rng, dims[k]) for k in degrees}
    blocks = {}
    for k in degrees[:-1]:
        b1, c0 = split[k + 1][0], split[k][1]
        n0, n1 = dims[k], dims[k + 1]
        # basis order in each degree: image part, non-closed part, cohomology
        normal = [[0] * n0 for _ in range(n1)]
        for r in range(b1):
            normal[r][split[k][0] + r] = 1
        assert b1 == c0
        if n0 and n1:
            blocks[k] = _matmul_int(_matmul_int(change[k + 1], normal), _inverse_int(change[k]))
        else:
            blocks[k] = [[0] * n0 for _ in range(n1)]
    basis, offset = [], {}
    for k in degrees:
        offset[k] = len(basis)
        basis += [(f"e{k}_{j}", k) for j in range(dims[k])]
    d = {}
    for k, rows in blocks.items():
        for r, row in enumerate(rows):
            for c, v in enumerate(row):
                if v:
                    d.setdefault(offset[k] + c, {})[offset[k + 1] + r] = v
    return Dgla(basis, d), blocks, dims


# -- Frobenius algebras ----------------------------------------------------------------

def _local_algebra(k):
    """Q[x]/(x^k): structure constants on 1, x, ..., x^{k-1}."""
    return {(i, j): {i + j: 1} for i in range(k) for j in range(k) if i + j < k}


def random_frobenius(rng, max_dim=4) -> FrobeniusData:
    """A commutative even Frobenius algebra of dimension ≤ max_dim.

    A product of truncated polynomial algebras (or Q[x,y]/(x^2,y^2)) with a
    random nondegenerate trace, written in a random basis whose first vector
    is the unit.
    """
    n = rng.randint(1, max_dim)
    if n == 4 and rng.random() < 0.3:
        # 1, x, y, xy
        mult = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1},
                (0, 3): {3: 1}, (3, 0): {3: 1}, (1, 2): {3: 1}, (2, 1): {3: 1}}
        unit = [1, 0, 0, 0]
        trace = [Fraction(rng.randint(-2, 2)) for _ in range(3)] + [Fraction(rng.choice([1, 2, -3]))]
    else:
        parts = []
        left = n
        while left:
            k = rng.randint(1, left)
            parts.append(k)
            left -= k
        mult, unit, trace, off = {}, [0] * n, [], 0
        for k in parts:
            for (i, j), out in _local_algebra(k).items():
                mult[(off + i, off + j)] = {off + m: c for m, c in out.items()}
            unit[off] = 1
            trace += [Fraction(rng.randint(-2, 2)) for _ in range(k - 1)] + \
                [Fraction(rng.choice([1, -1, 2, Fraction(1, 2)]))]
            off += k
    # change of basis: columns of P are the new basis vectors, P[:, 0] = unit
    while True:
        P = [[Fraction(rng.randint(-1, 1)) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            P[i][0] = Fraction(unit[i])
        try:
            Pinv = _inverse_frac(P)
            break
        except StopIteration:
            continue

    def prod(u, v):
        out = [Fraction(0)] * n
        for (i, j), row in mult.items():
            if u[i] and v[j]:
                for k, c in row.items():
                    out[k] += u[i] * v[j] * c
        return out

    cols = [[P[i][j] for i in range(n)] for j in range(n)]
    tensor, g = {}, [[Fraction(0)] * n for _ in range(n)]
    for a, b in product(range(n), repeat=2):
        w = prod(cols[a], cols[b])
        coords = [sum(Pinv[r][i] * w[i] for i in range(n)) for r in range(n)]
        row = {k: c for k, c in enumerate(coords) if c}
        if row:
            tensor[(a, b)] = row
        g[a][b] = sum(t * x for t, x in zip(trace, w))
    names = [f"b{k}" for k in range(n)]
    return FrobeniusData(names, [0] * n, g, {(names[a], names[b]): {names[k]: c for k, c in row.items()}
                                              for (a, b), row in tensor.items()}, unit=names[0])


def _inverse_frac(m):
    n = len(m)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c])
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]
