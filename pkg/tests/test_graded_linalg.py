import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import random_abelian_complex
from dgdeform.errors import PreconditionError, StructuralError
from dgdeform.linalg import (ChainMap, CochainComplex, Contraction, GradedVectorSpace, LinearMap,
                             check_quasi_iso, kernel_basis, rank, solve_field)
from dgdeform.scalars import ExactScalar

matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=5))


def sparse(rows):
    return [{j: ExactScalar(v) for j, v in enumerate(r) if v} for r in rows]


@settings(max_examples=80)
@given(matrices)
def test_rank_and_kernel_against_sympy(rows):
    n = len(rows[0])
    assert rank(sparse(rows)) == sympy.Matrix(rows).rank()
    K = kernel_basis(sparse(rows), n)
    assert len(K) == n - sympy.Matrix(rows).rank()
    for v in K:
        assert all(sum((r.get(j, 0) * c for j, c in v.items()), ExactScalar(0)) == 0
                   for r in sparse(rows))


@settings(max_examples=80)
@given(matrices, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solve_field(rows, x):
    n = len(rows[0])
    x = x[:n]
    b = {i: ExactScalar(sum(a * c for a, c in zip(r, x))) for i, r in enumerate(rows)}
    b = {i: v for i, v in b.items() if v}
    sol = solve_field(sparse(rows), n, b)
    assert sol is not None
    for i, r in enumerate(rows):
        assert sum((r[j] * sol.get(j, 0) for j in range(n)), ExactScalar(0)) == b.get(i, 0)


def test_solve_field_inconsistent():
    assert solve_field(sparse([[1, 1], [2, 2]]), 2, {0: ExactScalar(1)}) is None


def test_d_squared_nonzero_is_rejected():
    sp = GradedVectorSpace([("a", 0), ("b", 1), ("c", 2)])
    d = LinearMap(sp, sp, {(1, 0): 1, (2, 1): 1}, 1)
    with pytest.raises(PreconditionError) as e:
        CochainComplex(sp, d)
    assert e.value.witness[:2] == ("a", "c")


def test_degree_rule():
    sp = GradedVectorSpace([("a", 0), ("b", 0)])
    with pytest.raises(StructuralError):
        LinearMap(sp, sp, {(1, 0): 1}, 1)


@pytest.mark.parametrize("seed", range(15))
def test_contraction_identities(seed):
    rng = random.Random(seed)
    L, _, dims = random_abelian_complex(rng)
    C = L.complex()
    K = Contraction(C)
    d = C.d.apply
    for j in range(C.space.dim):
        e = {j: ExactScalar(1)}
        # dh + hd = 1 - ip
        lhs = {}
        for part in (d(K.h(e)), K.h(d(e)), K.i(K.p(e))):
            for k, v in part.items():
                lhs[k] = lhs.get(k, 0) + v
        lhs = {k: v for k, v in lhs.items() if v}
        assert lhs == e
        assert not K.h(K.h(e))
        assert not K.p(K.h(e))
    for lab in K.h_labels():
        assert K.p(K.i({lab: ExactScalar(1)})) == {lab: 1}
        assert not K.h(K.i({lab: ExactScalar(1)}))
    assert C.betti() == {k: len(K.H[k].representatives) for k in K.H}
    assert sum(dims.values()) == C.space.dim


def test_cohomology_dimensions_match_ranks():
    rng = random.Random(99)
    for _ in range(10):
        L, blocks, dims = random_abelian_complex(rng)
        betti = L.complex().betti()
        for k, n in dims.items():
            r_out = sympy.Matrix(blocks[k]).rank() if k in blocks and blocks[k] and n else 0
            r_in = sympy.Matrix(blocks[k - 1]).rank() if k - 1 in blocks and blocks[k - 1] and \
                blocks[k - 1][0] else 0
            assert betti.get(k, 0) == n - r_out - r_in


def test_quasi_iso_verdicts():
    src = CochainComplex.from_blocks({0: 1}, {})
    tgt = CochainComplex.from_blocks({0: 2, 1: 1}, {0: [[0, 1]]})
    f = ChainMap(src, tgt, LinearMap(src.space, tgt.space, {(0, 0): 1}, 0))
    assert check_quasi_iso(f).quasi_iso
    g = ChainMap(src, tgt, LinearMap(src.space, tgt.space, {(1, 0): 1}, 0))
    r = check_quasi_iso(g)
    assert not r.chain_map and r.offending == "e0_0"
    h = ChainMap(src, tgt, LinearMap(src.space, tgt.space, {}, 0))
    assert check_quasi_iso(h).chain_map and not check_quasi_iso(h).quasi_iso


def test_fraction_entries_are_exact():
    rows = [{0: ExactScalar(Fraction(1, 3)), 1: ExactScalar(Fraction(2, 3))}]
    sol = solve_field(rows, 2, {0: ExactScalar(1)})
    assert sol == {0: 3}
