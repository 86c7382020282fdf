"""The eleven acceptance criteria, each checked with exact equality.

Every criterion records a PASS/FAIL line that is printed in the terminal
summary.  Criteria whose literal statement disagrees with the mathematics are
marked xfail(strict=True): the literal assertion runs and fails, and the
corrected statement is asserted separately in the same module.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from builders import (homogeneous_polyvector, random_abelian_complex, random_artin,
                      random_end_dgla, random_frobenius, random_surjective_dgla, truncated)
from conftest import ACCEPTANCE, FIXTURES
from oracles import (count_classes_mod_p, delta_oracle, mat_exp, mat_log, mat_mul,
                     torus_phi_series)

from dgdeform import cli
from dgdeform.almost_complex import encoding_map, nijenhuis_order, torus_family
from dgdeform.artin import GradedArtinAlgebra, SeriesElement
from dgdeform.dgla import DglaOverArtin
from dgdeform.documents import load_model
from dgdeform.frobenius import (NotPotential, potential_to_tensor, raise_tensor, tensor_to_potential,
                                wdvv_check)
from dgdeform.mc import (ExactMatrix, MatrixLieAlgebra, ObstructionReport, McSolution,
                         abelian_functor_eval, bch_product, deformed_cohomology,
                         extended_moduli_dims, gauge_act, gauge_equivalent, mc_residual,
                         smoothness_probe, solve_mc, tangent_space)
from dgdeform.polyvector import (PolyvectorSpace, bv_delta, dbar, finite_ks_model,
                                 schouten_bracket, tt_residual)
from dgdeform.scalars import ExactScalar
from dgdeform.tqft import Surface, disjoint_union, tqft_eval

# McSolutions from criteria 2-4, reused by criterion 9
SOLUTIONS = {}


def record(k, ok, detail=""):
    prev = ACCEPTANCE.get(k)
    if prev is not None:
        ok = ok and prev[0]
        detail = "; ".join(x for x in (prev[1], detail) if x)
    ACCEPTANCE[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")


def sign(k):
    return -1 if k % 2 else 1


# -- 1 --------------------------------------------------------------------------------

def _quintic():
    return extended_moduli_dims(load_model(FIXTURES / "quintic.hodge", "hodge-table").obj)


@pytest.mark.xfail(strict=True, reason="the table's own duality gives 208; the listed "
                   "six groups misplace the two 101-dimensional ones")
def test_c01_quintic_literal_206():
    start = time.perf_counter()
    r = _quintic()
    elapsed = time.perf_counter() - start
    # the six listed groups H^{0,q}(∧^p T) with their stated dimensions
    listed = {(3, 0): 1, (0, 0): 1, (0, 3): 1, (3, 3): 1, (1, 2): 101, (2, 1): 101}
    got = {pq: r.groups.get(pq, 0) for pq in listed}
    ok = r.total == 206 and got == listed and elapsed < 1
    record(1, ok, f"total {r.total} (expected 206), listed groups {got}")
    assert r.total == 206
    assert got == listed


def test_c01_quintic_corrected_208():
    start = time.perf_counter()
    r = _quintic()
    assert time.perf_counter() - start < 1
    assert r.total == 208
    assert r.groups[(1, 1)] == 101 and r.groups[(2, 2)] == 101
    assert r.groups[(1, 2)] == 1 and r.groups[(2, 1)] == 1
    assert sum(r.by_degree.values()) == r.total


# -- 2 --------------------------------------------------------------------------------

def test_c02_torus_pipeline():
    order = 6
    start = time.perf_counter()
    # oracle first: the (-i)-eigenvector of J_t, computed with sympy
    expected, _ = torus_phi_series([0, 1], [1], order)
    J = torus_family([ExactScalar(0, 1), 1], order)
    R = J.ring
    t = R.var("t")
    reduced = [[-t, -R.one() - t * t], [R.one(), t]]
    a = J.matrix == reduced
    b = not any(e for row in J.square_defect() for e in row)
    c = nijenhuis_order(J) is None
    phi = encoding_map(J)
    d = not mc_residual(phi)
    S = phi.space
    ti = S.ring.index("t")

    def t_poly(k, re, im):
        m = [0] * S.ring.nvars
        m[ti] = k
        return S.ring.monomial(tuple(m), ExactScalar(re, im))

    want = S.zero()
    for k, (re, im) in enumerate(expected):
        if re or im:
            want = want + S.term((0,), (0,), t_poly(k, re, im))
    e = phi.t_part(1) == S.term((0,), (0,), t_poly(1, 0, Fraction(-1, 2))) \
        and expected[1] == (0, Fraction(-1, 2))
    full = phi == want
    elapsed = time.perf_counter() - start
    SOLUTIONS["torus"] = phi
    ok = a and b and c and d and e and full and elapsed < 5
    record(2, ok, f"matrix {a}, J^2=-1 {b}, N=0 {c}, MC {d}, phi_1 {e}, "
                  f"phi series {full}, {elapsed:.2f}s")
    assert ok


# -- 3 --------------------------------------------------------------------------------

def test_c03_obstruction(capsys):
    L = load_model(FIXTURES / "obstructed-xy.dgla", "dgla").obj
    r = solve_mc(L, truncated(3), "x", 3)
    code = cli.main(["mc-solve", str(FIXTURES / "obstructed-xy.dgla"), "--seed", "x",
                     "--order", "3"])
    out = capsys.readouterr().out
    ok = (isinstance(r, ObstructionReport) and r.order == 2 and r.nonzero and code == 1
          and "obstructed at order 2" in out)
    SOLUTIONS["obstructed-partial"] = r.partial
    record(3, ok, f"obstruction at order {getattr(r, 'order', None)}, exit {code}")
    assert ok


# -- 4 --------------------------------------------------------------------------------

def test_c04_h2_zero_smoothness():
    rng = random.Random(4)
    sols = []
    failures = []
    for trial in range(20):
        L = random_surjective_dgla(rng, 10)
        assert L.dim <= 10
        assert L.complex().betti().get(2, 0) == 0
        rep = smoothness_probe(L, 8)
        for v in rep.verdicts:
            if not v.extends or v.solution.order != 8 or v.solution.residual():
                failures.append((trial, v.index))
            else:
                sols.append(v.solution)
    SOLUTIONS["smooth"] = sols
    record(4, not failures, f"{len(sols)} classes integrated to order 8, failures {failures}")
    assert not failures


# -- 5 --------------------------------------------------------------------------------

GRADED = [
    GradedArtinAlgebra([("e", 1)], 1),
    GradedArtinAlgebra([("e", -1)], 1),
    GradedArtinAlgebra([("t", 0), ("e", 1)], 2),
    GradedArtinAlgebra([("t", 0), ("e", -1)], 3),
    GradedArtinAlgebra([("e", -1), ("s", -2)], 2),
]


def _brute_force_dim(blocks, dims, A, p=2):
    """log_p of the number of closed degree-1 elements of L⊗m_A over F_p
    modulo d of degree-0 elements, by enumeration per monomial."""
    total = 0
    for m in A.ideal_basis():
        j = A.degree(m)
        i = 1 + j
        n1, n0 = dims.get(i, 0), dims.get(i - 1, 0)
        if not n1:
            continue
        d_out = blocks.get(i, [[0] * n1 for _ in range(dims.get(i + 1, 0))])
        d_in = blocks.get(i - 1, [[0] * n0 for _ in range(n1)]) if n0 else [[] for _ in range(n1)]
        count = count_classes_mod_p(d_out, d_in, n1, n0, p)
        k = 0
        while count > 1:
            assert count % p == 0
            count //= p
            k += 1
        total += k
    return total


def test_c05_abelian_functor():
    rng = random.Random(5)
    bad = []
    cases = 0
    for trial in range(20):
        L, blocks, dims = random_abelian_complex(rng)
        betti = L.complex().betti()
        algebras = [truncated(k) for k in range(1, 6)] + GRADED
        for A in algebras:
            got = abelian_functor_eval(L, A).dim
            formula = sum(betti.get(1 + A.degree(m), 0) for m in A.ideal_basis())
            brute = _brute_force_dim(blocks, dims, A)
            cases += 1
            if not got == formula == brute:
                bad.append((trial, repr(A), got, formula, brute))
    record(5, not bad, f"{cases} (complex, algebra) cases, mismatches {bad[:3]}")
    assert not bad


# -- 6 --------------------------------------------------------------------------------

def _random_element(amb, rng, degree):
    parts = {}
    idx = amb.base.space.indices(degree)
    for m in amb.algebra.ideal_basis():
        if amb.algebra.degree(m):
            continue
        vec = {i: rng.randint(-2, 2) for i in idx if rng.random() < 0.5}
        vec = {i: c for i, c in vec.items() if c}
        if vec:
            parts[m] = vec
    return amb.from_monomial_vectors(parts)


def _random_mc(amb, rng):
    L, A = amb.base, amb.algebra
    x = amb.zero()
    reps = tangent_space(L)
    if reps:
        seed = {}
        for r in reps:
            c = rng.randint(-1, 1)
            for i, v in r.items():
                seed[i] = seed.get(i, 0) + c * v
        seed = {i: v for i, v in seed.items() if v}
        if seed:
            s = solve_mc(amb, A, seed, A.truncation)
            if isinstance(s, McSolution):
                x = s.element
    return gauge_act(_random_element(amb, rng, 0), x)


def test_c06_gauge_suite():
    rng = random.Random(6)
    problems = []
    for trial in range(100):
        L = random_end_dgla(rng)
        A = random_artin(rng)
        amb = DglaOverArtin(L, A)
        x = _random_mc(amb, rng)
        assert not mc_residual(x)
        a = _random_element(amb, rng, 0)
        b = _random_element(amb, rng, 0)
        y = gauge_act(a, x)
        if mc_residual(y):
            problems.append((trial, "gauge_act leaves MC"))
        w = gauge_equivalent(x, y)
        if w is None or gauge_act(w, x) != y:
            problems.append((trial, "no witness"))
        if gauge_act(a, gauge_act(b, x)) != gauge_act(bch_product(a, b), x):
            problems.append((trial, "BCH composition"))
    record(6, not problems, f"100 pairs, problems {problems[:3]}")
    assert not problems


# -- 7 --------------------------------------------------------------------------------

def test_c07_bch_matrix_oracle():
    rng = random.Random(7)
    n = 4
    ctx = MatrixLieAlgebra(n)
    bad = 0
    for _ in range(50):
        a, b = ([[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if j > i else Fraction(0)
                  for j in range(n)] for i in range(n)] for _ in range(2))
        want = mat_log(mat_mul(mat_exp(a), mat_exp(b)))
        got = bch_product(ExactMatrix(a), ExactMatrix(b), ctx)
        if got != ExactMatrix(want):
            bad += 1
    record(7, bad == 0, f"50 pairs, mismatches {bad}")
    assert bad == 0


# -- 8 --------------------------------------------------------------------------------

def _polyvector_trials():
    rng = random.Random(8)
    for trial in range(200):
        n = rng.randint(1, 3)
        S = PolyvectorSpace(n, t_names=())
        degs = [rng.randint(-n + 1, n + 1) for _ in range(3)]
        a, b, c = (homogeneous_polyvector(S, rng, k, terms=4, max_deg=2) for k in degs)
        yield trial, S, a, b, c, degs


def test_c08_polyvector_identities():
    start = time.perf_counter()
    failures = {}
    tt_failures = 0
    for trial, S, a, b, c, (da, db, dc) in _polyvector_trials():
        br = schouten_bracket
        checks = {
            "antisymmetry": br(a, b) == br(b, a) * (-sign(da * db)),
            "jacobi": br(a, br(b, c)) == br(br(a, b), c) + br(b, br(a, c)) * sign(da * db),
            "dbar leibniz": dbar(br(a, b)) == br(dbar(a), b) + br(a, dbar(b)) * sign(da),
            "dbar^2": not dbar(dbar(a)),
            "delta^2": not bv_delta(bv_delta(a)),
            "dbar delta": dbar(bv_delta(a)) == -bv_delta(dbar(a)),
            "tian-todorov (derived)": not tt_residual(a, b, "derived"),
            "delta oracle": bv_delta(a) == delta_oracle(a) and bv_delta(b) == delta_oracle(b),
        }
        for name, ok in checks.items():
            if not ok:
                failures.setdefault(name, trial)
        if tt_residual(a, b, "displayed"):
            tt_failures += 1
    elapsed = time.perf_counter() - start
    ok = not failures and tt_failures == 0 and elapsed < 60
    record(8, ok, f"failures {failures}; displayed Tian-Todorov form fails on "
                  f"{tt_failures}/200 pairs; {elapsed:.1f}s")
    assert not failures
    assert elapsed < 60


@pytest.mark.xfail(strict=True, reason="the displayed sign (-1)^q [a,b] = Δ(ab) - Δa·b - "
                   "(-1)^{p+q} a·Δb fails already for a = z1, b = ∂/∂z1")
def test_c08_tian_todorov_displayed_form():
    bad = [trial for trial, S, a, b, c, _ in _polyvector_trials() if tt_residual(a, b, "displayed")]
    assert not bad


def test_c08_tian_todorov_minimal_counterexample():
    S = PolyvectorSpace(1, t_names=())
    a = S.term(coeff="z1")
    b = S.term(ddz=(0,))
    assert tt_residual(a, b, "displayed") == S.term(coeff=-2)
    assert not tt_residual(a, b, "derived")


# -- 9 --------------------------------------------------------------------------------

def _torus_gamma(phi, order):
    """φ as an element of the translation invariant torus model over Q[t]/t^(order+1)."""
    M = finite_ks_model(PolyvectorSpace(1, t_names=()))
    A = truncated(order)
    amb = DglaOverArtin(M.dgla, A)
    target = M.basis.index(next(e for e in M.basis if e.terms.keys() == {((0,), (0,))}))
    coeffs = {}
    f = phi.coefficient((0,), (0,))
    ti = phi.space.ring.index("t")
    for m, c in f.coeffs.items():
        assert not any(e for k, e in enumerate(m) if k != ti)
        coeffs[(m[ti],)] = c
    return amb.tensor({target: 1}, SeriesElement(A, coeffs))


def test_c09_deformed_differential():
    if not {"torus", "smooth"} <= SOLUTIONS.keys():
        test_c02_torus_pipeline()
        test_c04_h2_zero_smoothness()
    gammas = [("torus", _torus_gamma(SOLUTIONS["torus"], 6))]
    gammas += [(f"smooth[{k}]", s.element) for k, s in enumerate(SOLUTIONS["smooth"])]
    bad = []
    for name, g in gammas:
        r = deformed_cohomology(g)   # builds the complex, which checks d_γ² = 0
        if not r.free:
            bad.append((name, r.deformed_dim, r.base_rank))
    record(9, not bad, f"{len(gammas)} solutions, non-free {bad[:3]}")
    assert not bad


# -- 10 -------------------------------------------------------------------------------

def _random_potential(rng, n, N):
    A = GradedArtinAlgebra([(f"t{k}", 0) for k in range(n)], N)
    phi = A.zero()
    for m in A.basis():
        if sum(m) >= 3 and rng.random() < 0.5:
            phi = phi + A.monomial(m, Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
    low = A.zero()
    for m in A.basis():
        if sum(m) <= 2 and rng.random() < 0.5:
            low = low + A.monomial(m, rng.randint(-3, 3))
    return phi, phi + low


def test_c10_frobenius_wdvv():
    F = load_model(FIXTURES / "p2-cup.frob", "frobenius").obj
    assoc = wdvv_check(F.tensor, F.degrees)
    # perturb one order-2 coefficient: H^2 * H^2 = t1^2 H^2 instead of 0
    tensor = {k: dict(v) for k, v in F.tensor.items()}
    alg = F.algebra
    t1 = alg.monomial(tuple(2 if i == 1 else 0 for i in range(alg.nvars)))
    tensor.setdefault((2, 2), {})[2] = t1
    perturbed = wdvv_check(tensor, F.degrees)
    detected = (not perturbed.ok and perturbed.associativity is not None
                and len(perturbed.associativity) == 5 and perturbed.associativity[4] == 2)

    rng = random.Random(10)
    round_trip = 0
    for _ in range(20):
        n = rng.randint(1, 3)
        g = [[Fraction(int(i + j == n - 1)) for j in range(n)] for i in range(n)]
        want, phi = _random_potential(rng, n, 5)
        tensor = raise_tensor(potential_to_tensor(phi), g)
        back = tensor_to_potential(tensor, g, phi.algebra if not tensor else None)
        if not isinstance(back, NotPotential) and {m: c for m, c in back.coeffs.items() if sum(m) <= 5} == want.coeffs:
            round_trip += 1
    ok = assoc.ok and detected and round_trip == 20
    record(10, ok, f"fixture WDVV {assoc.ok}, perturbation witness {perturbed.associativity}, "
                   f"round trips {round_trip}/20")
    assert ok


# -- 11 -------------------------------------------------------------------------------

def test_c11_tqft():
    rng = random.Random(11)
    torus_ok = 0
    for _ in range(10):
        F = random_frobenius(rng, 4)
        if tqft_eval(F, Surface(1, 0, 0)) == F.dim:
            torus_ok += 1
    genus2 = {}
    a = load_model(FIXTURES / "genus2-a.surface", "surface").obj
    b = load_model(FIXTURES / "genus2-b.surface", "surface").obj
    torus = Surface(1, 0, 0)
    for name in ("dual-numbers.frob", "exterior.frob", "p2-cup.frob"):
        F = load_model(FIXTURES / name, "frobenius").obj
        za, zb = tqft_eval(F, a), tqft_eval(F, b)
        genus2[name] = za == zb
        u = tqft_eval(F, disjoint_union(torus, a))
        genus2[name] = genus2[name] and u == tqft_eval(F, torus) * za
    ok = torus_ok == 10 and all(genus2.values())
    record(11, ok, f"Z(torus) = dim A on {torus_ok}/10, genus 2 and union per fixture {genus2}")
    assert ok
