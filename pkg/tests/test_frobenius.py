import random
from fractions import Fraction

import pytest

from builders import random_frobenius
from conftest import FIXTURES
from dgdeform.artin import GradedArtinAlgebra
from dgdeform.dgla import Dgla, DglaOverArtin
from dgdeform.documents import load_model
from dgdeform.errors import PreconditionError, StructuralError
from dgdeform.frobenius import (FrobeniusData, NotPotential, WedgeDgla, check_frobenius_algebra,
                                frobenius_family, lower_tensor, potential_to_tensor, raise_tensor,
                                tensor_to_potential, top_form_trace, wdvv_check)
from dgdeform.mc import solve_mc
from dgdeform.polyvector import PolyvectorSpace, finite_ks_model


def frob(name):
    return load_model(FIXTURES / name, "frobenius").obj


@pytest.mark.parametrize("name", ["dual-numbers.frob", "exterior.frob", "p2-cup.frob"])
def test_fixtures_are_frobenius(name):
    F = frob(name)
    assert check_frobenius_algebra(F).ok
    assert wdvv_check(F.tensor, F.degrees).ok


def test_degenerate_pairing_is_reported():
    r = check_frobenius_algebra(frob("dual-numbers-degenerate.frob"))
    assert not r.ok and not r.verdicts["nondegeneracy"]
    assert "nondegeneracy: FAIL" in r.describe()


def test_invariance_failure_witness():
    # Q[x]/(x^2 - x - 1) is associative, but <x x, 1> = 1 while <x, x 1> = 0
    F = FrobeniusData(["1", "x"], [0, 0], [[0, 1], [1, 0]],
                      {("1", "1"): {"1": 1}, ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1},
                       ("x", "x"): {"1": 1, "x": 1}}, unit="1")
    r = check_frobenius_algebra(F)
    assert r.verdicts["associativity"] and not r.verdicts["invariance"]
    assert r.witnesses["invariance"] == (0, 1, 1)


@pytest.mark.parametrize("seed", range(10))
def test_random_frobenius_algebras(seed):
    F = random_frobenius(random.Random(seed))
    assert check_frobenius_algebra(F).ok
    assert wdvv_check(F.tensor, F.degrees).ok


def test_p2_potential_gives_the_cup_product():
    F = frob("p2-cup.frob")
    sc = F.structure_constants()
    # h * h = h2, h * h2 = 0
    assert sc[(1, 1)] == {2: 1}
    assert (1, 2) not in sc
    assert lower_tensor(raise_tensor(potential_to_tensor(F.potential), F.g), F.g) == \
        potential_to_tensor(F.potential)


def test_not_a_potential():
    A = GradedArtinAlgebra([("t0", 0), ("t1", 0)], 2)
    g = [[0, 1], [1, 0]]
    # A_001 = 1 but A_010 = 0 breaks symmetry in the lowered indices
    tensor = {(0, 0): {0: A.constant(1)}}
    r = tensor_to_potential(tensor, g)
    assert isinstance(r, NotPotential) and not r
    assert "graded symmetric" in r.describe()


def test_potential_round_trip_with_odd_coordinate():
    A = GradedArtinAlgebra([("t0", 0), ("s", 1)], 6)
    phi = A.parse("t0^3 + t0^2*s + 2*t0^4*s")
    g = [[1, 0], [0, 1]]
    back = tensor_to_potential(raise_tensor(potential_to_tensor(phi), g), g)
    assert not isinstance(back, NotPotential)
    assert {m: c for m, c in back.coeffs.items() if sum(m) <= 6} == phi.coeffs


def test_potential_needs_enough_truncation():
    with pytest.raises(StructuralError):
        potential_to_tensor(GradedArtinAlgebra([("t", 0)], 2).parse("t^2"))


def test_metric_must_be_square():
    with pytest.raises(StructuralError):
        FrobeniusData(["a", "b"], [0, 0], [[1, 0]])


@pytest.mark.parametrize("n,seed", [(1, "1"), (1, "eta1*theta1"), (2, "eta1*theta2")])
def test_mode_families_are_free_and_satisfy_wdvv(n, seed):
    M = finite_ks_model(PolyvectorSpace(n, chart="mode", t_names=(), mode_order=1))
    A = GradedArtinAlgebra([("t", 0)], 2)
    sol = solve_mc(M.dgla, A, seed, 2)
    fam = frobenius_family(M, sol.element, trace=top_form_trace(M))
    assert fam.free and fam.rank == 4 ** n
    assert check_frobenius_algebra(fam.data.at_zero()).ok
    assert wdvv_check(fam.data.tensor, fam.data.degrees).ok


def test_degenerate_family():
    # [x, u] = v with d = 0: γ = t x is MC, but d_γ u = t v drops the rank
    L = Dgla([("u", 0), ("x", 1), ("v", 1)], bracket={("u", "x"): {"v": -1}})
    model = WedgeDgla(L, {}, [0, 1, 1])
    amb = DglaOverArtin(L, GradedArtinAlgebra([("t", 0)], 2))
    fam = frobenius_family(model, amb.element({"x": "t"}), g=[[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert not fam.free and fam.data is None
    assert fam.delta_infinity
    assert "degenerate" in fam.describe()


def test_family_needs_mc():
    L = Dgla([("x", 1), ("y", 2)], bracket={("x", "x"): {"y": 1}})
    amb = DglaOverArtin(L, GradedArtinAlgebra([("t", 0)], 2))
    with pytest.raises(PreconditionError):
        frobenius_family(WedgeDgla(L, {}, [1, 0]), amb.element({"x": "t"}), g=[[1, 0], [0, 1]])


def test_metric_inverse_is_exact():
    A = GradedArtinAlgebra([("t", 0)], 0)
    raised = raise_tensor({(0, 0, 0): A.constant(1)}, [[Fraction(2, 3)]])
    assert raised[(0, 0)][0] == A.constant(Fraction(3, 2))
