import json

import pytest

from conftest import FIXTURES
from dgdeform import cli


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out) if out.strip() else None, err


def test_check_dgla(capsys):
    code, data, _ = run_json(capsys, "check-dgla", FIXTURES / "heisenberg.dgla")
    assert code == 0 and data["command"] == "check-dgla"
    assert set(data["verdicts"].values()) == {"pass"}


def test_mc_solve_pass_and_obstructed(capsys):
    code, data, _ = run_json(capsys, "mc-solve", FIXTURES / "smooth-surjective.dgla",
                             "--seed", "x1", "--order", "4")
    assert code == 0
    code, out, _ = run(capsys, "mc-solve", FIXTURES / "obstructed-xy.dgla", "--seed", "x",
                       "--order", "3")
    assert code == 1
    assert "obstructed at order 2: t^2: [1/2]" in out
    assert out.rstrip().endswith("result: fail")


def test_gauge_equiv(capsys):
    code, data, _ = run_json(capsys, "gauge-equiv", FIXTURES / "smooth-surjective.dgla",
                             "--x", "x1: t; x2: -t^2", "--y", "x1: t; x2: -t^2; x3: t^2",
                             "--order", "2")
    assert code == 0 and data["values"]["witness"] == "u⊗-t^2"
    code, _, _ = run(capsys, "gauge-equiv", FIXTURES / "smooth-surjective.dgla",
                     "--x", "x1: t; x2: -t^2", "--y", "x1: 2*t; x2: -4*t^2", "--order", "2")
    assert code == 1


def test_smoothness(capsys):
    assert run(capsys, "smoothness", FIXTURES / "smooth-surjective.dgla", "--order", "5")[0] == 0
    assert run(capsys, "smoothness", FIXTURES / "obstructed-xy.dgla", "--order", "3")[0] == 1


def test_extended_dims(capsys):
    code, data, _ = run_json(capsys, "extended-dims", FIXTURES / "quintic.hodge")
    assert code == 0 and data["values"]["total"] == 208
    assert data["values"]["by_degree"]["0"] == 204


def test_torus_demo(capsys):
    code, data, _ = run_json(capsys, "torus-demo", "--tau", "i + t", "--order", "3")
    assert code == 0
    assert data["values"]["phi_1"] == "(-1/2i*t)*dzb1*d/dz1"
    code, _, err = run(capsys, "torus-demo", "--tau", "2*i + t", "--order", "3")
    assert code == 2 and err.startswith("error:")


def test_tt_audit_fails_honestly(capsys):
    code, out, _ = run(capsys, "tt-audit", "--n", "1", "--max-p", "1", "--max-q", "1")
    assert code == 1


@pytest.mark.parametrize("name,code", [("dual-numbers.frob", 0), ("exterior.frob", 0),
                                       ("dual-numbers-degenerate.frob", 1)])
def test_frobenius_check(capsys, name, code):
    assert run(capsys, "frobenius-check", FIXTURES / name)[0] == code


def test_wdvv_and_potential(capsys):
    assert run(capsys, "wdvv", FIXTURES / "p2-cup.frob")[0] == 0
    code, data, _ = run_json(capsys, "potential", FIXTURES / "p2-cup.frob")
    assert code == 0 and "potential" in data["values"]


def test_family(capsys):
    code, data, _ = run_json(capsys, "family", "--n", "1", "--mode-order", "1", "--seed", "1")
    assert code == 0
    assert data["values"]["rank"] == 4 and data["verdicts"]["wdvv"] == "pass"


def test_tqft_eval(capsys):
    code, data, _ = run_json(capsys, "tqft-eval", FIXTURES / "dual-numbers.frob",
                             FIXTURES / "two-tori.surface")
    assert code == 0 and data["values"]["value"] == "4"


def test_json_output_is_deterministic(capsys):
    a = run(capsys, "extended-dims", FIXTURES / "elliptic.hodge", "--json")[1]
    b = run(capsys, "extended-dims", FIXTURES / "elliptic.hodge", "--json")[1]
    assert a == b


@pytest.mark.parametrize("argv", [
    ["check-dgla", "/nonexistent/file.dgla"],
    ["check-dgla", str(FIXTURES / "torus.surface")],
    ["mc-solve", str(FIXTURES / "obstructed-xy.dgla"), "--seed", "q", "--order", "2"],
    ["mc-solve", str(FIXTURES / "obstructed-xy.dgla"), "--seed", "x", "--order", "x"],
    ["no-such-verb"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err
