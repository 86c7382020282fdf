"""Command line interface.

Exit status: 0 when the check passes, 1 when the mathematics says no (an
obstruction, a failed axiom, a degenerate family), 2 for malformed input.
Reports are deterministic; ``--json`` prints the structured form.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .errors import DeformError, ParseError, PreconditionError, SemanticError, StructuralError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class Report:
    def __init__(self, command: str, digest: str):
        self.data = {"command": command, "inputs": digest, "verdicts": {}, "values": {},
                     "witnesses": {}}

    def verdict(self, name, ok: bool):
        self.data["verdicts"][name] = "pass" if ok else "fail"

    def value(self, name, v):
        self.data["values"][name] = v

    def witness(self, name, w):
        self.data["witnesses"][name] = w

    @property
    def ok(self) -> bool:
        return all(v == "pass" for v in self.data["verdicts"].values())

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.data, sort_keys=True, indent=2, ensure_ascii=False)
        lines = [f"command: {self.data['command']}", f"inputs: {self.data['inputs']}"]
        for section in ("values", "verdicts", "witnesses"):
            for k, v in self.data[section].items():
                if isinstance(v, (dict, list)):
                    v = json.dumps(v, sort_keys=True, ensure_ascii=False)
                lines.append(f"{k}: {v}")
        lines.append(f"result: {'pass' if self.ok else 'fail'}")
        return "\n".join(lines)


def _digest(args, files) -> str:
    h = hashlib.sha256()
    for k, v in sorted(vars(args).items()):
        if k in ("json", "func"):
            continue
        h.update(f"{k}={v};".encode())
    for f in files:
        with open(f, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()[:16]


def _load(path, kind):
    from .documents import load_model

    return load_model(path, kind).obj


def _parse_vector(L, text: str) -> dict:
    """``x`` or ``x:1, z:-1/2`` into a sparse vector."""
    from .scalars import parse_scalar

    vec = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, coeff = part.partition(":")
        try:
            c = parse_scalar(coeff.strip()) if coeff.strip() else parse_scalar("1")
        except ValueError as exc:
            raise StructuralError(str(exc)) from None
        i = L._idx(name.strip())
        vec[i] = vec.get(i, 0) + c
    if not vec:
        raise StructuralError("empty vector")
    return vec


def _parse_element(amb, text: str):
    """``x: t + t^2; z: 1/2*t^2`` into an element of L⊗A."""
    entries = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        name, _, series = part.partition(":")
        if not series.strip():
            raise StructuralError(f"missing coefficient series in {part!r}")
        entries[name.strip()] = series.strip()
    return amb.element(entries)


# -- verbs ---------------------------------------------------------------------

def cmd_check_dgla(args, rep):
    from .dgla import check_axioms

    L = _load(args.file, "dgla")
    rep.value("rank", L.dim)
    r = check_axioms(L)
    rep.verdict("axioms", r.ok)
    if not r.ok:
        rep.witness("axiom", r.axiom)
        rep.witness("basis", list(r.witness))
        if r.detail:
            rep.witness("detail", r.detail)


def _algebra(order, var="t"):
    from .artin import GradedArtinAlgebra

    if order < 1:
        raise StructuralError("order must be at least 1")
    return GradedArtinAlgebra([(var, 0)], order)


def cmd_mc_solve(args, rep):
    from .mc import ObstructionReport, solve_mc

    L = _load(args.file, "dgla")
    A = _algebra(args.order)
    res = solve_mc(L, A, _parse_vector(L, args.seed), args.order)
    if isinstance(res, ObstructionReport):
        rep.verdict("extends", False)
        rep.value("obstruction_order", res.order)
        rep.witness("obstruction", res.describe())
        rep.witness("cochain", str(res.cochain))
        return
    rep.verdict("extends", True)
    rep.value("order", res.order)
    rep.value("solution", str(res.element))
    rep.verdict("residual_zero", not res.residual())


def cmd_gauge_equiv(args, rep):
    from .dgla import DglaOverArtin
    from .mc import gauge_act, gauge_equivalent, mc_residual

    L = _load(args.file, "dgla")
    amb = DglaOverArtin(L, _algebra(args.order))
    x = _parse_element(amb, args.x)
    y = _parse_element(amb, args.y)
    for name, e in (("x", x), ("y", y)):
        if mc_residual(e):
            raise PreconditionError(f"{name} is not Maurer-Cartan", witness=str(mc_residual(e)))
    a = gauge_equivalent(x, y, args.order)
    rep.verdict("equivalent", a is not None)
    if a is not None:
        rep.value("witness", str(a))
        rep.verdict("witness_checks", gauge_act(a, x) == y)


def cmd_smoothness(args, rep):
    from .mc import smoothness_probe

    L = _load(args.file, "dgla")
    r = smoothness_probe(L, args.order)
    rep.value("tangent_dimension", len(r.verdicts))
    rep.value("max_order", r.max_order)
    classes = []
    for v in r.verdicts:
        entry = {"class": v.index, "representative": L.format_vector(v.representative),
                 "extends": v.extends}
        if v.obstruction is not None:
            entry["obstruction"] = v.obstruction.describe()
        classes.append(entry)
    rep.value("classes", classes)
    rep.verdict("all_extend", r.all_extend)


def cmd_extended_dims(args, rep):
    from .mc import extended_moduli_dims

    h = _load(args.file, "hodge-table")
    r = extended_moduli_dims(h)
    rep.value("total", r.total)
    rep.value("by_degree", {str(k): v for k, v in sorted(r.by_degree.items())})
    rep.value("groups", {f"H^{{0,{q}}}(wedge^{p} T)": v
                         for (p, q), v in sorted(r.groups.items()) if v})
    rep.value("conventions", r.metadata)


def cmd_torus_demo(args, rep):
    from .almost_complex import (_inverse, _matmul, encoding_map, integrability_crosscheck,
                                 torus_df, torus_family)
    from .poly import PolyRing

    if args.order < 1:
        raise StructuralError("order must be at least 1")
    tau = PolyRing(["t"], [(("t",), args.order)]).parse(args.tau)
    J = torus_family(tau, args.order)
    R = J.ring
    Df, Jbar = torus_df(tau, args.order)
    rep.value("J", [[str(e) for e in row] for row in J.matrix])
    rep.verdict("J_equals_Df_Jbar_Dfinv", _matmul(_matmul(Df, Jbar), _inverse(Df)) == J.matrix)
    # with Im tau identically 1 the matrix reduces to [[-R, -1 - R^2], [1, R]]
    if all(c.im == (0 if any(m) else 1) for m, c in tau.coeffs.items()):
        t = R.var("t")
        Rt = R.zero()
        for m, c in tau.coeffs.items():
            Rt = Rt + t ** m[0] * c.re
        reduced = [[-Rt, -R.one() - Rt * Rt], [R.one(), Rt]]
        rep.verdict("matches_reduced_matrix", reduced == J.matrix)
    rep.verdict("J_squared_is_minus_one", not any(e for row in J.square_defect() for e in row))
    report = integrability_crosscheck(J)
    rep.verdict("nijenhuis_vanishes", report.nijenhuis_ok)
    rep.verdict("maurer_cartan_holds", report.mc_ok)
    rep.verdict("verdicts_agree", report.agree)
    phi = encoding_map(J)
    rep.value("phi", str(phi))
    rep.value("phi_1", str(phi.t_part(1)))


def cmd_tt_audit(args, rep):
    from .polyvector import tt_audit

    r = tt_audit(args.n, args.max_p, args.max_q)
    rep.value("pairs_checked", r.checked)
    rep.value("derived_form", "(-1)^(q+p') [a,b] = D(ab) - (-1)^p' D(a) b - (-1)^q a D(b)")
    rep.verdict("derived_form_holds", r.derived_failures == 0)
    rep.value("displayed_form", "(-1)^q [a,b] = D(ab) - D(a) b - (-1)^(p+q) a D(b)")
    rep.verdict("displayed_form_holds", r.displayed_failures == 0)
    if r.counterexample is not None:
        a, b, res = r.counterexample
        rep.witness("displayed_form_failures", r.displayed_failures)
        rep.witness("minimal_counterexample", {"a": str(a), "b": str(b), "lhs_minus_rhs": str(res)})
        rep.witness("failing_bidegrees", [list(k) for k in r.failing_bidegrees])


def cmd_frobenius_check(args, rep):
    from .frobenius import check_frobenius_algebra

    F = _load(args.file, "frobenius")
    r = check_frobenius_algebra(F)
    rep.value("dimension", F.dim)
    for name, ok in r.verdicts.items():
        rep.verdict(name, ok)
        if not ok:
            w = r.witnesses.get(name)
            rep.witness(name, list(w) if isinstance(w, tuple) else w)


def cmd_wdvv(args, rep):
    from .frobenius import wdvv_check

    F = _load(args.file, "frobenius")
    r = wdvv_check(F.tensor, F.degrees)
    rep.verdict("commutativity", r.commutativity is None)
    rep.verdict("associativity", r.associativity is None)
    if r.commutativity:
        rep.witness("commutativity", dict(zip(("a", "b", "c", "order"), r.commutativity)))
    if r.associativity:
        rep.witness("associativity", dict(zip(("a", "b", "c", "d", "order"), r.associativity)))


def cmd_potential(args, rep):
    from .frobenius import NotPotential, tensor_to_potential

    F = _load(args.file, "frobenius")
    coords = F.algebra if F.algebra.nvars == F.dim else None
    r = tensor_to_potential(F.tensor, F.g, coords)
    rep.verdict("potential_exists", not isinstance(r, NotPotential))
    if isinstance(r, NotPotential):
        rep.witness("reason", r.reason)
        rep.witness("entry", list(r.witness) if isinstance(r.witness, tuple) else r.witness)
    else:
        rep.value("potential", str(r))


def cmd_family(args, rep):
    from .artin import GradedArtinAlgebra
    from .frobenius import check_frobenius_algebra, frobenius_family, top_form_trace, wdvv_check
    from .mc import ObstructionReport, solve_mc
    from .polyvector import PolyvectorSpace, finite_ks_model

    S = PolyvectorSpace(args.n, chart="mode", t_names=(), mode_order=args.mode_order)
    M = finite_ks_model(S)
    L = M.dgla
    A = GradedArtinAlgebra([("t", 0)], args.order)
    sol = solve_mc(L, A, _parse_vector(L, args.seed), args.order)
    rep.value("model_dimension", L.dim)
    if isinstance(sol, ObstructionReport):
        rep.verdict("seed_extends", False)
        rep.witness("obstruction", sol.describe())
        return
    rep.verdict("seed_extends", True)
    rep.value("gamma", str(sol.element))
    fam = frobenius_family(M, sol.element, trace=top_form_trace(M))
    rep.value("rank", fam.rank)
    rep.verdict("free", fam.free)
    if not fam.free:
        rep.witness("transferred_differential",
                    {str(a): {str(b): str(s) for b, s in row.items()}
                     for a, row in sorted(fam.delta_infinity.items())})
        return
    F = fam.data
    rep.value("basis", F.names)
    rep.value("tensor", {f"{F.names[i]}*{F.names[j]}": {F.names[k]: str(s) for k, s in sorted(row.items())}
                         for (i, j), row in sorted(F.tensor.items())})
    rep.verdict("frobenius_at_zero", check_frobenius_algebra(F).ok)
    rep.verdict("wdvv", wdvv_check(F.tensor, F.degrees).ok)


def cmd_tqft_eval(args, rep):
    from .tqft import tqft_eval

    F = _load(args.frobenius, "frobenius")
    S = _load(args.surface, "surface")
    rep.value("pipeline", S.pipeline)
    val = tqft_eval(F, S)
    if isinstance(val, dict):
        rep.value("matrix", {f"{list(o)}<-{list(i)}": str(c) for (o, i), c in sorted(val.items())})
    else:
        rep.value("value", str(val))


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dgdeform", description="Exact deformation theory toolkit.")
    sub = p.add_subparsers(dest="verb", metavar="VERB", required=True)

    def verb(name, func, help_, files=()):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--json", action="store_true", help="structured output")
        for f in files:
            s.add_argument(f)
        s.set_defaults(func=func, files=tuple(files))
        return s

    verb("check-dgla", cmd_check_dgla, "check the DGLA axioms", ["file"])
    s = verb("mc-solve", cmd_mc_solve, "integrate a seed order by order", ["file"])
    s.add_argument("--seed", required=True, help="closed degree-1 vector, e.g. x or 'x:1, z:-1/2'")
    s.add_argument("--order", type=int, required=True)
    s = verb("gauge-equiv", cmd_gauge_equiv, "search for a gauge witness", ["file"])
    s.add_argument("--x", required=True, help="element, e.g. 'x: t; z: 1/2*t^2'")
    s.add_argument("--y", required=True)
    s.add_argument("--order", type=int, required=True)
    s = verb("smoothness", cmd_smoothness, "probe every tangent class", ["file"])
    s.add_argument("--order", type=int, required=True)
    verb("extended-dims", cmd_extended_dims, "extended moduli dimensions from a Hodge table", ["file"])
    s = verb("torus-demo", cmd_torus_demo, "torus family cross-checks")
    s.add_argument("--tau", required=True, help="series in t with tau(0) = i")
    s.add_argument("--order", type=int, required=True)
    s = verb("tt-audit", cmd_tt_audit, "audit the Tian-Todorov identity on small polyvectors")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--max-p", type=int, default=2)
    s.add_argument("--max-q", type=int, default=1)
    verb("frobenius-check", cmd_frobenius_check, "Frobenius algebra axioms at t = 0", ["file"])
    verb("wdvv", cmd_wdvv, "associativity of a structure tensor", ["file"])
    verb("potential", cmd_potential, "integrate a structure tensor to a potential", ["file"])
    s = verb("family", cmd_family, "Frobenius family of a finite polyvector model")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--mode-order", type=int, default=2)
    s.add_argument("--seed", required=True, help="closed degree-1 basis vector of the model")
    s.add_argument("--order", type=int, default=2)
    verb("tqft-eval", cmd_tqft_eval, "evaluate a surface", ["frobenius", "surface"])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    files = [getattr(args, f) for f in args.files]
    try:
        rep = Report(args.verb, _digest(args, files))
        args.func(args, rep)
    except (OSError, ParseError, SemanticError, StructuralError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DeformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.render(args.json))
    return EXIT_OK if rep.ok else EXIT_FAIL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
