"""Two dimensional TQFT from a Frobenius algebra.

A surface is described by a pipeline of generators acting on a row of
circles.  Each step is ``name`` or ``name@k`` where k is the position of the
leftmost circle it touches (default 0):

    cap        inserts a circle carrying the unit      (0 -> 1)
    cup        applies the counit ε(a) = <a, 1>          (1 -> 0)
    pant       multiplies circles k, k+1               (2 -> 1)
    copant     comultiplies circle k                   (1 -> 2)
    cylinder   identity                                (1 -> 1)
    twist      swaps circles k, k+1 with Koszul sign   (2 -> 2)

States are sparse tensors ``{(i_1, ..., i_m): c}``.  Comultiplication is the
g-dual of multiplication, <Δa, y⊗z> = <a, yz>, with the pairing of tensors
<a⊗b, y⊗z> = (-1)^{|b||y|} <a,y><b,z>.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import PreconditionError, StructuralError
from .frobenius import FrobeniusData, check_frobenius_algebra
from .linalg import solve_field
from .scalars import ONE, ZERO

__all__ = [
    "GENERATORS",
    "Surface",
    "standard_pipeline",
    "disjoint_union",
    "Tqft",
    "tqft_eval",
    "handle_operator",
]

# (circles consumed, circles produced, euler characteristic contribution)
GENERATORS = {
    "cap": (0, 1, 1),
    "cup": (1, 0, 1),
    "pant": (2, 1, -1),
    "copant": (1, 2, -1),
    "cylinder": (1, 1, 0),
    "twist": (2, 2, 0),
}


def _parse_step(step: str):
    name, _, pos = step.partition("@")
    name = name.strip()
    if name not in GENERATORS:
        raise StructuralError(f"unknown generator {name!r}")
    try:
        k = int(pos) if pos else 0
    except ValueError:
        raise StructuralError(f"bad position in {step!r}") from None
    return name, k


def standard_pipeline(genus: int, inputs: int, outputs: int) -> list:
    """Merge all inputs, add the handles, then split into the outputs."""
    steps = []
    if inputs == 0:
        steps.append("cap")
    else:
        steps += ["pant"] * (inputs - 1)
    steps += ["copant", "pant"] * genus
    if outputs == 0:
        steps.append("cup")
    else:
        steps += ["copant"] * (outputs - 1)
    return steps


@dataclass
class Surface:
    genus: int
    inputs: int
    outputs: int
    pipeline: list | None = None
    components: int = 1

    def __post_init__(self):
        if min(self.genus, self.inputs, self.outputs) < 0:
            raise StructuralError("genus and boundary counts must be nonnegative")
        if self.pipeline is None:
            if self.components != 1:
                raise StructuralError("a disconnected surface needs an explicit pipeline")
            self.pipeline = standard_pipeline(self.genus, self.inputs, self.outputs)
        self.pipeline = list(self.pipeline)
        genus, comps = self.typecheck()
        if comps != self.components or genus != self.genus:
            raise StructuralError(
                f"pipeline describes {comps} component(s) of total genus {genus}, "
                f"declared {self.components} of genus {self.genus}")

    def typecheck(self):
        """Follow the circles through the pipeline.

        Returns (total genus, number of components); raises StructuralError
        if a step does not fit the current row of circles.
        """
        live = list(range(self.inputs))   # component label per circle
        parent = list(range(self.inputs))
        chi = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for step in self.pipeline:
            name, k = _parse_step(step)
            n_in, n_out, euler = GENERATORS[name]
            if k < 0 or k + n_in > len(live) or (n_in == 0 and k > len(live)):
                raise StructuralError(f"step {step!r} does not fit {len(live)} circle(s)")
            if name == "twist":
                # two crossing cylinders: nothing merges
                live[k], live[k + 1] = live[k + 1], live[k]
                continue
            touched = [find(c) for c in live[k:k + n_in]]
            if n_in == 0:
                parent.append(len(parent))
                comp = len(parent) - 1
            else:
                comp = touched[0]
                for other in touched[1:]:
                    if other != comp:
                        parent[other] = comp
                        chi[comp] = chi.get(comp, 0) + chi.pop(other, 0)
            chi[comp] = chi.get(comp, 0) + euler
            live[k:k + n_in] = [comp] * n_out
        if len(live) != self.outputs:
            raise StructuralError(f"pipeline ends with {len(live)} circle(s), "
                                  f"expected {self.outputs}")
        roots = {find(c) for c in range(len(parent))}
        total_chi = sum(chi.get(r, 0) for r in roots)
        # chi = 2 c - 2 g - (boundary circles); boundary circles count once
        genus2 = 2 * len(roots) - total_chi - self.inputs - self.outputs
        return genus2 // 2, len(roots)


def disjoint_union(a: Surface, b: Surface) -> Surface:
    """a ⊔ b with the circles of a to the left of those of b."""
    steps = list(a.pipeline)
    # a never reaches past its own circles, so b's circles stay to the right
    shift_out = a.outputs
    for step in b.pipeline:
        name, k = _parse_step(step)
        steps.append(f"{name}@{k + shift_out}")
    return Surface(a.genus + b.genus, a.inputs + b.inputs, a.outputs + b.outputs,
                   steps, a.components + b.components)


class Tqft:
    """Linear maps assigned to the generators by a Frobenius algebra."""

    def __init__(self, F: FrobeniusData, check: bool = True):
        if check:
            report = check_frobenius_algebra(F)
            if not report.ok:
                raise PreconditionError("not a Frobenius algebra", witness=report.describe())
        self.F = F
        self.n = F.dim
        self.par = [F.parity(i) for i in range(self.n)]
        self.mult = F.structure_constants()
        self.unit = F.unit
        self.counit = None
        if self.unit is not None:
            self.counit = {a: F.g[a][self.unit] for a in range(self.n) if F.g[a][self.unit]}
        self.comult = self._comultiplication()

    def _comultiplication(self):
        n, g, par = self.n, self.F.g, self.par
        pairs = list(product(range(n), repeat=2))
        # rows (y, z), columns (b, c): (-1)^{|c||y|} g_by g_cz
        rows = []
        for y, z in pairs:
            row = {}
            for col, (b, c) in enumerate(pairs):
                v = g[b][y] * g[c][z]
                if v:
                    row[col] = -v if (par[c] and par[y]) else v
            rows.append(row)
        out = {}
        for a in range(n):
            rhs = {}
            for r, (y, z) in enumerate(pairs):
                acc = ZERO
                for k, c in self.mult.get((y, z), {}).items():
                    acc = acc + c * g[a][k]
                if acc:
                    rhs[r] = acc
            sol = solve_field(rows, len(pairs), rhs)
            if sol is None:
                raise PreconditionError("comultiplication does not exist")
            out[a] = {pairs[col]: v for col, v in sol.items()}
        return out

    # -- step application -----------------------------------------------------------

    def step(self, state: dict, step: str) -> dict:
        name, k = _parse_step(step)
        out = {}

        def add(key, v):
            if v:
                val = out.get(key, ZERO) + v
                if val:
                    out[key] = val
                else:
                    out.pop(key, None)

        for key, c in state.items():
            if name == "cylinder":
                add(key, c)
            elif name == "cap":
                if self.unit is None:
                    raise StructuralError("cap needs a unit")
                add(key[:k] + (self.unit,) + key[k:], c)
            elif name == "cup":
                if self.counit is None:
                    raise StructuralError("cup needs a unit to define the counit")
                e = self.counit.get(key[k])
                if e:
                    sign = -1 if (self.par[key[k]] and sum(self.par[i] for i in key[:k]) % 2) else 1
                    add(key[:k] + key[k + 1:], c * e * sign)
            elif name == "pant":
                for m, v in self.mult.get((key[k], key[k + 1]), {}).items():
                    add(key[:k] + (m,) + key[k + 2:], c * v)
            elif name == "copant":
                # Δ has even degree here, so no sign from the circles on the left
                for (b, cc), v in self.comult[key[k]].items():
                    add(key[:k] + (b, cc) + key[k + 1:], c * v)
            elif name == "twist":
                a, b = key[k], key[k + 1]
                sign = -1 if (self.par[a] and self.par[b]) else 1
                add(key[:k] + (b, a) + key[k + 2:], c * sign)
        return out

    def run(self, pipeline, state: dict) -> dict:
        for s in pipeline:
            state = self.step(state, s)
        return state

    def evaluate(self, S: Surface):
        """Matrix {(out_tuple, in_tuple): c}, or a scalar for closed surfaces."""
        if S.inputs == 0 and S.outputs == 0:
            return self.run(S.pipeline, {(): ONE}).get((), ZERO)
        matrix = {}
        for inp in product(range(self.n), repeat=S.inputs):
            for out, v in self.run(S.pipeline, {inp: ONE}).items():
                matrix[(out, inp)] = v
        return matrix


def tqft_eval(F: FrobeniusData, S: Surface):
    return Tqft(F).evaluate(S)


def handle_operator(F: FrobeniusData) -> dict:
    """m∘Δ as a matrix {(row, col): c}."""
    T = Tqft(F)
    out = {}
    for a in range(T.n):
        for (m,), v in T.run(["copant", "pant"], {(a,): ONE}).items():
            out[(m, a)] = v
    return out
