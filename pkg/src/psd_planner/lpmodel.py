"""Export the assignment problem as a linear integer program (CPLEX LP text).

The model can be handed to any MILP engine to cross-check the search-based
solvers. Logical or/and definitions are linearised in the standard way:

* or:  ``y >= x_i`` for every input and ``y <= sum(x_i)``
* and: ``y <= l_i`` for every literal and ``y >= sum(l_i) - (n - 1)``,
  where a literal is ``u`` or ``1 - u``.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .metric import Assignment, path_combo
from .solver import Instance, combo_bits


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: dict[str, Fraction]
    sense: str  # "<=", ">=" or "="
    rhs: Fraction

    def satisfied(self, values: dict[str, Fraction]) -> bool:
        lhs = sum((c * values[v] for v, c in self.coeffs.items()), Fraction(0))
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class LinearModel:
    binaries: list[str] = field(default_factory=list)
    continuous: list[str] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)
    comments: list[str] = field(default_factory=list)

    def count(self, prefix: str) -> int:
        return sum(1 for v in self.binaries + self.continuous if v.split("_", 1)[0] == prefix)

    def add(self, name: str, terms: Iterable[tuple[str, int | Fraction]], sense: str, rhs=0) -> None:
        coeffs: dict[str, Fraction] = {}
        for var, c in terms:
            coeffs[var] = coeffs.get(var, Fraction(0)) + Fraction(c)
        self.constraints.append(Constraint(name, coeffs, sense, Fraction(rhs)))

    def violations(self, values: dict[str, Fraction]) -> list[str]:
        return [c.name for c in self.constraints if not c.satisfied(values)]

    def objective_value(self, values: dict[str, Fraction]) -> Fraction:
        return sum((c * values[v] for v, c in self.objective.items()), Fraction(0))


def _b(m: int, n: int) -> str:
    return f"b_{m}_{n}"


def _u(m: int, r: int, j: int) -> str:
    return f"u_{m}_{r}_{j}"


def _f(bits: str, r: int, j: int) -> str:
    return f"f_{bits}_{r}_{j}"


def _F(bits: str, r: int) -> str:
    return f"F_{bits}_{r}"


def build_linear_model(instance: Instance) -> LinearModel:
    num_m = instance.num_manufacturers
    nodes = instance.topology.nodes
    model = LinearModel()
    model.comments = [
        f"topology {instance.topology.name!r}: {instance.topology.num_nodes} nodes, "
        f"{len(instance.flows)} flows, {num_m} manufacturers, k={instance.k}",
        "b_m_n   = 1 if node n is bought from manufacturer m",
        "u_m_r_j = 1 if manufacturer m occurs on path j of flow r (or over b)",
        "f_x_r_j = 1 if path j of flow r uses exactly combination x (and over u / 1-u)",
        "F_x_r   = 1 if some path of flow r uses combination x (or over f)",
        "pi_r    = sum_x q_x F_x_r, q_x = 1 / |x|; x is written with one bit per manufacturer",
        "or  y = OR(x_i):  y >= x_i for all i, y <= sum x_i",
        "and y = AND(l_i): y <= l_i for all i, y >= sum l_i - (n - 1), l_i = u or 1 - u",
    ]

    for m in range(num_m):
        for n in nodes:
            model.binaries.append(_b(m, n))
    for n in nodes:
        model.add(f"one_maker_{n}", ((_b(m, n), 1) for m in range(num_m)), "=", 1)

    bits = [combo_bits(x, num_m) for x in instance.combos]
    for r, ps in enumerate(instance.path_sets):
        for j, path in enumerate(ps.paths):
            for m in range(num_m):
                u = _u(m, r, j)
                model.binaries.append(u)
                for n in path.interior:
                    model.add(f"use_lo_{m}_{r}_{j}_{n}", [(u, 1), (_b(m, n), -1)], ">=")
                model.add(
                    f"use_hi_{m}_{r}_{j}",
                    [(u, 1)] + [(_b(m, n), -1) for n in path.interior],
                    "<=",
                )
            for x in bits:
                f = _f(x, r, j)
                model.binaries.append(f)
                zeros = x.count("0")
                for m, bit in enumerate(x):
                    if bit == "1":
                        model.add(f"combo_lo_{x}_{r}_{j}_{m}", [(f, 1), (_u(m, r, j), -1)], "<=")
                    else:
                        model.add(f"combo_lo_{x}_{r}_{j}_{m}", [(f, 1), (_u(m, r, j), 1)], "<=", 1)
                terms = [(f, 1)] + [
                    (_u(m, r, j), -1 if bit == "1" else 1) for m, bit in enumerate(x)
                ]
                model.add(f"combo_hi_{x}_{r}_{j}", terms, ">=", zeros - num_m + 1)
        for x in bits:
            big_f = _F(x, r)
            model.binaries.append(big_f)
            for j in range(len(ps.paths)):
                model.add(f"flow_lo_{x}_{r}_{j}", [(big_f, 1), (_f(x, r, j), -1)], ">=")
            model.add(
                f"flow_hi_{x}_{r}",
                [(big_f, 1)] + [(_f(x, r, j), -1) for j in range(len(ps.paths))],
                "<=",
            )
        pi = f"pi_{r}"
        model.continuous.append(pi)
        model.add(
            f"reward_{r}",
            [(pi, 1)] + [(_F(x, r), -q) for x, q in zip(bits, instance.combo_rewards)],
            "=",
        )
        weight = Fraction(ps.flow.weight)
        if weight:
            model.objective[pi] = weight
    return model


def induced_values(instance: Instance, assignment: Assignment) -> dict[str, Fraction]:
    """Variable values implied by an assignment through the defining equations."""
    num_m = instance.num_manufacturers
    one, zero = Fraction(1), Fraction(0)
    values: dict[str, Fraction] = {}
    for m in range(num_m):
        for n in instance.topology.nodes:
            values[_b(m, n)] = one if assignment[n] == m else zero
    bits = [combo_bits(x, num_m) for x in instance.combos]
    for r, ps in enumerate(instance.path_sets):
        used = set()
        for j, path in enumerate(ps.paths):
            combo = path_combo(path, assignment)
            here = combo_bits(combo, num_m)
            used.add(here)
            for m in range(num_m):
                values[_u(m, r, j)] = one if m in combo else zero
            for x in bits:
                values[_f(x, r, j)] = one if x == here else zero
        pi = zero
        for x, q in zip(bits, instance.combo_rewards):
            values[_F(x, r)] = one if x in used else zero
            if x in used:
                pi += q
        values[f"pi_{r}"] = pi
    return values


def _num(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value))


def _expr(coeffs: dict[str, Fraction]) -> list[str]:
    terms = []
    for var, c in coeffs.items():
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        terms.append(f"{sign} {var}" if mag == 1 else f"{sign} {_num(mag)} {var}")
    return terms


def _wrap(prefix: str, terms: list[str], tail: str = "") -> list[str]:
    lines, chunk = [], [prefix]
    for term in terms:
        chunk.append(term)
        if len(chunk) >= 9:
            lines.append(" ".join(chunk))
            chunk = ["   "]
    chunk.append(tail)
    lines.append(" ".join(part for part in chunk if part))
    return lines


def render_lp(model: LinearModel) -> str:
    out = [f"\\ {line}" for line in model.comments]
    out.append("Maximize")
    out.extend(_wrap(" obj:", _expr(model.objective)))
    out.append("Subject To")
    for c in model.constraints:
        out.extend(_wrap(f" {c.name}:", _expr(c.coeffs), f"{c.sense} {_num(c.rhs)}"))
    if model.continuous:
        out.append("Bounds")
        out.extend(f" {v} >= 0" for v in model.continuous)
    out.append("Binaries")
    for i in range(0, len(model.binaries), 8):
        out.append(" " + " ".join(model.binaries[i : i + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


def export_linear_model(instance: Instance) -> str:
    return render_lp(build_linear_model(instance))
