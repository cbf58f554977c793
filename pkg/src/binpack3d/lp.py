"""LP-format export of a compiled model.

Variable names are the structured tags; the objective is linear (the model
puts quadratics only in constraints), quadratic constraint terms use the
bracketed `[ c a * b ]` syntax. Output is byte-deterministic: terms sorted
by tag, constraints in model order, bounds and binaries sorted by tag.

Two liberties vs. strict CPLEX-LP, noted for consumers: quadratic equality
rows keep `=` (strict LP allows only <=/>= there), and a nonzero objective
constant is written as a literal leading term.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Union

from .model import QuadraticModel, Sense


def _num(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return repr(float(c))


def _join(pieces: list[tuple[str, bool]]) -> str:
    out = []
    for idx, (text, negative) in enumerate(pieces):
        prefix = "- " if negative else ("" if idx == 0 else "+ ")
        out.append(prefix + text)
    return " ".join(out)


def _terms(model: QuadraticModel, expr) -> str:
    pieces: list[tuple[str, bool]] = []
    if expr.constant != 0:
        pieces.append((_num(abs(expr.constant)), expr.constant < 0))
    for tag, c in sorted((model.variables[v].tag, c) for v, c in expr.linear.items()):
        pieces.append((f"{_num(abs(c))} {tag}", c < 0))
    quad = sorted(
        (model.variables[a].tag, model.variables[b].tag, c)
        for (a, b), c in expr.quad.items()
    )
    if quad:
        inner = _join([(f"{_num(abs(c))} {ta} * {tb}", c < 0) for ta, tb, c in quad])
        pieces.append((f"[ {inner} ]", False))
    return _join(pieces) if pieces else "0"


def lp_string(model: QuadraticModel) -> str:
    lines = ["Minimize", f" obj: {_terms(model, model.objective)}", "Subject To"]
    for con in model.constraints:
        sense = {Sense.LE: "<=", Sense.EQ: "=", Sense.GE: ">="}[con.sense]
        lines.append(f" {con.label}: {_terms(model, con.expr)} {sense} {_num(con.rhs)}")
    lines.append("Bounds")
    for var in sorted(model.variables, key=lambda v: v.tag):
        if not var.binary:
            lines.append(f" {_num(var.lower)} <= {var.tag} <= {_num(var.upper)}")
    binaries = sorted(v.tag for v in model.variables if v.binary)
    if binaries:
        lines.append("Binary")
        for tag in binaries:
            lines.append(f" {tag}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: QuadraticModel, path: Union[str, Path]) -> None:
    Path(path).write_text(lp_string(model), encoding="utf-8")
