"""Compile an instance into an explicit constrained quadratic model.

The model follows the big-M mixed formulation exactly as printed: binary
bin-use variables v_j, assignment variables u_{i,j}, orientation variables
r_{i,k} over the non-redundant sets, pairwise relative-position variables
b_{i,k,q}, and continuous corner coordinates. Quadratic terms appear only in
constraints (u*u in the non-overlap rows, v*u in bin activation, u*u in the
affinity equality); the objective is linear in the variables.

Three reductions are applied when ``reductions=True`` (the default):

* cube items contribute no orientation variables (their effective dims are
  constants),
* every item pair joined by a negative affinity loses its six b variables,
  its position-uniqueness row and its 6n non-overlap rows (they are
  pre-satisfied because the pair can never share a bin),
* avoid triples fix single b variables to 0 and drop their non-overlap
  rows; favour pairs fix all six b variables and keep only the favoured
  row per bin.

With ``reductions=False`` every variable exists and the avoid/favour
preferences are enforced through explicit ``relpos_fix`` equality rows
instead, which is useful for reduction-soundness testing.

All coefficients, bounds and evaluations are exact rationals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .core import (
    Instance,
    PackingSolution,
    allowed_orientations,
    effective_dims,
    kappa,
    nonredundant_orientations,
)

Number = Union[int, Fraction]


class ModelBuildError(ValueError):
    """The instance is infeasible by construction (detected while building)."""


class Sense(enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass(frozen=True)
class VariableRef:
    id: int
    tag: str
    binary: bool
    lower: Fraction
    upper: Fraction


class QuadExpr:
    """constant + sum(c_i * x_i) + sum(c_ab * x_a * x_b), exact coefficients.

    Quadratic keys are canonicalized with id_low <= id_high; zero
    coefficients are purged on demand.
    """

    __slots__ = ("constant", "linear", "quad")

    def __init__(self) -> None:
        self.constant: Fraction = Fraction(0)
        self.linear: dict[int, Fraction] = {}
        self.quad: dict[tuple[int, int], Fraction] = {}

    def add_const(self, c: Number) -> "QuadExpr":
        self.constant += Fraction(c)
        return self

    def add_linear(self, var: int, c: Number) -> "QuadExpr":
        self.linear[var] = self.linear.get(var, Fraction(0)) + Fraction(c)
        return self

    def add_quad(self, a: int, b: int, c: Number) -> "QuadExpr":
        key = (a, b) if a <= b else (b, a)
        self.quad[key] = self.quad.get(key, Fraction(0)) + Fraction(c)
        return self

    def purge_zeros(self) -> "QuadExpr":
        self.linear = {v: c for v, c in self.linear.items() if c != 0}
        self.quad = {k: c for k, c in self.quad.items() if c != 0}
        return self

    @property
    def is_quadratic(self) -> bool:
        return bool(self.quad)

    def value(self, values: Sequence[Fraction]) -> Fraction:
        total = self.constant
        for var, c in self.linear.items():
            total += c * values[var]
        for (a, b), c in self.quad.items():
            total += c * values[a] * values[b]
        return total


@dataclass(frozen=True)
class Constraint:
    label: str
    expr: QuadExpr
    sense: Sense
    rhs: Fraction

    def violation(self, values: Sequence[Fraction]) -> Fraction:
        lhs = self.expr.value(values)
        if self.sense is Sense.LE:
            return max(Fraction(0), lhs - self.rhs)
        if self.sense is Sense.GE:
            return max(Fraction(0), self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class ReductionInfo:
    """Census of what the reductions removed, kept separate by source."""

    p_minus: int = 0
    p_plus: int = 0
    relpos_vars_eliminated: int = 0
    nonoverlap_presatisfied_relpos: int = 0
    affinity_pairs_eliminated: int = 0
    affinity_vars_eliminated: int = 0
    nonoverlap_presatisfied_affinity: int = 0
    relpos_unique_dropped: int = 0


@dataclass
class QuadraticModel:
    variables: list[VariableRef]
    objective: QuadExpr
    objective_terms: dict[str, QuadExpr]
    constraints: list[Constraint]
    weights: tuple[Fraction, Fraction, Fraction]
    reductions: ReductionInfo
    m: int
    n: int
    var_id: dict[str, int] = field(default_factory=dict)

    def variable(self, tag: str) -> VariableRef:
        return self.variables[self.var_id[tag]]


@dataclass(frozen=True)
class ModelCounts:
    """Closed-form model size. The mandatory/optional split follows the
    size tables (optional deltas are signed); totals are what an audit of a
    built model reproduces."""

    binary_mandatory: int
    binary_optional: int
    continuous_mandatory: int
    continuous_optional: int
    quadratic_mandatory: int
    quadratic_optional: int
    linear_mandatory: int
    linear_optional: int

    @property
    def binary(self) -> int:
        return self.binary_mandatory + self.binary_optional

    @property
    def continuous(self) -> int:
        return self.continuous_mandatory + self.continuous_optional

    @property
    def quadratic_constraints(self) -> int:
        return self.quadratic_mandatory + self.quadratic_optional

    @property
    def linear_constraints(self) -> int:
        return self.linear_mandatory + self.linear_optional

    @property
    def variables(self) -> int:
        return self.binary + self.continuous

    @property
    def total_constraints(self) -> int:
        return self.quadratic_constraints + self.linear_constraints

    def as_dict(self) -> dict[str, int]:
        return {
            "binary": self.binary,
            "continuous": self.continuous,
            "quadratic_constraints": self.quadratic_constraints,
            "linear_constraints": self.linear_constraints,
        }


# ---------------------------------------------------------------------------
# reduction planning (shared by build_model / count_model / encode_solution)

@dataclass(frozen=True)
class _Plan:
    n: int
    m: int
    eliminated_pairs: frozenset[tuple[int, int]]
    favour_q: dict[tuple[int, int], int]
    avoid_qs: dict[tuple[int, int], frozenset[int]]
    fixed_b: dict[tuple[int, int, int], int]
    fix_rows: tuple[tuple[int, int, int, int], ...]  # reductions=False: (i,k,q,value)
    neg_item_pairs: tuple[tuple[int, int], ...]
    pos_item_pairs: tuple[tuple[int, int], ...]

    def b_free(self, pair: tuple[int, int]) -> tuple[int, ...]:
        if pair in self.eliminated_pairs:
            return ()
        return tuple(q for q in range(1, 7) if (pair[0], pair[1], q) not in self.fixed_b)

    def kept_rows(self, pair: tuple[int, int]) -> tuple[int, ...]:
        if pair in self.eliminated_pairs:
            return ()
        if pair in self.favour_q:
            return (self.favour_q[pair],)
        return self.b_free(pair)


def _category_item_pairs(instance: Instance,
                         cat_pairs: frozenset[tuple[int, int]]) -> list[tuple[int, int]]:
    out = set()
    for a, b in cat_pairs:
        ia = [it.index for it in instance.items if it.category == a]
        ib = [it.index for it in instance.items if it.category == b]
        for i in ia:
            for k in ib:
                if i != k:
                    out.add((min(i, k), max(i, k)))
    return sorted(out)


def _plan(instance: Instance, reductions: bool) -> _Plan:
    n, m = instance.bin.n, instance.m
    neg_item_pairs = _category_item_pairs(instance, instance.affinities.negative)
    pos_item_pairs = _category_item_pairs(instance, instance.affinities.positive)

    favour_raw: dict[tuple[int, int], int] = {}
    for i, k, q in sorted(instance.relpos_favour):
        pair = (i, k)
        if pair in favour_raw and favour_raw[pair] != q:
            raise ModelBuildError(
                f"pair {pair} favoured in two positions ({favour_raw[pair]} and {q})")
        favour_raw[pair] = q
    avoid_raw: dict[tuple[int, int], set[int]] = {}
    for i, k, q in sorted(instance.relpos_avoid):
        avoid_raw.setdefault((i, k), set()).add(q)

    if not reductions:
        fix_rows = tuple(
            (i, k, q, 1 if q == fq else 0)
            for (i, k), fq in sorted(favour_raw.items())
            for q in range(1, 7)
        ) + tuple(
            (i, k, q, 0)
            for (i, k), qs in sorted(avoid_raw.items())
            for q in sorted(qs)
        )
        return _Plan(n, m, frozenset(), {}, {}, {}, fix_rows,
                     tuple(neg_item_pairs), tuple(pos_item_pairs))

    eliminated = frozenset(neg_item_pairs) if n >= 2 else frozenset()
    favour_eff = {p: q for p, q in favour_raw.items() if p not in eliminated}
    avoid_eff = {p: frozenset(qs) for p, qs in avoid_raw.items() if p not in eliminated}

    fixed_b: dict[tuple[int, int, int], int] = {}
    for (i, k), fq in favour_eff.items():
        for q in range(1, 7):
            fixed_b[(i, k, q)] = 1 if q == fq else 0
    for (i, k), qs in avoid_eff.items():
        for q in qs:
            fixed_b[(i, k, q)] = 0
        if len(qs) == 6:
            raise ModelBuildError(
                f"pair ({i}, {k}) has all six relative positions avoided")

    return _Plan(n, m, eliminated, favour_eff, avoid_eff, fixed_b, (),
                 tuple(neg_item_pairs), tuple(pos_item_pairs))


# ---------------------------------------------------------------------------
# building

def _big_m(q: int, instance: Instance) -> int:
    if q in (1, 4):
        return instance.bin.n * instance.bin.L
    if q in (2, 5):
        return instance.bin.W
    return instance.bin.H


def build_model(instance: Instance,
                weights: tuple[Number, Number, Number] = (1, 1, 1),
                *, reductions: bool = True) -> QuadraticModel:
    """Compile the instance. Raises ModelBuildError when the relative-position
    preferences are contradictory."""
    plan = _plan(instance, reductions)
    n, m = plan.n, plan.m
    L, W, H = instance.bin.L, instance.bin.W, instance.bin.H
    w1, w2, w3 = (Fraction(w) for w in weights)
    has_com = instance.com_target is not None

    variables: list[VariableRef] = []
    var_id: dict[str, int] = {}

    def add_var(tag: str, binary: bool, lower: Number, upper: Number) -> int:
        vid = len(variables)
        variables.append(VariableRef(vid, tag, binary, Fraction(lower), Fraction(upper)))
        var_id[tag] = vid
        return vid

    if n >= 2:
        for j in range(1, n + 1):
            add_var(f"v_{j}", True, 0, 1)
        for i in range(m):
            for j in range(1, n + 1):
                add_var(f"u_{i}_{j}", True, 0, 1)
    for item in instance.items:
        for k in sorted(nonredundant_orientations(item)):
            add_var(f"r_{item.index}_{k}", True, 0, 1)
    pairs = [(i, k) for i in range(m) for k in range(i + 1, m)]
    for i, k in pairs:
        for q in plan.b_free((i, k)) if reductions else range(1, 7):
            add_var(f"b_{i}_{k}_{q}", True, 0, 1)
    for i in range(m):
        add_var(f"x_{i}", False, 0, n * L)
    for i in range(m):
        add_var(f"y_{i}", False, 0, W)
    for i in range(m):
        add_var(f"z_{i}", False, 0, H)
    if has_com:
        lt, wt = instance.com_target
        for i in range(m):
            add_var(f"xt_{i}", False, 0, max(lt, L - lt))
        for i in range(m):
            add_var(f"yt_{i}", False, 0, max(wt, W - wt))

    def eff_terms(item, axis: int) -> tuple[Fraction, list[tuple[int, Fraction]]]:
        """Effective dim along axis as (constant, linear r-terms)."""
        ks = sorted(nonredundant_orientations(item))
        if not ks:
            return Fraction(effective_dims(item, 1)[axis]), []
        return Fraction(0), [
            (var_id[f"r_{item.index}_{k}"], Fraction(effective_dims(item, k)[axis]))
            for k in ks
        ]

    def add_eff(expr: QuadExpr, item, axis: int, scale: Number = 1) -> None:
        const, terms = eff_terms(item, axis)
        expr.add_const(const * Fraction(scale))
        for vid, c in terms:
            expr.add_linear(vid, c * Fraction(scale))

    # objective terms
    objective_terms: dict[str, QuadExpr] = {}
    if n >= 2:
        o1 = QuadExpr()
        for j in range(1, n + 1):
            o1.add_linear(var_id[f"v_{j}"], 1)
        objective_terms["o1"] = o1
    o2 = QuadExpr()
    for item in instance.items:
        o2.add_linear(var_id[f"z_{item.index}"], Fraction(1, m * H))
        add_eff(o2, item, 2, Fraction(1, m * H))
    objective_terms["o2"] = o2
    if has_com:
        o3 = QuadExpr()
        for i in range(m):
            o3.add_linear(var_id[f"xt_{i}"], Fraction(1, m * L))
        for i in range(m):
            o3.add_linear(var_id[f"yt_{i}"], Fraction(1, m * W))
        objective_terms["o3"] = o3

    objective = QuadExpr()
    for name, wgt in (("o1", w1), ("o2", w2), ("o3", w3)):
        if name in objective_terms:
            term = objective_terms[name]
            objective.add_const(term.constant * wgt)
            for vid, c in term.linear.items():
                objective.add_linear(vid, c * wgt)
    objective.purge_zeros()

    constraints: list[Constraint] = []

    def add_constraint(label: str, expr: QuadExpr, sense: Sense, rhs: Number) -> None:
        rhs = Fraction(rhs) - expr.constant
        expr.constant = Fraction(0)
        expr.purge_zeros()
        constraints.append(Constraint(label, expr, sense, rhs))

    # orientation uniqueness, one row per non-cube item
    for item in instance.items:
        ks = sorted(nonredundant_orientations(item))
        if not ks:
            continue
        expr = QuadExpr()
        for k in ks:
            expr.add_linear(var_id[f"r_{item.index}_{k}"], 1)
        add_constraint(f"orientation_{item.index}", expr, Sense.EQ, 1)

    # pairwise non-overlap, big-M deactivated unless both items share bin j
    for i, k in pairs:
        it_i, it_k = instance.items[i], instance.items[k]
        for q in plan.kept_rows((i, k)):
            big = _big_m(q, instance)
            for j in range(1, n + 1):
                expr = QuadExpr()
                if n >= 2:
                    expr.add_quad(var_id[f"u_{i}_{j}"], var_id[f"u_{k}_{j}"], big)
                else:
                    expr.add_const(big)
                bkey = (i, k, q)
                if not reductions or bkey not in plan.fixed_b:
                    expr.add_linear(var_id[f"b_{i}_{k}_{q}"], big)
                else:
                    expr.add_const(big * plan.fixed_b[bkey])
                axis = {1: 0, 4: 0, 2: 1, 5: 1, 3: 2, 6: 2}[q]
                front, back = ((i, k) if q in (1, 2, 3) else (k, i))
                coord = "xyz"[axis]
                expr.add_linear(var_id[f"{coord}_{front}"], 1)
                add_eff(expr, instance.items[front], axis, 1)
                expr.add_linear(var_id[f"{coord}_{back}"], -1)
                add_constraint(f"nonoverlap_{i}_{k}_{q}_{j}", expr, Sense.LE, 2 * big)
        free = plan.b_free((i, k)) if reductions else tuple(range(1, 7))
        if free:
            expr = QuadExpr()
            for q in free:
                expr.add_linear(var_id[f"b_{i}_{k}_{q}"], 1)
            add_constraint(f"relpos_unique_{i}_{k}", expr, Sense.EQ, 1)

    if n >= 2:
        for i in range(m):
            expr = QuadExpr()
            for j in range(1, n + 1):
                expr.add_linear(var_id[f"u_{i}_{j}"], 1)
            add_constraint(f"one_bin_{i}", expr, Sense.EQ, 1)
        for j in range(1, n + 1):
            expr = QuadExpr()
            for i in range(m):
                expr.add_linear(var_id[f"u_{i}_{j}"], 1)
                expr.add_quad(var_id[f"v_{j}"], var_id[f"u_{i}_{j}"], -1)
            add_constraint(f"bin_activation_{j}", expr, Sense.LE, 0)
        for j in range(1, n):
            expr = QuadExpr()
            expr.add_linear(var_id[f"v_{j}"], 1)
            expr.add_linear(var_id[f"v_{j + 1}"], -1)
            add_constraint(f"sequential_bins_{j}", expr, Sense.GE, 0)

    # bin boundaries
    for item in instance.items:
        i = item.index
        for j in range(1, n + 1):
            expr = QuadExpr()
            expr.add_linear(var_id[f"x_{i}"], 1)
            add_eff(expr, item, 0, 1)
            if n >= 2:
                expr.add_linear(var_id[f"u_{i}_{j}"], n * L)
                add_constraint(f"boundary_x_{i}_{j}", expr, Sense.LE, j * L + n * L)
            else:
                add_constraint(f"boundary_x_{i}_{j}", expr, Sense.LE, L)
        if n >= 2:
            for j in range(2, n + 1):
                expr = QuadExpr()
                expr.add_linear(var_id[f"x_{i}"], 1)
                expr.add_linear(var_id[f"u_{i}_{j}"], -(j - 1) * L)
                add_constraint(f"boundary_xlo_{i}_{j}", expr, Sense.GE, 0)
        for j in range(1, n + 1):
            expr = QuadExpr()
            expr.add_linear(var_id[f"y_{i}"], 1)
            add_eff(expr, item, 1, 1)
            if n >= 2:
                expr.add_linear(var_id[f"u_{i}_{j}"], W)
                add_constraint(f"boundary_y_{i}_{j}", expr, Sense.LE, 2 * W)
            else:
                add_constraint(f"boundary_y_{i}_{j}", expr, Sense.LE, W)
        for j in range(1, n + 1):
            expr = QuadExpr()
            expr.add_linear(var_id[f"z_{i}"], 1)
            add_eff(expr, item, 2, 1)
            if n >= 2:
                expr.add_linear(var_id[f"u_{i}_{j}"], H)
                add_constraint(f"boundary_z_{i}_{j}", expr, Sense.LE, 2 * H)
            else:
                add_constraint(f"boundary_z_{i}_{j}", expr, Sense.LE, H)

    # optional rows exist only when bins are selectable (the n=1 size tables
    # carry no overweight/affinity rows: with a single bin they are constants)
    if n >= 2:
        if instance.bin.max_weight is not None:
            for j in range(1, n + 1):
                expr = QuadExpr()
                for item in instance.items:
                    expr.add_linear(var_id[f"u_{item.index}_{j}"], item.mu)
                add_constraint(f"overweight_{j}", expr, Sense.LE, instance.bin.max_weight)
        neg_pairs, pos_pairs = plan.neg_item_pairs, plan.pos_item_pairs
        if neg_pairs or pos_pairs:
            expr = QuadExpr()
            for i, k in neg_pairs:
                for j in range(1, n + 1):
                    expr.add_quad(var_id[f"u_{i}_{j}"], var_id[f"u_{k}_{j}"], 1)
            for i, k in pos_pairs:
                for j in range(1, n + 1):
                    expr.add_quad(var_id[f"u_{i}_{j}"], var_id[f"u_{k}_{j}"], -1)
            if neg_pairs and pos_pairs:
                label = "affinity_combined"
            elif neg_pairs:
                label = "affinity_negative"
            else:
                label = "affinity_positive"
            add_constraint(label, expr, Sense.EQ, -len(pos_pairs))

    if has_com:
        lt, wt = instance.com_target
        for item in instance.items:
            i = item.index
            for sign, suffix in ((1, "plus"), (-1, "minus")):
                expr = QuadExpr()
                expr.add_linear(var_id[f"x_{i}"], sign)
                add_eff(expr, item, 0, Fraction(sign, 2))
                if n >= 2:
                    for j in range(2, n + 1):
                        expr.add_linear(var_id[f"u_{i}_{j}"], -sign * (j - 1) * L)
                expr.add_linear(var_id[f"xt_{i}"], -1)
                add_constraint(f"loadbal_x_{suffix}_{i}", expr, Sense.LE, sign * lt)
            for sign, suffix in ((1, "plus"), (-1, "minus")):
                expr = QuadExpr()
                expr.add_linear(var_id[f"y_{i}"], sign)
                add_eff(expr, item, 1, Fraction(sign, 2))
                expr.add_linear(var_id[f"yt_{i}"], -1)
                add_constraint(f"loadbal_y_{suffix}_{i}", expr, Sense.LE, sign * wt)

    if not reductions:
        for i, k, q, val in plan.fix_rows:
            expr = QuadExpr()
            expr.add_linear(var_id[f"b_{i}_{k}_{q}"], 1)
            add_constraint(f"relpos_fix_{i}_{k}_{q}", expr, Sense.EQ, val)

    p_minus = sum(len(qs) for qs in plan.avoid_qs.values())
    p_plus = len(plan.favour_q)
    negelim = len(plan.eliminated_pairs)
    info = ReductionInfo(
        p_minus=p_minus,
        p_plus=p_plus,
        relpos_vars_eliminated=p_minus + 6 * p_plus,
        nonoverlap_presatisfied_relpos=n * (p_minus + 5 * p_plus),
        affinity_pairs_eliminated=negelim,
        affinity_vars_eliminated=6 * negelim,
        nonoverlap_presatisfied_affinity=6 * n * negelim,
        relpos_unique_dropped=p_plus + negelim,
    ) if reductions else ReductionInfo()

    return QuadraticModel(
        variables=variables,
        objective=objective,
        objective_terms=objective_terms,
        constraints=constraints,
        weights=(w1, w2, w3),
        reductions=info,
        m=m,
        n=n,
        var_id=var_id,
    )


# ---------------------------------------------------------------------------
# closed-form counting

def count_model(instance: Instance, *, reductions: bool = True) -> ModelCounts:
    """Evaluate the size tables without building the model."""
    plan = _plan(instance, reductions)
    n, m = plan.n, plan.m
    c2 = m * (m - 1) // 2
    kap = kappa(instance)
    ic = sum(1 for it in instance.items if not nonredundant_orientations(it))
    has_m = instance.bin.max_weight is not None
    has_com = instance.com_target is not None
    has_aff = bool(plan.neg_item_pairs or plan.pos_item_pairs)

    p_minus = sum(len(qs) for qs in plan.avoid_qs.values())
    p_plus = len(plan.favour_q)
    negelim = len(plan.eliminated_pairs)

    binary_mand = 6 * c2 + kap + (n * (m + 1) if n >= 2 else 0)
    binary_opt = -(p_minus + 6 * p_plus) - 6 * negelim
    cont_mand = 3 * m
    cont_opt = 2 * m if has_com else 0

    if n == 1:
        quad_mand = 0
        quad_opt = 0
        lin_mand = 7 * c2 + 4 * m - ic
        lin_opt = (4 * m if has_com else 0) - (p_minus + 6 * p_plus)
    else:
        quad_mand = 6 * n * c2 + n
        quad_opt = (1 if has_aff else 0) - n * (p_minus + 5 * p_plus) - 6 * n * negelim
        lin_mand = c2 + n * (4 * m + 1) + m - 1 - ic
        lin_opt = ((n if has_m else 0) + (4 * m if has_com else 0)
                   - p_plus - negelim)

    if not reductions:
        # explicit fix rows instead of eliminations
        raw_minus = sum(1 for _ in instance.relpos_avoid)
        raw_plus = len({(i, k) for i, k, _ in instance.relpos_favour})
        lin_opt += raw_minus + 6 * raw_plus

    return ModelCounts(binary_mand, binary_opt, cont_mand, cont_opt,
                       quad_mand, quad_opt, lin_mand, lin_opt)


def audit_counts(model: QuadraticModel) -> ModelCounts:
    """Census of an already-built model. The mandatory/optional split here is
    by family (optional: xt/yt variables; overweight/affinity/loadbal/
    relpos_fix constraints); totals are directly comparable to count_model."""
    bin_mand = sum(1 for v in model.variables if v.binary)
    cont_opt = sum(1 for v in model.variables
                   if not v.binary and v.tag.split("_")[0] in ("xt", "yt"))
    cont_mand = sum(1 for v in model.variables if not v.binary) - cont_opt
    optional_families = ("overweight", "affinity", "loadbal", "relpos_fix")
    quad_mand = quad_opt = lin_mand = lin_opt = 0
    for con in model.constraints:
        opt = con.label.startswith(optional_families)
        if con.expr.is_quadratic:
            quad_mand, quad_opt = quad_mand + (not opt), quad_opt + opt
        else:
            lin_mand, lin_opt = lin_mand + (not opt), lin_opt + opt
    return ModelCounts(bin_mand, 0, cont_mand, cont_opt,
                       quad_mand, quad_opt, lin_mand, lin_opt)


# ---------------------------------------------------------------------------
# evaluation / encoding

Assignment = Mapping[str, Number]


def _values_vector(model: QuadraticModel, assignment: Assignment) -> list[Fraction]:
    values: list[Fraction] = []
    for var in model.variables:
        if var.tag not in assignment:
            raise ValueError(f"assignment is missing variable {var.tag}")
        values.append(Fraction(assignment[var.tag]))
    return values


def evaluate(model: QuadraticModel, assignment: Assignment, *,
             check_bounds: bool = True
             ) -> tuple[Fraction, list[tuple[str, Fraction]]]:
    """Exact objective value and all violated constraints with magnitudes."""
    values = _values_vector(model, assignment)
    violations: list[tuple[str, Fraction]] = []
    if check_bounds:
        for var in model.variables:
            val = values[var.id]
            excess = max(var.lower - val, val - var.upper, Fraction(0))
            if var.binary and val not in (0, 1):
                excess = max(excess, min(abs(val), abs(val - 1)))
            if excess > 0:
                violations.append((f"bound_{var.tag}", excess))
    for con in model.constraints:
        v = con.violation(values)
        if v > 0:
            violations.append((con.label, v))
    return model.objective.value(values), violations


def objective_breakdown(model: QuadraticModel, assignment: Assignment) -> dict[str, Fraction]:
    values = _values_vector(model, assignment)
    return {name: term.value(values) for name, term in model.objective_terms.items()}


def encode_solution(instance: Instance, solution: PackingSolution, *,
                    reductions: bool = True) -> dict[str, Fraction]:
    """Assignment for every model variable realized by the given placements.

    Relative positions pick the smallest axis separation consistent with the
    geometry (any q is valid for pairs in different bins, so q=1 wins there).
    Raises ValueError when two placed boxes sharing a bin admit no separating
    axis (overlap) or an orientation is not in the item's non-redundant set.
    """
    plan = _plan(instance, reductions)
    n, m = plan.n, plan.m
    L = instance.bin.L
    by_item: dict[int, object] = {}
    for p in solution.placements:
        if p.item in by_item:
            raise ValueError(f"item {p.item} placed twice")
        by_item[p.item] = p
    if sorted(by_item) != list(range(m)):
        raise ValueError("solution must place every item exactly once")

    out: dict[str, Fraction] = {}
    used_bins = {p.bin for p in solution.placements}
    if n >= 2:
        for j in range(1, n + 1):
            out[f"v_{j}"] = Fraction(1 if j in used_bins else 0)
        for i in range(m):
            for j in range(1, n + 1):
                out[f"u_{i}_{j}"] = Fraction(1 if by_item[i].bin == j else 0)

    for item in instance.items:
        p = by_item[item.index]
        ks = sorted(nonredundant_orientations(item))
        if p.k not in allowed_orientations(item):
            raise ValueError(
                f"item {item.index}: orientation {p.k} outside the non-redundant set")
        for k in ks:
            out[f"r_{item.index}_{k}"] = Fraction(1 if k == p.k else 0)

    dims = {i: effective_dims(instance.items[i], by_item[i].k) for i in range(m)}
    for i in range(m):
        p = by_item[i]
        out[f"x_{i}"] = Fraction(p.x)
        out[f"y_{i}"] = Fraction(p.y)
        out[f"z_{i}"] = Fraction(p.z)

    def valid_qs(i: int, k: int) -> tuple[int, ...]:
        pi, pk = by_item[i], by_item[k]
        if pi.bin != pk.bin:
            return tuple(range(1, 7))
        di, dk = dims[i], dims[k]
        ok = []
        if pi.x + di[0] <= pk.x:
            ok.append(1)
        if pi.y + di[1] <= pk.y:
            ok.append(2)
        if pi.z + di[2] <= pk.z:
            ok.append(3)
        if pk.x + dk[0] <= pi.x:
            ok.append(4)
        if pk.y + dk[1] <= pi.y:
            ok.append(5)
        if pk.z + dk[2] <= pi.z:
            ok.append(6)
        return tuple(ok)

    # the relative-position choice follows the preference fixings in both
    # variants (avoided positions are never chosen while an alternative is
    # valid; favoured pairs always take their position), so an assignment is
    # violation-free in the reduced model iff it is in the explicit-row one
    choice_plan = plan if reductions else _plan(instance, True)
    for i in range(m):
        for k in range(i + 1, m):
            pair = (i, k)
            emit = plan.b_free(pair) if reductions else tuple(range(1, 7))
            if not emit:
                continue
            valid = valid_qs(i, k)
            if not valid:
                raise ValueError(f"items {i} and {k} overlap in bin {by_item[i].bin}")
            if pair in choice_plan.favour_q:
                chosen = choice_plan.favour_q[pair]
            else:
                if pair in choice_plan.eliminated_pairs:
                    selectable = tuple(range(1, 7))
                else:
                    selectable = choice_plan.b_free(pair)
                pick = [q for q in valid if q in selectable]
                chosen = pick[0] if pick else selectable[0]
            for q in emit:
                out[f"b_{i}_{k}_{q}"] = Fraction(1 if q == chosen else 0)

    if instance.com_target is not None:
        lt, wt = instance.com_target
        for i in range(m):
            p = by_item[i]
            cx = (Fraction(p.x) + Fraction(dims[i][0], 2)) % L
            out[f"xt_{i}"] = abs(cx - lt)
            out[f"yt_{i}"] = abs(Fraction(p.y) + Fraction(dims[i][1], 2) - wt)
    return out
