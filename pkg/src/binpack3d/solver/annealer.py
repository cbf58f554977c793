"""Penalty-method simulated annealing over the compiled quadratic model.

State is a full assignment (binary flips, integer coordinate steps, plus
one-hot repair proposals for the u/b/v groups); energy is the float
objective plus a growing penalty weight times the sum of squared constraint
violations. A run only yields a solution when its best assignment has zero
violations under exact rational evaluation.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from typing import Optional

from ..core import (
    Instance,
    PackingSolution,
    Placement,
    effective_dims,
    nonredundant_orientations,
)
from ..model import QuadraticModel, Sense, build_model, evaluate
from ..validate import check, objectives
from .config import SolveResult, SolverConfig, mix_seed, solution_energy

_LE, _EQ, _GE = 0, 1, 2


class _FastModel:
    """Float view of the model for the annealing loop."""

    def __init__(self, model: QuadraticModel) -> None:
        self.model = model
        self.nvars = len(model.variables)
        self.binary = [v.binary for v in model.variables]
        self.lower = [float(v.lower) for v in model.variables]
        self.upper = [float(v.upper) for v in model.variables]
        self.obj_const = float(model.objective.constant)
        self.obj_lin = [(vid, float(c)) for vid, c in model.objective.linear.items()]
        sense_code = {Sense.LE: _LE, Sense.EQ: _EQ, Sense.GE: _GE}
        self.cons = []
        for con in model.constraints:
            self.cons.append((
                sense_code[con.sense],
                float(con.rhs),
                [(vid, float(c)) for vid, c in con.expr.linear.items()],
                [(a, b, float(c)) for (a, b), c in con.expr.quad.items()],
            ))

    def energy_parts(self, values: list[float]) -> tuple[float, float]:
        obj = self.obj_const
        for vid, c in self.obj_lin:
            obj += c * values[vid]
        viol2 = 0.0
        for sense, rhs, lin, quad in self.cons:
            lhs = 0.0
            for vid, c in lin:
                lhs += c * values[vid]
            for a, b, c in quad:
                lhs += c * values[a] * values[b]
            if sense == _LE:
                v = lhs - rhs
                if v > 0:
                    viol2 += v * v
            elif sense == _GE:
                v = rhs - lhs
                if v > 0:
                    viol2 += v * v
            else:
                v = lhs - rhs
                viol2 += v * v
        return obj, viol2


def _initial_values(instance: Instance, model: QuadraticModel,
                    rng: random.Random) -> list[int]:
    """Everything starts in bin 1 at random in-bin coordinates; the repair
    moves spread items out from there."""
    values = [0] * len(model.variables)
    n, m = model.n, model.m
    L = instance.bin.L
    if n >= 2:
        for i in range(m):
            values[model.var_id[f"u_{i}_1"]] = 1
        values[model.var_id["v_1"]] = 1
    for item in instance.items:
        ks = sorted(nonredundant_orientations(item))
        if ks:
            values[model.var_id[f"r_{item.index}_{ks[rng.randrange(len(ks))]}"]] = 1
    pair_qs: dict[tuple[int, int], list[int]] = {}
    for var in model.variables:
        if var.tag.startswith("b_"):
            _, i, k, q = var.tag.split("_")
            pair_qs.setdefault((int(i), int(k)), []).append(int(q))
    for (i, k), qs in pair_qs.items():
        q = qs[rng.randrange(len(qs))]
        values[model.var_id[f"b_{i}_{k}_{q}"]] = 1
    for var in model.variables:
        if not var.binary and var.tag[0] in "xyz":
            hi = min(int(var.upper), L - 1) if var.tag[0] == "x" else int(var.upper)
            values[var.id] = rng.randint(0, max(0, hi))
    return values


def _decode(instance: Instance, model: QuadraticModel,
            values: list[int]) -> Optional[PackingSolution]:
    n, m = model.n, model.m
    placements = []
    for i in range(m):
        if n >= 2:
            bins = [j for j in range(1, n + 1) if values[model.var_id[f"u_{i}_{j}"]] == 1]
            if len(bins) != 1:
                return None
            j = bins[0]
        else:
            j = 1
        item = instance.items[i]
        ks = sorted(nonredundant_orientations(item))
        if ks:
            chosen = [k for k in ks if values[model.var_id[f"r_{i}_{k}"]] == 1]
            if len(chosen) != 1:
                return None
            k = chosen[0]
        else:
            k = 1
        x = int(values[model.var_id[f"x_{i}"]])
        y = int(values[model.var_id[f"y_{i}"]])
        z = int(values[model.var_id[f"z_{i}"]])
        placements.append(Placement(item=i, bin=j, k=k, x=x, y=y, z=z))
    sol = PackingSolution(tuple(placements))
    if not check(instance, sol).feasible:
        return None
    o1, o2, o3 = objectives(instance, sol)
    return PackingSolution(sol.placements, o1=o1, o2=o2, o3=o3)


def _anneal_run(instance: Instance, model: QuadraticModel, fast: _FastModel,
                config: SolverConfig, seed: int) -> Optional[list[int]]:
    rng = random.Random(seed)
    params = config.annealer
    n, m = model.n, model.m
    L = instance.bin.L
    values = _initial_values(instance, model, rng)
    steps = sorted({1, max(1, L // 8), max(1, L // 2)})

    cont_ids = [v.id for v in model.variables if not v.binary]
    bin_ids = [v.id for v in model.variables if v.binary]
    item_u = {
        i: [model.var_id[f"u_{i}_{j}"] for j in range(1, n + 1)]
        for i in range(m)
    } if n >= 2 else {}
    item_r = {}
    for item in instance.items:
        ks = sorted(nonredundant_orientations(item))
        if ks:
            item_r[item.index] = [(k, model.var_id[f"r_{item.index}_{k}"]) for k in ks]
    r_items = sorted(item_r)
    pair_b: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for var in model.variables:
        if var.tag.startswith("b_"):
            _, i, k, q = var.tag.split("_")
            pair_b.setdefault((int(i), int(k)), []).append((int(q), var.id))
    pairs = sorted(pair_b)
    coord_ids = {
        i: (model.var_id[f"x_{i}"], model.var_id[f"y_{i}"], model.var_id[f"z_{i}"])
        for i in range(m)
    }

    def current_dims(i: int) -> tuple[int, int, int]:
        item = instance.items[i]
        for k, vid in item_r.get(i, ()):
            if values[vid] == 1:
                return effective_dims(item, k)
        return (item.l, item.w, item.h)

    obj, viol2 = fast.energy_parts(values)
    pw = params.penalty_weight
    temp = params.initial_temperature
    best_values: Optional[list[int]] = None
    best_obj = math.inf
    if viol2 == 0.0:
        best_values, best_obj = list(values), obj

    deadline = None if config.iterations is not None else (
        time.monotonic() + config.time_limit)
    budget = config.iterations if config.iterations is not None else None
    iters = 0
    while True:
        if budget is not None:
            if iters >= budget:
                break
        elif iters % 64 == 0 and time.monotonic() >= deadline:
            break
        iters += 1
        touched: list[tuple[int, int]] = []

        def setval(vid: int, val: int) -> None:
            if values[vid] != val:
                touched.append((vid, values[vid]))
                values[vid] = val

        r = rng.random()
        if r < 0.25 and bin_ids:
            vid = bin_ids[rng.randrange(len(bin_ids))]
            setval(vid, 1 - values[vid])
        elif r < 0.45 and cont_ids:
            vid = cont_ids[rng.randrange(len(cont_ids))]
            delta = steps[rng.randrange(len(steps))] * (1 if rng.random() < 0.5 else -1)
            val = min(max(values[vid] + delta, int(fast.lower[vid])), int(fast.upper[vid]))
            setval(vid, val)
        elif r < 0.60:
            # snap one item to a corner point induced by its bin mates
            i = rng.randrange(m)
            if n >= 2:
                mine = [jj for jj in range(1, n + 1) if values[item_u[i][jj - 1]] == 1]
                j = mine[0] if len(mine) == 1 else rng.randrange(1, n + 1)
            else:
                j = 1
            cands = [(0, 0, 0)]
            for o in range(m):
                if o == i:
                    continue
                if n >= 2 and values[item_u[o][j - 1]] != 1:
                    continue
                do = current_dims(o)
                ox = values[coord_ids[o][0]] - (j - 1) * L
                oy = values[coord_ids[o][1]]
                oz = values[coord_ids[o][2]]
                cands.extend(((ox + do[0], oy, oz), (ox, oy + do[1], oz),
                              (ox, oy, oz + do[2])))
            cx, cy, cz = cands[rng.randrange(len(cands))]
            xid, yid, zid = coord_ids[i]
            setval(xid, min(max(cx + (j - 1) * L, int(fast.lower[xid])), int(fast.upper[xid])))
            setval(yid, min(max(cy, int(fast.lower[yid])), int(fast.upper[yid])))
            setval(zid, min(max(cz, int(fast.lower[zid])), int(fast.upper[zid])))
        elif r < 0.72 and item_u:
            # move one item to a bin and resync every v with its column
            i = rng.randrange(m)
            j = rng.randrange(1, n + 1)
            for jj, vid in enumerate(item_u[i], start=1):
                setval(vid, 1 if jj == j else 0)
            for jj in range(1, n + 1):
                used = any(values[item_u[ii][jj - 1]] for ii in range(m))
                setval(model.var_id[f"v_{jj}"], 1 if used else 0)
        elif r < 0.82 and r_items:
            i = r_items[rng.randrange(len(r_items))]
            choices = item_r[i]
            _, chosen = choices[rng.randrange(len(choices))]
            for _, vid in choices:
                setval(vid, 1 if vid == chosen else 0)
        elif pairs:
            # align one pair's relative-position bit with the geometry
            i, k = pairs[rng.randrange(len(pairs))]
            qs = sorted(pair_b[(i, k)])
            xi, yi, zi = (values[c] for c in coord_ids[i])
            xk, yk, zk = (values[c] for c in coord_ids[k])
            di = current_dims(i)
            dk = current_dims(k)
            slack = {1: xk - (xi + di[0]), 2: yk - (yi + di[1]), 3: zk - (zi + di[2]),
                     4: xi - (xk + dk[0]), 5: yi - (yk + dk[1]), 6: zi - (zk + dk[2])}
            ranked = sorted(qs, key=lambda qv: -slack[qv[0]])
            chosen = ranked[0][1]
            for _, vid in qs:
                setval(vid, 1 if vid == chosen else 0)
        else:
            vid = bin_ids[rng.randrange(len(bin_ids))] if bin_ids else cont_ids[0]
            setval(vid, 1 - values[vid] if fast.binary[vid] else values[vid])

        new_obj, new_viol2 = fast.energy_parts(values)
        old_e = obj + pw * viol2
        new_e = new_obj + pw * new_viol2
        accept = new_e <= old_e or rng.random() < math.exp(
            min(0.0, (old_e - new_e) / max(temp, 1e-12)))
        if accept:
            obj, viol2 = new_obj, new_viol2
            if viol2 == 0.0 and obj < best_obj:
                best_values, best_obj = list(values), obj
        else:
            for vid, old in reversed(touched):
                values[vid] = old
        temp *= params.cooling
        if iters % params.penalty_interval == 0:
            pw = min(pw * params.penalty_growth, params.penalty_cap)
        if iters % params.reheat_interval == 0:
            temp = params.initial_temperature
    return best_values


def solve_annealer(instance: Instance, config: SolverConfig) -> SolveResult:
    started = time.monotonic()
    model = build_model(instance, config.weights)
    fast = _FastModel(model)
    best_sol: Optional[PackingSolution] = None
    best_energy: Optional[Fraction] = None
    run_log: list[Fraction] = []
    for run in range(config.runs):
        values = _anneal_run(instance, model, fast, config,
                             mix_seed(config.seed, config.run_offset + run))
        if values is None:
            continue
        assignment = {var.tag: values[var.id] for var in model.variables}
        _, violations = evaluate(model, assignment)
        if violations:
            continue
        sol = _decode(instance, model, values)
        if sol is None:
            continue
        # reported energy is the weighted objective of the canonical encoding
        # (the raw assignment may leave slack in the deviation variables)
        energy = solution_energy(instance, sol.o1, sol.o2, sol.o3, config.weights)
        run_log.append(energy)
        if best_energy is None or energy < best_energy:
            best_sol, best_energy = sol, energy
    elapsed = 0.0 if config.iterations is not None else time.monotonic() - started
    if best_sol is None:
        return SolveResult(None, None, elapsed, tuple(run_log),
                           infeasible_reason="annealer found no violation-free assignment")
    return SolveResult(best_sol, best_energy, elapsed, tuple(run_log))
