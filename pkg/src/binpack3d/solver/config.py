"""Solver configuration and result types shared by all backends."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from ..core import Instance, PackingSolution

Number = Union[int, Fraction]

BACKENDS = ("heuristic", "annealer", "oracle")


@dataclass(frozen=True)
class AnnealerParams:
    initial_temperature: float = 3.0
    cooling: float = 0.9995
    penalty_weight: float = 2.0
    penalty_growth: float = 1.3
    penalty_interval: int = 600
    penalty_cap: float = 200.0
    reheat_interval: int = 2500


@dataclass(frozen=True)
class HeuristicParams:
    restarts: int = 8
    # relative weights of (reinsert, swap, reorient, rebin) moves
    move_weights: tuple[float, float, float, float] = (0.35, 0.30, 0.20, 0.15)
    candidate_cap: int = 48


@dataclass(frozen=True)
class SolverConfig:
    backend: str = "heuristic"
    time_limit: float = 5.0
    seed: int = 0
    runs: int = 1
    run_offset: int = 0  # first run index, used when runs are fanned out
    iterations: Optional[int] = None  # iteration-count mode: deterministic, ignores wall clock
    weights: tuple[Number, Number, Number] = (1, 1, 1)
    annealer: AnnealerParams = field(default_factory=AnnealerParams)
    heuristic: HeuristicParams = field(default_factory=HeuristicParams)

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be > 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not (0 < self.annealer.cooling < 1):
            raise ValueError("cooling factor must be in (0, 1)")


@dataclass(frozen=True)
class SolveResult:
    """Best solution (or None when no run found one), its energy, wall time,
    and the per-run energy log. In iteration-count mode elapsed is pinned to
    0.0 so results are byte-reproducible."""

    best: Optional[PackingSolution]
    energy: Optional[Fraction]
    elapsed: float
    run_log: tuple[Fraction, ...]
    infeasible_reason: Optional[str] = None
    checkpoint_runs: Optional[tuple[tuple[Fraction, ...], ...]] = None

    @property
    def feasible(self) -> bool:
        return self.best is not None


def solution_energy(instance: Instance, o1: int, o2: Fraction,
                    o3: Optional[Fraction],
                    weights: tuple[Number, Number, Number]) -> Fraction:
    """Weighted objective, matching the model: o1 counts only when n >= 2
    (with one bin it is a constant and the model omits it)."""
    w1, w2, w3 = (Fraction(w) for w in weights)
    energy = w2 * o2
    if instance.bin.n >= 2:
        energy += w1 * o1
    if o3 is not None:
        energy += w3 * o3
    return energy


def mix_seed(seed: int, run: int) -> int:
    return seed * 1_000_003 + run
