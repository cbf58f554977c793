"""Run-energy statistics: mean, spread, and the normalized deviation metric."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class RunStats:
    mean: Fraction
    std: float
    sigma_bar: Fraction
    minimum: Fraction
    maximum: Fraction

    def as_dict(self) -> dict:
        return {
            "mean": float(self.mean),
            "std": self.std,
            "sigma_bar": float(self.sigma_bar),
            "min": float(self.minimum),
            "max": float(self.maximum),
        }


def run_stats(energies: Iterable[Number]) -> RunStats:
    """Population statistics of a run-energy vector.

    sigma_bar is the mean absolute relative deviation (1/R) * sum|e_i/mu - 1|,
    computed exactly; it is 0 iff all energies are equal. Undefined for
    mu == 0.
    """
    vals = [Fraction(e) for e in energies]
    if not vals:
        raise ValueError("need at least one energy")
    r = len(vals)
    mean = sum(vals, Fraction(0)) / r
    if mean == 0:
        raise ValueError("sigma_bar is undefined for zero mean energy")
    var = sum((v - mean) ** 2 for v in vals) / r
    sigma_bar = sum(abs(v / mean - 1) for v in vals) / r
    return RunStats(
        mean=mean,
        std=math.sqrt(var),
        sigma_bar=sigma_bar,
        minimum=min(vals),
        maximum=max(vals),
    )
