"""Counted latency at finite SNR, compared with its high-SNR limit."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..core import SystemParams, fmt_rational
from ..schemes import achievable_serial
from .audit import counted_ndt, is_monotone_toward
from .placement import least_L, plan_placement
from .schedule import build_serial_schedule
from .softtransfer import log2_exact

MONOTONE_FROM = 16  # log2 P from which the series must approach the limit monotonically


@dataclass
class ConvergenceReport:
    target: Fraction
    series: list[tuple[int, float]]

    @property
    def final_error(self) -> float:
        return abs(self.series[-1][1] - float(self.target))

    @property
    def monotone(self) -> bool:
        tail = [v for lp, v in self.series if lp >= MONOTONE_FROM]
        return is_monotone_toward(tail, float(self.target))

    def to_dict(self) -> dict:
        return {"target": fmt_rational(self.target), "series": [[lp, v] for lp, v in self.series],
                "final_error": self.final_error, "monotone": self.monotone}


def finite_p_convergence(params: SystemParams, demand: Sequence[int], L: Optional[int],
                         P_ladder: Sequence, gains=None) -> ConvergenceReport:
    """Serial NDT(P) over a ladder of powers of two, using finite-SNR cloud rates."""
    exps = [log2_exact(P) for P in P_ladder]
    if exps != sorted(exps):
        raise ValueError("P ladder must be ascending")
    if L is None:
        L = least_L(params)
    plan = plan_placement(params, L)
    series = []
    for P in P_ladder:
        sched = build_serial_schedule(plan, demand, params, L, P, finite=True, gains=gains)
        series.append((log2_exact(P), float(counted_ndt(sched, L))))
    return ConvergenceReport(achievable_serial(params).delta, series)
