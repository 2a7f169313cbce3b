"""Audits of a schedule against its placement, and the simulation report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..core import Mode, SystemParams, fmt_rational
from .placement import PlacementPlan
from .schedule import SOFT, Schedule, Time, _fmt

CACHE_BUDGET = "cache_budget"
FRONTHAUL_CAPACITY = "fronthaul_capacity"
DECODABILITY = "decodability"
CAUSALITY = "causality"


@dataclass
class AuditResult:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "details": self.details}


@dataclass
class SimulationReport:
    t_f: Time
    t_e: Time
    latency: Time
    ndt: Time
    audits: dict[str, AuditResult]
    series: list[tuple[int, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.audits.values())

    def to_dict(self) -> dict:
        return {"t_f": _fmt(self.t_f), "t_e": _fmt(self.t_e), "latency": _fmt(self.latency),
                "ndt": _fmt(self.ndt), "passed": self.passed,
                "audits": {k: v.to_dict() for k, v in self.audits.items()},
                "series": [[lp, v] for lp, v in self.series]}


def _le(a: Time, b: Time) -> bool:
    # exact for rationals; a relative slack absorbs rounding in the finite-rate mode
    if isinstance(a, float) or isinstance(b, float):
        return a <= b + 1e-9 * max(1.0, abs(float(b)))
    return a <= b


def audit_cache_budget(plan: PlacementPlan, params: SystemParams) -> AuditResult:
    res = AuditResult(CACHE_BUDGET, True)
    budget = params.mu * params.N * plan.L
    for m in range(plan.M):
        used = plan.cached_bits(m)
        if used > budget:
            res.passed = False
            res.details.append(f"EN {m} caches {used} bits, budget {fmt_rational(budget)}")
        for f in range(plan.N):
            for a, b in plan.ranges(f, m):
                if not 0 <= a < b <= plan.L:
                    res.passed = False
                    res.details.append(f"EN {m} file {f}: range [{a}, {b}) outside the file")
    return res


def audit_fronthaul(schedule: Schedule, params: SystemParams) -> AuditResult:
    res = AuditResult(FRONTHAUL_CAPACITY, True)
    cap = schedule.fronthaul_capacity
    for s in schedule.segments:
        bits = s.amount * schedule.sample_bits if s.kind == SOFT else s.amount
        if s.t_end < s.t_start or not _le(bits, (s.t_end - s.t_start) * cap):
            res.passed = False
            res.details.append(f"EN {s.en} block {s.block}: {_fmt(bits)} bits in "
                               f"[{_fmt(s.t_start)}, {_fmt(s.t_end)}) exceeds capacity {_fmt(cap)}/use")
    by_en: dict[int, list] = {}
    for s in schedule.segments:
        by_en.setdefault(s.en, []).append(s)
    for en, segs in by_en.items():
        segs.sort(key=lambda s: s.t_start)
        for a, b in zip(segs, segs[1:]):
            if b.t_start < a.t_end and not _le(a.t_end, b.t_start):
                res.passed = False
                res.details.append(f"EN {en}: overlapping fronthaul segments")
    # every channel use an EN spends on a cloud-fed phase consumes one received sample
    need: dict[tuple[int, int], Time] = {}
    for p in schedule.phases:
        if p.cloud_fed:
            for m in p.ens:
                need[(m, p.block)] = need.get((m, p.block), Fraction(0)) + p.duration
    have: dict[tuple[int, int], Time] = {}
    for s in schedule.segments:
        if s.kind == SOFT:
            have[(s.en, s.block)] = have.get((s.en, s.block), Fraction(0)) + s.amount
    for key, n in need.items():
        if not _le(n, have.get(key, Fraction(0))):
            res.passed = False
            res.details.append(f"EN {key[0]} block {key[1]}: needs {_fmt(n)} samples, "
                               f"received {_fmt(have.get(key, 0))}")
    return res


def audit_decodability(schedule: Schedule, plan: PlacementPlan, demand: Sequence[int],
                       L: int) -> AuditResult:
    res = AuditResult(DECODABILITY, True)
    got: dict[int, list[tuple[int, int]]] = {k: [] for k in range(len(demand))}
    for p in schedule.phases:
        for f in p.fragments:
            if f.user not in got:
                res.passed = False
                res.details.append(f"fragment for unknown user {f.user}")
                continue
            if f.file != demand[f.user]:
                res.passed = False
                res.details.append(f"user {f.user} sent file {f.file}, wants {demand[f.user]}")
                continue
            for m in f.holders:
                if m not in p.ens or not plan.holds(m, f.file, f.start, f.end):
                    res.passed = False
                    res.details.append(f"EN {m} does not hold file {f.file} [{f.start}, {f.end})")
            got[f.user].append((f.start, f.end))
    for k, ranges in got.items():
        pos = 0
        for a, b in sorted(ranges):
            if a > pos:
                res.passed = False
                res.details.append(f"user {k}: gap [{pos}, {a}) of file {demand[k]}")
            elif a < pos:
                res.passed = False
                res.details.append(f"user {k}: [{a}, {min(b, pos)}) of file {demand[k]} delivered twice")
            pos = max(pos, b)
        if pos < L:
            res.passed = False
            res.details.append(f"user {k}: gap [{pos}, {L}) of file {demand[k]}")
    return res


def audit_causality(schedule: Schedule) -> AuditResult:
    res = AuditResult(CAUSALITY, True)
    for p in schedule.phases:
        for s in schedule.segments:
            same = schedule.mode is Mode.SERIAL or s.block == p.block
            if same and not _le(s.t_end, p.t_start):
                res.passed = False
                res.details.append(f"{p.mechanism} phase of block {p.block} at {_fmt(p.t_start)} "
                                   f"precedes fronthaul end {_fmt(s.t_end)} on EN {s.en}")
                break
    phases = sorted(schedule.phases, key=lambda p: p.t_start)
    for a, b in zip(phases, phases[1:]):
        if not _le(a.t_end, b.t_start):
            res.passed = False
            res.details.append(f"edge phases overlap at {_fmt(b.t_start)}")
    return res


def verify_schedule(schedule: Schedule, plan: PlacementPlan, demand: Sequence[int],
                    params: SystemParams, L: int) -> SimulationReport:
    audits = [audit_cache_budget(plan, params), audit_fronthaul(schedule, params),
              audit_decodability(schedule, plan, demand, L), audit_causality(schedule)]
    ndt = schedule.latency * schedule.log2_p / L
    return SimulationReport(schedule.t_f, schedule.t_e, schedule.latency, ndt,
                            {a.name: a for a in audits})


def counted_ndt(schedule: Schedule, L: int) -> Time:
    return schedule.latency * schedule.log2_p / L


def is_monotone_toward(values: Sequence[float], target: float) -> bool:
    dist = [abs(v - target) for v in values]
    return all(b <= a + 1e-12 for a, b in zip(dist, dist[1:])) and not any(math.isnan(d) for d in dist)
