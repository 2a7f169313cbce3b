"""Optimality certificates, multiplicative gaps and convexity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .bounds import lp_lower_bound, pipelined_lower_bound
from .core import (CacheBand, Mode, SystemParams, cache_band, fmt_rational,
                   pipelined_thresholds)
from .errors import GapViolation, Infeasible
from .schemes import SchemeNdt, achievable_pipelined, achievable_serial

# Names of the parameter regions where the minimum NDT is known exactly.
CACHE_ONLY_CORNER = "cache-only-corner"
CLOUD_ONLY = "cloud-only"
LOW_CACHE_LOW_FRONTHAUL = "low-cache-low-fronthaul"
TWO_BY_TWO = "two-by-two"
PIPELINED_LOW_CACHE = "pipelined-low-cache"
PIPELINED_HIGH_CACHE = "pipelined-high-cache"
PIPELINED_HIGH_FRONTHAUL = "pipelined-high-fronthaul"
PIPELINED_TWO_BY_TWO = "pipelined-two-by-two"


class Status(str, Enum):
    EXACT = "Exact"
    GAP_BOUNDED = "GapBounded"


@dataclass(frozen=True)
class OptimalityCertificate:
    value: Fraction
    status: Status
    gap: Fraction
    witness: str
    lower: Fraction
    achievable: Fraction

    @property
    def characterized(self) -> bool:
        return self.status is Status.EXACT

    def to_dict(self) -> dict:
        return {"value": fmt_rational(self.value), "status": self.status.value,
                "gap": fmt_rational(self.gap), "witness": self.witness,
                "lower": fmt_rational(self.lower), "achievable": fmt_rational(self.achievable)}


def _check_feasible(params: SystemParams) -> None:
    if params.r == 0 and params.mu * params.M < 1:
        raise Infeasible(
            f"cache-only operation (r=0) requires mu >= 1/M = 1/{params.M}, got mu={params.mu}")


def lower_bound(params: SystemParams, mode: Mode = Mode.SERIAL) -> Fraction:
    _check_feasible(params)
    if Mode(mode) is Mode.PIPELINED:
        return pipelined_lower_bound(params)
    return lp_lower_bound(params).delta


def achievable(params: SystemParams, mode: Mode = Mode.SERIAL) -> SchemeNdt:
    """Best known scheme; without fronthaul both modes reduce to the cache-only one."""
    _check_feasible(params)
    if Mode(mode) is Mode.PIPELINED and params.r > 0:
        return achievable_pipelined(params)
    return achievable_serial(params)


def gap_ratio(params: SystemParams, mode: Mode = Mode.SERIAL) -> Fraction:
    return achievable(params, mode).delta / lower_bound(params, mode)


def multiplicative_gap(params: SystemParams, mode: Mode = Mode.SERIAL) -> Fraction:
    gap = gap_ratio(params, mode)
    if not 1 <= gap <= 2:
        raise GapViolation(f"gap {gap} outside [1, 2] at {params.to_dict()} ({Mode(mode).value})")
    return gap


def _serial_exact(params: SystemParams) -> Optional[tuple[str, Fraction]]:
    M, K, mu, r = params.M, params.K, params.mu, params.r
    mn = params.min_mk
    if r == 0 and mu in (Fraction(1, M), Fraction(1)):
        value = Fraction(K, mn) if mu == 1 else Fraction(M + K - 1, M)
        return CACHE_ONLY_CORNER, value
    if mu == 0 and r > 0:
        return CLOUD_ONLY, Fraction(K, mn) + K / (M * r)
    if M <= K and mu * M <= 1 and r > 0 and (M == 1 or r * (M - 1) <= 1):
        return LOW_CACHE_LOW_FRONTHAUL, (M + K - 1) * mu + K * (1 - mu * M) / M * (1 + 1 / r)
    if M == 2 and K == 2:
        if r == 0:
            return TWO_BY_TWO, 2 - mu
        if r <= 1:
            return TWO_BY_TWO, max(1 + mu + (1 - 2 * mu) / r, 2 - mu)
        return TWO_BY_TWO, 1 + (1 - mu) / r
    return None


def _pipelined_exact(params: SystemParams) -> Optional[tuple[str, Fraction]]:
    M, K, mu, r = params.M, params.K, params.mu, params.r
    mn = params.min_mk
    band = cache_band(params)
    if band is CacheBand.LOW:
        return PIPELINED_LOW_CACHE, (1 - mu * M) * K / (M * r)
    if band is CacheBand.HIGH:
        return PIPELINED_HIGH_CACHE, Fraction(K, mn)
    if r * M >= (1 - mu) * mn:
        return PIPELINED_HIGH_FRONTHAUL, Fraction(K, mn)
    if M == 2 and K == 2:
        mu1, mu2 = pipelined_thresholds(M, K, r)
        assert mu1 == (1 - r) / (2 + r) and mu2 == max(1 - r, Fraction(0))
        return PIPELINED_TWO_BY_TWO, (2 - mu) / (1 + r)
    return None


def exact_ndt(params: SystemParams, mode: Mode = Mode.SERIAL) -> OptimalityCertificate:
    """Certificate for the minimum NDT.

    Status is Exact only when params lie in a region with a known closed form;
    elsewhere the bound pair is reported as GapBounded even if it coincides.
    """
    mode = Mode(mode)
    lower = lower_bound(params, mode)
    ach = achievable(params, mode).delta
    gap = ach / lower
    if mode is Mode.PIPELINED and params.r > 0:
        hit = _pipelined_exact(params)
    else:
        hit = _serial_exact(params)
    if hit is None:
        witness = f"bounds [{fmt_rational(lower)}, {fmt_rational(ach)}]"
        return OptimalityCertificate(ach, Status.GAP_BOUNDED, gap, witness, lower, ach)
    witness, value = hit
    assert lower == value == ach, (witness, lower, value, ach)
    return OptimalityCertificate(value, Status.EXACT, gap, witness, lower, ach)


def pipelined_serial_ratio(params: SystemParams) -> Fraction:
    serial = achievable_serial(params).delta
    pipelined = achievable_pipelined(params).delta
    ratio = serial / pipelined
    if not 1 <= ratio <= 2:
        raise GapViolation(f"serial/pipelined ratio {ratio} outside [1, 2]")
    if 2 * pipelined_lower_bound(params) < lp_lower_bound(params).delta:
        raise GapViolation("pipelined lower bound below half the serial lower bound")
    return ratio


@dataclass
class ConvexityReport:
    mus: list[Fraction]
    achievable: list[Optional[Fraction]]
    lower: list[Optional[Fraction]]
    violations: list[tuple[str, Fraction, Fraction, Fraction]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        fmt = lambda v: None if v is None else fmt_rational(v)
        return {"mu": [fmt(m) for m in self.mus],
                "achievable": [fmt(v) for v in self.achievable],
                "lower": [fmt(v) for v in self.lower],
                "violations": [[name, fmt(a), fmt(b), fmt(c)] for name, a, b, c in self.violations],
                "passed": self.passed}


def _chord_violations(name, mus, values):
    pts = [(m, v) for m, v in zip(mus, values) if v is not None]
    out = []
    for (a, fa), (b, fb), (c, fc) in zip(pts, pts[1:], pts[2:]):
        # f(b) must not exceed the chord through (a, f(a)) and (c, f(c))
        if fb * (c - a) > fa * (c - b) + fc * (b - a):
            out.append((name, a, b, c))
    return out


def verify_convexity(M: int, K: int, r, mu_grid: Sequence, mode: Mode = Mode.SERIAL,
                     N: Optional[int] = None) -> ConvexityReport:
    mus = sorted(set(Fraction(m) for m in mu_grid))
    if len(mus) < 3:
        raise ValueError("convexity check needs at least three grid points")
    ach: list[Optional[Fraction]] = []
    low: list[Optional[Fraction]] = []
    for mu in mus:
        params = SystemParams.make(M, K, mu, r, N)
        try:
            ach.append(achievable(params, mode).delta)
            low.append(lower_bound(params, mode))
        except Infeasible:
            ach.append(None)
            low.append(None)
    report = ConvexityReport(mus, ach, low)
    report.violations += _chord_violations("achievable", mus, ach)
    report.violations += _chord_violations("lower", mus, low)
    return report
