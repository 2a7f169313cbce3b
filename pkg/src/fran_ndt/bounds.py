"""Lower bounds on the minimum NDT.

The serial bound is a two-variable LP over (delta_f, delta_e). It is solved
exactly by enumerating the intersection of every pair of constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Callable, Sequence

from .core import NdtPoint, SystemParams
from .errors import Infeasible, InvalidParams, InvalidWeights, OutOfRange

TAG_F_NONNEG = "delta_f>=0"
TAG_E_FLOOR = "delta_e>=1"


@dataclass(frozen=True)
class LpConstraint:
    """coeff_e * delta_e + coeff_f * delta_f >= rhs"""

    coeff_e: Fraction
    coeff_f: Fraction
    rhs: Fraction
    tag: str

    def holds(self, delta_f: Fraction, delta_e: Fraction) -> bool:
        return self.coeff_e * delta_e + self.coeff_f * delta_f >= self.rhs


@dataclass(frozen=True)
class LpSolution:
    point: NdtPoint
    active: tuple[str, ...]

    @property
    def delta(self) -> Fraction:
        return self.point.delta

    def to_dict(self) -> dict:
        return {**self.point.to_dict(), "active": list(self.active)}


def ell_tag(ell: int) -> str:
    return f"l={ell}"


def _family(params: SystemParams, rhs_of: Callable[[int], Fraction]) -> list[LpConstraint]:
    M, r = params.M, params.r
    out = [LpConstraint(Fraction(ell), (M - ell) * r, Fraction(rhs_of(ell)), ell_tag(ell))
           for ell in range(params.min_mk + 1)]
    out.append(LpConstraint(Fraction(0), Fraction(1), Fraction(0), TAG_F_NONNEG))
    out.append(LpConstraint(Fraction(1), Fraction(0), Fraction(1), TAG_E_FLOOR))
    return out


def family_rhs(params: SystemParams, ell: int) -> Fraction:
    M, K = params.M, params.K
    return K - (M - ell) * (K - ell) * params.mu


def lp_constraints(params: SystemParams) -> list[LpConstraint]:
    return _family(params, lambda ell: family_rhs(params, ell))


def _scaled(c: LpConstraint) -> tuple[int, int, int]:
    d = lcm(c.coeff_e.denominator, c.coeff_f.denominator, c.rhs.denominator)
    return (int(c.coeff_e * d), int(c.coeff_f * d), int(c.rhs * d))


def solve_lp(constraints: Sequence[LpConstraint]) -> LpSolution:
    """Minimise delta_f + delta_e over the given constraints.

    Works on integer-scaled rows so the inner loop avoids Fraction overhead.
    Ties between optimal vertices go to the smaller delta_f.
    """
    rows = [_scaled(c) for c in constraints]
    best = None  # (num_e, num_f, det)
    for i, j in combinations(range(len(rows)), 2):
        ae1, af1, b1 = rows[i]
        ae2, af2, b2 = rows[j]
        det = ae1 * af2 - af1 * ae2
        if det == 0:
            continue
        ne = b1 * af2 - af1 * b2
        nf = ae1 * b2 - b1 * ae2
        if det < 0:
            det, ne, nf = -det, -ne, -nf
        if any(ae * ne + af * nf < b * det for ae, af, b in rows):
            continue
        if best is None:
            best = (ne, nf, det)
            continue
        be, bf, bd = best
        lhs, rhs = (ne + nf) * bd, (be + bf) * det
        if lhs < rhs or (lhs == rhs and nf * bd < bf * det):
            best = (ne, nf, det)
    if best is None:
        raise Infeasible("the lower-bound LP has no feasible point")
    ne, nf, det = best
    delta_e, delta_f = Fraction(ne, det), Fraction(nf, det)
    active = tuple(c.tag for c, (ae, af, b) in zip(constraints, rows)
                   if ae * ne + af * nf == b * det)
    return LpSolution(NdtPoint(delta_f, delta_e), active)


def _check_cache_only(params: SystemParams) -> None:
    if params.r == 0 and params.mu * params.M < 1:
        raise Infeasible(
            f"cache-only operation (r=0) requires mu >= 1/M = 1/{params.M}, got mu={params.mu}")


def lp_lower_bound(params: SystemParams) -> LpSolution:
    _check_cache_only(params)
    return solve_lp(lp_constraints(params))


def cache_only_lower_bound(params: SystemParams) -> Fraction:
    """Closed-form bound for r = 0; the fronthaul rate in params is ignored."""
    if params.mu * params.M < 1:
        raise OutOfRange(f"cache-only bound needs mu >= 1/M, got mu={params.mu}")
    best = max(family_rhs(params, ell) / ell for ell in range(1, params.min_mk + 1))
    return max(best, Fraction(1))


def cloud_only_lower_bound(params: SystemParams) -> Fraction:
    """Closed-form bound for mu = 0; the cache size in params is ignored."""
    if params.r == 0:
        raise Infeasible("cloud-only bound needs r > 0")
    return Fraction(params.K, params.min_mk) + params.K / (params.M * params.r)


def pipelined_lower_bound(params: SystemParams) -> Fraction:
    if params.r == 0:
        return cache_only_lower_bound(params)
    M, r = params.M, params.r
    terms = (family_rhs(params, ell) / (ell + (M - ell) * r)
             for ell in range(params.min_mk + 1))
    return max(max(terms), Fraction(1))


def weighted_combination_bound(params: SystemParams, ell: int, alpha, beta) -> Fraction:
    """alpha * (constraint ell-1) + beta * (constraint ell), checked for soundness."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not 1 <= ell <= params.min_mk:
        raise InvalidParams(f"ell must lie in [1, {params.min_mk}], got {ell}")
    if alpha < 0 or beta < 0:
        raise InvalidWeights("weights must be non-negative")
    M, r = params.M, params.r
    on_e = alpha * (ell - 1) + beta * ell
    on_f = alpha * (M - ell + 1) * r + beta * (M - ell) * r
    if on_e > 1 or on_f > 1:
        raise InvalidWeights(
            f"combined coefficients (delta_e: {on_e}, delta_f: {on_f}) exceed 1")
    return alpha * family_rhs(params, ell - 1) + beta * family_rhs(params, ell)


def subdivision_weights(params: SystemParams, ell: int) -> tuple[Fraction, Fraction]:
    """Weights that make both combined coefficients exactly 1 (r > 0).

    They are non-negative only when (ell-1)/(M-ell+1) <= r <= ell/(M-ell).
    """
    s = 1 + 1 / params.r
    alpha = Fraction(ell, params.M) * s - 1
    beta = 1 - Fraction(ell - 1, params.M) * s
    return alpha, beta


def interfile_coding_lower_bound(params: SystemParams) -> Fraction:
    M, K, N, mu = params.M, params.K, params.N, params.mu
    cons = _family(params, lambda ell: K - (M - ell) * N * mu)
    if params.r == 0 and K - M * N * mu > 0:
        raise Infeasible("cache-only operation cannot serve the uncached part")
    value = solve_lp(cons).delta
    try:
        uncoded = lp_lower_bound(params).delta
    except Infeasible:
        return value
    assert value <= uncoded, (value, uncoded)
    return value

