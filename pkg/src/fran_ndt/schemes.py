"""Achievable NDTs of the elementary delivery schemes and their compositions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import (CacheBand, Mode, NdtPoint, SystemParams, cache_band, fmt_rational,
                   pipelined_thresholds, serial_threshold)
from .errors import BudgetExceeded, CacheTooSmall, Infeasible


class SchemeId(str, Enum):
    CA_ZF = "CaZF"      # cached content, joint zero-forcing at all ENs
    CA_IA = "CaIA"      # cached content, X-channel interference alignment
    CL_HF_ZF = "ClHfZF"  # raw bits over fronthaul, then zero-forcing
    CL_HF_IA = "ClHfIA"  # raw bits over fronthaul, then alignment
    CL_SF = "ClSf"      # quantized precoded samples over fronthaul
    COMPOSITE = "Composite"


def cache_usage(scheme: SchemeId, M: int) -> Fraction:
    """Fraction of a file each EN must store to run the scheme on it."""
    if scheme is SchemeId.CA_ZF:
        return Fraction(1)
    if scheme is SchemeId.CA_IA:
        return Fraction(1, M)
    return Fraction(0)


@dataclass(frozen=True)
class FileSplit:
    fractions: tuple[tuple[SchemeId, Fraction], ...]
    cache_usage: Fraction

    def __post_init__(self):
        total = sum((f for _, f in self.fractions), Fraction(0))
        if total != 1:
            raise ValueError(f"split fractions sum to {total}, not 1")
        if any(not 0 <= f <= 1 for _, f in self.fractions):
            raise ValueError("split fractions must lie in [0, 1]")

    def fraction_of(self, scheme: SchemeId) -> Fraction:
        return sum((f for s, f in self.fractions if s is scheme), Fraction(0))

    def to_dict(self) -> dict:
        return {"fractions": [[s.value, fmt_rational(f)] for s, f in self.fractions],
                "cache_usage": fmt_rational(self.cache_usage)}


@dataclass(frozen=True)
class SchemeNdt:
    """An achievable operating point.

    `point` always holds the fronthaul and edge NDTs of the split. `delta` is
    their sum in serial mode and their maximum in pipelined mode.
    """

    scheme: SchemeId
    point: NdtPoint
    split: FileSplit
    mode: Mode = Mode.SERIAL

    @property
    def delta(self) -> Fraction:
        if self.mode is Mode.PIPELINED:
            return max(self.point.delta_f, self.point.delta_e)
        return self.point.delta

    def to_dict(self) -> dict:
        return {"scheme": self.scheme.value, "mode": self.mode.value,
                "delta_f": fmt_rational(self.point.delta_f),
                "delta_e": fmt_rational(self.point.delta_e),
                "delta": fmt_rational(self.delta),
                "split": self.split.to_dict()}


def _require_fronthaul(params: SystemParams) -> None:
    if params.r == 0:
        raise Infeasible("cloud-aided schemes need r > 0")


def ndt_ca_zf(params: SystemParams, standalone: bool = True) -> NdtPoint:
    if standalone and params.mu < 1:
        raise CacheTooSmall(f"zero-forcing from caches needs mu = 1, got {params.mu}")
    return NdtPoint(Fraction(0), Fraction(params.K, params.min_mk))


def ndt_ca_ia(params: SystemParams, standalone: bool = True) -> NdtPoint:
    if standalone and params.mu * params.M < 1:
        raise CacheTooSmall(f"alignment from caches needs mu >= 1/M, got {params.mu}")
    return NdtPoint(Fraction(0), Fraction(params.M + params.K - 1, params.M))


def _cl_hf_zf(params: SystemParams) -> NdtPoint:
    return NdtPoint(params.K / params.r, Fraction(params.K, params.min_mk))


def _cl_hf_ia(params: SystemParams) -> NdtPoint:
    return NdtPoint(params.K / (params.M * params.r), Fraction(params.M + params.K - 1, params.M))


def cl_hf_branch(params: SystemParams) -> SchemeId:
    """Hard-transfer branch in use; ties go to alignment."""
    _require_fronthaul(params)
    if _cl_hf_ia(params).delta <= _cl_hf_zf(params).delta:
        return SchemeId.CL_HF_IA
    return SchemeId.CL_HF_ZF


def ndt_cl_hf(params: SystemParams) -> NdtPoint:
    if cl_hf_branch(params) is SchemeId.CL_HF_IA:
        return _cl_hf_ia(params)
    return _cl_hf_zf(params)


def ndt_cl_sf(params: SystemParams) -> NdtPoint:
    _require_fronthaul(params)
    return NdtPoint(params.K / (params.M * params.r), Fraction(params.K, params.min_mk))


def scheme_point(params: SystemParams, scheme: SchemeId) -> NdtPoint:
    """Per-file NDT of an elementary scheme, without the standalone cache check."""
    if scheme is SchemeId.CA_ZF:
        return ndt_ca_zf(params, standalone=False)
    if scheme is SchemeId.CA_IA:
        return ndt_ca_ia(params, standalone=False)
    if scheme is SchemeId.CL_SF:
        return ndt_cl_sf(params)
    _require_fronthaul(params)
    if scheme is SchemeId.CL_HF_ZF:
        return _cl_hf_zf(params)
    if scheme is SchemeId.CL_HF_IA:
        return _cl_hf_ia(params)
    raise ValueError(f"not an elementary scheme: {scheme}")


def base_scheme(params: SystemParams, scheme: SchemeId) -> SchemeNdt:
    point = scheme_point(params, scheme)
    split = FileSplit(((scheme, Fraction(1)),), cache_usage(scheme, params.M))
    return SchemeNdt(scheme, point, split)


def compose_serial(parts: Sequence[tuple[SchemeNdt, Fraction]],
                   mu: Optional[Fraction] = None) -> SchemeNdt:
    """File-split composition: each part carries its fraction of every file."""
    weights = [Fraction(f) for _, f in parts]
    if any(not 0 <= w <= 1 for w in weights) or sum(weights) != 1:
        raise ValueError("composition fractions must lie in [0, 1] and sum to 1")
    delta_f = sum((w * p.point.delta_f for (p, _), w in zip(parts, weights)), Fraction(0))
    delta_e = sum((w * p.point.delta_e for (p, _), w in zip(parts, weights)), Fraction(0))
    usage = sum((w * p.split.cache_usage for (p, _), w in zip(parts, weights)), Fraction(0))
    if mu is not None and usage > mu:
        raise BudgetExceeded(f"split needs cache {usage} per EN, budget is {mu}")
    merged: dict[SchemeId, Fraction] = {}
    for (p, _), w in zip(parts, weights):
        for s, f in p.split.fractions:
            if w * f:
                merged[s] = merged.get(s, Fraction(0)) + w * f
    fractions = tuple(merged.items())
    scheme = fractions[0][0] if len(fractions) == 1 else SchemeId.COMPOSITE
    return SchemeNdt(scheme, NdtPoint(delta_f, delta_e), FileSplit(fractions, usage))


def compose_pipelined(part1: tuple, part2: tuple, alpha) -> Fraction:
    """Pipelined NDT of an alpha : 1-alpha split of two (delta_f, delta_e) pairs."""
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    f = alpha * part1[0] + (1 - alpha) * part2[0]
    e = alpha * part1[1] + (1 - alpha) * part2[1]
    return max(f, e)


def split_scheme(params: SystemParams, split: Iterable[tuple[SchemeId, Fraction]],
                 mode: Mode = Mode.SERIAL) -> SchemeNdt:
    parts = [(base_scheme(params, s), Fraction(f)) for s, f in split]
    out = compose_serial(parts, params.mu)
    return SchemeNdt(out.scheme, out.point, out.split, Mode(mode))


def low_fronthaul_split(params: SystemParams) -> list[tuple[SchemeId, Fraction]]:
    M, mu = params.M, params.mu
    if mu * M < 1:
        return [(SchemeId.CA_IA, mu * M), (SchemeId.CL_SF, 1 - mu * M)]
    if M == 1:
        return [(SchemeId.CA_ZF, Fraction(1))]
    return [(SchemeId.CA_IA, M * (1 - mu) / (M - 1)), (SchemeId.CA_ZF, (mu * M - 1) / (M - 1))]


def high_fronthaul_split(params: SystemParams) -> list[tuple[SchemeId, Fraction]]:
    return [(SchemeId.CA_ZF, params.mu), (SchemeId.CL_SF, 1 - params.mu)]


def serial_split(params: SystemParams) -> list[tuple[SchemeId, Fraction]]:
    """File split used by the serial scheme for the regime of params."""
    if params.r == 0:
        if params.mu * params.M < 1:
            raise Infeasible(
                f"cache-only operation (r=0) requires mu >= 1/M = 1/{params.M}, got mu={params.mu}")
        return low_fronthaul_split(params)
    if params.r >= serial_threshold(params.M, params.K):
        return high_fronthaul_split(params)
    return low_fronthaul_split(params)


def achievable_serial(params: SystemParams) -> SchemeNdt:
    out = split_scheme(params, serial_split(params))
    r_th = serial_threshold(params.M, params.K)
    if params.r == r_th:
        # both regime formulas apply on the threshold and must agree there
        other = split_scheme(params, low_fronthaul_split(params))
        assert other.delta == out.delta, (other.delta, out.delta)
    assert out.split.cache_usage == params.mu, (out.split.cache_usage, params.mu)
    return out


def pipelined_split(params: SystemParams) -> list[tuple[SchemeId, Fraction]]:
    if params.r == 0:
        raise Infeasible("pipelined operation needs r > 0; use the serial cache-only path")
    M, mu = params.M, params.mu
    band = cache_band(params)
    if band is CacheBand.HIGH:
        return high_fronthaul_split(params)
    if band is CacheBand.LOW:
        return [(SchemeId.CA_IA, mu * M), (SchemeId.CL_SF, 1 - mu * M)]
    mu1, mu2 = pipelined_thresholds(M, params.K, params.r)
    beta = (mu2 - mu) / (mu2 - mu1)
    return [(SchemeId.CA_IA, beta * mu1 * M),
            (SchemeId.CA_ZF, (1 - beta) * mu2),
            (SchemeId.CL_SF, beta * (1 - mu1 * M) + (1 - beta) * (1 - mu2))]


def _intermediate_value(params: SystemParams, beta: Fraction) -> Fraction:
    M, K, r = params.M, params.K, params.r
    mu1, mu2 = pipelined_thresholds(M, K, r)
    return K / (M * r) * (1 - mu2 - (mu1 * M - mu2) * beta)


def pipelined_closed_form(params: SystemParams) -> Fraction:
    """Pipelined NDT from the per-band closed forms."""
    M, K, r, mu = params.M, params.K, params.r, params.mu
    band = cache_band(params)
    if band is CacheBand.HIGH:
        return Fraction(K, params.min_mk)
    if band is CacheBand.LOW:
        return (1 - mu * M) * K / (M * r)
    mu1, mu2 = pipelined_thresholds(M, K, r)
    return _intermediate_value(params, (mu2 - mu) / (mu2 - mu1))


def achievable_pipelined(params: SystemParams) -> SchemeNdt:
    out = split_scheme(params, pipelined_split(params), Mode.PIPELINED)
    assert out.split.cache_usage == params.mu, (out.split.cache_usage, params.mu)
    closed = pipelined_closed_form(params)
    assert out.delta == closed, (out.delta, closed)
    if cache_band(params) is CacheBand.INTERMEDIATE:
        M, K = params.M, params.K
        mu1, _ = pipelined_thresholds(M, K, params.r)
        assert _intermediate_value(params, Fraction(1)) == (1 - mu1 * M) * K / (M * params.r)
        assert _intermediate_value(params, Fraction(0)) == Fraction(K, params.min_mk)
    return out


def block_overhead(blocks: int) -> Fraction:
    """Latency multiplier of block-Markov pipelining with a finite block count."""
    if blocks < 1:
        raise ValueError("need at least one block")
    return Fraction(blocks + 1, blocks)
