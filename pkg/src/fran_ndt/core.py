"""Parameter types, regime thresholds and regime classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import InvalidParams

RationalLike = Union[int, str, Fraction]

# r_th for systems where one side has a single node; every r is below it
UNBOUNDED = math.inf


def parse_rational(value: RationalLike) -> Fraction:
    """Exact rational from an int, a Fraction, "p/q" or a decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidParams(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # floats are accepted only when they hold an exact short decimal
        return Fraction(repr(value))
    text = str(value).strip()
    if "^" in text:
        base, _, exp = text.partition("^")
        try:
            return Fraction(int(base)) ** int(exp)
        except ValueError as exc:
            raise InvalidParams(f"not a rational: {value!r}") from exc
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParams(f"not a rational: {value!r}") from exc


def fmt_rational(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fmt_decimal(value, digits: int = 12) -> str:
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{float(value):.{digits}g}"


class Mode(str, Enum):
    SERIAL = "serial"
    PIPELINED = "pipelined"


class CacheRegime(str, Enum):
    LOW = "LowCache"
    HIGH = "HighCache"


class FronthaulRegime(str, Enum):
    CACHE_ONLY = "CacheOnly"
    LOW = "LowFronthaul"
    HIGH = "HighFronthaul"


class CacheBand(str, Enum):
    """Position of mu relative to the pipelined thresholds mu1 <= mu2."""

    LOW = "low"
    INTERMEDIATE = "intermediate"
    HIGH = "high"


@dataclass(frozen=True)
class SystemParams:
    M: int
    K: int
    N: int
    mu: Fraction
    r: Fraction

    def __post_init__(self):
        for name in ("M", "K", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidParams(f"{name} must be a positive integer, got {v!r}")
        object.__setattr__(self, "mu", parse_rational(self.mu))
        object.__setattr__(self, "r", parse_rational(self.r))
        if self.N < self.K:
            raise InvalidParams(f"need N >= K, got N={self.N}, K={self.K}")
        if not 0 <= self.mu <= 1:
            raise InvalidParams(f"mu must lie in [0, 1], got {self.mu}")
        if self.r < 0:
            raise InvalidParams(f"r must be non-negative, got {self.r}")

    @classmethod
    def make(cls, M: int, K: int, mu: RationalLike, r: RationalLike, N: Optional[int] = None) -> "SystemParams":
        return cls(M, K, K if N is None else N, parse_rational(mu), parse_rational(r))

    @property
    def min_mk(self) -> int:
        return min(self.M, self.K)

    @property
    def max_mk(self) -> int:
        return max(self.M, self.K)

    def with_mu(self, mu: RationalLike) -> "SystemParams":
        return SystemParams(self.M, self.K, self.N, parse_rational(mu), self.r)

    def with_r(self, r: RationalLike) -> "SystemParams":
        return SystemParams(self.M, self.K, self.N, self.mu, parse_rational(r))

    def to_dict(self) -> dict:
        return {"M": self.M, "K": self.K, "N": self.N,
                "mu": fmt_rational(self.mu), "r": fmt_rational(self.r)}


@dataclass(frozen=True)
class NdtPoint:
    """Fronthaul and edge NDT of a serial scheme; delta is their sum."""

    delta_f: Fraction
    delta_e: Fraction

    def __post_init__(self):
        if self.delta_f < 0:
            raise ValueError(f"negative fronthaul NDT {self.delta_f}")

    @property
    def delta(self) -> Fraction:
        return self.delta_f + self.delta_e

    def to_dict(self) -> dict:
        return {"delta_f": fmt_rational(self.delta_f),
                "delta_e": fmt_rational(self.delta_e),
                "delta": fmt_rational(self.delta)}


@dataclass(frozen=True)
class Thresholds:
    r_th: Union[Fraction, float]
    mu1: Fraction
    mu2: Fraction

    def to_dict(self) -> dict:
        return {"r_th": fmt_rational(self.r_th), "mu1": fmt_rational(self.mu1),
                "mu2": fmt_rational(self.mu2)}


@dataclass(frozen=True)
class RegimeLabel:
    cache_regime: CacheRegime
    fronthaul_regime: FronthaulRegime
    mode: Mode
    band: Optional[CacheBand] = None

    def to_dict(self) -> dict:
        out = {"cache_regime": self.cache_regime.value,
               "fronthaul_regime": self.fronthaul_regime.value,
               "mode": self.mode.value}
        if self.band is not None:
            out["band"] = self.band.value
        return out


def serial_threshold(M: int, K: int) -> Union[Fraction, float]:
    mn = min(M, K)
    if mn == 1:
        return UNBOUNDED
    return Fraction(K * (M - 1), M * (mn - 1))


def pipelined_thresholds(M: int, K: int, r: Fraction) -> tuple[Fraction, Fraction]:
    mn, mx = min(M, K), max(M, K)
    mu1 = max(K - mx * r, Fraction(0)) / (K * M + M * r * (mn - 1))
    mu2 = max(1 - M * r / mn, Fraction(0))
    return Fraction(mu1), Fraction(mu2)


def thresholds(params: SystemParams) -> Thresholds:
    mu1, mu2 = pipelined_thresholds(params.M, params.K, params.r)
    assert mu1 <= mu2 <= 1, (mu1, mu2)
    return Thresholds(serial_threshold(params.M, params.K), mu1, mu2)


def cache_band(params: SystemParams) -> CacheBand:
    # the upper band is tested first so the collapsed case mu1 = mu2 = 0 lands there
    mu1, mu2 = pipelined_thresholds(params.M, params.K, params.r)
    if params.mu >= mu2:
        return CacheBand.HIGH
    if params.mu <= mu1:
        return CacheBand.LOW
    return CacheBand.INTERMEDIATE


def classify_regime(params: SystemParams, mode: Mode = Mode.SERIAL) -> RegimeLabel:
    mode = Mode(mode)
    cache = CacheRegime.HIGH if params.mu * params.M >= 1 else CacheRegime.LOW
    if params.r == 0:
        return RegimeLabel(cache, FronthaulRegime.CACHE_ONLY, mode)
    if mode is Mode.SERIAL:
        high = params.r >= serial_threshold(params.M, params.K)
        front = FronthaulRegime.HIGH if high else FronthaulRegime.LOW
        return RegimeLabel(cache, front, mode)
    high = params.r * params.M >= (1 - params.mu) * params.min_mk
    front = FronthaulRegime.HIGH if high else FronthaulRegime.LOW
    return RegimeLabel(cache, front, mode, cache_band(params))
