"""Fragment-level cache placement."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Optional

from ..core import Mode, SystemParams, fmt_rational
from ..errors import IndivisibleL
from ..schemes import SchemeId, pipelined_split, serial_split

Range = tuple[int, int]


@dataclass(frozen=True)
class Layout:
    """Per-file fractions: shared by all ENs, exclusive to each EN, uncached."""

    shared: Fraction
    exclusive: Fraction
    uncached: Fraction

    @classmethod
    def from_split(cls, split, M: int) -> "Layout":
        frac = {s: Fraction(0) for s in SchemeId}
        for s, f in split:
            frac[s] += f
        return cls(frac[SchemeId.CA_ZF], frac[SchemeId.CA_IA] / M, frac[SchemeId.CL_SF])


def layout_for(params: SystemParams, mode: Mode = Mode.SERIAL) -> Layout:
    split = serial_split(params) if Mode(mode) is Mode.SERIAL else pipelined_split(params)
    return Layout.from_split(split, params.M)


def block_unit(params: SystemParams, mode: Mode = Mode.SERIAL) -> int:
    """Smallest per-block size in bits for which every fragment is integral."""
    lay = layout_for(params, mode)
    clusters = comb(params.M, params.K) if params.M > params.K else 1
    return lcm(lay.shared.denominator, lay.exclusive.denominator,
               (lay.uncached / clusters).denominator)


def least_L(params: SystemParams, mode: Mode = Mode.SERIAL, blocks: int = 1,
            at_least: Optional[int] = None) -> int:
    step = block_unit(params, mode) * blocks
    if at_least is None or at_least <= step:
        return step
    return -(-at_least // step) * step


@dataclass(frozen=True)
class PlacementPlan:
    M: int
    N: int
    L: int
    blocks: int
    mu: Fraction
    shared_bits: int      # per block
    exclusive_bits: int   # per block and EN
    uncached_bits: int    # per block
    cached: tuple[tuple[tuple[Range, ...], ...], ...]  # [file][en] -> ranges

    @property
    def block_bits(self) -> int:
        return self.L // self.blocks

    @property
    def shared_fraction(self) -> Fraction:
        return Fraction(self.shared_bits, self.block_bits)

    @property
    def exclusive_fraction(self) -> Fraction:
        return Fraction(self.exclusive_bits, self.block_bits)

    @property
    def uncached_fraction(self) -> Fraction:
        return Fraction(self.uncached_bits, self.block_bits)

    def ranges(self, file: int, en: int) -> tuple[Range, ...]:
        return self.cached[file][en]

    def holds(self, en: int, file: int, start: int, end: int) -> bool:
        return any(a <= start and end <= b for a, b in self.cached[file][en])

    def cached_bits(self, en: int) -> int:
        return sum(b - a for f in range(self.N) for a, b in self.cached[f][en])

    def block_offsets(self, block: int) -> dict:
        """Bit ranges of the shared, per-EN exclusive and uncached parts of one block."""
        o = block * self.block_bits
        z, x = self.shared_bits, self.exclusive_bits
        return {"shared": (o, o + z),
                "exclusive": [(o + z + m * x, o + z + (m + 1) * x) for m in range(self.M)],
                "uncached": (o + z + self.M * x, o + self.block_bits)}

    def to_dict(self) -> dict:
        return {"M": self.M, "N": self.N, "L": self.L, "blocks": self.blocks,
                "shared_fraction": fmt_rational(self.shared_fraction),
                "exclusive_fraction": fmt_rational(self.exclusive_fraction),
                "uncached_fraction": fmt_rational(self.uncached_fraction),
                "cached": [[[list(r) for r in self.cached[f][m]] for m in range(self.M)]
                           for f in range(self.N)]}


def _merge(ranges: list[Range]) -> tuple[Range, ...]:
    out: list[list[int]] = []
    for a, b in sorted(r for r in ranges if r[1] > r[0]):
        if out and out[-1][1] == a:
            out[-1][1] = b
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


def plan_placement(params: SystemParams, L: int, mode: Mode = Mode.SERIAL,
                   blocks: int = 1) -> PlacementPlan:
    """Cache layout for the scheme used in the regime of params.

    Each block of L/blocks bits is laid out as: a range cached by every EN,
    then one range per EN cached only there, then an uncached tail.
    """
    if L < 1 or blocks < 1:
        raise ValueError("L and blocks must be positive")
    lay = layout_for(params, mode)
    unit = block_unit(params, mode)
    if L % (unit * blocks):
        raise IndivisibleL(
            f"L={L} leaves fractional fragments; L must be a multiple of {unit * blocks}",
            least_L(params, mode, blocks, L))
    S = L // blocks
    z, x, u = int(lay.shared * S), int(lay.exclusive * S), int(lay.uncached * S)
    assert z + params.M * x + u == S
    per_en: list[list[Range]] = [[] for _ in range(params.M)]
    for b in range(blocks):
        o = b * S
        for m in range(params.M):
            per_en[m].append((o, o + z))
            per_en[m].append((o + z + m * x, o + z + (m + 1) * x))
    cached_en = tuple(_merge(rs) for rs in per_en)
    plan = PlacementPlan(params.M, params.N, L, blocks, params.mu, z, x, u,
                         tuple(cached_en for _ in range(params.N)))
    for m in range(params.M):
        assert plan.cached_bits(m) <= params.mu * params.N * L
    return plan
