"""Serial and block-pipelined delivery schedules with bit and sample accounting.

Times are in channel uses. In the idealized mode every user stream runs at
log2 P bits per channel use times its DoF share, so counted latency matches
the analytical NDT exactly. The finite mode slows down the cloud-aided
phases by the quantization rate loss of the soft-transfer model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional, Sequence, Union

from ..core import Mode, SystemParams, fmt_rational
from ..errors import CausalityViolation, InvalidParams, Undeliverable
from .placement import PlacementPlan
from .softtransfer import log2_exact, rate_factor

SOFT = "soft-samples"
HARD = "hard-bits"
IA_X = "IA-X"
ZF = "ZF"
TDMA = "TDMA-cluster"

Time = Union[Fraction, float]


@dataclass(frozen=True)
class Segment:
    en: int
    kind: str
    amount: Time   # samples for soft transfer, bits for hard transfer
    bits: Time
    t_start: Time
    t_end: Time
    block: int = 0

    def to_dict(self) -> dict:
        return {"en": self.en, "kind": self.kind, "amount": _fmt(self.amount),
                "t_start": _fmt(self.t_start), "t_end": _fmt(self.t_end), "block": self.block}


@dataclass(frozen=True)
class Fragment:
    user: int
    file: int
    start: int
    end: int
    holders: tuple[int, ...] = ()  # ENs serving it from cache; empty means cloud-fed

    @property
    def size(self) -> int:
        return self.end - self.start

    def to_dict(self) -> dict:
        return {"user": self.user, "file": self.file, "range": [self.start, self.end],
                "source": "cache" if self.holders else "cloud"}


@dataclass(frozen=True)
class Phase:
    mechanism: str
    ens: tuple[int, ...]
    fragments: tuple[Fragment, ...]
    t_start: Time
    t_end: Time
    block: int = 0

    @property
    def duration(self) -> Time:
        return self.t_end - self.t_start

    @property
    def cloud_fed(self) -> bool:
        return any(not f.holders for f in self.fragments)

    def to_dict(self) -> dict:
        return {"mechanism": self.mechanism, "ens": list(self.ens),
                "fragments": [f.to_dict() for f in self.fragments],
                "t_start": _fmt(self.t_start), "t_end": _fmt(self.t_end), "block": self.block}


@dataclass
class Schedule:
    mode: Mode
    blocks: int
    log2_p: int
    sample_bits: int
    fronthaul_capacity: Time   # bits per channel use on each fronthaul link
    latency: Time
    segments: list[Segment] = field(default_factory=list)
    phases: list[Phase] = field(default_factory=list)

    @property
    def t_f(self) -> Time:
        return max((s.t_end - s.t_start for s in self.segments), default=Fraction(0)) * \
            (self.blocks if self.mode is Mode.PIPELINED else 1)

    @property
    def t_e(self) -> Time:
        return sum((p.duration for p in self.phases), Fraction(0))

    def to_dict(self) -> dict:
        return {"mode": self.mode.value, "blocks": self.blocks, "latency": _fmt(self.latency),
                "segments": [s.to_dict() for s in self.segments],
                "phases": [p.to_dict() for p in self.phases]}


def _fmt(v: Time) -> str:
    return repr(v) if isinstance(v, float) else fmt_rational(v)


def _check_demand(demand: Sequence[int], params: SystemParams) -> None:
    if len(demand) != params.K:
        raise InvalidParams(f"demand must list {params.K} files, got {len(demand)}")
    if any(not 0 <= d < params.N for d in demand):
        raise InvalidParams(f"demand entries must lie in [0, {params.N})")


def _cloud_factor(P, ens: Sequence[int], gains, K: int, finite: bool) -> Time:
    if not finite:
        return Fraction(1)
    if gains is None:
        G = len(ens)
    else:
        G = max(sum(gains[k][m] for m in ens) for k in range(K))
    return rate_factor(P, G)


def _block_phases(plan: PlacementPlan, params: SystemParams, demand: Sequence[int], block: int,
                  t0: Time, lp: int, P, finite: bool, gains) -> tuple[list[Phase], dict[int, Time]]:
    """Edge phases for one block starting at t0, and cloud samples each EN needs."""
    M, K = params.M, params.K
    mn = min(M, K)
    offs = plan.block_offsets(block)
    users = range(K)
    phases: list[Phase] = []
    samples = {m: Fraction(0) for m in range(M)}
    t = t0

    def add(mechanism, ens, frags, duration):
        nonlocal t
        phases.append(Phase(mechanism, tuple(ens), tuple(frags), t, t + duration, block))
        t = t + duration

    x = plan.exclusive_bits
    if x:
        frags = [Fragment(k, demand[k], *offs["exclusive"][m], (m,)) for k in users for m in range(M)]
        # K users each get M*x bits at sum DoF MK/(M+K-1)
        add(IA_X, range(M), frags, Fraction(x * (M + K - 1), lp))
    z = plan.shared_bits
    if z:
        frags = [Fragment(k, demand[k], *offs["shared"], tuple(range(M))) for k in users]
        add(ZF, range(M), frags, Fraction(K * z, mn * lp))
    u = plan.uncached_bits
    if u:
        u0, _ = offs["uncached"]
        if M <= K:
            ens = tuple(range(M))
            frags = [Fragment(k, demand[k], u0, u0 + u) for k in users]
            dur = Fraction(K * u, M * lp) / _cloud_factor(P, ens, gains, K, finite)
            add(ZF, ens, frags, dur)
            for m in ens:
                samples[m] += dur
        else:
            clusters = list(combinations(range(M), K))
            piece = u // len(clusters)
            for j, ens in enumerate(clusters):
                a = u0 + j * piece
                frags = [Fragment(k, demand[k], a, a + piece) for k in users]
                dur = Fraction(piece, lp) / _cloud_factor(P, ens, gains, K, finite)
                add(TDMA, ens, frags, dur)
                for m in ens:
                    samples[m] += dur
    return phases, samples


def _segments(samples: dict[int, Time], params: SystemParams, lp: int, block: int,
              t0: Time) -> list[Segment]:
    out = []
    for m, n in samples.items():
        if n:
            # one B-bit sample per channel use, over a link carrying r*log2 P bits per use
            bits = n * lp
            out.append(Segment(m, SOFT, n, bits, t0, t0 + bits / (params.r * lp), block))
    return out


def _prepare(plan, demand, params, P):
    if plan.M != params.M or plan.N != params.N:
        raise InvalidParams("placement plan does not match the system parameters")
    _check_demand(demand, params)
    if params.r == 0 and plan.uncached_bits:
        raise Undeliverable("r = 0 but part of every requested file is cached nowhere")
    if params.M > params.K and plan.uncached_bits % comb(params.M, params.K):
        raise InvalidParams("uncached part does not split evenly over the EN clusters")
    return log2_exact(P)


def build_serial_schedule(plan: PlacementPlan, demand: Sequence[int], params: SystemParams,
                          L: int, P, finite: bool = False, gains=None) -> Schedule:
    """Fronthaul first, then edge phases in the order IA-X, ZF, cloud-fed.

    demand holds 0-based file indices, one per user; repeated files are
    served as separate streams.
    """
    lp = _prepare(plan, demand, params, P)
    if plan.blocks != 1 or plan.L != L:
        raise InvalidParams("serial schedules need a single-block plan of length L")
    # edge durations do not depend on the start time, so lay them out once to size the fronthaul
    _, samples = _block_phases(plan, params, demand, 0, Fraction(0), lp, P, finite, gains)
    segments = _segments(samples, params, lp, 0, Fraction(0))
    t_f = max((s.t_end for s in segments), default=Fraction(0))
    phases, _ = _block_phases(plan, params, demand, 0, t_f, lp, P, finite, gains)
    latency = phases[-1].t_end if phases else t_f
    return Schedule(Mode.SERIAL, 1, lp, lp, params.r * lp, latency, segments, phases)


def build_pipelined_schedule(plan: PlacementPlan, demand: Sequence[int], params: SystemParams,
                             L: int, P, B_blocks: int, finite: bool = False,
                             gains=None) -> Schedule:
    """Block b is fronthauled in slot b and delivered on the edge in slot b+1."""
    lp = _prepare(plan, demand, params, P)
    if plan.blocks != B_blocks or plan.L != L:
        raise InvalidParams(f"plan must be laid out in {B_blocks} blocks of L/{B_blocks} bits")
    _, samples = _block_phases(plan, params, demand, 0, Fraction(0), lp, P, finite, gains)
    probe = _segments(samples, params, lp, 0, Fraction(0))
    t_f = max((s.t_end for s in probe), default=Fraction(0))
    probe_phases, _ = _block_phases(plan, params, demand, 0, Fraction(0), lp, P, finite, gains)
    t_e = sum((p.duration for p in probe_phases), Fraction(0))
    slot = max(t_f, t_e)
    segments: list[Segment] = []
    phases: list[Phase] = []
    for b in range(B_blocks):
        segments += _segments(samples, params, lp, b, b * slot)
        blk, _ = _block_phases(plan, params, demand, b, (b + 1) * slot, lp, P, finite, gains)
        phases += blk
    sched = Schedule(Mode.PIPELINED, B_blocks, lp, lp, params.r * lp, (B_blocks + 1) * slot,
                     segments, phases)
    for p in phases:
        if any(s.block == p.block and s.t_end > p.t_start for s in segments):
            raise CausalityViolation(f"edge phase of block {p.block} starts before its fronthaul ends")
    return sched
