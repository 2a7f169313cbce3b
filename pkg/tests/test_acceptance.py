"""Acceptance criteria, one check per criterion.

Each check returns (passed, detail). Under pytest the outcome lines are
printed in the terminal summary; `python3 tests/test_acceptance.py` runs the
checks directly.
"""

import sys
import time
from fractions import Fraction
from math import comb

import pytest

from fran_ndt.analysis import (Status, achievable, exact_ndt, lower_bound, verify_convexity)
from fran_ndt.bounds import lp_lower_bound, pipelined_lower_bound
from fran_ndt.core import Mode, SystemParams
from fran_ndt.schemes import (SchemeId, achievable_pipelined, achievable_serial, cl_hf_branch,
                              ndt_cl_hf, ndt_cl_sf)
from fran_ndt.simulator import (build_pipelined_schedule, build_serial_schedule, effective_snr,
                                finite_p_convergence, least_L, plan_placement, verify_schedule)

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from conftest import random_tuples  # noqa: E402

F = Fraction
RESULTS: dict[int, tuple[bool, str]] = {}
MU21 = [F(i, 20) for i in range(21)]
R22 = [F(1, 4), F(1, 2), F(1), F(3, 2)]

_grid_cache = {}


def grid():
    if "g" not in _grid_cache:
        _grid_cache["g"] = random_tuples(10_000, seed=20240611, max_mk=8)
    return _grid_cache["g"]


def timed(limit):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            if limit is not None and dt >= limit:
                ok, detail = False, f"{detail}; took {dt:.2f}s, limit {limit}s"
            return ok, f"{detail} ({dt:.2f}s)"
        run.__name__ = fn.__name__
        return run
    return wrap


def serial_22(mu, r):
    if r < 1:
        return max(1 + mu + (1 - 2 * mu) / r, 2 - mu)
    return 1 + (1 - mu) / r


def pipelined_22(mu, r):
    mu1, mu2 = max(F(0), (1 - r) / (2 + r)), max(F(0), 1 - r)
    # for r >= 1 both thresholds collapse to 0 and the top band covers every mu
    if mu >= mu2:
        return F(1)
    if mu <= mu1:
        return (1 - 2 * mu) / r
    return (2 - mu) / (1 + r)


@timed(1)
def check_1():
    bad = [(mu, r) for r in R22 for mu in MU21
           if not lp_lower_bound(SystemParams(2, 2, 2, mu, r)).delta
           == achievable_serial(SystemParams(2, 2, 2, mu, r)).delta == serial_22(mu, r)]
    return not bad, f"{len(R22) * 21} points, mismatches {bad[:3]}"


@timed(1)
def check_2():
    bad = []
    for r in R22:
        for mu in MU21:
            p = SystemParams(2, 2, 2, mu, r)
            if not pipelined_lower_bound(p) == achievable_pipelined(p).delta == pipelined_22(mu, r):
                bad.append((mu, r))
    return not bad, f"{len(R22) * 21} points, mismatches {bad[:3]}"


@timed(5)
def check_3():
    n, bad = 0, []
    for M in range(1, 7):
        for K in range(1, 7):
            cases = [SystemParams(M, K, K, mu, F(0)) for mu in (F(1, M), F(1))]
            cases += [SystemParams(M, K, K, F(0), r) for r in (F(1, 4), F(1, 2), F(1), F(3), F(7, 2))]
            if M <= K:
                rmax = F(1, M - 1) if M > 1 else F(4)
                cases += [SystemParams(M, K, K, F(i, 4 * M), rmax * F(j, 3))
                          for i in range(5) for j in range(1, 4)]
            for p in cases:
                n += 1
                cert = exact_ndt(p)
                if cert.status is not Status.EXACT or not cert.lower == cert.value == cert.achievable:
                    bad.append(p)
    return not bad, f"{n} tuples, failures {len(bad)}"


@timed(30)
def check_4():
    bad, worst = [], {m: F(1) for m in Mode}
    for p in grid():
        for mode in Mode:
            g = achievable(p, mode).delta / lower_bound(p, mode)
            worst[mode] = max(worst[mode], g)
            if not 1 <= g <= 2:
                bad.append((p, mode))
    return not bad, (f"{len(grid())} tuples, max serial gap {float(worst[Mode.SERIAL]):.4f}, "
                     f"max pipelined gap {float(worst[Mode.PIPELINED]):.4f}, violations {len(bad)}")


@timed(None)
def check_5():
    bad = 0
    for p in grid():
        if achievable_pipelined(p).delta > achievable_serial(p).delta:
            bad += 1
        if pipelined_lower_bound(p) < lp_lower_bound(p).delta / 2:
            bad += 1
    return bad == 0, f"{len(grid())} tuples, violations {bad}"


@timed(None)
def check_6():
    bad = sum(1 for p in grid() if ndt_cl_sf(p).delta > ndt_cl_hf(p).delta)
    switch = [cl_hf_branch(SystemParams(3, 3, 3, F(0), r)) for r in (F(29, 10), F(3), F(31, 10))]
    # both branches give 2 at r = 3; IA below, ZF above
    tie = ndt_cl_hf(SystemParams(3, 3, 3, F(0), F(3))).delta == 2
    ok = bad == 0 and switch == [SchemeId.CL_HF_IA, SchemeId.CL_HF_IA, SchemeId.CL_HF_ZF] and tie
    return ok, f"{len(grid())} tuples, violations {bad}; M=K=3 branch {[s.value for s in switch]}"


@timed(None)
def check_7():
    mus = [F(i, 24) for i in range(25)]
    n, bad = 0, []
    for M in range(1, 6):
        for K in range(1, 6):
            for r in (F(0), F(1, 5), F(1, 2), F(1), F(2), F(5)):
                for mode in Mode:
                    rep = verify_convexity(M, K, r, mus, mode)
                    vals = dict(zip(mus, rep.achievable))
                    # explicit midpoints over every pair of grid points with an on-grid midpoint
                    for i in range(len(mus)):
                        for j in range(i + 2, len(mus), 2):
                            a, b, c = vals[mus[i]], vals[mus[j]], vals[mus[(i + j) // 2]]
                            if None in (a, b, c):
                                continue
                            n += 1
                            if c > (a + b) / 2:
                                bad.append((M, K, r, mode))
                    if not rep.passed:
                        bad.append((M, K, r, mode, "chord"))
    return not bad, f"{n} midpoint checks, violations {len(bad)}"


def _serial_sim(p):
    L = least_L(p)
    demand = list(range(p.K))
    plan = plan_placement(p, L)
    sched = build_serial_schedule(plan, demand, p, L, 2 ** 20)
    return verify_schedule(sched, plan, demand, p, L)


@timed(10)
def check_8():
    tuples = [SystemParams(M, K, K, mu, r) for M in range(1, 5) for K in range(1, 5)
              for mu in (F(0), F(1, 5), F(1, 3), F(1, 2), F(2, 3), F(1))
              for r in (F(1, 3), F(1, 2), F(1), F(2))]
    bad = []
    for p in tuples:
        rep = _serial_sim(p)
        if not rep.passed or rep.ndt != achievable_serial(p).delta:
            bad.append(p)
    pipe = SystemParams(2, 2, 2, F(3, 10), F(1, 2))
    for B in (1, 3, 30):
        L = least_L(pipe, Mode.PIPELINED, B)
        plan = plan_placement(pipe, L, Mode.PIPELINED, B)
        sched = build_pipelined_schedule(plan, [0, 1], pipe, L, 2 ** 20, B)
        rep = verify_schedule(sched, plan, [0, 1], pipe, L)
        if not rep.passed or rep.ndt != F(B + 1, B) * achievable_pipelined(pipe).delta:
            bad.append(("pipelined", B))
    return not bad, f"{len(tuples)} serial tuples + B in {{1, 3, 30}}, failures {bad[:3]}"


CONVERGENCE_TUPLES = [(2, 2, F(0), F(1)), (3, 2, F(0), F(1)), (2, 2, F(1), F(1)),
                      (2, 2, F(1, 4), F(1, 2)), (2, 2, F(1, 2), F(2))]


@timed(None)
def check_9():
    ladder = [2 ** k for k in range(10, 41, 2)]
    parts, ok = [], True
    for M, K, mu, r in CONVERGENCE_TUPLES:
        p = SystemParams(M, K, K, mu, r)
        rep = finite_p_convergence(p, list(range(K)), None, ladder)
        err = rep.final_error
        good = err <= 0.05 and rep.monotone
        ok &= good
        parts.append(f"({M},{K},{mu},{r}) err {err:.4f}{'' if good else ' FAIL'}")
    return ok, "; ".join(parts)


@timed(None)
def check_10():
    bad = []
    for b in range(10, 41):
        for G in range(0, 9):
            if effective_snr(2 ** b, b, G) * (1 + G) != 2 ** b - 1:
                bad.append((b, G))
    clusters = 0
    for M in range(2, 9):
        for K in range(1, min(M, 5)):
            p = SystemParams(M, K, K, F(0), F(1))
            L = least_L(p)
            plan = plan_placement(p, L)
            sched = build_serial_schedule(plan, list(range(K)), p, L, 2 ** 20)
            t_e = sched.t_e
            clusters += 1
            counts = {m: sum(m in ph.ens for ph in sched.phases) for m in range(M)}
            if any(c != comb(M - 1, K - 1) for c in counts.values()):
                bad.append((M, K, "count"))
            if any(s.amount != t_e * K / M for s in sched.segments) or len(sched.segments) != M:
                bad.append((M, K, "samples"))
    return not bad, f"identity on 2^10..2^40 x G<=8, {clusters} clustering cases, failures {bad[:3]}"


CHECKS = {i: globals()[f"check_{i}"] for i in range(1, 11)}


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n):
    ok, detail = CHECKS[n]()
    RESULTS[n] = (ok, detail)
    assert ok, detail


def report_lines():
    return [f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
            for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for n, check in CHECKS.items():
        RESULTS[n] = check()
        print(report_lines()[-1], flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
