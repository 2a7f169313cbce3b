import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import linprog

from fran_ndt.bounds import (TAG_E_FLOOR, TAG_F_NONNEG, cache_only_lower_bound, cloud_only_lower_bound,
                             interfile_coding_lower_bound, lp_constraints, lp_lower_bound,
                             pipelined_lower_bound, subdivision_weights, weighted_combination_bound)
from fran_ndt.core import SystemParams
from fran_ndt.errors import Infeasible, InvalidWeights, OutOfRange

from conftest import rationals, system_params

F = Fraction


def scipy_lp(params, rhs=None):
    """Float LP oracle over (delta_f, delta_e)."""
    M, K, mu, r = params.M, params.K, float(params.mu), float(params.r)
    A, b = [], []
    for ell in range(min(M, K) + 1):
        A.append([-(M - ell) * r, -ell])
        b.append(-(K - (M - ell) * (K - ell) * mu) if rhs is None else -rhs(ell))
    res = linprog([1, 1], A_ub=A, b_ub=b, bounds=[(0, None), (1, None)])
    assert res.status == 0
    return res.fun


def test_constraints_example(P):
    cons = lp_constraints(P(2, 2, "1/4", "1/2"))
    assert len(cons) == 5
    assert [(c.coeff_e, c.coeff_f, c.rhs) for c in cons[:3]] == [
        (0, 1, 1), (1, F(1, 2), F(7, 4)), (2, 0, 2)]
    assert [c.tag for c in cons[3:]] == [TAG_F_NONNEG, TAG_E_FLOOR]


def test_vacuous_constraint_is_kept(P):
    cons = lp_constraints(P(3, 3, "1/2", "1/5"))
    assert len(cons) == 6
    assert cons[0].rhs == F(-3, 2)


def test_smallest_system(P):
    cons = lp_constraints(P(1, 1, 0, 1))
    assert [(c.coeff_e, c.coeff_f, c.rhs) for c in cons[:2]] == [(0, 1, 1), (1, 0, 1)]


@pytest.mark.parametrize("args,df,de,active", [
    ((2, 2, "1/4", "1/2"), 1, F(5, 4), {"l=0", "l=1"}),
    ((2, 3, "2/5", "3/10"), 1, F(19, 10), {"l=0", "l=1"}),
    ((3, 3, "1/2", "1/5"), 0, F(5, 4), {"l=2", TAG_F_NONNEG}),
    ((2, 2, 1, 0), 0, 1, {"l=2", TAG_E_FLOOR, TAG_F_NONNEG}),
])
def test_lp_examples(P, args, df, de, active):
    sol = lp_lower_bound(P(*args))
    assert (sol.point.delta_f, sol.point.delta_e) == (df, de)
    assert active <= set(sol.active)


def test_lp_json(P):
    d = lp_lower_bound(P(2, 2, "1/4", "1/2")).to_dict()
    assert d == {"delta_f": "1", "delta_e": "5/4", "delta": "9/4", "active": ["l=0", "l=1"]}


def test_lp_infeasible_without_cache(P):
    with pytest.raises(Infeasible):
        lp_lower_bound(P(2, 2, "1/4", 0))


def test_cache_only_examples(P):
    assert cache_only_lower_bound(P(2, 2, "1/2", 0)) == F(3, 2)
    assert cache_only_lower_bound(P(3, 3, "1/3", 0)) == F(5, 3)
    assert cache_only_lower_bound(P(2, 2, 1, 0)) == 1
    with pytest.raises(OutOfRange):
        cache_only_lower_bound(P(2, 2, "1/3", 0))


def test_cloud_only_examples(P):
    assert cloud_only_lower_bound(P(3, 3, 0, "1/2")) == 3
    assert cloud_only_lower_bound(P(3, 2, 0, 1)) == F(5, 3)
    assert cloud_only_lower_bound(P(1, 1, 0, 1)) == 2
    with pytest.raises(Infeasible):
        cloud_only_lower_bound(P(2, 2, 0, 0))


def test_pipelined_examples(P):
    assert pipelined_lower_bound(P(2, 2, "3/10", "1/2")) == F(17, 15)
    assert pipelined_lower_bound(P(2, 2, "1/10", "1/2")) == F(8, 5)
    assert pipelined_lower_bound(P(2, 2, 1, 1)) == 1
    assert pipelined_lower_bound(P(3, 3, "1/3", 0)) == F(5, 3)


def test_weighted_combination_examples(P):
    p = P(2, 2, "1/4", "1/2")
    alpha, beta = subdivision_weights(p, 1)
    assert (alpha, beta) == (F(1, 2), 1)
    assert weighted_combination_bound(p, 1, alpha, beta) == F(9, 4) == lp_lower_bound(p).delta
    assert weighted_combination_bound(p, 1, 0, 0) == 0
    # weight 1 on the l=0 row puts 5/4 on delta_f, which would overstate the bound
    with pytest.raises(InvalidWeights):
        weighted_combination_bound(p, 1, 1, F(1, 2))
    with pytest.raises(InvalidWeights):
        weighted_combination_bound(p, 1, -1, 0)


def test_subdivision_weights_example(P):
    p = P(4, 6, "1/8", "2/3")
    alpha, beta = subdivision_weights(p, 2)
    assert (alpha, beta) == (F(1, 4), F(3, 8))
    assert weighted_combination_bound(p, 2, alpha, beta) <= lp_lower_bound(p).delta


def test_interfile_examples(P):
    p2 = P(2, 2, "1/4", "1/2", N=2)
    assert interfile_coding_lower_bound(p2) <= lp_lower_bound(p2).delta
    p4 = P(2, 2, "1/4", "1/2", N=4)
    assert interfile_coding_lower_bound(p4) < F(9, 4)
    p0 = P(2, 2, 0, "1/2", N=2)
    assert interfile_coding_lower_bound(p0) == lp_lower_bound(p0).delta


def test_lp_matches_float_oracle():
    rng = random.Random(11)
    for _ in range(300):
        M, K = rng.randint(1, 6), rng.randint(1, 6)
        p = SystemParams(M, K, K, F(rng.randint(0, 10), 10), F(rng.randint(1, 30), 10))
        assert float(lp_lower_bound(p).delta) == pytest.approx(scipy_lp(p), abs=1e-9)


def test_lp_brute_force_grid():
    """No grid point strictly below the vertex optimum is feasible."""
    rng = random.Random(5)
    for _ in range(1000):
        M, K = rng.randint(1, 6), rng.randint(1, 6)
        p = SystemParams(M, K, K, F(rng.randint(0, 8), 8), F(rng.randint(1, 16), 8))
        sol = lp_lower_bound(p)
        cons = lp_constraints(p)
        assert all(c.holds(sol.point.delta_f, sol.point.delta_e) for c in cons)
        best = sol.delta
        steps = 10
        for i in range(steps + 1):
            df = best * i / steps
            for j in range(steps + 1):
                de = 1 + (best - 1) * j / steps
                if df + de < best:
                    assert not all(c.holds(df, de) for c in cons), (p, df, de)


@given(system_params())
def test_pipelined_below_serial(params):
    assert pipelined_lower_bound(params) <= lp_lower_bound(params).delta
    assert 2 * pipelined_lower_bound(params) >= lp_lower_bound(params).delta


@given(system_params())
def test_cloud_only_specialization(params):
    p0 = params.with_mu(0)
    assert lp_lower_bound(p0).delta == cloud_only_lower_bound(p0)


@given(system_params(positive_r=False))
def test_cache_only_specialization(params):
    p0 = params.with_r(0)
    assume(p0.mu * p0.M >= 1)
    assert lp_lower_bound(p0).delta == max(cache_only_lower_bound(p0), 1)


@given(system_params(), rationals(0, 1), rationals(0, 4))
def test_monotone_in_mu_and_r(params, dmu, dr):
    hi_mu = params.with_mu(min(Fraction(1), params.mu + dmu))
    hi_r = params.with_r(params.r + dr)
    for bound in (lambda p: lp_lower_bound(p).delta, pipelined_lower_bound):
        assert bound(hi_mu) <= bound(params)
        assert bound(hi_r) <= bound(params)


@given(system_params(), st.integers(1, 8))
def test_interfile_never_above_uncoded(params, extra):
    p = SystemParams(params.M, params.K, params.K + extra, params.mu, params.r)
    value = interfile_coding_lower_bound(p)
    assert value <= lp_lower_bound(p).delta
    if p.mu > 0 and p.M > 1:
        assert value <= lp_lower_bound(params).delta


@given(system_params(), st.integers(1, 6), rationals(0, 2), rationals(0, 2))
def test_valid_weighted_bounds_are_sound(params, ell, alpha, beta):
    assume(ell <= params.min_mk)
    try:
        value = weighted_combination_bound(params, ell, alpha, beta)
    except InvalidWeights:
        return
    assert value <= lp_lower_bound(params).delta


@given(system_params(max_m=8, max_k=8))
def test_subdivision_weights_sound_in_their_interval(params):
    M = params.M
    for ell in range(1, params.min_mk + 1):
        if M - ell == 0:
            continue
        if Fraction(ell - 1, M - ell + 1) <= params.r <= Fraction(ell, M - ell):
            alpha, beta = subdivision_weights(params, ell)
            assert alpha >= 0 and beta >= 0
            assert weighted_combination_bound(params, ell, alpha, beta) <= lp_lower_bound(params).delta
