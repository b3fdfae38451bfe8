import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gresilience.errors import DegenerateGameError, DomainError, InvariantError, ValidationError
from gresilience.game import (
    PROFILES,
    Action,
    ActionProfile,
    BimatrixPayoffs,
    MixedStrategyProfile,
    P2ScaleMode,
    Player,
    SystemFactors,
    build_bimatrix,
    expected_utility_action,
    find_psne,
    msne,
    msne_expected_payoffs,
    payoff_p1,
    payoff_p2,
    solve,
)

from .conftest import REF_EPS, REF_FACTORS, confidence, factors_st, random_factors, scale_st
from .oracles import brute_force_psne, four_cell_expectation, grid_msne

R, H = Action.ROBOT, Action.HUMAN
RR, RH, HR, HH = PROFILES


# -- payoffs -------------------------------------------------------------------


def test_payoff_p1_hand_values():
    # 0.8 * (5 + 2 + 1 + 3) and 0.8 * (5 + 3 - 2 - 1)
    assert payoff_p1(RR, REF_FACTORS, 0.8) == pytest.approx(8.8, abs=1e-12)
    assert payoff_p1(HR, REF_FACTORS, 0.8) == pytest.approx(4.0, abs=1e-12)
    assert payoff_p1(HH, REF_FACTORS, 0.8) == pytest.approx(7.2, abs=1e-12)
    assert payoff_p1(RH, REF_FACTORS, 0.8) == pytest.approx(5.6, abs=1e-12)


@given(x=st.floats(0.01, 100), y=st.floats(0.01, 100), eps=confidence)
def test_payoff_p1_zeroed_optional_factors(x, y, eps):
    f = SystemFactors(t_h=0, t_a=x, h=y, co2=0)
    assert payoff_p1(RR, f, eps) == pytest.approx(eps * (x + y), rel=1e-12)


def test_payoff_p2_hand_values():
    assert payoff_p2(HH, REF_FACTORS, 0.8) == pytest.approx(2.2, abs=1e-12)
    assert payoff_p2(RH, REF_FACTORS, 0.8) == pytest.approx(1.0, abs=1e-12)
    assert payoff_p2(RR, REF_FACTORS, 0.8, P2ScaleMode.COMPLEMENT) == pytest.approx(1.8, abs=1e-12)
    assert payoff_p2(HR, REF_FACTORS, 0.8, P2ScaleMode.COMPLEMENT) == pytest.approx(1.4, abs=1e-12)


def test_payoff_p2_scale_modes():
    assert payoff_p2(HH, REF_FACTORS, 0.8, P2ScaleMode.SAME) == pytest.approx(8.8)
    assert payoff_p2(HH, REF_FACTORS, 0.8, P2ScaleMode.UNIT) == pytest.approx(11.0)


@given(f=factors_st)
def test_unit_scale_ignores_eps(f):
    for prof in PROFILES:
        assert payoff_p2(prof, f, 0.5, P2ScaleMode.UNIT) == payoff_p2(prof, f, 0.9, P2ScaleMode.UNIT)


@pytest.mark.parametrize(
    "kwargs, path",
    [
        (dict(t_h=1, t_a=0, h=1, co2=1), "t_a"),
        (dict(t_h=1, t_a=-1, h=1, co2=1), "t_a"),
        (dict(t_h=1, t_a=1, h=0, co2=1), "h"),
        (dict(t_h=-0.1, t_a=1, h=1, co2=1), "t_h"),
        (dict(t_h=1, t_a=1, h=1, co2=-2), "co2"),
        (dict(t_h=math.nan, t_a=1, h=1, co2=1), "t_h"),
        (dict(t_h=1, t_a=math.inf, h=1, co2=1), "t_a"),
    ],
)
def test_invalid_factors(kwargs, path):
    with pytest.raises(ValidationError) as info:
        SystemFactors(**kwargs)
    assert info.value.path == path


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_eps_domain(eps):
    with pytest.raises(DomainError):
        payoff_p1(RR, REF_FACTORS, eps)
    with pytest.raises(DomainError):
        payoff_p2(RR, REF_FACTORS, eps)
    with pytest.raises(DomainError):
        build_bimatrix(REF_FACTORS, eps)


# -- bimatrix ------------------------------------------------------------------


def test_reference_bimatrix(ref_bimatrix):
    m = ref_bimatrix
    got = [m.A, m.B, m.C, m.D, m.a, m.b, m.c, m.d]
    assert got == pytest.approx([8.8, 7.2, 5.6, 4.0, 2.2, 1.8, 1.4, 1.0], abs=1e-12)


def test_cell_placement(ref_bimatrix):
    m = ref_bimatrix
    assert m.cell(RR) == (m.A, m.b)
    assert m.cell(RH) == (m.C, m.d)
    assert m.cell(HR) == (m.D, m.c)
    assert m.cell(HH) == (m.B, m.a)
    assert BimatrixPayoffs.from_cells(*m.tables()) == m


def test_linearity_in_eps():
    hi = build_bimatrix(REF_FACTORS, 0.8)
    lo = build_bimatrix(REF_FACTORS, 0.4)
    for k in "ABCD":
        assert getattr(lo, k) == pytest.approx(getattr(hi, k) / 2, rel=1e-12)


@given(eps=confidence)
def test_minimal_factors(eps):
    m = build_bimatrix(SystemFactors(t_h=0, t_a=1, h=1, co2=0), eps)
    assert (m.A, m.B, m.C, m.D) == pytest.approx((2 * eps, 0.0, -eps, -2 * eps), abs=1e-12)


@given(f=factors_st, eps=confidence, mode=scale_st)
def test_orderings_hold(f, eps, mode):
    m = build_bimatrix(f, eps, mode)
    assert m.A > m.B > m.C > m.D
    assert m.a > m.b > m.c > m.d


def test_ordering_check_rejects_hand_built():
    with pytest.raises(InvariantError):
        BimatrixPayoffs(1, 1, 1, 1, 1, 1, 1, 1).check_ordering()


def test_non_finite_entries_rejected():
    with pytest.raises(ValidationError):
        BimatrixPayoffs(math.nan, 1, 1, 1, 1, 1, 1, 1)


# -- pure equilibria -------------------------------------------------------------


def test_psne_reference(ref_bimatrix):
    assert find_psne(ref_bimatrix) == [RR, HH]
    assert brute_force_psne(ref_bimatrix) == [(0, 0), (1, 1)]


def test_psne_dominant_strategies():
    # p1 prefers a1 in both columns, p2 prefers a1 in both rows
    m = BimatrixPayoffs.from_cells([[5, 4], [1, 0]], [[3, 1], [2, 0]])
    assert find_psne(m) == [RR]


def test_psne_constant_matrix():
    m = BimatrixPayoffs(*([2.5] * 8))
    assert find_psne(m) == list(PROFILES)


@settings(max_examples=300)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_psne_matches_brute_force(vals):
    # small integer payoffs produce plenty of ties
    m = BimatrixPayoffs(*map(float, vals))
    expected = [PROFILES[2 * i + j] for i, j in brute_force_psne(m)]
    assert find_psne(m) == expected


@given(f=factors_st, eps=confidence, mode=scale_st, k1=st.floats(1e-3, 1e3), k2=st.floats(1e-3, 1e3))
def test_positive_scaling_invariance(f, eps, mode, k1, k2):
    m = build_bimatrix(f, eps, mode)
    scaled = m.scaled(k1, k2)
    assert find_psne(scaled) == find_psne(m) == [RR, HH]
    s, t = msne(m), msne(scaled)
    assert t.sigma_p1_a1 == pytest.approx(s.sigma_p1_a1, abs=1e-9)
    assert t.sigma_p2_a1 == pytest.approx(s.sigma_p2_a1, abs=1e-9)


# -- expected utilities and mixed equilibrium ------------------------------------------


def test_expected_utility_hand_values(ref_bimatrix):
    m = ref_bimatrix
    assert expected_utility_action(m, Player.P2, R, 0.5) == pytest.approx(1.6, abs=1e-12)
    assert expected_utility_action(m, Player.P2, H, 0.5) == pytest.approx(1.6, abs=1e-12)
    assert expected_utility_action(m, Player.P2, R, 1.0) == m.b
    assert expected_utility_action(m, Player.P1, R, 1.0) == m.A
    assert expected_utility_action(m, Player.P1, H, 0.0) == m.B


@pytest.mark.parametrize("sigma", [-0.01, 1.01])
def test_expected_utility_domain(ref_bimatrix, sigma):
    with pytest.raises(DomainError):
        expected_utility_action(ref_bimatrix, Player.P1, R, sigma)


def test_msne_reference(ref_bimatrix):
    s = msne(ref_bimatrix)
    assert s.sigma_p1_a1 == pytest.approx(0.5, abs=1e-12)
    assert s.sigma_p2_a1 == pytest.approx(0.25, abs=1e-12)


def test_msne_p2_scaled_by_ten(ref_bimatrix):
    s, t = msne(ref_bimatrix), msne(ref_bimatrix.scaled(1.0, 10.0))
    assert (t.sigma_p1_a1, t.sigma_p2_a1) == pytest.approx((s.sigma_p1_a1, s.sigma_p2_a1), abs=1e-12)


def test_msne_degenerate():
    with pytest.raises(DegenerateGameError):
        msne(BimatrixPayoffs(*([1.0] * 8)))


@given(f=factors_st, eps=confidence, mode=scale_st)
def test_msne_closed_form_in_factors(f, eps, mode):
    s = msne(build_bimatrix(f, eps, mode))
    den = 3 * f.t_a + 2 * f.h
    assert s.sigma_p2_a1 == pytest.approx(f.t_a / den, abs=1e-9)
    assert s.sigma_p1_a1 == pytest.approx((f.t_a + 2 * f.h) / den, abs=1e-9)


@given(f=factors_st, eps=confidence, mode=scale_st)
def test_indifference_at_msne(f, eps, mode):
    m = build_bimatrix(f, eps, mode)
    s = msne(m)
    assert 0.0 <= s.sigma_p1_a1 <= 1.0 and 0.0 <= s.sigma_p2_a1 <= 1.0
    u2 = [expected_utility_action(m, Player.P2, a, s.sigma_p1_a1) for a in (R, H)]
    u1 = [expected_utility_action(m, Player.P1, a, s.sigma_p2_a1) for a in (R, H)]
    assert abs(u2[0] - u2[1]) <= 1e-9 * max(1.0, abs(u2[0]))
    assert abs(u1[0] - u1[1]) <= 1e-9 * max(1.0, abs(u1[0]))


def test_msne_matches_grid_oracle():
    rng = np.random.default_rng(7)
    for f, eps in random_factors(rng, 50):
        m = build_bimatrix(f, eps)
        s = msne(m)
        s1_ok, s2_ok = grid_msne(m)
        assert s1_ok.size and s2_ok.size
        assert np.all(np.abs(s1_ok - s.sigma_p1_a1) <= 1e-3)
        assert np.all(np.abs(s2_ok - s.sigma_p2_a1) <= 1e-3)


# -- equilibrium payoffs ---------------------------------------------------------------


def test_msne_payoffs_reference(ref_bimatrix):
    u = msne_expected_payoffs(ref_bimatrix, MixedStrategyProfile(0.5, 0.25))
    assert u == pytest.approx((6.4, 1.6), abs=1e-12)
    assert u == pytest.approx(four_cell_expectation(ref_bimatrix, 0.5, 0.25), abs=1e-12)


def test_msne_payoffs_pure_corners(ref_bimatrix):
    m = ref_bimatrix
    assert msne_expected_payoffs(m, MixedStrategyProfile(1, 1)) == pytest.approx((m.A, m.b), abs=1e-12)
    assert msne_expected_payoffs(m, MixedStrategyProfile(0, 0)) == pytest.approx((m.B, m.a), abs=1e-12)


def test_printed_p2_coefficient_disagrees_with_expectation(ref_bimatrix):
    # the (a+b+c+d) variant misses the four-cell expectation at the reference MSNE
    m, s1, s2 = ref_bimatrix, 0.5, 0.25
    printed = (m.a + m.b + m.c + m.d) * s1 * s2 + (m.d - m.a) * s1 + (m.c - m.a) * s2 + m.a
    assert abs(printed - four_cell_expectation(m, s1, s2)[1]) > 0.1


@given(
    vals=st.lists(st.floats(-100, 100), min_size=8, max_size=8),
    s1=st.floats(0, 1),
    s2=st.floats(0, 1),
)
def test_bilinear_matches_four_cell(vals, s1, s2):
    m = BimatrixPayoffs(*vals)
    got = msne_expected_payoffs(m, MixedStrategyProfile(s1, s2))
    want = four_cell_expectation(m, s1, s2)
    assert got == pytest.approx(want, abs=1e-10)


def test_mixed_profile_validation():
    with pytest.raises(DomainError):
        MixedStrategyProfile(1.2, 0.5)


# -- solve ---------------------------------------------------------------------------


def test_solve_reference():
    sol = solve(REF_FACTORS, REF_EPS)
    assert sol.psne == [RR, HH]
    assert (sol.msne.sigma_p1_a1, sol.msne.sigma_p2_a1) == pytest.approx((0.5, 0.25), abs=1e-12)
    assert (sol.msne_payoff_p1, sol.msne_payoff_p2) == pytest.approx((6.4, 1.6), abs=1e-12)


def test_solve_eps_independent_strategies():
    a, b = solve(REF_FACTORS, 0.999), solve(REF_FACTORS, 0.5)
    assert a.msne.sigma_p1_a1 == pytest.approx(b.msne.sigma_p1_a1, abs=1e-12)
    assert a.msne.sigma_p2_a1 == pytest.approx(b.msne.sigma_p2_a1, abs=1e-12)


def test_solve_rejects_zero_eps():
    with pytest.raises(DomainError):
        solve(REF_FACTORS, 0.0)


def test_action_profile_str():
    assert str(ActionProfile(R, H)) == "(a1,a2)"
