import math
import random
from fractions import Fraction

import pytest

from detcover.detmethod import chardin_upper_bound, hypersurface_rank, sombra_lower_bound
from detcover.errors import PlannerError
from detcover.planner import (PlanConfig, archimedean_log_bound, constants_C, cover_degree, d0_search,
                              d_conditions, delta_inverse_cap, delta_power_log, delta_star, dudek_regime,
                              e_constant, first_prime_at_least, first_prime_from_log, height_threshold, log_b0,
                              log_n0, make_plan, n0_and_primes, prime_condition, primes_from, r_estimate,
                              slope_lower_bound)


@pytest.fixture
def conic_cfg():
    return PlanConfig(M=2, n=1, d=2)


@pytest.fixture
def cubic_cfg():
    return PlanConfig(M=2, n=1, d=3)


def test_plan_config_validation():
    with pytest.raises(PlannerError):
        PlanConfig(M=2, n=3, d=2)
    with pytest.raises(PlannerError):
        PlanConfig(M=2, n=1, d=0)
    with pytest.raises(PlannerError):
        PlanConfig(M=2, n=1, d=2, c1=0)
    with pytest.raises(PlannerError):
        PlanConfig(M=2, n=1, d=2, h_x=-1)


def test_plan_config_for_variety(conic):
    cfg = PlanConfig.for_variety(conic, deg_k=3)
    assert (cfg.M, cfg.n, cfg.d) == (2, 1, 2)
    assert cfg.v == 6
    out = cfg.to_dict()
    assert out["poly_a_exp"] == out["poly_b_exp"] == 4
    assert "c_sym" in out["placeholders"]


def test_e_constant():
    assert e_constant(1) == pytest.approx(0.5)
    assert e_constant(2) == pytest.approx(2 / 3 * math.sqrt(2))
    with pytest.raises(ValueError):
        e_constant(0)


def test_delta_star_examples():
    assert delta_star(3, 1) == pytest.approx(0.07917, abs=1e-4)
    assert delta_star(2, 1) == pytest.approx(0.0248935, rel=1e-4)
    assert delta_star(1, 1) <= 0.25


def test_slope_and_delta_powers():
    assert slope_lower_bound(1) == pytest.approx(-0.5 * math.log(2))
    assert math.exp(delta_power_log(0.5, 2)) == pytest.approx(16)
    assert archimedean_log_bound(2, 1, 0.1, 1, 1) == pytest.approx(2 * math.log(2))
    assert archimedean_log_bound(1, 1, 0.25, 1, 0) == pytest.approx(-math.log(2))
    assert archimedean_log_bound(2, 1, 0.5, 0, 0) == pytest.approx(-2 * math.log(2))
    assert math.exp(delta_power_log(0.25, 1)) == pytest.approx(16)


def test_d_conditions_and_d0(conic_cfg, cubic_cfg):
    assert d0_search(conic_cfg) == 3
    assert d0_search(cubic_cfg) == 4
    assert not d_conditions(3, cubic_cfg).positivity
    assert d_conditions(4, cubic_cfg).all
    assert d_conditions(200, cubic_cfg).all
    with pytest.raises(PlannerError):
        d_conditions(1, cubic_cfg)


def test_d_conditions_fail_for_large_c2(conic_cfg):
    cfg = PlanConfig(M=2, n=1, d=2, c2=10)
    assert not d_conditions(5, cfg).positivity
    assert d0_search(cfg) > d0_search(conic_cfg)


def test_cover_degree():
    assert cover_degree(2, 5) == 4
    assert cover_degree(2, 8) == 5
    assert cover_degree(2, 20) == 6
    assert cover_degree(3, 1) == 1


def test_first_prime_at_least():
    assert first_prime_at_least(1.5) == 2
    assert first_prime_at_least(2) == 2
    assert first_prime_at_least(5.0000000001) == 5
    assert first_prime_at_least(math.exp(math.log(5))) == 5
    assert first_prime_at_least(24) == 29
    assert primes_from(7.389, 3) == [11, 13, 17]
    assert primes_from(3, 0) == []


def test_n0_and_primes(cubic_cfg):
    selection = n0_and_primes(100, cubic_cfg, 2)
    assert selection.n0 == pytest.approx(21.544, abs=1e-3)
    assert selection.primes == [23, 29]
    assert selection.exponents == [1, 1]
    assert selection.within_window
    assert not selection.dudek_regime
    line = PlanConfig(M=2, n=1, d=1)
    assert n0_and_primes(math.e, line, 1).primes == [11]
    with pytest.raises(PlannerError):
        n0_and_primes(1, line, 1)


def test_constants_c(conic_cfg):
    c = constants_C(conic_cfg)
    assert c.C1 == pytest.approx(6 + 1.5 * math.log(6) + 3 * math.log(3))
    assert c.C2 == pytest.approx(0.5 * math.log(6) + 0.5 * math.log(3) + math.log(2))
    assert c.C2 == pytest.approx(2.138333, abs=1e-5)
    assert c.C3 == pytest.approx(c.C1 + c.C2)
    doubled = constants_C(PlanConfig(M=2, n=1, d=2, c_sym=2))
    assert doubled.C1 - c.C1 == pytest.approx(3 * 2)
    with pytest.raises(PlannerError):
        constants_C(PlanConfig(M=2, n=2, d=1))


def test_r_estimate_conic(conic_cfg):
    estimate = r_estimate(5, conic_cfg)
    assert estimate.r == 10
    assert estimate.A1 == pytest.approx(33)
    assert estimate.A3 == pytest.approx(34 + 2 * estimate.A2)
    assert estimate.r_below_a3


def test_height_threshold_and_prime_condition(conic_cfg):
    threshold, branch = height_threshold(5, conic_cfg)
    assert threshold == pytest.approx(-1.5 * math.log(3) - 2)
    assert branch == "prime-covering"
    _, branch = height_threshold(1.5, PlanConfig(M=2, n=1, d=2, h_x=1000))
    assert branch == "single-hypersurface"
    assert prime_condition(5, 1, 5, conic_cfg)
    assert not prime_condition(3, 1, 5, conic_cfg)


def test_log_b0(conic_cfg):
    assert log_b0(conic_cfg) == pytest.approx(3 * math.exp(33.3))
    assert not dudek_regime(100.0)
    assert dudek_regime(4 * math.exp(33.3))


def test_make_plan_conic(conic_cfg):
    plan = make_plan(5, conic_cfg)
    assert plan.D == 4
    assert plan.D0 == 3
    assert plan.conditions_at_D.all
    assert plan.r == 10
    assert len(plan.primes) == 10
    assert plan.primes[0] == 5
    assert plan.mu == hypersurface_rank(2, 2, 4) == 9
    assert plan.prime_conditions[0]
    assert plan.delta == pytest.approx(0.0248935, rel=1e-4)
    assert any("prime-gap" in note for note in plan.notes)
    out = plan.to_dict()
    assert out["r_below_A3"]
    assert math.isfinite(out["predicted"]["log_N"])
    assert set(out["predicted"]["archimedean_log_bound"]) == {"1"}


def test_make_plan_rejects_small_bound(conic_cfg):
    with pytest.raises(PlannerError):
        make_plan(1, conic_cfg)


def test_make_plan_r_override(conic_cfg):
    plan = make_plan(5, conic_cfg, r_override=3)
    assert plan.primes == [5, 7, 11]


def test_random_configurations():
    rng = random.Random(1234)
    for _ in range(1000):
        M = rng.randint(2, 4)
        n = M - 1
        d = rng.randint(1, 5)
        cfg = PlanConfig(M=M, n=n, d=d, deg_k=rng.randint(1, 3), h_x=rng.uniform(0, 50))
        B = math.exp(rng.uniform(1, 30))
        delta = delta_star(d, n, cfg.deg_k)
        assert 0 < delta <= 0.25
        assert 1 / delta <= delta_inverse_cap(n, cfg.deg_k) * (1 + 1e-9)
        assert log_n0(B, cfg) > 0
        estimate = r_estimate(B, cfg)
        assert 1 <= estimate.r < estimate.A3
        D = rng.randint(max(1, d - 1), 60)
        r1 = hypersurface_rank(M, d, D)
        assert sombra_lower_bound(d, n, D) <= r1 <= chardin_upper_bound(d, n, D)


def test_e_constant_and_delta_cap_invariants():
    for m in range(1, 30):
        assert e_constant(m) >= 0.5
    for n in range(1, 5):
        for deg_k in (1, 2, 3):
            cap = delta_inverse_cap(n, deg_k)
            for d in (1, 2, 10, 10 ** 3, 10 ** 6):
                assert delta_star(d, n, deg_k) < 0.5
                assert 1 / delta_star(d, n, deg_k) <= cap * (1 + 1e-9)


def test_d0_grows_with_c1(cubic_cfg):
    assert d0_search(PlanConfig(M=2, n=1, d=3, c1=10)) == 51 > d0_search(cubic_cfg)


def test_r_estimate_regression_with_height():
    estimate = r_estimate(100, PlanConfig(M=2, n=1, d=3, h_x=5, c_sym=1))
    assert estimate.r == 12
    assert estimate.log_n0 == pytest.approx(2 / 3 * math.log(100))


def test_d_conditions_hold_for_huge_degree(conic_cfg, cubic_cfg):
    configs = [conic_cfg, cubic_cfg, PlanConfig(M=2, n=1, d=2, c2=10), PlanConfig(M=2, n=1, d=3, c1=10),
               PlanConfig(M=3, n=2, d=2), PlanConfig(M=4, n=3, d=4, deg_k=2)]
    for cfg in configs:
        for D in (10 ** 6, 10 ** 7):
            assert d_conditions(D, cfg).all, cfg


def test_huge_bounds_stay_in_log_space(conic_cfg):
    B = Fraction(10) ** 700
    assert cover_degree(2, B) == math.ceil(1400 * math.log(10))
    assert log_n0(B, conic_cfg) == pytest.approx(700 * math.log(10))
    with pytest.raises(PlannerError):
        n0_and_primes(B, conic_cfg, 2)
    with pytest.raises(PlannerError):
        make_plan(B, conic_cfg)
    with pytest.raises(PlannerError):
        first_prime_from_log(701)
    assert first_prime_from_log(math.log(24)) == 29


def test_plan_for_large_bound(conic_cfg):
    plan = make_plan(10 ** 200, conic_cfg)
    assert plan.r == len(plan.primes) == 2
    assert plan.primes[0] > 10 ** 199
    assert plan.D == math.ceil(400 * math.log(10))
