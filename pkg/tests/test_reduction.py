import math

import mpmath
import pytest

from lorentzdomains.cover import lift_level
from lorentzdomains.disc import build_triangle_group
from lorentzdomains.reduction import (
    _closed_quantities,
    check_reduction_bound,
    ell,
    f_bound,
    series_signature,
)

# high-precision references, evaluated at 40 digits
E2_R = 0.9241763718304448
E2_ELL = 0.5488468718152576
E2_RHS = 0.668740304976422
E2_MARGIN = 0.11989343316116444
E2_TANH_L = 0.8266084762447985
Z2_R = 0.9690206784932729
Z2_ELL = 0.6647174015893444
Z2_RHS = 0.7770942488589634
Z2_MARGIN = 0.11237684726961902
SEC_PI_15 = 1.0223405948650293

ADMISSIBLE = [k for k in range(1, 21) if k % 3 != 0]


def test_series_signature():
    assert series_signature("E", 2) == (5, 3, 3)
    assert series_signature("E", 7) == (10, 3, 3)
    assert series_signature("Z", 2) == (7, 3, 3)
    assert series_signature("Z", 5) == (13, 3, 3)
    with pytest.raises(ValueError):
        series_signature("Q", 2)
    with pytest.raises(ValueError):
        series_signature("E", 0)


def test_ell_endpoint_collapses():
    tri = build_triangle_group(5, 3, 3)
    t_max = 1.0 / math.cos(math.pi / 3)
    both = [ell(t_max, s, tri) for s in (1, -1)]
    assert abs(both[0] - both[1]) < 1e-9
    assert abs(both[0] - 1.0 / math.tanh(tri.L)) < 1e-9


def test_ell_monotone():
    tri = build_triangle_group(7, 3, 3)
    ts = [1.0 + i * (1.0 / math.cos(math.pi / 3) - 1.0) / 40 for i in range(41)]
    lo = [ell(t, -1, tri) for t in ts]
    hi = [ell(t, 1, tri) for t in ts]
    assert all(a < b for a, b in zip(lo, lo[1:]))
    assert all(a > b for a, b in zip(hi, hi[1:]))


def test_ell_domain_errors():
    tri = build_triangle_group(5, 3, 3)
    with pytest.raises(ValueError):
        ell(0.5, -1, tri)
    with pytest.raises(ValueError):
        ell(2.01, -1, tri)
    with pytest.raises(ValueError):
        ell(1.1, 2, tri)


def test_ell_frozen_value():
    tri = build_triangle_group(5, 3, 3)
    assert abs(ell(SEC_PI_15, -1, tri) - E2_ELL) < 1e-12


def test_f_bound():
    cfg = lift_level(5, 3, 3, 2)
    assert abs(f_bound(1.0 - 1e-13, 1.2, cfg) - 1.0) < 1e-6
    sec = 1.0 / math.cos(math.pi * 2 / (2 * cfg.p_lcm))
    lhs = f_bound(E2_R, sec, cfg)
    assert abs(lhs - (1.0 - math.sqrt(1.0 - E2_R**2)) / E2_R) < 1e-12
    assert f_bound(0.9, 1.01, cfg) < f_bound(0.95, 1.01, cfg)
    for bad_s in (-0.1, 0.0, 1.0, 1.3):
        with pytest.raises(ValueError):
            f_bound(bad_s, 1.2, cfg)
    with pytest.raises(ValueError):
        f_bound(0.5, 0.8, cfg)


def test_check_reduction_bound_E2():
    rep = check_reduction_bound("E", 2)
    assert rep.p_tri == 5 and rep.p_lcm == 15
    assert abs(rep.alpha - math.pi / 10) < 1e-15
    assert abs(rep.R - E2_R) < 1e-12
    assert abs(rep.ell_minus_at_sec - E2_ELL) < 1e-12
    assert abs(rep.rhs - E2_RHS) < 1e-12
    assert abs(rep.margin - E2_MARGIN) < 1e-12
    assert abs(rep.tanh_L - E2_TANH_L) < 1e-12
    assert rep.holds
    assert rep.orbit_premise_ok
    assert not rep.extended_precision
    assert rep.R > rep.tanh_L


def test_check_reduction_bound_Z2():
    rep = check_reduction_bound("Z", 2)
    assert rep.p_tri == 7 and rep.p_lcm == 21
    assert abs(rep.R - Z2_R) < 1e-12
    assert abs(rep.ell_minus_at_sec - Z2_ELL) < 1e-12
    assert abs(rep.rhs - Z2_RHS) < 1e-12
    assert abs(rep.margin - Z2_MARGIN) < 1e-12
    assert rep.holds and rep.orbit_premise_ok


def test_inadmissible_level_rejected():
    with pytest.raises(ValueError):
        check_reduction_bound("E", 3)
    with pytest.raises(ValueError):
        check_reduction_bound("Z", 6)


def test_margins_positive_all_admissible():
    for series in ("E", "Z"):
        for k in ADMISSIBLE:
            rep = check_reduction_bound(series, k, verify_orbit_premise=False)
            assert rep.holds, (series, k)
            assert rep.margin > 0.0, (series, k)
            assert rep.ell_minus_at_sec <= 1.0, (series, k)
            assert rep.R >= rep.tanh_L, (series, k)


def test_orbit_premise_small_levels():
    for series, k in (("E", 1), ("E", 4), ("Z", 1), ("Z", 4)):
        rep = check_reduction_bound(series, k)
        assert rep.orbit_premise_ok, (series, k)


def test_chain_endpoint_inequality():
    # 2 cos(pi k / 2 p_lcm) >= csc(pi/4 - alpha/2) across both series
    for series in ("E", "Z"):
        for k in ADMISSIBLE:
            p, _, _ = series_signature(series, k)
            p_lcm = 3 * p
            alpha = math.pi / (2 * p)
            lhs = 2.0 * math.cos(math.pi * k / (2 * p_lcm))
            rhs = 1.0 / math.sin(math.pi / 4 - alpha / 2)
            assert lhs >= rhs, (series, k, lhs, rhs)


def test_f_minus_ell_shape():
    # f(R, t) - ell^-(t) decreases in t and stays nonnegative at t = sec
    for series, k in (("E", 2), ("Z", 4)):
        p, q, r = series_signature(series, k)
        cfg = lift_level(p, q, r, k)
        tri = build_triangle_group(p, q, r)
        alpha = math.pi / (2 * p)
        R = (math.cos(alpha) / math.cos(2 * alpha)) * math.sqrt(
            math.cos(3 * alpha) / math.cos(alpha)
        )
        sec = 1.0 / math.cos(math.pi * k / (2 * cfg.p_lcm))
        ts = [1.0 + i * (sec - 1.0) / 30 for i in range(31)]
        gaps = [f_bound(R, t, cfg) - ell(t, -1, tri) for t in ts]
        assert all(a > b - 1e-12 for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] >= 0.0


def test_closed_forms_match_group_data():
    for p in (5, 7, 11, 13):
        tri = build_triangle_group(p, 3, 3)
        alpha = math.pi / (2 * p)
        d_sq = math.cos(3 * alpha) / math.cos(alpha)
        assert abs(tri.d**2 - d_sq) < 1e-12
        sinh_closed = math.sqrt(d_sq) / (math.sqrt(3.0) * math.sin(alpha))
        assert abs(math.sinh(tri.L) - sinh_closed) < 1e-11


def test_two_route_agreement_sweep():
    for series in ("E", "Z"):
        for k in ADMISSIBLE:
            p, q, r = series_signature(series, k)
            tri = build_triangle_group(p, q, r)
            p_lcm = 3 * p
            R, ell_closed, rhs_closed = _closed_quantities(p, k, p_lcm, math)
            sec = 1.0 / math.cos(math.pi * k / (2 * p_lcm))
            assert abs(ell(sec, -1, tri) - ell_closed) < 1e-10
            rhs_direct = (1.0 - math.sqrt(1.0 - R * R)) / R
            assert abs(rhs_direct - rhs_closed) < 1e-10


def test_extended_precision_route_consistent():
    with mpmath.workdps(50):
        R, e, rhs = _closed_quantities(5, 2, 15, mpmath)
        R, e, rhs = float(R), float(e), float(rhs)
    assert abs(R - E2_R) < 1e-14
    assert abs(e - E2_ELL) < 1e-14
    assert abs(rhs - E2_RHS) < 1e-14
