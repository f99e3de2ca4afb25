import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdx import bounds as bd
from qdx.errors import DegenerateFit, DomainError, SeriesTooShort
from qdx.lattice import PotentialSpec

FIB8 = PotentialSpec.fibonacci(8.0)
FREE = PotentialSpec.free()
LOG_PHI = math.log((1 + math.sqrt(5)) / 2)


def test_constants_at_eight():
    cc = bd.coupling_constants(8.0, deltas=(0.0, 0.1), p_list=(1.0, 2.0))
    assert cc.S_l == 3.0
    assert cc.S_u == 38.0
    assert math.isclose(cc.alpha_upper, 2 * LOG_PHI / math.log(3), rel_tol=1e-15)
    assert abs(cc.alpha_upper - 0.876041) < 1e-5
    assert math.isclose(cc.alpha_lower, 1 / cc.s, rel_tol=1e-15)
    assert math.isclose(cc.s, math.log(38) / (2 * LOG_PHI), rel_tol=1e-15)
    assert math.isclose(cc.lambda0_at[0.0], math.sqrt(24), rel_tol=1e-15)
    assert math.isclose(cc.lambda0_at[0.1], math.sqrt(29.168), rel_tol=1e-12)
    d = cc.to_dict()
    json.dumps(d)
    assert set(d["beta_lower_zero_phase"]) == {"1.0", "2.0"}


def test_alpha_lower_value():
    # 2 ln phi / ln 38 to 10 digits (independent mpmath evaluation)
    import mpmath
    with mpmath.workdps(30):
        want = float(2 * mpmath.log(mpmath.phi) / mpmath.log(38))
    assert abs(bd.coupling_constants(8.0).alpha_lower - want) < 1e-15
    assert abs(want - 0.2645775544) < 1e-10


def test_beta_zero_phase_formula():
    cc = bd.coupling_constants(8.0)
    lsu = math.log(38)
    for p in (0.5, 1, 4, 100):
        want = 2 * LOG_PHI / lsu - (2 / p) * (1 - 2 * math.log(math.sqrt(17) / 4) / (5 * lsu))
        assert math.isclose(cc.beta_lower_zero_phase(p), want, rel_tol=1e-14)
    assert cc.beta_lower_zero_phase(1e9) < cc.alpha_lower
    with pytest.raises(DomainError):
        cc.beta_lower_zero_phase(0)


def test_upper_scale_domain():
    with pytest.raises(DomainError):
        bd.coupling_constants(7.0)
    cc = bd.coupling_constants(7.0, require_upper=False)
    assert math.isnan(cc.S_l) and cc.S_u == 36.0
    assert math.isclose(bd.upper_scale(4 + 2 * math.sqrt(3) + 1e-12), math.sqrt(3), rel_tol=1e-5)


@settings(max_examples=50)
@given(st.floats(8.0, 1e6))
def test_constant_orderings(lam):
    cc = bd.coupling_constants(lam)
    assert cc.S_l < cc.S_u
    assert cc.alpha_lower < cc.alpha_upper


def test_ratio_of_rates_tends_to_one():
    lams = [8.0, 64.0, 1e3, 1e5, 1e8]
    r = [bd.coupling_constants(x).alpha_lower / bd.coupling_constants(x).alpha_upper for x in lams]
    assert np.all(np.diff(r) > 0) and r[-1] > 0.9
    assert bd.coupling_constants(1e8).alpha_upper < 0.06


def test_trend_table():
    rows = bd.asymptotic_trend()
    assert [r["lambda"] for r in rows] == [8.0, 32.0, 128.0, 512.0]
    prod = [r["alpha_upper_log"] for r in rows]
    gaps = [abs(r["gap"]) for r in rows]
    assert np.all(np.diff(gaps) < 0)
    # the product approaches 2 ln phi from above
    assert all(p > 2 * LOG_PHI for p in prod)
    assert abs(prod[-1] - 0.962424) < 2e-3


def test_theorem1_rhs_examples():
    t = 5.0
    K = 11.0
    vals = [bd.theorem1_rhs(N, t, FIB8).value for N in (1, 2, 4, 8, 16)]
    assert math.isclose(vals[0], 2 * K * t ** 4, rel_tol=1e-12)
    assert all(v <= 2 * K * t ** 4 * (1 + 1e-12) for v in vals)
    assert np.all(np.diff(vals) <= 0)
    a = bd.theorem1_rhs(10, 100.0, FIB8, quad_tol=1e-4)
    b = bd.theorem1_rhs(63, 100.0, FIB8, quad_tol=1e-4)
    assert a.value / b.value > 10
    assert b.error < 1e-3 * b.value


def test_theorem1_rhs_domain():
    with pytest.raises(DomainError):
        bd.theorem1_rhs(0, 1.0, FIB8)


def test_lemma2_rhs_free_far_tail():
    r = bd.lemma2_rhs(300, 10.0, FREE)
    assert r.value < 1e-8


def test_lemma2_against_outside_probability():
    # P_r(N, t) <= C (e^{-cN} + lemma2_rhs) with one (C, c) over a small grid
    ts = [5.0, 10.0, 20.0]
    Ns = [2, 5, 10, 20]
    P = bd.outside_series(FIB8, ts, lambda t: Ns, "right")
    rhs = np.array([[bd.lemma2_rhs(N, t, FIB8, quad_tol=1e-4).value for N in Ns] for t in ts])
    fit = bd.fit_envelope(P.ravel(), np.tile(Ns, len(ts)), rhs.ravel())
    assert fit.violations == 0
    # the resolvent tail tracks the time-domain tail within a few orders of magnitude
    ratio = P.ravel() / rhs.ravel()
    assert np.ptp(np.log10(ratio[P.ravel() > 1e-12])) < 4


def test_lemma2_below_theorem1_rhs():
    for N, t in ((3, 5.0), (8, 10.0)):
        l2 = bd.lemma2_rhs(N, t, FIB8, quad_tol=1e-4).value
        t1 = bd.theorem1_rhs(N, t, FIB8, quad_tol=1e-4).value
        assert l2 <= t1


def test_fit_envelope_synthetic():
    N = np.arange(1, 40, dtype=float)
    rhs = 1e-3 * np.exp(-0.1 * N)
    P = 2.5 * (np.exp(-0.7 * N) + rhs)
    fit = bd.fit_envelope(P, N, rhs)
    assert fit.violations == 0
    assert math.isclose(fit.c, 0.7, rel_tol=1e-3)
    assert math.isclose(fit.C, 2.5, rel_tol=1e-3)
    assert fit.tightness >= 1
    with pytest.raises(DegenerateFit):
        bd.fit_envelope([0.0, 1.0], [1, 2], [1, 1])


def test_free_beta_two():
    ts = np.logspace(0, 2.5, 26)
    M = bd.moment_series(FREE, ts, [2.0])[:, 0]
    est = bd.transport_exponents(ts, M, 2.0)
    assert abs(est.beta_minus - 1) < 0.05 and abs(est.beta_plus - 1) < 0.05
    assert est.final_span[1] == ts[-1]
    assert math.isclose(est.final_span[0], ts[-1] / 100, rel_tol=1e-9)
    d = est.to_dict()
    json.dumps(d)


def test_constant_series_gives_zero():
    ts = np.logspace(0, 3, 31)
    est = bd.transport_exponents(ts, np.full(ts.size, 4.0), 2.0)
    assert est.beta_minus == 0 and est.beta_plus == 0


def test_power_series_exact():
    ts = np.logspace(0, 3, 31)
    est = bd.transport_exponents(ts, 3 * ts ** 1.5, 3.0)
    assert math.isclose(est.beta_plus, 0.5, rel_tol=1e-12)
    assert math.isclose(est.beta_minus, 0.5, rel_tol=1e-12)


def test_ratio_method_monotone_in_p():
    rng = np.random.default_rng(1)
    ts = np.logspace(0.5, 3, 26)
    sites = np.arange(-400, 401)
    prob = rng.random((ts.size, sites.size))
    prob /= prob.sum(axis=1, keepdims=True)
    ps = [1.0, 2.0, 4.0, 8.0]
    M = np.array([[np.sum(np.abs(sites) ** p * row) for p in ps] for row in prob])
    b = [bd.transport_exponents(ts, M[:, j], p, method="ratio").beta_plus for j, p in enumerate(ps)]
    assert np.all(np.diff(b) >= -1e-12)


def test_short_series():
    ts = np.logspace(0, 1.5, 10)
    with pytest.raises(SeriesTooShort):
        bd.transport_exponents(ts, ts ** 2, 2.0)
    with pytest.raises(ValueError):
        bd.transport_exponents(np.logspace(0, 3, 10), np.ones(10), 2.0, method="bogus")


@pytest.mark.parametrize("q", [0.0, 0.37, 2.0, 7.5])
def test_spreading_profile_synthetic(q):
    ts = np.logspace(1, 3, 21)
    alphas = np.round(np.arange(0, 1.21, 0.05), 10)
    P = np.tile(ts ** -q, (alphas.size, 1))
    prof = bd.spreading_profile(ts, alphas, P)
    assert np.allclose(prof.S_minus, q, atol=1e-12)
    assert np.allclose(prof.S_plus, q, atol=1e-12)
    assert prof.threshold_inf == 10.0 and prof.threshold_zero == 0.05
    json.dumps(prof.to_dict())


def test_spreading_profile_floor_and_thresholds():
    ts = np.logspace(1, 3, 21)
    alphas = np.array([0.2, 0.4, 0.6, 0.8])
    # S = 0, 1, 20 and a row of zeros
    P = np.vstack([np.ones_like(ts), ts ** -1.0, ts ** -20.0, np.zeros_like(ts)])
    prof = bd.spreading_profile(ts, alphas, P, floor=1e-300)
    assert prof.S_plus[0] == 0 and math.isclose(prof.S_plus[1], 1.0)
    assert math.isinf(prof.S_plus[3])
    assert prof.alpha_l_plus == 0.2
    assert prof.alpha_u_plus == 0.4
    # with a floor at 1e-50, t^-20 drops below it late in the final decade
    prof = bd.spreading_profile(ts, alphas, P, floor=1e-50)
    assert math.isinf(prof.S_minus[2])
    assert math.isclose(prof.S_plus[2], 20.0)


def test_spreading_profile_needs_a_decade():
    with pytest.raises(SeriesTooShort):
        bd.spreading_profile(np.linspace(2, 10, 5), [0.5], np.ones((1, 5)))


def test_decay_slope():
    ts = np.logspace(1, 3, 21)
    assert math.isclose(bd.decay_slope(ts, 5 * ts ** -2.5), -2.5, rel_tol=1e-12)


def test_averaged_moments_free():
    # <X^2>(T) = (2/T) int e^{-2t/T} 2 t^2 dt = T^2
    vals, errs = bd.averaged_moments(FREE, [2.0, 5.0], [2.0], dt0=0.1)
    assert np.allclose(vals[:, 0], [4.0, 25.0], rtol=1e-4)
    assert np.all(errs[:, 0] < 1e-3 * vals[:, 0])


def test_sandwich_domain_errors():
    with pytest.raises(DomainError):
        bd.sandwich_report(5.0, [10.0, 100.0])
    with pytest.raises(DomainError):
        bd.sandwich_report(4.5, [10.0, 100.0], upper=False)


def test_lower_chain_domain_error():
    with pytest.raises(DomainError):
        bd.lower_bound_chain(4.0, [10.0, 100.0])


def test_measured_gamma_value():
    g = bd.measured_gamma(8.0)
    assert abs(g.gamma - 2.0147) < 1e-3
    assert g.n_max == 233


def test_band_energies_inside_bands():
    from qdx import tracemap as tm
    e = bd.band_energies(6, 0.2, 8.0)
    assert tm.real_bands(6, 0.2, 8.0).contains(e).all()


def test_report_serialization():
    rep = bd.BoundReport("x", FIB8.to_dict(), grid={"t": np.arange(3.0)},
                         measured={"P": np.array([np.inf, 1.0])},
                         checks={"a": {"pass": True}, "b": {"pass": np.bool_(True)}})
    d = rep.to_dict()
    assert d["measured"]["P"] == ["inf", 1.0]
    json.dumps(d, allow_nan=False)
    assert rep.passed
    rep.checks["c"] = {"pass": False}
    assert not rep.passed
