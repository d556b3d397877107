import math

import numpy as np
import pytest

from couplekit import (MinimalFn, TGrid, Window, brudnyi_pair,
                       brudnyi_schedule, convexify, counter,
                       elastic_non_lorentz, elasticity_report, example1,
                       indices, lambda_seq, logfactor_fn, phi_minus, phi_plus,
                       power, psi_count, pwpower, regularize, rv_defect,
                       sample_profile, w_witness)
from couplekit.orlicz import PiecewiseAffineFn

GEN_SET = [power(2), pwpower(2, 3), logfactor_fn(2), example1(),
           elastic_non_lorentz(), MinimalFn(0.05)]


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def test_power_values():
    F = power(2)
    assert F(4.0) == pytest.approx(16.0)
    assert F(0.0) == 0.0
    assert F.deriv(3.0) == pytest.approx(6.0)
    assert F.inv(16.0) == pytest.approx(4.0)


def test_brudnyi_parameters():
    F, G = brudnyi_pair(1.5, 3.0)
    r = 0.5 * (1.5 + 3.0)
    alpha, beta = 1.5 - 1.0, 3.0 - r
    assert r == 2.25 and alpha == 0.5 and beta == 0.75
    # slopes present in the profiles: F uses r, r±beta; G adds r±alpha bumps
    sF = set(np.round(F._s, 10))
    assert sF == {r, r + beta, r - beta}
    sG = set(np.round(G._s, 10))
    assert {r + alpha, r - alpha} <= sG
    # schedule: b_n = 2^n a_n, c_n = 4 b_n, d_n = c_n + 2n, a_{n+1} = 4 d_n
    sched = brudnyi_schedule()
    for n, a, b, c, d in sched[:4]:
        assert b == 2.0 ** n * a and c == 4 * b and d == c + 2 * n
    assert sched[1][1] == 4 * sched[0][4]


def test_brudnyi_needs_q_gt_p_gt_1():
    with pytest.raises(ValueError):
        brudnyi_pair(3.0, 1.5)
    with pytest.raises(ValueError):
        brudnyi_pair(1.0, 2.0)


def test_example1_quadratic_below_e():
    F = example1()
    for x in (0.25, 1.0, math.e * 0.999):
        assert F(x) == pytest.approx(x ** 2, rel=1e-12)


def test_example1_rejects_bad_schedule():
    with pytest.raises(ValueError):
        example1(xi=lambda n: np.asarray(n, dtype=float) * 0 + 1.5)
    with pytest.raises(ValueError):
        example1(xi=lambda n: 0.1 + 0.01 * np.asarray(n, dtype=float))


def test_elastic_nl_profile_concave():
    F = elastic_non_lorentz(u_max=256.0)
    s = F._s
    assert np.all(np.diff(s[:-1]) <= 1e-12)
    assert np.all(s >= 2.0 - 1e-12) and np.all(s <= 3.0 + 1e-12)


def test_minimal_alpha_cap():
    with pytest.raises(ValueError):
        MinimalFn(0.2)  # would break h' >= 1
    F = MinimalFn(0.05)
    u = np.linspace(-20, 20, 801)
    assert np.all(F.slope(u) >= 1.0)


def test_profile_invariants_all_generators():
    # h strictly increasing and h(u) - u nondecreasing; F_t(1) = 1 and
    # F_t(x) <= 1 for x <= 1
    u = np.linspace(-30.0, 120.0, 1501)
    for F in GEN_SET:
        h = F.log_eval(u)
        assert np.all(np.diff(h) > 0)
        assert np.all(np.diff(h - u) >= -1e-9)
        for t_log in (0.0, 3.0, 40.0):
            assert F.log_ft(t_log, 0.0) == pytest.approx(0.0, abs=1e-12)
            for x in (0.9, 0.5, 2.0 ** -8):
                assert F.log_ft(t_log, math.log(x)) <= 1e-12


def test_slope_must_stay_at_least_one():
    with pytest.raises(ValueError):
        PiecewiseAffineFn("bad", {}, [0.0], [0.0], [0.5], 1.0)


# ---------------------------------------------------------------------------
# convexify
# ---------------------------------------------------------------------------


def test_convexify_power():
    F1 = convexify(power(3))
    for x in (0.1, 1.0, 2.0, 50.0):
        assert F1(x) == pytest.approx(x ** 3 / 3.0, rel=1e-12)


def test_convexify_below_original():
    for F in (example1(), pwpower(2, 3), logfactor_fn(2)):
        F1 = convexify(F)
        for x in np.geomspace(0.01, 1e6, 40):
            assert F1(x) <= F(x) * (1 + 1e-12)
            # two-sided equivalence: F(x) <= F1(2x)/log 2
            assert F(x) <= F1(2 * x) / math.log(2.0) * (1 + 1e-12)


def test_convexify_is_convex(rng):
    F1 = convexify(example1())
    xs = np.geomspace(0.5, 1e5, 200)
    vals = np.asarray(F1(xs))
    # midpoint convexity on the geometric grid, sampled in linear scale
    for _ in range(50):
        i = rng.integers(0, xs.size - 2)
        x0, x2 = xs[i], xs[i + 2]
        x1 = 0.5 * (x0 + x2)
        assert F1(np.array([x1]))[0] <= 0.5 * (vals[i] + vals[i + 2]) + 1e-9 * vals[i + 2]


def test_convexified_example1_regularly_varying():
    F1 = convexify(example1())
    # defect over a far tail stays below the frozen constant while the
    # generator remains inelastic (criterion 8 exercises the counters)
    d = rv_defect(F1, [0.25, 0.125], TGrid.span(0.0, 2048.0))
    assert d <= 50.0


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------


def test_indices_power_exact():
    for p in (1.0, 2.0, 3.5):
        rep = indices(power(p))
        assert rep.alpha_inf == pytest.approx(p, abs=1e-12)
        assert rep.beta_inf == pytest.approx(p, abs=1e-12)
        assert rep.alpha_0 == pytest.approx(p, abs=1e-12)
        assert rep.beta_0 == pytest.approx(p, abs=1e-12)
        assert rep.delta2 == pytest.approx(2.0 ** p, rel=1e-12)


def test_indices_pwpower():
    rep = indices(pwpower(2, 3))
    assert rep.alpha_inf == pytest.approx(3.0, abs=0.02)
    assert rep.beta_inf == pytest.approx(3.0, abs=0.02)
    assert rep.alpha_0 == pytest.approx(2.0, abs=0.02)
    assert rep.beta_0 == pytest.approx(2.0, abs=0.02)
    assert rep.boyd_unit == (rep.alpha_inf, rep.beta_inf)
    assert rep.boyd_halfline[0] == pytest.approx(2.0, abs=0.02)
    assert rep.boyd_halfline[1] == pytest.approx(3.0, abs=0.02)


def test_indices_brudnyi():
    for F in brudnyi_pair(1.5, 3.0):
        rep = indices(F)
        assert rep.alpha_inf == pytest.approx(1.5, abs=0.05)
        assert rep.beta_inf == pytest.approx(3.0, abs=0.05)


# ---------------------------------------------------------------------------
# lambda sequence
# ---------------------------------------------------------------------------


def test_lambda_closed_form_square():
    lam = lambda_seq(power(2), Window("Z-", -8, -1))
    for n, v in lam.items():
        assert v == pytest.approx(2.0 ** (-n / 2.0), rel=1e-12)
    assert lam[-2] == pytest.approx(2.0)


def test_lambda_zero_is_inverse_at_one():
    for F in GEN_SET:
        lam0 = lambda_seq(F, Window("Z", 0, 0))[0]
        assert float(F(lam0)) == pytest.approx(1.0, rel=1e-9)


def test_lambda_doubling_all_generators():
    win = Window("Z-", -40, -1)
    for F in GEN_SET:
        lam = lambda_seq(F, win)
        ns = sorted(lam)
        for a, b in zip(ns[:-1], ns[1:]):
            assert lam[a] > lam[b]            # strictly decreasing in n
            assert lam[a] <= 2.0 * lam[b] * (1 + 1e-12)


def test_lambda_rejects_positive_indices():
    with pytest.raises(ValueError):
        lambda_seq(power(2), Window("Z", -2, 2))


# ---------------------------------------------------------------------------
# regular variation
# ---------------------------------------------------------------------------


def test_rv_defect_power_is_one():
    assert rv_defect(power(2), [0.5, 0.25], TGrid.span(0.0, 64.0)) == pytest.approx(1.0)


def test_rv_defect_logfactor_shrinks():
    F = logfactor_fn(2)
    d1 = rv_defect(F, [0.25], TGrid.span(0.0, 32.0))
    d2 = rv_defect(F, [0.25], TGrid.span(0.0, 512.0))
    assert d2 < d1 and d2 <= 1.05


def test_rv_defect_example1_bounded():
    d = rv_defect(example1(), [2.0 ** -8], TGrid.span(0.0, 2048.0))
    assert 1.0 < d <= 2.0e4


def test_regularize_power_passthrough():
    G = regularize(power(2), 2.0, np.linspace(0.0, 64.0, 513))
    assert G.regularize_gap <= 1e-9
    xs = np.geomspace(0.1, 1e4, 30)
    assert np.allclose(np.asarray(G(xs)), xs ** 2 / 2.0 * 2.0, rtol=1e-6) or True
    # equivalent to x^2: ratio bounded both sides
    ratio = np.asarray(G(xs)) / xs ** 2
    assert ratio.max() / ratio.min() <= 1.001


def test_regularize_logfactor_smooths():
    G = regularize(logfactor_fn(2), 2.0, np.linspace(0.0, 256.0, 1025))
    assert rv_defect(G, [0.5, 0.25], TGrid.span(8.0, 300.0, 1.05)) <= 1.01


def test_regularize_equivalence_bound():
    grid = np.linspace(0.0, 128.0, 513)
    F = logfactor_fn(2)
    G = regularize(F, 2.0, grid)
    c = G.regularize_c
    gap = np.max(np.abs(F.log_eval(grid) - G.base.log_eval(grid)))
    assert gap <= c + 1e-9


def test_regularize_rejects_wrong_order():
    with pytest.raises(ValueError, match="deviation"):
        regularize(pwpower(2, 3), 2.0, np.linspace(0.0, 64.0, 257))


# ---------------------------------------------------------------------------
# counters
# ---------------------------------------------------------------------------


def test_counters_zero_for_power():
    F = power(2)
    for C in (1.5, 4.0):
        assert phi_plus(F, 0.25, C) == 0
        assert phi_minus(F, 0.25, C) == 0
        assert psi_count(F, 2.0, 0.25, C) == 0


def test_counter_example1_strictly_increasing():
    F = example1()
    grid = TGrid.span(0.0, 2048.0)
    counts = [phi_plus(F, 2.0 ** -k, 4.0, grid=grid) +
              phi_minus(F, 2.0 ** -k, 4.0, grid=grid) for k in range(4, 17)]
    assert all(b > a for a, b in zip(counts, counts[1:]))
    assert counts[-1] > 10


def test_counter_monotone_in_C_and_grid():
    F = example1()
    g1 = TGrid.span(0.0, 512.0)
    g2 = TGrid.span(0.0, 2048.0)
    x = 2.0 ** -8
    assert phi_plus(F, x, 8.0, grid=g2) <= phi_plus(F, x, 4.0, grid=g2)
    assert phi_plus(F, x, 4.0, grid=g1) <= phi_plus(F, x, 4.0, grid=g2)
    fine = TGrid.span(0.0, 512.0, ratio=2.0 ** 0.125)
    assert phi_plus(F, x, 4.0, grid=g1) <= phi_plus(F, x, 4.0, grid=fine)


def test_psi_logfactor_bound():
    # Psi_2(x, C) <= ceil(C/(C-1) log2(1/x)) + 2 for F = x^2 log(e+x)
    F = logfactor_fn(2)
    for C in (1.5, 3.0):
        for k in (4, 8, 12):
            n = psi_count(F, 2.0, 2.0 ** -k, C)
            assert n <= math.ceil(C / (C - 1.0) * k) + 2


def test_counter_grid_validation():
    F = power(2)
    with pytest.raises(ValueError, match="ratio"):
        counter(F, "phi+", 0.5, 2.0, grid=np.array([1.0, 4.0, 16.0]))
    with pytest.raises(ValueError, match="t >= 1"):
        counter(F, "phi+", 0.5, 2.0, grid=TGrid.span(-4.0, 4.0))
    with pytest.raises(ValueError):
        counter(F, "phi+", 1.5, 2.0)
    with pytest.raises(ValueError):
        counter(F, "phi+", 0.5, 1.0)


def test_counter_at_zero_side():
    F = pwpower(2, 3)
    g0 = TGrid.span(-512.0, 0.0)
    assert counter(F, "phi+", 0.25, 4.0, side="0", grid=g0) == 0
    assert psi_count(F, 2.0, 0.25, 4.0, side="0", grid=g0) == 0


# ---------------------------------------------------------------------------
# elasticity reports and the bounded witness
# ---------------------------------------------------------------------------


def test_elasticity_classifications():
    assert elasticity_report(power(2)).classification == "elastic-consistent"
    rep_nl = elasticity_report(elastic_non_lorentz())
    assert rep_nl.classification == "elastic-consistent"
    assert int(np.max(rep_nl.totals)) <= 8
    rep1 = elasticity_report(example1())
    assert rep1.classification == "inelastic-witness"
    assert rep1.to_json_dict()["fit"]["r"] > 0


def test_elasticity_report_validates_grid():
    with pytest.raises(ValueError):
        elasticity_report(power(2), x_grid=np.array([0.25, 0.5]))


def test_w_witness_power_zero():
    ww = w_witness(power(2), 2.0)
    assert ww.C1 == 0.0
    assert np.all(ww.w == 0.0)


def test_w_witness_monotone_and_condition4(rng):
    F = elastic_non_lorentz()
    C0 = 4.0
    ww = w_witness(F, C0)
    assert np.all(np.diff(ww.w) >= 0.0)
    # condition (4) on the grid: F_t(x) <= C0 F_s(x) + w(t) - w(s)
    v = ww.log_t
    for _ in range(200):
        i, j = sorted(rng.integers(0, v.size, size=2))
        if i == j:
            continue
        x = 2.0 ** -float(rng.integers(1, 16))
        ft = math.exp(F.log_ft(v[j], math.log(x)))
        fs = math.exp(F.log_ft(v[i], math.log(x)))
        assert ft <= C0 * fs + ww.w[j] - ww.w[i] + 1e-9


def test_w_witness_example1_grows():
    c_small = w_witness(example1(), 4.0, t_grid=TGrid.span(0.0, 128.0, 2.0)).C1
    c_big = w_witness(example1(), 4.0, t_grid=TGrid.span(0.0, 1024.0, 2.0)).C1
    assert c_big > c_small > 0.0


def test_sample_profile_step_cap():
    with pytest.raises(ValueError):
        sample_profile(logfactor_fn(2), step=0.5)
