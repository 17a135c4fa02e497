import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from bundleindex import characters, indices, kaehler, levels, roots
from bundleindex.deform import DeformationSpec

from .oracles import series_max_diff


def case(label, k):
    rs = roots.parse_group(label)
    lv = levels.canonical_level(rs, k)
    return rs, lv, characters.adjoint_character(rs)


def test_chi_residual_zero_on_seeds():
    rs, lv, V = case("A1", 2)
    for vp in levels.regular_reps(rs, lv):
        r = kaehler.chi_residual(rs, lv, V, 0.0, 0.0,
                                 [float(x) for x in vp.point.mu])
        assert max(abs(x) for x in r) < 1e-12


def test_chi_residual_plain_congruence_defect_at_t0():
    rs, lv, V = case("A2", 1)
    rng = random.Random(4)
    for _ in range(5):
        z = [rng.uniform(0.05, 0.95) for _ in range(2)]
        r = kaehler.chi_residual(rs, lv, V, 0.0, 0.0, z)
        direct = [sum(lv.h_prime[i][j] * z[j] for j in range(2)) - 1
                  for i in range(2)]
        direct = [x - round(x) for x in direct]
        for a, b in zip(r, direct):
            assert abs(a - b) < 1e-12


def test_chi_residual_rejects_limit_t():
    rs, lv, V = case("A1", 1)
    with pytest.raises(ValueError):
        kaehler.chi_residual(rs, lv, V, 0.0, -1.0, [0.1])


def test_newton_converges_from_seeds():
    rs, lv, V = case("A1", 1)
    hp = [list(r) for r in lv.h_prime]
    for vp in levels.regular_reps(rs, lv):
        z0 = [complex(float(x)) for x in vp.point.mu]
        anchor = tuple(int(sum(hp[i][j] * vp.point.mu[j] for j in range(1)))
                       for i in range(1))
        z, nrm = kaehler._newton(rs, lv, V, 0.0, -0.5, z0, anchor,
                                 [0] * rs.num_positive_roots)
        assert z is not None and nrm < 1e-12


def test_jacobian_matches_finite_differences():
    rs, lv, V = case("A1", 2)
    z = [0.23 + 0.01j]
    t, s, h = -0.4, 0.0, 1e-6
    anchor = (0,)
    H = kaehler._jacobian(rs, lv, V, s, t, z)
    for j in range(rs.rank):
        up = list(z); up[j] += h
        dn = list(z); dn[j] -= h
        ru = kaehler.chi_residual(rs, lv, V, s, t, up, anchor)
        rd = kaehler.chi_residual(rs, lv, V, s, t, dn, anchor)
        for i in range(rs.rank):
            fd = (ru[i] - rd[i]) / (2 * h)
            assert abs(H[i][j] - fd) < 1e-5 * (1 + abs(fd))


def test_continuation_identity_at_t0():
    rs, lv, V = case("A1", 2)
    state = kaehler.continue_points(rs, lv, V, 0, 0.0)
    seeds = levels.regular_reps(rs, lv)
    assert len(state.points) == len(seeds)
    for tp, vp in zip(state.points, seeds):
        assert max(abs(a - float(b)) for a, b in zip(tp.z, vp.point.mu)) < 1e-12


def test_continuation_residuals_and_regularity():
    rs, lv, V = case("A1", 2)
    for t in (-0.5, -0.9):
        state = kaehler.continue_points(rs, lv, V, 0, t)
        assert len(state.points) == 3
        for tp in state.points:
            assert tp.last_residual < 1e-10
            # tracked points stay regular at every sampled t > -1
            for a in rs.all_roots:
                assert abs(1 - kaehler._exp_root(a, tp.z)) > 1e-6


def test_tracked_point_drifts_toward_singularity():
    # the outermost A1 k=2 seed moves monotonically toward zeta = 1
    rs, lv, V = case("A1", 2)
    prev = None
    for t in (-0.3, -0.6, -0.9, -0.99):
        state = kaehler.continue_points(rs, lv, V, 0, t)
        z = min(tp.z[0].real for tp in state.points)
        if prev is not None:
            assert z < prev
        prev = z


def test_theta_st_reduction_and_positivity():
    rs, lv, V = case("A1", 2)
    state0 = kaehler.continue_points(rs, lv, V, 0, 0.0)
    for tp in state0.points:
        th = kaehler.theta_st(rs, lv, V, 0.0, 0.0, tp)
        assert abs(th - tp.origin.theta0) < 1e-10
    for t in (-0.5, -0.9):
        state = kaehler.continue_points(rs, lv, V, 0, t)
        for tp in state.points:
            th = kaehler.theta_st(rs, lv, V, 0.0, t, tp)
            assert abs(th.imag) < 1e-9
            assert th.real > 0


def test_kaehler_index_t0_matches_index_even():
    for label, k in [("A1", 2), ("A2", 1)]:
        rs, lv, V = case(label, k)
        spec = DeformationSpec((("s", V),), 2)
        even = indices.index_even(rs, lv, 2, spec)
        got = kaehler.kaehler_index(rs, lv, 2, V, s_order=2, t=0.0)
        assert series_max_diff(got, even) < 1e-9


def test_taylor_coefficients_are_integers():
    rs, lv, V = case("A1", 2)
    out = kaehler.kaehler_index_taylor(rs, lv, 2, V, t_order=3)
    coeffs = [out.coefficient((n,)) for n in range(4)]
    for c in coeffs:
        assert abs(c.imag) < 1e-6
        assert abs(c.real - round(c.real)) < 1e-6
    assert [round(c.real) for c in coeffs] == [10, 0, -10, 0]


def test_full_flag_index_matches_at_t0():
    for label, kmax in [("A1", 3), ("A2", 3)]:
        for k in range(1, kmax + 1):
            rs, lv, V = case(label, k)
            a = kaehler.full_flag_index(rs, lv, 2, V, t=0.0)
            b = kaehler.kaehler_index(rs, lv, 2, V, t=0.0)
            assert abs(a - b) < 1e-8 * (1 + abs(b))


def test_full_flag_index_real_at_negative_t():
    rs, lv, V = case("A1", 2)
    v = kaehler.full_flag_index(rs, lv, 2, V, t=-0.5)
    assert abs(v.imag) < 1e-9
    assert math.isfinite(v.real)


def test_limit_points_a1_k2():
    rs, lv, V = case("A1", 2)
    lims = kaehler.limit_t_minus1(rs, lv, V)
    sing = [lp for lp in lims if lp.singular_roots]
    reg = [lp for lp in lims if not lp.singular_roots]
    assert sing and reg
    for lp in sing:
        # h = 4: minimize 2 zeta^2 - log(2 zeta) -> zeta = 1/2, H_lim = 8
        assert abs(lp.xi1[0] - 0.5) < 1e-9
        assert abs(lp.limiting_H[0][0] - 8) < 1e-9
    for lp in reg:
        assert lp.xi1 is None
        assert lp.limiting_H == lv.h
    for lp in lims:
        M = np.array([[float(x) for x in row] for row in lp.limiting_H])
        np.linalg.cholesky(M)   # positive definite


def test_limit_requires_positive_definite_h():
    rs = roots.parse_group("A1")
    lv = levels.canonical_level(rs, 0)   # h = 0, admissible but not h > 0
    with pytest.raises(ValueError):
        kaehler.limit_t_minus1(rs, lv, characters.adjoint_character(rs))


def test_jacobian_converges_to_limiting_H():
    # tracked singular-bound points: |H(f_t) - limiting_H| -> 0 linearly in
    # (1+t); extrapolation from k=3,4 agrees to 1e-3
    rs, lv, V = case("A1", 4)
    lims = kaehler.limit_t_minus1(rs, lv, V)
    errs = {}
    for k in (2, 3, 4):
        t = -1 + 10.0 ** -k
        state = kaehler.continue_points(rs, lv, V, 0, t)
        _, _, assignment = (state, lims, None), None, None
        # assign by proximity
        worst = 0.0
        Hs = []
        for tp in state.points:
            H = kaehler._jacobian(rs, lv, V, 0.0, t, tp.z)
            best = min(lims, key=lambda lp: max(
                abs((z.real - float(x)) - round(z.real - float(x))) + abs(z.imag)
                for z, x in zip(tp.z, lp.f_minus1.mu)))
            diff = max(abs(H[i][j] - best.limiting_H[i][j])
                       for i in range(rs.rank) for j in range(rs.rank))
            worst = max(worst, diff)
            Hs.append((tp, H, best))
        errs[k] = (worst, Hs)
    assert errs[2][0] > errs[3][0] > errs[4][0]
    # linear extrapolation in (1+t) for each singular-bound point
    for (tp3, H3, lp3), (tp4, H4, lp4) in zip(errs[3][1], errs[4][1]):
        x3, x4 = 1e-3, 1e-4
        ext = (H4[0][0] * x3 - H3[0][0] * x4) / (x3 - x4)
        assert abs(ext - lp4.limiting_H[0][0]) < 1e-3


def test_limit_census_counts_adjacent_alcoves():
    # over the full (un-quotiented) point set each singular limit must be
    # approached by one tracked point per adjacent alcove: 2 for A1
    rs, lv, V = case("A1", 2)
    seeds = kaehler._all_regular_points(rs, lv)
    state = kaehler.continue_points(rs, lv, V, 0, -1 + 1e-4, seeds=seeds)
    lims = kaehler.limit_t_minus1(rs, lv, V)
    counts = {}
    for tp in state.points:
        best = None
        best_d = None
        for i, lp in enumerate(lims):
            for w in rs.weyl_coweight:
                img = [sum(w[r][c] * float(lp.f_minus1.mu[c])
                           for c in range(rs.rank)) for r in range(rs.rank)]
                d = max(abs((z.real - x) - round(z.real - x)) + abs(z.imag)
                        for z, x in zip(tp.z, img))
                if best_d is None or d < best_d:
                    best_d, best = d, i
        counts[best] = counts.get(best, 0) + 1
    for i, lp in enumerate(lims):
        if lp.singular_roots:
            assert counts.get(i, 0) == 2


def test_newstead_report_a1():
    rs, lv, V = case("A1", 2)
    rep = kaehler.newstead_report(rs, lv, 2, V)
    assert rep["vanishing_order"] == 1
    lim = rep["inner_sum_limit"]
    assert abs(lim) > 1 and math.isfinite(abs(lim))
    assert rep["limit_agreement"] < 1e-2 * abs(lim)
    assert rep["flag"] == "outside_hessian_guarantee"   # h = c at k = 2
    rep1 = kaehler.newstead_report(rs, lv, 1, V)
    assert rep1["vanishing_order"] == 0
    assert rep1["inner_sum_limit"] == len(levels.regular_reps(rs, lv))


def test_newstead_report_a2_flags_borel_anomaly():
    rs, lv, V = case("A2", 1)
    rep = kaehler.newstead_report(rs, lv, 2, V)
    assert rep["vanishing_order"] == 2
    assert rep["borel_poincare"] == [1, 2, 2, 1]
    assert rep["borel_factor_at_minus1"] == 0
    assert rep["borel_factor_vanishes"] is True
    assert rep["full_flag_transfer"] == "inconclusive"


def test_continuation_guarantee_flag():
    rs = roots.parse_group("A1")
    V = characters.adjoint_character(rs)
    # h > c holds for k > 2 only (h = 2k, c = 4)
    assert kaehler.continue_points(
        rs, levels.canonical_level(rs, 3), V, 0, -0.1).hessian_guarantee
    assert not kaehler.continue_points(
        rs, levels.canonical_level(rs, 2), V, 0, -0.1).hessian_guarantee
