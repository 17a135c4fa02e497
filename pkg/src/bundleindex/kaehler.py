"""Real-t continuation of the fixed-point set, the t -> -1 limit
machinery, and the graded-differential index built on them.

Points are complex coweight vectors z; the torus point is exp(2 pi i z).
The defining residual, in logarithmic coordinates and with the branch
of each root-factor log tracked along the path, is

    r(z) = h' z - anchor
         + [ s dTr_V + sum_{a>0} a (log(1+t e^{-a}) - log(1+t e^{a})) ] / 2 pi i

with integer anchor fixed at the t=0 seed. At t=-1 the root factors
collapse pairwise and the equation degenerates to iota(z) h = 0 modulo
the lattice, which is where the limit analysis lives.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import cmath
import math

import numpy as np

from . import exact, levels, characters
from .roots import TorusPoint
from .series import TruncatedSeries, lift, mat_det, mat_inverse

_TWO_PI_I = 2j * math.pi


def _exp_root(root, z):
    return cmath.exp(_TWO_PI_I * sum(a * x for a, x in zip(root, z)))


def _trace_grad_at_z(V, z, rank):
    out = [0j] * rank
    for lam, m in V.weights:
        e = m * cmath.exp(_TWO_PI_I * sum(a * x for a, x in zip(lam, z)))
        for i, a in enumerate(lam):
            if a:
                out[i] += e * a
    return out


def _trace_hess_at_z(V, z, rank):
    out = [[0j] * rank for _ in range(rank)]
    for lam, m in V.weights:
        e = m * cmath.exp(_TWO_PI_I * sum(a * x for a, x in zip(lam, z)))
        for i, a in enumerate(lam):
            if a == 0:
                continue
            for j, b in enumerate(lam):
                out[i][j] += e * a * b
    return out


def chi_residual(rs, level, V, s, t, z, anchor=None, counters=None):
    """Log-residual of the defining equation at a complex point z.

    With anchor=None the residual is reduced modulo the character lattice
    (each component shifted by the nearest integer), which is the plain
    congruence defect; with an anchor it is the exact branch-tracked value
    used by the corrector."""
    if t <= -1:
        raise ValueError("t must lie in (-1, 0]; the limit is handled separately")
    n = rs.rank
    hp = level.h_prime
    r = [sum(hp[i][j] * z[j] for j in range(n)) for i in range(n)]
    if s:
        g = _trace_grad_at_z(V, z, n)
        for i in range(n):
            r[i] += s * g[i] / _TWO_PI_I
    for idx, a in enumerate(rs.positive_roots):
        E = _exp_root(a, z)
        w = cmath.log(1 + t / E) - cmath.log(1 + t * E)
        nw = 0 if counters is None else counters[idx]
        for i in range(n):
            if a[i]:
                r[i] += a[i] * (w / _TWO_PI_I + nw)
    if anchor is None:
        r = [x - rho_i for x, rho_i in zip(r, rs.rho)]
        r = [x - round(x.real) for x in r]
    else:
        r = [x - anc for x, anc in zip(r, anchor)]
    return r


def _jacobian(rs, level, V, s, t, z):
    """d(residual)/dz: h' + s H_V - t sum_{all a} e^a/(1+t e^a) a (x) a."""
    n = rs.rank
    H = [[complex(level.h_prime[i][j]) for j in range(n)] for i in range(n)]
    if s:
        hv = _trace_hess_at_z(V, z, n)
        for i in range(n):
            for j in range(n):
                H[i][j] += s * hv[i][j]
    for a in rs.all_roots:
        E = _exp_root(a, z)
        c = -t * E / (1 + t * E)
        for i in range(n):
            if a[i] == 0:
                continue
            for j in range(n):
                H[i][j] += c * a[i] * a[j]
    return H


def _dresidual_dt(rs, z, t):
    n = len(z)
    out = [0j] * n
    for a in rs.positive_roots:
        E = _exp_root(a, z)
        c = ((1 / E) / (1 + t / E) - E / (1 + t * E)) / _TWO_PI_I
        for i in range(n):
            if a[i]:
                out[i] += a[i] * c
    return out


@dataclass
class TrackedPoint:
    origin: object              # VerlindePoint seed
    z: list                     # complex coweight coordinates
    anchor: tuple               # integers fixed at the seed
    counters: list              # per positive root log unwinding
    last_residual: float = 0.0
    s_series: tuple = None      # z(s) as vector of series once expanded


@dataclass
class ContinuationState:
    t: float
    points: list
    history: list = field(default_factory=list)
    hessian_guarantee: bool = True


def _newton(rs, level, V, s, t, z, anchor, counters, tol=1e-12, iters=40):
    for _ in range(iters):
        r = chi_residual(rs, level, V, s, t, z, anchor, counters)
        nrm = max(abs(x) for x in r)
        if nrm < tol:
            return z, nrm
        H = np.array(_jacobian(rs, level, V, s, t, z))
        dz = np.linalg.solve(H, np.array(r))
        z = [zi - di for zi, di in zip(z, dz)]
    return None, nrm


def _update_counters(rs, t, z, counters, prev_w):
    """Keep w + 2 pi i n continuous along the path: if the principal value
    jumps by a multiple of 2 pi i between accepted steps, absorb the jump
    into the integer counter."""
    new_w = []
    for idx, a in enumerate(rs.positive_roots):
        E = _exp_root(a, z)
        w = cmath.log(1 + t / E) - cmath.log(1 + t * E)
        if prev_w is not None:
            counters[idx] += round((prev_w[idx] - w).imag / (2 * math.pi))
        new_w.append(w)
    return new_w


def continue_points(rs, level, V, s_order, t_target, seeds=None,
                    initial_step=1e-2, tol=1e-12, max_halvings=50):
    """Track every regular t=0 seed to t_target by predictor-corrector."""
    if not (-1 < t_target <= 0):
        raise ValueError("t_target must lie in (-1, 0]")
    h = [list(r) for r in level.h]
    c = levels.c_form(rs)
    hc = [[h[i][j] - c[i][j] for j in range(rs.rank)] for i in range(rs.rank)]
    guarantee = exact.is_positive_definite(hc) if rs.rank else True
    if seeds is None:
        seeds = levels.regular_reps(rs, level)
    hp = [list(r) for r in level.h_prime]
    points = []
    for vp in seeds:
        anchor = exact.mat_vec(hp, [Fraction(x) for x in vp.point.mu])
        anchor = tuple(int(x) for x in anchor)
        points.append(TrackedPoint(
            origin=vp, z=[complex(float(x)) for x in vp.point.mu],
            anchor=anchor, counters=[0] * rs.num_positive_roots))
    state = ContinuationState(t=0.0, points=points,
                              hessian_guarantee=guarantee)
    prev_ws = [None] * len(points)
    t = 0.0
    step = -abs(initial_step)
    while t > t_target + 1e-15:
        t_next = max(t_target, t + step)
        ok = True
        trial = []
        for tp in points:
            dzdt = None
            try:
                H = np.array(_jacobian(rs, level, V, 0.0, t, tp.z))
                rt = np.array(_dresidual_dt(rs, tp.z, t))
                dzdt = -np.linalg.solve(H, rt)
            except np.linalg.LinAlgError:
                ok = False
                break
            z_pred = [zi + (t_next - t) * di for zi, di in zip(tp.z, dzdt)]
            z_new, nrm = _newton(rs, level, V, 0.0, t_next, z_pred,
                                 tp.anchor, tp.counters, tol)
            if z_new is None:
                ok = False
                break
            trial.append((z_new, nrm))
        if not ok:
            step /= 2
            if abs(step) < abs(initial_step) / 2 ** max_halvings:
                raise ArithmeticError(
                    f"continuation stalled at t={t}: step underflow "
                    "(Jacobian degeneration would contradict the "
                    "nondegeneracy lemma)")
            continue
        # collision monitoring
        if len(trial) > 1:
            for i in range(len(trial)):
                for j in range(i + 1, len(trial)):
                    d = max(abs(a - b) for a, b in
                            zip(trial[i][0], trial[j][0]))
                    if d < 1e-8:
                        raise ArithmeticError(
                            f"tracked points {i} and {j} collided at "
                            f"t={t_next}: distance {d}")
        for tp, (z_new, nrm), k in zip(points, trial, range(len(points))):
            prev_ws[k] = _update_counters(rs, t_next, z_new,
                                          tp.counters, prev_ws[k])
            tp.z = z_new
            tp.last_residual = nrm
        state.history.append((t_next, abs(step)))
        t = t_next
        step = min(-abs(initial_step), step * 2) if abs(step) < abs(initial_step) else step
    state.t = t_target
    if s_order > 0:
        for tp in points:
            tp.s_series = _expand_in_s(rs, level, V, s_order, t_target, tp)
    return state


def _series_root_value(root, z0, delta, nvars, order):
    """e^a at exp(2 pi i (z0 + delta)) with delta a series vector."""
    pair = TruncatedSeries(nvars, order)
    for a, d in zip(root, delta):
        if a:
            pair = pair + d * a
    return (pair * _TWO_PI_I).exp() * _exp_root(root, z0)


def _series_trace_grad(V, z0, delta, nvars, order, rank):
    out = [TruncatedSeries(nvars, order) for _ in range(rank)]
    for lam, m in V.weights:
        e = _series_root_value(lam, z0, delta, nvars, order) * m
        for i, a in enumerate(lam):
            if a:
                out[i] = out[i] + e * a
    return out


def _series_trace_hess(V, z0, delta, nvars, order, rank):
    out = [[TruncatedSeries(nvars, order) for _ in range(rank)]
           for _ in range(rank)]
    for lam, m in V.weights:
        e = _series_root_value(lam, z0, delta, nvars, order) * m
        for i, a in enumerate(lam):
            if a == 0:
                continue
            for j, b in enumerate(lam):
                if b:
                    out[i][j] = out[i][j] + e * (a * b)
    return out


def _expand_in_s(rs, level, V, s_order, t, tp):
    """Solve the residual for z(s) = z + s z_1 + ... about a tracked point."""
    n = rs.rank
    s = TruncatedSeries.variable(0, 1, s_order)
    H0 = np.array(_jacobian(rs, level, V, 0.0, t, tp.z))
    H0inv = np.linalg.inv(H0)
    delta = [TruncatedSeries(1, s_order) for _ in range(n)]
    for _ in range(s_order + 2):
        r = _series_residual(rs, level, V, s, t, tp, delta, 1, s_order)
        delta = [delta[i] - sum((H0inv[i][j] * r[j] for j in range(n)),
                                TruncatedSeries(1, s_order))
                 for i in range(n)]
    return tuple(delta)


def _series_residual(rs, level, V, s, t, tp, delta, nvars, order):
    """Residual with z = tp.z + delta(series); t fixed real; s a series."""
    n = rs.rank
    hp = level.h_prime
    r = []
    for i in range(n):
        acc = lift(sum(hp[i][j] * tp.z[j] for j in range(n)) - tp.anchor[i],
                   nvars, order)
        for j in range(n):
            acc = acc + float(hp[i][j]) * delta[j]
        r.append(acc)
    grad = _series_trace_grad(V, tp.z, delta, nvars, order, n)
    for i in range(n):
        r[i] = r[i] + s * grad[i] * (1 / _TWO_PI_I)
    for idx, a in enumerate(rs.positive_roots):
        E = _series_root_value(a, tp.z, delta, nvars, order)
        w = (1 + E.inverse() * t).log() - (1 + E * t).log()
        for i in range(n):
            if a[i]:
                r[i] = r[i] + (w * (1 / _TWO_PI_I) + tp.counters[idx]) * a[i]
    return r


def theta_st(rs, level, V, s, t, point, counters=None):
    """theta_{s,t}(f): inverse of |F| prod_a (1+t e^a)/(1-e^a) det[(h')^-1 H].

    point: a TrackedPoint (uses its s-expansion when s is a series) or a
    plain complex vector z with s a number."""
    if isinstance(point, TrackedPoint):
        z = point.z
        counters = point.counters
        if isinstance(s, TruncatedSeries) and point.s_series is not None:
            return _theta_st_series(rs, level, V, s, t, point)
    else:
        z = list(point)
    n = rs.rank
    prod = 1.0 + 0j
    for a in rs.all_roots:
        E = _exp_root(a, z)
        if abs(1 - E) < 1e-12:
            raise ValueError("theta_st at a singular point")
        prod *= (1 + t * E) / (1 - E)
    H = _jacobian(rs, level, V, s if not isinstance(s, TruncatedSeries) else 0.0,
                  t, z)
    hp_inv = exact.inv([list(r) for r in level.h_prime])
    M = [[sum(float(hp_inv[i][k]) * H[k][j] for k in range(n))
          for j in range(n)] for i in range(n)]
    det = np.linalg.det(np.array(M)) if n else 1.0
    inv_theta = level.F_order * prod * det
    return 1.0 / inv_theta


def _theta_st_series(rs, level, V, s, t, tp):
    n = rs.rank
    order = s.order
    delta = tp.s_series
    prod = lift(1.0, 1, order)
    for a in rs.all_roots:
        E = _series_root_value(a, tp.z, delta, 1, order)
        prod = prod * (1 + E * t) * (1 - E).inverse()
    hv = _series_trace_hess(V, tp.z, delta, 1, order, n)
    hp_inv = exact.inv([list(r) for r in level.h_prime])
    H = [[lift(float(level.h_prime[i][j]), 1, order) + s * hv[i][j]
          for j in range(n)] for i in range(n)]
    for a in rs.all_roots:
        E = _series_root_value(a, tp.z, delta, 1, order)
        c = E * (1 + E * t).inverse() * (-t)
        for i in range(n):
            if a[i] == 0:
                continue
            for j in range(n):
                H[i][j] = H[i][j] + c * (a[i] * a[j])
    M = [[sum((float(hp_inv[i][k]) * H[k][j] for k in range(n)),
              TruncatedSeries(1, order)) for j in range(n)] for i in range(n)]
    det = mat_det(M) if n else lift(1.0, 1, order)
    inv_theta = prod * det * float(level.F_order)
    return inv_theta.inverse()


def _trace_U(U, z):
    total = 0j
    for lam, m in U.weights:
        total += m * cmath.exp(_TWO_PI_I * sum(a * x for a, x in zip(lam, z)))
    return total


def _trace_U_series(U, tp, order):
    total = TruncatedSeries(1, order)
    for lam, m in U.weights:
        total = total + _series_root_value(lam, tp.z, tp.s_series, 1, order) * m
    return total


def kaehler_index(rs, level, genus, V, U=None, s_order=0, t=0.0, state=None):
    """(1+t)^{(g-1) rank} sum over tracked orbit representatives of
    theta_{s,t}^{1-g} Tr_U(f)."""
    if U is None:
        U = characters.trivial_character(rs.rank)
    if state is None:
        state = continue_points(rs, level, V, s_order, t)
    pref = (1 + t) ** ((genus - 1) * rs.rank)
    if s_order == 0:
        total = 0j
        for tp in state.points:
            th = theta_st(rs, level, V, 0.0, t, tp)
            total += th ** (1 - genus) * _trace_U(U, tp.z)
        return pref * total
    s = TruncatedSeries.variable(0, 1, s_order)
    total = TruncatedSeries(1, s_order)
    for tp in state.points:
        th = theta_st(rs, level, V, s, t, tp)
        power = th ** (1 - genus) if genus <= 1 else th.inverse() ** (genus - 1)
        total = total + power * _trace_U_series(U, tp, s_order)
    return total * pref


def kaehler_index_taylor(rs, level, genus, V, U=None, t_order=4):
    """The same index with t as a formal variable: the Taylor coefficients
    at t=0, whose p! multiples are indices of the graded differential
    bundles. Solved exactly in the series ring about each t=0 seed."""
    if U is None:
        U = characters.trivial_character(rs.rank)
    n = rs.rank
    t = TruncatedSeries.variable(0, 1, t_order)
    hp_inv = exact.inv([list(r) for r in level.h_prime]) if n else []
    hp_inv_f = [[float(x) for x in row] for row in hp_inv]
    total = TruncatedSeries(1, t_order)
    for vp in levels.regular_reps(rs, level):
        z0 = [float(x) for x in vp.point.mu]
        delta = [TruncatedSeries(1, t_order) for _ in range(n)]
        for _ in range(t_order + 2):
            # residual without anchor terms: only the t-dependent part,
            # nilpotent in t, so plain resubstitution converges
            resid = [TruncatedSeries(1, t_order) for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    resid[i] = resid[i] + float(level.h_prime[i][j]) * delta[j]
            for a in rs.positive_roots:
                E = _series_root_value(a, z0, delta, 1, t_order)
                x_m = E.inverse() * t
                x_p = E * t
                w = _log1p_nilpotent(x_m) - _log1p_nilpotent(x_p)
                for i in range(n):
                    if a[i]:
                        resid[i] = resid[i] + w * (a[i] / _TWO_PI_I)
            delta = [delta[i] - sum((hp_inv_f[i][j] * resid[j]
                                     for j in range(n)),
                                    TruncatedSeries(1, t_order))
                     for i in range(n)]
        # theta_{0,t} as a t-series at the solved point
        prod = lift(1.0, 1, t_order)
        H = [[lift(float(level.h_prime[i][j]), 1, t_order) for j in range(n)]
             for i in range(n)]
        for a in rs.all_roots:
            E = _series_root_value(a, z0, delta, 1, t_order)
            prod = prod * (1 + E * t) * (1 - E).inverse()
            c = E * (1 + E * t).inverse() * (-1) * t
            for i in range(n):
                if a[i] == 0:
                    continue
                for j in range(n):
                    H[i][j] = H[i][j] + c * (a[i] * a[j])
        M = [[sum((hp_inv_f[i][k] * H[k][j] for k in range(n)),
                  TruncatedSeries(1, t_order)) for j in range(n)]
             for i in range(n)]
        det = mat_det(M) if n else lift(1.0, 1, t_order)
        theta = (prod * det * float(level.F_order)).inverse()
        power = (theta.inverse() ** (genus - 1) if genus >= 1
                 else theta ** (1 - genus))
        trU = TruncatedSeries(1, t_order)
        for lam, m in U.weights:
            trU = trU + _series_root_value(lam, z0, delta, 1, t_order) * m
        total = total + power * trU
    pref = (1 + t) ** ((genus - 1) * n)
    return total * pref


def _log1p_nilpotent(x):
    """log(1+x) for a series with zero constant term."""
    out = TruncatedSeries(x.nvars, x.order)
    p = x
    k = 1
    while p.coeffs and k <= x.order:
        out = out + p * ((-1.0) ** (k + 1) / k)
        p = p * x
        k += 1
    return out


def _all_regular_points(rs, level):
    """Every regular point of F_rho (no Weyl quotient), as VerlindePoints."""
    reps = levels.regular_reps(rs, level)
    out = []
    seen = set()
    for vp in reps:
        for w in rs.weyl_coweight:
            mu = tuple(Fraction(sum(w[i][j] * vp.point.mu[j]
                                    for j in range(rs.rank))) % 1
                       for i in range(rs.rank))
            if mu in seen:
                continue
            seen.add(mu)
            out.append(levels.VerlindePoint(TorusPoint(mu), vp.theta0, 1, True))
    return sorted(out, key=lambda p: p.point.mu)


def full_flag_index(rs, level, genus, V, U=None, s_order=0, t=0.0):
    """Borel-reduced variant: Tr_U is replaced by
    Tr_U prod_{a>0} (1+t e^a)/(1-e^a) and the sum runs over all regular
    points rather than Weyl orbits."""
    if U is None:
        U = characters.trivial_character(rs.rank)
    seeds = _all_regular_points(rs, level)
    state = continue_points(rs, level, V, s_order, t, seeds=seeds)
    pref = (1 + t) ** ((genus - 1) * rs.rank)
    total = 0j
    for tp in state.points:
        th = theta_st(rs, level, V, 0.0, t, tp)
        flag = 1.0 + 0j
        for a in rs.positive_roots:
            E = _exp_root(a, tp.z)
            flag *= (1 + t * E) / (1 - E)
        total += th ** (1 - genus) * _trace_U(U, tp.z) * flag
    return pref * total


@dataclass
class LimitPoint:
    f_minus1: TorusPoint
    singular_roots: tuple       # positive roots vanishing at the point
    xi1: tuple                  # barrier minimizer (real coweights), or None
    tangent: tuple              # leading sqrt(1+t) coefficient of z, or None
    higher_xi: tuple            # z_k, k >= 2, from the recursion
    limiting_H: tuple           # h + s H_V|_{s=0} + sum_b b(x)b / b(xi1)^2
    anchor_offset: tuple        # the (half-)integer vector absorbed at x^0


def _barrier_minimize(rs, h, sing_roots, tol=1e-13):
    """Damped Newton on  zeta -> 1/2 h(zeta,zeta) - sum_b log b(zeta)
    inside the cone b(zeta) > 0."""
    n = rs.rank
    hf = np.array([[float(x) for x in row] for row in h])
    B = [np.array([float(x) for x in b]) for b in sing_roots]
    # start at the h-dual of the root sum, pushed into the cone
    zeta = np.linalg.solve(hf, sum(B))
    for b in B:
        if b @ zeta <= 0:
            raise ArithmeticError("initial point escaped the chamber")

    def val(x):
        return 0.5 * x @ hf @ x - sum(math.log(b @ x) for b in B)

    for _ in range(200):
        grad = hf @ zeta - sum(b / (b @ zeta) for b in B)
        if max(abs(grad)) < tol:
            break
        hess = hf + sum(np.outer(b, b) / (b @ zeta) ** 2 for b in B)
        step = np.linalg.solve(hess, grad)
        lam = 1.0
        v0 = val(zeta)
        for _ in range(60):
            cand = zeta - lam * step
            if all(b @ cand > 0 for b in B) and val(cand) <= v0 + 1e-15:
                break
            lam /= 2
        else:
            raise ArithmeticError(
                "barrier minimizer escaped the chamber (contradicts the "
                "convergence lemma)")
        zeta = zeta - lam * step
    return [float(x) for x in zeta]


def limit_t_minus1(rs, level, V, s_order=0):
    """Solutions of the t=-1 equation with their expansion data.

    For each lattice solution of iota(z) h = 0: if some roots vanish there,
    the sqrt(1+t) expansion kicks in; xi1 comes from the strictly convex
    log-barrier, the higher coefficients from Newton on the x-expanded
    residual; limiting_H is the quadratic form controlling the collapse."""
    n = rs.rank
    h = [list(r) for r in level.h]
    if n and not exact.is_positive_definite(h):
        raise ValueError("limit analysis requires positive definite h")
    # lattice solutions of h z == 0 mod Z^n, Weyl orbit reps
    hlvl = levels.Level(tuple(map(tuple, h)), tuple(map(tuple, h)),
                        abs(int(exact.det(h))))
    sols = levels._enumerate(rs, hlvl, tuple([0] * n))
    out = []
    order = 2 * s_order + 2
    for vp in sols:
        mu = vp.point.mu
        sing = [a for a in rs.positive_roots
                if sum(Fraction(x) * m for x, m in zip(a, mu)).denominator == 1]
        if not sing:
            out.append(LimitPoint(
                f_minus1=vp.point, singular_roots=(), xi1=None, tangent=None,
                higher_xi=(), limiting_H=tuple(map(tuple, h)),
                anchor_offset=tuple([0] * n)))
            continue
        xi1 = _barrier_minimize(rs, h, sing)
        Hlim = [[float(h[i][j]) for j in range(n)] for i in range(n)]
        for b in sing:
            bx = sum(bi * xi for bi, xi in zip(b, xi1))
            for i in range(n):
                for j in range(n):
                    Hlim[i][j] += b[i] * b[j] / bx ** 2
        tangent, higher, offset = _limit_recursion(
            rs, level, vp.point, sing, xi1, Hlim, order)
        out.append(LimitPoint(
            f_minus1=vp.point, singular_roots=tuple(sing), xi1=tuple(xi1),
            tangent=tuple(tangent), higher_xi=tuple(higher),
            limiting_H=tuple(map(tuple, Hlim)), anchor_offset=offset))
    return out


def _limit_recursion(rs, level, point, sing, xi1, Hlim, order):
    """Solve the residual as a series in x = sqrt(1+t) about a singular
    limit. The x^0 component is absorbed into a (half-)integer anchor;
    z_1 is seeded by the barrier direction (sqrt(2) rescale: the tangent
    sees both signs of each vanishing root) and Newton-corrected together
    with the higher coefficients."""
    n = rs.rank
    z0 = [float(x) for x in point.mu]
    sing_set = {tuple(a) for a in sing}
    t = TruncatedSeries.constant(-1.0, 1, order) + \
        TruncatedSeries.variable(0, 1, order) ** 2
    x = TruncatedSeries.variable(0, 1, order)
    Hinv = np.linalg.inv(np.array(Hlim))
    z1 = [math.sqrt(2) * v / (2 * math.pi) for v in xi1]
    delta = [x * z1[i] for i in range(n)]

    def residual(delta):
        r = [TruncatedSeries(1, order) for _ in range(n)]
        for i in range(n):
            for j in range(n):
                r[i] = r[i] + float(level.h_prime[i][j]) * delta[j]
            r[i] = r[i] + sum(level.h_prime[i][j] * z0[j] for j in range(n))
        for a in rs.positive_roots:
            E = _series_root_value(a, z0, delta, 1, order)
            if tuple(a) in sing_set:
                um = _shift_down(1 + t * E.inverse())
                up = _shift_down(1 + t * E)
                w = um.log() - up.log()
            else:
                w = (1 + t * E.inverse()).log() - (1 + t * E).log()
            for i in range(n):
                if a[i]:
                    r[i] = r[i] + w * (a[i] / _TWO_PI_I)
        return r

    offset = None
    for sweep in range(200):
        r = residual(delta)
        if offset is None:
            offset = [r[i].constant_term for i in range(n)]
            for v in offset:
                if abs(v.imag) > 1e-8 or abs(2 * v.real - round(2 * v.real)) > 1e-8:
                    raise ArithmeticError(
                        f"x^0 residual {v} is not half-integral")
            offset = tuple(round(2 * v.real) / 2 for v in offset)
        r = [r[i] - offset[i] for i in range(n)]
        err = max((abs(v) for ri in r for v in ri.coeffs.values()), default=0.0)
        if err < 1e-11:
            break
        delta = [delta[i] - sum((Hinv[i][j] * r[j] for j in range(n)),
                                TruncatedSeries(1, order))
                 for i in range(n)]
        # keep the expansion odd/clean: no x^0 term may creep in
        delta = [d.nilpotent_part() for d in delta]
    else:
        raise ArithmeticError("limit recursion did not converge")
    tangent = [delta[i].coefficient((1,)) for i in range(n)]
    higher = [tuple(delta[i].coefficient((k,)) for i in range(n))
              for k in range(2, order + 1)]
    return tangent, higher, offset


def _shift_down(s):
    """Divide a series with vanishing constant term by its variable."""
    const = s.coeffs.get((0,) * s.nvars, 0j)
    if abs(const) > 1e-9:
        raise ArithmeticError("series does not vanish at x=0")
    out = {}
    for k, v in s.coeffs.items():
        if sum(k) == 0:
            continue
        out[(k[0] - 1,) + k[1:]] = v
    return TruncatedSeries(s.nvars, s.order - 1, out)


def limit_inner_value(rs, level, genus, lp, U=None):
    """The t -> -1 limit of theta^{1-g} Tr_U at one limit point:
    [ |F| det((h')^{-1} H_lim) ]^{g-1} Tr_U(f_{-1})."""
    if U is None:
        U = characters.trivial_character(rs.rank)
    n = rs.rank
    hp_inv = exact.inv([list(r) for r in level.h_prime]) if n else []
    M = np.array([[sum(float(hp_inv[i][k]) * lp.limiting_H[k][j]
                       for k in range(n)) for j in range(n)]
                  for i in range(n)]) if n else np.eye(0)
    det = np.linalg.det(M) if n else 1.0
    tr = sum(m * cmath.exp(_TWO_PI_I * sum(
        a * float(x) for a, x in zip(lam, lp.f_minus1.mu)))
        for lam, m in U.weights)
    return (level.F_order * det) ** (genus - 1) * tr


def limit_census(rs, level, V, t_probe=-1 + 1e-4):
    """Match each tracked t=0 seed to the limit point its path approaches;
    returns (state, limits, assignment list of limit indices)."""
    state = continue_points(rs, level, V, 0, t_probe)
    limits = limit_t_minus1(rs, level, V)
    assignment = []
    for tp in state.points:
        best, best_d = None, None
        for li, lp in enumerate(limits):
            target = [float(x) for x in lp.f_minus1.mu]
            for w in rs.weyl_coweight:
                img = [sum(w[i][j] * target[j] for j in range(rs.rank))
                       for i in range(rs.rank)]
                d = max(abs((zi.real - xi) - round(zi.real - xi)) + abs(zi.imag)
                        for zi, xi in zip(tp.z, img))
                if best_d is None or d < best_d:
                    best_d, best = d, li
        assignment.append(best)
    return state, limits, assignment


def newstead_report(rs, level, genus, V, U=None, s_order=0):
    """Vanishing-order report for the graded index at t=-1."""
    if U is None:
        U = characters.trivial_character(rs.rank)
    order = (genus - 1) * rs.rank
    report = {
        "vanishing_order": order,
        "hessian_guarantee": None,
        "inner_sum_limit": None,
        "inner_sum_probe": None,
        "limit_agreement": None,
        "borel_poincare": None,
        "borel_factor_at_minus1": None,
        "borel_factor_vanishes": None,
        "full_flag_transfer": None,
    }
    c = levels.c_form(rs)
    hc = [[level.h[i][j] - c[i][j] for j in range(rs.rank)]
          for i in range(rs.rank)]
    report["hessian_guarantee"] = (
        exact.is_positive_definite(hc) if rs.rank else True)
    if not report["hessian_guarantee"]:
        report["flag"] = "outside_hessian_guarantee"
    if genus == 1:
        report["inner_sum_limit"] = float(len(levels.regular_reps(rs, level)))
        poly = levels.roots.poincare_polynomial(rs)
        val = sum(b * (-1) ** p for p, b in enumerate(poly))
        report["borel_poincare"] = poly
        report["borel_factor_at_minus1"] = val
        report["borel_factor_vanishes"] = (val == 0)
        report["full_flag_transfer"] = "inconclusive" if val == 0 else "ok"
        return report
    state, limits, assignment = limit_census(rs, level, V)
    formula = 0j
    for tp, li in zip(state.points, assignment):
        formula += limit_inner_value(rs, level, genus, limits[li], U)
    probe = 0j
    for tp in state.points:
        th = theta_st(rs, level, V, 0.0, state.t, tp)
        probe += th ** (1 - genus) * _trace_U(U, tp.z)
    report["inner_sum_limit"] = formula
    report["inner_sum_probe"] = probe
    report["limit_agreement"] = abs(probe - formula)
    from .roots import poincare_polynomial
    poly = poincare_polynomial(rs)
    val = sum(b * (-1) ** p for p, b in enumerate(poly))
    report["borel_poincare"] = poly
    report["borel_factor_at_minus1"] = val
    report["borel_factor_vanishes"] = (val == 0)
    report["full_flag_transfer"] = "inconclusive" if val == 0 else "ok"
    return report
