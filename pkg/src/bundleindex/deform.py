"""Formal deformation of the fixed-point set.

Each regular point f is moved to f_t = f exp(xi(t)) where xi solves

    xi + (h')^{-1} [ sum_i t_i dTr_{V_i}(f exp(xi)) ] = 0

as a truncated power series in the deformation variables. The correction
enters at strictly positive order, so plain resubstitution converges in
N sweeps.
"""

from dataclasses import dataclass

from . import exact
from .series import TruncatedSeries, lift, mat_det, mat_inverse
from .characters import _exp_weight


@dataclass(frozen=True)
class DeformationSpec:
    terms: tuple      # ((name, Character), ...)
    order: int

    def __post_init__(self):
        names = [n for n, _ in self.terms]
        if len(set(names)) != len(names):
            raise ValueError("deformation variable names must be distinct")

    @property
    def nvars(self):
        return len(self.terms)


@dataclass(frozen=True)
class DeformedPoint:
    base: object            # VerlindePoint
    xi: tuple               # vector of TruncatedSeries, zero constant term
    spec: DeformationSpec


def trace_series(ch, point, xi, nvars, order):
    """Tr_ch(f exp(xi)) as a series; xi is a vector of series."""
    total = TruncatedSeries(nvars, order)
    for lam, m in ch.weights:
        base = m * _exp_weight(lam, point)
        pair = TruncatedSeries(nvars, order)
        for a, x in zip(lam, xi):
            if a:
                pair = pair + x * a
        total = total + pair.exp() * base
    return total


def trace_gradient_series(ch, point, xi, nvars, order, rank):
    out = [TruncatedSeries(nvars, order) for _ in range(rank)]
    for lam, m in ch.weights:
        base = m * _exp_weight(lam, point)
        pair = TruncatedSeries(nvars, order)
        for a, x in zip(lam, xi):
            if a:
                pair = pair + x * a
        e = pair.exp() * base
        for i, a in enumerate(lam):
            if a:
                out[i] = out[i] + e * a
    return out


def trace_hessian_series(ch, point, xi, nvars, order, rank):
    out = [[TruncatedSeries(nvars, order) for _ in range(rank)]
           for _ in range(rank)]
    for lam, m in ch.weights:
        base = m * _exp_weight(lam, point)
        pair = TruncatedSeries(nvars, order)
        for a, x in zip(lam, xi):
            if a:
                pair = pair + x * a
        e = pair.exp() * base
        for i, a in enumerate(lam):
            if a == 0:
                continue
            for j, b in enumerate(lam):
                if b:
                    out[i][j] = out[i][j] + e * (a * b)
    return out


def _hp_inverse_float(level):
    inv = exact.inv([list(r) for r in level.h_prime])
    return [[float(x) for x in row] for row in inv]


def solve_deformed(rs, level, spec, vp):
    """Fixed-point solve of the defining equation at one regular point."""
    if not vp.is_regular:
        raise ValueError("deformation requires a regular point")
    if level.F_order == 0:
        raise ValueError("h' is singular")
    n, N = spec.nvars, spec.order
    rank = rs.rank
    hp_inv = _hp_inverse_float(level)
    tvars = [TruncatedSeries.variable(i, n, N) for i in range(n)]
    xi = [TruncatedSeries(n, N) for _ in range(rank)]
    for _ in range(N + 1):
        rhs = [TruncatedSeries(n, N) for _ in range(rank)]
        for t, (_, V) in zip(tvars, spec.terms):
            grad = trace_gradient_series(V, vp.point, xi, n, N, rank)
            for i in range(rank):
                rhs[i] = rhs[i] + t * grad[i]
        xi = [-sum((hp_inv[i][j] * rhs[j] for j in range(rank)),
                   TruncatedSeries(n, N)) for i in range(rank)]
    return DeformedPoint(vp, tuple(xi), spec)


def residual(rs, level, dp):
    """The defining equation evaluated on a solved point; should vanish."""
    spec = dp.spec
    n, N, rank = spec.nvars, spec.order, rs.rank
    hp_inv = _hp_inverse_float(level)
    tvars = [TruncatedSeries.variable(i, n, N) for i in range(n)]
    rhs = [TruncatedSeries(n, N) for _ in range(rank)]
    for t, (_, V) in zip(tvars, spec.terms):
        grad = trace_gradient_series(V, dp.base.point, dp.xi, n, N, rank)
        for i in range(rank):
            rhs[i] = rhs[i] + t * grad[i]
    return [dp.xi[i] + sum((hp_inv[i][j] * rhs[j] for j in range(rank)),
                           TruncatedSeries(n, N)) for i in range(rank)]


def deformed_weyl_denominator_sq(rs, dp):
    n, N = dp.spec.nvars, dp.spec.order
    out = TruncatedSeries.constant(1.0, n, N)
    from .roots import root_value
    for a in rs.all_roots:
        pair = TruncatedSeries(n, N)
        for c, x in zip(a, dp.xi):
            if c:
                pair = pair + x * c
        out = out * (1 - pair.exp() * root_value(rs, a, dp.base.point))
    return out


def theta_t(rs, level, spec, dp, F_order):
    """Deformed volume weight: det^{-1}[1 + sum t_i H_i^dagger] Delta^2 / |F|."""
    n, N, rank = spec.nvars, spec.order, rs.rank
    hp_inv = _hp_inverse_float(level)
    tvars = [TruncatedSeries.variable(i, n, N) for i in range(n)]
    M = [[lift(1.0 if i == j else 0.0, n, N) for j in range(rank)]
         for i in range(rank)]
    for t, (_, V) in zip(tvars, spec.terms):
        H = trace_hessian_series(V, dp.base.point, dp.xi, n, N, rank)
        for i in range(rank):
            for j in range(rank):
                acc = TruncatedSeries(n, N)
                for k in range(rank):
                    acc = acc + hp_inv[i][k] * H[k][j]
                M[i][j] = M[i][j] + t * acc
    d = mat_det(M)
    return d.inverse() * deformed_weyl_denominator_sq(rs, dp) * (1.0 / F_order)


def trace_at(dp, U):
    return trace_series(U, dp.base.point, dp.xi, dp.spec.nvars, dp.spec.order)


def pairing_matrix(rs, level, spec, dp):
    """Series inverse of h' + sum t_i H_{V_i}(f_t), the deformed inner
    product on the dual Cartan used by the odd-class bracket."""
    n, N, rank = spec.nvars, spec.order, rs.rank
    tvars = [TruncatedSeries.variable(i, n, N) for i in range(n)]
    M = [[lift(float(level.h_prime[i][j]), n, N) for j in range(rank)]
         for i in range(rank)]
    for t, (_, V) in zip(tvars, spec.terms):
        H = trace_hessian_series(V, dp.base.point, dp.xi, n, N, rank)
        for i in range(rank):
            for j in range(rank):
                M[i][j] = M[i][j] + t * H[i][j]
    return mat_inverse(M, n, N)
