"""Fixed-point index sums: the even-class formula, odd-class brackets,
the general formula, the rank-one specialized form, and the graded
(rho-unshifted) variant.
"""

from dataclasses import dataclass
import cmath

from . import exact, levels, deform, characters
from .series import TruncatedSeries
from .deform import DeformationSpec


@dataclass(frozen=True)
class OddClassSpec:
    factors: tuple        # ((cycle label, Character), ...)
    intersections: tuple  # antisymmetric integer matrix #(C_j cap C_k)

    def __post_init__(self):
        m = self.intersections
        n = len(self.factors)
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError("intersection matrix shape mismatch")
        for i in range(n):
            if m[i][i] != 0:
                raise ValueError("intersection matrix must have zero diagonal")
            for j in range(n):
                if m[i][j] != -m[j][i]:
                    raise ValueError("intersection matrix must be antisymmetric")


def _int_power(s, e):
    if e >= 0:
        return s ** e
    return s.inverse() ** (-e)


def _regular_points(rs, level, point_set):
    if point_set == "F":
        pts = levels.enumerate_F(rs, level)
    elif point_set == "F_rho":
        pts = levels.enumerate_F_rho(rs, level)
    else:
        raise ValueError("point_set must be 'F_rho' or 'F'")
    return [p for p in pts if p.is_regular]


def index_even(rs, level, genus, spec, U=None, point_set="F_rho"):
    """Sum over regular Weyl orbits of theta_t(f)^{1-g} Tr_U(f_t)."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    if U is None:
        U = characters.trivial_character(rs.rank)
    n, N = spec.nvars, spec.order
    total = TruncatedSeries(n, N)
    for vp in _regular_points(rs, level, point_set):
        dp = deform.solve_deformed(rs, level, spec, vp)
        th = deform.theta_t(rs, level, spec, dp, level.F_order)
        total = total + _int_power(th, 1 - genus) * deform.trace_at(dp, U)
    return total


def pair_matrix(rs, level, spec, odd, dp):
    """A_jk = -#(C_j cap C_k) <dTr_{U_j} | dTr_{U_k}> at the deformed point,
    the antisymmetric matrix whose Pfaffian is the odd-class bracket."""
    n, N, rank = spec.nvars, spec.order, rs.rank
    m = len(odd.factors)
    G = deform.pairing_matrix(rs, level, spec, dp)
    grads = [deform.trace_gradient_series(U, dp.base.point, dp.xi, n, N, rank)
             for _, U in odd.factors]
    A = [[None] * m for _ in range(m)]
    for j in range(m):
        for k in range(m):
            if j == k:
                A[j][k] = TruncatedSeries(n, N)
                continue
            pair = TruncatedSeries(n, N)
            for p in range(rank):
                for q in range(rank):
                    pair = pair + grads[j][p] * G[p][q] * grads[k][q]
            A[j][k] = pair * float(-odd.intersections[j][k])
    return A


def odd_bracket(rs, level, spec, odd, dp):
    """Pfaffian pairing of the odd factors at the deformed point.

    Zero for an odd number of factors. Otherwise the perfect-matching sum
    with the permutation sign, each pair contributing
    -#(C cap C') <dTr_U | dTr_U'> in the deformed inner product."""
    n, N = spec.nvars, spec.order
    m = len(odd.factors)
    if m % 2 == 1:
        return TruncatedSeries(n, N)
    if m == 0:
        return TruncatedSeries.constant(1.0, n, N)
    return _pfaffian(pair_matrix(rs, level, spec, odd, dp), n, N)


def _pfaffian(A, nvars, order):
    m = len(A)
    if m == 0:
        return TruncatedSeries.constant(1.0, nvars, order)
    if m == 2:
        return A[0][1]
    total = TruncatedSeries(nvars, order)
    for j in range(1, m):
        rest = [r for r in range(m) if r not in (0, j)]
        minor = [[A[p][q] for q in rest] for p in rest]
        term = A[0][j] * _pfaffian(minor, nvars, order)
        if (j - 1) % 2 == 1:
            term = -term
        total = total + term
    return total


def index_general(rs, level, genus, spec, U=None, odd=None, point_set="F_rho"):
    """Even formula times the odd-class bracket at each point."""
    if odd is None or len(odd.factors) == 0:
        return index_even(rs, level, genus, spec, U, point_set)
    if U is None:
        U = characters.trivial_character(rs.rank)
    n, N = spec.nvars, spec.order
    total = TruncatedSeries(n, N)
    for vp in _regular_points(rs, level, point_set):
        dp = deform.solve_deformed(rs, level, spec, vp)
        th = deform.theta_t(rs, level, spec, dp, level.F_order)
        br = odd_bracket(rs, level, spec, odd, dp)
        total = total + (_int_power(th, 1 - genus)
                         * deform.trace_at(dp, U) * br)
    return total


def index_graded(rs, level, genus, spec, U=None, odd=None):
    """Same sum taken over the unshifted point set."""
    return index_general(rs, level, genus, spec, U, odd, point_set="F")


def index_su2_form(l, phi, genus, order):
    """Rank-one specialization: sum over the roots zeta_t with positive
    imaginary part of

        [(2l+4 + t phidd(zeta_t)) / -(zeta_t - 1/zeta_t)^2]^{g-1}

    where zeta_t^{2l+4} exp(t phid(zeta_t)) = 1. phi is a symmetric Laurent
    polynomial {n: coefficient}."""
    phi = {int(k): v for k, v in phi.items() if v != 0}
    for k, v in phi.items():
        if phi.get(-k, None) != v:
            raise ValueError("phi must be symmetric (a genuine character)")
    t = TruncatedSeries.variable(0, 1, order)
    total = TruncatedSeries(1, order)
    for j in range(1, l + 2):
        zeta = cmath.exp(1j * cmath.pi * j / (l + 2))

        def laurent(weight_power, eta):
            # sum_n n^weight_power phi_n zeta^n exp(n eta)
            out = TruncatedSeries(1, order)
            for nn, c in phi.items():
                out = out + (eta * nn).exp() * (c * nn ** weight_power
                                                * zeta ** nn)
            return out

        eta = TruncatedSeries(1, order)
        for _ in range(order + 1):
            eta = t * laurent(1, eta) * (-1.0 / (2 * l + 4))
        num = laurent(2, eta) * t + (2 * l + 4)
        zt = eta.exp() * zeta
        diff = zt - zt.inverse()
        den = -(diff * diff)
        total = total + _int_power(num * den.inverse(), genus - 1)
    return total


def affine_reflect(rs, level, mu):
    """The affine reflection acting on insertion weights:
    mu -> s_theta(mu + rho) - rho - iota(H_theta) h'."""
    theta = rs.highest_root
    h_theta = [int(x) for x in rs.coroot_of(theta)]
    shifted = [int(m) + r for m, r in zip(mu, rs.rho)]
    pairing = sum(a * b for a, b in zip(shifted, h_theta))
    refl = [shifted[i] - pairing * theta[i] for i in range(rs.rank)]
    trans = exact.mat_vec([list(r) for r in level.h_prime], h_theta)
    return tuple(refl[i] - rs.rho[i] - int(trans[i]) for i in range(rs.rank))


def coroot_translate(rs, level, mu, gamma):
    """mu -> mu + iota(gamma) h' for an integer coweight gamma."""
    trans = exact.mat_vec([list(r) for r in level.h_prime], list(gamma))
    return tuple(int(m) + int(x) for m, x in zip(mu, trans))


def fourier_index(rs, level, genus, mu):
    """I(mu): the classical (t=0) index with the holomorphically induced
    insertion of weight mu. Anti-symmetric under affine_reflect and
    invariant under coroot_translate."""
    U = characters.holo_induce(rs, mu)
    spec = DeformationSpec((), 0)
    return index_even(rs, level, genus, spec, U).constant_term


def affine_multiplier(rs, level, spec, dp, gamma):
    """Value of exp[iota(gamma) h' + sum_i t_i dTr_{V_i}(.)(gamma)] at the
    deformed point: the cocycle by which coroot translation acts on the
    deformed Fourier coefficients. Exposed for inspection, not asserted."""
    n, N, rank = spec.nvars, spec.order, rs.rank
    weight = exact.mat_vec([list(r) for r in level.h_prime], list(gamma))
    phase = sum(float(w) * float(m) for w, m in zip(weight, dp.base.point.mu))
    const = cmath.exp(2j * cmath.pi * phase)
    expo = TruncatedSeries(n, N)
    for w, x in zip(weight, dp.xi):
        expo = expo + x * float(w)
    tvars = [TruncatedSeries.variable(i, n, N) for i in range(n)]
    for t, (_, V) in zip(tvars, spec.terms):
        grad = deform.trace_gradient_series(V, dp.base.point, dp.xi, n, N, rank)
        direc = TruncatedSeries(n, N)
        for g, w in zip(gamma, grad):
            direc = direc + w * float(g)
        expo = expo + t * direc
    return expo.exp() * const
