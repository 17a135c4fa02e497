"""Virtual characters: weight multisets, their traces, differentials,
Hessians and Adams operations.

A Character is a finitely supported map weight -> integer multiplicity.
Negative multiplicities are allowed (holomorphic induction and power
operations produce them).
"""

from dataclasses import dataclass
from fractions import Fraction
import cmath

from . import exact, roots


@dataclass(frozen=True)
class Character:
    weights: tuple  # sorted tuple of (weight tuple, multiplicity)

    @staticmethod
    def from_dict(d):
        items = tuple(sorted((tuple(k), int(v)) for k, v in d.items() if v != 0))
        return Character(items)

    def as_dict(self):
        return dict(self.weights)

    @property
    def dimension(self):
        return sum(m for _, m in self.weights)

    def __add__(self, other):
        d = self.as_dict()
        for k, v in other.weights:
            d[k] = d.get(k, 0) + v
        return Character.from_dict(d)

    def __neg__(self):
        return Character(tuple((k, -v) for k, v in self.weights))

    def scale(self, n):
        return Character(tuple((k, n * v) for k, v in self.weights))


def trivial_character(rank):
    return Character.from_dict({tuple([0] * rank): 1})


def _weight_norm_sq(binv, lam):
    v = exact.mat_vec(binv, [Fraction(x) for x in lam])
    return sum(a * b for a, b in zip(lam, v))


def _weight_dot(binv, lam, mu):
    v = exact.mat_vec(binv, [Fraction(x) for x in mu])
    return sum(Fraction(a) * b for a, b in zip(lam, v))


def irred_character(rs, lam):
    """Weight multiset of the irreducible highest-weight representation,
    by the Freudenthal multiplicity recursion.

    lam is given in fundamental-weight coordinates and must be dominant.
    """
    lam = tuple(int(x) for x in lam)
    if any(x < 0 for x in lam):
        raise ValueError(f"highest weight {lam} is not dominant")
    if rs.rank == 0:
        return Character.from_dict({(): 1})
    if not rs.positive_roots:  # torus: one-dimensional
        return Character.from_dict({lam: 1})

    binv = exact.inv([list(r) for r in rs.basic_form])
    rho = rs.rho
    lam_rho_sq = _weight_norm_sq(binv, [a + b for a, b in zip(lam, rho)])
    lam_sq = _weight_norm_sq(binv, lam)

    # collect candidate weights: lam minus nonnegative sums of simple roots,
    # pruned by |mu| <= |lam|
    candidates = {lam}
    frontier = [lam]
    while frontier:
        nxt = []
        for mu in frontier:
            for a in rs.simple_roots:
                nu = tuple(x - y for x, y in zip(mu, a))
                if nu in candidates:
                    continue
                if _weight_norm_sq(binv, nu) <= lam_sq:
                    candidates.add(nu)
                    nxt.append(nu)
        frontier = nxt

    dominant = sorted(
        (mu for mu in candidates if all(x >= 0 for x in mu)),
        key=lambda mu: -sum(mu))
    # order dominant weights by descending height of lam - mu ... we need
    # multiplicities of higher weights first
    def height(mu):
        cinv = exact.inv([list(r) for r in rs.cartan_matrix])
        return sum(exact.mat_vec(cinv, [a - b for a, b in zip(lam, mu)]))

    dominant.sort(key=height)

    mult = {}
    orbit_cache = {}

    def orbit(mu):
        if mu not in orbit_cache:
            orbit_cache[mu] = {roots.apply_weyl_to_weight(rs, i, mu)
                               for i in range(len(rs.weyl))}
        return orbit_cache[mu]

    def mult_of(mu):
        # multiplicity of an arbitrary weight: reflect to dominant
        mu_dom = _dominant_rep(rs, mu)
        return mult.get(mu_dom, 0)

    for mu in dominant:
        if mu == lam:
            mult[mu] = 1
            continue
        denom = lam_rho_sq - _weight_norm_sq(binv, [a + b for a, b in zip(mu, rho)])
        if denom == 0:
            mult[mu] = 0
            continue
        total = Fraction(0)
        for a in rs.positive_roots:
            k = 1
            while True:
                nu = tuple(x + k * y for x, y in zip(mu, a))
                if nu not in candidates:
                    break
                m = mult_of(nu)
                if m:
                    total += m * _weight_dot(binv, nu, a)
                k += 1
        val = 2 * total / denom
        if val.denominator != 1:
            raise ArithmeticError("Freudenthal recursion produced a fraction")
        mult[mu] = int(val)

    out = {}
    for mu, m in mult.items():
        if m == 0:
            continue
        for nu in orbit(mu):
            out[nu] = m
    return Character.from_dict(out)


def _dominant_rep(rs, mu):
    mu = tuple(mu)
    while True:
        for i in range(rs.rank):
            if mu[i] < 0:
                mu = tuple(mu[k] - mu[i] * rs.simple_roots[i][k]
                           for k in range(rs.rank))
                break
        else:
            return mu


def holo_induce(rs, mu):
    """Borel-Weil-Bott: the virtual character induced from an arbitrary
    integral weight. Returns the zero character when mu+rho is singular."""
    nu = tuple(int(a) + 1 for a in mu)  # mu + rho in fundamental coords
    sign = 1
    # make nu dominant by simple reflections, tracking the sign
    while True:
        if any(x == 0 for x in nu):
            return Character(())
        for i in range(rs.rank):
            if nu[i] < 0:
                nu = tuple(nu[k] - nu[i] * rs.simple_roots[i][k]
                           for k in range(rs.rank))
                sign = -sign
                break
        else:
            break
    shifted = tuple(x - 1 for x in nu)
    ch = irred_character(rs, shifted)
    return ch if sign == 1 else -ch


def trace_eval(ch, point):
    """Sum of m_lambda * e^lambda(f)."""
    total = 0j
    for lam, m in ch.weights:
        total += m * _exp_weight(lam, point)
    return total


def _exp_weight(lam, point):
    z = 2j * cmath.pi * float(sum(Fraction(a) * m for a, m in zip(lam, point.mu)))
    if point.correction is not None:
        z += sum(a * c for a, c in zip(lam, point.correction))
    return cmath.exp(z)


def trace_gradient(ch, point, rank=None):
    """Differential of the trace at f, as a complex covector in weight
    coordinates: sum of m_lambda e^lambda(f) lambda."""
    if rank is None:
        rank = len(ch.weights[0][0]) if ch.weights else 0
    out = [0j] * rank
    for lam, m in ch.weights:
        e = m * _exp_weight(lam, point)
        for i, a in enumerate(lam):
            out[i] += e * a
    return out


def trace_hessian(ch, point, rank=None):
    """Hessian sum of m_lambda e^lambda(f) lambda (x) lambda."""
    if rank is None:
        rank = len(ch.weights[0][0]) if ch.weights else 0
    out = [[0j] * rank for _ in range(rank)]
    for lam, m in ch.weights:
        e = m * _exp_weight(lam, point)
        for i, a in enumerate(lam):
            if a == 0:
                continue
            for j, b in enumerate(lam):
                out[i][j] += e * a * b
    return out


def adams(ch, n):
    """K-theory power operation on characters: e^lambda -> e^{n lambda}."""
    if n < 1:
        raise ValueError("adams operation needs n >= 1")
    d = {}
    for lam, m in ch.weights:
        k = tuple(n * a for a in lam)
        d[k] = d.get(k, 0) + m
    return Character.from_dict(d)


def adjoint_character(rs):
    d = {tuple([0] * rs.rank): rs.rank}
    for a in rs.all_roots:
        d[a] = d.get(a, 0) + 1
    return Character.from_dict(d)


def lambda_t_adjoint_eval(rs, point, t):
    """(1+t)^rank * product over all roots of (1 + t e^alpha(f)).

    t may be a plain number or a truncated series (anything supporting
    + and *)."""
    out = (1 + t)
    for _ in range(rs.rank - 1):
        out = out * (1 + t)
    if rs.rank == 0:
        out = 1
    for a in rs.all_roots:
        out = out * (1 + t * roots.root_value(rs, a, point))
    return out
