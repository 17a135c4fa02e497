"""Levels and the finite point sets they cut out of the torus.

A level is a symmetric integer bilinear form h on the coweight lattice,
written as a matrix in simple-coroot coordinates; iota(mu) h is then a
character-lattice vector in fundamental-weight coordinates. The shifted
form h' = h + c defines a finite subgroup of the torus whose regular
Weyl orbits index the classical fixed-point sum.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

from . import exact, roots
from .roots import TorusPoint


def c_form(rs):
    """Matrix of xi -> sum over positive roots of alpha(xi)^2."""
    n = rs.rank
    out = [[0] * n for _ in range(n)]
    for a in rs.positive_roots:
        for i in range(n):
            if a[i] == 0:
                continue
            for j in range(n):
                out[i][j] += a[i] * a[j]
    return [list(map(int, row)) for row in out]


@dataclass(frozen=True)
class Level:
    h: tuple        # symmetric integer matrix, coroot coordinates
    h_prime: tuple
    F_order: int

    @staticmethod
    def from_matrix(rs, h):
        h = [list(map(int, row)) for row in h]
        n = rs.rank
        if len(h) != n or any(len(r) != n for r in h):
            raise ValueError("level matrix has wrong shape")
        for i in range(n):
            for j in range(n):
                if h[i][j] != h[j][i]:
                    raise ValueError("level matrix must be symmetric")
        c = c_form(rs)
        hp = [[h[i][j] + c[i][j] for j in range(n)] for i in range(n)]
        d = exact.det(hp)
        return Level(tuple(map(tuple, h)), tuple(map(tuple, hp)), abs(int(d)))

    def admissible(self):
        if not self.h_prime:
            return True
        return exact.is_positive_definite([list(r) for r in self.h_prime])


def canonical_level(rs, k):
    """k times the basic form on the simple factor."""
    if not rs.positive_roots:
        raise ValueError("canonical level needs a simple factor")
    h = [[k * x for x in row] for row in rs.basic_form]
    return Level.from_matrix(rs, h)


@dataclass(frozen=True)
class VerlindePoint:
    point: TorusPoint
    theta0: float
    orbit_size: int
    is_regular: bool


def _coset_offsets(hp):
    """Rational vectors x with h' x running over the cosets of Z^n in
    (h')^{-1} Z^n, via Smith normal form."""
    n = len(hp)
    if n == 0:
        return [[]]
    U, D, V = exact.smith_normal_form([list(r) for r in hp])
    diag = [D[i][i] for i in range(n)]
    offsets = []
    idx = [0] * n
    while True:
        frac = [Fraction(idx[i], diag[i]) for i in range(n)]
        offsets.append(exact.mat_vec(V, frac))
        for i in range(n):
            idx[i] += 1
            if idx[i] < diag[i]:
                break
            idx[i] = 0
        else:
            break
    return offsets


def _reduce_mod1(v):
    return tuple(Fraction(x) - math.floor(Fraction(x)) for x in v)


def _enumerate(rs, level, target):
    """Exact solutions mu (mod Z^n) of iota(mu) h' == target (mod Z^n)."""
    if not level.admissible():
        raise ValueError("level is not admissible")
    n = rs.rank
    hp = [list(r) for r in level.h_prime]
    hp_inv = exact.inv(hp) if n else []
    base = exact.mat_vec(hp_inv, [Fraction(x) for x in target])
    seen = {}
    for off in _coset_offsets(hp):
        mu = _reduce_mod1([b + o for b, o in zip(base, off)])
        seen[mu] = None
    points = sorted(seen)
    if len(points) != level.F_order:
        raise ArithmeticError(
            f"point count {len(points)} != |det h'| = {level.F_order}")

    # group into Weyl orbits, representative = lexicographically least mu;
    # points are sorted, so the first unassigned point of an orbit is its rep
    orbits = {}
    assigned = set()
    for mu in points:
        if mu in assigned:
            continue
        orbit = {_reduce_mod1(exact.mat_vec([list(r) for r in w], list(mu)))
                 for w in rs.weyl_coweight}
        orbits[min(orbit)] = orbit
        assigned.update(orbit)

    out = []
    for rep in sorted(orbits):
        pt = TorusPoint(rep)
        reg = pt.is_regular(rs)
        d2 = roots.weyl_denominator_sq(rs, pt)
        if abs(d2.imag) > 1e-9 or d2.real < -1e-9:
            raise ArithmeticError(f"Delta^2 not nonnegative real at {rep}")
        theta0 = d2.real / level.F_order
        out.append(VerlindePoint(pt, theta0, len(orbits[rep]), reg))
    return out


def enumerate_F_rho(rs, level):
    return _enumerate(rs, level, rs.rho)


def enumerate_F(rs, level):
    return _enumerate(rs, level, tuple([0] * rs.rank))


def regular_reps(rs, level):
    return [vp for vp in enumerate_F_rho(rs, level) if vp.is_regular]


def verlinde_number(rs, level, genus):
    """Sum over regular Weyl orbits of theta(f)^{1-g}."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    return math.fsum(vp.theta0 ** (1 - genus) for vp in regular_reps(rs, level))


def verlinde_number_a1(k, genus):
    """Closed form for the rank-one series, fast at large k; used for the
    large-level asymptotics where full enumeration is wasteful."""
    return math.fsum(
        ((2 * k + 4) / (4 * math.sin(math.pi * j / (k + 2)) ** 2)) ** (genus - 1)
        for j in range(1, k + 2))


def _dual_weight(rs, lam):
    """Highest weight of the dual representation: dominant rep of -lam."""
    best = None
    for w in rs.weyl:
        img = tuple(sum(w[i][j] * (-lam[j]) for j in range(rs.rank))
                    for i in range(rs.rank))
        if all(x >= 0 for x in img):
            best = img
            break
    if best is None:
        raise ArithmeticError("no dominant representative found")
    return best


def _fusion_fold(rs, kappa, virtual):
    """Fold a virtual character's dominant decomposition into the level
    kappa - h_vee alcove by the affine Weyl group."""
    h_theta = [int(x) for x in rs.coroot_of(rs.highest_root)]
    theta = rs.highest_root
    out = {}
    for lam, m in virtual.items():
        nu = [x + 1 for x in lam]  # lam + rho
        sign = 1
        while True:
            if any(x == 0 for x in nu):
                sign = 0
                break
            moved = False
            for i in range(rs.rank):
                if nu[i] < 0:
                    c = nu[i]
                    nu = [nu[j] - c * rs.simple_roots[i][j] for j in range(rs.rank)]
                    sign = -sign
                    moved = True
                    break
            if moved:
                continue
            lvl = sum(a * b for a, b in zip(nu, h_theta))
            if lvl == kappa:
                sign = 0
                break
            if lvl > kappa:
                nu = [nu[j] - (lvl - kappa) * theta[j] for j in range(rs.rank)]
                sign = -sign
                continue
            break
        if sign == 0:
            continue
        lam2 = tuple(x - 1 for x in nu)
        out[lam2] = out.get(lam2, 0) + sign * m
    return {k: v for k, v in out.items() if v != 0}


def _fusion_coefficients(rs, k, a, b):
    """Kac-Walton fusion a x b at level k: Klimyk tensor decomposition
    followed by affine folding at kappa = k + h_vee."""
    from .characters import irred_character
    wa = irred_character(rs, a).as_dict()
    # Klimyk: a (x) b = sum over weights mu of a, signed dominant rep of
    # b + mu + rho, accumulated as highest-weight multiplicities
    tensor = {}
    for mu, m in wa.items():
        nu = [b[i] + mu[i] + 1 for i in range(rs.rank)]
        sign = 1
        while True:
            if any(x == 0 for x in nu):
                sign = 0
                break
            for i in range(rs.rank):
                if nu[i] < 0:
                    c = nu[i]
                    nu = [nu[j] - c * rs.simple_roots[i][j] for j in range(rs.rank)]
                    sign = -sign
                    break
            else:
                break
        if sign == 0:
            continue
        lam = tuple(x - 1 for x in nu)
        tensor[lam] = tensor.get(lam, 0) + sign * m
    tensor = {k2: v for k2, v in tensor.items() if v != 0}
    return _fusion_fold(rs, k + rs.dual_coxeter, tensor)


def _level_weights(rs, k):
    h_theta = [int(x) for x in rs.coroot_of(rs.highest_root)]
    out = []
    stack = [()]
    while stack:
        prefix = stack.pop()
        if len(prefix) == rs.rank:
            if sum(a * b for a, b in zip(prefix, h_theta)) <= k:
                out.append(tuple(prefix))
            continue
        for x in range(k + 1):
            cand = prefix + (x,)
            if sum(a * b for a, b in zip(cand, h_theta[:len(cand)])) <= k:
                stack.append(cand)
    return sorted(out)


def fusion_gluing_oracle(rs, k, genus=2):
    """Genus-two partition count from the theta-graph pants decomposition:
    sum over edge labels a,b,c of N(a,b,c) * N(a*,b*,c*), with N the
    three-point fusion multiplicity. Independent of the fixed-point sum."""
    if genus != 2:
        raise ValueError("oracle implemented for genus 2 only")
    if rs.type_label not in ("A",) or rs.rank > 2:
        raise ValueError("oracle supports A1 and A2 only")
    if k < 0 or k > 6:
        raise ValueError("oracle supports small nonnegative levels only")
    labels = _level_weights(rs, k)

    def n3(a, b, c):
        # dim Inv(a (x) b (x) c) = multiplicity of c* in the fusion a x b
        fus = _fusion_coefficients(rs, k, a, b)
        return fus.get(_dual_weight(rs, c), 0)

    total = 0
    for a in labels:
        for b in labels:
            fus_ab = _fusion_coefficients(rs, k, a, b)
            for c in labels:
                m1 = fus_ab.get(_dual_weight(rs, c), 0)
                if m1 == 0:
                    continue
                m2 = n3(_dual_weight(rs, a), _dual_weight(rs, b),
                        _dual_weight(rs, c))
                total += m1 * m2
    return total
