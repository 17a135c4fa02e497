"""Root systems, Weyl groups and torus points.

Coordinate conventions, used everywhere downstream:

* weights are integer (or rational) vectors in the fundamental-weight basis;
* coweights are vectors in the simple-coroot basis;
* the natural pairing weight(coweight) is then the plain dot product.

Supported types: A1..A4, C2, G2, torus of any rank, and a product of one
simple factor with a torus.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import fsum
import cmath

from . import exact

# Cartan matrices M with M[i][j] = alpha_j(H_i), and the invariant form on
# the coroot basis normalized so long roots have squared length 2.
_CARTAN = {
    ("A", 1): [[2]],
    ("A", 2): [[2, -1], [-1, 2]],
    ("A", 3): [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    ("A", 4): [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
    # C2: alpha_1 short, alpha_2 long
    ("C", 2): [[2, -2], [-1, 2]],
    # G2: alpha_1 long, alpha_2 short
    ("G", 2): [[2, -1], [-3, 2]],
}

_BASIC_FORM = {
    ("A", 1): [[2]],
    ("A", 2): [[2, -1], [-1, 2]],
    ("A", 3): [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    ("A", 4): [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
    ("C", 2): [[4, -2], [-2, 2]],
    ("G", 2): [[2, -3], [-3, 6]],
}


@dataclass(frozen=True)
class RootSystem:
    type_label: str
    rank: int
    simple_roots: tuple        # weight coordinates
    cartan_matrix: tuple
    positive_roots: tuple      # weight coordinates
    rho: tuple                 # weight coordinates
    highest_root: tuple
    coroots: tuple             # coroot of each positive root, coweight coords
    basic_form: tuple          # Gram matrix of the simple coroots
    dual_coxeter: int
    weyl: tuple = field(repr=False)          # weight-coordinate matrices
    weyl_signs: tuple = field(repr=False)
    weyl_coweight: tuple = field(repr=False)  # matching coweight action

    @property
    def num_positive_roots(self):
        return len(self.positive_roots)

    @property
    def all_roots(self):
        return self.positive_roots + tuple(
            tuple(-x for x in a) for a in self.positive_roots)

    def coroot_of(self, root):
        """Coweight coordinates of the coroot of any root (weight coords)."""
        binv = exact.inv([list(r) for r in self.basic_form]) if self.rank else []
        v = exact.mat_vec(binv, list(root))
        norm = sum(a * b for a, b in zip(root, v))
        return tuple(Fraction(2 * x, 1) / norm for x in v)


@dataclass(frozen=True)
class TorusPoint:
    """A point f = exp(2 pi i mu) of the maximal torus, with an optional
    complex correction xi so that the actual point is f * exp(xi)."""
    mu: tuple                       # Fractions, coweight coordinates
    correction: tuple = None        # complex vector or None

    def is_regular(self, rs):
        if self.correction is not None and any(abs(c) > 1e-12 for c in self.correction):
            # exactness only applies to the rational part
            return all(abs(1 - root_value(rs, a, self)) > 1e-12
                       for a in rs.all_roots)
        return all((sum(Fraction(x) * m for x, m in zip(a, self.mu))).denominator != 1
                   for a in rs.positive_roots)

    def power(self, n):
        corr = None if self.correction is None else tuple(n * c for c in self.correction)
        return TorusPoint(tuple(n * m for m in self.mu), corr)


def _weyl_closure(generators):
    seen = {}
    frontier = [tuple(map(tuple, exact.identity(len(generators[0]))))]
    seen[frontier[0]] = None
    while frontier:
        nxt = []
        for w in frontier:
            for g in generators:
                prod = tuple(map(tuple, exact.mat_mul([list(r) for r in w],
                                                      [list(r) for r in g])))
                if prod not in seen:
                    seen[prod] = None
                    nxt.append(prod)
        frontier = nxt
    return list(seen)


def build_root_system(type_label, rank):
    """Construct the full combinatorial package for one simple type or a
    torus. For a torus pass type_label 'T'."""
    if type_label == "T":
        if rank < 0:
            raise ValueError("torus rank must be nonnegative")
        eye = tuple(map(tuple, exact.identity(rank)))
        return RootSystem(
            type_label="T", rank=rank, simple_roots=(), cartan_matrix=(),
            positive_roots=(), rho=tuple([0] * rank), highest_root=None,
            coroots=(), basic_form=tuple(tuple(0 for _ in range(rank))
                                         for _ in range(rank)),
            dual_coxeter=0, weyl=(eye,), weyl_signs=(1,), weyl_coweight=(eye,))
    key = (type_label, rank)
    if key not in _CARTAN:
        raise ValueError(f"unsupported type {type_label}{rank}; "
                         "supported: A1..A4, C2, G2, T<n>")
    cartan = _CARTAN[key]
    n = rank
    # simple root alpha_j has weight coordinates (cartan[0][j], ..., cartan[n-1][j])
    simple = [tuple(cartan[i][j] for i in range(n)) for j in range(n)]
    # simple reflection s_i: lambda -> lambda - lambda_i * alpha_i
    gens = []
    for i in range(n):
        m = exact.identity(n)
        for k in range(n):
            m[k][i] -= simple[i][k]
        gens.append([tuple(r) for r in m])
    weyl = _weyl_closure([list(map(list, g)) for g in gens])
    weyl = [tuple(map(tuple, w)) for w in weyl]
    signs = tuple(exact.det([list(r) for r in w]) for w in weyl)
    coweight = tuple(tuple(map(tuple, exact.transpose(
        exact.inv([list(r) for r in w])))) for w in weyl)
    coweight = tuple(tuple(tuple(int(x) for x in row) for row in w)
                     for w in coweight)

    # roots: Weyl orbit of the simple roots
    roots = set()
    for w in weyl:
        for a in simple:
            roots.add(tuple(exact.mat_vec([list(r) for r in w], list(a))))
    cartan_inv = exact.inv(cartan)
    positive = []
    for a in roots:
        coeffs = exact.mat_vec(cartan_inv, list(a))
        if all(c >= 0 for c in coeffs):
            positive.append((sum(coeffs), a))
    positive.sort()
    heights = [h for h, _ in positive]
    positive = [a for _, a in positive]
    rho = tuple(1 for _ in range(n))
    highest = positive[-1]
    basic = _BASIC_FORM[key]

    rs = RootSystem(
        type_label=type_label, rank=rank,
        simple_roots=tuple(simple), cartan_matrix=tuple(map(tuple, cartan)),
        positive_roots=tuple(positive), rho=rho, highest_root=highest,
        coroots=(), basic_form=tuple(map(tuple, basic)),
        dual_coxeter=0, weyl=tuple(weyl), weyl_signs=signs,
        weyl_coweight=coweight)
    coroots = tuple(rs.coroot_of(a) for a in positive)
    h_theta = rs.coroot_of(highest)
    hvee = int(sum(Fraction(x) for x in h_theta)) + 1
    object.__setattr__(rs, "coroots", coroots)
    object.__setattr__(rs, "dual_coxeter", hvee)
    del heights
    return rs


def product_with_torus(rs, torus_rank):
    """Pad a simple root system with torus directions (no new roots)."""
    n, m = rs.rank, torus_rank

    def pad(v):
        return tuple(v) + tuple([0] * m)

    def pad_mat(M):
        out = []
        for i, row in enumerate(M):
            out.append(tuple(row) + tuple([0] * m))
        for j in range(m):
            out.append(tuple([0] * n) + tuple(int(i == j) for i in range(m)))
        return tuple(out)

    weyl = tuple(pad_mat(w) for w in rs.weyl)
    return RootSystem(
        type_label=rs.type_label + f"xT{m}", rank=n + m,
        simple_roots=tuple(pad(a) for a in rs.simple_roots),
        cartan_matrix=rs.cartan_matrix,
        positive_roots=tuple(pad(a) for a in rs.positive_roots),
        rho=pad(rs.rho),
        highest_root=pad(rs.highest_root) if rs.highest_root else None,
        coroots=tuple(pad(c) for c in rs.coroots),
        basic_form=pad_mat(rs.basic_form) if n else tuple(
            tuple(0 for _ in range(m)) for _ in range(m)),
        dual_coxeter=rs.dual_coxeter,
        weyl=weyl, weyl_signs=rs.weyl_signs,
        weyl_coweight=tuple(pad_mat(w) for w in rs.weyl_coweight))


def parse_group(label):
    """'A1'..'A4', 'C2', 'G2', 'T<n>' -> RootSystem."""
    label = label.strip()
    if not label or not label[1:].isdigit():
        raise ValueError(f"bad group label {label!r}; "
                         "expected A1..A4, C2, G2 or T<rank>")
    if label.startswith("T"):
        return build_root_system("T", int(label[1:]))
    return build_root_system(label[0], int(label[1:]))


def root_value(rs, root, point):
    """e^alpha(f) for a torus point f."""
    phase = sum(Fraction(a) * m for a, m in zip(root, point.mu))
    z = 2j * cmath.pi * float(phase)
    if point.correction is not None:
        z += sum(a * c for a, c in zip(root, point.correction))
    return cmath.exp(z)


def weyl_denominator_sq(rs, point):
    """Delta(f)^2 = prod over all roots of (1 - e^alpha(f)); this is the
    volume of the conjugacy class through f, real and nonnegative on the
    compact torus."""
    vals = [1 - root_value(rs, a, point) for a in rs.all_roots]
    out = 1.0 + 0j
    for v in vals:
        out *= v
    return out


def apply_weyl_to_point(rs, w_index, point):
    m = rs.weyl_coweight[w_index]
    mu = tuple(sum(Fraction(m[i][j]) * point.mu[j] for j in range(rs.rank))
               for i in range(rs.rank))
    corr = None
    if point.correction is not None:
        corr = tuple(sum(m[i][j] * point.correction[j] for j in range(rs.rank))
                     for i in range(rs.rank))
    return TorusPoint(mu, corr)


def apply_weyl_to_weight(rs, w_index, weight):
    m = rs.weyl[w_index]
    return tuple(sum(m[i][j] * weight[j] for j in range(rs.rank))
                 for i in range(rs.rank))


def poincare_polynomial(rs, parabolic=()):
    """Length generating function W(q)/W_Phi(q) as a list of integer
    coefficients; these are the Betti numbers of the partial flag variety."""
    cinv = exact.inv([list(r) for r in rs.cartan_matrix]) if rs.rank else []

    def lengths(ws):
        out = []
        for w in ws:
            mat = [list(r) for r in w]
            neg = 0
            for a in rs.positive_roots:
                img = exact.mat_vec(mat, list(a))
                # a Weyl image of a root is a root; it is negative iff its
                # simple-root coefficients are negative
                coeffs = exact.mat_vec(cinv, img)
                if any(c < 0 for c in coeffs):
                    neg += 1
            out.append(neg)
        return out

    if rs.rank == 0 or not rs.positive_roots:
        return [1]
    full = lengths(rs.weyl)
    wq = [0] * (max(full) + 1)
    for l in full:
        wq[l] += 1
    sub = set(parabolic)
    if sub:
        gens = []
        for i in sub:
            m = exact.identity(rs.rank)
            for k in range(rs.rank):
                m[k][i] -= rs.simple_roots[i][k]
            gens.append(m)
        subgroup = _weyl_closure(gens)
        sl = lengths([tuple(map(tuple, w)) for w in subgroup])
        wphi = [0] * (max(sl) + 1)
        for l in sl:
            wphi[l] += 1
    else:
        wphi = [1]
    # exact polynomial division wq / wphi
    quot = [0] * (len(wq) - len(wphi) + 1)
    rem = list(wq)
    for k in range(len(quot) - 1, -1, -1):
        c = rem[k + len(wphi) - 1] // wphi[-1]
        quot[k] = c
        for j, p in enumerate(wphi):
            rem[k + j] -= c * p
    if any(rem):
        raise ArithmeticError("flag Poincare polynomial division not exact")
    return quot
