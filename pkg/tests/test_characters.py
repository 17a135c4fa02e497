import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bundleindex import characters, roots
from bundleindex.roots import TorusPoint

from .oracles import fd_gradient, fd_hessian

DIMS = [
    ("A1", (1,), 2), ("A1", (2,), 3), ("A1", (3,), 4),
    ("A2", (1, 0), 3), ("A2", (1, 1), 8), ("A2", (2, 1), 15),
    ("C2", (1, 0), 4), ("C2", (0, 1), 5), ("C2", (1, 1), 16),
    ("G2", (0, 1), 7), ("G2", (1, 0), 14),
    ("A3", (1, 0, 0), 4), ("A3", (0, 1, 0), 6),
]


@pytest.mark.parametrize("label,lam,dim", DIMS)
def test_irreducible_dimensions(label, lam, dim):
    rs = roots.parse_group(label)
    assert characters.irred_character(rs, lam).dimension == dim


def test_irreducible_examples():
    a1 = roots.parse_group("A1")
    assert characters.irred_character(a1, (1,)).as_dict() == {(1,): 1, (-1,): 1}
    assert characters.irred_character(a1, (2,)).as_dict() == \
        {(2,): 1, (0,): 1, (-2,): 1}
    a2 = roots.parse_group("A2")
    std = characters.irred_character(a2, (1, 0))
    assert all(m == 1 for _, m in std.weights) and len(std.weights) == 3


@pytest.mark.parametrize("label,lam", [("A2", (2, 1)), ("C2", (1, 1)),
                                       ("G2", (1, 0))])
def test_weight_multiplicities_weyl_invariant(label, lam):
    rs = roots.parse_group(label)
    ch = characters.irred_character(rs, lam).as_dict()
    for mu, m in ch.items():
        for w in range(len(rs.weyl)):
            assert ch.get(roots.apply_weyl_to_weight(rs, w, mu)) == m


def test_irred_rejects_nondominant():
    rs = roots.parse_group("A2")
    with pytest.raises(ValueError):
        characters.irred_character(rs, (-1, 2))


@pytest.mark.parametrize("label,lam", [("A1", (3,)), ("A2", (1, 1)),
                                       ("C2", (0, 1))])
def test_trace_weyl_invariance(label, lam):
    rs = roots.parse_group(label)
    ch = characters.irred_character(rs, lam)
    rng = random.Random(11)
    for _ in range(4):
        f = TorusPoint(tuple(Fraction(rng.randrange(1, 60), 60)
                             for _ in range(rs.rank)))
        v = characters.trace_eval(ch, f)
        for w in range(len(rs.weyl)):
            wf = roots.apply_weyl_to_point(rs, w, f)
            assert abs(characters.trace_eval(ch, wf) - v) < 1e-9 * (1 + abs(v))


def test_trace_eval_examples():
    a1 = roots.parse_group("A1")
    std = characters.irred_character(a1, (1,))
    assert characters.trace_eval(characters.trivial_character(1),
                                 TorusPoint((Fraction(1, 3),))) == 1
    ident = TorusPoint((Fraction(0),))
    assert abs(characters.trace_eval(std, ident) - 2) < 1e-12
    # zeta = i: i + 1/i = 0
    assert abs(characters.trace_eval(std, TorusPoint((Fraction(1, 4),)))) < 1e-12


@pytest.mark.parametrize("label,lam", [("A1", (2,)), ("A2", (1, 1)),
                                       ("C2", (1, 0)), ("G2", (0, 1))])
def test_gradient_hessian_match_finite_differences(label, lam):
    # differentiate along the complex correction directions of the point
    rs = roots.parse_group(label)
    ch = characters.irred_character(rs, lam)
    rng = random.Random(23)
    mu = tuple(Fraction(rng.randrange(1, 30), 30) for _ in range(rs.rank))

    def value(corr):
        return characters.trace_eval(ch, TorusPoint(mu, tuple(corr)))

    base = TorusPoint(mu, tuple([0.0] * rs.rank))
    grad = characters.trace_gradient(ch, base, rs.rank)
    fd = fd_gradient(value, [0.0] * rs.rank)
    scale = max(1.0, max(abs(x) for x in grad))
    for a, b in zip(grad, fd):
        assert abs(a - b) < 1e-6 * scale

    hess = characters.trace_hessian(ch, base, rs.rank)
    fdh = fd_hessian(value, [0.0] * rs.rank)
    hscale = max(1.0, max(abs(x) for row in hess for x in row))
    for i in range(rs.rank):
        for j in range(rs.rank):
            assert abs(hess[i][j] - fdh[i][j]) < 1e-5 * hscale


def test_gradient_hessian_examples():
    a1 = roots.parse_group("A1")
    std = characters.irred_character(a1, (1,))
    ident = TorusPoint((Fraction(0),))
    assert characters.trace_gradient(characters.trivial_character(1), ident) == [0j]
    assert abs(characters.trace_gradient(std, ident)[0]) < 1e-12
    assert abs(characters.trace_hessian(std, ident)[0][0] - 2) < 1e-12
    # adjoint Hessian at zeta: (zeta^2 + zeta^-2) alpha (x) alpha, alpha = 2omega
    adj = characters.adjoint_character(a1)
    f = TorusPoint((Fraction(1, 5),))
    z = roots.root_value(a1, (2,), f)
    assert abs(characters.trace_hessian(adj, f)[0][0] - (z + 1 / z) * 4) < 1e-12


def test_holo_induce():
    a1 = roots.parse_group("A1")
    assert characters.holo_induce(a1, (2,)) == characters.irred_character(a1, (2,))
    assert characters.holo_induce(a1, (-1,)).weights == ()
    assert characters.holo_induce(a1, (-2,)) == -characters.trivial_character(1)


@pytest.mark.parametrize("label", ["A1", "A2", "C2"])
def test_holo_induce_weyl_relation(label):
    # holo_induce(w(mu+rho)-rho) = sign(w) holo_induce(mu)
    rs = roots.parse_group(label)
    rng = random.Random(5)
    for _ in range(6):
        mu = tuple(rng.randrange(-3, 4) for _ in range(rs.rank))
        base = characters.holo_induce(rs, mu)
        shifted = tuple(m + 1 for m in mu)
        for w in range(len(rs.weyl)):
            img = roots.apply_weyl_to_weight(rs, w, shifted)
            nu = tuple(x - 1 for x in img)
            expect = base if rs.weyl_signs[w] == 1 else -base
            assert characters.holo_induce(rs, nu) == expect


def test_adams():
    a1 = roots.parse_group("A1")
    std = characters.irred_character(a1, (1,))
    assert characters.adams(std, 1) == std
    assert characters.adams(std, 2).as_dict() == {(2,): 1, (-2,): 1}
    a2 = roots.parse_group("A2")
    rng = random.Random(3)
    for lam in [(1, 1), (2, 0)]:
        ch = characters.irred_character(a2, lam)
        for n in (2, 3):
            psi = characters.adams(ch, n)
            assert psi.dimension == ch.dimension
            for _ in range(3):
                f = TorusPoint(tuple(Fraction(rng.randrange(1, 30), 30)
                                     for _ in range(2)),
                               (0.01 + 0.02j, -0.005j))
                lhs = characters.trace_eval(psi, f)
                rhs = characters.trace_eval(ch, f.power(n))
                assert abs(lhs - rhs) < 1e-9 * (1 + abs(rhs))
    with pytest.raises(ValueError):
        characters.adams(std, 0)


@settings(max_examples=25, derandomize=True, deadline=None)
@given(st.tuples(st.integers(0, 3), st.integers(0, 3)),
       st.tuples(st.integers(1, 29), st.integers(1, 29)),
       st.integers(2, 4))
def test_adams_trace_identity_hypothesis(lam, num, n):
    rs = roots.parse_group("A2")
    ch = characters.irred_character(rs, lam)
    f = TorusPoint((Fraction(num[0], 30), Fraction(num[1], 30)))
    lhs = characters.trace_eval(characters.adams(ch, n), f)
    rhs = characters.trace_eval(ch, f.power(n))
    assert abs(lhs - rhs) < 1e-9 * (1 + abs(rhs))


def test_lambda_t_adjoint():
    a1 = roots.parse_group("A1")
    f = TorusPoint((Fraction(1, 4),))
    # e^{+-alpha}(f) = -1 at zeta = i: (1+t)(1-t)^2
    for t in (0.0, 0.3, -0.2):
        val = characters.lambda_t_adjoint_eval(a1, f, t)
        assert abs(val - (1 + t) * (1 - t) ** 2) < 1e-12
    ident = TorusPoint((Fraction(0),))
    assert abs(characters.lambda_t_adjoint_eval(a1, ident, 0.5) - 1.5 ** 3) < 1e-12
    assert abs(characters.lambda_t_adjoint_eval(a1, f, 0.0) - 1.0) < 1e-12
