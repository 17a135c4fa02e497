"""Large-level asymptotics for the rank-one series.

Scaling the level by n and the insertion by the n-th power operation turns
the fixed-point sum into a Riemann sum; its limit is the zeta-like series
below, evaluated term by term with a rigorous tail bound.
"""

from dataclasses import dataclass
import cmath
import math

from . import levels
from .series import TruncatedSeries


def _phi_eval(phi, power, z_const, eta):
    """sum_n n^power phi_n z^n exp(n eta) as a series in the order of eta."""
    out = TruncatedSeries(eta.nvars, eta.order)
    for n, c in phi.items():
        out = out + (eta * n).exp() * (c * n ** power * z_const ** n)
    return out


def _check_phi(phi):
    phi = {int(k): v for k, v in phi.items() if v != 0}
    for k, v in phi.items():
        if phi.get(-k, None) != v:
            raise ValueError("phi must be symmetric under n -> -n")
    return phi


def solve_kt(l, phi, k, order):
    """The shifted label k_t solving

        k_t + t phid(exp(pi i k_t/(l+2))) / (2 pi i) = k

    as a series in t. This is the log of the rank-one deformed-point
    equation zeta_t^{2l+4} exp(t phid(zeta_t)) = 1 written for the branch
    zeta_t = exp(pi i k_t/(l+2)); k_t stays real for real t."""
    if k < 1:
        raise ValueError("k must be >= 1")
    phi = _check_phi(phi)
    t = TruncatedSeries.variable(0, 1, order)
    z = cmath.exp(1j * math.pi * k / (l + 2))
    delta = TruncatedSeries(1, order)   # k_t - k
    for _ in range(order + 1):
        eta = delta * (1j * math.pi / (l + 2))
        delta = -t * _phi_eval(phi, 1, z, eta) * (1.0 / (2j * math.pi))
    return delta + float(k)


def max_spin_order(l, phi):
    """Truncation ceiling (l+2)/j for a spin-2j deformation character."""
    phi = _check_phi(phi)
    ns = [abs(n) for n in phi if n != 0]
    if not ns:
        return None
    j = max(ns) // 2
    return (l + 2) / j if j else None


@dataclass(frozen=True)
class WittenSum:
    series: TruncatedSeries
    tail_bound: float
    K_terms: int


def witten_sum(l, phi, genus, t_order, K_terms=20000):
    """2 (l+2)^{3(g-1)} sum_k [1 + t phidd(zeta_t)/(2l+4)]^{g-1}
    (sqrt2 pi k_t)^{2-2g}, summed to K_terms with a p-series tail bound."""
    if genus < 2:
        raise ValueError("asymptotic sum needs genus >= 2")
    phi = _check_phi(phi)
    ceiling = max_spin_order(l, phi)
    if ceiling is not None and t_order >= ceiling:
        raise ValueError(
            f"t-order {t_order} exceeds the truncation ceiling "
            f"(l+2)/j = {ceiling}")
    t = TruncatedSeries.variable(0, 1, t_order)
    pref = 2.0 * (l + 2) ** (3 * (genus - 1))
    total = TruncatedSeries(1, t_order)
    for k in range(1, K_terms + 1):
        kt = solve_kt(l, phi, k, t_order)
        z = cmath.exp(1j * math.pi * k / (l + 2))
        eta = (kt - float(k)) * (1j * math.pi / (l + 2))
        bracket = 1 + t * _phi_eval(phi, 2, z, eta) * (1.0 / (2 * l + 4))
        power = bracket ** (genus - 1)
        kfac = (kt * kt * (2 * math.pi ** 2)).inverse() ** (genus - 1)
        total = total + power * kfac
    total = total * pref
    # tail: |sum_{k>K} (sqrt2 pi k)^{2-2g}| <= integral bound
    tail = pref * (2 * math.pi ** 2) ** (1 - genus) \
        * K_terms ** (3 - 2 * genus) / (2 * genus - 3)
    return WittenSum(series=total, tail_bound=abs(tail), K_terms=K_terms)


def witten_limit(l, genus):
    """Closed-form t=0 value: 2 (l+2)^{3(g-1)} (2 pi^2)^{1-g} zeta(2g-2)."""
    zeta = _zeta_even(2 * genus - 2)
    return 2.0 * (l + 2) ** (3 * (genus - 1)) * (2 * math.pi ** 2) ** (1 - genus) * zeta


def _zeta_even(s):
    if s == 2:
        return math.pi ** 2 / 6
    if s == 4:
        return math.pi ** 4 / 90
    if s == 6:
        return math.pi ** 6 / 945
    return sum(1.0 / n ** s for n in range(1, 200000))


@dataclass(frozen=True)
class AsymptoticRun:
    l: int
    genus: int
    n_values: tuple
    d: int
    target: float
    results: tuple   # (n, level, scaled value, deviation)


def asymptotic_check(l, genus, n_values):
    """Exact fixed-point value at level n(l+2)-2 scaled by n^{3(g-1)},
    against the continuum limit."""
    if genus < 2:
        raise ValueError("needs genus >= 2")
    n_values = tuple(sorted(int(n) for n in n_values))
    d = 3 * (genus - 1)
    target = witten_limit(l, genus)
    results = []
    for n in n_values:
        level = n * (l + 2) - 2
        if level < 1:
            raise ValueError("n too small for this l")
        value = levels.verlinde_number_a1(level, genus) / float(n) ** d
        results.append((n, level, value, abs(value - target)))
    return AsymptoticRun(l=l, genus=genus, n_values=n_values, d=d,
                         target=target, results=tuple(results))
