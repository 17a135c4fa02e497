"""Truncated multivariate power series over the complex numbers.

Coefficients are stored sparsely as {exponent tuple: complex}, truncated by
total degree. These carry the formal deformation parameters t_1..t_n through
the fixed-point solves, so everything downstream of a solve is automatically
a Taylor expansion in the deformation.
"""

import cmath

_TOL = 1e-14


class TruncatedSeries:
    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars, order, coeffs=None):
        self.nvars = nvars
        self.order = order
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                if sum(k) <= order and v != 0:
                    self.coeffs[tuple(k)] = complex(v)

    @staticmethod
    def constant(value, nvars, order):
        return TruncatedSeries(nvars, order, {tuple([0] * nvars): value})

    @staticmethod
    def variable(i, nvars, order):
        e = [0] * nvars
        e[i] = 1
        return TruncatedSeries(nvars, order, {tuple(e): 1.0})

    @property
    def constant_term(self):
        return self.coeffs.get(tuple([0] * self.nvars), 0j)

    def coefficient(self, exponents):
        return self.coeffs.get(tuple(exponents), 0j)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.nvars != self.nvars:
                raise ValueError("mixed variable counts")
            return other
        return TruncatedSeries.constant(other, self.nvars, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0j) + v
        return TruncatedSeries(self.nvars, order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.nvars, self.order,
                               {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.nvars, self.order,
                                   {k: v * other for k, v in self.coeffs.items()})
        other = self._coerce(other)
        order = min(self.order, other.order)
        out = {}
        for ka, va in self.coeffs.items():
            da = sum(ka)
            for kb, vb in other.coeffs.items():
                if da + sum(kb) > order:
                    continue
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out.get(k, 0j) + va * vb
        return TruncatedSeries(self.nvars, order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def nilpotent_part(self):
        out = dict(self.coeffs)
        out.pop(tuple([0] * self.nvars), None)
        return TruncatedSeries(self.nvars, self.order, out)

    def _powers_of_nilpotent(self):
        """Yield n, x^n for the constant-free part x, while nonzero."""
        x = self.nilpotent_part()
        p = TruncatedSeries.constant(1.0, self.nvars, self.order)
        n = 0
        while p.coeffs:
            yield n, p
            n += 1
            if n > self.order:
                break
            p = p * x

    def inverse(self):
        c = self.constant_term
        if abs(c) < _TOL:
            raise ZeroDivisionError("series has no constant term")
        # 1/(c + x) = (1/c) sum (-x/c)^n
        out = TruncatedSeries(self.nvars, self.order)
        sign = 1.0
        for n, p in self._powers_of_nilpotent():
            out = out + p * (sign / c ** (n + 1))
            sign = -sign
        return out

    def exp(self):
        c = self.constant_term
        out = TruncatedSeries(self.nvars, self.order)
        fact = 1.0
        for n, p in self._powers_of_nilpotent():
            if n:
                fact *= n
            out = out + p * (1.0 / fact)
        return out * cmath.exp(c)

    def log(self):
        """Principal branch on the constant term."""
        c = self.constant_term
        if abs(c) < _TOL:
            raise ValueError("log of a series with zero constant term")
        out = TruncatedSeries.constant(cmath.log(c), self.nvars, self.order)
        sign = 1.0
        for n, p in self._powers_of_nilpotent():
            if n == 0:
                continue
            out = out + p * (sign / (n * c ** n))
            sign = -sign
        return out

    def __pow__(self, e):
        if isinstance(e, int) and e >= 0:
            out = TruncatedSeries.constant(1.0, self.nvars, self.order)
            base = self
            k = e
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        return (self.log() * e).exp()

    def truncate(self, order):
        return TruncatedSeries(self.nvars, min(order, self.order), self.coeffs)

    def eval(self, values):
        """Substitute numbers for the variables (no truncation error control
        beyond the stored order)."""
        total = 0j
        for k, v in self.coeffs.items():
            term = v
            for e, x in zip(k, values):
                term *= x ** e
            total += term
        return total

    def map_coeffs(self, fn):
        return TruncatedSeries(self.nvars, self.order,
                               {k: fn(v) for k, v in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "<series 0>"
        terms = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        bits = []
        for k, v in terms[:6]:
            mono = "*".join(f"t{i}^{e}" for i, e in enumerate(k) if e)
            bits.append(f"({v:.6g}){'*' + mono if mono else ''}")
        more = "..." if len(terms) > 6 else ""
        return f"<series {' + '.join(bits)}{more}>"


def zero(nvars, order):
    return TruncatedSeries(nvars, order)


def lift(value, nvars, order):
    if isinstance(value, TruncatedSeries):
        return value
    return TruncatedSeries.constant(value, nvars, order)


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_scale(u, s):
    return [a * s for a in u]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def mat_mul(A, B):
    p = len(B[0])
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(p)]
            for i in range(len(A))]


def mat_det(A):
    """Cofactor expansion; fine for the small ranks used here."""
    n = len(A)
    if n == 0:
        return 1.0
    if n == 1:
        return A[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        term = A[0][j] * mat_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def mat_inverse(A, nvars, order):
    """Invert a matrix of series whose constant part is invertible:
    A = A0 (I + A0^{-1} N), Neumann series in the nilpotent part N."""
    import numpy as np
    n = len(A)
    A = [[lift(x, nvars, order) for x in row] for row in A]
    A0 = np.array([[A[i][j].constant_term for j in range(n)] for i in range(n)],
                  dtype=complex)
    A0inv = np.linalg.inv(A0)
    N = [[A[i][j].nilpotent_part() for j in range(n)] for i in range(n)]
    B = [[lift(A0inv[i][j], nvars, order) for j in range(n)] for i in range(n)]
    M = mat_mul(B, N)  # strictly positive order
    out = [[lift(1.0 if i == j else 0.0, nvars, order) for j in range(n)]
           for i in range(n)]
    term = out
    for _ in range(order):
        term = mat_mul(M, term)
        term = [[-x for x in row] for row in term]
        if all(not x.coeffs for row in term for x in row):
            break
        out = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(out, term)]
    return mat_mul(out, B)
