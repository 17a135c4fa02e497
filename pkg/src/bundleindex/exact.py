"""Exact integer and rational linear algebra.

Everything here works on plain lists of Python ints or Fractions, so the
lattice arithmetic (point enumeration, congruences, regularity tests) never
touches floating point.
"""

from fractions import Fraction


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum(A[i][k] * B[k][j] for k in range(m)) for j in range(p)]
            for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def det(A):
    """Determinant by fraction-free Bareiss elimination (exact for ints)."""
    n = len(A)
    if n == 0:
        return 1
    M = [[Fraction(x) for x in row] for row in A]
    sign = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            for j in range(k, n):
                M[i][j] -= f * M[k][j]
    result = Fraction(sign)
    for k in range(n):
        result *= M[k][k]
    if result.denominator == 1:
        return int(result)
    return result


def inv(A):
    """Exact inverse, entries returned as Fractions."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if M[i][k] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        M[k], M[pivot] = M[pivot], M[k]
        pk = M[k][k]
        M[k] = [x / pk for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [x - f * y for x, y in zip(M[i], M[k])]
    return [row[n:] for row in M]


def solve(A, b):
    return mat_vec(inv(A), b)


def is_positive_definite(A):
    """Exact Sylvester criterion on a symmetric rational matrix."""
    n = len(A)
    for k in range(1, n + 1):
        minor = [row[:k] for row in A[:k]]
        if det(minor) <= 0:
            return False
    return True


def smith_normal_form(A):
    """Return (U, D, V) with U*A*V = D diagonal, U and V unimodular integer
    matrices. A must be a square nonsingular integer matrix."""
    n = len(A)
    D = [list(map(int, row)) for row in A]
    U = identity(n)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i += q * row_j
        D[i] = [a + q * b for a, b in zip(D[i], D[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]

    def add_col(i, j, q):  # col_i += q * col_j
        for row in D:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    def negate_row(i):
        D[i] = [-a for a in D[i]]
        U[i] = [-a for a in U[i]]

    for k in range(n):
        while True:
            # move a nonzero pivot into position (k, k)
            pivot = min(((abs(D[i][j]), i, j)
                         for i in range(k, n) for j in range(k, n)
                         if D[i][j] != 0), default=None)
            if pivot is None:
                break
            _, pi, pj = pivot
            if pi != k:
                swap_rows(k, pi)
            if pj != k:
                swap_cols(k, pj)
            done = True
            for i in range(k + 1, n):
                if D[i][k] != 0:
                    add_row(i, k, -(D[i][k] // D[k][k]))
                    if D[i][k] != 0:
                        done = False
            for j in range(k + 1, n):
                if D[k][j] != 0:
                    add_col(j, k, -(D[k][j] // D[k][k]))
                    if D[k][j] != 0:
                        done = False
            if done:
                break
        if D[k][k] < 0:
            negate_row(k)
    # enforce divisibility d_k | d_{k+1}
    for k in range(n - 1):
        for j in range(k + 1, n):
            if D[j][j] % D[k][k] != 0:
                add_col(k, j, 1)
                # re-reduce the 2x2 block the cheap way: restart from k
                return smith_normal_form_fix(D, U, V, k)
    return U, D, V


def smith_normal_form_fix(D, U, V, k):
    """Continue reduction after a divisibility fix; simplest correct route is
    to rerun elimination on the current matrix and compose transforms."""
    U2, D2, V2 = smith_normal_form(D)
    return mat_mul(U2, U), D2, mat_mul(V, V2)
