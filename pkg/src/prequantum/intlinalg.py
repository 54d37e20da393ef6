"""Exact linear algebra over Q and Z for small coboundary matrices.

Matrices are lists of rows holding ints or Fractions.
"""

from __future__ import annotations

from fractions import Fraction


def _copy(A):
    return [list(row) for row in A]


def rref(A):
    """Reduced row echelon form over Q. Returns (R, pivot_columns)."""
    R = [[Fraction(v) for v in row] for row in A]
    pivots = []
    r = 0
    ncols = len(R[0]) if R else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        inv = 1 / R[r][c]
        R[r] = [v * inv for v in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                factor = R[i][c]
                R[i] = [a - factor * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R, pivots


def rank(A) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def solve_rational(A, b):
    """Some x with A x = b over Q, or None."""
    ncols = len(A[0]) if A else 0
    aug = [list(row) + [bv] for row, bv in zip(A, b)]
    if not aug:
        return []
    R, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(R, pivots):
        x[c] = row[-1]
    return x


def hermite_normal_form(M):
    """Row-style Hermite normal form of an integer matrix.

    Returns (H, V) with V unimodular and V @ M == H, H in upper echelon form
    with positive pivots and entries above each pivot reduced into
    [0, pivot).
    """
    H = [[int(v) for v in row] for row in M]
    m = len(H)
    n = len(H[0]) if H else 0
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def combine(dst, src, q):
        H[dst] = [a - q * b for a, b in zip(H[dst], H[src])]
        V[dst] = [a - q * b for a, b in zip(V[dst], V[src])]

    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            rows = [i for i in range(r, m) if H[i][c] != 0]
            if not rows:
                break
            best = min(rows, key=lambda i: abs(H[i][c]))
            H[r], H[best] = H[best], H[r]
            V[r], V[best] = V[best], V[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    combine(i, r, H[i][c] // H[r][c])
                    if H[i][c]:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-v for v in H[r]]
            V[r] = [-v for v in V[r]]
        for i in range(r):
            combine(i, r, H[i][c] // H[r][c])
        r += 1
    return H, V


def solve_integer(A, b):
    """Some integer x with A x = b, or None.

    Uses the Hermite form of A^T: V A^T = H gives A V^T = H^T, which is
    lower echelon, so H^T y = b is solved by forward substitution with
    divisibility checks and x = V^T y.
    """
    if not A:
        return []
    k, m = len(A), len(A[0])
    At = [[int(A[i][j]) for i in range(k)] for j in range(m)]
    H, V = hermite_normal_form(At)
    b = [Fraction(v) for v in b]
    if any(v.denominator != 1 for v in b):
        return None
    b = [int(v) for v in b]
    y = [0] * m
    for t, row in enumerate(H):
        pivot_col = next((c for c, v in enumerate(row) if v), None)
        if pivot_col is None:
            break
        acc = b[pivot_col] - sum(H[s][pivot_col] * y[s] for s in range(t))
        if acc % row[pivot_col]:
            return None
        y[t] = acc // row[pivot_col]
    for i in range(k):
        if sum(H[s][i] * y[s] for s in range(m)) != b[i]:
            return None
    return [sum(V[s][j] * y[s] for s in range(m)) for j in range(m)]
