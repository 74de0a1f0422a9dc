"""Exact integer and rational linear algebra.

Matrices are plain lists of lists; integer matrices hold Python ints
(arbitrary precision), rational ones hold fractions.Fraction.  Everything is
exact: no floats appear anywhere in this package.

The normal-form routines use naive pivoting on a smallest-nonzero-entry rule,
which keeps coefficient growth acceptable at the desk scale this package
targets (matrices of at most a few hundred rows).
"""

from __future__ import annotations

from fractions import Fraction

IntMatrix = list[list[int]]


def identity(k: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def mat_mul(A, B):
    """Product of two matrices (entries int or Fraction)."""
    rows, inner, cols = len(A), len(B), len(B[0]) if B else 0
    assert all(len(r) == inner for r in A) or inner == 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(rows)]


def mat_vec(A, x):
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _add_multiple_of_row(M, target, source, factor):
    M[target] = [t + factor * s for t, s in zip(M[target], M[source])]


def hermite_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular, U*M = H, pivots positive, entries above
    each pivot reduced to lie in [0, pivot).
    """
    m = len(M)
    n = len(M[0]) if m else 0
    H = [list(row) for row in M]
    U = identity(m)
    r = 0
    for c in range(n):
        while True:
            pivots = [i for i in range(r, m) if H[i][c] != 0]
            if not pivots:
                break
            i0 = min(pivots, key=lambda i: abs(H[i][c]))
            if len(pivots) == 1:
                _swap_rows(H, r, i0)
                _swap_rows(U, r, i0)
                break
            for i in pivots:
                if i == i0:
                    continue
                q = H[i][c] // H[i0][c]
                _add_multiple_of_row(H, i, i0, -q)
                _add_multiple_of_row(U, i, i0, -q)
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    _add_multiple_of_row(H, i, r, -q)
                    _add_multiple_of_row(U, i, r, -q)
            r += 1
    return H, U


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: (S, U, V) with U, V unimodular and U*M*V = S.

    S is diagonal with non-negative entries d_1 | d_2 | ... .
    """
    m = len(M)
    n = len(M[0]) if m else 0
    S = [list(row) for row in M]
    U = identity(m)
    V = identity(n)

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_col(target, source, factor):
        for row in S:
            row[target] += factor * row[source]
        for row in V:
            row[target] += factor * row[source]

    t = 0
    while True:
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                   if S[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        _swap_rows(S, t, pi)
        _swap_rows(U, t, pi)
        swap_cols(t, pj)

        dirty = False
        for i in range(t + 1, m):
            if S[i][t] != 0:
                q = S[i][t] // S[t][t]
                _add_multiple_of_row(S, i, t, -q)
                _add_multiple_of_row(U, i, t, -q)
                if S[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if S[t][j] != 0:
                q = S[t][j] // S[t][t]
                add_col(j, t, -q)
                if S[t][j] != 0:
                    dirty = True
        if dirty:
            continue

        # Row and column are clear; enforce divisibility of the remaining block.
        d = S[t][t]
        offender = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                         if S[i][j] % d != 0), None)
        if offender is not None:
            _add_multiple_of_row(S, t, offender[0], 1)
            _add_multiple_of_row(U, t, offender[0], 1)
            continue
        if d < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return S, U, V


def invariant_factors(M: IntMatrix) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    S, _, _ = smith_normal_form(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i] != 0]


def determinant(M: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(row) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if pivot is None:
                return 0
            _swap_rows(A, k, pivot)
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def solve_rational(A, b) -> list[Fraction] | None:
    """Solve A*x = b exactly over the rationals.

    Returns one solution (free variables set to 0), or None if the system is
    inconsistent.  A may be rectangular; entries int or Fraction.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    pivot_cols = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for row_idx, c in enumerate(pivot_cols):
        x[c] = aug[row_idx][n]
    return x


def integer_kernel(M: IntMatrix) -> list[list[int]]:
    """Basis of the saturated lattice {x in Z^cols : M*x = 0}.

    Computed from the row Hermite form of the transpose: rows of the
    transform matrix aligned with zero rows of the form are kernel vectors.
    """
    Mt = transpose(M)
    if not Mt:
        return []
    H, U = hermite_normal_form(Mt)
    return [U[i] for i in range(len(H)) if all(x == 0 for x in H[i])]


class Eliminator:
    """Incremental sparse Gaussian elimination over Q or over F_p.

    Rows over Q are scaled to integers and combined fraction-free (with gcd
    normalization), which keeps arithmetic in fast machine integers for the
    very sparse matrices this package produces.  ``add_row`` reduces the new
    row against the current echelon and reports whether the rank grew;
    ``fork`` snapshots the state so several extensions can share one base
    elimination.
    """

    def __init__(self, p: int | None = None):
        self.p = p
        self.pivots: dict[int, dict[int, int]] = {}  # pivot column -> row
        self.rank = 0

    def fork(self) -> "Eliminator":
        other = Eliminator(self.p)
        other.pivots = dict(self.pivots)
        other.rank = self.rank
        return other

    def _normalize(self, row) -> dict[int, int]:
        items = row.items() if isinstance(row, dict) else enumerate(row)
        p = self.p
        if p is None:
            d: dict[int, int] = {}
            scale = 1
            for c, v in items:
                if isinstance(v, Fraction):
                    if v.denominator != 1:
                        lcm = v.denominator // gcd_int(scale, v.denominator)
                        if lcm != 1:
                            for k in d:
                                d[k] *= lcm
                            scale *= lcm
                    v = int(v * scale)
                else:
                    v = v * scale
                if v:
                    d[c] = v
            return d
        d = {}
        for c, v in items:
            if isinstance(v, Fraction):
                den = v.denominator % p
                if den == 0:
                    raise ZeroDivisionError(
                        f"denominator divisible by {p} in mod-{p} reduction")
                v = v.numerator * pow(den, -1, p)
            v %= p
            if v:
                d[c] = v
        return d

    def add_row(self, row) -> bool:
        cur = self._normalize(row)
        p = self.p
        while cur:
            c0 = min(cur)
            piv_row = self.pivots.get(c0)
            if piv_row is None:
                g = 0
                for v in cur.values():
                    g = gcd_int(g, v)
                if p is None and g not in (0, 1):
                    cur = {c: v // g for c, v in cur.items()}
                self.pivots[c0] = cur
                self.rank += 1
                return True
            if p is None:
                a, b = piv_row[c0], cur[c0]
                new = {c: a * v for c, v in cur.items()}
                for c, v in piv_row.items():
                    x = new.get(c, 0) - b * v
                    if x:
                        new[c] = x
                    else:
                        new.pop(c, None)
                g = 0
                for v in new.values():
                    g = gcd_int(g, v)
                if g not in (0, 1):
                    new = {c: v // g for c, v in new.items()}
                cur = new
            else:
                f = cur[c0] * pow(piv_row[c0], -1, p) % p
                new = dict(cur)
                for c, v in piv_row.items():
                    x = (new.get(c, 0) - f * v) % p
                    if x:
                        new[c] = x
                    else:
                        new.pop(c, None)
                cur = new
        return False


def gcd_int(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def rank(rows, p: int | None = None) -> int:
    """Exact matrix rank over Q (p None) or over the field with p elements.

    Rows may be dense lists or sparse dicts {column: value}; values int or
    Fraction (over F_p, denominators must be prime to p).
    """
    elim = Eliminator(p)
    for row in rows:
        elim.add_row(row)
    return elim.rank
