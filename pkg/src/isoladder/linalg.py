"""Exact integer and mod-p linear algebra on lists of Python ints.

Rows are lists of ints. Lattices are row spans. Nothing here knows about
algebras; this is the arithmetic substrate for ``lattices`` and ``orders``.
"""

from math import gcd

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp


def xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def content(rows):
    g = 0
    for row in rows:
        for v in row:
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


def _combine(p, v, j, n, mod):
    """Eliminate column j of v against pivot row p. Returns (new_pivot, rest)."""
    a, b = p[j], v[j]
    if b % a == 0:
        q = b // a
        rest = [v[k] - q * p[k] for k in range(n)]
        new_p = p
    else:
        g, s, t = xgcd(a, b)
        ag, bg = a // g, b // g
        new_p = [s * p[k] + t * v[k] for k in range(n)]
        rest = [bg * p[k] - ag * v[k] for k in range(n)]
    if mod:
        for k in range(j + 1, n):
            rest[k] %= mod
        if new_p is not p:
            for k in range(j + 1, n):
                new_p[k] %= mod
    return new_p, rest


def _insert(piv, v, n, mod):
    """Insert v into an upper-triangular pivot table. Returns True if v enlarged it."""
    for j in range(n):
        if v[j] == 0:
            continue
        p = piv[j]
        if p is None:
            if v[j] < 0:
                v = [-x for x in v]
            piv[j] = v
            return True
        new_p, v = _combine(p, v, j, n, mod)
        if new_p[j] < 0:
            new_p = [-x for x in new_p]
        piv[j] = new_p
    return False


def _reduce_above(piv, n):
    for j in range(n):
        pj = piv[j]
        a = pj[j]
        for i in range(j):
            row = piv[i]
            q = row[j] // a
            if q:
                piv[i] = [row[k] - q * pj[k] for k in range(n)]


def hnf(rows, n, modulus=None):
    """Hermite normal form of the full-rank lattice spanned by ``rows``.

    Output: n rows, upper triangular, positive pivots, entries above each
    pivot reduced into [0, pivot). If ``modulus`` is given it must be a
    positive multiple of the lattice determinant (so modulus*Z^n lies in the
    lattice); it bounds intermediate entries.
    Raises ValueError if the rows do not span a full-rank lattice.
    """
    if modulus:
        mod = abs(modulus)
        piv = []
        for j in range(n):
            e = [0] * n
            e[j] = mod
            piv.append(e)
    else:
        mod = 0
        piv = [None] * n
    for row in rows:
        v = [x % mod for x in row] if mod else list(row)
        _insert(piv, v, n, mod)
        if not mod and all(p is not None for p in piv):
            # switch to modular mode with the current determinant
            mod = 1
            for j in range(n):
                mod *= piv[j][j]
            for j in range(n):
                piv[j] = piv[j][: j + 1] + [x % mod for x in piv[j][j + 1:]]
        elif mod:
            det = 1
            for j in range(n):
                det *= piv[j][j]
            if det < mod:
                mod = det
                for j in range(n):
                    piv[j] = piv[j][: j + 1] + [x % mod for x in piv[j][j + 1:]]
    if any(p is None for p in piv):
        raise ValueError("rows do not span a full-rank lattice")
    _reduce_above(piv, n)
    return piv


def hnf_any_rank(rows, n):
    """Echelon form (upper, positive pivots, reduced) of a lattice of any rank.

    Returns only the nonzero rows. No modular shortcut; for small inputs.
    """
    piv = [None] * n
    for row in rows:
        _insert(piv, list(row), n, 0)
    out = [p for p in piv if p is not None]
    cols = [next(k for k in range(n) if r[k]) for r in out]
    for a_idx, r in enumerate(out):
        c = cols[a_idx]
        for i in range(a_idx):
            q = out[i][c] // r[c]
            if q:
                out[i] = [out[i][k] - q * r[k] for k in range(n)]
    return out


def triangular_det(rows):
    d = 1
    for j, row in enumerate(rows):
        d *= row[j]
    return d


def triangular_adjugate(rows):
    """For upper-triangular integer M with D = det(M), return X = D * M^{-1} (integral)."""
    n = len(rows)
    D = triangular_det(rows)
    X = [[0] * n for _ in range(n)]
    for k in range(n):
        for i in range(n - 1, -1, -1):
            s = D if i == k else 0
            row = rows[i]
            for j in range(i + 1, n):
                if row[j] and X[j][k]:
                    s -= row[j] * X[j][k]
            q, r = divmod(s, row[i])
            assert r == 0
            X[i][k] = q
    return X, D


def mat_mul(A, B):
    nb = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * nb
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(nb):
                    acc[j] += a * bk[j]
        out.append(acc)
    return out


def vec_mat(v, B):
    nb = len(B[0])
    acc = [0] * nb
    for k, a in enumerate(v):
        if a:
            bk = B[k]
            for j in range(nb):
                acc[j] += a * bk[j]
    return acc


def transpose(A):
    return [list(col) for col in zip(*A)]


def smith_form(rows):
    """Smith decomposition S = U * A * V of an integer matrix (lists of rows).

    Returns (diag, U, V) with diag the diagonal entries of S (length min(m, n)).
    """
    A = Matrix(rows)
    S, U, V = smith_normal_decomp(A)
    diag = [int(abs(S[i, i])) for i in range(min(S.shape))]
    return diag, [[int(x) for x in U.row(i)] for i in range(U.rows)], \
        [[int(x) for x in V.row(i)] for i in range(V.rows)]


def elementary_divisors(rows):
    """Invariant factors (> 1) of Z^n / rowspan(rows) for a square nonsingular matrix."""
    diag, _, _ = smith_form(rows)
    return sorted(d for d in diag if d != 1)


# ---------------------------------------------------------------- mod p


def rref_mod(rows, n, p):
    """Reduced row echelon form mod p. Returns (basis_rows, pivot_columns)."""
    basis = []
    pivots = []
    for row in rows:
        v = [x % p for x in row]
        for b, c in zip(basis, pivots):
            if v[c]:
                f = v[c]
                v = [(x - f * y) % p for x, y in zip(v, b)]
        lead = next((k for k in range(n) if v[k]), None)
        if lead is None:
            continue
        inv = pow(v[lead], -1, p)
        v = [(x * inv) % p for x in v]
        for idx, b in enumerate(basis):
            if b[lead]:
                f = b[lead]
                basis[idx] = [(x - f * y) % p for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [basis[i] for i in order], [pivots[i] for i in order]


def reduce_mod_space(v, basis, pivots, p):
    v = [x % p for x in v]
    for b, c in zip(basis, pivots):
        if v[c]:
            f = v[c]
            v = [(x - f * y) % p for x, y in zip(v, b)]
    return v


def left_kernel_mod(rows, p):
    """Basis of {x : x * M = 0 mod p} for M given by ``rows`` (m x k)."""
    m = len(rows)
    if m == 0:
        return []
    k = len(rows[0])
    aug = [list(r) + [1 if i == j else 0 for j in range(m)] for i, r in enumerate(rows)]
    basis, pivots = rref_mod(aug, k + m, p)
    return [b[k:] for b, c in zip(basis, pivots) if c >= k]
