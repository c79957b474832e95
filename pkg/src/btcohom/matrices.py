"""Square matrices over A = F_q[t], stored as tuples of rows of coefficient tuples."""
from __future__ import annotations

import random

from .field_arith import (GF, Polynomial, p_add, p_divmod, p_mul, p_neg, p_scale, p_sub,
                          p_trim, p_mod)


def identity(n1):
    return tuple(tuple((1,) if i == j else () for j in range(n1)) for i in range(n1))


def elementary(n1, i, j, poly):
    """I + poly * E_ij (i != j)."""
    rows = [list(r) for r in identity(n1)]
    rows[i][j] = p_trim(poly)
    return tuple(tuple(r) for r in rows)


def diagonal(entries):
    n1 = len(entries)
    return tuple(tuple(p_trim(entries[i]) if i == j else () for j in range(n1)) for i in range(n1))


def permutation_matrix(perm):
    """Matrix sending u_i to u_{perm[i]} under row-vector multiplication."""
    n1 = len(perm)
    return tuple(tuple((1,) if perm[i] == j else () for j in range(n1)) for i in range(n1))


def mat_mul(F, a, b):
    n1 = len(a)
    m = len(b[0])
    out = []
    for i in range(n1):
        row = []
        for j in range(m):
            acc = ()
            for k in range(len(b)):
                if a[i][k] and b[k][j]:
                    acc = p_add(F, acc, p_mul(F, a[i][k], b[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_det(F, a):
    n1 = len(a)
    if n1 == 1:
        return a[0][0]
    if n1 == 2:
        return p_sub(F, p_mul(F, a[0][0], a[1][1]), p_mul(F, a[0][1], a[1][0]))
    total = ()
    for j in range(n1):
        if not a[0][j]:
            continue
        minor = tuple(tuple(r[k] for k in range(n1) if k != j) for r in a[1:])
        term = p_mul(F, a[0][j], mat_det(F, minor))
        total = p_add(F, total, term) if j % 2 == 0 else p_sub(F, total, term)
    return total


def mat_adjugate(F, a):
    n1 = len(a)
    if n1 == 1:
        return (((1,),),)
    out = [[()] * n1 for _ in range(n1)]
    for i in range(n1):
        for j in range(n1):
            minor = tuple(tuple(r[k] for k in range(n1) if k != j) for idx, r in enumerate(a) if idx != i)
            c = mat_det(F, minor)
            out[j][i] = c if (i + j) % 2 == 0 else p_neg(F, c)
    return tuple(tuple(r) for r in out)


def mat_inverse(F, a):
    """Inverse of a matrix with constant nonzero determinant."""
    d = mat_det(F, a)
    if len(d) != 1:
        raise ValueError("matrix is not invertible over F_q[t]")
    adj = mat_adjugate(F, a)
    s = F.inv[d[0]]
    return tuple(tuple(p_scale(F, s, x) for x in r) for r in adj)


def mat_reduce(F, a, modulus):
    return tuple(tuple(p_mod(F, x, modulus) for x in r) for r in a)


def mat_mul_mod(F, a, b, modulus):
    return mat_reduce(F, mat_mul(F, a, b), modulus)


def is_identity(a):
    return a == identity(len(a))


def max_degree(a):
    return max((len(x) - 1 for r in a for x in r), default=-1)


def mat_scale_row(F, a, i, c):
    rows = [list(r) for r in a]
    rows[i] = [p_scale(F, c, x) for x in rows[i]]
    return tuple(tuple(r) for r in rows)


def to_polynomials(F, a):
    return [[Polynomial(F, x) for x in r] for r in a]


def from_polynomials(rows):
    return tuple(tuple(p.coeffs if isinstance(p, Polynomial) else p_trim((p,)) for p in r) for r in rows)


def mat_str(a):
    """Compact text form: rows separated by ';', entries by ',', coefficients by '.'."""
    return ";".join(",".join(".".join(map(str, x)) if x else "0" for x in r) for r in a)


def mat_parse(text):
    rows = []
    for r in text.split(";"):
        rows.append(tuple(() if x == "0" else p_trim(int(c) for c in x.split(".")) for x in r.split(",")))
    return tuple(rows)


def random_sl(F, n1, rng, steps=6, max_deg=2):
    """Random element of SL_{n+1}(F_q[t]) as a product of elementary matrices."""
    g = identity(n1)
    for _ in range(steps):
        i, j = rng.sample(range(n1), 2)
        deg = rng.randint(0, max_deg)
        poly = p_trim(rng.randrange(F.q) for _ in range(deg + 1))
        g = mat_mul(F, g, elementary(n1, i, j, poly))
    return g


def column_hermite_to_upper(F, flag):
    """Find h in SL_{n+1}(F_q[t]) with flag * h upper triangular.

    Column operations over F_q[t]; rows are cleared from the bottom up so that
    each lower row keeps its zeros once it is done.  Returns (flag * h, h).
    """
    n1 = len(flag)
    m = [list(r) for r in flag]
    h = [list(r) for r in identity(n1)]

    def col_addmul(dst, src, c):
        # column dst += c * column src
        for mat in (m, h):
            for r in mat:
                if r[src]:
                    r[dst] = p_add(F, r[dst], p_mul(F, c, r[src]))

    def col_swap_signed(a, b):
        # (col a, col b) <- (col b, -col a), determinant one
        for mat in (m, h):
            for r in mat:
                r[a], r[b] = r[b], p_neg(F, r[a])

    for k in range(n1 - 1, 0, -1):
        row = m[k]
        while True:
            nz = [j for j in range(k + 1) if row[j]]
            if nz == [k] or not nz:
                break
            # smallest degree entry becomes the pivot in column k
            piv = min(nz, key=lambda j: (len(row[j]), j))
            if piv != k:
                col_swap_signed(piv, k)
            for j in range(k):
                if row[j]:
                    quot, _ = p_divmod(F, row[j], row[k])
                    col_addmul(j, k, p_neg(F, quot))
        if not row[k]:
            raise ValueError("flag matrix is singular")
    return tuple(tuple(r) for r in m), tuple(tuple(r) for r in h)
