"""Exact sparse linear algebra over Q.

Elimination is fraction-free: every row is scaled to integers and reduced by
integer cross-multiplication, with the row content divided out after each
step.  The pivot in each column is the entry of smallest bit size.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


class SparseRationalMatrix:
    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError((r, c))
            v = Fraction(v)
            if v:
                self.entries[(r, c)] = v

    @classmethod
    def from_dense(cls, dense):
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls(rows, cols, {(i, j): x for i, r in enumerate(dense) for j, x in enumerate(r) if x})

    @classmethod
    def from_rows(cls, row_dicts, cols):
        entries = {(i, j): v for i, r in enumerate(row_dicts) for j, v in r.items()}
        return cls(len(row_dicts), cols, entries)

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def to_dense(self):
        d = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            d[r][c] = v
        return d

    def transpose(self):
        return SparseRationalMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def apply(self, vec):
        """Matrix times a vector given as a sequence or a dict col -> value."""
        if isinstance(vec, dict):
            vec = [vec.get(c, 0) for c in range(self.cols)]
        out = [Fraction(0)] * self.rows
        for (r, c), v in self.entries.items():
            x = vec[c]
            if x:
                out[r] += v * x
        return out

    def __repr__(self):
        return f"SparseRationalMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_row(row):
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    out = {c: int(Fraction(v) * den) for c, v in row.items() if v}
    return _primitive(out)


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def echelon(rows, cols=None):
    """Fraction-free row echelon form of sparse rows; returns (pivot rows, pivot cols)."""
    work = [_integer_row(r) for r in rows]
    work = [r for r in work if r]
    pivots, pivot_cols = [], []
    col_order = sorted({c for r in work for c in r})
    for c in col_order:
        best, best_size = None, None
        for idx, r in enumerate(work):
            v = r.get(c)
            if v:
                size = abs(v).bit_length()
                if best is None or size < best_size:
                    best, best_size = idx, size
        if best is None:
            continue
        p = work.pop(best)
        pc = p[c]
        nxt = []
        for r in work:
            a = r.get(c)
            if a:
                new = {k: v * pc for k, v in r.items()}
                for k, v in p.items():
                    x = new.get(k, 0) - a * v
                    if x:
                        new[k] = x
                    else:
                        new.pop(k, None)
                if new:
                    nxt.append(_primitive(new))
            else:
                nxt.append(r)
        work = nxt
        pivots.append(p)
        pivot_cols.append(c)
    return pivots, pivot_cols


def rank(m):
    rows = m.row_dicts() if isinstance(m, SparseRationalMatrix) else m
    return len(echelon(rows)[0])


def rref(rows):
    """Reduced row echelon form over Q (rows as dicts); returns (rows, pivot cols)."""
    piv_rows, piv_cols = echelon(rows)
    order = sorted(range(len(piv_cols)), key=lambda i: piv_cols[i])
    piv_rows = [piv_rows[i] for i in order]
    piv_cols = [piv_cols[i] for i in order]
    red = [{k: Fraction(v, r[c]) for k, v in r.items()} for r, c in zip(piv_rows, piv_cols)]
    for i in range(len(red) - 1, -1, -1):
        c = piv_cols[i]
        for j in range(i):
            a = red[j].get(c)
            if a:
                for k, v in red[i].items():
                    x = red[j].get(k, 0) - a * v
                    if x:
                        red[j][k] = x
                    else:
                        red[j].pop(k, None)
    return red, piv_cols


def kernel_basis(m, cols=None):
    """Exact basis of the right kernel, as dense lists of Fractions."""
    if isinstance(m, SparseRationalMatrix):
        rows, cols = m.row_dicts(), m.cols
    else:
        rows = m
    red, piv_cols = rref(rows)
    pivset = set(piv_cols)
    basis = []
    for f in range(cols):
        if f in pivset:
            continue
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, c in zip(red, piv_cols):
            x = r.get(f)
            if x:
                v[c] = -x
        basis.append(v)
    return basis


def weighted_orthogonal_complement(basis, weights):
    """Basis of {x : sum_i w_i x_i b_i = 0 for every b in basis}."""
    weights = [Fraction(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    dim = len(weights)
    rows = [{i: w * Fraction(x) for i, (w, x) in enumerate(zip(weights, b)) if x} for b in basis]
    return kernel_basis(rows, dim)


def weighted_inner(x, y, weights):
    return sum((Fraction(w) * a * b for w, a, b in zip(weights, x, y)), Fraction(0))


def span_contains(basis, vectors, dim):
    """Every vector lies in the span of basis (exact rank test)."""
    rows = [{i: Fraction(x) for i, x in enumerate(b) if x} for b in basis]
    r0 = rank(rows)
    for v in vectors:
        if rank(rows + [{i: Fraction(x) for i, x in enumerate(v) if x}]) != r0:
            return False
    return True


def same_span(a, b, dim):
    return span_contains(a, b, dim) and span_contains(b, a, dim)


def solve(m, rhs):
    """One solution x of m x = rhs, or None if inconsistent."""
    rows = m.row_dicts()
    aug = [dict(r) for r in rows]
    for i, v in enumerate(rhs):
        if v:
            aug[i][m.cols] = Fraction(v)
    red, piv_cols = rref(aug)
    if m.cols in piv_cols:
        return None
    x = [Fraction(0)] * m.cols
    for r, c in zip(red, piv_cols):
        x[c] = r.get(m.cols, Fraction(0))
    return x


def rank_reference(dense):
    """Plain Gauss-Jordan over Fractions with first-nonzero pivoting (test oracle)."""
    m = [[Fraction(x) for x in r] for r in dense]
    rnk = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rnk, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rnk], m[piv] = m[piv], m[rnk]
        for i in range(len(m)):
            if i != rnk and m[i][c] != 0:
                f = m[i][c] / m[rnk][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rnk])]
        rnk += 1
    return rnk
