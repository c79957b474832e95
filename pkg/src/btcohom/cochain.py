"""Gamma-invariant cochains on a quotient window and the operators d, delta, Laplacian.

A cochain stores one value per orbit of oriented simplices, using the
type-increasing orientation of the representative.  Elements of SL_{n+1}
preserve vertex types, so no orbit is ever identified with its own reverse.

Conventions (single orientation per orbit):
  (d f)(S)      = sum over faces s_i of S of (-1)^i f(s_i)
  (delta g)(s)  = sum over Gamma_s-classes of cofaces S of eta(s, S) #Gamma_s/#Gamma_S g(S)
  (f, g)        = sum over orbits of f g / #Gamma_s
With these, d and delta are adjoint for the pairing.  Passing doubled=True to
delta/pairing gives the normalization that counts both orientations of each
coface and simplex.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import BoundaryError
from .exact_linalg import SparseRationalMatrix


class Cochain:
    __slots__ = ("degree", "values", "quotient")

    def __init__(self, degree, values, quotient):
        self.degree = degree
        self.quotient = quotient
        self.values = {k: Fraction(v) for k, v in values.items() if v}
        for k, rec in self._reversing():
            if k in self.values:
                raise ValueError(f"orbit {degree}:{k} reverses orientation and must carry 0")

    def _reversing(self):
        recs = self.quotient.orbits[self.degree] if self.degree < len(self.quotient.orbits) else []
        return [(k, r) for k, r in enumerate(recs) if r.reverses_orientation]

    def __getitem__(self, idx):
        return self.values.get(idx, Fraction(0))

    def __add__(self, other):
        _check_same(self, other)
        out = dict(self.values)
        for k, v in other.values.items():
            out[k] = out.get(k, 0) + v
        return Cochain(self.degree, out, self.quotient)

    def __neg__(self):
        return Cochain(self.degree, {k: -v for k, v in self.values.items()}, self.quotient)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return Cochain(self.degree, {k: s * v for k, v in self.values.items()}, self.quotient)

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.quotient is other.quotient and self.values == other.values)

    def is_zero(self):
        return not self.values

    def support_depth(self):
        recs = self.quotient.orbits[self.degree]
        return max((recs[k].depth for k in self.values), default=-1)

    def to_vector(self, indices=None):
        if indices is None:
            indices = range(len(self.quotient.orbits[self.degree]))
        return [self[k] for k in indices]

    def serialize(self):
        lines = []
        for k in sorted(self.values):
            v = self.values[k]
            lines.append(f"{self.degree}:{k} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse(cls, text, degree, quotient):
        vals = {}
        for line in text.strip().splitlines():
            oid, val = line.split()
            dim, idx = map(int, oid.split(":"))
            if dim != degree:
                raise ValueError("degree mismatch in cochain file")
            vals[idx] = Fraction(val)
        return cls(degree, vals, quotient)

    def __repr__(self):
        return f"Cochain(deg={self.degree}, support={len(self.values)})"


def _check_same(f, g):
    if f.degree != g.degree:
        raise ValueError("degree mismatch")
    if f.quotient is not g.quotient:
        raise ValueError("cochains live on different quotients")


def zero(degree, quotient):
    return Cochain(degree, {}, quotient)


def from_vector(degree, quotient, vec, indices=None):
    if indices is None:
        indices = range(len(vec))
    return Cochain(degree, {k: v for k, v in zip(indices, vec) if v}, quotient)


def _require_depth(f, limit, what):
    recs = f.quotient.orbits[f.degree]
    for k in f.values:
        if recs[k].depth > limit:
            raise BoundaryError(f"{what}: support orbit {f.degree}:{k} has depth {recs[k].depth}, "
                                f"operator needs depth <= {limit} in a radius-{f.quotient.radius} window")


def d(f):
    Q = f.quotient
    top = len(Q.orbits) - 1
    if f.degree >= top:
        return zero(f.degree + 1, Q) if f.degree + 1 <= top else _empty(f.degree + 1, Q)
    _require_depth(f, Q.radius - 1, "d")
    cof = _cofaces(Q, f.degree)
    out = {}
    for k, v in f.values.items():
        for big, sign, _ in cof[k]:
            out[big] = out.get(big, 0) + sign * v
    return Cochain(f.degree + 1, out, Q)


def delta(g, doubled=False):
    Q = g.quotient
    if g.degree == 0:
        return _empty(-1, Q)
    _require_depth(g, Q.radius - 1, "delta")
    recs_small = Q.orbits[g.degree - 1]
    recs_big = Q.orbits[g.degree]
    out = {}
    for k, v in g.values.items():
        for small, sign in Q.faces[g.degree][k]:
            w = Fraction(recs_small[small].stab, recs_big[k].stab)
            out[small] = out.get(small, 0) + sign * w * v
    if doubled:
        out = {k: 2 * v for k, v in out.items()}
    return Cochain(g.degree - 1, out, Q)


def _empty(degree, Q):
    c = object.__new__(Cochain)
    c.degree, c.values, c.quotient = degree, {}, Q
    return c


def laplacian(f):
    Q = f.quotient
    top = len(Q.orbits) - 1
    _require_depth(f, Q.radius - 2, "laplacian")
    out = zero(f.degree, Q)
    if f.degree < top:
        out = out + delta(d(f))
    if f.degree > 0:
        out = out + d(delta(f))
    return out


def pairing(f, g, doubled=False):
    _check_same(f, g)
    recs = f.quotient.orbits[f.degree]
    total = Fraction(0)
    small, big = (f, g) if len(f.values) <= len(g.values) else (g, f)
    for k, v in small.values.items():
        w = big.values.get(k)
        if w:
            total += v * w / recs[k].stab
    return 2 * total if doubled else total


def augmentation(r, quotient):
    """The degree-0 cochain with constant value r on every vertex orbit of the window."""
    return Cochain(0, {k: r for k in range(len(quotient.orbits[0]))}, quotient)


def _cofaces(Q, dim):
    cache = Q.__dict__.setdefault("_coface_cache", {})
    if dim not in cache:
        cache[dim] = Q.cofaces(dim)
    return cache[dim]


def weights(Q, dim, indices=None):
    recs = Q.orbits[dim]
    if indices is None:
        indices = range(len(recs))
    return [Fraction(1, recs[k].stab) for k in indices]


def d_matrix(Q, dim, row_indices=None, col_indices=None):
    """Matrix of d on dim-cochains: rows indexed by (dim+1)-orbits, columns by dim-orbits."""
    rows_all = range(len(Q.orbits[dim + 1])) if dim + 1 < len(Q.orbits) else range(0)
    row_indices = list(rows_all if row_indices is None else row_indices)
    col_indices = list(range(len(Q.orbits[dim])) if col_indices is None else col_indices)
    rpos = {k: i for i, k in enumerate(row_indices)}
    cpos = {k: j for j, k in enumerate(col_indices)}
    entries = {}
    if dim + 1 < len(Q.orbits):
        for big in row_indices:
            for small, sign in Q.faces[dim + 1][big]:
                if small in cpos:
                    key = (rpos[big], cpos[small])
                    entries[key] = entries.get(key, 0) + sign
    return SparseRationalMatrix(len(row_indices), len(col_indices), entries)


def delta_matrix(Q, dim, row_indices=None, col_indices=None):
    """Matrix of delta on dim-cochains: rows (dim-1)-orbits, columns dim-orbits."""
    if dim == 0:
        cols = list(range(len(Q.orbits[0])) if col_indices is None else col_indices)
        return SparseRationalMatrix(0, len(cols))
    row_indices = list(range(len(Q.orbits[dim - 1])) if row_indices is None else row_indices)
    col_indices = list(range(len(Q.orbits[dim])) if col_indices is None else col_indices)
    rpos = {k: i for i, k in enumerate(row_indices)}
    entries = {}
    for j, big in enumerate(col_indices):
        sb = Q.orbits[dim][big].stab
        for small, sign in Q.faces[dim][big]:
            if small in rpos:
                key = (rpos[small], j)
                entries[key] = entries.get(key, 0) + sign * Fraction(Q.orbits[dim - 1][small].stab, sb)
    return SparseRationalMatrix(len(row_indices), len(col_indices), entries)


def random_cochain(Q, degree, rng, max_depth=None, density=0.5, span=5):
    """Seeded random invariant cochain supported on orbits of depth <= max_depth."""
    if max_depth is None:
        max_depth = Q.radius - 2
    vals = {}
    for k, rec in enumerate(Q.orbits[degree]):
        if rec.depth <= max_depth and not rec.reverses_orientation and rng.random() < density:
            num = rng.randint(-span, span)
            den = rng.randint(1, span)
            if num:
                vals[k] = Fraction(num, den)
    return Cochain(degree, vals, Q)


def direct_delta_at(Q, g, member):
    """delta g at one window simplex, summing over its actual cofaces in the window.

    This does not use stabilizer orders; it is an independent check of the
    orbit-weighted formula for simplices whose whole star lies in the window.
    """
    cofaces = [S for S in _ball_cofaces(Q, member)]
    total = Fraction(0)
    for S in cofaces:
        extra = next(i for i, v in enumerate(S) if v not in member)
        sign = -1 if extra % 2 else 1
        total += sign * g[Q.orbit_of[S]]
    return total


def _ball_cofaces(Q, member):
    index = Q.__dict__.get("_ball_coface_index")
    if index is None:
        index = {}
        for s in Q.orbit_of:
            for i in range(len(s)):
                if len(s) > 1:
                    index.setdefault(s[:i] + s[i + 1:], []).append(s)
        Q.__dict__["_ball_coface_index"] = index
    return index.get(member, [])
