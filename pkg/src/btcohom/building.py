"""Local pieces of the Bruhat-Tits building of SL_{n+1}(F_q((pi))), pi = 1/t.

Vertices are homothety classes of O-lattices in K^{n+1}, written as row spans.
A class is normalized so that the lattice lies in O^{n+1} but not in pi*O^{n+1},
and is then put in upper-triangular Hermite form over O: diagonal pi^a_j, and
each entry above the diagonal in column j reduced modulo pi^a_j.  That form is
unique, so it serves as the hashable VertexKey.

Group elements act by g.L = L g^{-1} on row vectors.

Laurent polynomials in pi are pairs (v, coeffs) meaning sum coeffs[k] pi^(v+k)
with coeffs[0] != 0; None is zero.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .errors import InsufficientPrecision, NotAVertex
from .field_arith import (GF, RationalFunction, Polynomial, gf_rref, laurent_expand, p_add,
                          p_mul, p_neg, p_trim, ser_inv, ser_mul, subspaces)
from .matrices import column_hermite_to_upper, mat_inverse, mat_mul

# ---------------------------------------------------------------------------
# Laurent polynomials


def lp_norm(v, coeffs):
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    if k == len(coeffs):
        return None
    c = list(coeffs[k:])
    while c[-1] == 0:
        c.pop()
    return (v + k, tuple(c))


def lp_add(F, a, b):
    if a is None:
        return b
    if b is None:
        return a
    v = min(a[0], b[0])
    ca = (0,) * (a[0] - v) + a[1]
    cb = (0,) * (b[0] - v) + b[1]
    return lp_norm(v, p_add(F, ca, cb))


def lp_mul(F, a, b):
    if a is None or b is None:
        return None
    return (a[0] + b[0], p_mul(F, a[1], b[1]))


def lp_neg(F, a):
    return None if a is None else (a[0], p_neg(F, a[1]))


def lp_from_tpoly(coeffs):
    """Polynomial in t (low -> high) as a Laurent polynomial in pi."""
    c = p_trim(coeffs)
    if not c:
        return None
    return lp_norm(-(len(c) - 1), tuple(reversed(c)))


def lp_to_tpoly(a):
    """Inverse of lp_from_tpoly; the input must only involve pi^k with k <= 0."""
    if a is None:
        return ()
    v, c = a
    top = v + len(c) - 1
    if top > 0:
        raise ValueError("not a polynomial in t")
    out = [0] * (-v + 1)
    for k, x in enumerate(c):
        out[-(v + k)] = x
    return p_trim(out)


def lp_val(a):
    return None if a is None else a[0]


def lp_matmul(F, a, b):
    n = len(a)
    m = len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for k in range(len(b)):
                if a[i][k] is not None and b[k][j] is not None:
                    acc = lp_add(F, acc, lp_mul(F, a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# vertex keys


class VertexKey(NamedTuple):
    exps: tuple
    upper: tuple  # entries (i, j), i < j, row-major; entry (i, j) has length exps[j]

    def __str__(self):
        return key_str(self)


def key_str(key):
    return ",".join(map(str, key.exps)) + "|" + ";".join(".".join(map(str, e)) for e in key.upper)


def parse_key(text):
    exps_s, up_s = text.split("|")
    exps = tuple(int(x) for x in exps_s.split(","))
    n1 = len(exps)
    npairs = n1 * (n1 - 1) // 2
    parts = up_s.split(";") if npairs else []
    upper = tuple(tuple(int(c) for c in p.split(".")) if p else () for p in parts)
    if len(upper) != npairs:
        raise ValueError(f"malformed vertex key {text!r}")
    return VertexKey(exps, upper)


def vertex_type(key):
    return sum(key.exps) % len(key.exps)


def diagonal_key(exps):
    m = min(exps)
    e = tuple(x - m for x in exps)
    n1 = len(e)
    upper = tuple((0,) * e[j] for i in range(n1) for j in range(i + 1, n1))
    return VertexKey(e, upper)


def base_vertex(n):
    return diagonal_key((0,) * (n + 1))


def is_diagonal(key):
    return not any(any(e) for e in key.upper)


def key_matrix(key):
    """Exact Laurent basis rows of the lattice (upper triangular)."""
    n1 = len(key.exps)
    rows = [[None] * n1 for _ in range(n1)]
    it = iter(key.upper)
    for i in range(n1):
        rows[i][i] = (key.exps[i], (1,))
        for j in range(i + 1, n1):
            rows[i][j] = lp_norm(0, next(it))
    return rows


def _series_val(s, N):
    for k in range(N):
        if s[k]:
            return k
    return N


def _hnf(F, n1, rows, N):
    add, mul, neg = F.add, F.mul, F.neg
    remaining = rows
    pivots = []
    exps = []
    for j in range(n1):
        best, bestval = None, N
        for idx, r in enumerate(remaining):
            v = _series_val(r[j], N)
            if v < bestval:
                best, bestval = idx, v
        if best is None:
            raise InsufficientPrecision("lattice is not of full rank modulo pi^N")
        P = remaining.pop(best)
        a = bestval
        if P[j][a] != 1 or any(P[j][a + 1:]):
            unit = P[j][a:] + [0] * a
            uinv = ser_inv(F, unit, N)
            P = [ser_mul(F, x, uinv, N) for x in P]
        for r in remaining:
            x = r[j]
            if _series_val(x, N) < N:
                c = x[a:]
                for k in range(j, n1):
                    pk = P[k]
                    rk = r[k]
                    for s, cs in enumerate(c):
                        if cs == 0:
                            continue
                        nc = mul[neg[cs]]
                        for u in range(N - s):
                            if pk[u]:
                                rk[s + u] = add[rk[s + u]][nc[pk[u]]]
        pivots.append(P)
        exps.append(a)
    for j in range(n1):
        aj = exps[j]
        Pj = pivots[j]
        for i in range(j):
            x = pivots[i][j]
            if any(x[aj:]):
                c = x[aj:]
                row = pivots[i]
                for k in range(j, n1):
                    pk = Pj[k]
                    rk = row[k]
                    for s, cs in enumerate(c):
                        if cs == 0:
                            continue
                        nc = mul[neg[cs]]
                        for u in range(N - s):
                            if pk[u]:
                                rk[s + u] = add[rk[s + u]][nc[pk[u]]]
    upper = tuple(tuple(pivots[i][j][:exps[j]]) for i in range(n1) for j in range(i + 1, n1))
    return tuple(exps), upper


def canonicalize_rows(F, n1, gens, det_val, abs_prec=None):
    """Canonical key of the lattice spanned by Laurent rows `gens`.

    det_val is the exact valuation of the lattice determinant (the covolume),
    used both to size the working precision and as an exactness certificate.
    abs_prec, when given, is the pi-adic precision to which the entries are known.
    """
    vals = [e[0] for r in gens for e in r if e is not None]
    if not vals:
        raise InsufficientPrecision("all generators vanish at the working precision")
    m = min(vals)
    D = det_val - n1 * m
    if D < 0:
        raise InsufficientPrecision("inconsistent determinant valuation")
    N = D + 1
    if abs_prec is not None and abs_prec - m < N:
        raise InsufficientPrecision(f"need precision {m + N}, have {abs_prec}")
    rows = []
    for r in gens:
        row = []
        for e in r:
            lst = [0] * N
            if e is not None:
                off = e[0] - m
                for k, x in enumerate(e[1]):
                    if off + k >= N:
                        break
                    lst[off + k] = x
            row.append(lst)
        rows.append(row)
    exps, upper = _hnf(F, n1, rows, N)
    if sum(exps) != D:
        raise InsufficientPrecision("determinant check failed after reduction")
    return VertexKey(exps, upper)


def canonical_vertex(m, q=None):
    """Key of the homothety class spanned by the rows of m.

    m may hold TruncatedLaurentSeries, RationalFunction or Polynomial entries.
    """
    from .field_arith import TruncatedLaurentSeries

    n1 = len(m)
    F = None
    entries = []
    abs_prec = None
    for r in m:
        row = []
        for x in r:
            if isinstance(x, TruncatedLaurentSeries):
                F = x.field
                row.append(lp_norm(x.valuation, x.coeffs) if x.coeffs else None)
                abs_prec = x.absolute_precision if abs_prec is None else min(abs_prec, x.absolute_precision)
            elif isinstance(x, (RationalFunction, Polynomial)):
                F = x.field
                f = RationalFunction(x) if isinstance(x, Polynomial) else x
                row.append(("rf", f))
            else:
                raise TypeError("unsupported matrix entry")
        entries.append(row)
    if q is not None:
        F = GF(q)
    rf = any(isinstance(e, tuple) and e and e[0] == "rf" for r in entries for e in r)
    if rf:
        if abs_prec is not None:
            raise TypeError("mixing series and rational entries is not supported")
        return _canonical_rational_rows(F, n1, [[e[1] for e in r] for r in entries])
    det_val = _series_det_val(F, m)
    return canonicalize_rows(F, n1, entries, det_val, abs_prec)


def _series_det_val(F, m):
    """Valuation of det m for a series matrix; raises if not determined."""
    n1 = len(m)
    from itertools import permutations

    total = None
    for perm in permutations(range(n1)):
        term = m[0][perm[0]]
        for i in range(1, n1):
            term = term * m[i][perm[i]]
        sign = _perm_sign(perm)
        if sign < 0:
            term = -term
        total = term if total is None else total + term
    if total.is_zero():
        raise InsufficientPrecision("determinant vanishes to the known precision")
    return total.valuation


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _rf_det(rows):
    n1 = len(rows)
    if n1 == 1:
        return rows[0][0]
    total = None
    for j in range(n1):
        minor = [[r[k] for k in range(n1) if k != j] for r in rows[1:]]
        term = rows[0][j] * _rf_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _canonical_rational_rows(F, n1, rows, extra=8):
    from .field_arith import val_infty

    det = _rf_det(rows)
    if det.is_zero():
        raise ValueError("rows are linearly dependent")
    det_val = val_infty(det)
    vals = [val_infty(x) for r in rows for x in r if not x.is_zero()]
    m_low = min(vals)
    T = det_val // n1 + (det_val - n1 * m_low) + 1 + extra
    gens = []
    for r in rows:
        row = []
        for x in r:
            if x.is_zero():
                row.append(None)
                continue
            s = laurent_expand(x, max(1, T - val_infty(x)))
            row.append(lp_norm(s.valuation, s.coeffs))
        gens.append(row)
    return canonicalize_rows(F, n1, gens, det_val, abs_prec=T)


# ---------------------------------------------------------------------------
# neighbors and simplices


@lru_cache(maxsize=None)
def subspace_chains(q, n1):
    """Strictly increasing chains of proper nonzero subspaces (as index tuples)."""
    F = GF(q)
    subs = subspaces(q, n1)

    def contains(big, small):
        red, _ = gf_rref(F, list(big) + list(small), n1)
        return len(red) == len(big)

    chains = [(i,) for i in range(len(subs))]
    frontier = list(chains)
    while frontier:
        nxt = []
        for ch in frontier:
            last = subs[ch[-1]]
            for j, w in enumerate(subs):
                if len(w) > len(last) and contains(w, last):
                    nxt.append(ch + (j,))
        chains.extend(nxt)
        frontier = nxt
    return tuple(chains)


def neighbor_for_subspace(F, key, w_rows):
    """The vertex [span(W*H, pi*M)] for an F_q-subspace W of M/pi M."""
    n1 = len(key.exps)
    H = key_matrix(key)
    gens = []
    for w in w_rows:
        row = [None] * n1
        for k, c in enumerate(w):
            if c:
                for j in range(n1):
                    if H[k][j] is not None:
                        row[j] = lp_add(F, row[j], (H[k][j][0], tuple(F.mul[c][x] for x in H[k][j][1])))
        gens.append(row)
    for k in range(n1):
        gens.append([None if e is None else (e[0] + 1, e[1]) for e in H[k]])
    det_val = sum(key.exps) + n1 - len(w_rows)
    return canonicalize_rows(F, n1, gens, det_val)


def neighbors_indexed(q, key):
    """Tuple of neighbor keys indexed like field_arith.subspaces(q, n+1)."""
    F = GF(q)
    return tuple(neighbor_for_subspace(F, key, w) for w in subspaces(q, len(key.exps)))


def neighbors(key, q):
    return set(neighbors_indexed(q, key))


def simplex_sort(vertices):
    """Canonical orientation: vertices ordered by type (types are distinct)."""
    return tuple(sorted(vertices, key=vertex_type))


class BallComplex:
    """All simplices whose vertices lie within graph distance `radius` of `center`."""

    def __init__(self, n, q, center, radius, dist, links, simplices):
        self.n, self.q = n, q
        self.center = center
        self.radius = radius
        self.dist = dist
        self.links = links
        self.simplices = simplices  # list by dimension of sorted tuples
        self._cofaces = None

    @property
    def field(self):
        return GF(self.q)

    def counts(self):
        return [len(s) for s in self.simplices]

    def euler_sum(self):
        return sum((-1) ** k * c for k, c in enumerate(self.counts()))

    def vertex_depth(self, simplex):
        return max(self.dist[v] for v in simplex)

    def cofaces(self):
        """Map simplex -> list of simplices of one dimension higher containing it."""
        if self._cofaces is None:
            co = {}
            for dim in range(1, len(self.simplices)):
                for s in self.simplices[dim]:
                    for k in range(len(s)):
                        face = s[:k] + s[k + 1:]
                        co.setdefault(face, []).append(s)
            self._cofaces = co
        return self._cofaces

    def serialize(self):
        lines = [f"ball n={self.n} q={self.q} radius={self.radius} center={key_str(self.center)}"]
        for v in sorted(self.dist):
            lines.append(f"v {key_str(v)} {self.dist[v]}")
        for dim in range(1, len(self.simplices)):
            for s in self.simplices[dim]:
                lines.append("s " + " ".join(key_str(v) for v in s))
        return "\n".join(lines) + "\n"


def ball(center, radius, q, n=None, max_vertices=2_000_000):
    n1 = len(center.exps)
    n = n1 - 1 if n is None else n
    dist = {center: 0}
    links = {}
    order = deque([center])
    while order:
        v = order.popleft()
        d = dist[v]
        if d == radius and n == 1:
            continue  # in a tree, no edge joins two vertices at the same distance
        nb = neighbors_indexed(q, v)
        links[v] = nb
        if d == radius:
            continue
        for w in nb:
            if w not in dist:
                dist[w] = d + 1
                if len(dist) > max_vertices:
                    raise MemoryError(f"vertex budget exceeded at radius {d + 1}")
                order.append(w)
    chains = subspace_chains(q, n1)
    simplices = [set() for _ in range(n1)]
    simplices[0] = {(v,) for v in dist}
    for v, nb in links.items():
        for ch in chains:
            verts = [v] + [nb[i] for i in ch]
            if all(w in dist for w in verts):
                simplices[len(verts) - 1].add(simplex_sort(verts))
    simplices = [sorted(s) for s in simplices]
    while len(simplices) > 1 and not simplices[-1]:
        simplices.pop()
    return BallComplex(n, q, center, radius, dist, links, simplices)


# ---------------------------------------------------------------------------
# group action


def prepare_polynomial(F, g):
    """Laurent form of g^{-1} for a det-1 matrix g over F_q[t]."""
    ginv = mat_inverse(F, g)
    return [[lp_from_tpoly(x) for x in r] for r in ginv]


def act_prepared(F, ginv_lp, key):
    n1 = len(key.exps)
    rows = lp_matmul(F, key_matrix(key), ginv_lp)
    return canonicalize_rows(F, n1, rows, sum(key.exps))


def _is_polynomial_matrix(g):
    return all(isinstance(x, tuple) for r in g for x in r)


def act(g, s, q):
    """Image of a vertex key or simplex (tuple of keys) under g with det 1.

    g may be a matrix over F_q[t] (rows of coefficient tuples, or Polynomial
    entries) or a matrix of RationalFunction entries.
    """
    F = GF(q)
    if not _is_polynomial_matrix(g):
        if all(isinstance(x, Polynomial) for r in g for x in r):
            g = tuple(tuple(x.coeffs for x in r) for r in g)
        else:
            return _act_rational(F, g, s)
    ginv = prepare_polynomial(F, g)
    if isinstance(s, VertexKey):
        return act_prepared(F, ginv, s)
    return simplex_sort(act_prepared(F, ginv, v) for v in s)


def _act_rational(F, g, s):
    rows = [[x if isinstance(x, RationalFunction) else RationalFunction(x) for x in r] for r in g]
    det = _rf_det(rows)
    if det != RationalFunction(Polynomial(F, (1,))):
        raise ValueError("g must have determinant 1")
    n1 = len(rows)
    adj = [[None] * n1 for _ in range(n1)]
    for i in range(n1):
        for j in range(n1):
            minor = [[r[k] for k in range(n1) if k != j] for idx, r in enumerate(rows) if idx != i]
            c = _rf_det(minor) if n1 > 1 else RationalFunction(Polynomial(F, (1,)))
            adj[j][i] = c if (i + j) % 2 == 0 else -c

    def one(key):
        H = key_matrix(key)
        Hrf = [[_lp_to_rf(F, x) for x in r] for r in H]
        prod = [[sum((Hrf[i][k] * adj[k][j] for k in range(n1)), RationalFunction(Polynomial(F, ())))
                 for j in range(n1)] for i in range(n1)]
        return _canonical_rational_rows(F, n1, prod)

    if isinstance(s, VertexKey):
        return one(s)
    return simplex_sort(one(v) for v in s)


def _lp_to_rf(F, a):
    zero = RationalFunction(Polynomial(F, ()))
    if a is None:
        return zero
    v, c = a
    # sum c_k pi^(v+k) = sum c_k t^(-v-k)
    lo = v
    hi = v + len(c) - 1
    if hi <= 0:
        return RationalFunction(Polynomial(F, lp_to_tpoly(a)))
    # multiply by t^hi to clear positive pi powers
    num = [0] * (hi - lo + 1)
    for k, x in enumerate(c):
        num[hi - (v + k)] = x
    den = [0] * hi + [1]
    return RationalFunction(Polynomial(F, num), Polynomial(F, den))


# ---------------------------------------------------------------------------
# the standard apartment


def pairing_chi(v, k):
    """<chi_k, v> for v = sum m_i e_i, i.e. m_k - m_{k-1} with m_{-1} = m_n = 0."""
    n = len(v)
    mk = v[k] if k < n else Fraction(0)
    mprev = v[k - 1] if k >= 1 else Fraction(0)
    return mk - mprev


def pairing(v, i, j):
    """<a_{i,j}, v>."""
    return pairing_chi(v, i) - pairing_chi(v, j)


def apartment_exponents(v):
    n = len(v)
    exps = []
    for i in range(n + 1):
        x = pairing(v, i, n)
        if x.denominator != 1:
            raise NotAVertex(f"pairing <a_{i},{n}, v> = {x} is not an integer")
        exps.append(int(x))
    for i in range(n + 1):
        for j in range(n + 1):
            if pairing(v, i, j).denominator != 1:
                raise NotAVertex(f"pairing <a_{i},{j}, v> is not an integer")
    return tuple(exps)


def apartment_vertex(v):
    return diagonal_key(apartment_exponents(tuple(Fraction(x) for x in v)))


def apartment_point(exps):
    """An apartment point whose vertex has the given diagonal exponents."""
    n1 = len(exps)
    mean = Fraction(sum(exps), n1)
    out, acc = [], Fraction(0)
    for i in range(n1 - 1):
        acc += exps[i] - mean
        out.append(acc)
    return tuple(out)


def translation_vector(valuations):
    """Translation of V_0 induced by diag(t_0..t_n) with the given pi-valuations."""
    out, acc = [], 0
    for w in valuations[:-1]:
        acc += w
        out.append(Fraction(-acc))
    return tuple(out)


def fundamental_chamber(n):
    """Vertices M_k = pi O u_0 + ... + pi O u_{k-1} + O u_k + ... + O u_n, k = 0..n."""
    n1 = n + 1
    return simplex_sort(diagonal_key((1,) * k + (0,) * (n1 - k)) for k in range(n1))


def in_fundamental_sector(v):
    v = tuple(Fraction(x) for x in v)
    n = len(v)
    return all(pairing(v, i, i + 1) >= 0 for i in range(n))


def in_standard_sector_key(key):
    """Vertex lies in the fundamental sector: diagonal with nonincreasing exponents."""
    e = key.exps
    return is_diagonal(key) and all(e[i] >= e[i + 1] for i in range(len(e) - 1))


class Sector:
    """The sector based at a vertex and pointing at the chamber at infinity of a flag.

    A flag matrix has rows f_0..f_n over F_q[t]; the flag is
    span(f_n) < span(f_{n-1}, f_n) < ...  The standard flag is the identity.
    Membership is decided by moving the flag to the standard one with an
    explicit element of SL_{n+1}(F_q[t]) and reading off diagonal coordinates.
    """

    def __init__(self, base, flag, q):
        F = GF(q)
        self.q = q
        self.base = base
        self.flag = tuple(tuple(p_trim(x) for x in r) for r in flag)
        n1 = len(base.exps)
        _, h = column_hermite_to_upper(F, self.flag)
        # gamma = h^{-1} sends the flag to the standard flag
        self.to_standard = mat_inverse(F, h)
        moved = act_prepared(F, prepare_polynomial(F, self.to_standard), base)
        self.apex_exps = moved.exps
        # moved lattice = U^{-1} . M_a with U = diag(pi^-a) H (upper unipotent)
        H = key_matrix(moved)
        U = [[None if H[i][j] is None else (H[i][j][0] - moved.exps[i], H[i][j][1])
              for j in range(n1)] for i in range(n1)]
        Uinv = _unipotent_inverse(F, U)
        # membership: z = (U gamma).y, z = L_y gamma^{-1} U^{-1}
        gamma_inv_lp = [[lp_from_tpoly(x) for x in r] for r in h]
        self._right = lp_matmul(F, gamma_inv_lp, Uinv)
        self._field = F

    def coordinates(self, key):
        """Diagonal exponents of the moved vertex, or None if it is off the apartment."""
        n1 = len(key.exps)
        rows = lp_matmul(self._field, key_matrix(key), self._right)
        z = canonicalize_rows(self._field, n1, rows, sum(key.exps))
        if not is_diagonal(z):
            return None
        return z.exps

    def __contains__(self, key):
        e = self.coordinates(key)
        if e is None:
            return False
        a = self.apex_exps
        d = [x - y for x, y in zip(e, a)]
        return all(d[i] >= d[i + 1] for i in range(len(d) - 1))


def _unipotent_inverse(F, U):
    n1 = len(U)
    inv = [[(0, (1,)) if i == j else None for j in range(n1)] for i in range(n1)]
    # back substitution: inv = I - N + N^2 - ... with N = U - I
    Nmat = [[U[i][j] if i != j else None for j in range(n1)] for i in range(n1)]
    term = [[(0, (1,)) if i == j else None for j in range(n1)] for i in range(n1)]
    for k in range(1, n1):
        term = lp_matmul(F, term, Nmat)
        sgn = term if k % 2 == 0 else [[lp_neg(F, x) for x in r] for r in term]
        inv = [[lp_add(F, inv[i][j], sgn[i][j]) for j in range(n1)] for i in range(n1)]
    return inv


def sector(base, flag, q):
    return Sector(base, flag, q)


def flag_action(F, g, flag):
    """Flag matrix of g applied to the flag with matrix `flag` (rows times g^{-1})."""
    return mat_mul(F, flag, mat_inverse(F, g))
