"""Cusps of Gamma(I), sector neighborhoods S_i^l, and the truncations P(l), D(l).

Cusps are the double cosets Gamma \\ SL_{n+1}(K) / P(K).  SL_{n+1}(F_q[t]) is
transitive on rational flags, so for Gamma = Gamma(I) they are the cosets
SL_{n+1}(A/I) / red P(A), and the flag c.(standard flag) belongs to the cusp
of red(c).red P(A).

Sector depth: S_i^l is the closure of the chambers of the cusp's sector (based
at the fundamental vertex) all of whose vertices are at graph distance >= l
from that vertex.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .building import (Sector, act_prepared, base_vertex, in_standard_sector_key,
                       prepare_polynomial)
from .errors import CertificationFailure, WindowTooSmall
from .field_arith import gf_det, monic_irreducibles, p_divmod, p_trim
from .gamma_action import member
from .matrices import (column_hermite_to_upper, elementary, identity, mat_adjugate, mat_inverse,
                       mat_mul, mat_mul_mod, mat_reduce, max_degree)


# ---------------------------------------------------------------------------
# counting


def factor_polynomial(F, f):
    """Monic irreducible factorization {factor: multiplicity} by trial division."""
    f = p_trim(f)
    out = {}
    deg = 1
    while len(f) > 1:
        if 2 * deg > len(f) - 1:
            out[f] = out.get(f, 0) + 1
            break
        for pr in monic_irreducibles(F, deg):
            while True:
                quo, rem = p_divmod(F, f, pr)
                if rem:
                    break
                out[pr] = out.get(pr, 0) + 1
                f = quo
        deg += 1
    return out


def sl_order_finite_field(m, Q):
    out = Q ** (m * (m - 1) // 2)
    for i in range(2, m + 1):
        out *= Q ** i - 1
    return out


def sl_order_mod(spec):
    """|SL_{n+1}(A/I)| from the factorization of I."""
    n1, q = spec.n1, spec.q
    if spec.level is None:
        return 1
    total = 1
    for pr, k in factor_polynomial(spec.field, spec.level).items():
        d = len(pr) - 1
        total *= sl_order_finite_field(n1, q ** d) * q ** (d * (k - 1) * (n1 * n1 - 1))
    return total


def borel_image_order(spec):
    if spec.level is None:
        return 1
    n1 = spec.n1
    return (spec.q - 1) ** spec.n * spec.q ** (spec.level_degree * n1 * (n1 - 1) // 2)


def cusp_count(spec):
    return sl_order_mod(spec) // borel_image_order(spec)


# ---------------------------------------------------------------------------
# representatives


def borel_image(spec):
    """red P(A): upper triangular over A/I with F_q^* diagonal and det 1."""
    F = spec.field
    n1, delta = spec.n1, spec.level_degree
    upper_cells = [(i, j) for i in range(n1) for j in range(i + 1, n1)]
    polys = [p_trim(c) for c in product(range(spec.q), repeat=delta)]
    out = []
    for diag in product(range(1, spec.q), repeat=n1):
        prod_ = 1
        for x in diag:
            prod_ = F.mul[prod_][x]
        if prod_ != 1:
            continue
        for ups in product(polys, repeat=len(upper_cells)):
            m = [[()] * n1 for _ in range(n1)]
            for i, x in enumerate(diag):
                m[i][i] = (x,)
            for (i, j), x in zip(upper_cells, ups):
                m[i][j] = x
            out.append(tuple(tuple(r) for r in m))
    return out


def _coset_key(F, spec, c_red, borel):
    return min(mat_mul_mod(F, c_red, b, spec.level) for b in borel)


@dataclass
class CuspClass:
    index: int
    element: tuple  # c in SL_{n+1}(A); the cusp is the class of c.(standard flag)
    flag: tuple  # rows of c^{-1}: the flag is span(last row) < span(last two rows) < ...
    coset: tuple | None = None

    def is_constant(self):
        return max_degree(self.element) <= 0

    def point(self):
        """For n = 1: the point of P^1(K) spanned by the last flag row."""
        return self.flag[-1]


def _constant_sl(F, n1):
    for vals in product(range(F.q), repeat=n1 * n1):
        m = [vals[i * n1:(i + 1) * n1] for i in range(n1)]
        if gf_det(F, m) == 1:
            yield tuple(tuple(p_trim((x,)) for x in r) for r in m)


def enumerate_cusps(spec):
    """Complete duplicate-free list of cusp representatives, constant ones first."""
    F = spec.field
    n1 = spec.n1
    target = cusp_count(spec)
    if spec.level is None:
        g = identity(n1)
        return [CuspClass(0, g, g, None)]
    borel = borel_image(spec)
    seen = {}
    reps = []

    def consider(c):
        key = _coset_key(F, spec, mat_reduce(F, c, spec.level), borel)
        if key not in seen:
            seen[key] = len(reps)
            reps.append(CuspClass(len(reps), c, mat_inverse(F, c), key))

    for c in _constant_sl(F, n1):
        consider(c)
        if len(reps) == target:
            return reps
    # breadth-first over the finite group SL_{n+1}(A/I), keeping one lift per element
    gens = [elementary(n1, i, j, (0,) * k + (a,))
            for k in range(spec.level_degree) for i in range(n1) for j in range(n1) if i != j
            for a in range(1, spec.q)]
    start = identity(n1)
    frontier = deque([start])
    visited = {mat_reduce(F, start, spec.level)}
    while frontier and len(reps) < target:
        c = frontier.popleft()
        for g in gens:
            nc = mat_mul(F, c, g)
            red = mat_reduce(F, nc, spec.level)
            if red in visited:
                continue
            visited.add(red)
            consider(nc)
            frontier.append(nc)
            if len(reps) == target:
                break
    if len(reps) != target:
        raise CertificationFailure(f"found {len(reps)} of {target} cusps")
    return reps


def same_flag(F, f1, f2):
    """f1 and f2 define the same flag iff f1 f2^{-1} is upper triangular."""
    m = mat_mul(F, f1, mat_adjugate(F, f2))
    n1 = len(m)
    return all(not m[i][j] for i in range(n1) for j in range(i))


def locate_cusp(flag_matrix, cusps, spec):
    """(cusp index, gamma in Gamma) with gamma applied to the cusp's flag giving flag_matrix."""
    F = spec.field
    _, h = column_hermite_to_upper(F, flag_matrix)
    # flag(flag_matrix) = h.(standard flag)
    if spec.level is None:
        gamma = mat_mul(F, h, mat_inverse(F, cusps[0].element))
        idx = 0
    else:
        borel = borel_image(spec)
        h_red = mat_reduce(F, h, spec.level)
        key = _coset_key(F, spec, h_red, borel)
        idx = next((c.index for c in cusps if c.coset == key), None)
        if idx is None:
            raise CertificationFailure("flag does not match any stored cusp")
        c = cusps[idx].element
        # red(p) = red(c)^{-1} red(h) lies in red P(A); its entrywise lift is in P(A)
        p = mat_reduce(F, mat_mul(F, mat_inverse(F, c), h), spec.level)
        n1 = spec.n1
        if any(p[i][j] for i in range(n1) for j in range(i)):
            raise CertificationFailure("coset match did not produce a triangular element")
        gamma = mat_mul(F, mat_mul(F, h, mat_inverse(F, p)), mat_inverse(F, c))
    if not member(gamma, spec):
        raise CertificationFailure("cusp certificate is not in Gamma")
    image_flag = mat_mul(F, cusps[idx].flag, mat_inverse(F, gamma))
    if not same_flag(F, image_flag, flag_matrix):
        raise CertificationFailure("cusp certificate does not move the flag")
    return idx, gamma


# ---------------------------------------------------------------------------
# sectors, truncations


class CuspSector:
    """Membership in the sector at the fundamental vertex pointing to a cusp."""

    def __init__(self, cusp, spec):
        self.cusp = cusp
        F = spec.field
        self.F = F
        base = base_vertex(spec.n)
        if cusp.is_constant():
            self._prep = prepare_polynomial(F, mat_inverse(F, cusp.element))
            self._general = None
        else:
            self._prep = None
            self._general = Sector(base, cusp.flag, spec.q)
        self._cache = {}

    def __contains__(self, key):
        hit = self._cache.get(key)
        if hit is None:
            if self._general is None:
                hit = in_standard_sector_key(act_prepared(self.F, self._prep, key))
            else:
                hit = key in self._general
            self._cache[key] = hit
        return hit


def sector_truncation(cusp_sector, l, ball_complex):
    """Window simplices of S^l: closure of sector chambers with every vertex at distance >= l."""
    n = ball_complex.n
    dist = ball_complex.dist
    chambers = [c for c in ball_complex.simplices[n]
                if all(dist[v] >= l for v in c) and all(v in cusp_sector for v in c)]
    out = set()
    for c in chambers:
        out.update(_faces(c))
    return out


def _faces(s):
    k = len(s)
    out = []
    for mask in range(1, 2 ** k):
        out.append(tuple(s[i] for i in range(k) if mask >> i & 1))
    return out


@dataclass
class TruncationComplex:
    level: int
    sectors: list  # per cusp: set of window simplices of S_i^l
    p_orbits: set  # (dim, orbit) pairs meeting some S_i^l
    p_simplices: set
    d_simplices: set
    d_orbits: set = field(default_factory=set)

    def quotient_counts(self, quotient, interior_only=True):
        """Number of Gamma-orbits of D(l) per dimension (interior orbits of the window)."""
        top = len(quotient.orbits)
        counts = [0] * top
        for dim, idx in self.d_orbits:
            if not interior_only or quotient.interior(dim, idx):
                counts[dim] += 1
        return counts


def truncation_complex(spec, cusps, l, ball_complex, quotient):
    if ball_complex.radius <= l + 2:
        raise WindowTooSmall(f"truncation level {l} needs window radius > {l + 2}")
    sectors = []
    p_orbits = set()
    for cusp in cusps:
        cs = CuspSector(cusp, spec)
        S = sector_truncation(cs, l, ball_complex)
        sectors.append(S)
        for s in S:
            p_orbits.add((len(s) - 1, quotient.orbit_of[s]))
    p_simplices = set()
    rest = []
    for dim, simplices in enumerate(ball_complex.simplices):
        for s in simplices:
            if (dim, quotient.orbit_of[s]) in p_orbits:
                p_simplices.add(s)
            else:
                rest.append(s)
    d_simplices = set()
    for s in rest:
        d_simplices.update(_faces(s))
    d_orbits = {(len(s) - 1, quotient.orbit_of[s]) for s in d_simplices}
    return TruncationComplex(l, sectors, p_orbits, p_simplices, d_simplices, d_orbits)


def stabilization_check(spec, l, radii, cusps=None):
    """Gamma \\ D(l) counts per dimension at each window radius."""
    from .building import ball
    from .gamma_action import orbit_quotient

    cusps = cusps or enumerate_cusps(spec)
    rows = []
    for R in radii:
        B = ball(base_vertex(spec.n), R, spec.q)
        Q = orbit_quotient(B, spec, with_certificates=False)
        T = truncation_complex(spec, cusps, l, B, Q)
        rows.append({"radius": R, "counts": T.quotient_counts(Q)})
    stable = len(rows) >= 2 and rows[-1]["counts"] == rows[-2]["counts"]
    return {"level": l, "rows": rows, "stabilized": stable}


def support_locus(basis, truncations):
    """Least l (among the given truncations, sorted by l) with no support orbit in P(l)."""
    out = {}
    by_degree = {}
    for f in basis:
        by_degree.setdefault(f.degree, set()).update((f.degree, k) for k in f.values)
    for q, supp in by_degree.items():
        found = None
        for T in sorted(truncations, key=lambda t: t.level):
            if not (supp & T.p_orbits):
                found = T.level
                break
        out[q] = found
    return out
