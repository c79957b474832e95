"""Principal congruence subgroups of SL_{n+1}(F_q[t]) acting on a building window.

Orbits are found by moving every simplex into the fundamental sector, which is
a strict fundamental domain for SL_{n+1}(F_q[t]).  The element doing this is
recorded, so the Gamma(I)-orbit of a simplex x = c.s (s in the sector) is
determined by the coset red(c).H in SL_{n+1}(A/I), where H is the image of the
stabilizer of s.  Every identification comes with an explicit certificate in
Gamma(I) that is replayed on the window.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .building import (VertexKey, act_prepared, canonicalize_rows, diagonal_key, is_diagonal,
                       key_matrix, key_str, lp_add, lp_from_tpoly, lp_matmul, lp_mul, lp_norm,
                       lp_to_tpoly, parse_key, prepare_polynomial, simplex_sort, vertex_type,
                       _unipotent_inverse)
from .errors import CertificationFailure
from .field_arith import (GF, gf_det, gf_inverse, gf_kernel, gf_matmul, gf_rref, p_deg, p_mod,
                          p_neg, p_scale, p_trim, subspaces)
from .matrices import (identity, is_identity, mat_det, mat_inverse, mat_mul, mat_mul_mod,
                       mat_parse, mat_reduce, mat_str, permutation_matrix)


@dataclass(frozen=True)
class GroupSpec:
    """Gamma(I) inside SL_{n+1}(F_q[t]); level None means the full group."""

    n: int
    q: int
    level: tuple | None = None

    def __post_init__(self):
        if self.level is not None:
            lv = p_trim(self.level)
            if not lv or lv[-1] != 1:
                raise ValueError("level generator must be monic")
            if len(lv) == 1:
                object.__setattr__(self, "level", None)  # I = A
            else:
                object.__setattr__(self, "level", lv)

    @property
    def field(self):
        return GF(self.q)

    @property
    def n1(self):
        return self.n + 1

    @property
    def level_degree(self):
        return 0 if self.level is None else len(self.level) - 1

    def describe(self):
        if self.level is None:
            return "full"
        return poly_str(self.level)


def poly_str(c):
    terms = []
    for i, x in enumerate(c):
        if x:
            mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
            terms.append(mono if x == 1 else (f"{x}" if i == 0 else f"{x}*{mono}"))
    return "+".join(reversed(terms)) if terms else "0"


def parse_poly(text, q):
    """Parse 't^2+t+1', '2*t+1', 't' etc. into a coefficient tuple."""
    F = GF(q)
    text = text.replace(" ", "")
    if text in ("full", ""):
        return None
    coeffs = {}
    for term in text.replace("-", "+-").split("+"):
        if not term:
            continue
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        if "t" in term:
            c, _, rest = term.partition("t")
            c = c.rstrip("*")
            coef = int(c) if c else 1
            deg = int(rest[1:]) if rest.startswith("^") else 1
        else:
            coef, deg = int(term), 0
        val = coef % F.p if sign > 0 else (-coef) % F.p
        coeffs[deg] = F.add[coeffs.get(deg, 0)][val]
    top = max(coeffs) if coeffs else 0
    return p_trim(tuple(coeffs.get(i, 0) for i in range(top + 1)))


def member(g, spec):
    F = spec.field
    if mat_det(F, g) != (1,):
        return False
    if spec.level is None:
        return True
    return is_identity(mat_reduce(F, g, spec.level))


# ---------------------------------------------------------------------------
# reduction of a vertex into the fundamental sector


def reduce_vertex(F, key):
    """g in SL_{n+1}(F_q[t]) with g.key diagonal and exponents nonincreasing.

    Reduced-basis algorithm over F_q[t]: the rows r_i = x_i H^{-1} are improved
    until their leading coefficient vectors are independent; then the lattice is
    a direct sum of rank-one pieces along the x_i.
    """
    n1 = len(key.exps)
    H = key_matrix(key)
    U = [[None if H[i][j] is None else (H[i][j][0] - key.exps[i], H[i][j][1]) for j in range(n1)]
         for i in range(n1)]
    Uinv = _unipotent_inverse(F, U)
    R = [[None if Uinv[i][j] is None else (Uinv[i][j][0] - key.exps[j], Uinv[i][j][1])
          for j in range(n1)] for i in range(n1)]
    X = [[(0, (1,)) if i == j else None for j in range(n1)] for i in range(n1)]
    while True:
        c = [min(e[0] for e in r if e is not None) for r in R]
        leads = []
        for i, r in enumerate(R):
            leads.append([e[1][0] if (e is not None and e[0] == c[i]) else 0 for e in r])
        # dependencies: lambda with sum_i lambda_i lead_i = 0
        cols = [[leads[i][j] for i in range(n1)] for j in range(n1)]
        ker = gf_kernel(F, cols, n1)
        if not ker:
            break
        lam = ker[0]
        support = [i for i in range(n1) if lam[i]]
        j = min(support, key=lambda i: (c[i], i))
        new_r = [None] * n1
        new_x = [None] * n1
        for i in support:
            mult = (c[j] - c[i], (lam[i],))  # lambda_i * t^{c_i - c_j}
            for k in range(n1):
                if R[i][k] is not None:
                    new_r[k] = lp_add(F, new_r[k], lp_mul(F, mult, R[i][k]))
                if X[i][k] is not None:
                    new_x[k] = lp_add(F, new_x[k], lp_mul(F, mult, X[i][k]))
        R[j] = new_r
        X[j] = new_x
    exps = [-ci for ci in c]
    order = sorted(range(n1), key=lambda i: (-exps[i], i))
    g = tuple(tuple(lp_to_tpoly(X[i][k]) for k in range(n1)) for i in order)
    d = mat_det(F, g)
    if len(d) != 1:
        raise CertificationFailure("reduced basis is not unimodular")
    if d != (1,):
        s = F.inv[d[0]]
        g = (tuple(p_scale(F, s, x) for x in g[0]),) + g[1:]
    target = diagonal_key(tuple(exps[i] for i in order))
    image = act_prepared(F, prepare_polynomial(F, g), key)
    if image != target:
        raise CertificationFailure(f"vertex reduction failed for {key_str(key)}")
    return g, target


def subspace_in_star(F, center_exps, key):
    """RREF rows of the subspace of M_e / pi M_e cut out by an adjacent vertex."""
    n1 = len(center_exps)
    H = key_matrix(key)
    best = None
    for i in range(n1):
        for j in range(n1):
            e = H[i][j]
            if e is not None:
                v = e[0] - center_exps[j]
                best = v if best is None else min(best, v)
    k = -best
    rows = []
    for i in range(n1):
        row = []
        for j in range(n1):
            e = H[i][j]
            want = center_exps[j] - k  # coefficient of pi^(e_j - k)
            if e is None or want < e[0] or want >= e[0] + len(e[1]):
                row.append(0)
            else:
                row.append(e[1][want - e[0]])
        rows.append(tuple(row))
    red, _ = gf_rref(F, rows, n1)
    return tuple(red)


def _pattern(exps):
    """Equality pattern of consecutive exponents (which parabolic we are in)."""
    return tuple(exps[i] == exps[i + 1] for i in range(len(exps) - 1))


@lru_cache(maxsize=None)
def parabolic_elements(q, pattern):
    """All p in SL_{n+1}(F_q) with p_ij = 0 whenever i is in a later block than j."""
    F = GF(q)
    n1 = len(pattern) + 1
    block = [0] * n1
    for i in range(1, n1):
        block[i] = block[i - 1] + (0 if pattern[i - 1] else 1)
    free = [(i, j) for i in range(n1) for j in range(n1) if block[i] <= block[j]]
    out = []
    for vals in product(range(q), repeat=len(free)):
        m = [[0] * n1 for _ in range(n1)]
        for (i, j), x in zip(free, vals):
            m[i][j] = x
        if gf_det(F, m) == 1:
            out.append(tuple(tuple(r) for r in m))
    return tuple(out)


def _apply_to_subspace(F, rows, p):
    n1 = len(p)
    red, _ = gf_rref(F, gf_matmul(F, rows, p), n1)
    return tuple(red)


@lru_cache(maxsize=None)
def sector_flag_table(q, pattern):
    """Map: flag in the star of a sector vertex -> (p, sector flag) with flag.p = sector flag."""
    F = GF(q)
    n1 = len(pattern) + 1
    # exponents with this pattern, e.g. (2, 1, 1, 0) style; only the pattern matters here
    exps = [0] * n1
    for i in range(n1 - 2, -1, -1):
        exps[i] = exps[i + 1] + (0 if pattern[i] else 1)
    coordinate_sets = []
    for mask in range(1, 2 ** n1 - 1):
        S = [i for i in range(n1) if mask >> i & 1]
        e2 = [exps[i] + (0 if i in S else 1) for i in range(n1)]
        if all(e2[i] >= e2[i + 1] for i in range(n1 - 1)):
            coordinate_sets.append(tuple(S))
    targets = [()]
    frontier = [()]
    while frontier:
        nxt = []
        for ch in frontier:
            for S in coordinate_sets:
                if not ch or (len(S) > len(ch[-1]) and set(ch[-1]) < set(S)):
                    nxt.append(ch + (S,))
        targets.extend(nxt)
        frontier = nxt

    def subspace_of(S):
        return tuple(tuple(1 if k == i else 0 for k in range(n1)) for i in S)

    table = {}
    for T in targets:
        tflag = frozenset(subspace_of(S) for S in T)
        for p in parabolic_elements(q, pattern):
            pinv = gf_inverse(F, p)
            src = frozenset(_apply_to_subspace(F, W, pinv) for W in tflag)
            prev = table.get(src)
            if prev is None:
                table[src] = (p, tflag)
            elif prev[1] != tflag:
                raise CertificationFailure("sector is not a strict fundamental domain at this vertex")
    return table


def _lift_parabolic(F, p, exps):
    """h_ij = p_ij t^(e_i - e_j): an element of SL(A) stabilizing M_e with reduction p."""
    n1 = len(p)
    rows = []
    for i in range(n1):
        row = []
        for j in range(n1):
            x = p[i][j]
            if x == 0:
                row.append(())
            else:
                d = exps[i] - exps[j]
                if d < 0:
                    raise CertificationFailure("parabolic element outside the vertex stabilizer")
                row.append((0,) * d + (x,))
        rows.append(tuple(row))
    return tuple(rows)


class SectorReducer:
    """Moves simplices of a window into the fundamental sector, with caching."""

    def __init__(self, q):
        self.q = q
        self.F = GF(q)
        self._vertex_cache = {}

    def vertex(self, key):
        hit = self._vertex_cache.get(key)
        if hit is None:
            hit = reduce_vertex(self.F, key)
            self._vertex_cache[key] = hit
        return hit

    def simplex(self, simplex):
        """(g, sector simplex) with g in SL_{n+1}(F_q[t]) and g.simplex = sector simplex."""
        F = self.F
        g1, center = self.vertex(simplex[0])
        if len(simplex) == 1:
            return g1, (center,)
        prep = prepare_polynomial(F, g1)
        moved = [act_prepared(F, prep, v) for v in simplex[1:]]
        flag = frozenset(subspace_in_star(F, center.exps, w) for w in moved)
        table = sector_flag_table(self.q, _pattern(center.exps))
        hit = table.get(flag)
        if hit is None:
            raise CertificationFailure("flag not found in sector table")
        p, _ = hit
        pinv = gf_inverse(F, p)
        g2 = _lift_parabolic(F, pinv, center.exps)
        g = mat_mul(F, g2, g1)
        prep = prepare_polynomial(F, g)
        image = simplex_sort(act_prepared(F, prep, v) for v in simplex)
        for v in image:
            e = v.exps
            if not is_diagonal(v) or any(e[i] < e[i + 1] for i in range(len(e) - 1)):
                raise CertificationFailure("simplex reduction left the fundamental sector")
        return g, image


# ---------------------------------------------------------------------------
# stabilizers of sector simplices


def degree_bounds(sector_simplex):
    """m_ij = min over vertices of (e_i - e_j): the stabilizer allows deg h_ij <= m_ij."""
    n1 = len(sector_simplex[0].exps)
    return tuple(tuple(min(v.exps[i] - v.exps[j] for v in sector_simplex) for j in range(n1))
                 for i in range(n1))


def _blocks(m):
    n1 = len(m)
    block = [0] * n1
    for i in range(1, n1):
        block[i] = block[i - 1] if (m[i - 1][i] >= 0 and m[i][i - 1] >= 0) else block[i - 1] + 1
    return block


def gl_order(b, q):
    out = 1
    for k in range(b):
        out *= q ** b - q ** k
    return out


def sector_stabilizer_order(sector_simplex, spec):
    """Order of the stabilizer in Gamma of a simplex of the fundamental sector."""
    q = spec.q
    m = degree_bounds(sector_simplex)
    n1 = len(m)
    block = _blocks(m)
    order = 1
    if spec.level is None:
        sizes = [block.count(b) for b in sorted(set(block))]
        for b in sizes:
            order *= gl_order(b, q)
        order //= (q - 1)
        delta = 0
    else:
        delta = spec.level_degree
    for i in range(n1):
        for j in range(n1):
            if block[i] < block[j]:
                order *= q ** max(0, m[i][j] + 1 - delta)
    return order


def stabilizer_order(simplex, spec, reducer=None):
    """Order of the (orientation preserving = pointwise) stabilizer of a simplex.

    Elements of SL_{n+1} preserve vertex types, so setwise and oriented
    stabilizers coincide with the pointwise one.
    """
    if isinstance(simplex, VertexKey):
        simplex = (simplex,)
    reducer = reducer or SectorReducer(spec.q)
    _, rep = reducer.simplex(simplex_sort(simplex))
    return sector_stabilizer_order(rep, spec)


@lru_cache(maxsize=None)
def reduced_stabilizer(spec, m):
    """Image of the stabilizer (degree bounds m) in SL_{n+1}(A/I), as matrices."""
    F = spec.field
    n1 = len(m)
    delta = spec.level_degree
    block = _blocks(m)
    const_cells = [(i, j) for i in range(n1) for j in range(n1) if block[i] == block[j]]
    poly_cells = [(i, j) for i in range(n1) for j in range(n1) if block[i] < block[j]]
    const_choices = []
    for vals in product(range(spec.q), repeat=len(const_cells)):
        mm = [[0] * n1 for _ in range(n1)]
        for (i, j), x in zip(const_cells, vals):
            mm[i][j] = x
        # determinant of a block diagonal matrix
        if gf_det(F, mm) == 1:
            const_choices.append(vals)
    poly_ranges = []
    for (i, j) in poly_cells:
        d = min(m[i][j], delta - 1)
        poly_ranges.append([p_trim(c) for c in product(range(spec.q), repeat=d + 1)] if d >= 0 else [()])
    out = []
    for vals in const_choices:
        for polys in product(*poly_ranges):
            mm = [[()] * n1 for _ in range(n1)]
            for (i, j), x in zip(const_cells, vals):
                mm[i][j] = p_trim((x,))
            for (i, j), x in zip(poly_cells, polys):
                mm[i][j] = x
            out.append(tuple(tuple(r) for r in mm))
    return tuple(out)


# ---------------------------------------------------------------------------
# the quotient complex


@dataclass
class OrbitRecord:
    rep: tuple
    stab: int
    depth: int
    size: int = 0
    reverses_orientation: bool = False


@dataclass
class QuotientComplex:
    spec: GroupSpec
    radius: int
    orbits: list  # by dimension: list of OrbitRecord
    faces: list  # by dimension: per orbit, list of (face orbit index, sign)
    orbit_of: dict = field(default_factory=dict)  # window simplex -> orbit index
    certificates: dict = field(default_factory=dict)  # window simplex -> gamma, gamma.s = rep
    sector_rep: dict = field(default_factory=dict)  # window simplex -> (g, sector simplex)

    @property
    def n(self):
        return self.spec.n

    def counts(self):
        return [len(o) for o in self.orbits]

    def interior(self, dim, idx):
        return self.orbits[dim][idx].depth <= self.radius - 1

    def cofaces(self, dim):
        """Per dim-orbit: list of (coface orbit, sign, weight #Gamma_s / #Gamma_Sigma)."""
        from fractions import Fraction

        out = [[] for _ in self.orbits[dim]]
        if dim + 1 >= len(self.orbits):
            return out
        for big, flist in enumerate(self.faces[dim + 1]):
            sb = self.orbits[dim + 1][big].stab
            for small, sign in flist:
                ss = self.orbits[dim][small].stab
                out[small].append((big, sign, Fraction(ss, sb)))
        return out

    def orbit_id(self, dim, idx):
        return f"{dim}:{idx}"

    def serialize(self):
        spec = self.spec
        lines = [f"quotient n={spec.n} q={spec.q} level={spec.describe()} radius={self.radius}"]
        for dim, recs in enumerate(self.orbits):
            for idx, r in enumerate(recs):
                lines.append(f"orbit {dim}:{idx} " + " ".join(key_str(v) for v in r.rep))
                lines.append(f"stab {dim}:{idx} {r.stab} depth {r.depth} size {r.size} "
                             f"rev {int(r.reverses_orientation)}")
        for dim in range(1, len(self.faces)):
            for idx, fl in enumerate(self.faces[dim]):
                for small, sign in fl:
                    lines.append(f"face {dim}:{idx} {dim - 1}:{small} {sign:+d}")
        for s in sorted(self.certificates, key=lambda s: (len(s), s)):
            dim, idx = len(s) - 1, self.orbit_of[s]
            lines.append(f"cert {' '.join(key_str(v) for v in s)} -> {dim}:{idx} "
                         f"{mat_str(self.certificates[s])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text):
        lines = text.strip().splitlines()
        head = dict(kv.split("=") for kv in lines[0].split()[1:])
        q = int(head["q"])
        level = None if head["level"] == "full" else parse_poly(head["level"], q)
        spec = GroupSpec(int(head["n"]), q, level)
        orbits, faces = [], []
        orbit_of, certs = {}, {}

        def slot(lst, dim, default):
            while len(lst) <= dim:
                lst.append(default())
            return lst[dim]

        pending = {}
        for line in lines[1:]:
            parts = line.split()
            tag = parts[0]
            if tag == "orbit":
                dim, idx = map(int, parts[1].split(":"))
                pending[(dim, idx)] = tuple(parse_key(k) for k in parts[2:])
            elif tag == "stab":
                dim, idx = map(int, parts[1].split(":"))
                rec = OrbitRecord(pending[(dim, idx)], int(parts[2]), int(parts[4]), int(parts[6]),
                                  bool(int(parts[8])))
                lst = slot(orbits, dim, list)
                assert len(lst) == idx
                lst.append(rec)
            elif tag == "face":
                dim, idx = map(int, parts[1].split(":"))
                _, small = map(int, parts[2].split(":"))
                fl = slot(faces, dim, list)
                while len(fl) <= idx:
                    fl.append([])
                fl[idx].append((small, int(parts[3])))
            elif tag == "cert":
                arrow = parts.index("->")
                s = tuple(parse_key(k) for k in parts[1:arrow])
                _, idx = map(int, parts[arrow + 1].split(":"))
                orbit_of[s] = idx
                certs[s] = mat_parse(parts[arrow + 2])
        while len(faces) < len(orbits):
            faces.append([])
        for dim in range(len(orbits)):
            while len(faces[dim]) < len(orbits[dim]):
                faces[dim].append([])
        return cls(spec, int(head["radius"]), orbits, faces, orbit_of, certs)


def _coset_label(F, spec, c_red, hbar):
    modulus = spec.level
    best = None
    for h in hbar:
        cand = mat_mul_mod(F, c_red, h, modulus)
        if best is None or cand < best:
            best = cand
    return best


def orbit_quotient(ball_complex, spec, reducer=None, with_certificates=True):
    """Partition the window into Gamma-orbits with stabilizer orders and incidences."""
    F = spec.field
    reducer = reducer or SectorReducer(spec.q)
    dist = ball_complex.dist
    groups = []  # per dim: dict label -> list of (simplex, g)
    sector_rep = {}
    for dim, simplices in enumerate(ball_complex.simplices):
        bucket = {}
        for s in simplices:
            g, rep = reducer.simplex(s)
            sector_rep[s] = (g, rep)
            if spec.level is None:
                label = (rep, None)
            else:
                m = degree_bounds(rep)
                hbar = reduced_stabilizer(spec, m)
                c_red = mat_reduce(F, mat_inverse(F, g), spec.level)
                label = (rep, _coset_label(F, spec, c_red, hbar))
            bucket.setdefault(label, []).append(s)
        groups.append(bucket)

    orbits, orbit_of, certs = [], {}, {}
    for dim, bucket in enumerate(groups):
        recs = []
        for label, members in bucket.items():
            rep = min(members)
            depth = min(max(dist[v] for v in s) for s in members)
            stab = sector_stabilizer_order(label[0], spec)
            recs.append((rep, OrbitRecord(rep, stab, depth, len(members)), label, members))
        recs.sort(key=lambda r: r[0])
        dim_orbits = []
        for idx, (rep, rec, label, members) in enumerate(recs):
            dim_orbits.append(rec)
            g_rep = sector_rep[rep][0]
            g_rep_inv = mat_inverse(F, g_rep)
            for s in members:
                orbit_of[s] = idx
                if not with_certificates:
                    continue
                g_s = sector_rep[s][0]
                if spec.level is None:
                    gamma = mat_mul(F, g_rep_inv, g_s)
                else:
                    # red(h) = red(c0)^{-1} red(c) with c = g_s^{-1}, c0 = g_rep^{-1}
                    h = mat_reduce(F, mat_mul(F, g_rep, mat_inverse(F, g_s)), spec.level)
                    gamma = mat_mul(F, mat_mul(F, g_rep_inv, h), g_s)
                    if not member(gamma, spec):
                        raise CertificationFailure(f"certificate outside Gamma for {s}")
                certs[s] = gamma
        orbits.append(dim_orbits)

    faces = [[] for _ in orbits]
    for dim in range(1, len(orbits)):
        for rec in orbits[dim]:
            fl = []
            for i in range(len(rec.rep)):
                face = rec.rep[:i] + rec.rep[i + 1:]
                fl.append((orbit_of[face], -1 if i % 2 else 1))
            faces[dim].append(fl)
    return QuotientComplex(spec, ball_complex.radius, orbits, faces, orbit_of, certs, sector_rep)


def replay_certificate(quotient, simplex):
    """Apply the stored certificate and compare with the orbit representative."""
    spec = quotient.spec
    F = spec.field
    gamma = quotient.certificates[simplex]
    if not member(gamma, spec):
        return False
    image = simplex_sort(act_prepared(F, prepare_polynomial(F, gamma), v) for v in simplex)
    dim = len(simplex) - 1
    return image == quotient.orbits[dim][quotient.orbit_of[simplex]].rep
