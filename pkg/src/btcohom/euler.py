"""Contractible fundamental patches, identified-simplex counts and Euler characteristics.

A patch D is grown by lifting each chamber orbit of Gamma \\ D(l) exactly once
along a spanning tree of the panel-adjacency graph, then closing under faces.
Contractibility is certified by a sequence of elementary collapses.  g_q counts
the q-simplices of D that some gamma in Gamma maps to a different simplex of D.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .building import act_prepared, base_vertex, prepare_polynomial, simplex_sort
from .errors import CertificationFailure, InstabilityError
from .gamma_action import member
from .matrices import mat_inverse, mat_mul, mat_str


def _faces(s):
    k = len(s)
    return [tuple(s[i] for i in range(k) if mask >> i & 1) for mask in range(1, 2 ** k)]


def closure(simplices):
    out = set()
    for s in simplices:
        out.update(_faces(s))
    return out


def collapse_sequence(simplices):
    """Greedy elementary collapses; returns (pairs (face, coface), remaining simplices)."""
    alive = set(simplices)
    cofaces = {s: set() for s in alive}
    for s in alive:
        if len(s) > 1:
            for i in range(len(s)):
                f = s[:i] + s[i + 1:]
                if f in cofaces:
                    cofaces[f].add(s)
    pairs = []
    changed = True
    while changed:
        changed = False
        for tau in sorted(alive, key=lambda s: (-len(s), s)):
            if tau not in alive:
                continue
            cof = cofaces[tau] & alive
            if len(cof) != 1:
                continue
            (sigma,) = cof
            if len(sigma) != len(tau) + 1 or cofaces[sigma] & alive:
                continue
            alive.discard(tau)
            alive.discard(sigma)
            pairs.append((tau, sigma))
            changed = True
    return pairs, alive


def replay_collapses(simplices, pairs):
    """Check a recorded collapse sequence from scratch; True iff it ends at one vertex."""
    alive = set(simplices)
    for tau, sigma in pairs:
        if tau not in alive or sigma not in alive or len(sigma) != len(tau) + 1:
            return False
        if not set(tau) <= set(sigma):
            return False
        others = [s for s in alive if s != tau and len(s) > len(tau) and set(tau) <= set(s)]
        if others != [sigma]:
            return False
        alive -= {tau, sigma}
    return len(alive) == 1 and len(next(iter(alive))) == 1


def alternating_count(simplices):
    return sum((-1) ** (len(s) - 1) for s in simplices)


@dataclass
class FundamentalPatch:
    level: int
    simplices: set
    chambers: list
    collapses: list
    attempts: int
    identified: dict = field(default_factory=dict)  # q -> list of (simplex, partner, gamma)

    def counts(self, n):
        out = [0] * (n + 1)
        for s in self.simplices:
            out[len(s) - 1] += 1
        return out

    def g(self, n):
        return [len({s for s, _, _ in self.identified.get(q, [])}) for q in range(n + 1)]

    def serialize(self, q):
        lines = [f"patch {self.level} {len(self.simplices)}"]
        from .building import key_str

        def fmt(s):
            return "/".join(key_str(v) for v in s)

        for s in sorted(self.simplices, key=lambda s: (len(s), s)):
            lines.append(f"simplex {fmt(s)}")
        for tau, sigma in self.collapses:
            lines.append(f"collapse {fmt(tau)} {fmt(sigma)}")
        for dim in sorted(self.identified):
            for s, t, gamma in self.identified[dim]:
                lines.append(f"ident {dim} {fmt(s)} {fmt(t)} {mat_str(gamma)}")
        return "\n".join(lines) + "\n"


def _panel_index(ball_complex):
    n = ball_complex.n
    idx = {}
    for c in ball_complex.simplices[n]:
        for i in range(len(c)):
            idx.setdefault(c[:i] + c[i + 1:], []).append(c)
    return idx


def choose_patch(quotient, truncation, ball_complex, supports=(), seed=0, attempts=25):
    """Certified contractible lift D with Gamma.D covering D(l) and the given support orbits.

    When Gamma \\ D(l) is disconnected, chambers of other interior orbits are lifted too,
    as connectors along the spanning tree; unneeded leaves are pruned.

    supports: iterable of (dim, orbit index) pairs that must be represented in D.
    """
    n = ball_complex.n
    Q = quotient
    need = {(d, k) for d, k in truncation.d_orbits if Q.interior(d, k)}
    need |= set(supports)
    chamber_need = sorted(k for d, k in need if d == n)
    v0 = base_vertex(n)
    if not chamber_need:
        lower = {x for x in need if x[0] > 0}
        if lower:
            raise CertificationFailure(f"D(l) has lower simplices {sorted(lower)[:3]} but no chambers")
        patch = {(v0,)}
        return FundamentalPatch(truncation.level, patch, [], [], 0)
    panels = _panel_index(ball_complex)
    members = {}
    for c in ball_complex.simplices[n]:
        members.setdefault(Q.orbit_of[c], []).append(c)
    allowed = {k for k in range(len(Q.orbits[n])) if Q.interior(n, k)}
    needed_set = set(chamber_need)
    failures = []
    for attempt in range(attempts):
        rng = random.Random(seed * 1000 + attempt)
        start_orbit = min(chamber_need, key=lambda k: (Q.orbits[n][k].depth, k))
        start = Q.orbits[n][start_orbit].rep
        if attempt:
            start = rng.choice(members[start_orbit])
        lifted = {start_orbit: start}
        parent = {start: None}
        frontier = [start]
        while frontier and not needed_set <= lifted.keys():
            c = frontier.pop(0) if attempt == 0 else frontier.pop(rng.randrange(len(frontier)))
            nbrs = []
            for i in range(len(c)):
                for c2 in panels.get(c[:i] + c[i + 1:], []):
                    k2 = Q.orbit_of[c2]
                    if c2 != c and k2 in allowed and k2 not in lifted:
                        nbrs.append((c2, k2))
            if attempt:
                rng.shuffle(nbrs)
            for c2, k2 in nbrs:
                if k2 in lifted:
                    continue
                lifted[k2] = c2
                parent[c2] = c
                frontier.append(c2)
        if not needed_set <= lifted.keys():
            failures.append(f"attempt {attempt}: reached {len(needed_set & lifted.keys())} "
                            f"of {len(needed_set)} chamber orbits")
            continue
        # prune connecting chambers that are leaves of the lift tree and not needed
        children = {c: 0 for c in parent}
        for c, p in parent.items():
            if p is not None:
                children[p] += 1
        keep = set(parent)
        stack = [c for c in keep if children[c] == 0]
        while stack:
            c = stack.pop()
            if Q.orbit_of[c] in needed_set or parent[c] is None:
                continue
            keep.discard(c)
            p = parent[c]
            children[p] -= 1
            if children[p] == 0:
                stack.append(p)
        order = sorted(keep)
        D = closure(order)
        covered = {(len(s) - 1, Q.orbit_of[s]) for s in D}
        missing = need - covered
        if missing:
            failures.append(f"attempt {attempt}: orbits {sorted(missing)[:4]} not covered")
            continue
        pairs, rest = collapse_sequence(D)
        if len(rest) == 1 and len(next(iter(rest))) == 1:
            return FundamentalPatch(truncation.level, D, order, pairs, attempt + 1)
        failures.append(f"attempt {attempt}: collapse stalled with {len(rest)} simplices left")
    raise CertificationFailure("no collapsible lift found: " + "; ".join(failures[:5]))


def identified_counts(patch, quotient):
    """Fill patch.identified and return g_0..g_n, each pair certified by direct action."""
    Q = quotient
    spec = Q.spec
    F = spec.field
    n = spec.n
    groups = {}
    for s in patch.simplices:
        groups.setdefault((len(s) - 1, Q.orbit_of[s]), []).append(s)
    ident = {}
    for (dim, _), sims in sorted(groups.items()):
        if len(sims) < 2:
            continue
        sims.sort()
        for s in sims:
            for t in sims:
                if t == s:
                    continue
                gamma = mat_mul(F, mat_inverse(F, Q.certificates[t]), Q.certificates[s])
                image = simplex_sort(act_prepared(F, prepare_polynomial(F, gamma), v) for v in s)
                if not member(gamma, spec) or image != t or image == s:
                    raise CertificationFailure(f"identification of {s} with {t} failed to replay")
                ident.setdefault(dim, []).append((s, t, gamma))
                break
    patch.identified = ident
    return patch.g(n)


def euler_characteristic(g):
    """1 + sum_q (-1)^{q+1} g_q."""
    return 1 + sum((-1) ** (q + 1) * x for q, x in enumerate(g))


def euler_from_cohomology(report):
    if not report.stable:
        raise InstabilityError("Euler characteristic requested from an unstable cohomology report")
    return sum((-1) ** q * report.degrees[q]["cohomology"] for q in sorted(report.degrees))
