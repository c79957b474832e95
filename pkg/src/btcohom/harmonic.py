"""Harmonic cocycles and compact-support cohomology on a quotient window.

For a support radius r, the support region in degree q is the set of q-orbits
of depth <= r (depth = smallest distance from the base vertex at which a
member of the orbit lies entirely inside the ball).

  Z_r  = finitely supported cocycles on the region
  B_r  = coboundaries d g lying in the region, where g ranges over cochains on
         interior (q-1)-orbits; components on boundary-incomplete orbits are
         ignored, which lets g extend past the window (e.g. constant along a cusp)
  H_r  = region cochains with d f = 0 and delta f = 0

dim Z_r - dim B_r is the cohomology dimension, dim H_r the harmonic one.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cochain import Cochain, d, d_matrix, delta, delta_matrix, from_vector, pairing, weights
from .errors import InstabilityError, WindowTooSmall
from .exact_linalg import (SparseRationalMatrix, kernel_basis, rank, solve, span_contains,
                           weighted_inner)


def _region(Q, q, r):
    return [k for k, rec in enumerate(Q.orbits[q]) if rec.depth <= r and not rec.reverses_orientation]


def _check_window(Q, r):
    if r + 2 > Q.radius:
        raise WindowTooSmall(f"support radius {r} needs a window of radius >= {r + 2}, have {Q.radius}")


def _stack(*mats):
    cols = mats[0].cols
    entries, off = {}, 0
    for m in mats:
        for (i, j), v in m.entries.items():
            entries[(i + off, j)] = v
        off += m.rows
    return SparseRationalMatrix(off, cols, entries)


def harmonic_space(q, Q, r):
    """Basis (as Cochains) of the harmonic q-cochains supported in the radius-r region."""
    _check_window(Q, r)
    region = _region(Q, q, r)
    mats = []
    if q + 1 < len(Q.orbits):
        mats.append(d_matrix(Q, q, col_indices=region))
    if q > 0:
        mats.append(delta_matrix(Q, q, col_indices=region))
    if not mats:
        return [from_vector(q, Q, [Fraction(1) if i == j else Fraction(0) for i in range(len(region))], region)
                for j in range(len(region))]
    ker = kernel_basis(_stack(*mats))
    return [from_vector(q, Q, v, region) for v in ker]


def cocycle_space(q, Q, r):
    region = _region(Q, q, r)
    if q + 1 < len(Q.orbits):
        ker = kernel_basis(d_matrix(Q, q, col_indices=region))
    else:
        ker = [[Fraction(int(i == j)) for i in range(len(region))] for j in range(len(region))]
    return region, ker


def coboundary_space(q, Q, r):
    """Basis (vectors over the region) of B_r."""
    region = _region(Q, q, r)
    if q == 0 or not region:
        return region, []
    sources = [k for k, rec in enumerate(Q.orbits[q - 1]) if rec.depth <= Q.radius - 1]
    outside = [k for k, rec in enumerate(Q.orbits[q]) if r < rec.depth <= Q.radius - 1]
    if outside:
        K = kernel_basis(d_matrix(Q, q - 1, row_indices=outside, col_indices=sources))
    else:
        K = [[Fraction(int(i == j)) for i in range(len(sources))] for j in range(len(sources))]
    Dreg = d_matrix(Q, q - 1, row_indices=region, col_indices=sources)
    images = [Dreg.apply(v) for v in K]
    # independent subset
    basis, rows = [], []
    for v in images:
        row = {i: x for i, x in enumerate(v) if x}
        if not row:
            continue
        if rank(rows + [row]) > len(rows):
            rows.append(row)
            basis.append(v)
    return region, basis


def compact_support_cohomology(q, Q, r):
    """(dimension, representative cocycle basis) of the degree-q cohomology on the region."""
    _check_window(Q, r)
    region, Z = cocycle_space(q, Q, r)
    _, B = coboundary_space(q, Q, r)
    reps, rows = [], [{i: x for i, x in enumerate(b) if x} for b in B]
    for z in Z:
        row = {i: x for i, x in enumerate(z) if x}
        if rank(rows + [row]) > len(rows):
            rows.append(row)
            reps.append(from_vector(q, Q, z, region))
    dim = len(Z) - len(B)
    assert dim == len(reps)
    return dim, reps


@dataclass
class DecompositionWitness:
    dim_cocycles: int
    dim_harmonic: int
    dim_coboundary: int
    max_abs_pairing: Fraction
    sample_checked: bool
    ok: bool


def verify_decomposition(q, Q, r, seed=0, samples=3):
    """Check Z = H + B with (h, b) = 0 for all basis pairs and exact recombination."""
    _check_window(Q, r)
    region, Z = cocycle_space(q, Q, r)
    Hc = harmonic_space(q, Q, r)
    Hv = [h.to_vector(region) for h in Hc]
    _, B = coboundary_space(q, Q, r)
    w = weights(Q, q, region)
    worst = Fraction(0)
    for h in Hv:
        for b in B:
            worst = max(worst, abs(weighted_inner(h, b, w)))
    ok = len(Z) == len(Hv) + len(B) and worst == 0
    ok = ok and span_contains(Z, Hv + B, len(region))
    rng = random.Random(seed)
    sample_ok = True
    basis = Hv + B
    if basis and Z:
        M = SparseRationalMatrix.from_dense([list(col) for col in zip(*basis)])
        for _ in range(samples):
            coeffs = [Fraction(rng.randint(-4, 4)) for _ in Z]
            z = [sum((c * v[i] for c, v in zip(coeffs, Z)), Fraction(0)) for i in range(len(region))]
            x = solve(M, z)
            if x is None:
                sample_ok = False
                continue
            hpart = [sum((x[j] * Hv[j][i] for j in range(len(Hv))), Fraction(0)) for i in range(len(region))]
            bpart = [sum((x[len(Hv) + j] * B[j][i] for j in range(len(B))), Fraction(0))
                     for i in range(len(region))]
            if [a + b for a, b in zip(hpart, bpart)] != z:
                sample_ok = False
    ok = ok and sample_ok
    return ok, DecompositionWitness(len(Z), len(Hv), len(B), worst, sample_ok, ok)


@dataclass
class CohomologyReport:
    window_radius: int
    support_radius: int
    degrees: dict = field(default_factory=dict)  # q -> dict of dims
    harmonic_basis: dict = field(default_factory=dict)  # q -> list of Cochains
    stable: bool = True

    def dims(self, key):
        return [self.degrees[q][key] for q in sorted(self.degrees)]

    def to_json(self):
        out = {"window_radius": self.window_radius, "support_radius": self.support_radius,
               "stable": self.stable, "degrees": {}}
        for q in sorted(self.degrees):
            entry = dict(self.degrees[q])
            entry["harmonic_basis"] = [
                {f"{q}:{k}": f"{v.numerator}/{v.denominator}" for k, v in sorted(c.values.items())}
                for c in self.harmonic_basis.get(q, [])]
            out["degrees"][str(q)] = entry
        return out


def cohomology_report(Q, r, check_stability=True):
    """Dimensions in every degree at support radius r.

    Stability compares r with every larger support radius the window allows, up to r + 2;
    two agreeing radii can still sit on a plateau before the finite part is exhausted.
    """
    _check_window(Q, r)
    rep = CohomologyReport(Q.radius, r)
    radii = list(range(r, min(r + 2, Q.radius - 2) + 1)) if check_stability else [r]
    for q in range(len(Q.orbits)):
        rows = []
        for rr in radii:
            region, Z = cocycle_space(q, Q, rr)
            _, B = coboundary_space(q, Q, rr)
            Hc = harmonic_space(q, Q, rr)
            rows.append({"cocycles": len(Z), "coboundaries": len(B), "harmonic": len(Hc),
                         "cohomology": len(Z) - len(B), "region_size": len(region)})
            if rr == r:
                rep.harmonic_basis[q] = Hc
        entry = dict(rows[0])
        entry["stable"] = all(x["harmonic"] == rows[0]["harmonic"] and
                              x["cohomology"] == rows[0]["cohomology"] for x in rows)
        if len(radii) == 1:
            entry["stable"] = None
        rep.degrees[q] = entry
        if entry["stable"] is False:
            rep.stable = False
    return rep


def require_stable(report):
    if not report.stable:
        raise InstabilityError("cohomology dimensions changed between support radii")
    return report


def is_harmonic(f):
    """Exact check d f = 0 and delta f = 0."""
    return d(f).is_zero() and delta(f).is_zero()
