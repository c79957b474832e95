from itertools import product

import pytest
import sympy

from btcohom.building import act, base_vertex, diagonal_key, fundamental_chamber
from btcohom.field_arith import GF, p_trim
from btcohom.gamma_action import (GroupSpec, QuotientComplex, member, parse_poly, poly_str,
                                  replay_certificate, stabilizer_order)
from btcohom.matrices import elementary, identity, mat_det

from conftest import quotient, window


def brute_force_stabilizer(simplex, spec, max_deg):
    """Count det-1 matrices of degree <= max_deg in Gamma fixing every vertex of the simplex."""
    F = spec.field
    polys = [p_trim(c) for c in product(range(F.q), repeat=max_deg + 1)]
    count = 0
    for entries in product(polys, repeat=4):
        g = ((entries[0], entries[1]), (entries[2], entries[3]))
        if mat_det(F, g) != (1,) or not member(g, spec):
            continue
        if all(act(g, v, F.q) == v for v in simplex):
            count += 1
    return count


def test_member_examples():
    spec = GroupSpec(1, 2, (0, 1))
    assert member(identity(2), spec)
    assert member(elementary(2, 0, 1, (0, 1)), spec)
    assert not member(elementary(2, 0, 1, (1,)), spec)
    assert member(elementary(2, 0, 1, (1,)), GroupSpec(1, 2, None))
    assert not member(((((1,), ()), ((), (1, 1)))), GroupSpec(1, 2, None))


def test_level_parsing():
    assert parse_poly("t^2+t+1", 2) == (1, 1, 1)
    assert parse_poly("2*t+1", 3) == (1, 2)
    assert parse_poly("full", 3) is None
    assert poly_str((1, 0, 1)) == "t^2+1"
    with pytest.raises(ValueError):
        GroupSpec(1, 3, (1, 2))


@pytest.mark.parametrize("level", [None, (0, 1)])
def test_stabilizers_against_brute_force(level):
    spec = GroupSpec(1, 2, level)
    v = [diagonal_key((k, 0)) for k in range(4)]
    cases = [((v[0],), 1), ((v[0], v[1]), 1), ((v[1],), 1), ((v[1], v[2]), 2), ((v[2],), 2), ((v[3],), 3)]
    for s, deg in cases:
        assert stabilizer_order(s, spec) == brute_force_stabilizer(s, spec, deg)


def test_stabilizer_examples():
    full = GroupSpec(1, 2, None)
    assert stabilizer_order((base_vertex(1),), full) == 6
    assert stabilizer_order(fundamental_chamber(1), full) == 2
    for q in (2, 3):
        assert stabilizer_order((base_vertex(1),), GroupSpec(1, q, None)) == q * (q - 1) * (q + 1)


@pytest.mark.parametrize("n,q,level,R", [(1, 2, (0, 1), 6), (1, 3, (0, 1), 5), (1, 2, (0, 0, 1), 6),
                                         (2, 2, (0, 1), 2), (1, 2, (1, 1, 1), 6)])
def test_congruence_stabilizers_are_p_powers(n, q, level, R):
    p = sympy.primefactors(q)[0]
    Q = quotient(n, q, level, R)
    for recs in Q.orbits:
        for r in recs:
            assert set(sympy.primefactors(r.stab)) <= {p}


@pytest.mark.parametrize("n,q,level,R", [(1, 2, None, 2), (1, 2, (0, 1), 2), (1, 3, (0, 1), 2),
                                         (2, 2, None, 2), (2, 2, (0, 1), 2)])
def test_orbit_stabilizer_at_base_vertex(n, q, level, R):
    spec = GroupSpec(n, q, level)
    Q = quotient(n, q, level, R)
    B = window(n, q, R)
    v0 = base_vertex(n)
    base_stab = stabilizer_order((v0,), spec)
    edges_at_v0 = [e for e in B.simplices[1] if v0 in e]
    per_orbit = {}
    for e in edges_at_v0:
        per_orbit[Q.orbit_of[e]] = per_orbit.get(Q.orbit_of[e], 0) + 1
    for k, count in per_orbit.items():
        assert count * Q.orbits[1][k].stab == base_stab


@pytest.mark.parametrize("n,q,level,R,expected", [
    (1, 2, None, 8, [9, 8]),
    (1, 2, (0, 1), 8, [25, 24]),
    (2, 2, None, 3, [10, 18, 9]),
    (2, 2, (0, 1), 2, [50, 133, 84]),
])
def test_quotient_counts(n, q, level, R, expected):
    assert quotient(n, q, level, R).counts() == expected


def test_orbit_sizes_partition_window():
    Q = quotient(2, 2, (0, 1), 2)
    B = window(2, 2, 2)
    assert [sum(r.size for r in recs) for recs in Q.orbits] == B.counts()


@pytest.mark.parametrize("n,q,level,R", [(1, 2, (0, 1), 6), (2, 2, None, 2), (2, 2, (0, 1), 2)])
def test_every_certificate_replays(n, q, level, R):
    Q = quotient(n, q, level, R)
    for s in Q.certificates:
        assert replay_certificate(Q, s)


def test_no_orientation_reversal():
    for args in [(1, 2, (0, 1), 6), (2, 2, None, 3)]:
        Q = quotient(*args)
        assert not any(r.reverses_orientation for recs in Q.orbits for r in recs)


def test_faces_map_into_face_orbits():
    Q = quotient(2, 2, None, 3)
    for dim in range(1, 3):
        for k, rec in enumerate(Q.orbits[dim]):
            for i, (small, sign) in enumerate(Q.faces[dim][k]):
                face = rec.rep[:i] + rec.rep[i + 1:]
                assert Q.orbit_of[face] == small
                assert sign == (-1) ** i


def test_serialization_roundtrip():
    Q = quotient(1, 2, (0, 1), 4)
    text = Q.serialize()
    Q2 = QuotientComplex.parse(text)
    assert Q2.serialize() == text
    assert Q2.counts() == Q.counts()
