import pytest

from btcohom.building import base_vertex
from btcohom.cusps import enumerate_cusps, truncation_complex
from btcohom.errors import InstabilityError
from btcohom.euler import (alternating_count, choose_patch, closure, collapse_sequence,
                           euler_characteristic, euler_from_cohomology, identified_counts,
                           replay_collapses)
from btcohom.gamma_action import GroupSpec
from btcohom.harmonic import cohomology_report

from conftest import quotient, window


def patch_for(n, q, level, R, l):
    spec = GroupSpec(n, q, level)
    Q, B = quotient(n, q, level, R), window(n, q, R)
    T = truncation_complex(spec, enumerate_cusps(spec), l, B, Q)
    return Q, T, choose_patch(Q, T, B)


def test_collapse_helpers():
    tri = closure([(0, 1, 2)])
    pairs, rest = collapse_sequence(tri)
    assert len(rest) == 1 and replay_collapses(tri, pairs)
    assert alternating_count(tri) == 1
    circle = closure([(0, 1), (1, 2), (0, 2)])
    pairs, rest = collapse_sequence(circle)
    assert len(rest) > 1
    assert alternating_count(circle) == 0
    assert not replay_collapses(circle, pairs)
    # a tampered sequence is rejected
    assert not replay_collapses(tri, [((0,), (0, 1))])


@pytest.mark.parametrize("n,q,level,R,l", [
    (1, 2, None, 8, 2), (1, 2, (0, 1), 8, 1), (1, 2, (0, 1), 8, 3), (2, 2, None, 4, 1)])
def test_patch_is_collapsible_and_covers_truncation(n, q, level, R, l):
    Q, T, P = patch_for(n, q, level, R, l)
    assert replay_collapses(P.simplices, P.collapses)
    assert alternating_count(P.simplices) == 1
    covered = {(len(s) - 1, Q.orbit_of[s]) for s in P.simplices}
    assert {x for x in T.d_orbits if Q.interior(*x)} <= covered
    g = identified_counts(P, Q)
    assert g == [0] * (n + 1)
    assert euler_characteristic(g) == 1


def test_empty_truncation_gives_base_vertex():
    _, _, P = patch_for(1, 2, None, 8, 0)
    assert P.simplices == {(base_vertex(1),)}


def test_degree_two_level_identifies_vertices():
    Q, _, P = patch_for(1, 2, (0, 0, 1), 9, 2)
    g = identified_counts(P, Q)
    assert g[0] >= 2 and g[0] % 2 == 0
    for s, t, gamma in P.identified[0]:
        assert Q.orbit_of[s] == Q.orbit_of[t] and s != t
    assert "ident 0" in P.serialize(2)


def test_redundant_patch_counts_both_copies():
    Q, T, P = patch_for(1, 2, (0, 1), 8, 2)
    # add a second lift of one chamber orbit, attached along a shared vertex
    k = Q.orbit_of[P.chambers[0]]
    extra = next(c for c in window(1, 2, 8).simplices[1]
                 if Q.orbit_of[c] == k and c not in P.simplices and set(c) & {v for s in P.simplices for v in s})
    P.simplices |= closure([extra])
    g = identified_counts(P, Q)
    assert g[1] == 2


def test_euler_formula():
    assert euler_characteristic([0, 0]) == 1
    assert euler_characteristic([2, 0]) == -1
    assert euler_characteristic([4, 2, 0]) == -1


def test_cohomological_euler_refuses_unstable_report():
    Q = quotient(1, 2, (0, 0, 1), 9)
    with pytest.raises(InstabilityError):
        euler_from_cohomology(cohomology_report(Q, 3))
    assert euler_from_cohomology(cohomology_report(Q, 6)) == -5
