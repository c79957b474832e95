import random
from itertools import product

import pytest

from btcohom.cusps import (CuspSector, borel_image, borel_image_order, cusp_count, enumerate_cusps,
                           factor_polynomial, locate_cusp, same_flag, sl_order_finite_field,
                           sl_order_mod, stabilization_check, support_locus, truncation_complex)
from btcohom.errors import WindowTooSmall
from btcohom.field_arith import GF, p_mul
from btcohom.gamma_action import GroupSpec, member
from btcohom.harmonic import harmonic_space
from btcohom.matrices import mat_inverse, mat_mul, random_sl

from conftest import projective_class_mod_level, quotient, window


def test_factorization():
    F = GF(2)
    f = p_mul(F, p_mul(F, (0, 1), (0, 1)), (1, 1, 1))
    assert factor_polynomial(F, f) == {(0, 1): 2, (1, 1, 1): 1}
    assert factor_polynomial(GF(3), (1, 0, 1)) == {(1, 0, 1): 1}


def test_finite_group_orders():
    assert sl_order_finite_field(2, 2) == 6
    assert sl_order_finite_field(2, 3) == 24
    assert sl_order_finite_field(3, 2) == 168
    assert sl_order_mod(GroupSpec(1, 2, (0, 0, 1))) == 48
    for spec in [GroupSpec(1, 2, (0, 1)), GroupSpec(1, 2, (0, 0, 1)), GroupSpec(2, 2, (0, 1))]:
        assert len(borel_image(spec)) == borel_image_order(spec)


@pytest.mark.parametrize("n,q,level,expected", [
    (1, 2, None, 1), (1, 2, (0, 1), 3), (1, 3, (0, 1), 4), (2, 2, (0, 1), 21),
    (1, 2, (0, 0, 1), 12), (1, 2, (1, 1, 1), 15)])
def test_cusp_counts(n, q, level, expected):
    spec = GroupSpec(n, q, level)
    assert cusp_count(spec) == expected
    cusps = enumerate_cusps(spec)
    assert len(cusps) == expected
    assert len({c.coset for c in cusps}) == expected
    assert all(member(mat_mul(spec.field, c.element, mat_inverse(spec.field, c.element)), spec)
               for c in cusps)


@pytest.mark.parametrize("q,level", [(2, (0, 1)), (3, (0, 1)), (2, (0, 0, 1)), (2, (1, 1, 1))])
def test_rank_one_cusps_match_projective_line_mod_level(q, level):
    spec = GroupSpec(1, q, level)
    F = spec.field
    cusps = enumerate_cusps(spec)
    rng = random.Random(q * 100 + len(level))
    label = {}
    for _ in range(120):
        g = random_sl(F, 2, rng, steps=5, max_deg=2)
        idx, gamma = locate_cusp(g, cusps, spec)
        assert member(gamma, spec)
        oracle = projective_class_mod_level(F, spec, g[-1])
        assert label.setdefault(oracle, idx) == idx
    # distinct oracle classes never share a cusp
    assert len(set(label.values())) == len(label)
    for c in cusps:
        assert locate_cusp(c.flag, cusps, spec)[0] == c.index


@pytest.mark.parametrize("level", [None, (0, 1)])
def test_locate_cusp_rank_two(level):
    spec = GroupSpec(2, 2, level)
    F = spec.field
    cusps = enumerate_cusps(spec)
    rng = random.Random(5)
    for _ in range(40):
        g = random_sl(F, 3, rng, steps=6, max_deg=1)
        idx, gamma = locate_cusp(g, cusps, spec)
        assert member(gamma, spec)
        assert same_flag(F, mat_mul(F, cusps[idx].flag, mat_inverse(F, gamma)), g)


CASES = [(1, 2, None, 8, lambda l: [l + 1, l]), (1, 2, (0, 1), 8, lambda l: [1 + 3 * l, 3 * l])]


@pytest.mark.parametrize("n,q,level,R,formula", CASES)
def test_truncation_counts(n, q, level, R, formula):
    spec = GroupSpec(n, q, level)
    cusps = enumerate_cusps(spec)
    Q, B = quotient(n, q, level, R), window(n, q, R)
    prev = None
    for l in range(0, R - 2):
        T = truncation_complex(spec, cusps, l, B, Q)
        # full-level D(0) is empty: every chamber is in some S_i^0
        assert T.quotient_counts(Q) == (formula(l) if l else [0, 0])
        chambers_p = {s for s in T.p_simplices if len(s) == n + 1}
        chambers_d = {s for s in T.d_simplices if len(s) == n + 1}
        assert not chambers_p & chambers_d
        assert T.p_simplices | T.d_simplices == {s for dim in B.simplices for s in dim}
        if prev is not None:
            assert prev.d_simplices <= T.d_simplices
            assert T.p_orbits <= prev.p_orbits
            assert all(a >= b for a, b in zip(prev.sectors, T.sectors))
        prev = T
    with pytest.raises(WindowTooSmall):
        truncation_complex(spec, cusps, R - 2, B, Q)


def test_rank_two_truncation():
    spec = GroupSpec(2, 2, None)
    T = truncation_complex(spec, enumerate_cusps(spec), 1, window(2, 2, 4), quotient(2, 2, None, 4))
    assert T.quotient_counts(quotient(2, 2, None, 4)) == [3, 3, 1]


def test_cusp_sector_contains_base_and_is_invariant_under_constant_cusps():
    spec = GroupSpec(1, 3, (0, 1))
    B = window(1, 3, 5)
    for c in enumerate_cusps(spec):
        S = CuspSector(c, spec)
        assert B.simplices[0][0][0] in S or any(v[0] in S for v in B.simplices[0])


def test_stabilization():
    spec = GroupSpec(1, 2, (0, 1))
    res = stabilization_check(spec, 2, [6, 7])
    assert res["stabilized"]
    assert [r["counts"] for r in res["rows"]] == [[7, 6], [7, 6]]


def test_support_locus():
    spec = GroupSpec(1, 2, (0, 0, 1))
    Q, B = quotient(1, 2, (0, 0, 1), 9), window(1, 2, 9)
    cusps = enumerate_cusps(spec)
    Ts = [truncation_complex(spec, cusps, l, B, Q) for l in range(1, 7)]
    assert support_locus([], Ts) == {}
    basis = harmonic_space(1, Q, 6)
    loc = support_locus(basis, Ts)
    assert set(loc) == {1}
    assert loc[1] == 5
    T = next(t for t in Ts if t.level == loc[1])
    earlier = next(t for t in Ts if t.level == loc[1] - 1)
    assert {(1, k) for f in basis for k in f.values} & earlier.p_orbits
    assert not {(1, k) for f in basis for k in f.values} & T.p_orbits
