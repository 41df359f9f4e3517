import numpy as np
import pytest

from algcapset.construct import (complete_capset, conic, elliptic_quadric, nonsquare_patch, patch_parameters,
                                 two_parabolas)
from algcapset.field import FieldError, field
from algcapset.trivec import CapSet, flatten
from algcapset.verify import brute_is_capset, is_capset, is_complete, lower_bound_check, uncovered


# F_9 as Z_3[i], i^2 = -1: an arithmetic independent of the library tables
def g_mul(a, b):
    (a0, a1), (b0, b1) = a, b
    return ((a0 * b0 - a1 * b1) % 3, (a0 * b1 + a1 * b0) % 3)


def g_enc(a):
    return a[0] + 3 * a[1]


def test_two_parabolas_m1_example():
    S = two_parabolas(1)
    assert S == CapSet.from_tuples([(1, 1), (2, 1), (1, 2), (2, 2)])
    assert is_complete(S).verdict


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_two_parabolas_points_satisfy_equations(m):
    F = field(m)
    S = two_parabolas(m)
    assert len(S) == 2 * (F.q - 1)
    x = S.points % F.q
    y = S.points // F.q
    assert np.all(x != 0)
    x2 = F.square_arr(x)
    assert np.all((y == x2) | (y == F.neg_arr(x2)))


def test_two_parabolas_small_sets_against_triple_oracle():
    for m in (1, 2):
        assert brute_is_capset(two_parabolas(m))


def test_completion_argument_replayed():
    # every outside (a, b) with a != 0 is the third point of a pair in the two parabolas:
    # x1 = (a^2 - b)/a on y = x^2, x2 = -(a + x1) on y = -x^2
    for m in (1, 2, 3, 4):
        F = field(m)
        S = two_parabolas(m)
        for a in range(1, F.q):
            for b in range(F.q):
                if flatten([a, b], m) in S.points:
                    continue
                x1 = F.div(F.sub(F.mul(a, a), b), a)
                x2 = F.neg(F.add(a, x1))
                if x1 == 0 or x2 == 0:
                    continue
                P = (x1, F.mul(x1, x1))
                Q = (x2, F.neg(F.mul(x2, x2)))
                assert F.add(F.add(P[0], Q[0]), a) == 0
                assert F.add(F.add(P[1], Q[1]), b) == 0
                assert flatten(P, m) in S.points and flatten(Q, m) in S.points


@pytest.mark.parametrize("m", [2, 4])
def test_even_m_holes_are_nonsquare_column(m):
    F = field(m)
    missing = uncovered(two_parabolas(m))
    nonsq = [b for b in range(1, F.q) if F.chi(b) == -1]
    assert missing.tolist() == sorted(flatten([0, b], m) for b in nonsq)


def test_nonsquare_patch_f9_by_hand():
    # lambda = 1 + t, d = 2, sqrt(d) = t; lambda (1 + t)^2 = (1 + t) 2t = 1 + 2t, lambda (1 + 2t)^2 = (1 + t) t = 2 + t
    assert patch_parameters(2) == {"lambda": 4, "d": 2, "d_subfield": 2}
    lam, root = (1, 1), (0, 1)
    got = set()
    for x in (1, 2):
        base = ((1 + x * root[0]) % 3, (x * root[1]) % 3)
        got.add(g_enc(g_mul(lam, g_mul(base, base))))
    assert got == {5, 7}
    assert nonsquare_patch(2).tolist() == [5, 7]


@pytest.mark.parametrize("m", [2, 4, 6])
def test_nonsquare_patch_properties(m):
    F = field(m)
    P = nonsquare_patch(m)
    assert P.size == 3 ** (m // 2) - 1
    assert np.all(F.chi_arr(P) == -1)
    # as points (0, b) no three distinct sum to zero
    S = CapSet(2 * m, P * F.q)
    assert is_capset(S).verdict
    assert is_capset(two_parabolas(m).union(S)).verdict


def test_nonsquare_patch_odd_m():
    with pytest.raises(FieldError):
        nonsquare_patch(3)


@pytest.mark.parametrize("n", range(0, 11))
def test_complete_capset(n):
    S = complete_capset(n)
    assert S.meta["verified"] is True
    assert isinstance(S.meta["fallback_used"], bool)
    if n == 0:
        assert len(S) == 1
        return
    assert is_capset(S).verdict
    assert is_complete(S).verdict
    assert lower_bound_check(len(S), n)
    assert len(S) ** 2 <= 9 * 3**n


def test_complete_capset_sizes_and_fallback_flags():
    sizes = {n: len(complete_capset(n)) for n in range(1, 8)}
    assert sizes == {1: 2, 2: 4, 3: 8, 4: 20, 5: 40, 6: 52, 7: 104}
    assert complete_capset(4).meta["fallback_used"] is True
    assert complete_capset(5).meta["fallback_used"] is True  # inherited from n = 4
    assert complete_capset(6).meta["fallback_used"] is False


def test_complete_capset_uncertified_skips_checks():
    S = complete_capset(6, certified=False)
    assert S.meta["verified"] is False


@pytest.mark.parametrize("m", [1, 2, 3])
def test_elliptic_quadric(m):
    Q = elliptic_quadric(m)
    assert len(Q) == 9**m
    assert is_capset(Q).verdict
    assert is_complete(Q).verdict
    assert field(m).chi(Q.meta["lambda"]) == -1


def test_quadric_m1_by_definition():
    pts = {(x, y, (x * x - 2 * y * y) % 3) for x in range(3) for y in range(3)}
    assert elliptic_quadric(1) == CapSet.from_tuples(pts)


def _fq_lines_through(F, P):
    """Point sets of the F_q-lines through P in the affine plane, as (x, y) pairs."""
    dirs = [(0, 1)] + [(1, s) for s in range(F.q)]
    for dx, dy in dirs:
        yield {(F.add(P[0], F.mul(t, dx)), F.add(P[1], F.mul(t, dy))) for t in range(F.q)}


def test_conic_is_complete_cap_but_not_complete_capset():
    F = field(2)
    C = {(x, F.mul(x, x)) for x in range(F.q)}
    # no three points of the parabola on an F_9-line
    for P in C:
        for line in _fq_lines_through(F, P):
            assert len(line & C) <= 2
    # every other point of the plane lies on an F_9-secant
    for a in range(F.q):
        for b in range(F.q):
            if (a, b) in C:
                continue
            assert any(len(line & C) == 2 for line in _fq_lines_through(F, (a, b)))
    S = conic(2)
    assert len(S) == 9
    assert is_capset(S).verdict
    assert not is_complete(S).verdict
