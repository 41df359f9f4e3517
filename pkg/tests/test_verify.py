import itertools

import numpy as np
import pytest

from algcapset.trivec import CapSet, decode, encode
from algcapset.verify import (BudgetError, NotACapsetError, brute_is_capset, coverage_map, greedy_complete,
                              is_capset, is_complete, lower_bound_check, uncovered)


def zero_sum(*encs, n):
    return all(sum(t) % 3 == 0 for t in zip(*(decode(int(e), n) for e in encs)))


def random_set(rng, n, size):
    return CapSet(n, rng.choice(3**n, size=min(size, 3**n), replace=False))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_pair_scan_matches_triple_oracle(n):
    rng = np.random.default_rng(n)
    for _ in range(60):
        S = random_set(rng, n, int(rng.integers(0, 3 * n + 4)))
        rep = is_capset(S)
        assert rep.verdict == brute_is_capset(S)
        if not rep.verdict:
            a, b, c = rep.witness
            assert a < b < c and all(x in S.points for x in (a, b, c))
            assert zero_sum(a, b, c, n=n)


def test_witness_is_lexicographically_smallest():
    n = 3
    rng = np.random.default_rng(7)
    for _ in range(100):
        S = random_set(rng, n, 8)
        rep = is_capset(S)
        triples = [t for t in itertools.combinations(S.points.tolist(), 3) if zero_sum(*t, n=n)]
        assert rep.witness == (min(triples) if triples else None)


def test_small_examples():
    assert is_capset(CapSet(2, [])).verdict
    assert is_capset(CapSet.from_tuples([(0, 0)])).verdict
    line = CapSet.from_tuples([(0, 0), (1, 1), (2, 2)])
    rep = is_capset(line)
    assert not rep.verdict and rep.witness == (0, 4, 8)
    assert rep.to_json()["witness"] == ["00", "11", "22"]
    assert rep.to_json()["format"] == 1


def test_complete_examples():
    # {0, 1} is a complete capset of F_3: 2 = -(0 + 1)
    rep = is_complete(CapSet(1, [0, 1]))
    assert rep.verdict and rep.coverage_size == 3
    rep = is_complete(CapSet(1, [0]))
    assert not rep.verdict and rep.witness == (1,)
    assert rep.extra["uncovered_count"] == 2
    with pytest.raises(NotACapsetError):
        is_complete(CapSet(1, [0, 1, 2]))
    with pytest.raises(BudgetError):
        is_complete(CapSet(10, [0]), budget_bits=100)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_completeness_spot_checks(n):
    # a random capset grown greedily; every outside point must extend it to a non-capset
    rng = np.random.default_rng(10 + n)
    S = greedy_complete(CapSet(n, []), pool=rng.permutation(3**n))
    assert is_complete(S).verdict
    outside = np.setdiff1d(np.arange(3**n), S.points)
    for p in rng.choice(outside, size=min(100, outside.size), replace=False):
        assert not is_capset(S.with_points([p])).verdict


def test_uncovered_points_really_extend():
    rng = np.random.default_rng(4)
    n = 4
    S = CapSet(n, [])
    for p in rng.permutation(3**n):
        T = S.with_points([p])
        if is_capset(T).verdict:
            S = T
        if len(S) == 6:
            break
    cov = coverage_map(S, threads=1)
    assert np.array_equal(cov, coverage_map(S, threads=3))
    for p in uncovered(S)[:50]:
        assert is_capset(S.with_points([p])).verdict


def test_lower_bound():
    assert lower_bound_check(2, 1)  # 3 >= 3
    assert not lower_bound_check(1, 1)
    assert lower_bound_check(4, 2) and not lower_bound_check(3, 2)
    N = 3038
    assert lower_bound_check(N, 13)
    with pytest.raises(ValueError):
        lower_bound_check(-1, 2)


def test_greedy_complete_from_empty():
    S = greedy_complete(CapSet(2, []))
    # ascending greedy over F_3^2: 0, 1, 3, 4
    assert S.points.tolist() == [0, 1, 3, 4]
    assert is_complete(S).verdict


def test_greedy_respects_pool():
    S = greedy_complete(CapSet(2, [0]), pool=[8, 4, 4])
    # the pool is taken in ascending order: 4 = (1,1) goes in, then 8 = -(0 + 4) is blocked
    assert S.points.tolist() == [0, 4]


def test_greedy_rejects_non_capset():
    with pytest.raises(NotACapsetError):
        greedy_complete(CapSet(1, [0, 1, 2]))
