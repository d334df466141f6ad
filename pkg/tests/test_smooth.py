import math
import random

import pytest

from progvar import (CapacityError, DomainError, canonical_factorization, dickman,
                     dickman_table, factor, prime_bounds, psi_q, sj_membership,
                     smooth_recip_sum, theta_ladder)


def brute_smooth_coprime(X, Y, q):
    out = []
    for n in range(1, int(X) + 1):
        if math.gcd(n, q) != 1:
            continue
        m, p, ok = n, 2, True
        while p * p <= m:
            while m % p == 0:
                if p > Y:
                    ok = False
                m //= p
            p += 1
        if m > 1 and m > Y:
            ok = False
        if ok:
            out.append(n)
    return out


def test_dickman_values():
    assert dickman(0.5) == 1.0
    assert dickman(0.0) == 1.0
    assert abs(dickman(2.0) - (1 - math.log(2))) < 1e-6
    assert abs(dickman(3.0) - 0.048608) < 1e-4


def test_dickman_halfstep_agreement():
    assert abs(dickman(3.0, step=1e-3) - dickman(3.0, step=5e-4)) < 1e-4


def test_dickman_monotone_positive():
    t = dickman_table(20.0, 1e-3)
    vals = t.values
    assert (vals > 0).all()
    assert (vals[1:] <= vals[:-1] + 1e-15).all()
    assert vals.max() <= 1.0


def test_dickman_capacity():
    with pytest.raises(CapacityError):
        dickman(25.0)
    with pytest.raises(DomainError):
        dickman(-1.0)


def test_psi_examples(table):
    assert psi_q(10, 2, 1, table) == 4  # {1, 2, 4, 8}
    assert psi_q(10, 3, 3, table) == 4  # {1, 2, 4, 8}
    X = 500
    coprime_count = sum(1 for n in range(1, X + 1) if math.gcd(n, 42) == 1)
    assert psi_q(X, X, 42, table) == coprime_count


def test_psi_matches_brute(table):
    rng = random.Random(9)
    for _ in range(15):
        X = rng.randrange(50, 4000)
        Y = rng.choice([2, 3, 10, 50, 400])
        q = rng.choice([1, 2, 6, 30, 77])
        assert psi_q(X, Y, q, table) == len(brute_smooth_coprime(X, Y, q))


def test_psi_monotonicity(table):
    assert psi_q(2000, 10, 1, table) <= psi_q(3000, 10, 1, table)
    assert psi_q(2000, 10, 1, table) <= psi_q(2000, 20, 1, table)
    assert psi_q(2000, 10, 6, table) <= psi_q(2000, 10, 2, table)
    assert psi_q(2000, 10, 30, table) <= psi_q(2000, 10, 6, table)


def test_recip_sum_examples(table):
    assert abs(smooth_recip_sum(1, 10, 2, 1, table) - 0.875) < 1e-15
    assert smooth_recip_sum(1, 10, 2, 2, table) == 0.0
    assert smooth_recip_sum(5, 5, 100, 1, table) == 0.0
    ns = brute_smooth_coprime(300, 7, 5)
    want = math.fsum(1 / n for n in ns if 20 < n <= 300)
    assert abs(smooth_recip_sum(20, 300, 7, 5, table) - want) < 1e-12


def brute_canonical(n, x, table):
    """All admissible splits by exhaustive divisor enumeration."""
    root = math.sqrt(x)
    hits = []
    for d in factor(n, table).divisors():
        m = n // d
        pminus_m = prime_bounds(m, table)[0]
        pplus_d = prime_bounds(d, table)[1]
        if d < root and d * pminus_m >= root and pplus_d <= pminus_m:
            hits.append((d, m))
    return hits


def test_canonical_examples(table):
    assert canonical_factorization(12, 16, table) == (2, 6)
    assert canonical_factorization(4, 16, table) == (2, 2)
    assert canonical_factorization(13, 16, table) == (1, 13)
    with pytest.raises(DomainError):
        canonical_factorization(3, 16, table)
    with pytest.raises(DomainError):
        canonical_factorization(17, 16, table)


def test_canonical_uniqueness_small(table):
    x = 400
    for n in range(20, 401):
        hits = brute_canonical(n, x, table)
        assert len(hits) == 1, (n, hits)
        assert hits[0] == canonical_factorization(n, x, table)


def test_canonical_guarantees(table):
    rng = random.Random(10)
    x = 10_000.0
    for _ in range(300):
        n = rng.randrange(100, 10_001)
        d, m = canonical_factorization(n, x, table)
        assert d * m == n
        root = math.sqrt(x)
        assert d < root
        assert d * prime_bounds(m, table)[0] >= root
        assert prime_bounds(d, table)[1] <= prime_bounds(m, table)[0]


def test_theta_ladder_examples():
    lad = theta_ladder(0.1, 0.1)
    assert lad.thetas[0] == 0.1
    assert abs(lad.thetas[1] - 0.099) < 1e-15
    assert lad.J == 84  # ceil(100 * log log 10)
    assert len(lad.thetas) == lad.J + 2
    assert theta_ladder(0.05, 0.1).H == 12  # floor(10**1.1)
    assert all(a > b for a, b in zip(lad.thetas, lad.thetas[1:]))


def test_theta_ladder_domain():
    with pytest.raises(DomainError):
        theta_ladder(0.1, 0.25)
    with pytest.raises(DomainError):
        theta_ladder(0.2, 0.1)
    with pytest.raises(DomainError):
        theta_ladder(0.0, 0.1)


def brute_membership(n, x, ladder, table):
    d, m = canonical_factorization(n, x, table)
    pm = prime_bounds(m, table)[0]
    pd = prime_bounds(d, table)[1]
    for j in range(ladder.J + 1):
        lo = x ** ladder.thetas[j + 1]
        hi = x ** ladder.thetas[j]
        if lo < pm <= hi:
            if pd <= lo and d > x ** (0.5 - ladder.thetas[j + 1]):
                return j
            return None
    return None


def test_sj_membership_edges(table):
    lad = theta_ladder(0.09, 0.15)
    x = 1_000_000.0
    assert sj_membership(999_983, x, lad, table) is None  # prime forces d = 1
    # P-(m) above x^theta_0: take n a product of two large primes
    n = 991 * 1009
    assert prime_bounds(n, table)[0] > x ** lad.thetas[0]
    assert sj_membership(n, x, lad, table) is None


def test_sj_membership_matches_condition_oracle(table):
    lad = theta_ladder(0.09, 0.15)
    x = 1_000_000.0
    rng = random.Random(11)
    for _ in range(400):
        n = rng.randrange(1000, 1_000_001)
        got = sj_membership(n, x, lad, table)
        want = brute_membership(n, x, lad, table)
        assert got == want, (n, got, want)


def test_sj_membership_positive_case(table):
    # windows above sqrt-complement: at x = 1e6 the only admissible rough
    # parts start at 3 with d a power of two in (x^0.42, x^0.5), i.e. d = 512
    lad = theta_ladder(0.09, 0.15)
    x = 1_000_000.0
    n = 512 * 3 * 5 * 7 * 11
    got = sj_membership(n, x, lad, table)
    assert got is not None
    assert got == brute_membership(n, x, lad, table)
    assert canonical_factorization(n, x, table) == (512, 1155)
