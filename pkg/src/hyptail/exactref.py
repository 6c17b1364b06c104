"""Exact rational reference values for small hypergeometric problems.

Used as an independent oracle by the test-suite; everything here is exact
big-integer / :class:`fractions.Fraction` arithmetic and deliberately slow.
"""
from fractions import Fraction
from functools import lru_cache
from math import comb

#: Largest population size the oracle accepts by default.
DEFAULT_MAX_POPULATION = 256


def _check_population(M, max_population):
    if M > max_population:
        raise ValueError(f"population M={M} exceeds the exact-oracle cap {max_population}")


@lru_cache(maxsize=None)
def exact_binom(n, r):
    """C(n, r) as an exact integer, 0 outside ``0 <= r <= n``."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if r < 0 or r > n:
        return 0
    return comb(n, r)


def _binom_ext(n, r):
    # C(N, -n) = 0 for n > 0, C(N, 0) = 1 for any N.
    if r < 0:
        return 0
    if r == 0:
        return 1
    if n < r:
        return 0
    return comb(n, r)


def exact_hyp_pmf(k, m, K, M, max_population=DEFAULT_MAX_POPULATION):
    _check_population(M, max_population)
    return Fraction(exact_binom(K, k) * exact_binom(M - K, m - k), exact_binom(M, m))


def exact_hyp_tail(k, m, K, M, max_population=DEFAULT_MAX_POPULATION):
    """Exact Hyp(k, m, K, M) = sum_{j<=k} C(K,j) C(M-K,m-j) / C(M,m)."""
    _check_population(M, max_population)
    if not (0 <= k <= m <= M and 0 <= K <= M):
        raise ValueError(f"invalid hypergeometric parameters {(k, m, K, M)}")
    num = sum(exact_binom(K, j) * exact_binom(M - K, m - j) for j in range(k + 1))
    return Fraction(num, exact_binom(M, m))


def exact_hyp_tail_berkopec(k, m, K, M, max_population=DEFAULT_MAX_POPULATION):
    """Exact tail through the sum over population counts J = K .. M-m+k."""
    _check_population(M, max_population)
    if not (0 <= k <= min(m, K) and max(m, K) <= M):
        raise ValueError(f"identity needs 0 <= k <= min(m,K) <= max(m,K) <= M, got {(k, m, K, M)}")
    num = sum(_binom_ext(J, k) * _binom_ext(M - J - 1, m - k - 1) for J in range(K, M - m + k + 1))
    return Fraction(num, exact_binom(M, m))


def exact_hyp_tail_inv(k, m, delta, M, max_population=DEFAULT_MAX_POPULATION):
    """Smallest K in (k, M-m+k+1] with exact tail <= delta, by linear scan."""
    delta = Fraction(delta)
    if not (0 <= k < m <= M):
        raise ValueError(f"need 0 <= k < m <= M, got {(k, m, M)}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    for K in range(k + 1, M - m + k + 2):
        if exact_hyp_tail(k, m, K, M, max_population) <= delta:
            return K
    raise AssertionError("unreachable: the tail vanishes for K > M - m + k")


def exact_hyp_tail_lower_inv(k, m, delta, M, max_population=DEFAULT_MAX_POPULATION):
    """Largest K with exact tail >= delta, by linear scan."""
    delta = Fraction(delta)
    if not (0 <= k <= m <= M):
        raise ValueError(f"need 0 <= k <= m <= M, got {(k, m, M)}")
    best = 0
    for K in range(M + 1):
        if exact_hyp_tail(k, m, K, M, max_population) >= delta:
            best = K
    return best
