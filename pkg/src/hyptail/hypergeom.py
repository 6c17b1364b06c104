"""Log-domain hypergeometric and binomial tails and their inversions.

Every probability is carried as its natural logarithm (a "log-prob" in
``[-inf, 0]``, ``-inf`` meaning exactly zero), so thresholds such as
``delta / (4 * growth(m + m'))`` never underflow.

Notation follows the usual hypergeometric experiment: draw ``m`` items
without replacement from a population of ``M`` items of which ``K`` are
successes; ``k`` is the number of successes drawn.
"""
import math
import operator
from dataclasses import dataclass

from ._kernel import impl

__all__ = [
    "HypParams",
    "LogProb",
    "log_binom",
    "hyp_pmf_log",
    "hyp_tail_log",
    "hyp_tail_berkopec_log",
    "hyp_tail_inv_bisect",
    "hyp_tail_inv_linear",
    "hyp_tail_lower_inv",
    "bin_tail_log",
    "bin_tail_inv",
]

#: A probability stored as its natural logarithm.
LogProb = float


@dataclass(frozen=True)
class HypParams:
    """Arguments ``(k, m, K, M)`` of a hypergeometric pmf or tail."""

    k: int
    m: int
    K: int
    M: int

    def __post_init__(self):
        for name in ("k", "m", "K", "M"):
            try:
                value = operator.index(getattr(self, name))
            except TypeError:
                raise TypeError(f"{name} must be an integer, got {getattr(self, name)!r}") from None
            object.__setattr__(self, name, value)
        if not (0 <= self.k <= self.m <= self.M):
            raise ValueError(f"need 0 <= k <= m <= M, got k={self.k}, m={self.m}, M={self.M}")
        if not (0 <= self.K <= self.M):
            raise ValueError(f"need 0 <= K <= M, got K={self.K}, M={self.M}")


def _as_int(name, value):
    try:
        return operator.index(value)
    except TypeError:
        raise TypeError(f"{name} must be an integer, got {value!r}") from None


def _check_log_delta(log_delta):
    log_delta = float(log_delta)
    if not (-math.inf < log_delta < 0.0):
        raise ValueError(f"log_delta must lie in (-inf, 0), got {log_delta}")
    return log_delta


def _check_inverse_args(k, m, log_delta, M, allow_full=False):
    k, m, M = _as_int("k", k), _as_int("m", m), _as_int("M", M)
    if not (0 <= k <= m <= M):
        raise ValueError(f"need 0 <= k <= m <= M, got k={k}, m={m}, M={M}")
    if k == m and not allow_full:
        raise ValueError("the upper pseudo-inverse is undefined for k == m")
    return k, m, _check_log_delta(log_delta), M


def log_binom(n, r):
    """ln C(n, r); ``-inf`` when ``r`` is outside ``[0, n]``."""
    n, r = _as_int("n", n), _as_int("r", r)
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return impl.log_binom(n, r)


def hyp_pmf_log(p):
    """ln of the probability of drawing exactly ``p.k`` successes."""
    return impl.hyp_pmf_log(p.k, p.m, p.K, p.M)


def hyp_tail_log(p):
    """ln Hyp(k, m, K, M), the probability of drawing at most ``k`` successes.

    Terms are scaled by the largest one and accumulated with compensated
    summation, walking down from the mode so the sum can stop as soon as the
    remaining terms are negligible.
    """
    return impl.hyp_tail_log(p.k, p.m, p.K, p.M)


def hyp_tail_berkopec_log(p):
    """Same quantity as :func:`hyp_tail_log`, summed over population counts.

    Uses the identity sum_j C(K,j) C(M-K,m-j) = sum_{J=K}^{M-m+k} C(J,k)
    C(M-J-1,m-k-1). The degenerate cases ``K <= k`` and ``k == m`` (tail one)
    are answered directly.
    """
    return impl.hyp_tail_berkopec_log(p.k, p.m, p.K, p.M)


def hyp_tail_inv_bisect(k, m, log_delta, M):
    """Smallest K with Hyp(k, m, K, M) <= delta, by integer bisection.

    ``K_low = k`` and ``K_high = M - m + k + 1`` bracket the answer; the
    midpoint is rounded up and the loop runs about ``log2(M - m)`` times.
    The result lies in ``(k, M - m + k + 1]``.
    """
    k, m, log_delta, M = _check_inverse_args(k, m, log_delta, M)
    return impl.hyp_tail_inv_bisect(k, m, log_delta, M)


def hyp_tail_inv_linear(k, m, log_delta, M):
    """Same result as :func:`hyp_tail_inv_bisect`, by descending linear search.

    Starts at ``K = M - m + k`` and adds one population-count term per step,
    updating the term by the ratio (K-k)(M-K) / (K(M-K-m+k+1)). Both the
    term and the running sum live in log space. Cost is O(M - m) in the worst
    case, O(1) when delta is tiny.
    """
    k, m, log_delta, M = _check_inverse_args(k, m, log_delta, M)
    return impl.hyp_tail_inv_linear(k, m, log_delta, M)


def hyp_tail_lower_inv(k, m, log_delta, M, *, log_complement=None):
    """Largest K with Hyp(k, m, K, M) >= delta; always defined.

    ``k = 0`` is accepted. For ``k == m`` the tail is one everywhere and the
    answer is ``M``. When delta is close to one, pass ``log_complement =
    ln(1 - delta)`` to avoid losing it to rounding; ``log_delta`` is then only
    used for validation.
    """
    k, m, log_delta, M = _check_inverse_args(k, m, log_delta, M, allow_full=True)
    if log_complement is None:
        log_complement = math.nan
    else:
        log_complement = float(log_complement)
        if not log_complement < 0.0:
            raise ValueError(f"log_complement must be negative, got {log_complement}")
    return impl.hyp_tail_lower_inv(k, m, log_delta, M, log_complement)


def bin_tail_log(m, k, p):
    """ln Bin(m, k, p): probability of at most ``k`` successes in ``m`` trials."""
    m, k = _as_int("m", m), _as_int("k", k)
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return impl.bin_tail_log(m, k, p)


def bin_tail_inv(m, k, log_delta):
    """Smallest p with Bin(m, k, p) <= delta; exactly 1 when ``k == m``.

    Continuous bisection on ``[0, 1]`` stopped at width 1e-13 (at most 60
    halvings); the upper end of the final bracket is returned.
    """
    m, k = _as_int("m", m), _as_int("k", k)
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    return impl.bin_tail_inv(m, k, _check_log_delta(log_delta))
