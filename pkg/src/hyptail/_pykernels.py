"""Pure-Python hot kernels.

This module mirrors ``_ckernels.pyx`` operation by operation, so that both
backends return bit-identical floats on the same platform. Inputs are assumed
validated by :mod:`hyptail.hypergeom`.
"""
import math

from ._logfact import get_table, stirling_log_factorial

NEG_INF = -math.inf
LN2 = math.log(2.0)
# Slack for comparing a log-tail against a log-threshold; absorbs exact ties
# (e.g. a tail equal to 1/2 against delta = 0.5) that rounding would break.
TIE_EPS = 1e-12
# Relative size below which remaining tail terms are dropped.
TAIL_CUTOFF = 1e-17


def log_factorial(n):
    table = get_table()
    if n < len(table):
        return table[n]
    return stirling_log_factorial(n)


def log_binom(n, r):
    if r < 0 or r > n:
        return NEG_INF
    if r == 0 or r == n:
        return 0.0
    return log_factorial(n) - log_factorial(r) - log_factorial(n - r)


def hyp_pmf_log(k, m, K, M):
    if k < 0 or k > m or k > K or m - k > M - K:
        return NEG_INF
    return log_binom(K, k) + log_binom(M - K, m - k) - log_binom(M, m)


def hyp_tail_log(k, m, K, M):
    if k >= m or k >= K:
        return 0.0
    if k < 0 or K > M - m + k:
        return NEG_INF
    jlo = m - (M - K)
    if jlo < 0:
        jlo = 0
    mode = ((m + 1) * (K + 1)) // (M + 2)
    jmax = k if k < mode else mode
    if jmax < jlo:
        jmax = jlo
    logmax = log_binom(K, jmax) + log_binom(M - K, m - jmax) - log_binom(M, m)
    t = 1.0
    s = 1.0
    c = 0.0
    j = jmax - 1
    while j >= jlo:
        num = (j + 1.0) * (M - K - m + j + 1.0)
        den = float((K - j) * (m - j))
        t = t * num / den
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * (j - jlo) < TAIL_CUTOFF * s:
            break
        j -= 1
    # terms above the mode, when k lies past it
    t = 1.0
    j = jmax + 1
    while j <= k:
        num = float((K - j + 1) * (m - j + 1))
        den = j * (M - K - m + j + 0.0)
        t = t * num / den
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * (k - j) < TAIL_CUTOFF * s:
            break
        j += 1
    return logmax + math.log(s + c)


def _log_sum_exp(values):
    top = max(values)
    if top == NEG_INF:
        return NEG_INF
    s = 0.0
    c = 0.0
    for v in values:
        t = math.exp(v - top)
        tmp = s + t
        if abs(s) >= abs(t):
            c += (s - tmp) + t
        else:
            c += (t - tmp) + s
        s = tmp
    return top + math.log(s + c)


def hyp_tail_berkopec_log(k, m, K, M):
    if k >= m or k >= K:
        return 0.0
    if k < 0 or K > M - m + k:
        return NEG_INF
    log_total = log_binom(M, m)
    terms = [
        log_binom(J, k) + log_binom(M - J - 1, m - k - 1) - log_total
        for J in range(K, M - m + k + 1)
    ]
    return _log_sum_exp(terms)


def hyp_tail_inv_bisect(k, m, log_delta, M):
    lo = k
    hi = M - m + k + 1
    mid = (lo + hi + 1) // 2
    while hi - lo > 1:
        if hyp_tail_log(k, m, mid, M) > log_delta + TIE_EPS:
            lo = mid
        else:
            hi = mid
        mid = (lo + hi + 1) // 2
    return hi


def _log_add(a, b):
    if a < b:
        a, b = b, a
    if b == NEG_INF:
        return a
    return a + math.log1p(math.exp(b - a))


def hyp_tail_inv_linear(k, m, log_delta, M):
    K = M - m + k
    log_total = log_binom(M, m)
    log_b = log_binom(K, k)
    log_sum = log_b
    while log_sum - log_total <= log_delta + TIE_EPS and K > k:
        ratio = float((K - k) * (M - K)) / float(K * (M - K - m + k + 1))
        log_b = log_b + math.log(ratio)
        log_sum = _log_add(log_sum, log_b)
        K -= 1
    return K + 1


def hyp_tail_lower_inv(k, m, log_delta, M, log_complement):
    """Largest K with Hyp(k, m, K, M) >= delta.

    ``log_complement`` is ln(1 - delta) or NaN. When available (or when delta
    exceeds 1/2) the test runs on the complementary tail, which keeps full
    precision for delta = 1 - tiny.
    """
    if k >= m:
        return M
    use_complement = not math.isnan(log_complement)
    if not use_complement and log_delta > -LN2:
        log_complement = math.log(-math.expm1(log_delta))
        use_complement = True
    lo = k
    hi = M - m + k + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if use_complement:
            ok = hyp_tail_log(m - k - 1, m, M - mid, M) <= log_complement + TIE_EPS
        else:
            ok = hyp_tail_log(k, m, mid, M) >= log_delta - TIE_EPS
        if ok:
            lo = mid
        else:
            hi = mid
    return lo


def bin_tail_log(m, k, p):
    if k >= m:
        return 0.0
    if k < 0:
        return NEG_INF
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return NEG_INF
    log_p = math.log(p)
    log_q = math.log1p(-p)
    mode = int(math.floor((m + 1) * p))
    if mode > m:
        mode = m
    jmax = k if k < mode else mode
    logmax = log_binom(m, jmax) + jmax * log_p + (m - jmax) * log_q
    odds = (1.0 - p) / p
    t = 1.0
    s = 1.0
    c = 0.0
    j = jmax - 1
    while j >= 0:
        t = t * (j + 1.0) / float(m - j) * odds
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * j < TAIL_CUTOFF * s:
            break
        j -= 1
    t = 1.0
    j = jmax + 1
    while j <= k:
        t = t * float(m - j + 1) / j / odds
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * (k - j) < TAIL_CUTOFF * s:
            break
        j += 1
    return logmax + math.log(s + c)


def bin_tail_inv(m, k, log_delta):
    if k >= m:
        return 1.0
    lo = 0.0
    hi = 1.0
    for _ in range(60):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        if bin_tail_log(m, k, mid) <= log_delta:
            hi = mid
        else:
            lo = mid
    return hi


def hyp_tail_inv_bisect_many(k, m, populations, log_deltas):
    """Upper pseudo-inverse for each (M, log_delta) pair; used by m' scans."""
    return [hyp_tail_inv_bisect(k, m, ld, M) for M, ld in zip(populations, log_deltas)]
