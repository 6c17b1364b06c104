# cython: language_level=3
"""Compiled hot kernels; a line-by-line port of ``_pykernels``.

Inverse searches release the GIL so that ghost-sample scans can run on
several threads.
"""
from libc.math cimport log, log1p, exp, expm1, floor, isnan, INFINITY

from array import array

from ._logfact import get_table

cdef double NEG_INF = -INFINITY
cdef double LN2 = 0.6931471805599453
cdef double TIE_EPS = 1e-12
cdef double TAIL_CUTOFF = 1e-17
cdef double HALF_LOG_2PI = 0.9189385332046727

cdef double[::1] _table_view
cdef const double* _lf = NULL
cdef long long _lf_n = 0


cdef int _ensure_table() except -1:
    global _table_view, _lf, _lf_n
    if _lf == NULL:
        _table_view = get_table()
        _lf_n = _table_view.shape[0]
        _lf = &_table_view[0]
    return 0


cdef inline double _stirling(long long n) noexcept nogil:
    cdef double x = n + 1.0
    cdef double inv = 1.0 / x
    cdef double inv2 = inv * inv
    cdef double series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)))
    return (x - 0.5) * log(x) - x + HALF_LOG_2PI + series


cdef inline double _log_factorial(long long n) noexcept nogil:
    if n < _lf_n:
        return _lf[n]
    return _stirling(n)


cdef inline double _log_binom(long long n, long long r) noexcept nogil:
    if r < 0 or r > n:
        return NEG_INF
    if r == 0 or r == n:
        return 0.0
    return _log_factorial(n) - _log_factorial(r) - _log_factorial(n - r)


cdef double _hyp_tail_log(long long k, long long m, long long K, long long M) noexcept nogil:
    cdef long long jlo, mode, jmax, j
    cdef double logmax, t, s, c, tmp, num, den
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
    logmax = _log_binom(K, jmax) + _log_binom(M - K, m - jmax) - _log_binom(M, m)
    t = 1.0
    s = 1.0
    c = 0.0
    j = jmax - 1
    while j >= jlo:
        num = (j + 1.0) * (M - K - m + j + 1.0)
        den = <double>((K - j) * (m - j))
        t = t * num / den
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * <double>(j - jlo) < TAIL_CUTOFF * s:
            break
        j -= 1
    # terms above the mode, when k lies past it
    t = 1.0
    j = jmax + 1
    while j <= k:
        num = <double>((K - j + 1) * (m - j + 1))
        den = <double>j * (M - K - m + j + 0.0)
        t = t * num / den
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * <double>(k - j) < TAIL_CUTOFF * s:
            break
        j += 1
    return logmax + log(s + c)


cdef long long _inv_bisect(long long k, long long m, double log_delta, long long M) noexcept nogil:
    cdef long long lo = k
    cdef long long hi = M - m + k + 1
    cdef long long mid = (lo + hi + 1) // 2
    while hi - lo > 1:
        if _hyp_tail_log(k, m, mid, M) > log_delta + TIE_EPS:
            lo = mid
        else:
            hi = mid
        mid = (lo + hi + 1) // 2
    return hi


cdef inline double _log_add(double a, double b) noexcept nogil:
    cdef double tmp
    if a < b:
        tmp = a
        a = b
        b = tmp
    if b == NEG_INF:
        return a
    return a + log1p(exp(b - a))


cdef long long _inv_linear(long long k, long long m, double log_delta, long long M) noexcept nogil:
    cdef long long K = M - m + k
    cdef double log_total = _log_binom(M, m)
    cdef double log_b = _log_binom(K, k)
    cdef double log_sum = log_b
    cdef double ratio
    while log_sum - log_total <= log_delta + TIE_EPS and K > k:
        ratio = <double>((K - k) * (M - K)) / <double>(K * (M - K - m + k + 1))
        log_b = log_b + log(ratio)
        log_sum = _log_add(log_sum, log_b)
        K -= 1
    return K + 1


cdef long long _lower_inv(long long k, long long m, double log_delta, long long M,
                          double log_complement) noexcept nogil:
    cdef bint use_complement, ok
    cdef long long lo, hi, mid
    if k >= m:
        return M
    use_complement = not isnan(log_complement)
    if not use_complement and log_delta > -LN2:
        log_complement = log(-expm1(log_delta))
        use_complement = True
    lo = k
    hi = M - m + k + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if use_complement:
            ok = _hyp_tail_log(m - k - 1, m, M - mid, M) <= log_complement + TIE_EPS
        else:
            ok = _hyp_tail_log(k, m, mid, M) >= log_delta - TIE_EPS
        if ok:
            lo = mid
        else:
            hi = mid
    return lo


cdef double _bin_tail_log(long long m, long long k, double p) noexcept nogil:
    cdef double log_p, log_q, logmax, odds, t, s, c, tmp
    cdef long long mode, jmax, j
    if k >= m:
        return 0.0
    if k < 0:
        return NEG_INF
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return NEG_INF
    log_p = log(p)
    log_q = log1p(-p)
    mode = <long long>floor((m + 1) * p)
    if mode > m:
        mode = m
    jmax = k if k < mode else mode
    logmax = _log_binom(m, jmax) + jmax * log_p + (m - jmax) * log_q
    odds = (1.0 - p) / p
    t = 1.0
    s = 1.0
    c = 0.0
    j = jmax - 1
    while j >= 0:
        t = t * (j + 1.0) / <double>(m - j) * odds
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * <double>j < TAIL_CUTOFF * s:
            break
        j -= 1
    t = 1.0
    j = jmax + 1
    while j <= k:
        t = t * <double>(m - j + 1) / <double>j / odds
        tmp = s + t
        c += (s - tmp) + t
        s = tmp
        if t * <double>(k - j) < TAIL_CUTOFF * s:
            break
        j += 1
    return logmax + log(s + c)


cdef double _bin_tail_inv(long long m, long long k, double log_delta) noexcept nogil:
    cdef double lo = 0.0
    cdef double hi = 1.0
    cdef double mid
    cdef int i
    if k >= m:
        return 1.0
    for i in range(60):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        if _bin_tail_log(m, k, mid) <= log_delta:
            hi = mid
        else:
            lo = mid
    return hi


# Python-visible wrappers -------------------------------------------------

def log_factorial(long long n):
    _ensure_table()
    return _log_factorial(n)


def log_binom(long long n, long long r):
    _ensure_table()
    return _log_binom(n, r)


def hyp_pmf_log(long long k, long long m, long long K, long long M):
    _ensure_table()
    if k < 0 or k > m or k > K or m - k > M - K:
        return NEG_INF
    return _log_binom(K, k) + _log_binom(M - K, m - k) - _log_binom(M, m)


def hyp_tail_log(long long k, long long m, long long K, long long M):
    _ensure_table()
    return _hyp_tail_log(k, m, K, M)


def hyp_tail_berkopec_log(k, m, K, M):
    # Not on the hot path; shares the Python implementation.
    from ._pykernels import hyp_tail_berkopec_log as impl
    return impl(k, m, K, M)


def hyp_tail_inv_bisect(long long k, long long m, double log_delta, long long M):
    cdef long long r
    _ensure_table()
    with nogil:
        r = _inv_bisect(k, m, log_delta, M)
    return r


def hyp_tail_inv_linear(long long k, long long m, double log_delta, long long M):
    cdef long long r
    _ensure_table()
    with nogil:
        r = _inv_linear(k, m, log_delta, M)
    return r


def hyp_tail_lower_inv(long long k, long long m, double log_delta, long long M,
                       double log_complement):
    cdef long long r
    _ensure_table()
    with nogil:
        r = _lower_inv(k, m, log_delta, M, log_complement)
    return r


def bin_tail_log(long long m, long long k, double p):
    _ensure_table()
    return _bin_tail_log(m, k, p)


def bin_tail_inv(long long m, long long k, double log_delta):
    cdef double r
    _ensure_table()
    with nogil:
        r = _bin_tail_inv(m, k, log_delta)
    return r


def hyp_tail_inv_bisect_many(long long k, long long m, populations, log_deltas):
    """Upper pseudo-inverse for each (M, log_delta) pair; used by m' scans."""
    cdef Py_ssize_t n = len(populations), i
    if len(log_deltas) != n:
        raise ValueError("populations and log_deltas differ in length")
    cdef long long[::1] pops = array("q", populations)
    cdef double[::1] lds = array("d", log_deltas)
    cdef long long[::1] out = array("q", bytes(8 * n))
    _ensure_table()
    with nogil:
        for i in range(n):
            out[i] = _inv_bisect(k, m, lds[i], pops[i])
    return out.base.tolist()
