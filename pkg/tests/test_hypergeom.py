import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyptail import _pykernels, exactref
from hyptail.hypergeom import (
    HypParams,
    bin_tail_inv,
    bin_tail_log,
    hyp_pmf_log,
    hyp_tail_berkopec_log,
    hyp_tail_inv_bisect,
    hyp_tail_inv_linear,
    hyp_tail_log,
    hyp_tail_lower_inv,
    log_binom,
)

from conftest import DELTAS, all_params, exact_delta

try:
    from hyptail import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


def tail(k, m, K, M):
    return hyp_tail_log(HypParams(k, m, K, M))


# --- worked examples ------------------------------------------------------------

def test_log_binom_examples():
    assert log_binom(4, 2) == pytest.approx(math.log(6), rel=1e-15)
    assert log_binom(10, 0) == 0.0
    assert log_binom(5, -1) == -math.inf
    assert log_binom(5, 6) == -math.inf
    exact = math.log(exactref.exact_binom(2000, 50))
    assert log_binom(2000, 50) == pytest.approx(exact, rel=1e-12)


def test_log_factorial_past_table_cap():
    from hyptail._logfact import stirling_log_factorial

    for n in ((1 << 20) + 1, (1 << 20) + 12345, 10**8, 10**12):
        assert stirling_log_factorial(n) == pytest.approx(math.lgamma(n + 1), rel=1e-13)
    # log_binom is a difference of large log-factorials: a few ulps of ln n! absolute
    n = (1 << 20) + 12345
    exact = math.log(exactref.exact_binom(n, 7))
    assert abs(log_binom(n, 7) - exact) <= 4 * math.ulp(math.lgamma(n + 1))


def test_pmf_examples():
    assert hyp_pmf_log(HypParams(1, 2, 2, 4)) == pytest.approx(math.log(2 / 3), abs=1e-15)
    assert hyp_pmf_log(HypParams(0, 3, 0, 5)) == 0.0
    assert hyp_pmf_log(HypParams(2, 2, 1, 5)) == -math.inf


def test_params_reject_bad_input():
    with pytest.raises(ValueError):
        HypParams(3, 2, 3, 5)
    with pytest.raises(ValueError):
        HypParams(0, 2, 6, 5)
    with pytest.raises(TypeError):
        HypParams(0.0, 2, 1, 5)


def test_tail_examples():
    assert tail(1, 2, 2, 4) == pytest.approx(math.log(5 / 6), abs=1e-15)
    assert tail(2, 5, 2, 9) == 0.0
    assert tail(1, 3, 3, 3) == -math.inf
    assert tail(4, 4, 1, 9) == 0.0


def test_berkopec_examples():
    assert hyp_tail_berkopec_log(HypParams(1, 2, 2, 4)) == pytest.approx(math.log(5 / 6), abs=1e-15)
    assert hyp_tail_berkopec_log(HypParams(0, 7, 0, 12)) == 0.0


def test_inverse_examples():
    ld = math.log(0.2)
    assert hyp_tail_inv_bisect(0, 2, ld, 4) == 2
    assert hyp_tail_inv_linear(0, 2, ld, 4) == 2
    assert hyp_tail_inv_bisect(0, 2, math.log(0.999), 4) == 1
    assert hyp_tail_inv_linear(0, 2, math.log(0.999), 4) == 1
    ld = math.log(0.05)
    assert hyp_tail_inv_linear(3, 20, ld, 40) == hyp_tail_inv_bisect(3, 20, ld, 40)


def test_inverse_rejects_full_error_count():
    with pytest.raises(ValueError):
        hyp_tail_inv_bisect(2, 2, math.log(0.5), 4)
    with pytest.raises(ValueError):
        hyp_tail_inv_linear(2, 2, math.log(0.5), 4)
    with pytest.raises(ValueError):
        hyp_tail_inv_bisect(0, 2, 0.0, 4)


def test_lower_inverse_examples():
    # Hyp(0,2,1,4) = 1/2 >= 0.2 and Hyp(0,2,2,4) = 1/6 < 0.2, so the largest K is 1
    assert hyp_tail_lower_inv(0, 2, math.log(0.2), 4) == 1
    assert exactref.exact_hyp_tail_lower_inv(0, 2, Fraction(1, 5), 4) == 1
    for M in range(2, 12):
        assert hyp_tail_lower_inv(2, 2, math.log(0.3), M) == M


def test_lower_inverse_keeps_complement_precision():
    # delta = 1 - 1e-300 is 1.0 in floating point; only the complement carries it
    thr = -690.0
    got = hyp_tail_lower_inv(0, 50, -1e-300, 5000, log_complement=thr)
    K = got
    assert tail(49, 50, 5000 - K, 5000) <= thr + 1e-9
    assert tail(49, 50, 5000 - K - 1, 5000) > thr


def test_bin_tail_examples():
    assert bin_tail_log(2, 1, 0.5) == pytest.approx(math.log(0.75), abs=1e-15)
    assert bin_tail_log(9, 9, 0.3) == 0.0
    assert bin_tail_log(9, 0, 0.3) == pytest.approx(9 * math.log(0.7), rel=1e-14)
    assert bin_tail_log(9, 3, 0.0) == 0.0
    assert bin_tail_log(9, 3, 1.0) == -math.inf


def test_bin_tail_inv_examples():
    assert bin_tail_inv(7, 7, math.log(0.1)) == 1.0
    for m in (1, 5, 40, 300):
        for delta in DELTAS:
            assert bin_tail_inv(m, 0, math.log(delta)) == pytest.approx(1 - delta ** (1 / m), abs=1e-12)
    assert bin_tail_inv(2, 1, math.log(0.19)) == pytest.approx(0.9, abs=1e-12)


@pytest.mark.parametrize("m", [2, 10, 50, 200, 1000])
def test_bin_tail_inv_root_quality(m):
    for k in sorted({0, 1, m // 10, m // 3, m // 2, m - 1}):
        for delta in DELTAS + (1e-6,):
            p = bin_tail_inv(m, k, math.log(delta))
            assert abs(math.exp(bin_tail_log(m, k, p)) - delta) <= 1e-9


# --- exhaustive oracle on M <= 30 -------------------------------------------

def test_inverses_match_exact_oracle():
    mismatches = []
    for M in range(1, 31):
        for m in range(1, M + 1):
            for k in range(0, m):
                for delta in DELTAS:
                    want = exactref.exact_hyp_tail_inv(k, m, exact_delta(delta), M)
                    ld = math.log(delta)
                    got = (hyp_tail_inv_bisect(k, m, ld, M), hyp_tail_inv_linear(k, m, ld, M),
                           _pykernels.hyp_tail_inv_bisect(k, m, ld, M),
                           _pykernels.hyp_tail_inv_linear(k, m, ld, M))
                    if any(g != want for g in got):
                        mismatches.append((k, m, delta, M, want, got))
    assert not mismatches, mismatches[:10]


def test_lower_inverse_matches_exact_oracle():
    mismatches = []
    for M in range(1, 31):
        for m in range(1, M + 1):
            for k in range(0, m + 1):
                for delta in DELTAS:
                    want = exactref.exact_hyp_tail_lower_inv(k, m, exact_delta(delta), M)
                    got = hyp_tail_lower_inv(k, m, math.log(delta), M)
                    if got != want:
                        mismatches.append((k, m, delta, M, want, got))
    assert not mismatches, mismatches[:10]


def test_lower_and_upper_inverse_differ_by_at_most_one():
    for M in range(1, 31):
        for m in range(1, M + 1):
            for k in range(0, m):
                for delta in DELTAS:
                    ld = math.log(delta)
                    assert hyp_tail_inv_bisect(k, m, ld, M) - hyp_tail_lower_inv(k, m, ld, M) in (0, 1)


def test_tail_matches_exact_on_small_grid(exact_tails_30):
    worst = 0.0
    for (k, m, K, M), ex in exact_tails_30.items():
        lg = tail(k, m, K, M)
        if ex == 0:
            assert lg == -math.inf
            continue
        worst = max(worst, float(abs(Fraction(math.exp(lg)) - ex) / ex))
    assert worst <= 1e-12


def _rel_err(k, m, K, M):
    ex = exactref.exact_hyp_tail(k, m, K, M)
    lg = tail(k, m, K, M)
    if ex == 0:
        return 0.0 if lg == -math.inf else math.inf
    return float(abs(Fraction(math.exp(lg)) - ex) / ex)


@pytest.mark.parametrize("M", [60, 100, 150, 200])
def test_tail_matches_exact_at_larger_populations(M):
    # every k and K for a spread of draw sizes; the full M <= 200 box is sampled below
    worst = 0.0
    for m in sorted({1, 2, M // 7, M // 3, M // 2, M - 5, M - 1}):
        for K in range(0, M + 1, 3):
            for k in range(0, m + 1):
                worst = max(worst, _rel_err(k, m, K, M))
    assert worst <= 1e-10


@settings(max_examples=400, deadline=None)
@given(st.data())
def test_tail_matches_exact_sampled(data):
    M = data.draw(st.integers(1, 200))
    m = data.draw(st.integers(0, M))
    K = data.draw(st.integers(0, M))
    k = data.draw(st.integers(0, m))
    assert _rel_err(k, m, K, M) <= 1e-10


# --- properties on the exact grid -------------------------------------------

def test_pmf_sums_to_one():
    for M in range(1, 26):
        for m in range(0, M + 1):
            for K in range(0, M + 1):
                assert sum(exactref.exact_hyp_pmf(k, m, K, M) for k in range(m + 1)) == 1


def _interior(k, m, K, M):
    return 0 <= k < min(m, K) and m - k <= M - K


def test_tail_monotonicity(exact_tails_30):
    T = exact_tails_30
    for (k, m, K, M), v in T.items():
        strict = _interior(k, m, K, M)
        if k + 1 <= m:
            up = T[k + 1, m, K, M]
            assert up > v if strict else up >= v
        if K + 1 <= M:
            nxt = T[k, m, K + 1, M]
            assert nxt < v if strict else nxt <= v
        if m + 1 <= M:
            nxt = T[k, m + 1, K, M]
            assert nxt < v if strict else nxt <= v
        if M + 1 <= 30:
            nxt = T[k, m, K, M + 1]
            assert nxt > v if strict else nxt >= v


def test_symmetry_in_draws_and_successes(exact_tails_30):
    T = exact_tails_30
    for (k, m, K, M), v in T.items():
        if k <= K:
            assert T[k, K, m, M] == v
            assert tail(k, K, m, M) == pytest.approx(tail(k, m, K, M), abs=1e-12)


def test_pascal_decomposition(exact_tails_30):
    T = exact_tails_30
    for (k, m, K, M), _ in T.items():
        if M + 1 > 30 or m < 1 or k > m - 1:
            continue
        lhs = T[k, m, K, M + 1]
        rhs = Fraction(m, M + 1) * T[k, m - 1, K, M] + Fraction(M + 1 - m, M + 1) * T[k, m, K, M]
        assert lhs == rhs
        flhs = math.exp(tail(k, m, K, M + 1))
        frhs = m / (M + 1) * math.exp(tail(k, m - 1, K, M)) + (M + 1 - m) / (M + 1) * math.exp(tail(k, m, K, M))
        assert flhs == pytest.approx(frhs, rel=1e-12, abs=0)


def test_berkopec_identity():
    for k, m, K, M in all_params(25):
        # at k == m every term carries C(., -1) = 0 while the tail is one
        if not (k <= min(m, K) and max(m, K) <= M) or k == m:
            continue
        assert exactref.exact_hyp_tail_berkopec(k, m, K, M) == exactref.exact_hyp_tail(k, m, K, M)
        p = HypParams(k, m, K, M)
        a, b = hyp_tail_berkopec_log(p), hyp_tail_log(p)
        if a == -math.inf or b == -math.inf:
            assert a == b
        else:
            assert a == pytest.approx(b, abs=1e-12)


def test_berkopec_at_full_error_count():
    for M in range(1, 10):
        for m in range(0, M + 1):
            for K in range(m, M + 1):
                assert exactref.exact_hyp_tail_berkopec(m, m, K, M) == 0
                assert hyp_tail_berkopec_log(HypParams(m, m, K, M)) == 0.0


def test_chvatal_hoeffding_domination(exact_tails_30):
    for (k, m, K, M), v in exact_tails_30.items():
        if m == 0 or Fraction(k, m) > Fraction(K, M):
            continue
        t = k / m - K / M
        assert float(v) <= math.exp(-2 * t * t * m) * (1 + 1e-12)


def test_realizable_tail_bound(exact_tails_30):
    for (k, m, K, M), v in exact_tails_30.items():
        if k == 0:
            assert v <= Fraction(M - K, M) ** m
    for M in range(1, 31):
        for m in range(1, M + 1):
            for delta in DELTAS:
                hbar = hyp_tail_inv_bisect(0, m, math.log(delta), M)
                assert hbar <= M * (1 - delta ** (1 / m)) + 1 + 1e-9


def test_upper_inverse_defining_property(exact_tails_30):
    T = exact_tails_30
    for M in range(1, 31):
        for m in range(1, M + 1):
            for k in range(0, m):
                for delta in DELTAS:
                    d = exact_delta(delta)
                    h = hyp_tail_inv_bisect(k, m, math.log(delta), M)
                    assert k < h <= M - m + k + 1
                    assert h > M or T[k, m, h, M] <= d
                    if h > k + 1:
                        assert T[k, m, h - 1, M] > d


def test_lower_inverse_defining_property(exact_tails_30):
    T = exact_tails_30
    for M in range(1, 31):
        for m in range(1, M + 1):
            for k in range(0, m + 1):
                for delta in DELTAS:
                    d = exact_delta(delta)
                    h = hyp_tail_lower_inv(k, m, math.log(delta), M)
                    assert 0 <= h <= M - m + k
                    assert T[k, m, h, M] >= d
                    if h < M - m + k:
                        assert T[k, m, h + 1, M] < d


def test_inverse_monotonicity():
    H = {}
    for M in range(1, 31):
        for m in range(1, M + 1):
            for k in range(0, m):
                for delta in DELTAS:
                    H[k, m, delta, M] = hyp_tail_inv_bisect(k, m, math.log(delta), M)
    for (k, m, delta, M), h in H.items():
        if (k + 1, m, delta, M) in H:
            assert H[k + 1, m, delta, M] > h
        if (k, m, delta, M + 1) in H:
            assert H[k, m, delta, M + 1] >= h
        if (k, m + 1, delta, M) in H:
            assert H[k, m + 1, delta, M] <= h
    for key in {(k, m, M) for k, m, _, M in H}:
        k, m, M = key
        hs = [H[k, m, d, M] for d in sorted(DELTAS)]
        assert all(a >= b for a, b in zip(hs, hs[1:]))


def test_inverses_agree_at_scale():
    rng = random.Random(7)
    for _ in range(300):
        M = rng.randint(100, 30000)
        m = rng.randint(1, M - 1)
        k = rng.randint(0, m - 1)
        ld = -rng.uniform(1e-3, 400)
        assert hyp_tail_inv_bisect(k, m, ld, M) == hyp_tail_inv_linear(k, m, ld, M)


def test_tiny_thresholds_stay_finite():
    # delta / (4 tau) far below the smallest double
    ld = math.log(0.05) - math.log(4) - 400 * math.log(math.e * 40000 / 400)
    h = hyp_tail_inv_bisect(0, 2000, ld, 40000)
    assert 0 < h <= 38001
    assert tail(0, 2000, h, 40000) <= ld + 1e-9


# --- backends ---------------------------------------------------------------

@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_bit_identical():
    rng = random.Random(11)
    c, py = _ckernels, _pykernels
    for _ in range(2000):
        M = rng.choice([rng.randint(1, 60), rng.randint(60, 5000)])
        m = rng.randint(0, M)
        K = rng.randint(0, M)
        k = rng.randint(0, m)
        assert c.hyp_tail_log(k, m, K, M) == py.hyp_tail_log(k, m, K, M)
        assert c.hyp_pmf_log(k, m, K, M) == py.hyp_pmf_log(k, m, K, M)
        assert c.log_binom(M, K) == py.log_binom(M, K)
        ld = -rng.uniform(1e-3, 60)
        if k < m:
            assert c.hyp_tail_inv_bisect(k, m, ld, M) == py.hyp_tail_inv_bisect(k, m, ld, M)
            assert c.hyp_tail_inv_linear(k, m, ld, M) == py.hyp_tail_inv_linear(k, m, ld, M)
        assert c.hyp_tail_lower_inv(k, m, ld, M, math.nan) == py.hyp_tail_lower_inv(k, m, ld, M, math.nan)
        p = rng.random()
        assert c.bin_tail_log(m, k, p) == py.bin_tail_log(m, k, p)
    for m in (1, 7, 300):
        for k in range(0, m, max(1, m // 5)):
            assert c.bin_tail_inv(m, k, math.log(0.05)) == py.bin_tail_inv(m, k, math.log(0.05))


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_batched_inverse_matches_single():
    pops = list(range(50, 3000, 37))
    lds = [-(i % 40) - 0.5 for i in range(len(pops))]
    for kern in BACKENDS:
        got = kern.hyp_tail_inv_bisect_many(3, 40, pops, lds)
        assert got == [kern.hyp_tail_inv_bisect(3, 40, ld, M) for M, ld in zip(pops, lds)]


def test_log_factorial_table_is_shared():
    from concurrent.futures import ThreadPoolExecutor

    from hyptail._logfact import get_table

    with ThreadPoolExecutor(8) as pool:
        tables = list(pool.map(lambda _: get_table(), range(16)))
    assert all(t is tables[0] for t in tables)
