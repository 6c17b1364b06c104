import math
import os
from fractions import Fraction

import pytest

from hyptail import exactref

DELTAS = (0.9, 0.5, 0.1, 0.01)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HYPTAIL_SLOW", "") not in ("", "0"):
        return
    skip = pytest.mark.skip(reason="slow; set HYPTAIL_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def all_params(max_M, min_M=1):
    """Every (k, m, K, M) with 0 <= k <= m <= M and 0 <= K <= M."""
    for M in range(min_M, max_M + 1):
        for m in range(0, M + 1):
            for K in range(0, M + 1):
                for k in range(0, m + 1):
                    yield k, m, K, M


@pytest.fixture(scope="session")
def exact_tails_30():
    # (k, m, K, M) -> Fraction, built incrementally in k from exact pmfs
    table = {}
    for M in range(1, 31):
        for m in range(0, M + 1):
            denom = exactref.exact_binom(M, m)
            for K in range(0, M + 1):
                acc = 0
                for k in range(0, m + 1):
                    acc += exactref.exact_binom(K, k) * exactref.exact_binom(M - K, m - k)
                    table[k, m, K, M] = Fraction(acc, denom)
    return table


def exact_delta(delta):
    return Fraction(str(delta))


def log_delta(delta):
    return math.log(delta)
