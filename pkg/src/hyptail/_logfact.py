"""Shared table of ln(n!) used by both kernel backends.

The table is filled from :func:`math.lgamma` so the compiled and the
pure-Python kernels read bit-identical values. Beyond the table cap the
Stirling series is used.
"""
import math
import os
import threading
from array import array

DEFAULT_CAP = 1 << 20

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

_lock = threading.Lock()
_table = None


def table_cap():
    """Number of entries in the table, from ``HYPTAIL_LOGFACT_CAP`` or 2**20."""
    raw = os.environ.get("HYPTAIL_LOGFACT_CAP")
    if raw is None:
        return DEFAULT_CAP
    cap = int(raw)
    if cap < 2:
        raise ValueError(f"HYPTAIL_LOGFACT_CAP must be >= 2, got {cap}")
    return cap


def get_table():
    """Return the (lazily built, then immutable) ``array('d')`` of ln(n!)."""
    global _table
    table = _table
    if table is None:
        with _lock:
            if _table is None:
                cap = table_cap()
                lgamma = math.lgamma
                _table = array("d", (lgamma(n + 1.0) for n in range(cap)))
            table = _table
    return table


def stirling_log_factorial(n):
    x = n + 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)))
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series
