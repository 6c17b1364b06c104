"""Generalization bounds on the true risk of a classifier.

The hypergeometric tail inversion (HTI) family takes the number of errors
``k`` on a sample of size ``m`` plus a ghost-sample size ``m'``; the
comparison bounds (Vapnik pessimistic and relative deviation, Lugosi's
chaining bound, Catoni's C4.6, sample compression and the binomial test
bound) are closed forms or binomial inversions.

Values are never clamped to ``[0, 1]``: :class:`BoundResult` flags vacuity
instead, so sweeps keep the true curve shapes.
"""
import math
import operator
from dataclasses import dataclass

from scipy.special import erfcx

from ._kernel import impl
from .growth import Constant, SauerShelah
from .hypergeom import bin_tail_inv, log_binom

LN4 = math.log(4.0)

HTI = "hti"
HTI_RD = "hti-rd"
HTI_LOWER = "hti-lower"
MARGIN = "margin"
VP = "vp"
VRD = "vrd"
LUGOSI = "lugosi"
CATONI = "catoni"
SAMPLE_COMPRESSION = "sc"
LANGFORD = "langford"


@dataclass(frozen=True)
class BoundQuery:
    """Inputs shared by the VC-type bounds.

    ``k`` is the error count on the sample (the empirical risk ``k / m`` is
    derived), ``mprime`` the ghost-sample size and ``log_delta`` the natural
    log of the confidence parameter.
    """

    k: int
    m: int
    mprime: int
    log_delta: float
    growth: SauerShelah | Constant

    def __post_init__(self):
        for name in ("k", "m", "mprime"):
            try:
                object.__setattr__(self, name, operator.index(getattr(self, name)))
            except TypeError:
                raise TypeError(f"{name} must be an integer, got {getattr(self, name)!r}") from None
        if self.m < 1:
            raise ValueError(f"sample size m must be >= 1, got {self.m}")
        if not 0 <= self.k <= self.m:
            raise ValueError(f"error count must satisfy 0 <= k <= m, got k={self.k}, m={self.m}")
        if self.mprime < 1:
            raise ValueError(f"ghost sample size must be >= 1, got {self.mprime}")
        if not (-math.inf < self.log_delta < 0.0):
            raise ValueError(f"log_delta must lie in (-inf, 0), got {self.log_delta}")

    @classmethod
    def create(cls, k, m, mprime, delta, growth):
        """Build a query from a linear-scale ``delta`` in (0, 1)."""
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        return cls(k, m, mprime, math.log(delta), growth)

    @property
    def risk(self):
        return self.k / self.m

    def with_mprime(self, mprime):
        return BoundQuery(self.k, self.m, mprime, self.log_delta, self.growth)

    def with_k(self, k):
        return BoundQuery(k, self.m, self.mprime, self.log_delta, self.growth)


@dataclass(frozen=True)
class BoundResult:
    value: float
    vacuous: bool
    valid: bool
    method: str
    mprime_used: int | None = None


def _result(value, method, valid=True, mprime=None):
    return BoundResult(value, value >= 1.0, valid, method, mprime)


def _ghost_log_threshold(q, log_complexity):
    return ghost_log_threshold(q.log_delta, log_complexity)


def ghost_log_threshold(log_delta, log_complexity):
    """ln(delta / (4 tau(m + m'))) given ln(delta) and ln tau(m + m')."""
    return log_delta - LN4 - log_complexity


def hti_from_hbar(k, mprime, hbar):
    return max(1, hbar - 1 - k) / mprime


def hti_rd_from_hbar(k, m, mprime, hbar):
    M = m + mprime
    u = (hbar - 1) / M
    risk = k / m
    second = 0.0 if u == 0 else (M / mprime) * (u - risk) / math.sqrt(u)
    eta = max(1.0 / math.sqrt(mprime), second)
    eta2 = eta * eta
    return risk + eta2 / 2.0 * (1.0 + math.sqrt(1.0 + 4.0 * risk / eta2))


def _hti_value(k, m, mprime, log_threshold):
    if k == m:
        return 1.0
    hbar = impl.hyp_tail_inv_bisect(k, m, log_threshold, m + mprime)
    return hti_from_hbar(k, mprime, hbar)


def hti_epsilon(q):
    """Hypergeometric tail inversion upper bound on the true risk.

    eps(k) = max(1, Hbar(k, m, delta / (4 tau(m+m')), m+m') - 1 - k) / m',
    and 1 when k == m.
    """
    M = q.m + q.mprime
    log_thr = _ghost_log_threshold(q, q.growth.log_growth(M))
    return _result(_hti_value(q.k, q.m, q.mprime, log_thr), HTI, mprime=q.mprime)


def hti_rd_epsilon(q):
    """Relative-deviation variant of the HTI bound.

    With u = (Hbar - 1) / (m + m') and
    eta = max(1 / sqrt(m'), (m + m') / m' * (u - k/m) / sqrt(u)),
    the bound is R + eta^2 / 2 * (1 + sqrt(1 + 4R / eta^2)). For u = 0 the
    second branch is taken as its limit 0; for k == m, eta = 0 and the bound
    is R = 1.
    """
    if q.k == q.m:
        return _result(1.0, HTI_RD, mprime=q.mprime)
    M = q.m + q.mprime
    log_thr = _ghost_log_threshold(q, q.growth.log_growth(M))
    hbar = impl.hyp_tail_inv_bisect(q.k, q.m, log_thr, M)
    value = hti_rd_from_hbar(q.k, q.m, q.mprime, hbar)
    return _result(value, HTI_RD, mprime=q.mprime)


def hti_lower_epsilon(q):
    """HTI lower bound on the true risk; 0 when k == 0.

    eps(k) = min(m' - 1, Hlow(k-1, m, 1 - delta', m+m') + 1 - k) / m' with
    delta' = delta / (4 tau(m+m')). The threshold 1 - delta' is handled via
    its complement so that delta' ~ 1e-300 keeps full precision.
    """
    if q.k == 0:
        return _result(0.0, HTI_LOWER, mprime=q.mprime)
    M = q.m + q.mprime
    log_thr = _ghost_log_threshold(q, q.growth.log_growth(M))
    log_one_minus = math.log1p(-math.exp(log_thr))
    hlow = impl.hyp_tail_lower_inv(q.k - 1, q.m, log_one_minus, M, log_thr)
    value = min(q.mprime - 1, hlow + 1 - q.k) / q.mprime
    return _result(value, HTI_LOWER, mprime=q.mprime)


def margin_epsilon(k, m, mprime, log_delta, log_cover):
    """HTI bound for margin classifiers.

    ``log_cover`` is ln N(gamma / 2^(2 - 1/p), m + m'), the uniform covering
    number of the score class, supplied by the caller; it plays the role of
    the log growth function. ``k`` counts sample points with margin below
    gamma.
    """
    if log_cover < 0:
        raise ValueError(f"log covering number must be >= 0, got {log_cover}")
    q = BoundQuery(k, m, mprime, log_delta, Constant(1))
    value = _hti_value(q.k, q.m, q.mprime, _ghost_log_threshold(q, log_cover))
    return _result(value, MARGIN, mprime=q.mprime)


def _vapnik_complexity(q):
    # E(m) = (ln 4 tau(2m) - ln delta) / m
    return (LN4 + q.growth.log_growth(2 * q.m) - q.log_delta) / q.m


def vp_bound(q):
    """Vapnik's pessimistic bound R + 1/m + sqrt(E(m)); ``mprime`` is ignored."""
    value = q.k / q.m + 1.0 / q.m + math.sqrt(_vapnik_complexity(q))
    return _result(value, VP)


def vrd_bound(q):
    """Vapnik's relative deviation bound R + 2E(1 + sqrt(1 + R/E))."""
    e = _vapnik_complexity(q)
    risk = q.k / q.m
    value = risk + 2.0 * e * (1.0 + math.sqrt(1.0 + risk / e))
    return _result(value, VRD)


def _lugosi_a(d):
    return (d + 1) * (2.0 + math.log(2.0)) / (2.0 * d)


def lugosi_bound(q):
    """Lugosi's chaining bound; needs a VC dimension.

    The factor e^a (1 - erf(sqrt a)) is evaluated as the scaled complementary
    error function erfcx(sqrt a).
    """
    if not isinstance(q.growth, SauerShelah):
        raise ValueError("the chaining bound needs a VC dimension (SauerShelah growth)")
    d = q.growth.d
    a = _lugosi_a(d)
    root_a = math.sqrt(a)
    chaining = 24.0 * math.sqrt(2.0 * d / q.m) * (root_a + math.sqrt(math.pi) / 2.0 * float(erfcx(root_a)))
    value = q.k / q.m + chaining + math.sqrt(-q.log_delta / (2.0 * q.m))
    return _result(value, LUGOSI)


@dataclass(frozen=True)
class Crossover:
    """Where the chaining bound overtakes the pessimistic bound."""

    constant: float
    log10_ratio: float


def lugosi_vp_crossover(d=1):
    """Solve 24 sqrt((d+1)(2+ln 2)) = sqrt(2(d+1) c) for c = ln(4em/d).

    ``c = 288 (2 + ln 2)`` does not depend on ``d``; ``log10_ratio`` is the
    base-10 exponent of the sample-size-to-VC-dimension ratio m/d at which
    the two bounds meet, solving ln(4em/d) = c.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    c = 288.0 * (2.0 + math.log(2.0))
    log10_ratio = (c - 1.0 - math.log(4.0)) / math.log(10.0)
    return Crossover(c, log10_ratio)


def catoni_c46(q):
    """Catoni's localized bound (C4.6) with shadow sample size ``q.mprime``.

    Only valid when both the empirical risk and the bound are <= 1/2; the
    ``valid`` flag reports it.
    """
    M = q.m + q.mprime
    dprime = (M / q.mprime) ** 2 * (q.growth.log_growth(M) - q.log_delta)
    risk = q.k / q.m
    m = q.m
    radical = math.sqrt(2.0 * dprime * m * risk * (1.0 - risk) + dprime * dprime)
    value = (risk + dprime / m + radical / m) / (1.0 + 2.0 * dprime / m)
    return _result(value, CATONI, valid=risk <= 0.5 and value <= 0.5, mprime=q.mprime)


def sc_bound(k, m, d, log_delta):
    """Sample compression bound with compression size ``d`` and no message.

    Inverts the binomial tail over the ``m - d`` points outside the
    compression set at confidence delta / (m C(m, d)). ``k`` is the number of
    errors on the whole sample.
    """
    if not 0 <= d < m:
        raise ValueError(f"compression size must satisfy 0 <= d < m, got d={d}, m={m}")
    if not 0 <= k <= m - d:
        raise ValueError(f"error count must satisfy 0 <= k <= m - d, got k={k}")
    log_conf = log_delta - math.log(m) - log_binom(m, d)
    return _result(bin_tail_inv(m - d, k, log_conf), SAMPLE_COMPRESSION)


def langford_test_bound(k, m, log_delta):
    """Binomial tail inversion bound for a single classifier on a test set."""
    return _result(bin_tail_inv(m, k, log_delta), LANGFORD)


def hti_hoeffding_relaxed(q):
    """Closed-form relaxation of the HTI bound through Hoeffding's inequality.

    Strictly above :func:`hti_epsilon` whenever the max in the HTI bound is
    attained by its second argument.
    """
    M = q.m + q.mprime
    inside = (-q.log_delta + LN4 + q.growth.log_growth(M)) / (2.0 * q.m)
    return M / q.mprime * math.sqrt(inside) + q.k / q.m


def hti_realizable_relaxed(q):
    """(1 + m/m') ln(4 tau(m+m') / delta) / m, an upper bound on eps(0)."""
    if q.k != 0:
        raise ValueError("the realizable relaxation only applies to k = 0")
    M = q.m + q.mprime
    return (1.0 + q.m / q.mprime) * (LN4 + q.growth.log_growth(M) - q.log_delta) / q.m


QUERY_BOUNDS = {
    HTI: hti_epsilon,
    HTI_RD: hti_rd_epsilon,
    HTI_LOWER: hti_lower_epsilon,
    VP: vp_bound,
    VRD: vrd_bound,
    LUGOSI: lugosi_bound,
    CATONI: catoni_c46,
}
"""Bounds computable from a :class:`BoundQuery` alone."""

GHOST_METHODS = frozenset({HTI, HTI_RD, HTI_LOWER, CATONI})
