"""Ghost-sample size selection.

The HTI bounds are step functions of ``m'`` with no usable convexity, so the
optimum is found by evaluating every candidate in a range. The target error
count ``k`` must be fixed before looking at data: it is an anticipated number
of errors, not an observed one.
"""
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import bounds
from ._kernel import impl
from .bounds import BoundQuery

SCAN_METHODS = {
    bounds.HTI: bounds.hti_epsilon,
    bounds.HTI_RD: bounds.hti_rd_epsilon,
    bounds.HTI_LOWER: bounds.hti_lower_epsilon,
    bounds.CATONI: bounds.catoni_c46,
}

DEFAULT_RANGE_FACTOR = 128

# Below this many points a thread pool costs more than it saves.
_PARALLEL_MIN_POINTS = 2048


@dataclass(frozen=True)
class MprimeScan:
    """A ghost-sample search for one bound at a fixed anticipated error count.

    ``lo``/``hi`` bound the scanned ``m'`` (inclusive). ``step > 1`` scans a
    coarse grid; with ``refine`` the neighbourhood of the coarse optimum is
    then scanned exhaustively. ``catoni_multiples`` restricts the scan to
    multiples of ``m``.
    """

    k: int
    m: int
    log_delta: float
    growth: object
    method: str = bounds.HTI
    lo: int = 1
    hi: int | None = None
    step: int = 1
    catoni_multiples: bool = False
    refine: bool = False
    keep_trace: bool = False

    def __post_init__(self):
        if self.method not in SCAN_METHODS:
            raise ValueError(f"cannot optimize m' for method {self.method!r}")
        if self.hi is None:
            object.__setattr__(self, "hi", DEFAULT_RANGE_FACTOR * self.m)
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"need 1 <= lo <= hi, got [{self.lo}, {self.hi}]")
        if self.step < 1:
            raise ValueError(f"step must be >= 1, got {self.step}")
        # validates k, m and log_delta
        BoundQuery(self.k, self.m, self.lo, self.log_delta, self.growth)

    @property
    def maximize(self):
        # a lower bound is best when largest
        return self.method == bounds.HTI_LOWER

    def points(self):
        if self.catoni_multiples:
            first = -(-self.lo // self.m)
            return [j * self.m for j in range(first, self.hi // self.m + 1)]
        return list(range(self.lo, self.hi + 1, self.step))


@dataclass(frozen=True)
class MprimeResult:
    mprime_best: int
    epsilon_best: float
    evaluations: int
    trace: list | None = None


def heuristic_mprime(m):
    """Rule-of-thumb ghost sample size for low anticipated risk: 4m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 4 * m


def default_threads():
    return os.cpu_count() or 1


def _batched_runner(scan):
    # HTI and HTI-RD need one upper inversion per m'; hand the whole chunk to
    # the kernel so the compiled backend can run it without the GIL.
    k, m = scan.k, scan.m
    if scan.method == bounds.HTI:
        value = lambda mp, h: bounds.hti_from_hbar(k, mp, h)
    else:
        value = lambda mp, h: bounds.hti_rd_from_hbar(k, m, mp, h)
    log_growth = scan.growth.log_growth

    def run(chunk):
        pops = [m + mp for mp in chunk]
        thresholds = [bounds.ghost_log_threshold(scan.log_delta, log_growth(M)) for M in pops]
        hbars = impl.hyp_tail_inv_bisect_many(k, m, pops, thresholds)
        return [value(mp, h) for mp, h in zip(chunk, hbars)]

    return run


def _evaluate(scan, points, threads):
    if scan.method in (bounds.HTI, bounds.HTI_RD) and scan.k < scan.m:
        run = _batched_runner(scan)
    else:
        fn = SCAN_METHODS[scan.method]
        base = BoundQuery(scan.k, scan.m, scan.lo, scan.log_delta, scan.growth)

        def run(chunk):
            return [fn(base.with_mprime(mp)).value for mp in chunk]

    if threads <= 1 or len(points) < _PARALLEL_MIN_POINTS:
        return run(points)
    size = -(-len(points) // threads)
    chunks = [points[i:i + size] for i in range(0, len(points), size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(run, chunks))
    return [v for part in parts for v in part]


def _best(points, values, maximize):
    best_i = 0
    for i in range(1, len(points)):
        v, b = values[i], values[best_i]
        if (v > b) if maximize else (v < b):
            best_i = i
        elif v == b and points[i] < points[best_i]:
            best_i = i
    return points[best_i], values[best_i]


def optimize_mprime(scan, threads=None):
    """Evaluate the bound at every scanned ``m'`` and return the optimum.

    Ties go to the smallest ``m'``. The result does not depend on ``threads``:
    chunks are evaluated independently and reduced in scan order.
    """
    if threads is None:
        threads = default_threads()
    points = scan.points()
    if not points:
        raise ValueError(f"no m' to scan in [{scan.lo}, {scan.hi}]")
    values = _evaluate(scan, points, threads)
    best_mp, _ = _best(points, values, scan.maximize)
    if scan.refine and scan.step > 1 and not scan.catoni_multiples:
        seen = set(points)
        extra = [mp for mp in range(max(scan.lo, best_mp - scan.step + 1), min(scan.hi, best_mp + scan.step - 1) + 1)
                 if mp not in seen]
        points = points + extra
        values = values + _evaluate(scan, extra, threads)
    best_mp, best_eps = _best(points, values, scan.maximize)
    trace = sorted(zip(points, values)) if scan.keep_trace else None
    return MprimeResult(best_mp, best_eps, len(points), trace)


# --- gain study ------------------------------------------------------------

DEFAULT_MS = (100, 200, 300, 500, 1000)
DEFAULT_RISKS = tuple(Fraction(i, 20) for i in range(11))
DEFAULT_DS = (5, 10, 20, 35)
DEFAULT_DELTAS = (0.0001, 0.0025, 0.05, 0.1)


@dataclass(frozen=True)
class GainGrid:
    ms: tuple = DEFAULT_MS
    risks: tuple = DEFAULT_RISKS
    ds: tuple = DEFAULT_DS
    deltas: tuple = DEFAULT_DELTAS

    def combinations(self):
        """Yield ``(m, risk, k, d, delta)`` in grid order."""
        for m in self.ms:
            for risk in self.risks:
                k = round(m * Fraction(risk))
                if m * Fraction(risk) != k:
                    raise ValueError(f"risk {risk} gives a non-integral error count at m={m}")
                for d in self.ds:
                    for delta in self.deltas:
                        yield m, risk, k, d, delta


@dataclass(frozen=True)
class GainRow:
    m: int
    risk: float
    k: int
    d: int
    delta: float
    mprime_best: int
    epsilon_best: float
    epsilon_baseline: float
    gain: float


def _mean_std(gains):
    if not gains:
        return math.nan, math.nan
    return statistics.fmean(gains), statistics.pstdev(gains)


@dataclass(frozen=True)
class GainStudyReport:
    """Relative gains 1 - eps(m'_best) / eps(m' = m) over a parameter grid."""

    method: str
    rows: list = field(default_factory=list)

    @property
    def gains(self):
        return [r.gain for r in self.rows]

    @property
    def mean(self):
        return _mean_std(self.gains)[0]

    @property
    def std(self):
        """Population standard deviation of the gains."""
        return _mean_std(self.gains)[1]

    def subset(self, predicate):
        return GainStudyReport(self.method, [r for r in self.rows if predicate(r)])

    def realizable(self):
        return self.subset(lambda r: r.k == 0)


def gain_study(grid=None, method=bounds.HTI, range_factor=DEFAULT_RANGE_FACTOR, mprime_range=None,
               k0_only=False, threads=None, progress=None):
    """Optimize ``m'`` on every grid point and compare with ``m' = m``.

    The scan covers ``[1, range_factor * m]`` unless ``mprime_range`` (a
    ``(lo, hi)`` pair) is given. ``progress`` is called with each finished
    row.
    """
    if method not in (bounds.HTI, bounds.HTI_RD, bounds.CATONI):
        raise ValueError(f"gain study supports minimized upper bounds only, got {method!r}")
    from .growth import SauerShelah

    grid = grid or GainGrid()
    fn = SCAN_METHODS[method]
    rows = []
    for m, risk, k, d, delta in grid.combinations():
        if k0_only and k != 0:
            continue
        lo, hi = mprime_range if mprime_range else (1, range_factor * m)
        growth = SauerShelah(d)
        log_delta = math.log(delta)
        result = optimize_mprime(MprimeScan(k, m, log_delta, growth, method, lo, hi), threads=threads)
        baseline = fn(BoundQuery(k, m, m, log_delta, growth)).value
        gain = 1.0 - result.epsilon_best / baseline
        row = GainRow(m, float(risk), k, d, delta, result.mprime_best, result.epsilon_best, baseline, gain)
        rows.append(row)
        if progress is not None:
            progress(row)
    return GainStudyReport(method, rows)
