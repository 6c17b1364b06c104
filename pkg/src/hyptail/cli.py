"""Command-line front end.

Subcommands: ``bound`` (one bound), ``sweep`` (CSV of several bounds along
one varied parameter), ``optimize`` (ghost-sample search), ``study`` (gain
study) and ``crossover``. Exit status is 0 on success, 2 for argument or
domain errors and 3 for I/O errors.
"""
import argparse
import csv
import io
import math
import sys
from fractions import Fraction

from . import bounds, mprime
from .bounds import BoundQuery
from .growth import Constant, SauerShelah

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

PROG = "hyptail"
SWEEP_METHODS = (bounds.HTI, bounds.HTI_RD, bounds.HTI_LOWER, bounds.VP, bounds.VRD, bounds.LUGOSI,
                 bounds.CATONI, bounds.SAMPLE_COMPRESSION, bounds.LANGFORD)
BOUND_METHODS = SWEEP_METHODS + (bounds.MARGIN,)


class UsageError(Exception):
    """Bad flags or values; reported on one line with exit status 2."""


class _Parser(argparse.ArgumentParser):
    # argparse prints the full usage and exits; keep failures to one line
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def warn(msg):
    print(f"{PROG}: warning: {msg}", file=sys.stderr)


# --- argument helpers --------------------------------------------------------

def _frac(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _pair(text):
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi with integers, got {text!r}") from None


def _csv_list(kind):
    def parse(text):
        try:
            return tuple(kind(x) for x in text.split(",") if x.strip())
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def errors_from_risk(m, risk):
    """Error count for an empirical risk, warning when m * risk is not integral."""
    exact = m * Fraction(risk)
    k = round(exact)
    if exact != k:
        warn(f"m*risk = {float(exact):g} is not an integer; using k = {k}")
    return k


def error_count(args):
    if args.errors is not None:
        return args.errors
    if args.risk is not None:
        return errors_from_risk(args.m, args.risk)
    raise UsageError("one of --errors or --risk is required")


def growth_model(args):
    if args.d is not None:
        return SauerShelah(args.d)
    if args.class_size is not None:
        return Constant(args.class_size)
    raise UsageError("one of --d or --class-size is required")


def log_delta(delta):
    if not 0.0 < delta < 1.0:
        raise UsageError(f"--delta must lie in (0, 1), got {delta}")
    return math.log(delta)


def parse_grid(text, integral):
    """Parse ``a,b,c``, ``lo:hi:step`` or ``log:lo:hi:n`` into an increasing tuple.

    Integral log grids are rounded to the nearest integer and deduplicated.
    """
    parts = text.split(":")
    try:
        if parts[0] == "log":
            if len(parts) != 4:
                raise ValueError
            lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
            if not (0 < lo <= hi) or n < 1:
                raise ValueError
            if n == 1:
                pts = [lo]
            else:
                r = math.log(hi / lo) / (n - 1)
                pts = [lo * math.exp(i * r) for i in range(n - 1)] + [hi]
            if integral:
                pts = sorted({round(p) for p in pts})
        elif len(parts) == 3:
            conv = int if integral else Fraction
            lo, hi, step = (conv(p) for p in parts)
            if step <= 0:
                raise ValueError
            pts, x = [], lo
            while x <= hi:
                pts.append(x)
                x += step
        elif len(parts) == 1:
            pts = [int(p) if integral else Fraction(p) for p in text.split(",")]
        else:
            raise ValueError
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad grid {text!r}; use a,b,c or lo:hi:step or log:lo:hi:n") from None
    if not pts:
        raise UsageError(f"grid {text!r} is empty")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise UsageError(f"grid {text!r} must be strictly increasing")
    return tuple(pts)


# --- evaluation --------------------------------------------------------------

def best_mprime(method, k, m, ld, growth, span=None, threads=None):
    lo, hi = span if span else (1, mprime.DEFAULT_RANGE_FACTOR * m)
    scan = mprime.MprimeScan(k, m, ld, growth, method, lo, hi, catoni_multiples=method == bounds.CATONI)
    return mprime.optimize_mprime(scan, threads=threads).mprime_best


def evaluate(method, k, m, ld, growth, mp, log_cover=None, compression=None):
    if method == bounds.SAMPLE_COMPRESSION:
        if compression is None:
            raise UsageError("the sc bound needs --compression-size")
        return bounds.sc_bound(k, m, compression, ld)
    if method == bounds.LANGFORD:
        return bounds.langford_test_bound(k, m, ld)
    if method == bounds.MARGIN:
        if log_cover is None:
            raise UsageError("the margin bound needs --log-cover")
        return bounds.margin_epsilon(k, m, mp, ld, log_cover)
    return bounds.QUERY_BOUNDS[method](BoundQuery(k, m, mp, ld, growth))


def _add_sample_flags(p, need_errors=True):
    p.add_argument("--m", type=int, required=True, help="sample size")
    g = p.add_mutually_exclusive_group(required=need_errors)
    g.add_argument("--errors", type=int, help="number of errors k on the sample")
    g.add_argument("--risk", type=_frac, help="empirical risk k/m (k is rounded)")
    p.add_argument("--delta", type=float, default=0.05, help="confidence parameter (default 0.05)")
    c = p.add_mutually_exclusive_group()
    c.add_argument("--d", type=int, help="VC dimension")
    c.add_argument("--class-size", type=int, help="size of a finite hypothesis class")


def cmd_bound(args):
    m = args.m
    k = error_count(args)
    if not 0 <= k <= m:
        raise UsageError(f"need 0 <= errors <= m, got k={k}, m={m}")
    ld = log_delta(args.delta)
    method = args.method
    needs_growth = method not in (bounds.SAMPLE_COMPRESSION, bounds.LANGFORD, bounds.MARGIN)
    growth = growth_model(args) if needs_growth else None
    mp = args.mprime
    if method in bounds.GHOST_METHODS or method == bounds.MARGIN:
        if args.auto_mprime:
            if method == bounds.MARGIN:
                raise UsageError("--auto-mprime is not available for the margin bound")
            target = k if args.target_errors is None else args.target_errors
            mp = best_mprime(method, target, m, ld, growth, threads=args.threads)
        elif mp is None:
            mp = mprime.heuristic_mprime(m)
    elif mp is None:
        mp = 1  # unused by the closed-form bounds
    res = evaluate(method, k, m, ld, growth, mp, args.log_cover, args.compression_size)
    mp_text = res.mprime_used if res.mprime_used is not None else "-"
    print(f"method={method} value={fmt(res.value)} vacuous={fmt(res.vacuous)} "
          f"valid={fmt(res.valid)} mprime={mp_text}")


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path, header, rows):
    # build in memory first so a failing path leaves no partial file behind
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    out, close = _open_output(path)
    try:
        out.write(buf.getvalue())
    finally:
        if close:
            out.close()


def cmd_sweep(args):
    methods = args.methods
    for meth in methods:
        if meth not in SWEEP_METHODS:
            raise UsageError(f"unknown sweep method {meth!r}; choose from {', '.join(SWEEP_METHODS)}")
    vary = args.vary
    grid = parse_grid(args.grid, integral=vary != "risk")
    ld = log_delta(args.delta)
    if vary != "m" and args.m is None:
        raise UsageError("--m is required unless --vary m")
    if vary != "d" and args.d is None and args.class_size is None:
        raise UsageError("one of --d or --class-size is required unless --vary d")
    if vary == "d" and args.class_size is not None:
        raise UsageError("--class-size cannot be combined with --vary d")
    if vary != "risk" and args.errors is None and args.risk is None:
        raise UsageError("one of --errors or --risk is required unless --vary risk")
    if vary == "mprime" and args.auto_mprime:
        raise UsageError("--auto-mprime cannot be combined with --vary mprime")
    if args.rate_reference and args.class_size is not None:
        raise UsageError("--rate-reference needs a VC dimension")

    cache = {}

    def ghost_size(method, m, k, growth):
        if vary == "mprime":
            return point
        if not args.auto_mprime:
            return args.mprime if args.mprime is not None else mprime.heuristic_mprime(m)
        if method == bounds.HTI_LOWER:
            target = k
        elif args.target_risk is not None:
            target = round(m * args.target_risk)
        else:
            target = k
        key = (method, m, target, growth)
        if key not in cache:
            cache[key] = best_mprime(method, target, m, ld, growth, args.range, args.threads)
        return cache[key]

    header = ["m", "k", "risk", "d" if args.class_size is None else "class_size", "delta"]
    if vary == "mprime" or not args.auto_mprime:
        header.append("mprime")
    if args.rate_reference:
        header.append("rate_reference")
    for meth in methods:
        header += [f"{meth}_value", f"{meth}_vacuous", f"{meth}_valid"]

    rows = []
    for point in grid:
        m = point if vary == "m" else args.m
        if vary == "risk":
            k = errors_from_risk(m, point)
        elif args.errors is not None:
            k = args.errors
        else:
            k = errors_from_risk(m, args.risk)
        if not 0 <= k <= m:
            raise UsageError(f"need 0 <= errors <= m, got k={k}, m={m}")
        if vary == "d":
            growth = SauerShelah(point)
        elif args.class_size is not None:
            growth = Constant(args.class_size)
        else:
            growth = SauerShelah(args.d)
        cls = growth.d if isinstance(growth, SauerShelah) else growth.N
        row = [m, k, float(Fraction(point)) if vary == "risk" else k / m, cls, args.delta]
        if vary == "mprime":
            row.append(point)
        elif not args.auto_mprime:
            row.append(args.mprime if args.mprime is not None else mprime.heuristic_mprime(m))
        if args.rate_reference:
            row.append(math.sqrt(growth.d / m))
        for meth in methods:
            mp = ghost_size(meth, m, k, growth) if meth in bounds.GHOST_METHODS else 1
            comp = growth.d if meth == bounds.SAMPLE_COMPRESSION and isinstance(growth, SauerShelah) else None
            if meth == bounds.SAMPLE_COMPRESSION and not (comp is not None and comp < m and k <= m - comp):
                value, vac, valid = math.nan, True, False
            else:
                res = evaluate(meth, k, m, ld, growth, mp, compression=comp)
                value, vac, valid = res.value, res.vacuous, res.valid
            if args.deviation:
                value = value - k / m
            row += [value, vac, valid]
        rows.append([fmt(x) for x in row])
    _write_csv(args.output, header, rows)


def cmd_optimize(args):
    if args.method not in mprime.SCAN_METHODS:
        raise UsageError(f"cannot optimize m' for {args.method!r}")
    m = args.m
    k = args.target_errors if args.target_errors is not None else error_count(args)
    if not 0 <= k <= m:
        raise UsageError(f"need 0 <= errors <= m, got k={k}, m={m}")
    ld = log_delta(args.delta)
    growth = growth_model(args)
    lo, hi = args.range if args.range else (1, mprime.DEFAULT_RANGE_FACTOR * m)
    scan = mprime.MprimeScan(k, m, ld, growth, args.method, lo, hi, step=args.step,
                             catoni_multiples=args.method == bounds.CATONI, refine=args.refine,
                             keep_trace=args.trace is not None)
    res = mprime.optimize_mprime(scan, threads=args.threads)
    if args.trace is not None:
        _write_csv(args.trace, ["mprime", "epsilon"], [[mp, fmt(v)] for mp, v in res.trace])
    print(f"method={args.method} k={k} mprime_best={res.mprime_best} "
          f"epsilon_best={fmt(res.epsilon_best)} evaluations={res.evaluations}")


def cmd_study(args):
    grid = mprime.GainGrid(
        ms=args.ms or mprime.DEFAULT_MS,
        risks=args.risks or mprime.DEFAULT_RISKS,
        ds=args.ds or mprime.DEFAULT_DS,
        deltas=args.deltas or mprime.DEFAULT_DELTAS,
    )
    for delta in grid.deltas:
        log_delta(delta)
    try:
        list(grid.combinations())
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = mprime.gain_study(grid, method=args.method, range_factor=args.range_factor,
                               mprime_range=args.range, k0_only=args.k0_only, threads=args.threads)
    header = ["m", "risk", "k", "d", "delta", "mprime_best", "epsilon_best", "epsilon_baseline", "gain"]
    rows = [[fmt(getattr(r, f)) for f in header] for r in report.rows]
    _write_csv(args.output, header, rows)
    if not report.rows:
        raise UsageError("the grid has no combinations to study")
    # summary goes after the CSV; prefixed so stdout CSV stays parseable with comment='#'
    prefix = "" if args.output not in (None, "-") else "# "
    print(f"{prefix}combinations={len(report.rows)}")
    print(f"{prefix}mean_gain={fmt(report.mean)}")
    print(f"{prefix}std_gain={fmt(report.std)}")


def cmd_crossover(args):
    c = bounds.lugosi_vp_crossover()
    print(f"constant={c.constant:.2f} log10_ratio={c.log10_ratio:.2f}")


def build_parser():
    p = _Parser(prog=PROG, description="Hypergeometric tail inversion risk bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="evaluate one bound")
    b.add_argument("--method", choices=BOUND_METHODS, default=bounds.HTI)
    _add_sample_flags(b)
    g = b.add_mutually_exclusive_group()
    g.add_argument("--mprime", type=int, help="ghost sample size (default 4m)")
    g.add_argument("--auto-mprime", action="store_true", help="optimize m' on [1, 128m]")
    b.add_argument("--target-errors", type=int, help="error count the m' search optimizes for (default k)")
    b.add_argument("--log-cover", type=float, help="ln covering number, for --method margin")
    b.add_argument("--compression-size", type=int, help="compression set size, for --method sc")
    b.add_argument("--threads", type=int)
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("sweep", help="tabulate bounds along one parameter as CSV")
    s.add_argument("--vary", choices=("risk", "m", "d", "mprime"), required=True)
    s.add_argument("--grid", required=True, help="a,b,c | lo:hi:step | log:lo:hi:n")
    s.add_argument("--methods", type=_csv_list(str), default=(bounds.HTI, bounds.VP, bounds.VRD,
                                                               bounds.CATONI, bounds.LUGOSI))
    s.add_argument("--m", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--errors", type=int)
    g.add_argument("--risk", type=_frac)
    s.add_argument("--delta", type=float, default=0.05)
    c = s.add_mutually_exclusive_group()
    c.add_argument("--d", type=int)
    c.add_argument("--class-size", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--mprime", type=int, help="fixed ghost sample size (default 4m)")
    g.add_argument("--auto-mprime", action="store_true", help="optimize m' per row and method")
    s.add_argument("--target-risk", type=_frac, help="risk the m' search optimizes for (default: the row's)")
    s.add_argument("--range", type=_pair, help="m' search range lo:hi (default 1:128m)")
    s.add_argument("--rate-reference", action="store_true", help="add a sqrt(d/m) column")
    s.add_argument("--deviation", action="store_true", help="report bound minus empirical risk")
    s.add_argument("--output", help="CSV path (default stdout)")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("optimize", help="search the best ghost sample size")
    o.add_argument("--method", choices=tuple(mprime.SCAN_METHODS), default=bounds.HTI)
    _add_sample_flags(o, need_errors=False)
    o.add_argument("--target-errors", type=int, help="anticipated error count (alias of --errors)")
    o.add_argument("--range", type=_pair, help="inclusive m' range lo:hi (default 1:128m)")
    o.add_argument("--step", type=int, default=1)
    o.add_argument("--refine", action="store_true", help="rescan around a coarse optimum")
    o.add_argument("--trace", help="write the (m', epsilon) curve to this CSV")
    o.add_argument("--threads", type=int)
    o.set_defaults(func=cmd_optimize)

    t = sub.add_parser("study", help="gain of the optimized m' over m' = m")
    t.add_argument("--method", choices=(bounds.HTI, bounds.HTI_RD, bounds.CATONI), default=bounds.HTI)
    t.add_argument("--k0-only", action="store_true", help="only the realizable combinations")
    t.add_argument("--ms", type=_csv_list(int))
    t.add_argument("--risks", type=_csv_list(Fraction))
    t.add_argument("--ds", type=_csv_list(int))
    t.add_argument("--deltas", type=_csv_list(float))
    t.add_argument("--range-factor", type=int, default=mprime.DEFAULT_RANGE_FACTOR)
    t.add_argument("--range", type=_pair, help="fixed m' range lo:hi for every combination")
    t.add_argument("--output", help="CSV path (default stdout)")
    t.add_argument("--threads", type=int)
    t.set_defaults(func=cmd_study)

    x = sub.add_parser("crossover", help="where the chaining bound overtakes the pessimistic one")
    x.set_defaults(func=cmd_crossover)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise UsageError("--threads must be >= 1")
        args.func(args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
