"""Command-line front end: ``icdetect {analytic,thresholds,regions,exact,simulate}``.

All ratios on the command line are in dB.  Data goes to ``--out`` (default
stdout) as CSV or JSON; progress and errors go to stderr.  Exit codes: 0 ok,
1 usage, 2 runtime.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import analytic
from .channel import Domain, LinkBudget, fixed_realization, linear_to_db
from .constellation import make_constellation
from .detectors import DetectorKind, decision_regions
from .errors import IcDetectError
from .montecarlo import DEFAULT_MIN_ERRORS, DEFAULT_TRIALS_MAX, SweepConfig, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

MODULATIONS = ("pam2", "pam4", "pam8", "qam4", "qam16")
DETECTORS = tuple(k.value for k in DetectorKind)

SER_FIELDS = ["detector", "mod1", "mod2", "fading", "snr_db", "sir_db", "inr_db",
              "trials", "errors", "ser", "ci95_halfwidth"]
ANALYTIC_FIELDS = ["detector", "snr_db", "sir_db", "inr_db", "value", "regime", "floor"]
THRESHOLD_FIELDS = ["m1", "m2", "sir_th", "sir_th_db", "sir_1", "sir_1_db", "sir_2", "sir_2_db"]
REGION_FIELDS = ["detector", "mod1", "mod2", "snr_db", "sir_db", "inr_db", "noise_sigma",
                 "interval", "lower", "upper", "x1_index", "x1_symbol"]

# flags whose values may start with '-' (negative dB); argparse would read them as options
_GRID_FLAGS = ("--snr-db", "--sir-db", "--inr-db")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def parse_grid(text: str) -> list[float]:
    """``"0:2:14"`` (stop included when aligned), ``"-3,3"``, or a mix of both."""
    values = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"empty grid element in {text!r}")
        try:
            if ":" in part:
                start, step, stop = (float(p) for p in part.split(":"))
                if step <= 0 or not all(map(math.isfinite, (start, step, stop))):
                    raise ValueError
                n = int(math.floor((stop - start) / step + 1e-9))
                values.extend(round(start + i * step, 12) for i in range(n + 1))
            else:
                values.append(float(part))
        except ValueError:
            raise UsageError(f"invalid grid {text!r}; use start:step:stop or a comma list") from None
    return values


def _detector_list(text: str) -> list[DetectorKind]:
    try:
        return [DetectorKind.parse(p) for p in text.split(",") if p.strip()]
    except IcDetectError as exc:
        raise UsageError(str(exc)) from None


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("inf" if value > 0 else "-inf" if value < 0 else "nan")
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return _fmt(value)
    return value


def render(records: list[dict], fields: list[str], fmt: str) -> str:
    if fmt == "json":
        rows = [{f: _json_value(r.get(f)) for f in fields} for r in records]
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in records:
        writer.writerow([_fmt(r.get(f)) for f in fields])
    return buf.getvalue()


def _interference_axis(args):
    """``(values, is_inr)`` for the interference grid."""
    if args.inr_db is not None:
        return parse_grid(args.inr_db), True
    return parse_grid(args.sir_db), False


def _point(snr_db, axis_value, is_inr):
    if is_inr:
        inr_db = axis_value
        sir_db = snr_db - inr_db
        budget = LinkBudget.from_db(snr_db, inr_db=inr_db)
    else:
        sir_db = axis_value
        inr_db = snr_db - sir_db
        budget = LinkBudget.from_db(snr_db, sir_db=sir_db)
    return budget, sir_db, inr_db


def cmd_analytic(args):
    if args.mod1 != "pam2" or args.mod2 != "pam2":
        raise UsageError("analytic: closed forms exist only for pam2/pam2")
    kinds = _detector_list(args.detectors)
    bad = [k.value for k in kinds if k not in (DetectorKind.CONVENTIONAL, DetectorKind.SIC, DetectorKind.MIN_DISTANCE)]
    if bad:
        raise UsageError(f"analytic: unsupported detector(s) {','.join(bad)}; choose from conv,sic,md")
    axis, is_inr = _interference_axis(args)
    out = []
    for kind in kinds:
        for snr_db in parse_grid(args.snr_db):
            for a in axis:
                budget, sir_db, inr_db = _point(snr_db, a, is_inr)
                pred = analytic.ser_nnub_2pam(kind, budget.snr, budget.inr)
                out.append(dict(detector=kind.value, snr_db=snr_db, sir_db=sir_db, inr_db=inr_db,
                                value=pred.value, regime=pred.regime, floor=pred.floor))
    return out, ANALYTIC_FIELDS


def cmd_thresholds(args):
    try:
        sir_th = analytic.sir_threshold(args.m1, args.m2)
        sir_1, sir_2 = analytic.sic_floor_region(args.m1, args.m2)
    except IcDetectError as exc:
        raise UsageError(str(exc)) from None
    rec = dict(m1=args.m1, m2=args.m2, sir_th=sir_th, sir_th_db=linear_to_db(sir_th),
               sir_1=sir_1, sir_1_db=linear_to_db(sir_1), sir_2=sir_2, sir_2_db=linear_to_db(sir_2))
    return [rec], THRESHOLD_FIELDS


def _require_pam(args, command):
    if not (args.mod1.startswith("pam") and args.mod2.startswith("pam")):
        raise UsageError(f"{command}: only PAM modulations are supported")


def cmd_regions(args):
    _require_pam(args, "regions")
    kinds = _detector_list(args.detectors)
    s1, s2 = make_constellation(args.mod1), make_constellation(args.mod2)
    axis, is_inr = _interference_axis(args)
    out = []
    for kind in kinds:
        for snr_db in parse_grid(args.snr_db):
            for a in axis:
                budget, sir_db, inr_db = _point(snr_db, a, is_inr)
                real = fixed_realization(budget, Domain.REAL)
                bounds, labels = decision_regions(kind, float(real.h11), float(real.h12), s1, s2, args.noise_sigma)
                edges = [-math.inf] + bounds + [math.inf]
                for i, lab in enumerate(labels):
                    out.append(dict(detector=kind.value, mod1=args.mod1, mod2=args.mod2, snr_db=snr_db,
                                    sir_db=sir_db, inr_db=inr_db, noise_sigma=float(args.noise_sigma),
                                    interval=i, lower=edges[i], upper=edges[i + 1], x1_index=lab,
                                    x1_symbol=float(s1.points[lab].real)))
    return out, REGION_FIELDS


def cmd_exact(args):
    _require_pam(args, "exact")
    if args.fading:
        raise UsageError("exact: fading is not supported; use simulate")
    kinds = _detector_list(args.detectors)
    M1, M2 = make_constellation(args.mod1).order, make_constellation(args.mod2).order
    axis, is_inr = _interference_axis(args)
    out = []
    for kind in kinds:
        for snr_db in parse_grid(args.snr_db):
            for a in axis:
                budget, sir_db, inr_db = _point(snr_db, a, is_inr)
                ser = analytic.ser_exact_pam(kind, budget.snr, budget.inr, M1, M2)
                out.append(dict(detector=kind.value, mod1=args.mod1, mod2=args.mod2, fading=False,
                                snr_db=snr_db, sir_db=sir_db, inr_db=inr_db, trials=None, errors=None,
                                ser=ser, ci95_halfwidth=None))
    return out, SER_FIELDS


def sweep_config_from_args(args) -> SweepConfig:
    axis, is_inr = _interference_axis(args)
    try:
        return SweepConfig(
            mod1=args.mod1,
            mod2=args.mod2,
            detectors=tuple(_detector_list(args.detectors)),
            snr_db_grid=tuple(parse_grid(args.snr_db)),
            sir_db_list=() if is_inr else tuple(axis),
            inr_db_list=tuple(axis) if is_inr else None,
            fading=args.fading,
            trials_max=args.trials,
            min_errors=args.min_errors,
            seed=args.seed,
        )
    except IcDetectError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args):
    config = sweep_config_from_args(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")

    def progress(done, total, est):
        if not args.quiet:
            print(f"[{done}/{total}] {est.detector.value} snr_db={est.snr_db:g} sir_db={est.sir_db:g} "
                  f"trials={est.trials} errors={est.errors}", file=sys.stderr)

    estimates = run_sweep(config, workers=args.workers, progress=progress)
    out = [dict(detector=e.detector.value, mod1=e.mod1, mod2=e.mod2, fading=e.fading, snr_db=e.snr_db,
                sir_db=e.sir_db, inr_db=e.inr_db, trials=e.trials, errors=e.errors, ser=e.ser,
                ci95_halfwidth=e.ci95_halfwidth) for e in estimates]
    return out, SER_FIELDS


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def _add_link(p, detectors_default):
    p.add_argument("--mod1", choices=MODULATIONS, default="pam2")
    p.add_argument("--mod2", choices=MODULATIONS, default="pam2")
    p.add_argument("--detectors", "--detector", dest="detectors", default=detectors_default,
                   help=f"comma list from {{{','.join(DETECTORS)}}}")
    p.add_argument("--snr-db", default="10", help="grid, e.g. 0:2:14 or 0,10")
    p.add_argument("--sir-db", default="inf", help="grid; INR is derived as SNR - SIR")
    p.add_argument("--inr-db", default=None, help="grid; overrides --sir-db")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="icdetect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analytic", help="NNUB SER for 2-PAM/2-PAM")
    _add_link(p, "conv,sic,md")
    _add_output(p)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("thresholds", help="error-floor SIR thresholds for PAM")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("regions", help="x1 decision regions on the real line (PAM)")
    _add_link(p, "md")
    p.add_argument("--noise-sigma", type=float, default=1.0, help="sigma assumed by the ML metric")
    _add_output(p)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("exact", help="exact SER by decision-region integration (PAM, fixed gains)")
    _add_link(p, "conv,sic,osic,md,ml")
    p.add_argument("--fading", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo SER sweep")
    _add_link(p, "conv,sic,osic,md,ml")
    p.add_argument("--fading", action="store_true", help="per-symbol Rayleigh gains")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS_MAX, help="max trials per point")
    p.add_argument("--min-errors", type=int, default=DEFAULT_MIN_ERRORS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    _add_output(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def _join_grid_flags(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _GRID_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_join_grid_flags(argv))
        records, fields = args.func(args)
        text = render(records, fields, args.format)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except IcDetectError as exc:
        print(f"icdetect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"icdetect: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except OSError as exc:
        print(f"icdetect: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
