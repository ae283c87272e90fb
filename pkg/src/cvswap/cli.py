"""Command-line front end: ``cvswap swap | sweep | verify``.

Squeezing is given either as a bare parameter (``--r`` ...) or in dB;
detector efficiencies are always given squared (``--eta-c-sq``), the
form in which detector figures are normally quoted.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

from . import criteria
from .protocol import Scenario, SwapParams, auto_swap_gain, evaluate_swap, run_scenario
from .sweep import SweepSpec, render, sweep_rows


def _gain(text: str):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("gain must be finite")
    return v


def eta_from_sq(eta_sq: float) -> float:
    """The single conversion from quoted eta^2 to amplitude efficiency."""
    return math.sqrt(eta_sq)


def _check_eta(parser, args) -> None:
    for flag in ("eta_c_sq", "eta_a_sq"):
        v = getattr(args, flag)
        if v is not None and not 0.0 < v <= 1.0:
            parser.error(f"--{flag.replace('_', '-')} must lie in (0, 1], got {v}")


def _overrides(args) -> dict:
    out = {}
    if args.g_swap != "auto":
        out["g_swap"] = args.g_swap
    if args.g is not None:
        out["g"] = args.g
    if args.eta_c_sq is not None:
        out["eta_c"] = eta_from_sq(args.eta_c_sq)
    if args.eta_a_sq is not None:
        out["eta_a"] = eta_from_sq(args.eta_a_sq)
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g-swap", type=_gain, default="auto", help="swap gain, number or 'auto' (default)")
    p.add_argument("--g", type=float, default=None, help="teleportation gain (default 1)")
    p.add_argument("--eta-c-sq", type=float, default=None, help="Claire's detector efficiency squared")
    p.add_argument("--eta-a-sq", type=float, default=None, help="Alice's detector efficiency squared")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvswap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("swap", help="evaluate one configuration, print a JSON report")
    sw.add_argument("--r", type=float, default=None, help="squeezing r1 of the 1-2 pair")
    sw.add_argument("--r2", type=float, default=None, help="squeezing r2 (default: same as --r)")
    sw.add_argument("--s", type=float, default=None, help="squeezing s1 of the 3-4 pair (default: same as --r)")
    sw.add_argument("--s2", type=float, default=None, help="squeezing s2 (default: same as --s)")
    sw.add_argument("--db", type=float, default=None, help="set r1 and s1 from squeezing in dB")
    sw.add_argument("--scenario", choices=[s.value for s in Scenario], default=None,
                    help="use a named scenario at --db / --r")
    _add_common(sw)

    sp = sub.add_parser("sweep", help="tabulate scenarios over a dB range")
    sp.add_argument("--scenario", action="append", choices=[s.value for s in Scenario],
                    help="repeatable; default a b c d e")
    sp.add_argument("--db-range", nargs=3, type=float, metavar=("MIN", "MAX", "STEP"), default=None)
    sp.add_argument("--db", type=float, default=None, help="single squeezing point in dB")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None, help="output path (default: stdout)")
    _add_common(sp)

    sub.add_parser("verify", help="run the reproduction checks")
    return ap


def _cmd_swap(parser, args) -> int:
    if args.db is not None and args.r is not None:
        parser.error("--db and --r are mutually exclusive")
    if args.db is not None and args.db < 0:
        parser.error("--db must be >= 0")
    r1 = criteria.db_to_r(args.db) if args.db is not None else args.r
    if args.scenario:
        if r1 is None:
            parser.error("--scenario needs --db or --r")
        if r1 < 0:
            parser.error("--r must be >= 0 with --scenario")
        rep = run_scenario(args.scenario, r1, _overrides(args))
    else:
        r1 = 0.0 if r1 is None else r1
        r2 = r1 if args.r2 is None else args.r2
        s1 = r1 if args.s is None else args.s
        s2 = s1 if args.s2 is None else args.s2
        eta_c = eta_from_sq(args.eta_c_sq) if args.eta_c_sq is not None else 1.0
        eta_a = eta_from_sq(args.eta_a_sq) if args.eta_a_sq is not None else 1.0
        gs = args.g_swap
        if gs == "auto":
            gs = auto_swap_gain(r1, r2, s1, s2, eta_c, eta_a)
        g = 1.0 if args.g is None else args.g
        rep = evaluate_swap(SwapParams(r1, r2, s1, s2, g_swap=gs, g=g, eta_c=eta_c, eta_a=eta_a))
    print(json.dumps(rep.as_dict(), indent=2))
    return 0


def _cmd_sweep(parser, args) -> int:
    if args.db is not None and args.db_range is not None:
        parser.error("--db and --db-range are mutually exclusive")
    if args.db is not None:
        lo, hi, step = args.db, args.db, 1.0
    elif args.db_range is not None:
        lo, hi, step = args.db_range
    else:
        lo, hi, step = 0.0, 10.0, 0.5
    try:
        spec = SweepSpec(
            scenarios=args.scenario or ["a", "b", "c", "d", "e"],
            db_min=lo,
            db_max=hi,
            db_step=step,
            overrides=_overrides(args),
            fmt=args.format,
            out=args.out,
        )
    except ValueError as exc:
        parser.error(f"--db-range: {exc}")
    text = render(sweep_rows(spec), spec.fmt)
    if spec.out:
        Path(spec.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify() -> int:
    from . import verify

    results = verify.run_all(print)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return _cmd_verify()
    _check_eta(parser, args)
    if args.command == "swap":
        return _cmd_swap(parser, args)
    return _cmd_sweep(parser, args)


if __name__ == "__main__":
    raise SystemExit(main())
