"""Command-line interface.

Exit codes: 0 success, 2 domain errors (not a period, no Tate period,
unknown label, ...), 3 parse/usage errors, 4 cache corruption.
"""

import argparse
import datetime
import json
import re
import sys
from fractions import Fraction

from . import __version__
from .cache import Cache, CacheError
from .curves import (
    CurveError,
    curve_by_label,
    curve_from_ainvs,
    curve_l_invariant,
    conductor,
    reduction_type,
    tate_period,
)
from .measures import (
    MeasureError,
    build_measure,
    exceptional_zero_check,
    lp_value_and_derivative,
    stickelberger,
    twist_product_check,
)
from .modsym import ModSymError, build_space, eigen_symbol
from .padic import PadicError, check_prime
from .periods import NotAPeriodError, Period, li


class UsageError(Exception):
    """Bad syntax in arguments or literals: exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- period literals ----------------------------------------------------

_FACTOR_RE = re.compile(
    r"^\s*(?:\(\s*(-?\d+(?:\s*/\s*\d+)?)\s*\)|(-?\d+(?:/\d+)?))\s*(?:\^\s*(-?\d+))?\s*$"
)


def parse_period_literal(text, p):
    """Grammar: factor ('*' factor)*, factor = base ['^' int],
    base = rational or (rational); e.g. "5^1 * (2/3)^-2"."""
    if not text or not text.strip():
        raise UsageError("empty period literal")
    factors = []
    for chunk in text.split("*"):
        m = _FACTOR_RE.match(chunk)
        if not m:
            raise UsageError(f"cannot parse period factor {chunk.strip()!r}")
        base = (m.group(1) or m.group(2)).replace(" ", "")
        exp = int(m.group(3)) if m.group(3) else 1
        try:
            base = Fraction(base)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad rational {base!r}: {exc}") from exc
        if base == 0:
            raise UsageError("zero base in period literal")
        factors.append((base, exp))
    return Period(p, factors)


def parse_branch(text, p):
    if text is None or text.lower() in ("p", "iwasawa", "log_p"):
        return "iwasawa"
    if text.lower() in ("cyc", "cyclotomic"):
        return "cyclotomic"
    value = Fraction(1)
    for base, exp in parse_period_literal(text, p).factors:
        value *= Fraction(base) ** exp
    return value


# -- argument plumbing ----------------------------------------------------


def _prime(text):
    try:
        return check_prime(int(text))
    except (ValueError, PadicError) as exc:
        raise UsageError(f"-p wants a prime: {exc}") from exc


def _precision(text):
    n = int(text)
    if n < 5:
        raise UsageError("--prec must be at least 5")
    return n


def _depth(text):
    n = int(text)
    if not 1 <= n <= 4:
        raise UsageError("--depth must be between 1 and 4")
    return n


def _sign(text):
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise UsageError("--sign must be + or -")


def _user_table_path(cache):
    import os

    if cache is None:
        return None
    return os.path.join(cache.directory, "user_curves.tsv")


def _resolve_curve(args, cache=None):
    if getattr(args, "label", None):
        return curve_by_label(args.label, _user_table_path(cache))
    if getattr(args, "curve", None):
        parts = args.curve.split(",")
        if len(parts) != 5:
            raise UsageError("--curve wants a1,a2,a3,a4,a6")
        try:
            ainvs = [int(x) for x in parts]
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return curve_from_ainvs(ainvs)
    raise UsageError("provide --label or --curve")


def _add_curve_args(sub):
    sub.add_argument("--label", help="curve label from the bundled table")
    sub.add_argument("--curve", help="a1,a2,a3,a4,a6 (integral model)")


def build_parser():
    ap = _Parser(prog="plinv", description=__doc__)
    ap.add_argument("--cache-dir", default=None, help="override the cache directory")
    ap.add_argument("--no-cache", action="store_true", help="disable the disk cache")
    ap.add_argument("--no-meta", action="store_true", help="suppress the timestamp block")
    ap.add_argument("--format", choices=("json", "table"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("li-period", help="L-invariant of a period literal")
    s.add_argument("literal")
    s.add_argument("-p", type=_prime, required=True)
    s.add_argument("--branch", default="p", help="p | cyc | a rational literal with ord != 0")
    s.add_argument("--prec", type=_precision, default=20)

    s = sub.add_parser("li-curve", help="Tate period and its L-invariant")
    _add_curve_args(s)
    s.add_argument("-p", type=_prime, required=True)
    s.add_argument("--prec", type=_precision, default=20)

    s = sub.add_parser("check-ezc", help="exceptional-zero comparison")
    _add_curve_args(s)
    s.add_argument("-p", type=_prime, required=True)
    s.add_argument("--depth", type=_depth, default=3)
    s.add_argument("--prec", type=_precision, default=20)
    s.add_argument("--sign", type=_sign, default=1)
    s.add_argument("--dual", action="store_true")

    s = sub.add_parser("check-twist", help="quadratic-twist product bookkeeping")
    _add_curve_args(s)
    s.add_argument("-D", type=int, required=True, dest="disc")
    s.add_argument("-p", type=_prime, required=True)
    s.add_argument("--depth", type=_depth, default=3)
    s.add_argument("--prec", type=_precision, default=20)

    s = sub.add_parser("stickelberger", help="Stickelberger element at depth n")
    _add_curve_args(s)
    s.add_argument("-p", type=_prime, required=True)
    s.add_argument("-n", "--depth", type=_depth, default=2)
    s.add_argument("--prec", type=_precision, default=20)
    s.add_argument("--dual", action="store_true")

    s = sub.add_parser("lp", help="p-adic L-value and derivative data")
    _add_curve_args(s)
    s.add_argument("-p", type=_prime, required=True)
    s.add_argument("--depth", type=_depth, default=3)
    s.add_argument("--prec", type=_precision, default=20)
    s.add_argument("--table", action="store_true", help="include the measure table")
    s.add_argument("--dual", action="store_true")

    s = sub.add_parser("import-curve", help="validate and register a table row")
    s.add_argument("--row", required=True,
                   help='"label a1,a2,a3,a4,a6"; derived data is recomputed')

    s = sub.add_parser("modsym", help="modular symbol spaces")
    s2 = s.add_subparsers(dest="modsym_command", required=True)
    d = s2.add_parser("dump", help="presentation and Hecke matrices")
    d.add_argument("--level", type=int, required=True)
    d.add_argument("--sign", type=_sign, default=1)
    d.add_argument("--hecke", default="2,3", help="comma-separated primes")

    return ap


# -- command handlers -------------------------------------------------------


def cmd_li_period(args, cache):
    period = parse_period_literal(args.literal, args.p)
    branch = parse_branch(args.branch, args.p)
    value = li(period, branch=branch, prec=args.prec)
    return {
        "command": "li-period",
        "p": args.p,
        "period": period.to_json(),
        "branch": args.branch,
        "prec": args.prec,
        "li": value.to_json(),
    }


def cmd_li_curve(args, cache):
    curve = _resolve_curve(args, cache)
    red = reduction_type(curve, args.p)
    tp = tate_period(curve, args.p, args.prec, cache)
    value = curve_l_invariant(curve, args.p, args.prec, cache)
    return {
        "command": "li-curve",
        "curve": curve.to_json(),
        "reduction": red.to_json(),
        "tate_period": tp.q.to_json(),
        "li": value.to_json(),
        "prec": args.prec,
    }


def cmd_check_ezc(args, cache):
    curve = _resolve_curve(args, cache)
    rep = exceptional_zero_check(curve, args.p, args.depth, args.prec,
                                 args.sign, args.dual, cache=cache)
    return {"command": "check-ezc", **rep.to_json()}


def cmd_check_twist(args, cache):
    curve = _resolve_curve(args, cache)
    rep = twist_product_check(curve, args.disc, args.p, args.depth, args.prec,
                              cache=cache)
    return {"command": "check-twist", **rep.to_json()}


def _symbol_and_measure(args, cache):
    curve = _resolve_curve(args, cache)
    symbol = eigen_symbol(curve, level=None, cache=cache)
    measure = build_measure(symbol, args.p, args.depth, prec=args.prec)
    return curve, symbol, measure


def cmd_stickelberger(args, cache):
    curve, symbol, measure = _symbol_and_measure(args, cache)
    theta = stickelberger(measure, dual=args.dual)
    out = {
        "command": "stickelberger",
        "curve": curve.to_json(),
        "p": args.p,
        "depth": args.depth,
        "theta": theta.to_json(),
    }
    if args.depth >= 2:
        push = theta.pushforward()
        finer_ok = stickelberger(build_measure(symbol, args.p, args.depth - 1,
                                               prec=args.prec),
                                 dual=args.dual).coeffs == push.coeffs
        out["projection_compatible"] = finer_ok
    return out


def cmd_lp(args, cache):
    curve, symbol, measure = _symbol_and_measure(args, cache)
    theta = stickelberger(measure, dual=args.dual)
    l0, l1 = lp_value_and_derivative(measure, args.prec)
    if args.dual:
        l1 = -l1
    out = {
        "command": "lp",
        "curve": curve.to_json(),
        "p": args.p,
        "depth": args.depth,
        "prec": args.prec,
        "Lp0": str(l0),
        "Lp0_is_zero": l0 == 0,
        "Lp_derivative": l1.to_json(),
        "augmentation": str(theta.augmentation()),
        "unit_root": measure.root.to_json(),
        "value_at_zero": str(symbol.at_zero),
    }
    if args.table:
        out["measure"] = measure.to_json()
    red = reduction_type(curve, args.p)
    if red.kind == "split-multiplicative":
        rep = exceptional_zero_check(curve, args.p, args.depth, args.prec,
                                     dual=args.dual, cache=cache)
        out["exceptional_zero"] = rep.to_json()
    return out


def cmd_modsym_dump(args, cache):
    space = build_space(args.level, args.sign, cache)
    heckes = {}
    for tok in args.hecke.split(","):
        tok = tok.strip()
        if not tok:
            continue
        l = _prime(tok)
        heckes[str(l)] = [[str(x) for x in row] for row in space.hecke_matrix(l)]
    if cache is not None:
        from .modsym import _space_cache_name

        cache.store(_space_cache_name(args.level, args.sign), "modsym",
                    space.to_payload())
    out = space.to_json()
    out["command"] = "modsym dump"
    out["hecke"] = heckes
    return out


def cmd_import_curve(args, cache):
    from .curves import bad_primes, parse_table_row

    curve = parse_table_row(args.row)
    try:
        n = conductor(curve)
    except CurveError:
        n = None  # additive at 2 or 3: stored without a conductor claim
    entry = {
        "command": "import-curve",
        "curve": curve.to_json(),
        "conductor": n,
        "bad_primes": {str(p): reduction_type(curve, p).kind for p in bad_primes(curve)},
    }
    path = _user_table_path(cache)
    if path is not None:
        import os

        os.makedirs(os.path.dirname(path), exist_ok=True)
        existing = ""
        if os.path.exists(path):
            existing = open(path, "r", encoding="utf-8").read()
        line = f"{curve.label}\t{','.join(str(a) for a in curve.a_invariants)}\n"
        if line not in existing:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(line)
        entry["registered"] = path
    return entry


HANDLERS = {
    "li-period": cmd_li_period,
    "li-curve": cmd_li_curve,
    "check-ezc": cmd_check_ezc,
    "check-twist": cmd_check_twist,
    "stickelberger": cmd_stickelberger,
    "lp": cmd_lp,
    "import-curve": cmd_import_curve,
}


def _emit(payload, args, out):
    if not args.no_meta:
        payload["meta"] = {
            "package": f"plinv {__version__}",
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
    if args.format == "table":
        for key in sorted(payload):
            print(f"{key}\t{json.dumps(payload[key], sort_keys=True)}", file=out)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cache = None if args.no_cache else Cache(args.cache_dir)
        if args.command == "modsym":
            payload = cmd_modsym_dump(args, cache)
        else:
            payload = HANDLERS[args.command](args, cache)
        _emit(payload, args, out)
        return 0
    except UsageError as exc:
        print(f"plinv: {exc}", file=sys.stderr)
        return 3
    except CacheError as exc:
        print(f"plinv: cache corruption: {exc}", file=sys.stderr)
        return 4
    except (CurveError, MeasureError, ModSymError, NotAPeriodError, PadicError) as exc:
        print(f"plinv: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
