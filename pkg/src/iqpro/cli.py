"""Command-line interface: classify, sweep, verify, lambda.

Exit codes: 0 ok, 1 verification failure, 2 invalid input,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from .arith import fundamental_discriminants, radicand_to_disc
from .classifier import invariants_report, validate
from .iwasawa import PrecisionInsufficient, SeriesParseError, TruncSeries, quotient_is_Zp, weierstrass_data
from .localunits import InternalConsistencyError
from .rayclass import DEFAULT_DEPTH

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

SCHEMA_KEYS = (
    "disc", "prime", "case", "h", "class_group", "r", "delta_k", "d_k", "relation_rank",
    "gab_tors_predicted", "gab_tors_observed", "hypothesis_t", "hypothesis_confident",
    "lambda_structure", "xk_generators", "xk_inertia_families", "verification",
)

log = logging.getLogger("iqpro")


class InputError(Exception):
    pass


def _disc(args) -> int:
    if args.radicand is not None:
        if args.disc is not None:
            raise InputError("give either --disc or --radicand, not both")
        try:
            return radicand_to_disc(args.radicand)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if args.disc is None:
        raise InputError("--disc or --radicand is required")
    return args.disc


def _validated(args) -> tuple[int, int]:
    D = _disc(args)
    try:
        validate(D, args.prime)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return D, args.prime


def cmd_classify(args) -> int:
    D, p = _validated(args)
    rep = invariants_report(D, p, ray_depth=args.ray_depth, precision=args.precision)
    if args.format == "json":
        print(json.dumps(rep.to_json(), indent=2, ensure_ascii=False))
    else:
        print(rep.to_text())
    return EXIT_OK


def cmd_verify(args) -> int:
    D, p = _validated(args)
    rep = invariants_report(D, p, ray_depth=args.ray_depth)
    print(f"D = {D}, p = {p}: {rep.case.value}, d_k = {rep.d_k}, delta_k = {rep.delta_k}")
    for c in rep.verification:
        status = "skip" if c.passed is None else ("ok" if c.passed else "FAIL")
        print(f"[{status}] {c.name}: {c.detail}")
    return EXIT_OK if rep.all_passed() else EXIT_FAIL


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    return json.dumps(v, separators=(",", ":"), ensure_ascii=False)


def sweep_row(D: int, p: int, ray_depth: int = DEFAULT_DEPTH) -> list[str]:
    j = invariants_report(D, p, ray_depth=ray_depth).to_json()
    return [_cell(j[k]) for k in SCHEMA_KEYS]


def _row_job(task: tuple[int, int, int]) -> list[str]:
    return sweep_row(*task)


def _read_existing(path: str) -> dict[int, list[str]]:
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        return {}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != SCHEMA_KEYS:
        raise InputError(f"{path} exists and is not a sweep file")
    return {int(r[0]): r for r in rows[1:] if len(r) == len(SCHEMA_KEYS)}


def _format_rows(rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCHEMA_KEYS)
    w.writerows(rows)
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if not args.dmin < args.dmax <= 0:
        raise InputError("need dmin < dmax <= 0")
    try:
        validate(-4, args.prime)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    discs = fundamental_discriminants(args.dmin, args.dmax)
    done = _read_existing(args.out)
    todo = [D for D in discs if D not in done]
    log.info("sweep: %d discriminants, %d already present", len(discs), len(discs) - len(todo))
    fresh = not done
    mode = "w" if fresh else "a"
    with open(args.out, mode, newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if fresh:
            w.writerow(SCHEMA_KEYS)
            fh.flush()
        tasks = [(D, args.prime, args.ray_depth) for D in todo]
        if args.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                results = ex.map(_row_job, tasks, chunksize=1)
                for D, row in zip(todo, results):
                    w.writerow(row)
                    fh.flush()
                    done[D] = row
        else:
            for D, task in zip(todo, tasks):
                row = _row_job(task)
                w.writerow(row)
                fh.flush()
                done[D] = row
    # keep the canonical order (by |D|) after a resumed run
    canonical = _format_rows([done[D] for D in sorted(done, key=abs)])
    with open(args.out, encoding="utf-8", newline="") as fh:
        current = fh.read()
    if current != canonical:
        tmp = args.out + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(canonical)
        os.replace(tmp, args.out)
    print(f"{len(discs)} discriminants, {len(todo)} computed, written to {args.out}")
    return EXIT_OK


def cmd_lambda(args) -> int:
    try:
        f = TruncSeries.parse(args.poly, args.prime, args.N, args.M)
    except SeriesParseError as exc:
        raise InputError(str(exc)) from exc
    try:
        if args.mode == "weierstrass":
            if not f.is_univariate():
                raise InputError("weierstrass mode needs a series in S only")
            if f.is_zero():
                raise InputError("series is zero at the working precision")
            mu, lam, ok = weierstrass_data(f)
            print(f"mu={mu} lambda={lam} certified={'true' if ok else 'false'}")
        else:
            if f.is_unit():
                raise InputError("quotient mode needs a nonunit series")
            print(f"quotient_is_Zp={'true' if quotient_is_Zp(f) else 'false'} certified=true")
    except PrecisionInsufficient as exc:
        print(f"undetermined: {exc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iqpro", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_args(sp):
        sp.add_argument("--disc", type=int, help="fundamental discriminant D < 0")
        sp.add_argument("--radicand", type=int, help="squarefree m < 0; D = m or 4m")
        sp.add_argument("--prime", type=int, required=True)
        sp.add_argument("--ray-depth", type=int, default=DEFAULT_DEPTH, dest="ray_depth")

    sp = sub.add_parser("classify", help="full report for one field")
    field_args(sp)
    sp.add_argument("--precision", type=int, help="starting precision for local units")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify", help="formula-vs-oracle checks")
    field_args(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="CSV of reports for dmin <= D < dmax")
    sp.add_argument("--dmin", type=int, required=True)
    sp.add_argument("--dmax", type=int, required=True)
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--ray-depth", type=int, default=DEFAULT_DEPTH, dest="ray_depth")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("lambda", help="Weierstrass data and the Lambda/(f,T) test")
    sp.add_argument("--poly", required=True, help='polynomial in S, T, e.g. "(1+S)^3-1"')
    sp.add_argument("--prime", type=int, default=3)
    sp.add_argument("--mode", choices=("weierstrass", "quotient"), default="weierstrass")
    sp.add_argument("--N", type=int, default=8, help="p-adic precision")
    sp.add_argument("--M", type=int, default=16, help="degree bound")
    sp.set_defaults(func=cmd_lambda)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InternalConsistencyError, AssertionError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
