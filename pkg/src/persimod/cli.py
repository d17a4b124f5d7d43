"""Command-line front door.

One command per process; exit code 0 on success, 1 on domain errors
(bad parameters, failed tolerance, undiagonalizable towers), 2 on I/O
and parse errors.  `--machine` switches to line-oriented key=value
records; in either mode output bytes are deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import List, Optional

from .barcodes import Bar, Barcode
from .canonical import DiagonalizationError
from .cones import ConeParams, cantor_cubes, cone_coisotropy_test, corner_cloud, displacement_bound
from .fields import GF2, field_by_name
from .intervals import Interval, POS_INF
from .interleaving import UNKNOWN, check_interleaving, gamma, gamma_symmetric
from .io import (
    ParseError,
    emit_barcode,
    emit_certificate,
    load_certificate,
    load_system,
    parse_barcode,
    parse_cloud,
    parse_plfunction,
    validate_file,
)
from .limits import CompletionError, complete_cauchy, defect_check, hocolim
from .spectral import spectral_invariants, sublevel_barcode

__all__ = ["main", "rational_degeneracy"]


def _load_config() -> dict:
    path = os.environ.get("PERSIMOD_CONFIG")
    if not path or not os.path.exists(path):
        return {}
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line and "=" in line:
                key, val = line.split("=", 1)
                out[key.strip()] = val.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    cfg = _load_config()
    top = argparse.ArgumentParser(prog="persimod", description=__doc__)
    top.add_argument("--field", default=cfg.get("field", "2"),
                     help="scalar field: a prime p or 'q' for rationals")
    top.add_argument("--budget", type=int, default=int(cfg.get("budget", 2 ** 20)),
                     help="search budget for exhaustive interleaving checks")
    top.add_argument("--seed", type=int, default=int(cfg.get("seed", 0)),
                     help="seed for randomized subroutines (none currently)")
    top.add_argument("--machine", action="store_true",
                     default=cfg.get("machine", "").lower() in ("1", "true", "yes"),
                     help="emit line-oriented key=value records")
    sub = top.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="interleaving distances")
    dsub = dist.add_subparsers(dest="subcommand", required=True)
    dg = dsub.add_parser("gamma", help="asymmetric interleaving distance")
    dg.add_argument("left")
    dg.add_argument("right")
    dg.add_argument("--symmetric", action="store_true")
    dg.add_argument("--certificate", default="gamma.cert",
                    help="where to write the verified certificate")
    dc = dsub.add_parser("check", help="decide an (a,b)-interleaving")
    dc.add_argument("left")
    dc.add_argument("right")
    dc.add_argument("--a", required=True)
    dc.add_argument("--b", required=True)
    dc.add_argument("--method", default="matching", choices=("matching", "exhaustive"))

    sp = sub.add_parser("spectral", help="read spectral numbers off a barcode")
    sp.add_argument("file")
    sp.add_argument("--convention", required=True, choices=("LeftInfinite", "Sublevel"))
    sp.add_argument("--dim", required=True, type=int)

    sl = sub.add_parser("sublevel", help="sublevel persistence of a PL function")
    sl.add_argument("file")

    lim = sub.add_parser("limit", help="truncated colimit of a tower directory")
    lim.add_argument("dir")
    lim.add_argument("--defect", type=int, default=None,
                     help="also run the stage-n defect comparison")

    comp = sub.add_parser("complete", help="Cauchy completion of a barcode sequence")
    comp.add_argument("dir")
    comp.add_argument("--tol", required=True)

    cone = sub.add_parser("cone-test", help="cone-level coisotropy test")
    cone.add_argument("--cloud", required=True)
    cone.add_argument("--point", required=True,
                      help="base point, comma- or space-separated coordinates")
    cone.add_argument("--theta-res", type=float, default=5.0)

    can = sub.add_parser("cantor", help="Cantor cube families and displacement bounds")
    can.add_argument("--a", required=True)
    can.add_argument("--n", required=True, type=int)
    can.add_argument("--k", required=True, type=int)
    group = can.add_mutually_exclusive_group()
    group.add_argument("--emit-cloud", action="store_true")
    group.add_argument("--bound-table", action="store_true")

    demo = sub.add_parser("demo", help="built-in demonstration scenarios")
    dsub2 = demo.add_subparsers(dest="scenario", required=True)
    rd = dsub2.add_parser("rational-degeneracy",
                          help="distinct barcodes at certified distance 1/N")
    rd.add_argument("--denom-max", required=True, type=int)

    val = sub.add_parser("validate", help="parse any fixture file and summarize")
    val.add_argument("file")
    return top


def _farey(n: int) -> List[Fraction]:
    return sorted({Fraction(p, q) for q in range(1, n + 1) for p in range(q + 1)})


def rational_degeneracy(denom_max: int, field=GF2):
    """Two distinct one-degree barcodes of right-infinite bars at every
    reduced fraction of denominator <= N, interleaved at shifts (0, 1/N).

    Returns (F, G, certificate); the certificate is matching-built and
    verified, so the distance between the distinct barcodes is at most 1/N.
    """
    if denom_max < 2:
        raise ValueError("need denominator bound >= 2")
    pts = _farey(denom_max)
    F = Barcode([Bar(0, Interval(x, POS_INF)) for x in pts if x < 1])
    G = Barcode([Bar(0, Interval(x, POS_INF)) for x in pts if x > 0])
    if F == G:
        raise ValueError("degeneracy demo produced equal barcodes")
    cert = check_interleaving(F, G, 0, Fraction(1, denom_max), field=field)
    if cert is None or cert is UNKNOWN:
        raise ValueError("no certificate at the advertised shifts")
    return F, G, cert


def _emit(args, human: str, records: List[str]) -> None:
    if args.machine:
        for rec in records:
            print(rec)
    else:
        print(human)


def _cmd_dist(args, field) -> int:
    F = parse_barcode(args.left)
    G = parse_barcode(args.right)
    if args.subcommand == "check":
        result = check_interleaving(F, G, Fraction(args.a), Fraction(args.b),
                                    field=field, method=args.method, budget=args.budget)
        if result is UNKNOWN:
            word = "unknown"
        else:
            word = "interleaved" if result is not None else "not-interleaved"
        _emit(args, word, [f"a={args.a}", f"b={args.b}", f"result={word}"])
        return 0

    fn = gamma_symmetric if args.symmetric else gamma
    report = fn(F, G, field=field, budget=args.budget)
    records = [
        f"value={report.value}",
        f"exactness={report.exactness}",
        f"lower={report.lower}",
        f"upper={report.upper}",
    ]
    human = f"{report.value} {report.exactness.lower()}"
    if not report.is_exact:
        human += f" {report.lower} {report.upper}"
    if report.certificate is not None:
        text = emit_certificate(F, G, report.certificate)
        with open(args.certificate, "w", encoding="utf-8") as fh:
            fh.write(text)
        load_certificate(args.certificate)  # re-verify what we just wrote
        records.append(f"certificate={args.certificate}")
        human += f" (certificate: {args.certificate})"
    else:
        records.append("certificate=none")
    _emit(args, human, records)
    return 0


def _cmd_spectral(args) -> int:
    report = spectral_invariants(parse_barcode(args.file), args.convention, args.dim)
    spectrum = ",".join(f"{d}:{v}" for d, v in report.invariants)
    _emit(
        args,
        f"c-={report.c_minus} c+={report.c_plus} gamma={report.gamma}",
        [
            f"c_minus={report.c_minus}",
            f"c_plus={report.c_plus}",
            f"gamma={report.gamma}",
            f"spectrum={spectrum}",
        ],
    )
    return 0


def _cmd_limit(args, field) -> int:
    system = load_system(args.dir, field)
    if args.defect is not None:
        lhs, rhs, ok = defect_check(system, args.defect)
        _emit(
            args,
            f"defect at stage {args.defect}: {lhs} <= {rhs}: {'ok' if ok else 'VIOLATED'}",
            [f"stage={args.defect}", f"lhs={lhs}", f"rhs={rhs}", f"ok={str(ok).lower()}"],
        )
        return 0 if ok else 1
    result = hocolim(system)
    _emit(args, f"error bound: {result.error_bound}", [f"error_bound={result.error_bound}"])
    sys.stdout.write(emit_barcode(result.barcode))
    return 0


def _cmd_complete(args, field) -> int:
    import re as _re

    names = sorted(
        (int(m.group(1)), f)
        for f in os.listdir(args.dir)
        if (m := _re.match(r"^F(\d+)\.bc$", f))
    )
    if not names:
        raise ParseError(args.dir, None, "no stage files F<n>.bc")
    seq = [parse_barcode(os.path.join(args.dir, f)) for _, f in names]
    result = complete_cauchy(seq, Fraction(args.tol), field=field, budget=args.budget)
    _emit(
        args,
        f"start: {result.start}; distance to last stage: {result.final_gamma.value}",
        [f"start={result.start}", f"final_gamma={result.final_gamma.value}"],
    )
    sys.stdout.write(emit_barcode(result.barcode))
    return 0


def _cmd_cone(args) -> int:
    cloud = parse_cloud(args.cloud)
    point = [float(t) for t in args.point.replace(",", " ").split()]
    params = ConeParams(theta_res=args.theta_res)
    verdict = cone_coisotropy_test(cloud, point, params)
    if verdict.witness is not None:
        normal = ",".join(repr(float(x)) for x in verdict.witness.normal)
        _emit(args, f"{verdict.kind} witness-normal {normal}",
              [f"verdict={verdict.kind}", f"witness={normal}"])
    else:
        _emit(args, verdict.kind, [f"verdict={verdict.kind}"])
    return 0


def _cmd_cantor(args) -> int:
    a = Fraction(args.a)
    if args.bound_table:
        rows = [(k, displacement_bound(a, k, args.n)) for k in range(1, args.k + 1)]
        if args.machine:
            for k, bound in rows:
                print(f"level={k} bound={bound}")
        else:
            for k, bound in rows:
                print(f"{k} {bound}")
        return 0
    family = cantor_cubes(a, args.k, args.n)
    if args.emit_cloud:
        from .io import emit_cloud

        sys.stdout.write(emit_cloud(corner_cloud(family)))
        return 0
    bound = displacement_bound(a, args.k, args.n)
    _emit(
        args,
        f"{len(family.cubes)} cubes of edge {a ** args.k}; displacement bound {bound}",
        [f"cubes={len(family.cubes)}", f"edge={a ** args.k}", f"bound={bound}"],
    )
    return 0


def _cmd_demo(args, field) -> int:
    n = args.denom_max
    F, G, cert = rational_degeneracy(n, field)
    _emit(
        args,
        f"distinct barcodes ({len(F.bars)} vs {len(G.bars)} bars), "
        f"certified gamma <= 1/{n}",
        [
            f"n={n}",
            "distinct=true",
            f"bound={Fraction(1, n)}",
            f"cert_a={cert.a}",
            f"cert_b={cert.b}",
        ],
    )
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        field = field_by_name(args.field)
        if args.command == "dist":
            return _cmd_dist(args, field)
        if args.command == "spectral":
            return _cmd_spectral(args)
        if args.command == "sublevel":
            sys.stdout.write(emit_barcode(sublevel_barcode(parse_plfunction(args.file))))
            return 0
        if args.command == "limit":
            return _cmd_limit(args, field)
        if args.command == "complete":
            return _cmd_complete(args, field)
        if args.command == "cone-test":
            return _cmd_cone(args)
        if args.command == "cantor":
            return _cmd_cantor(args)
        if args.command == "demo":
            return _cmd_demo(args, field)
        if args.command == "validate":
            print(validate_file(args.file))
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, DiagonalizationError, CompletionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
