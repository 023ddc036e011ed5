"""Command-line front end.

Every subcommand is a thin shell over the library: parse flags, call the
module operation, print its result.  Exit codes: 0 success, 1 domain
error (the message names the violated condition), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .core import ffht_forward, ffht_inverse, build_matrix
from .decompose import derive_plan
from .errors import FFHTError, ParseError
from .fastplan import (
    count_ops,
    parse_plan,
    serialize_plan,
    validate_plan,
    apply_plan,
)
from .fftrig import build_cas_table, ff_cos, ff_sin, kernel_spec
from .modfield import format_element, make_field, parse_element
from .plans import BUILTIN_NAMES, builtin_plan
from .report import render_report


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffht",
        description="Exact finite-field Hartley transforms and fast plans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_kernel_flags(p):
        p.add_argument("--p", type=int, dest="modulus", help="prime modulus")
        p.add_argument("--zeta", help="kernel element, e.g. 2+2j")
        p.add_argument(
            "--n", type=int, default=None,
            help="expected blocklength; must equal the kernel's order",
        )

    t = sub.add_parser("transform", help="apply the transform to a signal")
    add_kernel_flags(t)
    t.add_argument("--input", help="comma-separated elements")
    t.add_argument("--input-file", help="file with one element per line")
    t.add_argument("--inverse", action="store_true")
    t.add_argument("--fast", action="store_true", help="use a fast plan")
    t.add_argument("--builtin", choices=BUILTIN_NAMES, help="builtin plan name")

    m = sub.add_parser("matrix", help="print the dense transform matrix")
    add_kernel_flags(m)
    m.add_argument("--format", choices=("pretty", "csv"), default="pretty")

    tb = sub.add_parser("table", help="print the sin/cos/cas kernel table")
    add_kernel_flags(tb)

    pl = sub.add_parser("plan", help="fast-plan operations")
    psub = pl.add_subparsers(dest="plan_command", required=True)
    for name, desc in (
        ("show", "print a plan in the plan file format"),
        ("validate", "check a plan against the dense matrix"),
        ("count", "print a plan's operation ledger"),
    ):
        sp = psub.add_parser(name, help=desc)
        sp.add_argument("--builtin", choices=BUILTIN_NAMES)
        sp.add_argument("--file", help="plan file path")
    d = psub.add_parser("derive", help="derive a plan from the kernel")
    add_kernel_flags(d)
    d.add_argument("--strategy", choices=("greedy", "exhaustive"), default="greedy")
    d.add_argument("--allow-scaling", action="store_true")
    d.add_argument("--max-layers", type=int, default=None)
    d.add_argument("--out", help="write the plan file here")

    r = sub.add_parser("report", help="operation-count comparison tables")
    r.add_argument("--format", choices=("md", "csv"), default="md")
    return parser


def _make_spec(args):
    if args.modulus is None or args.zeta is None:
        raise UsageError("--p and --zeta are required here")
    ctx = make_field(args.modulus)
    zeta = parse_element(args.zeta, ctx)
    return kernel_spec(ctx, zeta, args.n)


def _read_signal(args, spec):
    if (args.input is None) == (args.input_file is None):
        raise UsageError("exactly one of --input or --input-file is required")
    if args.input is not None:
        tokens = [tok for tok in args.input.split(",")]
    else:
        tokens = []
        with open(args.input_file) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    tokens.append(line)
    return tuple(parse_element(tok, spec.ctx) for tok in tokens)


def _load_plan(args):
    if (args.builtin is None) == (args.file is None):
        raise UsageError("exactly one of --builtin or --file is required")
    if args.builtin is not None:
        return builtin_plan(args.builtin)
    with open(args.file) as fh:
        return parse_plan(fh.read())


def _cmd_transform(args) -> int:
    if args.fast:
        if args.builtin is None:
            raise UsageError("--fast requires --builtin")
        if args.inverse:
            raise UsageError("fast plans compute the forward transform only")
        plan = builtin_plan(args.builtin)
        spec = plan.spec
        v = _read_signal(args, spec)
        out = apply_plan(plan, v)
    else:
        spec = _make_spec(args)
        v = _read_signal(args, spec)
        out = ffht_inverse(v, spec) if args.inverse else ffht_forward(v, spec)
    for x in out:
        print(format_element(x))
    return 0


def _cmd_matrix(args) -> int:
    spec = _make_spec(args)
    entries = build_matrix(spec).entries
    cells = [[format_element(x) for x in row] for row in entries]
    if args.format == "csv":
        for row in cells:
            print(",".join(row))
    else:
        width = max(len(c) for row in cells for c in row)
        for row in cells:
            print(" ".join(c.rjust(width) for c in row))
    return 0


def _cmd_table(args) -> int:
    spec = _make_spec(args)
    cas = build_cas_table(spec)
    print("i sin cos cas")
    for i in range(spec.n):
        print(
            f"{i} {format_element(ff_sin(spec, i))} "
            f"{format_element(ff_cos(spec, i))} {format_element(cas.cas[i])}"
        )
    return 0


def _cmd_plan(args) -> int:
    if args.plan_command == "derive":
        spec = _make_spec(args)
        plan = derive_plan(
            spec,
            strategy=args.strategy,
            allow_scaling=args.allow_scaling,
            max_layers=args.max_layers,
        )
        text = serialize_plan(plan)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        print(count_ops(plan))
        return 0
    plan = _load_plan(args)
    if args.plan_command == "show":
        sys.stdout.write(serialize_plan(plan))
        return 0
    if args.plan_command == "validate":
        report = validate_plan(plan)
        print(report)
        return 0 if report.equal else 1
    if args.plan_command == "count":
        print(count_ops(plan))
        return 0
    raise UsageError(f"unknown plan command {args.plan_command!r}")


def _cmd_report(args) -> int:
    sys.stdout.write(render_report(args.format))
    return 0


_DISPATCH = {
    "transform": _cmd_transform,
    "matrix": _cmd_matrix,
    "table": _cmd_table,
    "plan": _cmd_plan,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return _DISPATCH[args.command](args)
    except (UsageError, ParseError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FFHTError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
