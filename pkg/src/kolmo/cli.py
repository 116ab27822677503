"""Command-line front end: ``kolmo {list,analyze,simulate,portrait}``.

Exit codes: 0 success, 2 bound refused because a hypothesis failed,
1 any other error.
"""
from __future__ import annotations

import argparse
import io
import logging
import sys
from contextlib import contextmanager

from . import analysis as A
from . import catalog
from . import flow
from . import portrait
from .errors import KolmoError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUSED = 2

log = logging.getLogger("kolmo")


def _kv(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def _pair(text, sep, conv=float, what="pair"):
    parts = text.lower().split(sep)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected {what}, got {text!r}")
    try:
        return conv(parts[0]), conv(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {what}, got {text!r}") from None


def _grid(text):
    nx, ny = _pair(text, "x", int, "NxM")
    if nx < 2 or ny < 2 or nx * ny > 10_000:
        raise argparse.ArgumentTypeError("grid must be at least 2x2 and at most 10000 arrows")
    return nx, ny


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; code 2 is reserved for hypothesis refusals
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="kolmo", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--model", help="catalog model id (see `kolmo list`)")
        src.add_argument("--config", help='JSON file {"model": id, "parameters": {...}}')
        sp.add_argument("--set", dest="overrides", action="append", type=_kv, default=[],
                        metavar="KEY=VALUE", help="parameter override, repeatable")
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")

    sub.add_parser("list", help="list catalog models")

    sp = sub.add_parser("analyze", help="run the full pipeline and write a JSON report")
    common(sp)

    sp = sub.add_parser("simulate", help="integrate one trajectory and write CSV")
    common(sp)
    sp.add_argument("--start", required=True, type=lambda s: _pair(s, ",", what="x,y"), metavar="X,Y")
    sp.add_argument("--t-end", type=float, default=50.0)
    sp.add_argument("--tol", type=float, default=1e-8, help="relative tolerance; abs is tol/100")
    sp.add_argument("--stride", type=int, default=1, help="keep every n-th sample in the CSV")

    sp = sub.add_parser("portrait", help="write an SVG phase portrait")
    common(sp)
    sp.add_argument("--grid", type=_grid, default=(20, 20), metavar="NxM")
    sp.add_argument("--tol", type=float, default=1e-5, help="heteroclinic proximity tolerance")
    return p


@contextmanager
def _sink(path, mode="w"):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, mode, encoding="utf-8", newline="") as fh:
            yield fh


def _model(args):
    """``(model id, overrides)`` from ``--model``/``--set`` or ``--config`` (``--set`` wins)."""
    if args.config is not None:
        entry = catalog.load_config(args.config)
        params = dict(entry.system.params)
        params.update(dict(args.overrides))
        return entry.id, params
    return args.model, dict(args.overrides)


def cmd_list(args):
    for mid, desc in catalog.list_models():
        print(f"{mid:<14}{desc}")
    return EXIT_OK


def cmd_analyze(args):
    try:
        a = A.analyze(*_model(args))
        report = a.to_report()
        code = EXIT_REFUSED if a.refused else EXIT_OK
    except KolmoError as exc:
        report = {"schema_version": A.SCHEMA_VERSION, "model": args.model or args.config,
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        print(f"kolmo: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_ERROR
    with _sink(args.out) as fh:
        fh.write(A.dumps(report))
    if code == EXIT_REFUSED:
        print(f"kolmo: bound refused: {report['refusal']['reason']}", file=sys.stderr)
    return code


def cmd_simulate(args):
    model, overrides = _model(args)
    sysdef = catalog.load_model(model, overrides).system
    L = None
    try:
        a = A.analyze(model, overrides)
        L = a.L
    except KolmoError as exc:
        log.info("no Lyapunov values attached: %s", exc)
    traj = flow.integrate(sysdef, args.start, args.t_end, args.tol, max(1e-14, args.tol / 100),
                          L=L, strict=False)
    buf = io.StringIO()
    traj.to_csv(buf, stride=args.stride)
    with _sink(args.out) as fh:
        fh.write(buf.getvalue())
    if traj.termination in (flow.LEFT, flow.UNDERFLOW):
        print(f"kolmo: trajectory ended with {traj.termination} at {traj.final}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_portrait(args):
    a = A.analyze(*_model(args))
    het = None
    if a.bound is not None:
        try:
            het = flow.shoot_heteroclinic(a.sys, a.c, a.interior, tol=args.tol, L=a.L)
        except KolmoError as exc:
            log.warning("heteroclinic layer skipped: %s", exc)
    svg = portrait.render(a, grid=args.grid, heteroclinic=het)
    with _sink(args.out) as fh:
        fh.write(svg)
    if a.refused:
        print(f"kolmo: bound refused: {a.refusal['reason']}", file=sys.stderr)
        return EXIT_REFUSED
    return EXIT_OK


COMMANDS = {"list": cmd_list, "analyze": cmd_analyze, "simulate": cmd_simulate, "portrait": cmd_portrait}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except KolmoError as exc:
        print(f"kolmo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"kolmo: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
