"""Command-line front end: ``hyptctl <subcommand> ...``.

Exit codes: 0 success, 1 property false (``check``), 2 usage or input
error, 3 timeout or partial result.
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import __version__
from .backend import SynthOptions, Unsupported, export_imitator
from .formula import classify_fragment, desugar, parse_formula, to_text
from .model import DENSE, DISCRETE, ModelError, format_pta, load_pta, to_dot
from .oracle import eval_top
from .reduce import model_check, reduce_all, reduce_synth

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3


def _formula(arg):
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return parse_formula(fh.read())
    return parse_formula(arg)


def _fraction_map(text):
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise argparse.ArgumentTypeError("expected name=value, got %r" % item)
        k, v = item.split("=", 1)
        out[k.strip()] = Fraction(v.strip())
    return out


def _grid(text):
    """``p=0..5,q=1..2`` -> {"p": [0..5], "q": [1, 2]}"""
    out = {}
    for item in text.split(","):
        k, rng = item.split("=", 1)
        lo, hi = rng.split("..")
        out[k.strip()] = list(range(int(lo), int(hi) + 1))
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="hyptctl", description="Parameter synthesis and model "
                                 "checking for parametric timed automata against nest-free "
                                 "hyperproperties with LAST/COUNT predicates.")
    ap.add_argument("--version", action="version", version="hyptctl " + __version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", "--model", required=True, help="model file (.pta)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized helpers (never changes results)")
    common.add_argument("-v", "--verbose", action="count", default=0)
    engine = argparse.ArgumentParser(add_help=False)
    engine.add_argument("--backend", choices=("builtin", "export"), default="builtin")
    engine.add_argument("--max-depth", type=int, default=None)
    engine.add_argument("--timeout", type=float, default=300.0)
    engine.add_argument("--time", choices=(DENSE, DISCRETE), default=DENSE)
    engine.add_argument("-o", "--outdir", default="out",
                        help="output directory for the export backend")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("reduce", parents=[common], help="write the product and PTCTL problem")
    p.add_argument("-f", "--formula", required=True, help="formula text or file")
    p.add_argument("-o", "--outdir", required=True)

    p = sub.add_parser("synth", parents=[common, engine], help="synthesize parameter valuations")
    p.add_argument("-f", "--formula", required=True)

    p = sub.add_parser("check", parents=[common, engine], help="is some valuation satisfying?")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--universal", action="store_true",
                   help="also decide whether every valuation satisfies the formula")

    p = sub.add_parser("classify", parents=[common], help="report the decidable fragment")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--time", choices=(DENSE, DISCRETE), default=DENSE)
    p.add_argument("--rational-params", action="store_true",
                   help="parameters range over the rationals (default: integers)")

    p = sub.add_parser("oracle", parents=[common], help="bounded discrete-time evaluation")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--valuation", type=_fraction_map, default={}, help="p1=2,p2=3")
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--grid", type=_grid, default=None,
                   help="evaluate on a grid instead, e.g. p1=0..5,p2=0..5")

    p = sub.add_parser("dump", parents=[common], help="print the model or a formula")
    p.add_argument("-f", "--formula", default=None)
    p.add_argument("--format", choices=("text", "dot"), default="text")
    return ap


def _opts(args):
    return SynthOptions(max_depth=args.max_depth, timeout=args.timeout, time_domain=args.time)


def _emit(args, obj, text):
    if args.json:
        print(json.dumps(obj, sort_keys=True, default=str))
    else:
        print(text)


def _export(A, psi, outdir, name=None):
    paths = []
    for art in reduce_all(A, psi, name):
        paths.extend(export_imitator(art, outdir))
    return paths


def cmd_reduce(args, A, psi):
    os.makedirs(args.outdir, exist_ok=True)
    written = []
    for art in reduce_all(A, psi, _stem(args.model)):
        written.extend(export_imitator(art, args.outdir))
        dot = os.path.join(args.outdir, art.name + ".dot")
        with open(dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(art.product))
        hq = os.path.join(args.outdir, art.name + ".ptctl")
        with open(hq, "w", encoding="utf-8") as fh:
            fh.write(art.formula_text + "\n")
            for fresh, text in art.legend:
                fh.write("# %s := %s\n" % (fresh, text))
        written += [dot, hq]
    _emit(args, {"written": written}, "\n".join(written))
    return EXIT_OK


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def cmd_synth(args, A, psi):
    if args.backend == "export":
        files = _export(A, psi, args.outdir, _stem(args.model))
        _emit(args, {"written": files}, "\n".join(files))
        return EXIT_OK
    S = reduce_synth(A, psi, _opts(args))
    _emit(args, S.to_json(), S.text() + ("\n(partial: under-approximation)" if S.partial else ""))
    return EXIT_PARTIAL if S.partial else EXIT_OK


def cmd_check(args, A, psi):
    if args.backend == "export":
        return cmd_synth(args, A, psi)
    r = model_check(A, psi, _opts(args), universality=args.universal)
    w = {k: str(v) for k, v in (r.witness or {}).items()}
    obj = {"sat": r.holds, "witness": w, "partial": bool(r.partial), "universal": r.universal}
    lines = ["SAT" if r.holds else "UNSAT"]
    if r.holds:
        lines.append("witness: " + (", ".join("%s=%s" % kv for kv in w.items()) or "(none)"))
    if r.universal is not None:
        lines.append("universal: %s" % ("yes" if r.universal else "no"))
    if r.partial:
        lines.append("(partial exploration)")
    _emit(args, obj, "\n".join(lines))
    if r.partial and not r.holds:
        return EXIT_PARTIAL
    return EXIT_OK if r.holds else EXIT_FALSE


def cmd_classify(args, A, psi):
    rep = classify_fragment(A, psi, integer_params=not args.rational_params, time=args.time)
    _emit(args, rep.as_dict(), rep.text())
    return EXIT_OK


def cmd_oracle(args, A, psi):
    if args.grid:
        names = list(args.grid)
        pts = []
        for combo in _product([args.grid[n] for n in names]):
            v = dict(args.valuation)
            v.update({n: Fraction(x) for n, x in zip(names, combo)})
            pts.append(v)
        res = _map(args.jobs, _oracle_point, [(A, v, psi, args.horizon) for v in pts])
        sat = [{k: str(x) for k, x in v.items()} for v, ok in zip(pts, res) if ok]
        _emit(args, {"satisfying": sat},
              "\n".join(", ".join("%s=%s" % kv for kv in v.items()) for v in sat) or "(none)")
        return EXIT_OK
    ok = eval_top(A, args.valuation, psi, args.horizon)
    _emit(args, {"holds": ok}, "true" if ok else "false")
    return EXIT_OK


def _product(lists):
    from itertools import product
    return product(*lists)


def _oracle_point(job):
    A, v, psi, h = job
    return eval_top(A, v, psi, h)


def _map(jobs, fn, items):
    if jobs <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_dump(args, A, psi):
    if psi is not None:
        _emit(args, {"formula": to_text(psi), "core": to_text(desugar(psi))},
              "formula: %s\ncore:    %s" % (to_text(psi), to_text(desugar(psi))))
        return EXIT_OK
    print(to_dot(A) if args.format == "dot" else format_pta(A), end="")
    return EXIT_OK


COMMANDS = {"reduce": cmd_reduce, "synth": cmd_synth, "check": cmd_check,
            "classify": cmd_classify, "oracle": cmd_oracle, "dump": cmd_dump}


def run(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    try:
        try:
            A = load_pta(args.model)
        except ModelError as e:
            raise ModelError("%s: %s" % (args.model, e))
        psi = None
        if getattr(args, "formula", None):
            try:
                psi = _formula(args.formula)
            except ModelError as e:
                raise ModelError("formula: %s" % e)
        return COMMANDS[args.cmd](args, A, psi)
    except (Unsupported, ModelError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
