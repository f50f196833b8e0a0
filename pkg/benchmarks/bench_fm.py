"""Compare the compiled and pure-Python elimination kernels.

    python3 benchmarks/bench_fm.py [--quick]

Two workloads: random Fourier-Motzkin eliminations on 5-variable systems, and
synthesis on the bundled opacity and coffee fixtures.  Results are checked for
equality between kernels before timings are printed.
"""

import argparse
import os
import random
import sys
import time

from hyptctl import polyhedra
from hyptctl.backend import SynthOptions
from hyptctl.formula import parse_formula
from hyptctl.model import load_pta
from hyptctl.polyhedra import ConvexPoly, Lin
from hyptctl.reduce import reduce_synth

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
VARS = ("a", "b", "c", "d", "e")


def random_systems(n, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        cons = []
        for _ in range(rng.randint(6, 10)):
            e = Lin({v: rng.randint(-3, 3) for v in VARS}, rng.randint(-6, 6))
            cons.append(e.lt(0) if rng.random() < 0.3 else e.le(0))
        out.append(cons)
    return out


def fm_workload(systems):
    res = []
    for cons in systems:
        P = ConvexPoly.of(VARS, cons)
        res.append((P.is_empty(), P.project(("a", "b")).text()))
    return res


def synth_workload(pairs):
    res = []
    for m, f in pairs:
        A = load_pta(os.path.join(ROOT, "fixtures", m + ".pta"))
        with open(os.path.join(ROOT, "fixtures", f + ".hq")) as fh:
            psi = parse_formula(fh.read())
        res.append(reduce_synth(A, psi, SynthOptions(timeout=120)).text())
    return res


def timed(kernel, fn, *args):
    polyhedra.set_kernel(kernel)
    t = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    if polyhedra._fm_fast is None:
        sys.exit("compiled kernel not built; run pip install -e . first")
    systems = random_systems(60 if args.quick else 300)
    pairs = [("opacity", "opacity"), ("coffee", "opacity")]
    if not args.quick:
        pairs.append(("stac", "opacity"))
    print("%-28s %10s %10s %8s" % ("workload", "python s", "cython s", "speedup"))
    for name, fn, arg in (("FM projection x%d" % len(systems), fm_workload, systems),
                          ("synthesis %s" % ",".join(m for m, _ in pairs), synth_workload, pairs)):
        r_py, t_py = timed("python", fn, arg)
        r_cy, t_cy = timed("cython", fn, arg)
        if r_py != r_cy:
            sys.exit("kernels disagree on %s" % name)
        print("%-28s %10.2f %10.2f %7.1fx" % (name, t_py, t_cy, t_py / t_cy))


if __name__ == "__main__":
    main()
